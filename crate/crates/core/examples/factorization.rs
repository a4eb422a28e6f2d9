//! Predicted factorization of γ_f for Δ = 161 and the fitted unit part.
use greenfac::factor::{gamma_exponents, reconcile};
use greenfac::greens::{green_kf_at_cycle, GreenParams};
use greenfac::mforms::PrincipalPart;

fn main() -> greenfac::Result<()> {
    let pp: PrincipalPart = "1=1".parse()?;
    let report = gamma_exponents(4, &pp, -7, -23)?;
    println!("Delta = {}, kappa = {}", report.delta, report.kappa);
    for (l, e) in &report.exponents {
        println!("  {} = {}  exponent {e}", l.name(), l.ideal);
    }
    let tol = 1e-8;
    let lhs = green_kf_at_cycle(&pp, -7, -23, &GreenParams::new(4, tol, 30)?)?.to_f64();
    let done = reconcile(report, lhs, tol)?;
    let u = done.unit.as_ref().unwrap();
    println!(
        "unit power on eps_F: {}/{} (fit {:.9})",
        u.unit_power.0, u.unit_power.1, u.unit_power_fit
    );
    println!("residual {:.3e} below {:.3e}", u.residual, u.threshold);
    Ok(())
}
