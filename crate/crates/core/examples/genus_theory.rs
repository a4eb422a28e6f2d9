//! The discriminant module A_Δ, the involutions σ_p and genus characters for Δ = 12.
use greenfac::finquad::{sigma_p, FQMElem, Genus, GenusChar};
use greenfac::qfield::ideals_of_norm;

fn main() -> greenfac::Result<()> {
    let d = 12;
    let g = Genus::new(d)?;
    println!("A_{d}: {} elements, d0 = {}", FQMElem::all(d).len(), g.d0.0);
    for h in FQMElem::all(d).iter().filter(|h| !h.is_zero()).take(6) {
        println!(
            "  {h:?}: Q = {}, σ_2 = {:?}, σ_3 = {:?}, s_h = {}",
            h.q(),
            sigma_p(h, 2)?,
            sigma_p(h, 3)?,
            g.s_h(h)
        );
    }
    for chi in GenusChar::all(d) {
        let kind = if chi.is_odd() { "odd" } else { "even" };
        print!("χ = ({}, {}) {kind}:", chi.delta1, chi.delta2);
        for n in [1, 11, 13, 25] {
            for a in ideals_of_norm(g.field(), n) {
                print!("  ρ({a}) = {}", g.rho_kf(&chi, &a));
            }
        }
        println!();
    }
    Ok(())
}
