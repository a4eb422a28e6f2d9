//! Higher Green's functions: a CM-cycle value and the weight-2 closed form.
use greenfac::greens::{
    cm_points, g2_i_z7_closed_form, green, green_kf_at_cycle, GreenParams, Point,
};
use greenfac::mforms::PrincipalPart;

fn main() -> greenfac::Result<()> {
    let pp: PrincipalPart = "1=1".parse()?;
    let v = green_kf_at_cycle(&pp, -7, -23, &GreenParams::new(4, 1e-9, 30)?)?;
    println!("G_4,f on the (-7, -23) cycle: {:.20}", v.value);
    println!(
        "  radius cosh = {}, terms = {}, converged = {}",
        v.radius, v.terms, v.converged
    );

    let i = Point::from_f64(0.0, 1.0)?;
    let z7 = cm_points(-7)?[0].z();
    let v = green(&i, &z7, &GreenParams::new(2, 1e-6, 30)?)?;
    println!("G_2(i, z_7)  = {:.15}", v.value);
    println!("closed form  = {:.15}", g2_i_z7_closed_form());
    Ok(())
}
