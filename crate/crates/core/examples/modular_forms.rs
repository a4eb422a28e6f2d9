//! Exact q-expansions and the cusp-form obstruction to a principal part.
use greenfac::mforms::{
    check_principal_part, cusp_basis, delta_form, eisenstein, PrincipalCheck, PrincipalPart,
};

fn main() -> greenfac::Result<()> {
    println!("E_4 = {}", eisenstein(4, 6)?);
    println!("Δ   = {}", delta_form(6)?);
    for g in cusp_basis(24, 5)? {
        println!("S_24 basis: {g}");
    }
    // The last one pairs to zero against both basis elements above.
    for (k, pp) in [(4, "1=1"), (12, "1=1"), (12, "1=-195660,2=48,3=1")] {
        let pp: PrincipalPart = pp.parse()?;
        match check_principal_part(k, &pp)? {
            PrincipalCheck::Valid => println!("k = {k}, principal part {pp}: valid"),
            PrincipalCheck::Obstruction(v) => {
                let v: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                println!(
                    "k = {k}, principal part {pp}: obstructed by [{}]",
                    v.join(", ")
                );
            }
        }
    }
    Ok(())
}
