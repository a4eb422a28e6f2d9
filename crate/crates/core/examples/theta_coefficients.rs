//! Coefficients of the genus theta function ϑ_χ for Δ = 21 by both routes.
use greenfac::finquad::{FQMElem, Genus, GenusChar};
use greenfac::thetacoef::{c_chi_lattice, ThetaCoeffs};

fn main() -> greenfac::Result<()> {
    let g = Genus::new(21)?;
    let th = ThetaCoeffs::new(&g);
    for chi in GenusChar::all_odd(21) {
        let table = th.table(&chi, 30);
        println!(
            "χ = ({}, {}): {} nonzero coefficients with n <= 30",
            chi.delta1,
            chi.delta2,
            table.entries.len()
        );
        for e in table.entries.iter().take(8) {
            let h = FQMElem::new(e.h[0], e.h[1], 21);
            let lattice = c_chi_lattice(&g, &chi, e.n, &h, &g.group.reps)?;
            println!(
                "  c({}/21, {h:?}) = {}  (lattice route {lattice})",
                e.n, e.c
            );
        }
        let mu = g.field().elem(5, 1);
        println!("  C_χ({mu}) = {}", th.big_c(&chi, &mu)?);
    }
    Ok(())
}
