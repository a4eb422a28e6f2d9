//! Arithmetic in Q(√161): units, narrow class group, split primes, factorization.
use greenfac::qfield::{factor_ideal, FracIdeal, QuadField};

fn main() -> greenfac::Result<()> {
    let f = QuadField::new(161)?;
    println!("Delta = {}", f.delta());
    println!("eps_F = {}  (norm {})", f.eps, f.eps_norm);
    println!("eps_F^+ = {}", f.eps_plus);
    println!("h = {}, h+ = {}", f.class_number, f.narrow_class_number);
    for p in [2, 5, 7, 17, 19, 23] {
        let above: Vec<String> = f.primes_above(p).iter().map(|q| q.to_string()).collect();
        println!("{p}: {:?} -> [{}]", f.splitting(p), above.join(", "));
    }
    let mu = f.elem(38, 3);
    println!("({mu}) has norm {}", mu.norm());
    for (q, e) in factor_ideal(&f, &FracIdeal::principal(&mu)) {
        println!("  {q}^{e}");
    }
    Ok(())
}
