//! Reduction theory of primitive ideals [a, (b+√Δ)/2] (equivalently, of
//! indefinite binary quadratic forms) and the continued fraction of ω.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::elem::FieldElem;
use crate::arith::isqrt;

/// A primitive ideal [a, (b+√Δ)/2] as a plain integer pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prim {
    pub a: BigInt,
    pub b: BigInt,
}

pub(crate) fn is_reduced(p: &Prim, disc: i64) -> bool {
    let d = BigInt::from(disc);
    let two_a = &p.a * 2;
    if !p.b.is_positive() || &p.b * &p.b >= d {
        return false;
    }
    let s = &p.b + &two_a;
    if &s * &s <= d {
        return false;
    }
    let t: BigInt = &two_a - &p.b;
    !t.is_positive() || &t * &t < d
}

/// One reduction step: returns J with J = θ·I and θ = (b − √Δ)/(2a).
pub(crate) fn rho(p: &Prim, disc: i64) -> (Prim, FieldElem) {
    let d = BigInt::from(disc);
    let c: BigInt = (&p.b * &p.b - &d) / (&p.a * 4);
    let a2 = c.abs();
    let neg_b = -p.b.clone();
    let two_a2 = &a2 * 2;
    let sq = BigInt::from(isqrt(disc));
    let b2 = if &a2 * &a2 < d {
        // Largest b' ≡ −b (mod 2a') with b' < √Δ.
        let k = (&sq - &neg_b).div_floor(&two_a2);
        &neg_b + &two_a2 * k
    } else {
        super::ideal::normalize_b(&neg_b, &a2)
    };
    let theta = FieldElem::new(
        BigRational::new(p.b.clone(), &p.a * 2),
        BigRational::new(-BigInt::one(), &p.a * 2),
        disc,
    );
    (Prim { a: a2, b: b2 }, theta)
}

/// Reduces `p`, returning the reduced ideal R and θ with R = θ·p.
pub(crate) fn reduce(p: &Prim, disc: i64) -> (Prim, FieldElem) {
    let mut cur = p.clone();
    let mut theta = FieldElem::one(disc);
    let mut steps = 0usize;
    while !is_reduced(&cur, disc) {
        let (next, t) = rho(&cur, disc);
        theta = &theta * &t;
        cur = next;
        steps += 1;
        assert!(steps < 100_000, "reduction failed to terminate");
    }
    (cur, theta)
}

/// The ρ-cycle of a reduced ideal: each entry (R_j, Θ_j) with R_j = Θ_j·R_0.
pub(crate) fn cycle(r0: &Prim, disc: i64) -> Vec<(Prim, FieldElem)> {
    debug_assert!(is_reduced(r0, disc));
    let mut out = vec![(r0.clone(), FieldElem::one(disc))];
    loop {
        let (last, th) = out.last().unwrap().clone();
        let (next, t) = rho(&last, disc);
        if &next == r0 {
            // Closing the cycle: Θ·t is a unit.
            out.push((next, &th * &t));
            return out;
        }
        out.push((next, &th * &t));
    }
}

/// All reduced primitive ideals.
pub(crate) fn all_reduced(disc: i64) -> Vec<Prim> {
    let s = isqrt(disc);
    let mut out = Vec::new();
    let mut b = if (s - disc).rem_euclid(2) == 0 {
        s
    } else {
        s - 1
    };
    while b > 0 {
        let n = (disc - b * b) / 4;
        let mut a = 1;
        while a * a <= n {
            if n % a == 0 {
                for aa in [a, n / a] {
                    let p = Prim {
                        a: BigInt::from(aa),
                        b: BigInt::from(b),
                    };
                    if is_reduced(&p, disc) && !out.contains(&p) {
                        out.push(p);
                    }
                }
            }
            a += 1;
        }
        b -= 2;
    }
    out.sort();
    out
}

/// Fundamental unit ε > 1 from the continued fraction of ω_Δ's reduced part:
/// (1+√Δ)/2 for odd Δ, √(Δ/4) for even Δ.
pub fn fundamental_unit_cf(disc: i64) -> FieldElem {
    let odd = disc % 2 != 0;
    let (dd, mut p_, mut q_) = if odd {
        (disc, 1i64, 2i64)
    } else {
        (disc / 4, 0, 1)
    };
    let sq = isqrt(dd);
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    loop {
        let a = (p_ + sq).div_euclid(q_);
        let pn = &p_cur * a + &p_prev;
        let qn = &q_cur * a + &q_prev;
        p_prev = std::mem::replace(&mut p_cur, pn);
        q_prev = std::mem::replace(&mut q_cur, qn);
        let (p, q) = (&p_cur, &q_cur);
        if odd {
            let n = p * p - p * q - q * q * BigInt::from((disc - 1) / 4);
            if n.abs().is_one() {
                let half = BigInt::from(2);
                let x = BigRational::new(p * 2 - q, half.clone());
                let y = BigRational::new(q.clone(), half);
                return FieldElem::new(x, y, disc);
            }
        } else {
            let n = p * p - q * q * BigInt::from(dd);
            if n.abs().is_one() {
                let x = BigRational::from_integer(p.clone());
                let y = BigRational::new(q.clone(), BigInt::from(2));
                return FieldElem::new(x, y, disc);
            }
        }
        let pn = a * q_ - p_;
        let qn = (dd - pn * pn) / q_;
        p_ = pn;
        q_ = qn;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reduced form of the unit ideal.
    fn principal_reduced(disc: i64) -> Prim {
        let s = isqrt(disc);
        let b = if (s - disc).rem_euclid(2) == 0 {
            s
        } else {
            s - 1
        };
        Prim {
            a: BigInt::one(),
            b: BigInt::from(b),
        }
    }

    #[test]
    fn cf_units() {
        assert_eq!(
            fundamental_unit_cf(161),
            FieldElem::from_ints(11775, 928, 161)
        );
        let e5 = fundamental_unit_cf(5);
        assert_eq!(e5.x, BigRational::new(1.into(), 2.into()));
        assert_eq!(e5.y, BigRational::new(1.into(), 2.into()));
        let e28 = fundamental_unit_cf(28);
        assert_eq!(e28.x, BigRational::from_integer(8.into()));
        assert_eq!(e28.y, BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn cycle_product_is_the_fundamental_unit() {
        for d in [5i64, 8, 12, 13, 21, 28, 161, 229, 321, 1001, 1020] {
            if !crate::arith::is_fundamental(d) {
                continue;
            }
            let r0 = principal_reduced(d);
            let cyc = cycle(&r0, d);
            let u = cyc.last().unwrap().1.clone();
            assert!(u.norm().abs().is_one());
            let e = fundamental_unit_cf(d);
            let ok = [u.clone(), -u.clone(), u.inv(), -u.inv()]
                .iter()
                .any(|c| c == &e);
            assert!(ok, "d={d}: cycle unit {u} vs cf unit {e}");
        }
    }

    #[test]
    fn reduction_reaches_reduced_ideals() {
        let d = 161;
        // (21² − 161)/4 = 70.
        let q = Prim {
            a: BigInt::from(70),
            b: BigInt::from(21),
        };
        let (r, theta) = reduce(&q, d);
        assert!(is_reduced(&r, d));
        assert_eq!(
            theta.norm().abs() * BigRational::from_integer(70.into()),
            BigRational::from_integer(r.a.clone())
        );
    }
}
