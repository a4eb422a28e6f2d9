use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::elem::{integral_denominator, FieldElem};

/// A fractional ideal s·[a, (b+√Δ)/2] with a > 0, 4a | b² − Δ and b ∈ (−a, a].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    pub scale: BigRational,
    pub a: BigInt,
    pub b: BigInt,
    pub disc: i64,
}

/// b reduced into (−a, a] modulo 2a.
pub(crate) fn normalize_b(b: &BigInt, a: &BigInt) -> BigInt {
    let two_a = a * 2;
    let mut r = b.mod_floor(&two_a);
    if &r > a {
        r -= &two_a;
    }
    r
}

/// Hermite normal form of the Z-span of vectors (u, v) in the basis (1, ω):
/// returns (A, B, C) with the lattice equal to Z(A, 0) + Z(B, C), 0 ≤ B < A.
pub(crate) fn hnf2(vectors: &[(BigInt, BigInt)]) -> (BigInt, BigInt, BigInt) {
    let mut piv: Option<(BigInt, BigInt)> = None;
    let mut rest: Vec<(BigInt, BigInt)> = Vec::new();
    for (u, v) in vectors {
        if v.is_zero() {
            rest.push((u.clone(), v.clone()));
            continue;
        }
        piv = Some(match piv {
            None => (u.clone(), v.clone()),
            Some((pu, pv)) => {
                let eg = pv.extended_gcd(v);
                let g = eg.gcd.clone();
                let nu = &eg.x * &pu + &eg.y * u;
                // The discarded combination has second coordinate 0.
                let ku = (v / &g) * &pu - (&pv / &g) * u;
                rest.push((ku, BigInt::zero()));
                (nu, g)
            }
        });
    }
    let (mut pb, mut pc) = piv.expect("lattice of rank 2 required");
    if pc.is_negative() {
        pb = -pb;
        pc = -pc;
    }
    let mut a = BigInt::zero();
    for (u, _) in rest {
        a = a.gcd(&u);
    }
    assert!(!a.is_zero(), "lattice of rank 2 required");
    let b = pb.mod_floor(&a);
    (a, b, pc)
}

impl FracIdeal {
    /// Builds the ideal from an HNF (A, B, C) of a sublattice of O_F, times `scale`.
    pub(crate) fn from_hnf(a: BigInt, b: BigInt, c: BigInt, scale: BigRational, disc: i64) -> Self {
        assert!(
            (&a % &c).is_zero() && (&b % &c).is_zero(),
            "not an O_F-module"
        );
        let pa = &a / &c;
        let pb = &b / &c;
        // (B/C) + ω = (2B/C + Δ + √Δ)/2.
        let bb = pb * 2 + BigInt::from(disc);
        let bb = normalize_b(&bb, &pa);
        debug_assert!({
            let r: BigInt = (&bb * &bb - BigInt::from(disc)) % (&pa * 4);
            r.is_zero()
        });
        FracIdeal {
            scale: scale * BigRational::from_integer(c),
            a: pa,
            b: bb,
            disc,
        }
    }

    pub fn primitive(a: BigInt, b: BigInt, disc: i64) -> Self {
        assert!(a.is_positive());
        let r: BigInt = (&b * &b - BigInt::from(disc)) % (&a * 4);
        assert!(r.is_zero(), "4a must divide b^2 - disc");
        let b = normalize_b(&b, &a);
        FracIdeal {
            scale: BigRational::one(),
            a,
            b,
            disc,
        }
    }

    pub fn unit(disc: i64) -> Self {
        FracIdeal::primitive(BigInt::one(), BigInt::from(disc.rem_euclid(2)), disc)
    }

    /// The principal ideal (μ), μ ≠ 0.
    pub fn principal(mu: &FieldElem) -> Self {
        assert!(!mu.is_zero());
        let disc = mu.disc;
        let den = integral_denominator(mu);
        let m = mu.scale(&BigRational::from_integer(den.clone()));
        let (u, v) = m.omega_coords().unwrap();
        let w = omega_times(&u, &v, disc);
        let (a, b, c) = hnf2(&[(u, v), w]);
        FracIdeal::from_hnf(a, b, c, BigRational::new(BigInt::one(), den), disc)
    }

    /// The ideal (r) for a nonzero rational r.
    pub fn from_rational(r: &BigRational, disc: i64) -> Self {
        assert!(!r.is_zero());
        let mut i = FracIdeal::unit(disc);
        i.scale = r.abs();
        i
    }

    /// Z-basis {s·a, s·(b+√Δ)/2}.
    pub fn basis(&self) -> [FieldElem; 2] {
        let s = &self.scale;
        let e1 = FieldElem::from_rational(s * BigRational::from_integer(self.a.clone()), self.disc);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let e2 = FieldElem::new(
            s * BigRational::from_integer(self.b.clone()) * &half,
            s * &half,
            self.disc,
        );
        [e1, e2]
    }

    /// Basis of the primitive part [a, (b+√Δ)/2] in ω-coordinates.
    fn primitive_omega_basis(&self) -> [(BigInt, BigInt); 2] {
        let d = BigInt::from(self.disc);
        [
            (self.a.clone(), BigInt::zero()),
            ((&self.b - &d) / 2, BigInt::one()),
        ]
    }

    pub fn norm(&self) -> BigRational {
        &self.scale * &self.scale * BigRational::from_integer(self.a.clone())
    }

    pub fn is_integral(&self) -> bool {
        self.scale.is_integer()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.a.is_one() && self.scale.is_one()
    }

    pub fn is_primitive(&self) -> bool {
        self.scale.is_one()
    }

    pub fn conj(&self) -> Self {
        FracIdeal {
            scale: self.scale.clone(),
            a: self.a.clone(),
            b: normalize_b(&-self.b.clone(), &self.a),
            disc: self.disc,
        }
    }

    pub fn inv(&self) -> Self {
        let mut c = self.conj();
        c.scale = BigRational::one() / (&self.scale * BigRational::from_integer(self.a.clone()));
        c
    }

    pub fn mul(&self, other: &FracIdeal) -> Self {
        assert_eq!(self.disc, other.disc);
        let disc = self.disc;
        let p = self.primitive_omega_basis();
        let q = other.primitive_omega_basis();
        let mut vs = Vec::with_capacity(4);
        for x in &p {
            for y in &q {
                vs.push(omega_mul(x, y, disc));
            }
        }
        let (a, b, c) = hnf2(&vs);
        FracIdeal::from_hnf(a, b, c, &self.scale * &other.scale, disc)
    }

    pub fn div(&self, other: &FracIdeal) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut acc = FracIdeal::unit(self.disc);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn mul_elem(&self, mu: &FieldElem) -> Self {
        self.mul(&FracIdeal::principal(mu))
    }

    pub fn contains(&self, e: &FieldElem) -> bool {
        let r = e.scale(&(BigRational::one() / &self.scale));
        // r = p·a + q·(b+√Δ)/2.
        let q = &r.y * BigRational::from_integer(BigInt::from(2));
        if !q.is_integer() {
            return false;
        }
        let p = (&r.x - &q * BigRational::new(self.b.clone(), BigInt::from(2)))
            / BigRational::from_integer(self.a.clone());
        p.is_integer()
    }

    /// I ⊆ J, i.e. J divides I.
    pub fn is_contained_in(&self, j: &FracIdeal) -> bool {
        self.basis().iter().all(|e| j.contains(e))
    }

    /// Integral HNF [A, B, C] for `scale`·(Z·A + Z·(B + Cω)) with scale = 1 when integral.
    pub fn hnf(&self) -> (BigRational, [BigInt; 3]) {
        let d = BigInt::from(self.disc);
        let half: BigInt = (&self.b - &d) / 2;
        let b = half.mod_floor(&self.a);
        if self.scale.is_integer() {
            let s = self.scale.to_integer();
            (BigRational::one(), [&self.a * &s, b * &s, s])
        } else {
            (self.scale.clone(), [self.a.clone(), b, BigInt::one()])
        }
    }

    fn key(&self) -> (BigRational, BigInt, BigInt, BigRational) {
        (
            self.norm(),
            self.a.clone(),
            self.b.clone(),
            self.scale.clone(),
        )
    }
}

impl PartialOrd for FracIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FracIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// (u1 + v1ω)(u2 + v2ω) in ω-coordinates.
pub(crate) fn omega_mul(x: &(BigInt, BigInt), y: &(BigInt, BigInt), disc: i64) -> (BigInt, BigInt) {
    let d = BigInt::from(disc);
    let n = (&d * &d - &d) / 4;
    let vv = &x.1 * &y.1;
    let u = &x.0 * &y.0 - &vv * &n;
    let v = &x.0 * &y.1 + &x.1 * &y.0 + &vv * &d;
    (u, v)
}

fn omega_times(u: &BigInt, v: &BigInt, disc: i64) -> (BigInt, BigInt) {
    omega_mul(
        &(u.clone(), v.clone()),
        &(BigInt::zero(), BigInt::one()),
        disc,
    )
}

impl fmt::Debug for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, [a, b, c]) = self.hnf();
        if s.is_one() {
            write!(f, "[{a}, {b} + {c}w]")
        } else {
            write!(f, "({s})[{a}, {b} + {c}w]")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime5() -> FracIdeal {
        // ω ≡ 0 mod this prime above 5 in Q(√161).
        FracIdeal::primitive(BigInt::from(5), BigInt::from(161 % 10), 161)
    }

    #[test]
    fn product_with_conjugate_is_norm() {
        let p = prime5();
        let n = p.mul(&p.conj());
        assert_eq!(
            n,
            FracIdeal::from_rational(&BigRational::from_integer(5.into()), 161)
        );
    }

    #[test]
    fn principal_ideal_of_known_generator() {
        let pi = FieldElem::from_ints(38, 3, 161);
        let i = FracIdeal::principal(&pi);
        assert_eq!(i.norm(), BigRational::from_integer(5.into()));
        assert!(i.contains(&pi));
        assert!(!i.contains(&FieldElem::from_int(1, 161)));
    }

    #[test]
    fn inverse_and_division() {
        let p = prime5();
        let q = p.mul(&p).mul(&p.conj());
        assert_eq!(q.div(&p).div(&p), p.conj());
        assert!(p.mul(&p.inv()).is_unit_ideal());
    }

    #[test]
    fn hnf_of_unit_ideal() {
        let (s, h) = FracIdeal::unit(28).hnf();
        assert!(s.is_one());
        assert_eq!(h, [BigInt::one(), BigInt::zero(), BigInt::one()]);
    }

    #[test]
    fn containment_matches_divisibility() {
        let p = prime5();
        let p2 = p.mul(&p);
        assert!(p2.is_contained_in(&p));
        assert!(!p.is_contained_in(&p2));
        assert!(!p2.is_contained_in(&p.conj()));
    }
}
