use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element x + y√Δ of Q(√Δ), stored exactly.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    pub x: BigRational,
    pub y: BigRational,
    pub disc: i64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldElem {
    pub fn new(x: BigRational, y: BigRational, disc: i64) -> Self {
        FieldElem { x, y, disc }
    }

    pub fn from_ints(x: i64, y: i64, disc: i64) -> Self {
        FieldElem::new(rat(x), rat(y), disc)
    }

    pub fn from_rational(x: BigRational, disc: i64) -> Self {
        FieldElem::new(x, BigRational::zero(), disc)
    }

    pub fn from_int(x: i64, disc: i64) -> Self {
        FieldElem::from_ints(x, 0, disc)
    }

    pub fn one(disc: i64) -> Self {
        FieldElem::from_int(1, disc)
    }

    pub fn sqrt_disc(disc: i64) -> Self {
        FieldElem::from_ints(0, 1, disc)
    }

    /// ω = (Δ + √Δ)/2.
    pub fn omega(disc: i64) -> Self {
        FieldElem::new(
            BigRational::new(BigInt::from(disc), BigInt::from(2)),
            BigRational::new(BigInt::one(), BigInt::from(2)),
            disc,
        )
    }

    /// u + vω for integers u, v.
    pub fn from_omega_coords(u: &BigInt, v: &BigInt, disc: i64) -> Self {
        let two = BigInt::from(2);
        let x = BigRational::from_integer(u.clone())
            + BigRational::new(v * BigInt::from(disc), two.clone());
        let y = BigRational::new(v.clone(), two);
        FieldElem::new(x, y, disc)
    }

    /// Coordinates (u, v) with self = u + vω, as rationals.
    pub fn omega_coords_rat(&self) -> (BigRational, BigRational) {
        let v = &self.y * rat(2);
        let u = &self.x - &self.y * rat(self.disc);
        (u, v)
    }

    /// Integer coordinates in the basis (1, ω), if the element is integral.
    pub fn omega_coords(&self) -> Option<(BigInt, BigInt)> {
        let (u, v) = self.omega_coords_rat();
        if u.is_integer() && v.is_integer() {
            Some((u.to_integer(), v.to_integer()))
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.omega_coords().is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    pub fn conj(&self) -> Self {
        FieldElem::new(self.x.clone(), -self.y.clone(), self.disc)
    }

    pub fn norm(&self) -> BigRational {
        &self.x * &self.x - &self.y * &self.y * rat(self.disc)
    }

    pub fn trace(&self) -> BigRational {
        &self.x * rat(2)
    }

    /// Exact sign of x + y√Δ under the embedding √Δ > 0.
    pub fn sign(&self) -> Ordering {
        sign_of(&self.x, &self.y, self.disc)
    }

    pub fn sign_conj(&self) -> Ordering {
        sign_of(&self.x, &-self.y.clone(), self.disc)
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign() == Ordering::Greater && self.sign_conj() == Ordering::Greater
    }

    pub fn inv(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "inverse of zero");
        FieldElem::new(&self.x / &n, -(&self.y / &n), self.disc)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = FieldElem::one(self.disc);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        FieldElem::new(&self.x * r, &self.y * r, self.disc)
    }

    pub fn div(&self, other: &FieldElem) -> Self {
        self * &other.inv()
    }

    /// True iff |self/self'| ≥ 1, decided exactly (requires a nonzero conjugate).
    pub fn ratio_at_least_one(&self) -> bool {
        !(self.x.is_positive() && self.y.is_negative()
            || self.x.is_negative() && self.y.is_positive())
    }

    pub fn to_f64(&self) -> f64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        x + y * (self.disc as f64).sqrt()
    }

    /// ln|self/self'| computed in floating point (stable for large coordinates).
    pub fn log_abs_ratio(&self) -> f64 {
        log_abs(&self.x, &self.y, self.disc) - log_abs(&self.x, &-self.y.clone(), self.disc)
    }
}

/// ln|x + y√Δ| without overflow, using the norm when cancellation threatens.
pub(crate) fn log_abs(x: &BigRational, y: &BigRational, disc: i64) -> f64 {
    let sx = x.signum();
    let sy = y.signum();
    let ln_x = ln_abs_rat(x);
    let ln_y = ln_abs_rat(y) + 0.5 * (disc as f64).ln();
    if y.is_zero() {
        return ln_x;
    }
    if x.is_zero() {
        return ln_y;
    }
    let big = ln_x.max(ln_y);
    let small = ln_x.min(ln_y);
    if sx == sy {
        big + (1.0 + (small - big).exp()).ln()
    } else {
        // |x| and |y√Δ| nearly cancel: use |a| = |Nm| / |conj|.
        let n = x * x - y * y * rat(disc);
        let ln_conj = big + (1.0 + (small - big).exp()).ln();
        ln_abs_rat(&n) - ln_conj
    }
}

pub(crate) fn ln_abs_rat(r: &BigRational) -> f64 {
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

pub(crate) fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 900;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

fn sign_of(x: &BigRational, y: &BigRational, disc: i64) -> Ordering {
    let sx = x.cmp(&BigRational::zero());
    let sy = y.cmp(&BigRational::zero());
    if sy == Ordering::Equal {
        return sx;
    }
    if sx == Ordering::Equal || sx == sy {
        return sy;
    }
    let lhs = x * x;
    let rhs = y * y * rat(disc);
    // Opposite signs: the larger magnitude wins.
    match lhs.cmp(&rhs) {
        Ordering::Greater => sx,
        Ordering::Less => sy,
        Ordering::Equal => Ordering::Equal,
    }
}

impl<'a> Add for &'a FieldElem {
    type Output = FieldElem;
    fn add(self, o: &FieldElem) -> FieldElem {
        debug_assert_eq!(self.disc, o.disc);
        FieldElem::new(&self.x + &o.x, &self.y + &o.y, self.disc)
    }
}

impl<'a> Sub for &'a FieldElem {
    type Output = FieldElem;
    fn sub(self, o: &FieldElem) -> FieldElem {
        debug_assert_eq!(self.disc, o.disc);
        FieldElem::new(&self.x - &o.x, &self.y - &o.y, self.disc)
    }
}

impl<'a> Mul for &'a FieldElem {
    type Output = FieldElem;
    fn mul(self, o: &FieldElem) -> FieldElem {
        debug_assert_eq!(self.disc, o.disc);
        let x = &self.x * &o.x + &self.y * &o.y * rat(self.disc);
        let y = &self.x * &o.y + &self.y * &o.x;
        FieldElem::new(x, y, self.disc)
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, o: FieldElem) -> FieldElem {
        &self * &o
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, o: FieldElem) -> FieldElem {
        &self + &o
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, o: FieldElem) -> FieldElem {
        &self - &o
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(-self.x, -self.y, self.disc)
    }
}

impl<'a> Neg for &'a FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem::new(-self.x.clone(), -self.y.clone(), self.disc)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let y_abs = self.y.abs();
        let sign = if self.y.is_negative() { "-" } else { "+" };
        let ys = if y_abs.is_one() {
            String::new()
        } else {
            format!("{}*", y_abs)
        };
        if self.x.is_zero() {
            let lead = if self.y.is_negative() { "-" } else { "" };
            write!(f, "{lead}{ys}sqrt({})", self.disc)
        } else {
            write!(f, "{} {sign} {ys}sqrt({})", self.x, self.disc)
        }
    }
}

/// lcm of the denominators of the ω-coordinates, so that `d·e` is integral.
pub(crate) fn integral_denominator(e: &FieldElem) -> BigInt {
    let (u, v) = e.omega_coords_rat();
    u.denom().lcm(v.denom())
}
