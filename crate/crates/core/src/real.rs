//! Double-double floating point: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 31 significant decimal digits.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Largest number of decimal digits the type carries reliably.
pub const MAX_DIGITS: u32 = 31;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    pub const LN2: DD = DD {
        hi: std::f64::consts::LN_2,
        lo: 2.319046813846299558e-17,
    };
    pub const PI: DD = DD {
        hi: std::f64::consts::PI,
        lo: 1.224646799147353207e-16,
    };

    pub const fn new(hi: f64, lo: f64) -> Self {
        DD { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        DD { hi: x, lo: 0.0 }
    }

    /// Exact for every `i64`.
    pub fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n as i128 - hi as i128) as f64;
        let (s, e) = quick_two_sum(hi, lo);
        DD { hi: s, lo: e }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        DD::from_i64(num) / DD::from_i64(den)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (s, e) = quick_two_sum(p1, p2);
        DD { hi: s, lo: e }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, mut p2) = two_prod(self.hi, b);
        p2 += self.lo * b;
        let (s, e) = quick_two_sum(p1, p2);
        DD { hi: s, lo: e }
    }

    pub fn ldexp(self, e: i32) -> Self {
        let f = 2f64.powi(e);
        DD {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                DD::ZERO
            } else {
                DD::new(f64::NAN, f64::NAN)
            };
        }
        let y = DD::from_f64(self.hi.sqrt());
        y + (self - y.sqr()) / y.mul_f64(2.0)
    }

    pub fn powi(self, mut e: u32) -> Self {
        let mut base = self;
        let mut acc = DD::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        acc
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return DD::new(f64::INFINITY, 0.0);
        }
        if self.hi < -745.0 {
            return DD::ZERO;
        }
        let k = (self.hi / DD::LN2.hi).round();
        let r = (self - DD::LN2.mul_f64(k)).ldexp(-10);
        // Taylor series of exp(r) - 1 for |r| < 2^-10.
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        loop {
            term = term * r / DD::from_f64(i);
            sum += term;
            if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                break;
            }
            i += 1.0;
        }
        // (1 + s)^2 - 1 = 2s + s^2, repeated to undo the reduction.
        for _ in 0..10 {
            sum = sum.mul_f64(2.0) + sum.sqr();
        }
        (sum + DD::ONE).ldexp(k as i32)
    }

    /// Natural logarithm via one Newton step on `exp`.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return DD::new(f64::NAN, f64::NAN);
        }
        let x = DD::from_f64(self.hi.ln());
        x + self * (-x).exp() - DD::ONE
    }

    /// `ln(1 + self)` without cancellation for small arguments.
    pub fn ln1p(self) -> Self {
        if self.hi.abs() > 0.25 {
            return (DD::ONE + self).ln();
        }
        // ln(1+x) = 2 atanh(x / (2 + x))
        let u = self / (DD::from_f64(2.0) + self);
        let u2 = u.sqr();
        let mut term = u;
        let mut sum = u;
        let mut j = 3.0;
        loop {
            term = term * u2;
            let t = term / DD::from_f64(j);
            sum += t;
            if t.hi.abs() < 1e-36 * sum.hi.abs() || t.hi == 0.0 {
                break;
            }
            j += 2.0;
        }
        sum.mul_f64(2.0)
    }

    pub fn round(self) -> Self {
        let hi = self.hi.round();
        if hi == self.hi {
            let lo = self.lo.round();
            let (s, e) = quick_two_sum(hi, lo);
            return DD { hi: s, lo: e };
        }
        if (hi - self.hi).abs() == 0.5 && self.lo != 0.0 {
            let adj = if self.lo > 0.0 {
                self.hi.ceil()
            } else {
                self.hi.floor()
            };
            return DD::from_f64(adj);
        }
        DD::from_f64(hi)
    }

    pub fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            let (s, e) = quick_two_sum(hi, self.lo.floor());
            DD { hi: s, lo: e }
        } else {
            DD::from_f64(hi)
        }
    }

    /// Decimal rendering with `digits` significant digits in scientific form.
    pub fn to_sci(self, digits: usize) -> String {
        if !self.is_finite() {
            return format!("{}", self.to_f64());
        }
        if self.hi == 0.0 {
            return "0".to_string();
        }
        let digits = digits.clamp(1, MAX_DIGITS as usize + 2);
        let neg = self.hi < 0.0;
        let mut x = self.abs();
        let mut e = x.hi.log10().floor() as i32;
        x = scale10(x, -e);
        if x.hi >= 10.0 {
            x = x / DD::from_f64(10.0);
            e += 1;
        } else if x.hi < 1.0 {
            x = x.mul_f64(10.0);
            e -= 1;
        }
        let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
        for _ in 0..=digits {
            let d = x.hi.floor().clamp(0.0, 9.0);
            ds.push(d as u8);
            x = (x - DD::from_f64(d)).mul_f64(10.0);
        }
        // round half up on the guard digit
        if ds[digits] >= 5 {
            let mut i = digits;
            loop {
                if i == 0 {
                    ds.insert(0, 1);
                    e += 1;
                    break;
                }
                i -= 1;
                if ds[i] == 9 {
                    ds[i] = 0;
                } else {
                    ds[i] += 1;
                    break;
                }
            }
        }
        ds.truncate(digits);
        let mut s = String::new();
        if neg {
            s.push('-');
        }
        s.push((b'0' + ds[0]) as char);
        if digits > 1 {
            s.push('.');
            for d in &ds[1..] {
                s.push((b'0' + d) as char);
            }
        }
        s.push_str(&format!("e{}", e));
        s
    }
}

fn scale10(x: DD, e: i32) -> DD {
    let ten = DD::from_f64(10.0);
    if e >= 0 {
        x * ten.powi(e as u32)
    } else {
        x / ten.powi((-e) as u32)
    }
}

impl From<f64> for DD {
    fn from(x: f64) -> Self {
        DD::from_f64(x)
    }
}

impl From<i64> for DD {
    fn from(n: i64) -> Self {
        DD::from_i64(n)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s1, mut s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        s2 += t1;
        let (s1, mut s2) = quick_two_sum(s1, s2);
        s2 += t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DD { hi, lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        DD { hi, lo }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DD { hi: q1, lo: q2 } + DD::from_f64(q3)
    }
}

impl AddAssign for DD {
    fn add_assign(&mut self, b: DD) {
        *self = *self + b;
    }
}

impl SubAssign for DD {
    fn sub_assign(&mut self, b: DD) {
        *self = *self - b;
    }
}

impl MulAssign for DD {
    fn mul_assign(&mut self, b: DD) {
        *self = *self * b;
    }
}

impl Sum for DD {
    fn sum<I: Iterator<Item = DD>>(iter: I) -> DD {
        iter.fold(DD::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for DD {
    fn partial_cmp(&self, o: &DD) -> Option<Ordering> {
        match self.hi.partial_cmp(&o.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&o.lo),
            c => Some(c),
        }
    }
}

impl fmt::Display for DD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(MAX_DIGITS as usize);
        write!(f, "{}", self.to_sci(digits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: DD, b: DD, rel: f64) -> bool {
        (a - b).abs().to_f64() <= rel * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn known_constants() {
        let two = DD::from_f64(2.0);
        assert_eq!(two.sqrt().to_sci(31), "1.414213562373095048801688724210e0");
        assert_eq!(
            DD::ONE.exp().to_sci(31),
            "2.718281828459045235360287471353e0"
        );
        assert_eq!(
            DD::from_f64(10.0).ln().to_sci(31),
            "2.302585092994045684017991454684e0"
        );
        assert!(close(two.ln(), DD::LN2, 1e-31));
        assert_eq!(DD::PI.to_sci(20), "3.1415926535897932385e0");
    }

    #[test]
    fn exact_integers_and_rounding() {
        let n = i64::MAX - 12345;
        let d = DD::from_i64(n);
        assert_eq!(d.hi as i128 + d.lo as i128, n as i128);
        assert_eq!(DD::from_f64(2.5).round().to_f64(), 3.0);
        assert_eq!(
            (DD::from_f64(2.5) - DD::new(1e-20, 0.0)).round().to_f64(),
            2.0
        );
        assert_eq!(DD::from_f64(-1.5).floor().to_f64(), -2.0);
        assert_eq!(DD::from_ratio(-1, 3).to_sci(5), "-3.3333e-1");
        assert_eq!(DD::from_f64(9.99999).to_sci(3), "1.00e1");
    }

    #[test]
    fn ln1p_small() {
        let x = DD::from_f64(1e-12);
        let y = x.ln1p();
        // ln(1+x) = x - x^2/2 + x^3/3
        let expect = x - x.sqr().mul_f64(0.5) + x.powi(3) / DD::from_f64(3.0);
        assert!(close(y, expect, 1e-30));
    }

    proptest! {
        #[test]
        fn exp_ln_roundtrip(x in 1e-3f64..1e3) {
            let d = DD::from_f64(x) / DD::from_f64(3.0);
            prop_assert!(close(d.ln().exp(), d, 1e-29));
        }

        #[test]
        fn div_mul_roundtrip(a in -1e6f64..1e6, b in 1e-3f64..1e3) {
            let q = DD::from_f64(a) / DD::from_f64(b);
            prop_assert!((q * DD::from_f64(b) - DD::from_f64(a)).abs().to_f64() <= 1e-30 * a.abs().max(1.0));
        }

        #[test]
        fn sqrt_squares(x in 1e-6f64..1e6) {
            let d = DD::from_f64(x) / DD::from_f64(7.0);
            prop_assert!(close(d.sqrt().sqr(), d, 1e-30));
        }
    }
}
