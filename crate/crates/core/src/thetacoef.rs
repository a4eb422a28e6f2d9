//! Fourier coefficients of Hecke's weight one theta series and their genus
//! character combinations, by lattice enumeration and by ideal counting.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{invalid, Error, Result};
use crate::finquad::{FQMElem, Genus, GenusChar, SqrtTable};
use crate::qfield::{ideals_of_norm, FieldElem, FracIdeal, QuadField};

/// Largest number of lattice rows scanned before giving up.
pub const MAX_ROWS: i64 = 1_000_000_000;

/// Σ sgn(λ) over λ ∈ (λ0 + 𝔠) with Nm(λ) = target, modulo ⟨(ε_F^+)²⟩.
///
/// The domain 1 ≤ |λ/λ′| < (ε_F^+)⁴ splits into [1, (ε_F^+)²) and its
/// ε_F^+ translate, so both λ0 and (ε_F^+)⁻¹λ0 are scanned over the smaller box.
fn coset_count(
    field: &QuadField,
    c: &FracIdeal,
    offset: &FieldElem,
    target: &BigRational,
    widen: i64,
) -> Result<i64> {
    let back = offset * &field.eps_plus.inv();
    Ok(box_count(field, c, offset, target, widen)? + box_count(field, c, &back, target, widen)?)
}

fn i128_of(x: &BigInt) -> Result<i128> {
    x.to_i128()
        .ok_or_else(|| Error::Unsupported("lattice coordinates exceed 128 bits".into()))
}

fn isqrt_i128(n: i128) -> i128 {
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Scan over 1 ≤ |λ/λ′| < (ε_F^+)², λ ∈ λ0 + 𝔠, Nm(λ) = target.
fn box_count(
    field: &QuadField,
    c: &FracIdeal,
    offset: &FieldElem,
    target: &BigRational,
    widen: i64,
) -> Result<i64> {
    if target.is_zero() {
        return invalid("target norm must be nonzero");
    }
    let delta = field.delta();
    let s = &c.scale;
    let t_big = [
        s.denom(),
        offset.x.denom(),
        offset.y.denom(),
        target.denom(),
    ]
    .iter()
    .fold(BigInt::one(), |acc, d| acc.lcm(d));
    let tr = BigRational::from_integer(t_big.clone());
    let two_t = &tr * BigRational::from_integer(2.into());
    let ts = i128_of(&(s * &tr).to_integer())?;
    let u0 = i128_of(&(&offset.x * &two_t).to_integer())?;
    let v0 = i128_of(&(&offset.y * &two_t).to_integer())?;
    let m = i128_of(&(target * &two_t * &two_t).to_integer())?;
    let a = i128_of(&c.a)?;
    let b = i128_of(&c.b)?;
    let d = i128::from(delta);
    let e1 = i128_of(&(&field.eps_plus.x * BigRational::from_integer(2.into())).to_integer())?;
    let e2 = i128_of(&(&field.eps_plus.y * BigRational::from_integer(2.into())).to_integer())?;

    // |λ| < ε√|N|, |λ′| ≤ √|N|, λ − λ′ = 2v√Δ, V = 2Tv = v0 + ts·y.
    let eps = field.eps_plus.to_f64();
    let vmax = (target.abs().to_f64().unwrap().sqrt() * (eps + 1.0)
        / (2.0 * (delta as f64).sqrt()))
        * widen as f64;
    let big_v = 2.0 * t_big.to_f64().unwrap() * vmax;
    let lo = ((-big_v - v0 as f64) / ts as f64).floor() as i128 - 1;
    let hi = ((big_v - v0 as f64) / ts as f64).ceil() as i128 + 1;
    if hi - lo > i128::from(MAX_ROWS) {
        return Err(Error::Unsupported(format!(
            "lattice box has {} rows",
            hi - lo
        )));
    }
    let ovf = || Error::Unsupported("lattice arithmetic overflow".into());
    let mut total = 0i64;
    for y in lo..=hi {
        let v = v0 + ts * y;
        let r = v
            .checked_mul(v)
            .and_then(|x| x.checked_mul(d))
            .and_then(|x| x.checked_add(m))
            .ok_or_else(ovf)?;
        if r < 0 {
            continue;
        }
        let root = isqrt_i128(r);
        if root * root != r {
            continue;
        }
        let roots: &[i128] = if root == 0 { &[0] } else { &[root, -root] };
        for &u in roots {
            let num = u - u0 - ts * y * b;
            if num % (2 * ts * a) != 0 {
                continue;
            }
            // 1 ≤ |λ/λ′|
            if (u.signum() * v.signum()) < 0 {
                continue;
            }
            // |λ/λ′| < ε²  ⟺  |ν| < |ν′| for ν = λε′
            let un = u
                .checked_mul(e1)
                .zip(v.checked_mul(e2).and_then(|x| x.checked_mul(d)));
            let vn = v.checked_mul(e1).zip(u.checked_mul(e2));
            let (un, vn) = match (un, vn) {
                (Some((p, q)), Some((r2, s2))) => (p - q, r2 - s2),
                _ => return Err(ovf()),
            };
            if un.signum() * vn.signum() >= 0 {
                continue;
            }
            let sgn = if target.is_positive() {
                u.signum()
            } else {
                v.signum()
            };
            total += sgn as i64;
        }
    }
    Ok(total)
}

/// c_𝔞(m, h): Σ sgn(λ) over ⟨ε_Δ⟩\(𝔞 + h) with Nm(λ) = Nm(𝔞)·m.
pub fn c_lattice(field: &QuadField, a: &FracIdeal, m: &BigRational, h: &FieldElem) -> Result<i64> {
    c_lattice_widened(field, a, m, h, 1)
}

/// c_lattice with the enumeration box scaled by `widen`; the result is independent of it.
pub fn c_lattice_widened(
    field: &QuadField,
    a: &FracIdeal,
    m: &BigRational,
    h: &FieldElem,
    widen: i64,
) -> Result<i64> {
    if !m.is_positive() {
        return invalid("coefficient index must be positive");
    }
    if !a.contains(&(h * &FieldElem::sqrt_disc(field.delta()))) {
        return invalid("coset representative is not in 𝔞𝔡⁻¹");
    }
    coset_count(field, a, h, &(a.norm() * m), widen)
}

/// The coefficient of ϑ⁻_𝔞: signed count with Nm(λ) = −Nm(𝔞)·m.
pub fn c_minus_lattice(
    field: &QuadField,
    a: &FracIdeal,
    m: &BigRational,
    h: &FieldElem,
) -> Result<i64> {
    c_minus_lattice_widened(field, a, m, h, 1)
}

pub fn c_minus_lattice_widened(
    field: &QuadField,
    a: &FracIdeal,
    m: &BigRational,
    h: &FieldElem,
    widen: i64,
) -> Result<i64> {
    if !m.is_positive() {
        return invalid("coefficient index must be positive");
    }
    if !a.contains(&(h * &FieldElem::sqrt_disc(field.delta()))) {
        return invalid("coset representative is not in 𝔞𝔡⁻¹");
    }
    coset_count(field, a, h, &-(a.norm() * m), widen)
}

/// A representative of h in 𝔟/𝔟′·𝔡⁻¹ under A_Δ = A_{𝔟/𝔟′}.
fn lift_to(field: &QuadField, h: &FQMElem, b: &FracIdeal) -> FieldElem {
    let delta = field.delta();
    let c = b.div(&b.conj());
    // t ≡ 1 mod Δ, t ≡ 0 mod Nm(𝔟0)² puts t·h inside 𝔟0²𝔡⁻¹ ⊂ 𝔠𝔡⁻¹.
    let a0 = b.a.to_i64().expect("representative norm too large");
    let q = a0 * a0;
    let t = crt_one_zero(delta, q);
    let mu = h.numerator() * FieldElem::from_int(t, delta);
    debug_assert!(c.contains(&mu));
    mu.div(&FieldElem::sqrt_disc(delta))
}

fn crt_one_zero(m: i64, q: i64) -> i64 {
    // t = q·(q⁻¹ mod m)
    let e = (q.rem_euclid(m)).extended_gcd(&m);
    assert_eq!(e.gcd, 1);
    q * e.x.rem_euclid(m)
}

/// c_χ(n/Δ, h) by lattice enumeration over the representatives `reps`.
pub fn c_chi_lattice(
    genus: &Genus,
    chi: &GenusChar,
    n: i64,
    h: &FQMElem,
    reps: &[FracIdeal],
) -> Result<i64> {
    let field = genus.field();
    let delta = field.delta();
    if n <= 0 {
        return invalid("coefficient index must be positive");
    }
    check_reps(genus, reps)?;
    if (h.q_numerator() + n).rem_euclid(delta) != 0 {
        return Ok(0);
    }
    let target = BigRational::new((-n).into(), delta.into());
    let mut total = 0;
    for b in reps {
        let c = b.div(&b.conj());
        let lam = lift_to(field, h, b);
        total += i64::from(genus.chi_on_class(chi, b)) * coset_count(field, &c, &lam, &target, 1)?;
    }
    Ok(total)
}

fn check_reps(genus: &Genus, reps: &[FracIdeal]) -> Result<()> {
    let delta = genus.delta();
    let order = genus.group.order();
    if reps.len() != order {
        return invalid(format!(
            "expected {order} class representatives, got {}",
            reps.len()
        ));
    }
    let mut seen = vec![false; order];
    for b in reps {
        let a0 = b.a.to_i64().unwrap_or(0);
        if a0 == 0 || gcd(a0, delta) != 1 {
            return invalid(format!("representative {b} is not prime to 𝔡"));
        }
        let k = genus.group.class_of(b);
        if seen[k] {
            return invalid("representatives repeat a narrow class");
        }
        seen[k] = true;
    }
    Ok(())
}

/// c_χ(n/Δ, h) = 2 s_h Σ_{Nm𝔞 = n} χ(sqrt(𝔞, h)) for odd χ, and 0 for even χ.
pub fn c_chi_ideal(genus: &Genus, chi: &GenusChar, n: i64, h: &FQMElem) -> i64 {
    ThetaCoeffs::new(genus).c_chi(chi, n, h)
}

/// Ideal-route coefficients with the sqrt tables of each norm cached.
pub struct ThetaCoeffs<'g> {
    pub genus: &'g Genus,
    tables: RwLock<HashMap<i64, Arc<Vec<SqrtTable>>>>,
}

impl<'g> ThetaCoeffs<'g> {
    pub fn new(genus: &'g Genus) -> Self {
        ThetaCoeffs {
            genus,
            tables: RwLock::new(HashMap::new()),
        }
    }

    fn tables(&self, n: i64) -> Arc<Vec<SqrtTable>> {
        if let Some(t) = self.tables.read().unwrap().get(&n) {
            return t.clone();
        }
        let g = self.genus;
        let t: Arc<Vec<SqrtTable>> = Arc::new(
            ideals_of_norm(g.field(), n)
                .iter()
                .map(|a| g.sqrt_table(a))
                .collect(),
        );
        self.tables.write().unwrap().insert(n, t.clone());
        t
    }

    pub fn c_chi(&self, chi: &GenusChar, n: i64, h: &FQMElem) -> i64 {
        if !chi.is_odd() || n <= 0 {
            return 0;
        }
        let s = i64::from(self.genus.s_h(h));
        if s == 0 {
            return 0;
        }
        let sum: i64 = self
            .tables(n)
            .iter()
            .map(|t| self.genus.chi_sum(chi, &t.support(h)))
            .sum();
        2 * s * sum
    }

    /// C_χ(μ0) = Σ_{t | μ0} c_χ(Nm(μ0/t)/Δ, (μ0/t)/√Δ).
    pub fn big_c(&self, chi: &GenusChar, mu0: &FieldElem) -> Result<i64> {
        let (u, v) = mu0
            .omega_coords()
            .ok_or_else(|| Error::InvalidInput("μ0 must be integral".into()))?;
        if mu0.is_zero() {
            return invalid("μ0 must be nonzero");
        }
        let content = u
            .gcd(&v)
            .to_i64()
            .ok_or_else(|| Error::Unsupported("content too large".into()))?;
        let mut total = 0;
        for t in (1..=content).filter(|t| content % t == 0) {
            let nu = mu0.scale(&BigRational::new(1.into(), t.into()));
            let n = nu
                .norm()
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Unsupported("norm too large".into()))?;
            if n <= 0 {
                continue;
            }
            let h = FQMElem::from_numerator(&nu).expect("integral");
            total += self.c_chi(chi, n, &h);
        }
        Ok(total)
    }

    /// All coefficients with n ≤ nmax, in (n, h) order.
    pub fn table(&self, chi: &GenusChar, nmax: i64) -> CoeffTable {
        let delta = self.genus.delta();
        let all = FQMElem::all(delta);
        let entries: Vec<Vec<CoeffEntry>> = (1..=nmax)
            .into_par_iter()
            .map(|n| {
                all.iter()
                    .filter(|h| (h.q_numerator() + n).rem_euclid(delta) == 0)
                    .map(|h| CoeffEntry {
                        n,
                        h: [h.a, h.b],
                        c: self.c_chi(chi, n, h),
                    })
                    .filter(|e| e.c != 0)
                    .collect()
            })
            .collect();
        CoeffTable {
            delta,
            chi: [chi.delta1, chi.delta2],
            entries: entries.into_iter().flatten().collect(),
        }
    }
}

/// Nonzero coefficients of ϑ_χ, exportable as JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffTable {
    #[serde(rename = "Delta")]
    pub delta: i64,
    pub chi: [i64; 2],
    pub entries: Vec<CoeffEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub n: i64,
    pub h: [i64; 2],
    pub c: i64,
}

/// Σ_{0 ≤ s ≤ a} Σ_{s−a ≤ r ≤ b−s} ε^r (a − b + 2r).
pub fn identity_sum(a: i64, b: i64, eps: i64) -> i64 {
    let mut total = 0;
    for s in 0..=a {
        for r in (s - a)..=(b - s) {
            let w = if eps == -1 && r.rem_euclid(2) == 1 {
                -1
            } else {
                1
            };
            total += w * (a - b + 2 * r);
        }
    }
    total
}

/// Closed form of [`identity_sum`] for 0 ≤ a ≤ b.
pub fn identity_closed(a: i64, b: i64, eps: i64) -> i64 {
    if eps == -1 && gcd(a + 1, b) % 2 == 0 {
        a + 1
    } else if eps == -1 && gcd(a, b + 1) % 2 == 0 {
        -(b + 1)
    } else {
        0
    }
}

#[cfg(test)]
mod tests;
