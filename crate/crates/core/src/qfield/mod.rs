//! Exact arithmetic in a real quadratic field F = Q(√Δ).

mod classgroup;
mod elem;
mod ideal;
mod reduce;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

pub use classgroup::NarrowClassGroup;
pub use elem::FieldElem;
pub use ideal::FracIdeal;
pub use reduce::fundamental_unit_cf;

use crate::arith::{self, is_fundamental, kronecker};
use crate::error::{invalid, Error, Result};
use reduce::Prim;

/// Discriminants beyond this are outside the supported range.
pub const MAX_DISC: i64 = 1_000_000;

/// A positive fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Discriminant {
    pub delta: i64,
    /// Squarefree part of Δ.
    pub delta0: i64,
    pub fundamental: bool,
}

impl Discriminant {
    pub fn new(delta: i64) -> Result<Self> {
        if delta <= 1 || !is_fundamental(delta) {
            return invalid(format!(
                "{delta} is not a positive fundamental discriminant"
            ));
        }
        if delta > MAX_DISC {
            return Err(Error::Unsupported(format!(
                "discriminant {delta} exceeds {MAX_DISC}"
            )));
        }
        let delta0 = if delta % 4 == 0 { delta / 4 } else { delta };
        Ok(Discriminant {
            delta,
            delta0,
            fundamental: true,
        })
    }

    pub fn ord2(&self) -> u32 {
        if self.delta % 2 == 0 {
            arith::valuation(self.delta, 2)
        } else {
            0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// Field data computed once per discriminant.
#[derive(Clone, Debug)]
pub struct QuadField {
    pub disc: Discriminant,
    /// ε_F > 1.
    pub eps: FieldElem,
    pub eps_norm: i32,
    /// Generator of the totally positive units.
    pub eps_plus: FieldElem,
    /// (ε_F^+)².
    pub eps_delta: FieldElem,
    /// Wide class number.
    pub class_number: usize,
    pub narrow_class_number: usize,
}

impl QuadField {
    pub fn new(delta: i64) -> Result<Self> {
        let disc = Discriminant::new(delta)?;
        let eps = fundamental_unit_cf(delta);
        let eps_norm = if eps.norm().is_positive() { 1 } else { -1 };
        let eps_plus = if eps_norm == 1 {
            eps.clone()
        } else {
            &eps * &eps
        };
        let eps_delta = &eps_plus * &eps_plus;
        let class_number = count_cycles(delta);
        let narrow_class_number = if eps_norm == 1 {
            2 * class_number
        } else {
            class_number
        };
        Ok(QuadField {
            disc,
            eps,
            eps_norm,
            eps_plus,
            eps_delta,
            class_number,
            narrow_class_number,
        })
    }

    pub fn delta(&self) -> i64 {
        self.disc.delta
    }

    pub fn unit_ideal(&self) -> FracIdeal {
        FracIdeal::unit(self.delta())
    }

    pub fn elem(&self, x: i64, y: i64) -> FieldElem {
        FieldElem::from_ints(x, y, self.delta())
    }

    /// The different 𝔡 = (√Δ).
    pub fn different(&self) -> FracIdeal {
        FracIdeal::principal(&FieldElem::sqrt_disc(self.delta()))
    }

    pub fn splitting(&self, p: i64) -> Splitting {
        splitting(p, self.delta())
    }

    /// Primes above p: one for inert or ramified p, two (𝔭, 𝔭′) for split p.
    pub fn primes_above(&self, p: i64) -> Vec<FracIdeal> {
        primes_above(p, self.delta())
    }

    /// The ramified prime 𝔡_p for p | Δ.
    pub fn ramified_prime(&self, p: i64) -> Result<FracIdeal> {
        if self.delta() % p != 0 || !arith::is_prime(p) {
            return invalid(format!("{p} is not a prime dividing {}", self.delta()));
        }
        Ok(primes_above(p, self.delta()).remove(0))
    }

    /// Some generator of I if it is principal.
    pub fn principal_generator(&self, i: &FracIdeal) -> Option<FieldElem> {
        let d = self.delta();
        let (r0, theta0) = reduce::reduce(
            &Prim {
                a: i.a.clone(),
                b: i.b.clone(),
            },
            d,
        );
        // R0 = θ0·P, so P = θ0⁻¹·R0.
        for (r, th) in reduce::cycle(&r0, d) {
            if r.a.is_one() {
                // r = O_F = Θ·R0 = Θθ0·P.
                let g = (&th * &theta0).inv();
                return Some(g.scale(&i.scale));
            }
        }
        None
    }

    pub fn is_principal(&self, i: &FracIdeal) -> bool {
        self.principal_generator(i).is_some()
    }

    /// A totally positive generator normalized to 1 ≤ μ/μ′ < (ε_F^+)², if one exists.
    pub fn is_principal_tp(&self, i: &FracIdeal) -> Option<FieldElem> {
        let mut mu = self.principal_generator(i)?;
        if mu.norm().is_negative() {
            if self.eps_norm == 1 {
                return None;
            }
            mu = &mu * &self.eps;
        }
        if !mu.is_positive() {
            mu = -mu;
        }
        debug_assert!(mu.is_totally_positive());
        Some(self.normalize_tp(&mu))
    }

    pub fn is_narrowly_principal(&self, i: &FracIdeal) -> bool {
        self.is_principal_tp(i).is_some()
    }

    /// I and J are in the same narrow class.
    pub fn narrowly_equivalent(&self, i: &FracIdeal, j: &FracIdeal) -> bool {
        self.is_narrowly_principal(&i.mul(&j.conj()))
    }

    /// Moves a totally positive μ into 1 ≤ μ/μ′ < (ε_F^+)² by totally positive units.
    pub fn normalize_tp(&self, mu: &FieldElem) -> FieldElem {
        let epc = self.eps_plus.conj();
        normalize_by(
            mu,
            &self.eps_plus,
            |m| !m.y.is_negative(),
            |m| (m * &epc).y.is_negative(),
        )
    }

    /// Moves μ into μ > 0, 1 ≤ |μ/μ′| < ε_F² using ±ε_F^j.
    pub fn normalize_generator(&self, mu: &FieldElem) -> FieldElem {
        let e_inv = self.eps.inv();
        let m = normalize_by(
            mu,
            &self.eps,
            |m| m.ratio_at_least_one(),
            |m| !(m * &e_inv).ratio_at_least_one(),
        );
        if m.is_positive() {
            m
        } else {
            -m
        }
    }

    /// ln ε_F.
    pub fn log_eps(&self) -> f64 {
        0.5 * self.eps.log_abs_ratio()
    }
}

/// Multiplies by powers of `up` until both tests pass.
fn normalize_by(
    mu: &FieldElem,
    up: &FieldElem,
    lower_ok: impl Fn(&FieldElem) -> bool,
    upper_ok: impl Fn(&FieldElem) -> bool,
) -> FieldElem {
    let step = up.log_abs_ratio();
    let cur = mu.log_abs_ratio();
    let mut m = mu.clone();
    if step > 0.0 && cur.is_finite() {
        let j = (cur / step).floor() as i64;
        if j.abs() > 1 {
            m = &m * &up.pow(-j);
        }
    }
    let mut guard = 0;
    loop {
        if !lower_ok(&m) {
            m = &m * up;
        } else if !upper_ok(&m) {
            m = &m * &up.inv();
        } else {
            return m;
        }
        guard += 1;
        assert!(guard < 10_000, "normalization did not converge");
    }
}

pub fn splitting(p: i64, delta: i64) -> Splitting {
    match kronecker(delta, p) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

pub fn primes_above(p: i64, delta: i64) -> Vec<FracIdeal> {
    assert!(arith::is_prime(p), "{p} is not prime");
    match splitting(p, delta) {
        Splitting::Inert => {
            vec![FracIdeal::from_rational(
                &BigRational::from_integer(BigInt::from(p)),
                delta,
            )]
        }
        kind => {
            let m = 4 * p;
            let mut roots: Vec<i64> = (0..2 * p)
                .filter(|&b| (b * b - delta).rem_euclid(m) == 0)
                .collect();
            roots.sort();
            let mut out: Vec<FracIdeal> = Vec::new();
            for b in roots {
                let i = FracIdeal::primitive(BigInt::from(p), BigInt::from(b), delta);
                if !out.contains(&i) {
                    out.push(i);
                }
            }
            out.sort_by_key(|i| i.hnf().1[1].clone());
            match kind {
                Splitting::Ramified => assert_eq!(out.len(), 1),
                _ => assert_eq!(out.len(), 2),
            }
            out
        }
    }
}

fn count_cycles(delta: i64) -> usize {
    let mut seen: HashSet<Prim> = HashSet::new();
    let mut cycles = 0;
    for r in reduce::all_reduced(delta) {
        if seen.contains(&r) {
            continue;
        }
        cycles += 1;
        for (p, _) in reduce::cycle(&r, delta) {
            seen.insert(p);
        }
    }
    cycles
}

/// Prime ideal factorization of an integral ideal: (prime, exponent) pairs.
pub fn factor_ideal(field: &QuadField, i: &FracIdeal) -> Vec<(FracIdeal, u32)> {
    assert!(i.is_integral(), "factor_ideal needs an integral ideal");
    let n = i.norm().to_integer();
    let n = n.to_i64().expect("ideal norm too large");
    let mut out = Vec::new();
    if n == 1 {
        return out;
    }
    let mut rest = i.clone();
    for (p, _) in arith::factorize(n) {
        for q in field.primes_above(p) {
            let mut e = 0;
            while rest.is_contained_in(&q) {
                rest = rest.div(&q);
                e += 1;
            }
            if e > 0 {
                out.push((q, e));
            }
        }
    }
    debug_assert!(rest.is_unit_ideal());
    out
}

/// All integral ideals of norm n.
pub fn ideals_of_norm(field: &QuadField, n: i64) -> Vec<FracIdeal> {
    assert!(n >= 1);
    let mut acc = vec![field.unit_ideal()];
    for (p, e) in arith::factorize(n) {
        let mut local: Vec<FracIdeal> = Vec::new();
        match field.splitting(p) {
            Splitting::Inert => {
                if e % 2 == 0 {
                    local.push(field.primes_above(p)[0].pow(i64::from(e / 2)));
                }
            }
            Splitting::Ramified => local.push(field.primes_above(p)[0].pow(i64::from(e))),
            Splitting::Split => {
                let ps = field.primes_above(p);
                for j in 0..=e {
                    local.push(ps[0].pow(i64::from(j)).mul(&ps[1].pow(i64::from(e - j))));
                }
            }
        }
        acc = acc
            .iter()
            .flat_map(|a| local.iter().map(move |b| a.mul(b)))
            .collect();
    }
    acc.sort();
    acc
}

/// Ideal generated by an integral element.
pub fn element_ideal(mu: &FieldElem) -> FracIdeal {
    FracIdeal::principal(mu)
}
