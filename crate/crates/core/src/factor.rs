//! Prime factorization of γ_f and reconciliation with the numerical CM value.

use crate::arith::{self, gcd};
use crate::error::{invalid, Error, Result};
use crate::finquad::{Genus, GenusChar};
use crate::mforms::PrincipalPart;
use crate::qfield::{factor_ideal, FieldElem, FracIdeal, QuadField, Splitting};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::BTreeMap;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Legendre polynomial `P_n(x) = Σ_b c_{n,b} x^b` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LegendreP {
    pub n: u32,
    pub coeffs: Vec<BigRational>,
}

/// Generalized binomial `C(x, n)` for rational `x`.
fn gen_binomial(x: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for j in 0..n {
        acc = acc * (x - rat(i64::from(j))) / rat(i64::from(j) + 1);
    }
    acc
}

impl LegendreP {
    /// `c_{n,b} = 2ⁿ C(n, b) C((n+b−1)/2, n)`.
    pub fn new(n: u32) -> Self {
        let two_n = BigRational::from_integer(BigInt::from(2).pow(n));
        let coeffs = (0..=n)
            .map(|b| {
                let x = BigRational::new(BigInt::from(n + b) - 1, BigInt::from(2));
                &two_n
                    * BigRational::from_integer(arith::binomial(u64::from(n), u64::from(b)))
                    * gen_binomial(&x, n)
            })
            .collect();
        LegendreP { n, coeffs }
    }

    /// Bonnet recurrence `(j+1)P_{j+1} = (2j+1)xP_j − jP_{j−1}`.
    pub fn by_recurrence(n: u32) -> Self {
        let mut p0 = vec![rat(1)];
        let mut p1 = vec![rat(0), rat(1)];
        if n == 0 {
            return LegendreP { n, coeffs: p0 };
        }
        for j in 1..n {
            let j = i64::from(j);
            let mut p2 = vec![rat(0); p1.len() + 1];
            for (i, c) in p1.iter().enumerate() {
                p2[i + 1] += c * rat(2 * j + 1);
            }
            for (i, c) in p0.iter().enumerate() {
                p2[i] -= c * rat(j);
            }
            for c in p2.iter_mut() {
                *c = &*c / rat(j + 1);
            }
            p0 = p1;
            p1 = p2;
        }
        LegendreP { n, coeffs: p1 }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `(√Δ·m)^n · P_n(t / (√Δ·m))` for odd `n`, which is rational.
    pub fn scaled_odd(&self, t: i64, m: i64, delta: i64) -> Result<BigRational> {
        if self.n % 2 == 0 {
            return Err(Error::Unsupported(format!(
                "P_{} is even; the scaled value is irrational",
                self.n
            )));
        }
        let q = rat(delta) * rat(m) * rat(m);
        let t = rat(t);
        let mut s = BigRational::zero();
        for (b, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let half = (self.n as usize - b) / 2;
            s += c * num_traits::pow(t.clone(), b) * num_traits::pow(q.clone(), half);
        }
        Ok(s)
    }
}

/// Elements `μ0 = (n + m√Δ)/2` with `μ0/√Δ` totally positive and trace `m`.
#[derive(Clone, Debug)]
pub struct TraceSlice {
    pub m: i64,
    pub delta: i64,
    /// The traces `n = tr(μ0)`, increasing.
    pub traces: Vec<i64>,
}

impl TraceSlice {
    pub fn new(m: i64, delta: i64) -> Result<Self> {
        if m < 1 {
            return invalid(format!("trace must be positive, got {m}"));
        }
        if delta <= 1 || !arith::is_fundamental(delta) {
            return invalid(format!("{delta} is not a real fundamental discriminant"));
        }
        let bound = m * m * delta;
        let r = arith::isqrt(bound);
        let traces = (-r..=r)
            .filter(|n| n * n < bound && (n - m * delta).rem_euclid(2) == 0)
            .collect();
        Ok(TraceSlice { m, delta, traces })
    }

    pub fn element(&self, n: i64) -> FieldElem {
        FieldElem::new(
            BigRational::new(n.into(), 2.into()),
            BigRational::new(self.m.into(), 2.into()),
            self.delta,
        )
    }

    pub fn elements(&self) -> Vec<FieldElem> {
        self.traces.iter().map(|&n| self.element(n)).collect()
    }
}

pub fn trace_slice(m: i64, delta: i64) -> Result<TraceSlice> {
    TraceSlice::new(m, delta)
}

/// Which of the two primes above a split ℓ is called 𝔩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Labeling {
    /// 𝔩 is the prime whose normalized generator of 𝔩^{h_F} has `|μ/μ′| < ε_F`.
    #[default]
    Canonical,
    /// The conjugate choice.
    Swapped,
}

/// A prime above a split ℓ with its generator of 𝔩^{h_F}.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledPrime {
    pub p: i64,
    pub primed: bool,
    pub ideal: FracIdeal,
    pub generator: FieldElem,
}

impl LabeledPrime {
    pub fn name(&self) -> String {
        format!("p{}_{}", if self.primed { "'" } else { "" }, self.p)
    }

    /// `ln|μ/μ′|` for the generator of 𝔩^{h_F}.
    pub fn log_ratio(&self) -> f64 {
        self.generator.log_abs_ratio()
    }
}

/// The pair (𝔩, 𝔩′) above a split prime ℓ, generators compatible under conjugation.
pub fn label_primes(field: &QuadField, p: i64, labeling: Labeling) -> Result<[LabeledPrime; 2]> {
    if field.splitting(p) != Splitting::Split {
        return invalid(format!("{p} does not split in Q(√{})", field.delta()));
    }
    let ps = field.primes_above(p);
    let h = field.class_number as i64;
    let gen_of = |q: &FracIdeal| -> Result<FieldElem> {
        let g = field.principal_generator(&q.pow(h)).ok_or_else(|| {
            Error::VerificationFailed(format!("power {h} of a prime above {p} is not principal"))
        })?;
        Ok(field.normalize_generator(&g))
    };
    let mu = gen_of(&ps[0])?;
    // |μ/μ′| < ε_F  ⟺  |μ²ε′ / (μ′²ε)| < 1
    let test = &(&mu * &mu) * &field.eps.conj();
    let first_is_l = !test.ratio_at_least_one();
    let (l, lp) = if first_is_l == (labeling == Labeling::Canonical) {
        (0, 1)
    } else {
        (1, 0)
    };
    let mu_l = if l == 0 { mu } else { gen_of(&ps[1])? };
    let mu_lp = mu_l.conj();
    Ok([
        LabeledPrime {
            p,
            primed: false,
            ideal: ps[l].clone(),
            generator: mu_l,
        },
        LabeledPrime {
            p,
            primed: true,
            ideal: ps[lp].clone(),
            generator: mu_lp,
        },
    ])
}

/// Least `1 <= q <= max_den` and `p` minimizing `|x − p/q|`.
pub fn nearest_rational(x: f64, max_den: i64) -> (i64, i64) {
    let mut best = (x.round() as i64, 1i64);
    let mut err = (x - best.0 as f64).abs();
    for q in 2..=max_den.max(1) {
        let p = (x * q as f64).round() as i64;
        let e = (x - p as f64 / q as f64).abs();
        if e < err - 1e-15 * x.abs().max(1.0) {
            let g = gcd(p, q);
            best = (p / g, q / g);
            err = e;
        }
    }
    best
}

/// The numerical side matched to the exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitFit {
    pub lhs: f64,
    /// Least-squares unit exponent on ε_F.
    pub unit_power_fit: f64,
    /// Nearest rational with bounded denominator.
    pub unit_power: (i64, i64),
    pub residual: f64,
    pub threshold: f64,
    /// `−Δ^{(1−k)/2} log|γ_f/γ_f′| / κ` from the exponents and the rounded unit power.
    pub rhs_value: f64,
}

impl UnitFit {
    pub fn ok(&self) -> bool {
        self.residual < self.threshold
    }
}

/// Exponents of γ_f and, once reconciled, its unit part.
#[derive(Clone, Debug)]
pub struct FactorReport {
    pub k: u32,
    pub d1: i64,
    pub d2: i64,
    pub delta: i64,
    /// `ord_𝔩(γ_f)/κ` for γ_f prime to one of 𝔩, 𝔩′; nonzero entries only, ordered by ℓ.
    pub exponents: Vec<(LabeledPrime, BigRational)>,
    /// The per-prime formula values before rescaling; antisymmetric under conjugation.
    pub formula_exponents: Vec<(LabeledPrime, BigRational)>,
    pub kappa: BigInt,
    pub class_number: usize,
    pub log_eps: f64,
    pub unit: Option<UnitFit>,
}

impl FactorReport {
    /// `Σ_𝔩 (ord_𝔩/κ)·ln|μ_𝔩/μ_𝔩′|`.
    pub fn log_sum(&self) -> f64 {
        self.exponents
            .iter()
            .map(|(l, e)| e.to_f64().unwrap() * l.log_ratio())
            .sum()
    }

    pub fn exponent_of(&self, p: i64, primed: bool) -> BigRational {
        self.exponents
            .iter()
            .find(|(l, _)| l.p == p && l.primed == primed)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn formula_exponent_of(&self, p: i64, primed: bool) -> BigRational {
        self.formula_exponents
            .iter()
            .find(|(l, _)| l.p == p && l.primed == primed)
            .map(|(_, e)| e.clone())
            .unwrap_or_else(BigRational::zero)
    }

    pub fn exponents_json(&self) -> Value {
        exponent_list_json(&self.exponents)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "k": self.k,
            "d1": self.d1,
            "d2": self.d2,
            "Delta": self.delta,
            "kappa": self.kappa.to_string(),
            "exponents": self.exponents_json(),
            "formula_exponents": exponent_list_json(&self.formula_exponents),
        });
        if let Some(u) = &self.unit {
            let m = v.as_object_mut().unwrap();
            m.insert(
                "unit_power".into(),
                unit_json(u.unit_power, u.unit_power_fit, "eps_F"),
            );
            m.insert(
                "unit_power_conj".into(),
                unit_json(
                    (-u.unit_power.0, u.unit_power.1),
                    -u.unit_power_fit,
                    "eps_F'",
                ),
            );
            m.insert("residual".into(), json!(u.residual));
            m.insert("threshold".into(), json!(u.threshold));
            m.insert("rhs_value".into(), json!(u.rhs_value));
            m.insert("lhs".into(), json!(u.lhs));
        }
        v
    }
}

fn exponent_list_json(list: &[(LabeledPrime, BigRational)]) -> Value {
    Value::Array(
        list.iter()
            .map(|(l, e)| {
                let (_, [a, b, c]) = l.ideal.hnf();
                json!({
                    "p": l.p,
                    "label": l.name(),
                    "hnf": [a.to_string(), b.to_string(), c.to_string()],
                    "e_num": e.numer().to_string(),
                    "e_den": e.denom().to_string(),
                })
            })
            .collect(),
    )
}

fn unit_json(r: (i64, i64), fit: f64, base: &str) -> Value {
    json!({"base": base, "num": r.0, "den": r.1, "fit": fit})
}

/// `ρ_{K/F}` of `∏ 𝔮^{e}` from a factorization, with per-prime characters.
fn rho_from(factors: &[(i32, u32)]) -> u64 {
    factors
        .iter()
        .map(|&(x, e)| {
            if x == 1 {
                u64::from(e) + 1
            } else {
                u64::from(e % 2 == 0)
            }
        })
        .product()
}

struct Contribution {
    prime: FracIdeal,
    value: BigRational,
}

/// `(√Δm)^{k−1}/2 · P_{k−1}(n/(√Δm)) · ρ((μ0)𝔩)(1 + ord_𝔩 μ0)` for every 𝔩 | μ0 with χ(𝔩) = −1, 𝔩 ≠ 𝔩′.
fn slice_contributions(
    genus: &Genus,
    chi: &GenusChar,
    p: &LegendreP,
    slice: &TraceSlice,
) -> Result<Vec<Contribution>> {
    let field = genus.field();
    let per: Vec<Result<Vec<Contribution>>> = slice
        .traces
        .par_iter()
        .map(|&n| {
            let mu = slice.element(n);
            let ideal = FracIdeal::principal(&mu);
            let fac = factor_ideal(field, &ideal);
            let chis: Vec<(i32, u32)> = fac
                .iter()
                .map(|(q, e)| (genus.chi_on_class(chi, q), *e))
                .collect();
            let weight = p.scaled_odd(n, slice.m, slice.delta)? / rat(2);
            let mut out = Vec::new();
            for (i, (q, e)) in fac.iter().enumerate() {
                let ell = q.norm().to_integer().to_i64().unwrap();
                if chis[i].0 != -1
                    || !arith::is_prime(ell)
                    || field.splitting(ell) != Splitting::Split
                {
                    continue;
                }
                let mut bumped = chis.clone();
                bumped[i].1 += 1;
                let rho = rho_from(&bumped);
                if rho == 0 {
                    continue;
                }
                let v = &weight * rat(rho as i64) * rat(i64::from(*e) + 1);
                out.push(Contribution {
                    prime: q.clone(),
                    value: v,
                });
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for r in per {
        all.extend(r?);
    }
    Ok(all)
}

pub fn validate_pair(d1: i64, d2: i64) -> Result<()> {
    for d in [d1, d2] {
        if d >= 0 || !arith::is_fundamental(d) {
            return invalid(format!("{d} is not a negative fundamental discriminant"));
        }
    }
    if gcd(d1, d2) != 1 {
        return invalid(format!("discriminants {d1} and {d2} are not coprime"));
    }
    Ok(())
}

/// The exponents `ord_𝔩(γ_f)/κ` predicted for the CM cycle of `(d1, d2)`.
pub fn gamma_exponents(k: u32, pp: &PrincipalPart, d1: i64, d2: i64) -> Result<FactorReport> {
    gamma_exponents_labeled(k, pp, d1, d2, Labeling::Canonical)
}

pub fn gamma_exponents_labeled(
    k: u32,
    pp: &PrincipalPart,
    d1: i64,
    d2: i64,
    labeling: Labeling,
) -> Result<FactorReport> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    if k % 2 != 0 {
        return Err(Error::Unsupported(format!("odd k = {k}")));
    }
    validate_pair(d1, d2)?;
    let delta = d1 * d2;
    let genus = Genus::new(delta)?;
    let chi = GenusChar::new(d1, d2)?;
    let field = genus.field();
    let legendre = LegendreP::new(k - 1);

    let mut by_prime: BTreeMap<FracIdeal, BigRational> = BTreeMap::new();
    for (m, c) in pp.iter() {
        if c.is_zero() {
            continue;
        }
        let slice = TraceSlice::new(i64::from(m), delta)?;
        for contrib in slice_contributions(&genus, &chi, &legendre, &slice)? {
            *by_prime
                .entry(contrib.prime)
                .or_insert_with(BigRational::zero) += c * contrib.value;
        }
    }

    let mut labels: BTreeMap<i64, [LabeledPrime; 2]> = BTreeMap::new();
    let mut formula_exponents = Vec::new();
    for (q, e) in by_prime {
        if e.is_zero() {
            continue;
        }
        let ell = q.norm().to_integer().to_i64().unwrap();
        if !labels.contains_key(&ell) {
            labels.insert(ell, label_primes(field, ell, labeling)?);
        }
        let l = labels[&ell]
            .iter()
            .find(|l| l.ideal == q)
            .expect("prime above ℓ")
            .clone();
        debug_assert_eq!(genus.chi_on_class(&chi, &q), -1);
        formula_exponents.push((l, e));
    }
    formula_exponents.sort_by(|a, b| (a.0.p, a.0.primed).cmp(&(b.0.p, b.0.primed)));

    // Rescale by a rational number so γ_f is prime to one prime of each conjugate pair.
    let mut exponents = Vec::new();
    for (ell, [l, lp]) in &labels {
        let get = |primed: bool| {
            formula_exponents
                .iter()
                .find(|(x, _)| x.p == *ell && x.primed == primed)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(BigRational::zero)
        };
        let net = get(false) - get(true);
        if net.is_positive() {
            exponents.push((l.clone(), net));
        } else if net.is_negative() {
            exponents.push((lp.clone(), -net));
        }
    }

    let mut kappa = BigInt::one();
    for (_, e) in &exponents {
        kappa = kappa.lcm(e.denom());
    }
    kappa = kappa.lcm(&pp.denominator());

    Ok(FactorReport {
        k,
        d1,
        d2,
        delta,
        exponents,
        formula_exponents,
        kappa,
        class_number: field.class_number,
        log_eps: field.log_eps(),
        unit: None,
    })
}

/// Fits the unit power of γ_f on ε_F from the numerical value `lhs` of `G_{k,f}(Z_χ)`.
pub fn fit_unit_power(report: &FactorReport, lhs: f64, tol: f64) -> UnitFit {
    let kappa = report.kappa.to_f64().unwrap();
    let h = report.class_number as f64;
    let scale = (report.delta as f64).powf((f64::from(report.k) - 1.0) / 2.0);
    let log_eps2 = 2.0 * report.log_eps;
    // −κ Δ^{(k−1)/2} lhs = (κ/h) S + 2 r ln ε_F
    let target = -kappa * scale * lhs;
    let ideal_part = kappa / h * report.log_sum();
    let fit = (target - ideal_part) / log_eps2;
    let max_den =
        2 * report.class_number as i64 * report.kappa.to_i64().unwrap_or(i64::MAX / 4).max(1);
    let (p, q) = nearest_rational(fit, max_den.min(1_000_000));
    let r = p as f64 / q as f64;
    let residual = (target - ideal_part - r * log_eps2).abs();
    UnitFit {
        lhs,
        unit_power_fit: fit,
        unit_power: (p, q),
        residual,
        threshold: 10.0 * tol * scale,
        rhs_value: -(ideal_part + r * log_eps2) / (kappa * scale),
    }
}

/// Completes the report with the unit power; fails when the residual is above threshold.
pub fn reconcile(mut report: FactorReport, lhs: f64, tol: f64) -> Result<FactorReport> {
    let fit = fit_unit_power(&report, lhs, tol);
    if !fit.ok() {
        return Err(Error::VerificationFailed(format!(
            "unit power fit {:.6} leaves residual {:.3e} above {:.3e}",
            fit.unit_power_fit, fit.residual, fit.threshold
        )));
    }
    report.unit = Some(fit);
    Ok(report)
}

/// Exponent vector of `∏_{𝔞 | (μ0)} 𝔞^{χ(𝔞)}`, taken literally.
pub fn alt_exponent_check(
    genus: &Genus,
    chi: &GenusChar,
    mu0: &FieldElem,
) -> BTreeMap<FracIdeal, i64> {
    divisor_product(genus, chi, mu0, false)
}

/// Exponent vector of `∏_{𝔞 | (μ0)} (𝔞^∨/𝔞)^{χ(𝔞)}` with `𝔞^∨ = (μ0)/𝔞` the complementary divisor.
pub fn complementary_exponent_check(
    genus: &Genus,
    chi: &GenusChar,
    mu0: &FieldElem,
) -> BTreeMap<FracIdeal, i64> {
    divisor_product(genus, chi, mu0, true)
}

fn divisor_product(
    genus: &Genus,
    chi: &GenusChar,
    mu0: &FieldElem,
    complementary: bool,
) -> BTreeMap<FracIdeal, i64> {
    let field = genus.field();
    let fac = factor_ideal(field, &FracIdeal::principal(mu0));
    let chis: Vec<i32> = fac
        .iter()
        .map(|(q, _)| genus.chi_on_class(chi, q))
        .collect();
    let mut out = BTreeMap::new();
    // Divisors are exponent vectors 0 <= a_i <= e_i.
    let mut a = vec![0u32; fac.len()];
    loop {
        let x: i64 = a
            .iter()
            .zip(&chis)
            .map(|(&ai, &c)| if ai % 2 == 1 { i64::from(c) } else { 1 })
            .product();
        for (i, (q, e)) in fac.iter().enumerate() {
            let ord = if complementary {
                i64::from(*e) - 2 * i64::from(a[i])
            } else {
                i64::from(a[i])
            };
            *out.entry(q.clone()).or_insert(0) += x * ord;
        }
        let mut i = 0;
        loop {
            if i == fac.len() {
                out.retain(|_, v| *v != 0);
                return out;
            }
            if a[i] < fac[i].1 {
                a[i] += 1;
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// Exponent vector of `∏_{𝔩 | μ0, χ(𝔩) = −1} 𝔩^{ρ((μ0)𝔩)(1 + ord_𝔩 μ0)}`.
pub fn rho_side_exponents(
    genus: &Genus,
    chi: &GenusChar,
    mu0: &FieldElem,
) -> BTreeMap<FracIdeal, i64> {
    let fac = factor_ideal(genus.field(), &FracIdeal::principal(mu0));
    let chis: Vec<(i32, u32)> = fac
        .iter()
        .map(|(q, e)| (genus.chi_on_class(chi, q), *e))
        .collect();
    let mut out = BTreeMap::new();
    for (i, (q, e)) in fac.iter().enumerate() {
        if chis[i].0 != -1 {
            continue;
        }
        let mut bumped = chis.clone();
        bumped[i].1 += 1;
        let v = rho_from(&bumped) as i64 * (i64::from(*e) + 1);
        if v != 0 {
            out.insert(q.clone(), v);
        }
    }
    out
}

/// Signs of `μ0`: the totally positive part check used for slices.
pub fn is_slice_element(mu0: &FieldElem) -> bool {
    mu0.is_positive() && mu0.conj().sign().is_lt() && mu0.is_integral() && !mu0.norm().is_positive()
}
