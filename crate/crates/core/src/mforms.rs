//! Exact q-expansions of level one modular forms and the obstruction test for
//! principal parts of weakly holomorphic forms of weight 2 − 2k.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::binomial;
use crate::error::{invalid, Error, Result};

/// Σ_{start ≤ j < prec} c_j q^j + O(q^prec).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub start: i64,
    pub coeffs: Vec<BigRational>,
    pub prec: i64,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl QSeries {
    pub fn new(start: i64, coeffs: Vec<BigRational>, prec: i64) -> Self {
        let mut s = QSeries {
            start,
            coeffs,
            prec,
        };
        s.coeffs.truncate((prec - start).max(0) as usize);
        s
    }

    pub fn from_ints(start: i64, coeffs: &[i64], prec: i64) -> Self {
        QSeries::new(start, coeffs.iter().map(|&c| rat(c)).collect(), prec)
    }

    pub fn one(prec: i64) -> Self {
        QSeries::from_ints(0, &[1], prec)
    }

    pub fn coeff(&self, m: i64) -> BigRational {
        assert!(
            m < self.prec,
            "coefficient q^{m} beyond precision {}",
            self.prec
        );
        if m < self.start {
            return BigRational::zero();
        }
        self.coeffs
            .get((m - self.start) as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Exponent of the first nonzero coefficient, if any is known.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| self.start + i as i64)
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let start = self.start.min(o.start);
        let prec = self.prec.min(o.prec);
        let coeffs = (start..prec).map(|m| self.coeff(m) + o.coeff(m)).collect();
        QSeries::new(start, coeffs, prec)
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        QSeries::new(
            self.start,
            self.coeffs.iter().map(|x| x * c).collect(),
            self.prec,
        )
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.scale(&rat(-1)))
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let start = self.start + o.start;
        let prec = (self.prec + o.start).min(o.prec + self.start);
        let len = (prec - start).max(0) as usize;
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] += a * b;
            }
        }
        QSeries::new(start, coeffs, prec)
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut acc = QSeries::new(0, vec![BigRational::one()], i64::MAX / 4);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        if e == 0 {
            acc.prec = self.prec - self.start;
        }
        acc
    }

    /// 1/f for f with nonzero constant term.
    pub fn inverse(&self) -> Result<QSeries> {
        if self.start != 0 || self.coeffs.first().map_or(true, |c| c.is_zero()) {
            return invalid("only series with a nonzero constant term are invertible");
        }
        let n = self.prec as usize;
        let c0 = &self.coeffs[0];
        let mut inv = vec![BigRational::zero(); n];
        inv[0] = c0.recip();
        for m in 1..n {
            let mut s = BigRational::zero();
            for j in 1..=m {
                s += self.coeff(j as i64) * &inv[m - j];
            }
            inv[m] = -s / c0;
        }
        Ok(QSeries::new(0, inv, self.prec))
    }

    pub fn div(&self, o: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&o.inverse()?))
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}q^{}", c, self.start + i as i64)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.prec)
    }
}

/// Bernoulli numbers B_0..=B_n with B_1 = −1/2.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b = vec![BigRational::zero(); n + 1];
    b[0] = BigRational::one();
    for m in 1..=n {
        let mut s = BigRational::zero();
        for j in 0..m {
            s += BigRational::from_integer(binomial(m as u64 + 1, j as u64)) * &b[j];
        }
        b[m] = -s / rat(m as i64 + 1);
    }
    b
}

fn sigma(n: i64, k: u32) -> BigInt {
    (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| BigInt::from(d).pow(k))
        .sum()
}

/// E_k = 1 − (2k/B_k) Σ σ_{k−1}(n) qⁿ + O(q^prec).
pub fn eisenstein(k: i64, prec: i64) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return invalid(format!("Eisenstein series need even weight ≥ 4, got {k}"));
    }
    if prec < 1 {
        return invalid("precision must be positive");
    }
    let bk = bernoulli(k as usize)[k as usize].clone();
    let factor = -rat(2 * k) / bk;
    let mut coeffs = vec![BigRational::one()];
    for n in 1..prec {
        coeffs.push(&factor * BigRational::from_integer(sigma(n, (k - 1) as u32)));
    }
    Ok(QSeries::new(0, coeffs, prec))
}

/// Δ = q∏(1 − qⁿ)^24 + O(q^prec).
pub fn delta_form(prec: i64) -> Result<QSeries> {
    if prec < 1 {
        return invalid("precision must be positive");
    }
    let len = (prec - 1) as usize;
    let mut c = vec![BigInt::zero(); len.max(1)];
    c[0] = BigInt::one();
    for n in 1..len {
        for _ in 0..24 {
            for j in (n..len).rev() {
                let t = c[j - n].clone();
                c[j] -= t;
            }
        }
    }
    c.truncate(len);
    Ok(QSeries::new(
        1,
        c.into_iter().map(BigRational::from_integer).collect(),
        prec,
    ))
}

/// dim M_w for even w ≥ 0.
pub fn dim_modular(w: i64) -> usize {
    if w < 0 || w % 2 != 0 || w == 2 {
        return 0;
    }
    let base = (w / 12) as usize;
    if w % 12 == 2 {
        base
    } else {
        base + 1
    }
}

/// Basis of S_w in reduced echelon form: g_i = q^i + O(q^{dim+1}) for i = 1..=dim.
pub fn cusp_basis(w: i64, prec: i64) -> Result<Vec<QSeries>> {
    if w < 4 || w % 2 != 0 {
        return invalid(format!("cusp forms need even weight ≥ 4, got {w}"));
    }
    if w < 12 {
        return Ok(Vec::new());
    }
    let dim = dim_modular(w - 12);
    let prec = prec.max(dim as i64 + 2);
    let e4 = eisenstein(4, prec)?;
    let e6 = eisenstein(6, prec)?;
    let delta = delta_form(prec)?;
    let rest = w - 12;
    let mut rows: Vec<QSeries> = Vec::new();
    for b in 0..=rest / 6 {
        let r = rest - 6 * b;
        if r % 4 == 0 {
            rows.push(delta.mul(&e4.pow((r / 4) as u32)).mul(&e6.pow(b as u32)));
        }
    }
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|g| (0..prec).map(|m| g.coeff(m)).collect())
        .collect();
    let pivots = rref(&mut mat);
    if pivots.len() != dim || pivots.iter().enumerate().any(|(i, &p)| p != i + 1) {
        return Err(Error::VerificationFailed(format!(
            "cusp basis of weight {w} has pivots {pivots:?}"
        )));
    }
    Ok(mat
        .into_iter()
        .take(dim)
        .map(|row| QSeries::new(0, row, prec))
        .collect())
}

/// In-place reduced row echelon form; returns pivot columns.
fn rref(m: &mut [Vec<BigRational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// The principal part Σ_m c_f(−m) q^{−m} of a weakly holomorphic form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrincipalPart {
    pub coeffs: BTreeMap<u32, BigRational>,
}

impl PrincipalPart {
    pub fn new(coeffs: BTreeMap<u32, BigRational>) -> Result<Self> {
        let coeffs: BTreeMap<u32, BigRational> =
            coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if coeffs.is_empty() {
            return invalid("principal part must have a nonzero entry");
        }
        if coeffs.contains_key(&0) {
            return invalid("principal part indices start at 1");
        }
        Ok(PrincipalPart { coeffs })
    }

    /// The largest m with c_f(−m) ≠ 0.
    pub fn order(&self) -> u32 {
        *self.coeffs.keys().next_back().unwrap()
    }

    pub fn get(&self, m: u32) -> BigRational {
        self.coeffs
            .get(&m)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BigRational)> {
        self.coeffs.iter().map(|(m, c)| (*m, c))
    }

    pub fn add(&self, o: &PrincipalPart) -> Result<PrincipalPart> {
        let mut c = self.coeffs.clone();
        for (m, v) in &o.coeffs {
            *c.entry(*m).or_insert_with(BigRational::zero) += v;
        }
        PrincipalPart::new(c)
    }

    pub fn scale(&self, s: &BigRational) -> Result<PrincipalPart> {
        PrincipalPart::new(self.coeffs.iter().map(|(m, c)| (*m, c * s)).collect())
    }

    /// lcm of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for PrincipalPart {
    type Err = Error;

    /// Parses "m=c[,m=c...]" with c an integer or p/q.
    fn from_str(s: &str) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (m, c) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected m=c, got {item:?}")))?;
            let m: u32 = m
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad index {m:?}")))?;
            if coeffs.insert(m, parse_rational(c)?).is_some() {
                return invalid(format!("index {m} given twice"));
            }
        }
        PrincipalPart::new(coeffs)
    }
}

impl fmt::Display for PrincipalPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| format!("{m}={c}"))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Outcome of pairing a principal part against S_{2k}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrincipalCheck {
    Valid,
    /// Σ_m c_f(−m) a_g(m) for each echelon basis element g.
    Obstruction(Vec<BigRational>),
}

impl PrincipalCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, PrincipalCheck::Valid)
    }
}

/// Whether some f ∈ M^!_{2−2k} has the given principal part.
pub fn check_principal_part(k: i64, pp: &PrincipalPart) -> Result<PrincipalCheck> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    let prec = 2 * i64::from(pp.order()) + 10;
    let basis = cusp_basis(2 * k, prec)?;
    let pairing: Vec<BigRational> = basis
        .iter()
        .map(|g| pp.iter().map(|(m, c)| c * g.coeff(i64::from(m))).sum())
        .collect();
    if pairing.iter().all(|x| x.is_zero()) {
        Ok(PrincipalCheck::Valid)
    } else {
        Ok(PrincipalCheck::Obstruction(pairing))
    }
}

/// Ramanujan τ(n) from Δ.
pub fn ramanujan_tau(n: i64) -> BigInt {
    delta_form(n + 1).unwrap().coeff(n).to_integer()
}
