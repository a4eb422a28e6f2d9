//! Higher Green's functions on `PSL2(Z)\H` and their averages over CM cycles.
//!
//! `G_k(z1, z2)` is summed over the orbit `PSL2(Z)·z2` inside a hyperbolic ball around
//! `z1` of radius `cosh r <= T`. The orbit is enumerated as translates of one representative
//! per coset of `Γ∞\PSL2(Z)`. `T` is doubled until the partial sum settles. Each partial sum
//! carries a correction for the orbit outside the ball, computed from the asymptotic orbit
//! density `6 dt`.

use crate::arith::{gcd, is_fundamental};
use crate::error::{invalid, Error, Result};
use crate::mforms::{check_principal_part, PrincipalCheck, PrincipalPart};
use crate::real::{DD, MAX_DIGITS};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

/// Points closer than this in `cosh d − 1` count as coincident.
pub const SINGULAR_EPS: f64 = 1e-10;
/// Regime switch of `legendre_q`.
pub const T_SWITCH: f64 = 2.0;
const T_START: f64 = 4.0;
const T_MAX: f64 = 1.0e8;

/// A point of the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: DD,
    pub y: DD,
}

impl Point {
    pub fn new(x: DD, y: DD) -> Result<Self> {
        if !(y.hi > 0.0) {
            return invalid("point must lie in the upper half plane");
        }
        Ok(Point { x, y })
    }

    pub fn from_f64(x: f64, y: f64) -> Result<Self> {
        Point::new(DD::from_f64(x), DD::from_f64(y))
    }

    /// Image under `(a b; c d)` with `ad − bc > 0`.
    pub fn act(&self, m: [i64; 4]) -> Point {
        let [a, b, c, d] = m.map(DD::from_i64);
        let det = a * d - b * c;
        let cx = c * self.x + d;
        let den = cx.sqr() + (c * self.y).sqr();
        let x = ((a * self.x + b) * cx + a * c * self.y.sqr()) / den;
        Point {
            x,
            y: det * self.y / den,
        }
    }

    /// `cosh d(self, w) − 1`.
    pub fn cosh_dist_m1(&self, w: &Point) -> DD {
        ((self.x - w.x).sqr() + (self.y - w.y).sqr()) / (self.y * w.y).mul_f64(2.0)
    }
}

/// Reduced positive definite form `(A, B, C)` and its root in `H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CMPoint {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub disc: i64,
    pub w: u32,
}

impl CMPoint {
    /// `(−B + i√|d|) / 2A`.
    pub fn z(&self) -> Point {
        let two_a = DD::from_i64(2 * self.a);
        Point {
            x: DD::from_i64(-self.b) / two_a,
            y: DD::from_i64(-self.disc).sqrt() / two_a,
        }
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }
}

pub fn unit_count(d: i64) -> u32 {
    match d {
        -4 => 4,
        -3 => 6,
        _ => 2,
    }
}

/// All reduced forms of discriminant `d`.
pub fn cm_points(d: i64) -> Result<Vec<CMPoint>> {
    if d >= 0 || !is_fundamental(d) {
        return invalid(format!("{d} is not a negative fundamental discriminant"));
    }
    let w = unit_count(d);
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let p = CMPoint {
                a,
                b,
                c,
                disc: d,
                w,
            };
            if c >= a && gcd(gcd(a, b), c) == 1 && p.is_reduced() {
                out.push(p);
            }
        }
        a += 1;
    }
    Ok(out)
}

/// The weighted cycle of all pairs of CM points of discriminants `d1`, `d2`.
#[derive(Clone, Debug, Serialize)]
pub struct CMCycle {
    pub pairs: Vec<(CMPoint, CMPoint)>,
    /// `4 / (w1 w2)` as a reduced fraction.
    pub weight: (i64, i64),
}

impl CMCycle {
    pub fn new(d1: i64, d2: i64) -> Result<Self> {
        let p1 = cm_points(d1)?;
        let p2 = cm_points(d2)?;
        if gcd(d1, d2) != 1 {
            return invalid(format!("discriminants {d1} and {d2} are not coprime"));
        }
        let den = i64::from(p1[0].w * p2[0].w);
        let g = gcd(4, den);
        let pairs = p1
            .iter()
            .flat_map(|a| p2.iter().map(move |b| (*a, *b)))
            .collect();
        Ok(CMCycle {
            pairs,
            weight: (4 / g, den / g),
        })
    }

    pub fn weight_dd(&self) -> DD {
        DD::from_ratio(self.weight.0, self.weight.1)
    }
}

/// `P_n(t)` by the three-term recurrence.
pub fn legendre_p_value(n: u32, t: DD) -> DD {
    let (mut p0, mut p1) = (DD::ONE, t);
    if n == 0 {
        return p0;
    }
    for j in 1..n {
        let jf = f64::from(j);
        let p2 = (t * p1).mul_f64(2.0 * jf + 1.0) - p0.mul_f64(jf);
        p0 = p1;
        p1 = p2 / DD::from_f64(jf + 1.0);
    }
    p1
}

/// Closed form `P_n(t)·½ln((t+1)/(t−1)) − Σ_{m=1}^n P_{m−1}(t)P_{n−m}(t)/m`, with `u = t − 1`.
pub fn legendre_q_closed(n: u32, u: DD) -> DD {
    let t = DD::ONE + u;
    let half_log = (DD::from_f64(2.0) / u).ln1p().mul_f64(0.5);
    let ps: Vec<DD> = (0..=n).map(|j| legendre_p_value(j, t)).collect();
    let mut w = DD::ZERO;
    for m in 1..=n as usize {
        w += ps[m - 1] * ps[n as usize - m] / DD::from_f64(m as f64);
    }
    ps[n as usize] * half_log - w
}

/// Hypergeometric expansion in `1/t²`.
pub fn legendre_q_series(n: u32, t: DD) -> DD {
    // 2^n (n!)^2 / (2n+1)!
    let mut lead = DD::ONE;
    for j in 1..=n {
        let jf = f64::from(j);
        lead = lead.mul_f64(jf) / DD::from_f64(2.0 * jf + 1.0);
    }
    let inv_t2 = DD::ONE / t.sqr();
    let nf = f64::from(n);
    let mut term = DD::ONE;
    let mut sum = DD::ONE;
    let mut j = 0.0;
    loop {
        let num = DD::from_f64((nf + 1.0) / 2.0 + j) * DD::from_f64((nf + 2.0) / 2.0 + j);
        let den = DD::from_f64(nf + 1.5 + j).mul_f64(j + 1.0);
        term = term * num / den * inv_t2;
        sum += term;
        if term.hi < 1e-34 * sum.hi {
            break;
        }
        j += 1.0;
    }
    lead * sum / t.powi(n + 1)
}

/// `Q_n(1 + u)` for `u > 0`.
pub fn legendre_q_shifted(n: u32, u: DD) -> Result<DD> {
    if !(u.hi > 0.0) {
        return Err(Error::SingularInput(format!(
            "Q_{n} needs t > 1, got t − 1 = {}",
            u.to_f64()
        )));
    }
    if u.hi <= T_SWITCH - 1.0 {
        Ok(legendre_q_closed(n, u))
    } else {
        Ok(legendre_q_series(n, DD::ONE + u))
    }
}

/// Legendre function of the second kind `Q_n(t)`, `t > 1`.
pub fn legendre_q(n: u32, t: DD) -> Result<DD> {
    legendre_q_shifted(n, t - DD::ONE)
}

/// Largest disagreement of the two regimes of `Q_n` on a grid in `[1.8, 2.2]`, `n <= nmax`.
pub fn legendre_overlap_error(nmax: u32) -> f64 {
    let mut worst: f64 = 0.0;
    for n in 0..=nmax {
        for i in 0..=20 {
            let t = DD::from_f64(1.8) + DD::from_ratio(i, 50);
            let a = legendre_q_closed(n, t - DD::ONE);
            let b = legendre_q_series(n, t);
            worst = worst.max(((a - b) / b).abs().to_f64());
        }
    }
    worst
}

/// `g_k(z1, z2) = −2 Q_{k−1}(cosh d(z1, z2))`.
pub fn g_k(z1: &Point, z2: &Point, k: u32) -> Result<DD> {
    if k < 1 {
        return invalid("k must be positive");
    }
    let u = z1.cosh_dist_m1(z2);
    if u.hi < SINGULAR_EPS {
        return Err(Error::SingularInput(
            "g_k is singular on the diagonal".into(),
        ));
    }
    Ok(-legendre_q_shifted(k - 1, u)?.mul_f64(2.0))
}

/// Contribution of the orbit outside the ball `cosh d <= T`.
pub fn tail_correction(k: u32, t: DD) -> Result<DD> {
    let hi = legendre_q(k, t)?;
    let lo = legendre_q(k - 2, t)?;
    Ok(-(lo - hi).mul_f64(12.0) / DD::from_f64(2.0 * f64::from(k) - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GreenParams {
    pub k: u32,
    pub tol: f64,
    pub digits: u32,
}

impl GreenParams {
    pub fn new(k: u32, tol: f64, digits: u32) -> Result<Self> {
        if k < 2 || k % 2 != 0 {
            return invalid(format!("k must be even and at least 2, got {k}"));
        }
        if digits < 15 {
            return invalid(format!(
                "working precision must be at least 15 digits, got {digits}"
            ));
        }
        if digits > MAX_DIGITS {
            return Err(Error::Unsupported(format!(
                "working precision above {MAX_DIGITS} digits, got {digits}"
            )));
        }
        if !(tol > 0.0) || tol < 10f64.powi(1 - digits as i32) {
            return invalid(format!(
                "tolerance {tol} is not positive or is below 10^(1-{digits})"
            ));
        }
        Ok(GreenParams { k, tol, digits })
    }
}

/// A truncated orbit sum with its convergence record.
#[derive(Clone, Debug, Serialize)]
pub struct GreenValue {
    #[serde(skip)]
    pub value: DD,
    /// Final ball radius, as `cosh r`.
    pub radius: f64,
    pub terms: u64,
    pub doublings: u32,
    /// Change between the last two partial sums.
    pub last_change: f64,
    pub converged: bool,
}

impl GreenValue {
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

/// Coset representatives `(A B; 0 D)` with `AD = m`, `0 <= B < D`.
pub fn hecke_cosets(m: u32) -> Vec<[i64; 4]> {
    let m = i64::from(m);
    let mut out = Vec::new();
    for a in 1..=m {
        if m % a == 0 {
            let d = m / a;
            for b in 0..d {
                out.push([a, b, 0, d]);
            }
        }
    }
    out
}

fn mat_mul(p: [i64; 4], q: [i64; 4]) -> [i64; 4] {
    [
        p[0] * q[0] + p[1] * q[2],
        p[0] * q[1] + p[1] * q[3],
        p[2] * q[0] + p[3] * q[2],
        p[2] * q[1] + p[3] * q[3],
    ]
}

/// Some `(a b; c d) ∈ SL2(Z)` with bottom row `(c, d)`, `gcd(c, d) = 1`.
fn complete_row(c: i64, d: i64) -> [i64; 4] {
    if c == 0 {
        return [1, 0, 0, 1];
    }
    // a·d ≡ 1 (mod c)
    let (mut r0, mut r1, mut s0, mut s1) = (d.rem_euclid(c), c, 1i64, 0i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    let a = s0.rem_euclid(c);
    [a, (a * d - 1) / c, c, d]
}

/// Calls `f(w, u, γ)` for every `w = γ·z2`, `γ ∈ PSL2(Z)` with bottom-left entry `c`, such that
/// `u = cosh d(z1, w) − 1 <= umax`.
fn visit_row<F>(z1: &Point, z2: &Point, c: i64, umax: f64, kbound: f64, mut f: F) -> Result<()>
where
    F: FnMut(&Point, DD, [i64; 4]) -> Result<()>,
{
    let (x2, y2) = (z2.x.to_f64(), z2.y.to_f64());
    let ds: Vec<i64> = if c == 0 {
        vec![1]
    } else {
        let cf = c as f64;
        let rad = kbound - cf * cf * y2 * y2;
        if rad < 0.0 {
            return Ok(());
        }
        let rad = rad.sqrt();
        let lo = (-cf * x2 - rad).floor() as i64 - 1;
        let hi = (-cf * x2 + rad).ceil() as i64 + 1;
        (lo..=hi).filter(|&d| gcd(c, d) == 1).collect()
    };
    let (x1, y1) = (z1.x.to_f64(), z1.y.to_f64());
    for d in ds {
        let g0 = complete_row(c, d);
        let w0 = z2.act(g0);
        let yw = w0.y.to_f64();
        let r = 2.0 * y1 * yw * umax - (y1 - yw) * (y1 - yw);
        if r < -1e-6 * y1 * yw {
            continue;
        }
        let r = r.max(0.0).sqrt();
        let centre = x1 - w0.x.to_f64();
        let nlo = (centre - r).floor() as i64 - 1;
        let nhi = (centre + r).ceil() as i64 + 1;
        for n in nlo..=nhi {
            let w = Point {
                x: w0.x + DD::from_i64(n),
                y: w0.y,
            };
            let u = z1.cosh_dist_m1(&w);
            if u.hi > umax {
                continue;
            }
            f(&w, u, mat_mul([1, n, 0, 1], g0))?;
        }
    }
    Ok(())
}

fn row_bounds(z1: &Point, z2: &Point, umax: f64) -> (i64, f64) {
    let t = 1.0 + umax;
    let ymin = z1.y.to_f64() / (t + (t * t - 1.0).sqrt());
    let y2 = z2.y.to_f64();
    // |c z2 + d|^2 <= kbound, slightly enlarged for rounding
    let kbound = y2 / ymin * (1.0 + 1e-9) + 1e-9;
    let cmax = (kbound.sqrt() / y2).floor() as i64 + 1;
    (cmax, kbound)
}

fn singular(m: [i64; 4]) -> Error {
    Error::SingularConfiguration(format!(
        "z1 is within the singular locus of the orbit point of [[{}, {}], [{}, {}]]",
        m[0], m[1], m[2], m[3]
    ))
}

/// `Σ g_k(z1, γ z2)` over `γ ∈ PSL2(Z)` with `cosh d(z1, γ z2) <= t`, without tail correction.
/// `outer` is the Hecke matrix applied before the orbit (used only for error reports).
fn ball_sum(z1: &Point, z2: &Point, k: u32, t: f64, outer: [i64; 4]) -> Result<(DD, u64)> {
    let umax = t - 1.0;
    let (cmax, kbound) = row_bounds(z1, z2, umax);
    let rows: Vec<Result<(DD, u64)>> = (0..=cmax)
        .into_par_iter()
        .map(|c| {
            let mut s = DD::ZERO;
            let mut cnt = 0u64;
            visit_row(z1, z2, c, umax, kbound, |_, u, g| {
                if u.hi < SINGULAR_EPS {
                    return Err(singular(mat_mul(g, outer)));
                }
                s -= legendre_q_shifted(k - 1, u)?.mul_f64(2.0);
                cnt += 1;
                Ok(())
            })?;
            Ok((s, cnt))
        })
        .collect();
    let mut total = DD::ZERO;
    let mut count = 0;
    for r in rows {
        let (s, c) = r?;
        total += s;
        count += c;
    }
    Ok((total, count))
}

/// Orbit points `γ z2` within `cosh d(z1, ·) <= t`, in enumeration order.
pub fn orbit_points(z1: &Point, z2: &Point, t: f64) -> Result<Vec<(Point, [i64; 4])>> {
    let umax = t - 1.0;
    let (cmax, kbound) = row_bounds(z1, z2, umax);
    let mut out = Vec::new();
    for c in 0..=cmax {
        visit_row(z1, z2, c, umax, kbound, |w, _, g| {
            out.push((*w, g));
            Ok(())
        })?;
    }
    Ok(out)
}

/// Sum over a list of terms `(coefficient, z1, z2, Hecke coset)` of `coefficient · G_k(z1, M z2)`
/// truncated at `t`, with tail correction.
fn weighted_sum(terms: &[(DD, Point, Point, [i64; 4])], k: u32, t: f64) -> Result<(DD, u64)> {
    let tail = tail_correction(k, DD::from_f64(t))?;
    let mut total = DD::ZERO;
    let mut count = 0;
    for (coef, z1, z2, m) in terms {
        let (s, c) = ball_sum(z1, z2, k, t, *m)?;
        total += *coef * (s + tail);
        count += c;
    }
    Ok((total, count))
}

fn adaptive(terms: &[(DD, Point, Point, [i64; 4])], params: &GreenParams) -> Result<GreenValue> {
    let mut t = T_START;
    let mut prev: Option<DD> = None;
    let mut hits = 0;
    let mut doublings = 0;
    let mut last_change = f64::INFINITY;
    loop {
        let (s, count) = weighted_sum(terms, params.k, t)?;
        if let Some(p) = prev {
            last_change = (s - p).abs().to_f64();
            hits = if last_change < params.tol / 10.0 {
                hits + 1
            } else {
                0
            };
        }
        if hits >= 2 || t * 2.0 > T_MAX {
            return Ok(GreenValue {
                value: s,
                radius: t,
                terms: count,
                doublings,
                last_change,
                converged: hits >= 2,
            });
        }
        prev = Some(s);
        t *= 2.0;
        doublings += 1;
    }
}

/// `G_k(z1, z2)` truncated at a fixed radius `cosh r <= t`, with tail correction.
pub fn green_at_radius(z1: &Point, z2: &Point, k: u32, t: f64) -> Result<DD> {
    Ok(weighted_sum(&[(DD::ONE, *z1, *z2, [1, 0, 0, 1])], k, t)?.0)
}

/// `G_k|T_m(z1, z2)` with the Hecke operator acting on `z2`.
pub fn green_hecke(z1: &Point, z2: &Point, m: u32, params: &GreenParams) -> Result<GreenValue> {
    if m == 0 {
        return invalid("Hecke index must be positive");
    }
    let terms: Vec<_> = hecke_cosets(m)
        .into_iter()
        .map(|c| (DD::ONE, *z1, z2.act(c), c))
        .collect();
    adaptive(&terms, params)
}

/// `G_k(z1, z2)`.
pub fn green(z1: &Point, z2: &Point, params: &GreenParams) -> Result<GreenValue> {
    green_hecke(z1, z2, 1, params)
}

fn rational_dd(r: &BigRational) -> Result<DD> {
    match (r.numer().to_i64(), r.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(DD::from_ratio(n, d)),
        _ => invalid(format!("coefficient {r} is too large")),
    }
}

/// `G_{k,f}(Z_χ)`: the cycle-weighted sum of `c_f(−m) m^{k−1} G_k|T_m` over all CM pairs.
pub fn green_kf_at_cycle(
    pp: &PrincipalPart,
    d1: i64,
    d2: i64,
    params: &GreenParams,
) -> Result<GreenValue> {
    let k = params.k;
    if let PrincipalCheck::Obstruction(v) = check_principal_part(i64::from(k), pp)? {
        let shown: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        return invalid(format!(
            "principal part is obstructed by S_{}: [{}]",
            2 * k,
            shown.join(", ")
        ));
    }
    let cycle = CMCycle::new(d1, d2)?;
    let w = cycle.weight_dd();
    let mut terms = Vec::new();
    for (m, c) in pp.iter() {
        let coef = w * rational_dd(c)? * DD::from_i64(i64::from(m)).powi(k - 1);
        for (p1, p2) in &cycle.pairs {
            let (z1, z2) = (p1.z(), p2.z());
            for h in hecke_cosets(m) {
                terms.push((coef, z1, z2.act(h), h));
            }
        }
    }
    adaptive(&terms, params)
}

/// Discrete Laplacian of `z1 ↦ G_k(z1, z2)` at `z1`, against the eigenvalue `k(1−k)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaplacianCheck {
    pub value: f64,
    pub laplacian: f64,
    pub eigenvalue: f64,
    pub relative_error: f64,
}

/// The orbit set is fixed by the ball around the centre, so every term is an exact eigenfunction
/// and the remaining error is the `O(step²)` of the stencil.
pub fn laplacian_check(
    z1: &Point,
    z2: &Point,
    k: u32,
    step: f64,
    t: f64,
) -> Result<LaplacianCheck> {
    let pts = orbit_points(z1, z2, t)?;
    let h = DD::from_f64(step);
    let eval = |z: Point| -> Result<DD> {
        let mut s = DD::ZERO;
        for (w, _) in &pts {
            s += g_k(&z, w, k)?;
        }
        Ok(s)
    };
    let f0 = eval(*z1)?;
    let fx = eval(Point {
        x: z1.x + h,
        y: z1.y,
    })? + eval(Point {
        x: z1.x - h,
        y: z1.y,
    })?;
    let fy = eval(Point {
        x: z1.x,
        y: z1.y + h,
    })? + eval(Point {
        x: z1.x,
        y: z1.y - h,
    })?;
    let lap = -(z1.y.sqr()) * (fx + fy - f0.mul_f64(4.0)) / h.sqr();
    let lambda = f64::from(k) * (1.0 - f64::from(k));
    let value = f0.to_f64();
    let laplacian = lap.to_f64();
    Ok(LaplacianCheck {
        value,
        laplacian,
        eigenvalue: lambda,
        relative_error: ((laplacian - lambda * value) / (lambda * value)).abs(),
    })
}

/// `−(8/√28)·log((8+3√7)/(8−3√7))`, the closed form of `G_2(i, (−1+√−7)/2)`.
pub fn g2_i_z7_closed_form() -> DD {
    let s7 = DD::from_f64(7.0).sqrt();
    let num = DD::from_f64(8.0) + s7.mul_f64(3.0);
    let den = DD::from_f64(8.0) - s7.mul_f64(3.0);
    -(DD::from_f64(8.0) / DD::from_f64(28.0).sqrt()) * (num / den).ln()
}

#[cfg(test)]
mod tests;
