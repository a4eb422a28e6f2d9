use crate::arith;
use crate::factor::{complementary_exponent_check, rho_side_exponents};
use crate::finquad::{d0, sigma_d, sigma_p, FQMElem, Genus, GenusChar};
use crate::greens::{legendre_q, legendre_q_closed, legendre_q_series};
use crate::qfield::{element_ideal, ideals_of_norm, FieldElem, QuadField};
use crate::real::DD;
use crate::thetacoef::{c_chi_ideal, c_chi_lattice, identity_closed, identity_sum, ThetaCoeffs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

const COUNT_DISCS: [i64; 4] = [12, 21, 28, 161];
const GENUS_DISCS: [i64; 10] = [5, 8, 12, 21, 28, 40, 60, 105, 161, 168];
const MAX_LISTED_FAILURES: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Hash of the serialized instance list.
    pub digest: String,
    /// The first few failing instances, replayable from their fields.
    pub failures: Vec<Value>,
}

struct Suite {
    name: &'static str,
    hasher: DefaultHasher,
    report: SuiteReport,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            hasher: DefaultHasher::new(),
            report: SuiteReport {
                name,
                cases: 0,
                passed: 0,
                failed: 0,
                digest: String::new(),
                failures: Vec::new(),
            },
        }
    }

    fn record(&mut self, instance: Value, ok: bool) {
        instance.to_string().hash(&mut self.hasher);
        self.report.cases += 1;
        if ok {
            self.report.passed += 1;
        } else {
            self.report.failed += 1;
            if self.report.failures.len() < MAX_LISTED_FAILURES {
                self.report
                    .failures
                    .push(json!({ "suite": self.name, "instance": instance }));
            }
        }
    }

    fn finish(mut self) -> SuiteReport {
        self.report.digest = format!("{:016x}", self.hasher.finish());
        self.report
    }
}

/// Runs every property suite on instances drawn from `seed`.
pub fn run_suites(seed: u64, quick: bool) -> Vec<SuiteReport> {
    let scale = if quick { 5 } else { 1 };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genera: BTreeMap<i64, Genus> = GENUS_DISCS
        .iter()
        .map(|&d| {
            (
                d,
                Genus::new(d).expect("listed discriminants are fundamental"),
            )
        })
        .collect();
    vec![
        counting(&mut rng, &genera, 600 / scale),
        routes(&mut rng, &genera, 300 / scale),
        identity(&mut rng, 500 / scale),
        legendre(&mut rng, 500 / scale),
        genus_theory(&mut rng, &genera, 300 / scale),
        divisor_products(&mut rng, &genera, 200 / scale),
    ]
}

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    xs[rng.gen_range(0..xs.len())]
}

fn random_tp(rng: &mut ChaCha8Rng, f: &QuadField, max_norm: i64) -> FieldElem {
    loop {
        let mu = FieldElem::from_omega_coords(
            &rng.gen_range(-60i64..60).into(),
            &rng.gen_range(-6i64..6).into(),
            f.delta(),
        );
        if !mu.is_totally_positive() || mu.norm().to_integer() > max_norm.into() {
            continue;
        }
        let k = rng.gen_range(-1..=1);
        return &mu * &f.eps_plus.pow(k);
    }
}

fn elem_json(mu: &FieldElem) -> Value {
    let (u, v) = mu.omega_coords().expect("integral");
    json!({ "omega_coords": [u.to_string(), v.to_string()] })
}

fn chi_json(chi: &GenusChar) -> Value {
    json!([chi.delta1, chi.delta2])
}

/// C_χ(μ0) = 2ρ((μ0)) for totally positive μ0.
fn counting(rng: &mut ChaCha8Rng, genera: &BTreeMap<i64, Genus>, n: usize) -> SuiteReport {
    let mut s = Suite::new("counting");
    let coeffs: BTreeMap<i64, ThetaCoeffs> = COUNT_DISCS
        .iter()
        .map(|d| (*d, ThetaCoeffs::new(&genera[d])))
        .collect();
    for _ in 0..n {
        let d = pick(rng, &COUNT_DISCS);
        let g = &genera[&d];
        let chis = GenusChar::all_odd(d);
        let chi = chis[rng.gen_range(0..chis.len())];
        let mu = random_tp(rng, g.field(), 300);
        let lhs = coeffs[&d].big_c(&chi, &mu);
        let rhs = 2 * g.rho_kf(&chi, &element_ideal(&mu)) as i64;
        let inst = json!({ "Delta": d, "chi": chi_json(&chi), "mu0": elem_json(&mu), "rho2": rhs });
        s.record(inst, lhs == Ok(rhs));
    }
    s.finish()
}

/// Lattice and ideal routes to c_χ(n/Δ, h).
fn routes(rng: &mut ChaCha8Rng, genera: &BTreeMap<i64, Genus>, n: usize) -> SuiteReport {
    let mut s = Suite::new("routes");
    for _ in 0..n {
        let d = pick(rng, &COUNT_DISCS);
        let g = &genera[&d];
        let chis = GenusChar::all_odd(d);
        let chi = chis[rng.gen_range(0..chis.len())];
        let h = FQMElem::new(rng.gen_range(0..d), rng.gen_range(0..2), d);
        let base = (-h.q_numerator()).rem_euclid(d);
        let base = if base == 0 { d } else { base };
        let m = base + d * rng.gen_range(0..=(100 - base).max(0) / d);
        let lat = c_chi_lattice(g, &chi, m, &h, &g.group.reps);
        let ide = c_chi_ideal(g, &chi, m, &h);
        let inst = json!({ "Delta": d, "chi": chi_json(&chi), "n": m, "h": [h.a, h.b] });
        s.record(inst, lat == Ok(ide));
    }
    s.finish()
}

fn identity(rng: &mut ChaCha8Rng, n: usize) -> SuiteReport {
    let mut s = Suite::new("identity");
    for _ in 0..n {
        let b = rng.gen_range(0..=40i64);
        let a = rng.gen_range(0..=b);
        let eps = pick(rng, &[1i64, -1]);
        let inst = json!({ "a": a, "b": b, "eps": eps });
        s.record(inst, identity_sum(a, b, eps) == identity_closed(a, b, eps));
    }
    s.finish()
}

/// Three-term recurrence of Q_n and agreement of the two regimes near the switch.
fn legendre(rng: &mut ChaCha8Rng, n: usize) -> SuiteReport {
    let mut s = Suite::new("legendre");
    for i in 0..n {
        let deg = rng.gen_range(1..12u32);
        let ok;
        let inst;
        if i % 2 == 0 {
            let t = DD::from_f64(1.0 + rng.gen_range(1e-3..60.0f64));
            let r = (|| -> crate::Result<f64> {
                let qm = legendre_q(deg - 1, t)?;
                let q = legendre_q(deg, t)?;
                let qp = legendre_q(deg + 1, t)?;
                let nf = f64::from(deg);
                let res = qp.mul_f64(nf + 1.0) - (t * q).mul_f64(2.0 * nf + 1.0) + qm.mul_f64(nf);
                Ok((res / qp).abs().to_f64())
            })();
            ok = matches!(r, Ok(x) if x < 1e-12);
            inst = json!({ "check": "recurrence", "n": deg, "t": t.to_f64() });
        } else {
            let t = DD::from_f64(rng.gen_range(1.8..2.2f64));
            let a = legendre_q_closed(deg, t - DD::ONE);
            let b = legendre_q_series(deg, t);
            ok = ((a - b) / b).abs().to_f64() < 1e-12;
            inst = json!({ "check": "overlap", "n": deg, "t": t.to_f64() });
        }
        s.record(inst, ok);
    }
    s.finish()
}

/// σ_p isometric involutions, ε_F^+ acting as σ_{d0}, and ρ as a character sum over divisors.
fn genus_theory(rng: &mut ChaCha8Rng, genera: &BTreeMap<i64, Genus>, n: usize) -> SuiteReport {
    let mut s = Suite::new("genus");
    for i in 0..n {
        let d = pick(rng, &GENUS_DISCS);
        let g = &genera[&d];
        let f = g.field();
        match i % 3 {
            0 => {
                let ps = arith::prime_divisors(d);
                let p = pick(rng, &ps);
                let h = FQMElem::new(rng.gen_range(0..d), rng.gen_range(0..2), d);
                let ok = match sigma_p(&h, p) {
                    Ok(x) => x.q() == h.q() && sigma_p(&x, p) == Ok(h),
                    Err(_) => false,
                };
                s.record(
                    json!({ "check": "sigma_p", "Delta": d, "p": p, "h": [h.a, h.b] }),
                    ok,
                );
            }
            1 => {
                let h = FQMElem::new(rng.gen_range(0..d), rng.gen_range(0..2), d);
                let ok = h.mul_elem(&f.eps_plus) == sigma_d(&h, d0(f));
                s.record(
                    json!({ "check": "eps_plus", "Delta": d, "h": [h.a, h.b] }),
                    ok,
                );
            }
            _ => {
                let chis = GenusChar::all(d);
                let chi = chis[rng.gen_range(0..chis.len())];
                let norm = rng.gen_range(1..=200i64);
                let ideals = ideals_of_norm(f, norm);
                if ideals.is_empty() {
                    s.record(
                        json!({ "check": "rho", "Delta": d, "norm": norm, "empty": true }),
                        true,
                    );
                    continue;
                }
                let a = &ideals[rng.gen_range(0..ideals.len())];
                let ok = g.rho_kf(&chi, a) as i64 == g.rho_kf_divisor_sum(&chi, a);
                let (_, hnf) = a.hnf();
                let hnf: Vec<String> = hnf.iter().map(|x| x.to_string()).collect();
                s.record(
                    json!({ "check": "rho", "Delta": d, "chi": chi_json(&chi), "hnf": hnf }),
                    ok,
                );
            }
        }
    }
    s.finish()
}

/// The complementary divisor product matches the ρ-side product.
fn divisor_products(rng: &mut ChaCha8Rng, genera: &BTreeMap<i64, Genus>, n: usize) -> SuiteReport {
    let mut s = Suite::new("divisor-product");
    for _ in 0..n {
        let d = pick(rng, &COUNT_DISCS);
        let g = &genera[&d];
        let chis = GenusChar::all_odd(d);
        let chi = chis[rng.gen_range(0..chis.len())];
        let mu = random_tp(rng, g.field(), 200);
        let ok = complementary_exponent_check(g, &chi, &mu) == rho_side_exponents(g, &chi, &mu);
        s.record(
            json!({ "Delta": d, "chi": chi_json(&chi), "mu0": elem_json(&mu) }),
            ok,
        );
    }
    s.finish()
}
