//! Acceptance criteria, one line each. Run with `cargo test --test acceptance`.

use greenfac::cli::{run, Command, RunConfig};
use greenfac::factor::{alt_exponent_check, rho_side_exponents, trace_slice};
use greenfac::finquad::{FQMElem, Genus, GenusChar};
use greenfac::greens::{
    cm_points, g2_i_z7_closed_form, green, laplacian_check, legendre_overlap_error, legendre_q,
    GreenParams, Point,
};
use greenfac::qfield::{element_ideal, FieldElem, QuadField};
use greenfac::real::DD;
use greenfac::thetacoef::{c_chi_lattice, identity_closed, identity_sum, ThetaCoeffs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::time::{Duration, Instant};

const DISCS: [i64; 4] = [12, 21, 28, 161];

/// Criteria whose failure is a recorded defect rather than a regression.
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
        notes: Vec::new(),
    }
}

fn exponents(v: &Value) -> Vec<(String, String, String)> {
    v["exponents"]
        .as_array()
        .map(|a| {
            a.iter()
                .map(|e| {
                    let s = |k: &str| e[k].as_str().unwrap_or_default().to_string();
                    (s("label"), s("e_num"), s("e_den"))
                })
                .collect()
        })
        .unwrap_or_default()
}

fn factorization_161() -> Outcome {
    let t0 = Instant::now();
    let out = run(&RunConfig::new(Command::Factor, 4, -7, -23, "1=1"));
    let elapsed = t0.elapsed();
    let got = exponents(&out.report);
    let want: Vec<(String, String, String)> =
        [("p_5", "2878"), ("p_17", "3580"), ("p'_19", "2628")]
            .iter()
            .map(|(l, e)| (l.to_string(), e.to_string(), "1".to_string()))
            .collect();
    let kappa = out.report["kappa"].as_str().unwrap_or_default().to_string();
    let pass = got == want && kappa == "1" && elapsed < Duration::from_secs(10);
    let shown: Vec<String> = got.iter().map(|(l, n, d)| format!("{l}^{n}/{d}")).collect();
    outcome(
        pass,
        format!(
            "exponents [{}], kappa {kappa}, {:.2?}",
            shown.join(" "),
            elapsed
        ),
    )
}

fn cycle_value_161() -> Outcome {
    let t0 = Instant::now();
    let out = run(&RunConfig::new(Command::Greens, 4, -7, -23, "1=1"));
    let elapsed = t0.elapsed();
    let v = out.report["value"].as_f64().unwrap_or(f64::NAN);
    let err = (v - -4.157888612785).abs();
    let pass = out.code == 0 && err < 1e-6 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "value {} (|diff| {err:.2e}), converged {}, {:.2?}",
            out.report["value_str"].as_str().unwrap_or("?"),
            out.report["converged"],
            elapsed
        ),
    )
}

fn verify_161() -> Outcome {
    let out = run(&RunConfig::new(Command::Verify, 4, -7, -23, "1=1"));
    let r = &out.report;
    let num = r["unit_power_conj"]["num"].as_i64();
    let den = r["unit_power_conj"]["den"].as_i64();
    let residual = r["residual"].as_f64().unwrap_or(f64::INFINITY);
    let bound = 1e-5 * 161f64.powf(1.5);
    let pass = out.code == 0 && num == Some(584) && den == Some(1) && residual < bound;
    outcome(
        pass,
        format!(
            "unit power on eps_F' {:?}/{:?}, residual {residual:.2e} < {bound:.2e}, exit {}",
            num, den, out.code
        ),
    )
}

fn weight_two() -> Outcome {
    let i = Point::from_f64(0.0, 1.0).unwrap();
    let z7 = cm_points(-7).unwrap()[0].z();
    let g = green(&i, &z7, &GreenParams::new(2, 1e-7, 30).unwrap()).unwrap();
    let err = (g.value - g2_i_z7_closed_form()).abs().to_f64();
    let out = run(&RunConfig::new(Command::Verify, 2, -4, -7, "1=1"));
    let r = &out.report;
    let empty = r["exponents"].as_array().is_some_and(|a| a.is_empty());
    let residual = r["residual"].as_f64().unwrap_or(f64::INFINITY);
    let pass = err < 1e-6 && g.converged && out.code == 0 && empty && residual < 1e-5;
    outcome(
        pass,
        format!(
            "|G_2(i,z_7) - closed form| {err:.2e}; verify: exponents empty {empty}, unit power {}/{}, residual {residual:.2e}",
            r["unit_power"]["num"], r["unit_power"]["den"]
        ),
    )
}

fn random_tp(rng: &mut ChaCha8Rng, f: &QuadField, max_norm: i64) -> FieldElem {
    loop {
        let mu = FieldElem::from_omega_coords(
            &rng.gen_range(-60i64..60).into(),
            &rng.gen_range(-6i64..6).into(),
            f.delta(),
        );
        if mu.is_totally_positive() && mu.norm().to_integer() <= max_norm.into() {
            return &mu * &f.eps_plus.pow(rng.gen_range(-1..=1));
        }
    }
}

fn counting_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let (mut elems, mut checks, mut bad) = (0, 0, Vec::new());
    for d in DISCS {
        let g = Genus::new(d).unwrap();
        let th = ThetaCoeffs::new(&g);
        for _ in 0..128 {
            let mu = random_tp(&mut rng, g.field(), 300);
            elems += 1;
            for chi in GenusChar::all_odd(d) {
                checks += 1;
                let rho = g.rho_kf(&chi, &element_ideal(&mu)) as i64;
                if th.big_c(&chi, &mu) != Ok(2 * rho) {
                    bad.push(format!("Δ={d} χ=({},{}) μ0={mu}", chi.delta1, chi.delta2));
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = bad.is_empty() && elems >= 500 && elapsed < Duration::from_secs(120);
    let mut o = outcome(
        pass,
        format!(
            "{elems} elements, {checks} checks, {} mismatches, {elapsed:.2?}",
            bad.len()
        ),
    );
    o.notes = bad.into_iter().take(5).collect();
    o
}

fn route_equality() -> Outcome {
    let (mut checks, mut nonzero, mut bad) = (0, 0, Vec::new());
    for d in DISCS {
        let g = Genus::new(d).unwrap();
        let th = ThetaCoeffs::new(&g);
        for chi in GenusChar::all(d) {
            for n in 1..=100 {
                for h in FQMElem::all(d) {
                    checks += 1;
                    let ide = th.c_chi(&chi, n, &h);
                    nonzero += usize::from(ide != 0);
                    if c_chi_lattice(&g, &chi, n, &h, &g.group.reps) != Ok(ide) {
                        bad.push(format!(
                            "Δ={d} χ=({},{}) n={n} {h:?}",
                            chi.delta1, chi.delta2
                        ));
                    }
                }
            }
        }
    }
    let mut o = outcome(
        bad.is_empty(),
        format!(
            "{checks} coefficients ({nonzero} nonzero), {} mismatches",
            bad.len()
        ),
    );
    o.notes = bad.into_iter().take(5).collect();
    o
}

fn property_suites() -> Outcome {
    let mut notes = Vec::new();
    let mut all = true;
    let mut note = |ok: bool, s: String| {
        all &= ok;
        notes.push(format!("{} {s}", if ok { "ok  " } else { "FAIL" }));
    };

    let mut id_bad = 0;
    for a in 0..=20 {
        for b in a..=20 {
            for eps in [1, -1] {
                id_bad += usize::from(identity_sum(a, b, eps) != identity_closed(a, b, eps));
            }
        }
    }
    note(
        id_bad == 0,
        format!("identity lemma, a <= b <= 20: {id_bad} mismatches"),
    );

    let mut worst: f64 = 0.0;
    for i in 0..=60 {
        let t = DD::from_f64(1.001 * (100.0f64 / 1.001).powf(f64::from(i) / 60.0));
        for n in 1..16u32 {
            let qm = legendre_q(n - 1, t).unwrap();
            let q = legendre_q(n, t).unwrap();
            let qp = legendre_q(n + 1, t).unwrap();
            let nf = f64::from(n);
            let res = qp.mul_f64(nf + 1.0) - (t * q).mul_f64(2.0 * nf + 1.0) + qm.mul_f64(nf);
            worst = worst.max((res / qp).abs().to_f64());
        }
    }
    let overlap = legendre_overlap_error(12);
    note(
        worst < 1e-12 && overlap < 1e-12,
        format!("Legendre Q recurrence residual {worst:.2e}, regime overlap (n <= 12) {overlap:.2e}"),
    );

    let z1 = Point::from_f64(0.31, 1.13).unwrap();
    let z2 = Point::from_f64(0.0, 2.0).unwrap();
    let step = 1e-3;
    let c = laplacian_check(&z1, &z2, 4, step, 200.0).unwrap();
    let c2 = laplacian_check(&z1, &z2, 4, 2.0 * step, 200.0).unwrap();
    let ratio = c2.relative_error / c.relative_error;
    note(
        c.eigenvalue == -12.0 && c.relative_error < 10.0 * step * step && (3.0..5.0).contains(&ratio),
        format!(
            "Laplacian eigenvalue {}: relative error {:.2e} at step {step}, ratio {ratio:.2} on doubling",
            c.eigenvalue, c.relative_error
        ),
    );

    // Every μ0 of the slices visited by the factorization runs above.
    let mut seen = 0;
    let mut bad = Vec::new();
    for (d1, d2) in [(-7i64, -23i64), (-4, -7)] {
        let delta = d1 * d2;
        let g = Genus::new(delta).unwrap();
        let chi = GenusChar::new(d1, d2).unwrap();
        for mu in trace_slice(1, delta).unwrap().elements() {
            seen += 1;
            let lit = alt_exponent_check(&g, &chi, &mu);
            let rho = rho_side_exponents(&g, &chi, &mu);
            if lit != rho {
                bad.push(format!(
                    "Δ={delta} μ0={mu}: literal {lit:?} vs ρ-side {rho:?}"
                ));
            }
        }
    }
    note(
        bad.is_empty(),
        format!(
            "divisor product equality over {seen} slice elements: {} mismatches",
            bad.len()
        ),
    );
    notes.extend(bad.into_iter().take(3).map(|s| format!("     {s}")));

    Outcome {
        pass: all,
        detail: "identity lemma, Legendre, Laplacian, divisor products".into(),
        notes,
    }
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 7] = [
        (1, "factorization for Delta = 161", factorization_161),
        (2, "G_4,f value on the (-7, -23) cycle", cycle_value_161),
        (3, "end-to-end verify for Delta = 161", verify_161),
        (4, "weight 2 closed form and unit-only verify", weight_two),
        (5, "counting oracle", counting_oracle),
        (6, "route equality", route_equality),
        (7, "property suites", property_suites),
    ];
    let mut failed = Vec::new();
    for (id, name, f) in criteria {
        let o = f();
        println!(
            "[{}] {id}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        for n in &o.notes {
            println!("        {n}");
        }
        if !o.pass {
            failed.push(id);
        }
    }
    let unexpected: Vec<u32> = failed
        .iter()
        .copied()
        .filter(|i| !KNOWN_FAILURES.contains(i))
        .collect();
    println!(
        "acceptance: {} of 7 passed; failed {failed:?}; unexpected failures {unexpected:?}",
        7 - failed.len()
    );
    if !unexpected.is_empty() {
        std::process::exit(1);
    }
}
