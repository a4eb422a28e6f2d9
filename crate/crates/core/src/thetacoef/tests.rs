use super::*;
use crate::arith;
use crate::finquad::{d_of, ramified_ideal, GDeltaElem};
use crate::qfield::Splitting;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn genus(d: i64) -> Genus {
    Genus::new(d).unwrap()
}

fn consistent(h: &FQMElem, n: i64) -> bool {
    (h.q_numerator() + n).rem_euclid(h.disc) == 0
}

#[test]
fn identity_lemma_exhaustive() {
    for a in 0..=20 {
        for b in a..=20 {
            for eps in [1, -1] {
                assert_eq!(
                    identity_sum(a, b, eps),
                    identity_closed(a, b, eps),
                    "a={a} b={b} ε={eps}"
                );
            }
        }
    }
}

#[test]
fn lattice_rejects_bad_input() {
    let f = QuadField::new(12).unwrap();
    let one = f.unit_ideal();
    let h = FieldElem::from_int(0, 12);
    assert!(c_lattice(&f, &one, &BigRational::zero(), &h).is_err());
    let outside = FieldElem::from_ints(0, 1, 12)
        .inv()
        .scale(&BigRational::new(1.into(), 2.into()));
    assert!(c_lattice(&f, &one, &BigRational::one(), &outside).is_err());
}

#[test]
fn lattice_antisymmetry_and_box_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut nonzero = 0;
    for &d in &[12, 21, 28, 40, 161] {
        let f = QuadField::new(d).unwrap();
        let ideals: Vec<FracIdeal> = (1..12).flat_map(|n| ideals_of_norm(&f, n)).collect();
        for _ in 0..25 {
            let a = &ideals[rng.gen_range(0..ideals.len())];
            let an = a.norm().to_integer().to_i64().unwrap();
            let lam = FieldElem::from_omega_coords(
                &rng.gen_range(-9i64..9).into(),
                &rng.gen_range(-9i64..9).into(),
                d,
            )
            .div(&FieldElem::sqrt_disc(d))
                * FieldElem::from_int(an, d);
            if lam.is_zero() {
                continue;
            }
            let m = lam.norm().abs() / BigRational::from_integer(an.into());
            let count = |l: &FieldElem, w: i64| {
                if lam.norm().is_positive() {
                    c_lattice_widened(&f, a, &m, l, w).unwrap()
                } else {
                    c_minus_lattice_widened(&f, a, &m, l, w).unwrap()
                }
            };
            let c = count(&lam, 1);
            assert_eq!(count(&-lam.clone(), 1), -c);
            assert_eq!(count(&lam, 2), c);
            // λ ↦ −λ′ preserves a Galois-stable coset and flips signs of positive-norm vectors
            if lam.norm().is_positive() && a.conj() == *a {
                assert_eq!(c, 0);
            }
            if a.contains(&(&lam + &lam)) {
                assert_eq!(c, 0);
            }
            nonzero += usize::from(c != 0);
        }
    }
    assert!(nonzero > 5);
}

#[test]
fn routes_agree_and_chi_properties() {
    for &d in &[12, 21, 28, 161] {
        let g = genus(d);
        let th = ThetaCoeffs::new(&g);
        let reps = g.group.reps.clone();
        let mut nonzero = 0;
        for chi in GenusChar::all(d) {
            for n in 1..=100 {
                for h in FQMElem::all(d) {
                    let lat = c_chi_lattice(&g, &chi, n, &h, &reps).unwrap();
                    let ide = th.c_chi(&chi, n, &h);
                    assert_eq!(lat, ide, "Δ={d} {chi:?} n={n} {h:?}");
                    if !chi.is_odd() || !consistent(&h, n) {
                        assert_eq!(ide, 0);
                    }
                    assert_eq!(th.c_chi(&chi, n, &h.neg()), -ide);
                    nonzero += usize::from(ide != 0);
                }
            }
        }
        assert!(nonzero > 10, "Δ={d}: only {nonzero} nonzero coefficients");
    }
}

/// Another prime in each narrow class, different from the stored representative.
fn alternative_reps(g: &Genus) -> Vec<FracIdeal> {
    let f = g.field();
    (0..g.group.order())
        .map(|k| {
            arith::primes_up_to(5000)
                .into_iter()
                .filter(|&p| f.splitting(p) == Splitting::Split)
                .flat_map(|p| f.primes_above(p))
                .find(|q| g.group.class_of(q) == k && *q != g.group.reps[k])
                .unwrap()
        })
        .collect()
}

#[test]
fn lattice_route_independent_of_representatives() {
    for &d in &[21, 60, 161] {
        let g = genus(d);
        let alt = alternative_reps(&g);
        for chi in GenusChar::all_odd(d) {
            for n in 1..=30 {
                for h in FQMElem::all(d).into_iter().filter(|h| consistent(h, n)) {
                    let a = c_chi_lattice(&g, &chi, n, &h, &g.group.reps).unwrap();
                    let b = c_chi_lattice(&g, &chi, n, &h, &alt).unwrap();
                    assert_eq!(a, b, "Δ={d} n={n} {h:?}");
                }
            }
        }
        assert!(c_chi_lattice(
            &g,
            &GenusChar::all(d)[0],
            1,
            &FQMElem::zero(d),
            &g.group.reps[..1]
        )
        .is_err());
    }
}

#[test]
fn vanishing_at_ramified_primes() {
    for &d in &[12, 21, 28, 60, 140, 161] {
        let g = genus(d);
        let th = ThetaCoeffs::new(&g);
        for chi in GenusChar::all_odd(d) {
            for p in arith::prime_divisors(d) {
                if g.chi_ramified(&chi, p) != -1 {
                    continue;
                }
                for h in FQMElem::all(d).into_iter().filter(|h| d_of(h).0 % p == 0) {
                    for n in (1..=60).filter(|&n| consistent(&h, n)) {
                        assert_eq!(th.c_chi(&chi, n, &h), 0, "Δ={d} p={p} {h:?} n={n}");
                    }
                }
            }
        }
    }
}

#[test]
fn scaling_by_inert_and_ramified_primes() {
    for &d in &[12, 21, 28, 161] {
        let g = genus(d);
        let f = g.field();
        let th = ThetaCoeffs::new(&g);
        let inert: Vec<i64> = arith::primes_up_to(12)
            .into_iter()
            .filter(|&l| f.splitting(l) == Splitting::Inert)
            .collect();
        for chi in GenusChar::all_odd(d) {
            for h in FQMElem::all(d) {
                for n in (1..=25).filter(|&n| consistent(&h, n)) {
                    let base = th.c_chi(&chi, n, &h);
                    for &l in &inert {
                        assert_eq!(th.c_chi(&chi, l * l * n, &h.scale(l)), base);
                    }
                    for l in arith::prime_divisors(d) {
                        let scaled = th.c_chi(&chi, l * l * n, &h.scale(l));
                        if n % l == 0 {
                            assert_eq!(scaled, base, "Δ={d} ℓ={l} n={n} {h:?}");
                        } else {
                            let chi_l = i64::from(g.chi_ramified(&chi, l));
                            assert_eq!(scaled, (1 + chi_l) * base, "Δ={d} ℓ={l} n={n} {h:?}");
                        }
                    }
                }
            }
        }
    }
}

fn random_tp(rng: &mut ChaCha8Rng, f: &QuadField, max_norm: i64) -> FieldElem {
    loop {
        let mu = FieldElem::from_omega_coords(
            &rng.gen_range(-60i64..60).into(),
            &rng.gen_range(-6i64..6).into(),
            f.delta(),
        );
        if !mu.is_totally_positive() {
            continue;
        }
        let n = mu.norm().to_integer();
        if n <= max_norm.into() {
            // spread over the unit orbit as well
            let k = rng.gen_range(-1..=1);
            return &mu * &f.eps_plus.pow(k);
        }
    }
}

#[test]
fn counting_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &d in &[12, 21, 28, 161] {
        let g = genus(d);
        let th = ThetaCoeffs::new(&g);
        let one = FieldElem::one(d);
        for chi in GenusChar::all_odd(d) {
            assert_eq!(th.big_c(&chi, &one).unwrap(), 2);
            for _ in 0..60 {
                let mu = random_tp(&mut rng, g.field(), 300);
                let rho = g.rho_kf(&chi, &crate::qfield::element_ideal(&mu));
                assert_eq!(
                    th.big_c(&chi, &mu).unwrap(),
                    2 * rho as i64,
                    "Δ={d} μ0={mu}"
                );
            }
        }
    }
}

#[test]
fn table_is_ordered_and_serializes() {
    let g = genus(28);
    let th = ThetaCoeffs::new(&g);
    let chi = GenusChar::all_odd(28)[0];
    let t = th.table(&chi, 20);
    assert!(t
        .entries
        .windows(2)
        .all(|w| (w[0].n, w[0].h) < (w[1].n, w[1].h)));
    let js = serde_json::to_value(&t).unwrap();
    assert_eq!(js["Delta"], 28);
    assert_eq!(js["chi"][0], chi.delta1);
    let back: CoeffTable = serde_json::from_value(js).unwrap();
    assert_eq!(back, t);
}

#[test]
fn unit_ideal_first_coefficient() {
    // c_χ(1/Δ, 1/√Δ) = 2 for every odd χ
    for &d in &[12, 21, 28, 161] {
        let g = genus(d);
        let h = FQMElem::new(1, 0, d);
        for chi in GenusChar::all_odd(d) {
            assert_eq!(c_chi_ideal(&g, &chi, 1, &h), 2);
            let d0_ok = ramified_ideal(g.field(), GDeltaElem(g.d0.0));
            assert!(g.field().is_narrowly_principal(&d0_ok));
        }
    }
}
