use super::*;
use proptest::prelude::*;

fn params(k: u32, tol: f64) -> GreenParams {
    GreenParams::new(k, tol, 30).unwrap()
}

fn z7() -> Point {
    cm_points(-7).unwrap()[0].z()
}

fn i_pt() -> Point {
    Point::from_f64(0.0, 1.0).unwrap()
}

#[test]
fn cm_point_lists() {
    let p4 = cm_points(-4).unwrap();
    assert_eq!(
        p4,
        vec![CMPoint {
            a: 1,
            b: 0,
            c: 1,
            disc: -4,
            w: 4
        }]
    );
    let p7 = cm_points(-7).unwrap();
    assert_eq!((p7[0].a, p7[0].b, p7[0].c, p7[0].w), (1, 1, 2, 2));
    let z = p7[0].z();
    assert_eq!(z.x.to_f64(), -0.5);
    assert!((z.y.to_f64() - 7f64.sqrt() / 2.0).abs() < 1e-15);
    let mut p23: Vec<_> = cm_points(-23)
        .unwrap()
        .iter()
        .map(|p| (p.a, p.b, p.c))
        .collect();
    p23.sort();
    assert_eq!(p23, vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
    for (d, h) in [
        (-3, 1),
        (-15, 2),
        (-20, 2),
        (-47, 5),
        (-71, 7),
        (-84, 4),
        (-163, 1),
        (-199, 9),
    ] {
        let pts = cm_points(d).unwrap();
        assert_eq!(pts.len(), h, "h({d})");
        assert!(pts
            .iter()
            .all(|p| p.is_reduced() && p.b * p.b - 4 * p.a * p.c == d));
    }
    assert!(matches!(cm_points(-12), Err(Error::InvalidInput(_))));
    assert!(matches!(cm_points(5), Err(Error::InvalidInput(_))));
}

#[test]
fn cycle_weights() {
    let c = CMCycle::new(-4, -7).unwrap();
    assert_eq!(c.pairs.len(), 1);
    assert_eq!(c.weight, (1, 2));
    let c = CMCycle::new(-7, -23).unwrap();
    assert_eq!(c.pairs.len(), 3);
    assert_eq!(c.weight, (1, 1));
    assert_eq!(CMCycle::new(-3, -4).unwrap().weight, (1, 6));
    assert!(CMCycle::new(-7, -7).is_err());
    assert!(CMCycle::new(-8, -4).is_err());
}

#[test]
fn q_small_cases() {
    let q0 = legendre_q(0, DD::from_f64(3.0)).unwrap();
    assert!((q0 - DD::LN2.mul_f64(0.5)).abs().to_f64() < 1e-30);
    // series regime at t = 3 against the closed form
    let c = legendre_q_closed(0, DD::from_f64(2.0));
    assert!((q0 - c).abs().to_f64() < 1e-30);
    assert!(matches!(
        legendre_q(1, DD::ONE),
        Err(Error::SingularInput(_))
    ));
    assert!(matches!(
        legendre_q(1, DD::from_f64(0.5)),
        Err(Error::SingularInput(_))
    ));
}

/// Trapezoid rule for the integral representation; the integrand is even and smooth, so the
/// rule converges geometrically.
fn q_quadrature(n: u32, t: f64) -> f64 {
    let s = f64::from(n + 1);
    let r = (t * t - 1.0).sqrt();
    let h: f64 = 1e-3;
    let mut sum = 0.5 * (t + r).powf(-s);
    let mut v = h;
    while v < 60.0 {
        sum += (t + r * v.cosh()).powf(-s);
        v += h;
    }
    sum * h
}

#[test]
fn q_matches_quadrature() {
    let t = 1.5;
    let q1 = legendre_q(1, DD::from_f64(t)).unwrap().to_f64();
    assert!((q1 - q_quadrature(1, t)).abs() < 1e-12);
    assert!((q1 - (t / 2.0 * 5f64.ln() - 1.0)).abs() < 1e-14);
    for (n, t) in [(0, 1.2), (3, 1.7), (3, 4.0), (5, 2.5), (2, 10.0)] {
        let q = legendre_q(n, DD::from_f64(t)).unwrap().to_f64();
        let o = q_quadrature(n, t);
        assert!(((q - o) / o).abs() < 1e-11, "n={n} t={t}: {q} vs {o}");
    }
}

#[test]
fn q_recurrence_grid() {
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        let t = DD::from_f64(1.01 * (50.0f64 / 1.01).powf(f64::from(i) / 40.0));
        for n in 1..10u32 {
            let qm = legendre_q(n - 1, t).unwrap();
            let q = legendre_q(n, t).unwrap();
            let qp = legendre_q(n + 1, t).unwrap();
            let nf = f64::from(n);
            let res = qp.mul_f64(nf + 1.0) - (t * q).mul_f64(2.0 * nf + 1.0) + qm.mul_f64(nf);
            worst = worst.max((res / qp).abs().to_f64());
        }
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn q_regimes_overlap() {
    assert!(legendre_overlap_error(12) < 1e-12);
}

#[test]
fn g_k_basics() {
    let a = i_pt();
    let b = Point::from_f64(0.0, 2.0).unwrap();
    let g = g_k(&a, &b, 2).unwrap();
    let expect = -legendre_q(1, DD::from_f64(1.25)).unwrap().mul_f64(2.0);
    assert!((g - expect).abs().to_f64() < 1e-30);
    assert!(matches!(g_k(&a, &a, 4), Err(Error::SingularInput(_))));
    let s = Point::from_f64(0.0, 1.0).unwrap().act([0, -1, 1, 0]);
    assert!(matches!(g_k(&a, &s, 4), Err(Error::SingularInput(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn g_k_symmetric(x1 in -2.0f64..2.0, y1 in 0.1f64..3.0, x2 in -2.0f64..2.0, y2 in 0.1f64..3.0, k in 1u32..8) {
        let a = Point::from_f64(x1, y1).unwrap();
        let b = Point::from_f64(x2, y2).unwrap();
        prop_assume!(a.cosh_dist_m1(&b).to_f64() > 1e-6);
        prop_assert_eq!(g_k(&a, &b, k).unwrap(), g_k(&b, &a, k).unwrap());
    }

    #[test]
    fn action_preserves_distance(x in -1.0f64..1.0, y in 0.2f64..2.0, n in -3i64..3) {
        let z = Point::from_f64(x, y).unwrap();
        let w = Point::from_f64(0.3, 0.7).unwrap();
        let g = [2 * n + 1, n, 2, 1];
        let d0 = z.cosh_dist_m1(&w);
        let d1 = z.act(g).cosh_dist_m1(&w.act(g));
        prop_assert!((d0 - d1).abs().to_f64() < 1e-25 * d0.to_f64().max(1.0));
    }
}

#[test]
fn params_validation() {
    assert!(GreenParams::new(4, 1e-6, 30).is_ok());
    assert!(matches!(
        GreenParams::new(3, 1e-6, 30),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        GreenParams::new(4, 1e-6, 14),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        GreenParams::new(4, 1e-40, 31),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        GreenParams::new(4, 0.0, 30),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        GreenParams::new(4, 1e-6, 40),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn complete_rows_are_unimodular() {
    for c in 1..30 {
        for d in -40..40 {
            if gcd(c, d) == 1 {
                let m = complete_row(c, d);
                assert_eq!(m[0] * m[3] - m[1] * m[2], 1);
                assert_eq!((m[2], m[3]), (c, d));
            }
        }
    }
}

#[test]
fn orbit_count_density() {
    // #{γ : cosh d(z1, γz2) <= T} ~ 6T
    let z1 = Point::from_f64(0.1, 1.3).unwrap();
    let z2 = Point::from_f64(-0.2, 0.9).unwrap();
    let n = orbit_points(&z1, &z2, 2000.0).unwrap().len() as f64;
    assert!((n / 12000.0 - 1.0).abs() < 0.02, "{n}");
    // every listed point is distinct
    let pts = orbit_points(&z1, &z2, 200.0).unwrap();
    for (w, g) in &pts {
        assert!((z2.act(*g).x - w.x).abs().to_f64() < 1e-25);
        assert_eq!(g[0] * g[3] - g[1] * g[2], 1);
    }
    let mut mats: Vec<_> = pts.iter().map(|(_, g)| *g).collect();
    mats.sort();
    mats.dedup();
    assert_eq!(mats.len(), pts.len());
}

#[test]
fn g2_closed_form() {
    let v = green(&i_pt(), &z7(), &params(2, 1e-6)).unwrap();
    assert!(v.converged);
    let c = g2_i_z7_closed_form();
    assert!((c.to_f64() + 8.371639078049345).abs() < 1e-12);
    assert!((v.value - c).abs().to_f64() < 1e-6, "{} vs {}", v.value, c);
}

#[test]
fn green_symmetric_and_invariant() {
    let p = params(4, 1e-9);
    let a = Point::from_f64(0.23, 1.17).unwrap();
    let b = Point::from_f64(-0.41, 0.95).unwrap();
    let ab = green(&a, &b, &p).unwrap().value;
    let ba = green(&b, &a, &p).unwrap().value;
    assert!((ab - ba).abs().to_f64() < 1e-9);
    for g in [
        [1, 1, 0, 1],
        [0, -1, 1, 0],
        [2, 1, 1, 1],
        [1, -2, -1, 3],
        [5, 2, 2, 1],
    ] {
        let v = green(&a.act(g), &b, &p).unwrap().value;
        assert!((v - ab).abs().to_f64() < 1e-9, "{g:?}");
    }
}

#[test]
fn hecke_m1_is_plain_sum() {
    let a = Point::from_f64(0.1, 1.4).unwrap();
    let b = Point::from_f64(0.3, 0.8).unwrap();
    let p = params(4, 1e-8);
    let h = green_hecke(&a, &b, 1, &p).unwrap();
    assert_eq!(h.value, green_at_radius(&a, &b, 4, h.radius).unwrap());
    assert_eq!(hecke_cosets(1), vec![[1, 0, 0, 1]]);
    assert_eq!(hecke_cosets(4).len(), 7);
    assert_eq!(hecke_cosets(6).len(), 12);
}

#[test]
fn hecke_self_adjoint() {
    let a = Point::from_f64(0.1, 1.4).unwrap();
    let b = Point::from_f64(0.3, 0.8).unwrap();
    let p = params(4, 1e-8);
    for m in [2, 3] {
        let ab = green_hecke(&a, &b, m, &p).unwrap().value;
        let ba = green_hecke(&b, &a, m, &p).unwrap().value;
        assert!((ab - ba).abs().to_f64() < 1e-7, "m={m}: {ab} {ba}");
    }
}

#[test]
fn laplacian_eigenvalue() {
    let z1 = Point::from_f64(0.31, 1.13).unwrap();
    let z2 = Point::from_f64(0.0, 2.0).unwrap();
    let c = laplacian_check(&z1, &z2, 4, 1e-3, 200.0).unwrap();
    assert_eq!(c.eigenvalue, -12.0);
    assert!(c.relative_error < 1e-5, "{c:?}");
    let c2 = laplacian_check(&z1, &z2, 4, 2e-3, 200.0).unwrap();
    // error scales like step^2
    assert!(c2.relative_error > 2.0 * c.relative_error);
}

#[test]
fn singular_configurations() {
    let p = params(4, 1e-6);
    let z = z7();
    match green(&z, &z, &p) {
        Err(Error::SingularConfiguration(msg)) => assert!(msg.contains("[[")),
        other => panic!("{other:?}"),
    }
    let w = z.act([2, 1, 1, 1]);
    assert!(matches!(
        green(&w, &z, &p),
        Err(Error::SingularConfiguration(_))
    ));
    // i = T_2-image of 2i via (1 0; 0 2)
    let two_i = Point::from_f64(0.0, 2.0).unwrap();
    assert!(matches!(
        green_hecke(&i_pt(), &two_i, 2, &p),
        Err(Error::SingularConfiguration(_))
    ));
}

#[test]
fn cycle_value_161() {
    let pp: PrincipalPart = "1=1".parse().unwrap();
    let v = green_kf_at_cycle(&pp, -7, -23, &params(4, 1e-8)).unwrap();
    assert!(v.converged);
    assert!((v.to_f64() + 4.157888612785).abs() < 1e-6, "{}", v.value);
}

#[test]
fn k2_cycle_is_half_closed_form() {
    let pp: PrincipalPart = "1=1".parse().unwrap();
    let v = green_kf_at_cycle(&pp, -4, -7, &params(2, 1e-6)).unwrap();
    let c = g2_i_z7_closed_form().mul_f64(0.5);
    assert!((v.value - c).abs().to_f64() < 1e-6);
}

#[test]
fn cycle_linear_in_principal_part() {
    let p = params(2, 1e-6);
    let a: PrincipalPart = "1=1".parse().unwrap();
    let b: PrincipalPart = "2=-1/3".parse().unwrap();
    let va = green_kf_at_cycle(&a, -3, -8, &p).unwrap().value;
    let vb = green_kf_at_cycle(&b, -3, -8, &p).unwrap().value;
    let vab = green_kf_at_cycle(&a.add(&b).unwrap(), -3, -8, &p)
        .unwrap()
        .value;
    assert!((vab - va - vb).abs().to_f64() < 2.0 * p.tol);
}

#[test]
fn obstructed_principal_part_rejected() {
    let pp: PrincipalPart = "1=1".parse().unwrap();
    assert!(matches!(
        green_kf_at_cycle(&pp, -4, -7, &params(12, 1e-6)),
        Err(Error::InvalidInput(_))
    ));
    assert!(matches!(
        green_kf_at_cycle(&pp, -7, -7, &params(4, 1e-6)),
        Err(Error::InvalidInput(_))
    ));
}

#[test]
fn truncation_stability() {
    let a = Point::from_f64(0.2, 1.1).unwrap();
    let b = z7();
    let coarse = green(&a, &b, &params(4, 1e-6)).unwrap().value;
    let fine = green(&a, &b, &params(4, 5e-7)).unwrap().value;
    assert!((coarse - fine).abs().to_f64() < 1e-6);
}
