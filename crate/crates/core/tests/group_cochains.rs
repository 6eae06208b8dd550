use cohomkit::exterior::{AltForm, BasedSpace};
use cohomkit::group_cochains::*;
use cohomkit::linalg::q;
use cohomkit::matrix_group::{identity, inverse, CMatrix};
use cohomkit::sampling::{random_gl, random_unitary, rng, DEFAULT_SAMPLES};
use cohomkit::vanest::{v_generator, QuadratureSpec};
use cohomkit::Error;
use proptest::prelude::*;
use rand::Rng;

/// A smooth, non-invariant test cochain mixing traces of products.
fn test_cochain(p: usize, n: usize, salt: f64) -> GroupCochain {
    GroupCochain::new(p, n, format!("poly{p}"), move |g| {
        let mut acc = salt;
        let mut prod = identity(n);
        for (i, m) in g.iter().enumerate() {
            prod *= m;
            acc += (i as f64 + salt) * m[(0, 0)].re - m[(n - 1, 0)].im * salt;
            acc += 0.1 * prod.trace().re;
        }
        Ok(acc)
    })
}

fn test_hom(p: usize, n: usize) -> HomogeneousCochain {
    HomogeneousCochain::new(p, n, move |h| {
        let mut acc = 0.0;
        for (i, m) in h.iter().enumerate() {
            acc += (i as f64 + 1.0) * m[(0, 0)].re + 0.5 * m[(0, n - 1)].im;
        }
        let mut prod = identity(n);
        for m in h {
            prod *= m;
        }
        Ok(acc + 0.1 * prod.trace().re)
    })
}

fn tuples(seed: u64, n: usize, arity: usize, count: usize) -> Vec<Vec<CMatrix>> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| (0..arity).map(|_| random_gl(&mut r, n)).collect())
        .collect()
}

fn scale_of(vals: &[f64]) -> f64 {
    1.0 + vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

#[test]
fn delta_squared_vanishes() {
    for p in 0..3 {
        let f = test_cochain(p, 2, 0.3);
        let ddf = coboundary(&coboundary(&f));
        for t in tuples(1 + p as u64, 2, p + 2, DEFAULT_SAMPLES) {
            let v = ddf.eval(&t).unwrap();
            let scale = scale_of(&[f.eval(&t[..p]).unwrap()]);
            assert!(v.abs() < 1e-9 * scale * 10.0, "p={p}: {v}");
        }
    }
}

#[test]
fn cup_leibniz() {
    for (p, q_) in [(1, 1), (1, 2), (2, 1)] {
        let f = test_cochain(p, 2, 0.7);
        let g = test_cochain(q_, 2, -0.4);
        let lhs = coboundary(&cup(&f, &g).unwrap());
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = cup(&coboundary(&f), &g)
            .unwrap()
            .add(&cup(&f, &coboundary(&g)).unwrap().scale(sign))
            .unwrap();
        for t in tuples(20, 2, p + q_ + 1, DEFAULT_SAMPLES) {
            let (a, b) = (lhs.eval(&t).unwrap(), rhs.eval(&t).unwrap());
            assert!((a - b).abs() < 1e-8 * scale_of(&[a, b]));
        }
    }
}

#[test]
fn cup_requires_same_group() {
    let f = test_cochain(1, 2, 0.1);
    let g = test_cochain(1, 3, 0.1);
    assert!(matches!(cup(&f, &g), Err(Error::SpaceMismatch(_))));
}

#[test]
fn normalization_degree_one_formula() {
    let f = test_hom(1, 2);
    let nf = normalize_n(&f);
    for t in tuples(3, 2, 2, 20) {
        let oracle = f.eval(&t).unwrap() - f.eval(&[t[0].clone(), t[0].clone()]).unwrap();
        assert_eq!(nf.eval(&t).unwrap(), oracle);
    }
}

#[test]
fn normalization_image_vanishes_exactly_on_repeats() {
    for p in 1..4 {
        let nf = normalize_n(&test_hom(p, 2));
        for mut t in tuples(4, 2, p + 1, 30) {
            for i in 0..p {
                let saved = t[i + 1].clone();
                t[i + 1] = t[i].clone();
                assert_eq!(nf.eval(&t).unwrap(), 0.0);
                t[i + 1] = saved;
            }
        }
    }
}

#[test]
fn normalization_fixes_normalized_cochains() {
    // Vanishes whenever consecutive entries agree.
    let f = HomogeneousCochain::new(2, 2, |h| {
        let a = (&h[0] - &h[1]).trace();
        let b = (&h[1] - &h[2]).determinant();
        Ok((a * b).re)
    });
    let nf = normalize_n(&f);
    for t in tuples(5, 2, 3, DEFAULT_SAMPLES) {
        let (x, y) = (f.eval(&t).unwrap(), nf.eval(&t).unwrap());
        assert!((x - y).abs() < 1e-12 * scale_of(&[x]));
    }
}

#[test]
fn hom_inhom_roundtrip_on_v1() {
    let v1 = v_generator(2, 1, &QuadratureSpec::default()).unwrap();
    let hom = inhom_to_hom(&v1);
    let back = hom_to_inhom(&hom, 1, 20).unwrap();
    for t in tuples(6, 2, 1, DEFAULT_SAMPLES) {
        assert!((back.eval(&t).unwrap() - v1.eval(&t).unwrap()).abs() < 1e-10);
    }
    // Degree 2 through a product-sensitive cochain.
    let f = test_cochain(2, 2, 0.2);
    let back = hom_to_inhom(&inhom_to_hom(&f), 2, 20).unwrap();
    for t in tuples(7, 2, 2, 30) {
        let (a, b) = (back.eval(&t).unwrap(), f.eval(&t).unwrap());
        assert!((a - b).abs() < 1e-9 * scale_of(&[a]));
    }
}

#[test]
fn hom_inhom_constants_and_degree_zero() {
    let c = HomogeneousCochain::constant(2, 2, 3.5);
    let f = hom_to_inhom(&c, 1, 10).unwrap();
    for t in tuples(8, 2, 2, 5) {
        assert_eq!(f.eval(&t).unwrap(), 3.5);
    }
    let f0 = GroupCochain::constant(2, -1.25);
    let h0 = inhom_to_hom(&f0);
    assert_eq!(h0.eval(&[random_gl(&mut rng(1), 2)]).unwrap(), -1.25);
    let back = hom_to_inhom(&h0, 1, 10).unwrap();
    assert_eq!(back.eval(&[]).unwrap(), -1.25);
}

#[test]
fn hom_to_inhom_rejects_non_invariant() {
    let r = hom_to_inhom(&test_hom(1, 2), 1, 20);
    assert!(matches!(r, Err(Error::NotInvariant(_))));
}

#[test]
fn eg_homotopy_identity() {
    // Degree ≥ 1: hδ + δh = 1.
    for p in 1..3 {
        let f = test_hom(p, 2);
        let lhs_a = eg_homotopy(&coboundary_hom(&f)).unwrap();
        let lhs_b = coboundary_hom(&eg_homotopy(&f).unwrap());
        for t in tuples(9, 2, p + 1, DEFAULT_SAMPLES) {
            let v = lhs_a.eval(&t).unwrap() + lhs_b.eval(&t).unwrap();
            let expect = f.eval(&t).unwrap();
            assert!((v - expect).abs() < 1e-9 * scale_of(&[expect]));
        }
    }
    // Degree 0: hδ = 1 − i∘p.
    let f = test_hom(0, 2);
    let hd = eg_homotopy(&coboundary_hom(&f)).unwrap();
    let ip = eg_ip(&f);
    for t in tuples(10, 2, 1, DEFAULT_SAMPLES) {
        let v = hd.eval(&t).unwrap();
        let expect = f.eval(&t).unwrap() - ip.eval(&t).unwrap();
        assert!((v - expect).abs() < 1e-9 * scale_of(&[expect]));
    }
}

#[test]
fn eg_homotopy_of_constant() {
    let f = HomogeneousCochain::constant(1, 2, 2.0);
    let h = eg_homotopy(&f).unwrap();
    assert_eq!(h.eval(&[random_gl(&mut rng(2), 2)]).unwrap(), -2.0);
}

#[test]
fn averaging_trivial_group_is_identity() {
    let f = test_cochain(2, 2, 0.5);
    let av = average_finite(&f, &[identity(2)]).unwrap();
    for t in tuples(11, 2, 2, 20) {
        assert_eq!(av.eval(&t).unwrap(), f.eval(&t).unwrap());
    }
}

#[test]
fn averaging_sign_group_fixes_v1() {
    let v1 = v_generator(2, 1, &QuadratureSpec::default()).unwrap();
    let k = sign_group(2);
    let av = average_finite(&v1, &k).unwrap();
    for t in tuples(12, 2, 1, DEFAULT_SAMPLES) {
        // Four-term average written out.
        let g = &t[0];
        let mut oracle = 0.0;
        for a0 in [1.0, -1.0] {
            for a1 in [1.0, -1.0] {
                oracle += (g * num_complex::Complex64::new(a0 * a1, 0.0)).determinant().norm().ln();
            }
        }
        oracle /= 4.0;
        let v = av.eval(&t).unwrap();
        assert!((v - oracle).abs() < 1e-10);
        assert!((v - v1.eval(&t).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn averaging_output_is_invariant_and_a_cochain_map() {
    let k = quaternion_group();
    let f = test_cochain(2, 2, 0.9);
    let av = average_finite(&f, &k).unwrap();
    let mut r = rng(13);
    for t in tuples(14, 2, 2, 20) {
        let ks: Vec<&CMatrix> = (0..3).map(|_| &k[r.random_range(0..k.len())]).collect();
        let moved: Vec<CMatrix> = (0..2)
            .map(|i| inverse(ks[i]).unwrap() * &t[i] * ks[i + 1])
            .collect();
        let (a, b) = (av.eval(&t).unwrap(), av.eval(&moved).unwrap());
        assert!((a - b).abs() < 1e-10 * scale_of(&[a]));
    }
    let f1 = test_cochain(1, 2, -0.3);
    let lhs = average_finite(&coboundary(&f1), &k).unwrap();
    let rhs = coboundary(&average_finite(&f1, &k).unwrap());
    for t in tuples(15, 2, 2, DEFAULT_SAMPLES) {
        let (a, b) = (lhs.eval(&t).unwrap(), rhs.eval(&t).unwrap());
        assert!((a - b).abs() < 1e-9 * scale_of(&[a]));
    }
}

#[test]
fn averaging_preserves_normalized_on_k_entries() {
    let v1 = v_generator(2, 1, &QuadratureSpec::default()).unwrap();
    let k = quaternion_group();
    let vv = cup(&v1, &v1).unwrap();
    let av = average_finite(&vv, &k).unwrap();
    for (i, t) in tuples(16, 2, 2, 20).into_iter().enumerate() {
        let mut t = t;
        t[i % 2] = k[i % k.len()].clone();
        assert!(av.eval(&t).unwrap().abs() < 1e-12);
    }
}

#[test]
fn averaging_rejects_non_subgroup() {
    let f = test_cochain(1, 2, 0.0);
    let bad = vec![identity(2), identity(2).scale(2.0)];
    assert!(matches!(average_finite(&f, &bad), Err(Error::NotSubgroup(_))));
}

fn model(k: IsoSubgroup) -> TransitiveModel {
    TransitiveModel::new(vec!["z".into(), "m1".into(), "m2".into()], 2, k).unwrap()
}

#[test]
fn ext_on_single_arrow() {
    let m = model(IsoSubgroup::Trivial);
    let f = test_cochain(1, 2, 0.4);
    let e = m.ext(&f, 1, 10).unwrap();
    let a = random_gl(&mut rng(3), 2);
    let arrow = Arrow::new(2, a.clone(), 1);
    assert_eq!(e.eval(&[arrow]).unwrap(), f.eval(&[a]).unwrap());
}

#[test]
fn restrict_after_ext_is_identity() {
    let m = model(IsoSubgroup::Trivial);
    for p in 0..3 {
        let f = test_cochain(p, 2, 0.6);
        let back = m.restrict(&m.ext(&f, 1, 10).unwrap());
        for t in tuples(17, 2, p, 30) {
            assert_eq!(back.eval(&t).unwrap(), f.eval(&t).unwrap());
        }
    }
}

#[test]
fn ext_after_restrict_on_invariant_cochains() {
    let m = model(IsoSubgroup::Unitary);
    let v1 = v_generator(2, 1, &QuadratureSpec::default()).unwrap();
    // Written on arrows directly: depends only on the matrices, U(2)-invariantly.
    let direct = ModelCochain::new(2, |g| {
        let a = g[0].a.determinant().norm().ln();
        let b = (&g[1].a * g[1].a.adjoint()).trace().re;
        Ok(a * b)
    });
    m.check_model_invariant(&direct, 1, 30).unwrap();
    let mut r = rng(18);
    let rt = m.ext(&m.restrict(&direct), 1, 10).unwrap();
    for _ in 0..30 {
        let s = m.random_string(&mut r, 2);
        assert_eq!(rt.eval(&s).unwrap(), direct.eval(&s).unwrap());
    }
    let ev1 = m.ext(&v1, 1, 10).unwrap();
    let rt1 = m.ext(&m.restrict(&ev1), 1, 10).unwrap();
    for _ in 0..30 {
        let s = m.random_string(&mut r, 1);
        assert_eq!(rt1.eval(&s).unwrap(), ev1.eval(&s).unwrap());
    }
}

#[test]
fn point_dependent_cochain_is_not_invariant() {
    let m = model(IsoSubgroup::Unitary);
    let f = ModelCochain::new(1, |g| Ok(g[0].target as f64 - g[0].source as f64));
    assert!(matches!(m.check_model_invariant(&f, 1, 30), Err(Error::NotInvariant(_))));
}

#[test]
fn ext_checks_isotropy_invariance() {
    let m = model(IsoSubgroup::Unitary);
    let f = test_cochain(1, 2, 0.3);
    assert!(matches!(m.ext(&f, 1, 20), Err(Error::NotInvariant(_))));
}

#[test]
fn ext_commutes_with_delta_and_cup() {
    let m = model(IsoSubgroup::Trivial);
    let f = test_cochain(1, 2, 0.8);
    let g = test_cochain(2, 2, -0.2);
    let ext_df = m.ext(&coboundary(&f), 1, 10).unwrap();
    let d_ext_f = coboundary_model(&m.ext(&f, 1, 10).unwrap());
    let ext_cup = m.ext(&cup(&f, &g).unwrap(), 1, 10).unwrap();
    let cup_ext = cup_model(&m.ext(&f, 1, 10).unwrap(), &m.ext(&g, 1, 10).unwrap());
    let mut r = rng(19);
    for _ in 0..DEFAULT_SAMPLES {
        let s = m.random_string(&mut r, 2);
        let (a, b) = (ext_df.eval(&s).unwrap(), d_ext_f.eval(&s).unwrap());
        assert!((a - b).abs() < 1e-9 * scale_of(&[a]));
        let s3 = m.random_string(&mut r, 3);
        let (a, b) = (ext_cup.eval(&s3).unwrap(), cup_ext.eval(&s3).unwrap());
        assert!((a - b).abs() < 1e-9 * scale_of(&[a]));
    }
}

#[test]
fn ext_preserves_normalized() {
    let m = model(IsoSubgroup::Unitary);
    let v1 = v_generator(2, 1, &QuadratureSpec::default()).unwrap();
    let e = m.ext(&v1, 1, 10).unwrap();
    let mut r = rng(20);
    for _ in 0..20 {
        let u = random_unitary(&mut r, 2);
        let arrow = Arrow::new(1, u, 2);
        assert!(e.eval(&[arrow]).unwrap().abs() < 1e-12);
    }
}

#[test]
fn model_strings_must_compose() {
    let m = model(IsoSubgroup::Trivial);
    let e = m.ext(&test_cochain(2, 2, 0.1), 1, 10).unwrap();
    let s = vec![Arrow::new(0, identity(2), 1), Arrow::new(2, identity(2), 0)];
    assert!(matches!(e.eval(&s), Err(Error::Precondition(_))));
}

#[test]
fn algebroid_ext_and_restrict() {
    let m = model(IsoSubgroup::Trivial);
    let sp = BasedSpace::new(4).unwrap();
    let a = AltForm::from_terms(&sp, 1, [(vec![0], q(1, 2)), (vec![3], q(-2, 1))]).unwrap();
    let b = AltForm::from_terms(&sp, 2, [(vec![1, 2], q(3, 1))]).unwrap();
    let ea = m.ext_algebroid(&a);
    let eb = m.ext_algebroid(&b);
    assert_eq!(m.restrict_algebroid(&ea).unwrap(), a);
    let wedge_ext: Vec<_> = ea.iter().zip(&eb).map(|(x, y)| x.wedge(y).unwrap()).collect();
    assert_eq!(wedge_ext, m.ext_algebroid(&a.wedge(&b).unwrap()));
    assert!(m.restrict_algebroid(&ea[..1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn delta_squared_random(seed in any::<u64>(), salt in -2.0f64..2.0) {
        let f = test_cochain(1, 2, salt);
        let ddf = coboundary(&coboundary(&f));
        let t = tuples(seed, 2, 3, 1).pop().unwrap();
        let v = ddf.eval(&t).unwrap();
        prop_assert!(v.abs() < 1e-8 * scale_of(&[f.eval(&t[..1]).unwrap()]));
    }

    #[test]
    fn normalized_repeat_is_exact_zero(seed in any::<u64>(), i in 0usize..2) {
        let nf = normalize_n(&test_hom(2, 2));
        let mut t = tuples(seed, 2, 3, 1).pop().unwrap();
        t[i + 1] = t[i].clone();
        prop_assert_eq!(nf.eval(&t).unwrap(), 0.0);
    }
}
