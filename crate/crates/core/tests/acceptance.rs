//! Acceptance battery. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cohomkit::char_classes::*;
use cohomkit::exterior::{AltForm, BasedSpace};
use cohomkit::group_cochains::*;
use cohomkit::homology_engine::*;
use cohomkit::lie_algebra::*;
use cohomkit::linalg::{exact_rank, Matrix, Scalar, Q};
use cohomkit::matrix_group::{identity, CMatrix};
use cohomkit::sampling::{random_direction, random_gl, random_unitary, rng};
use cohomkit::vanest::*;
use cohomkit::{Exec, Result};
use rand::Rng;

const SEED: u64 = 42;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict { ok, detail: detail.into() })
}

fn scale_of(vals: &[f64]) -> f64 {
    1.0 + vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

fn gl_tuples(seed: u64, n: usize, arity: usize, count: usize) -> Vec<Vec<CMatrix>> {
    let mut r = rng(seed);
    (0..count).map(|_| (0..arity).map(|_| random_gl(&mut r, n)).collect()).collect()
}

/// `log|det A|` straight from the LU determinant.
fn log_abs_det(a: &CMatrix) -> f64 {
    a.determinant().norm().ln()
}

fn c1_betti() -> Result<Verdict> {
    let opts = AssemblyOptions::default();
    let b1 = betti(&LieAlgebra::gl_complex(1)?, opts)?;
    let b2 = betti(&LieAlgebra::gl_complex(2)?, opts)?;
    let ok = b1 == [1, 2, 1] && b2 == [1, 2, 1, 2, 4, 2, 1, 2, 1];
    verdict(ok, format!("gl1C {b1:?}, gl2C {b2:?}"))
}

fn c2_relative() -> Result<Verdict> {
    let g = LieAlgebra::gl_complex(2)?;
    let k = Subalgebra::unitary(&g, 2)?;
    let basic = basic_subcomplex(&g, &k, AssemblyOptions::default())?;
    let b = basic.complex.betti(Exec::default());
    let zero = basic.complex.has_zero_differential();
    verdict(b == [1, 1, 0, 1, 1] && zero, format!("{b:?}, zero differential {zero}"))
}

fn c3_generators() -> Result<Verdict> {
    let g = LieAlgebra::gl_complex(2)?;
    let k = Subalgebra::unitary(&g, 2)?;
    let mut notes = Vec::new();
    let mut ok = true;
    for q in [1, 2] {
        let u = u_generator(2, q)?.form;
        let p = u.degree();
        let horizontal = is_horizontal(&k, &u)?;
        let invariant = is_invariant(&g, &k, &u)?;
        let closed = ce_differential(&g, &u)?.is_zero();
        // Rank witness: appending u to the columns of d_{p−1} raises the rank.
        let d = operator_matrix(g.space(), p - 1, p, Exec::default(), |f| ce_differential(&g, f))?;
        let with_u = d.hstack(&Matrix::from_columns(d.rows(), &[u.to_dense()]));
        let not_exact = exact_rank(&with_u) == exact_rank(&d) + 1;
        ok &= horizontal && invariant && closed && not_exact && !u.is_zero();
        notes.push(format!("u{p}: h={horizontal} inv={invariant} closed={closed} witness={not_exact}"));
    }
    verdict(ok, notes.join("; "))
}

fn c4_v1() -> Result<Verdict> {
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut worst_delta: f64 = 0.0;
    for n in [2, 3] {
        let v1 = v_generator(n, 1, &spec)?;
        for t in gl_tuples(SEED + n as u64, n, 1, 100) {
            worst = worst.max((v1.eval(&t)? - log_abs_det(&t[0])).abs());
        }
        let dv1 = coboundary(&v1);
        for t in gl_tuples(SEED + 10 + n as u64, n, 2, 100) {
            worst_delta = worst_delta.max(dv1.eval(&t)?.abs());
        }
    }
    verdict(
        worst < 1e-9 && worst_delta < 1e-9,
        format!("max |v1 − log|det|| = {worst:.2e}, max |δv1| = {worst_delta:.2e}"),
    )
}

fn c5_ve_r() -> Result<Verdict> {
    let spec = QuadratureSpec::default();
    let u1 = u_generator(2, 1)?;
    let basic = BasicForm::from_generator(&u1)?;
    let r_u1 = GroupCochain::new(1, 2, "R(u1)", move |a| basic.integrate(a, &QuadratureSpec::default()));
    let u1f = u1.form.to_f64();
    let mut r = rng(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let xi = random_direction(&mut r, 2);
        // u1 = Re tr, read off directly.
        let oracle = xi[gl_index(2, 0, 0, false)] + xi[gl_index(2, 1, 1, false)];
        let u_val = u1f.eval(&[xi.clone()])?;
        let ve = ve_differentiate(&r_u1, &[xi], &spec)?;
        worst = worst.max((ve - u_val).abs()).max((u_val - oracle).abs());
    }
    verdict(worst < 1e-5, format!("max residual {worst:.2e} over 50 directions"))
}

fn c6_v3() -> Result<Verdict> {
    let spec = QuadratureSpec::default();
    let v3 = v_generator(2, 2, &spec)?;
    let dv3 = coboundary(&v3);
    let tuples = gl_tuples(SEED, 2, 4, 20);
    let delta = max_residual(Exec::default(), &tuples, |t| dv3.eval(t).map(f64::abs))?;
    let mut r = rng(SEED + 1);
    let mut unit: f64 = 0.0;
    for i in 0..20 {
        let mut t: Vec<CMatrix> = (0..3).map(|_| random_gl(&mut r, 2)).collect();
        t[i % 3] = random_unitary(&mut r, 2);
        unit = unit.max(v3.eval(&t)?.abs());
    }
    verdict(
        delta < 1e-4 && unit < 1e-6,
        format!("max |δv3| = {delta:.2e} on 20 4-tuples, max |v3| with a unitary entry = {unit:.2e}"),
    )
}

/// `(1 + dh)^{-1}` by exact inversion, independent of the series.
fn oracle_inverse(data: &AugmentedData) -> Option<Matrix<Q>> {
    let n = data.layout().total();
    Matrix::identity(n).add(&data.op(Op::D).mul(&data.op(Op::H))).inverse()
}

fn c7_perturbation() -> Result<Verdict> {
    let mut r = rng(SEED);
    let mut identity_ok = 0;
    let mut baf_ok = 0;
    for _ in 0..50 {
        let opts = SynthOptions::new(r.random_range(1..=4), r.random_range(1..=4), r.random_range(1..=5));
        let data = synthesize(r.random(), opts)?;
        let pert = perturb_horizontal(&data)?;
        let series_matches = oracle_inverse(&data).is_some_and(|inv| pert.h_prime == data.op(Op::H).mul(&inv));
        // [h', d+δ] = 1 − i∘p' written out on the whole space.
        let total = data.op(Op::D).add(&data.op(Op::Delta));
        let lhs = pert.h_prime.mul(&total).add(&total.mul(&pert.h_prime));
        let rhs = data.layout().id_d().sub(&data.op(Op::I).mul(&pert.p_prime));
        if series_matches && lhs == rhs && perturbed_identity_holds(&data, &pert) {
            identity_ok += 1;
        }
        let size = r.random_range(1..=4);
        let mut opts = SynthOptions::new(size, size, r.random_range(1..=5));
        opts.hk0 = true;
        if back_and_forth_check(&synthesize(r.random(), opts)?)? {
            baf_ok += 1;
        }
    }
    verdict(
        identity_ok == 50 && baf_ok == 50,
        format!("perturbed identity {identity_ok}/50, back-and-forth {baf_ok}/50"),
    )
}

fn poly_cochain(p: usize, salt: f64) -> GroupCochain {
    GroupCochain::new(p, 2, format!("poly{p}"), move |g| {
        let mut acc = salt;
        let mut prod = identity(2);
        for (i, m) in g.iter().enumerate() {
            prod *= m;
            acc += (i as f64 + salt) * m[(0, 0)].re - m[(1, 0)].im * salt;
            acc += 0.1 * prod.trace().re;
        }
        Ok(acc)
    })
}

fn poly_hom(p: usize) -> HomogeneousCochain {
    HomogeneousCochain::new(p, 2, |h| {
        let mut acc = 0.0;
        let mut prod = identity(2);
        for (i, m) in h.iter().enumerate() {
            acc += (i as f64 + 1.0) * m[(0, 0)].re + 0.5 * m[(0, 1)].im;
            prod *= m;
        }
        Ok(acc + 0.1 * prod.trace().re)
    })
}

fn rel_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / scale_of(&[a, b])
}

fn c8_group_cochains() -> Result<Verdict> {
    const N: usize = 100;
    let mut worst = Vec::new();

    let mut dd: f64 = 0.0;
    for p in 0..3 {
        let ddf = coboundary(&coboundary(&poly_cochain(p, 0.3)));
        for t in gl_tuples(SEED + p as u64, 2, p + 2, N) {
            dd = dd.max(ddf.eval(&t)?.abs());
        }
    }
    worst.push(("δδ", dd));

    let mut leib: f64 = 0.0;
    for (p, q) in [(1, 1), (1, 2), (2, 1)] {
        let (f, g) = (poly_cochain(p, 0.7), poly_cochain(q, -0.4));
        let lhs = coboundary(&cup(&f, &g)?);
        let s = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = cup(&coboundary(&f), &g)?.add(&cup(&f, &coboundary(&g))?.scale(s))?;
        for t in gl_tuples(SEED + 3, 2, p + q + 1, N) {
            leib = leib.max(rel_residual(lhs.eval(&t)?, rhs.eval(&t)?));
        }
    }
    worst.push(("Leibniz", leib));

    // N∘ι = id on a normalized homogeneous cochain.
    let normalized = HomogeneousCochain::new(2, 2, |h| {
        let a = (&h[0] - &h[1]).trace();
        let b = (&h[1] - &h[2]).determinant();
        Ok((a * b).re)
    });
    let n_norm = normalize_n(&normalized);
    let mut ni: f64 = 0.0;
    for t in gl_tuples(SEED + 4, 2, 3, N) {
        ni = ni.max(rel_residual(n_norm.eval(&t)?, normalized.eval(&t)?));
    }
    worst.push(("N∘ι", ni));

    // Image of N vanishes exactly on repeated neighbours.
    let mut repeats_exact = true;
    let mut r = rng(SEED + 5);
    for i in 0..N {
        let p = 1 + i % 3;
        let nf = normalize_n(&poly_hom(p));
        let mut t: Vec<CMatrix> = (0..=p).map(|_| random_gl(&mut r, 2)).collect();
        let j = r.random_range(0..p);
        t[j + 1] = t[j].clone();
        repeats_exact &= nf.eval(&t)? == 0.0;
    }
    worst.push(("N image", if repeats_exact { 0.0 } else { f64::INFINITY }));

    let mut eg: f64 = 0.0;
    for p in 1..3 {
        let f = poly_hom(p);
        let a = eg_homotopy(&coboundary_hom(&f))?;
        let b = coboundary_hom(&eg_homotopy(&f)?);
        for t in gl_tuples(SEED + 6, 2, p + 1, N) {
            eg = eg.max(rel_residual(a.eval(&t)? + b.eval(&t)?, f.eval(&t)?));
        }
    }
    let f0 = poly_hom(0);
    let hd = eg_homotopy(&coboundary_hom(&f0))?;
    let ip = eg_ip(&f0);
    for t in gl_tuples(SEED + 7, 2, 1, N) {
        eg = eg.max(rel_residual(hd.eval(&t)?, f0.eval(&t)? - ip.eval(&t)?));
    }
    worst.push(("EG homotopy", eg));

    let k = quaternion_group();
    let f1 = poly_cochain(1, -0.3);
    let lhs = average_finite(&coboundary(&f1), &k)?;
    let rhs = coboundary(&average_finite(&f1, &k)?);
    let mut avd: f64 = 0.0;
    for t in gl_tuples(SEED + 8, 2, 2, N) {
        avd = avd.max(rel_residual(lhs.eval(&t)?, rhs.eval(&t)?));
    }
    worst.push(("Av δ", avd));

    // Av∘ι = id: log|det| is invariant under the quaternion group.
    let v1 = v_generator(2, 1, &QuadratureSpec::default())?;
    let av = average_finite(&v1, &k)?;
    let mut avi: f64 = 0.0;
    for t in gl_tuples(SEED + 9, 2, 1, N) {
        avi = avi.max(rel_residual(av.eval(&t)?, log_abs_det(&t[0])));
    }
    worst.push(("Av∘ι", avi));

    let ok = worst.iter().all(|(_, v)| *v <= 1e-8);
    let detail = worst.iter().map(|(n, v)| format!("{n} {v:.1e}")).collect::<Vec<_>>().join(", ");
    verdict(ok, detail)
}

fn c9_transitive() -> Result<Verdict> {
    let names = || vec!["z".to_string(), "m1".to_string(), "m2".to_string()];
    let trivial = TransitiveModel::new(names(), 2, IsoSubgroup::Trivial)?;
    let unitary = TransitiveModel::new(names(), 2, IsoSubgroup::Unitary)?;

    let mut r_ext = true;
    for p in 0..3 {
        let f = poly_cochain(p, 0.6);
        let back = trivial.restrict(&trivial.ext(&f, SEED, 10)?);
        for t in gl_tuples(SEED + p as u64, 2, p, 30) {
            r_ext &= back.eval(&t)? == f.eval(&t)?;
        }
    }

    // Invariant under U(2) acting on the arrows by conjugation.
    let direct = ModelCochain::new(2, |g| {
        let a = g[0].a.determinant().norm().ln();
        let b = (&g[1].a * g[1].a.adjoint()).trace().re;
        Ok(a * b)
    });
    unitary.check_model_invariant(&direct, SEED, 30)?;
    let rt = unitary.ext(&unitary.restrict(&direct), SEED, 10)?;
    let mut r = rng(SEED);
    let mut ext_r = true;
    for _ in 0..30 {
        let s = unitary.random_string(&mut r, 2);
        ext_r &= rt.eval(&s)? == direct.eval(&s)?;
    }

    let (f, g) = (poly_cochain(1, 0.8), poly_cochain(2, -0.2));
    let ext_df = trivial.ext(&coboundary(&f), SEED, 10)?;
    let d_ext_f = coboundary_model(&trivial.ext(&f, SEED, 10)?);
    let ext_cup = trivial.ext(&cup(&f, &g)?, SEED, 10)?;
    let cup_ext = cup_model(&trivial.ext(&f, SEED, 10)?, &trivial.ext(&g, SEED, 10)?);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = trivial.random_string(&mut r, 2);
        worst = worst.max(rel_residual(ext_df.eval(&s)?, d_ext_f.eval(&s)?));
        let s3 = trivial.random_string(&mut r, 3);
        worst = worst.max(rel_residual(ext_cup.eval(&s3)?, cup_ext.eval(&s3)?));
    }

    // Algebroid side, exact.
    let sp = BasedSpace::new(4)?;
    let a = AltForm::from_terms(&sp, 1, [(vec![0], Q::from_i64(2)), (vec![3], -Q::one())])?;
    let b = AltForm::from_terms(&sp, 2, [(vec![1, 2], Q::from_i64(3))])?;
    let (ea, eb) = (trivial.ext_algebroid(&a), trivial.ext_algebroid(&b));
    let wedge: Vec<_> = ea.iter().zip(&eb).map(|(x, y)| x.wedge(y)).collect::<Result<_>>()?;
    let algebroid = trivial.restrict_algebroid(&ea)? == a && wedge == trivial.ext_algebroid(&a.wedge(&b)?);

    verdict(
        r_ext && ext_r && algebroid && worst < 1e-9,
        format!("r∘ext {r_ext}, ext∘r {ext_r}, algebroid {algebroid}, δ/cup residual {worst:.1e}"),
    )
}

fn c10_classes() -> Result<Verdict> {
    let spec = QuadratureSpec::default();
    let gl = |m| GroupRep::identity(m, SourceGroup::All);
    let det = GroupRep::power(2, 1, SourceGroup::All)?;

    let sum = sum_law_residual(&gl(2)?, &det, 1, &spec, SEED, 50)?;
    // Block-diagonal oracle: v1(z ⊕ z) = 2 log|z|.
    let sum_class = group_class(&GroupRep::direct_sum(vec![gl(1)?, gl(1)?])?, 1, &spec)?;
    let mut sum_oracle: f64 = 0.0;
    for t in gl_tuples(SEED, 1, 1, 50) {
        sum_oracle = sum_oracle.max((sum_class.eval(&t)? - 2.0 * log_abs_det(&t[0])).abs());
    }
    let tensor = tensor_law_residual(&gl(2)?, &gl(2)?, 1, &spec, SEED, 50)?;
    // Kronecker oracle: det(A ⊗ B) = det(A)^m det(B)^n, here det(A)^3.
    let kron_class = group_class(&GroupRep::tensor(gl(2)?, det.clone())?, 1, &spec)?;
    let mut tensor_oracle: f64 = 0.0;
    for t in gl_tuples(SEED + 1, 2, 1, 50) {
        tensor_oracle = tensor_oracle.max((kron_class.eval(&t)? - 3.0 * log_abs_det(&t[0])).abs());
    }
    let dual = dual_law_residual(&gl(2)?, 1, &spec, SEED, 50)?;
    let dual_class = group_class(&GroupRep::dual(gl(2)?), 1, &spec)?;
    let mut dual_oracle: f64 = 0.0;
    for t in gl_tuples(SEED + 2, 2, 1, 50) {
        dual_oracle = dual_oracle.max((dual_class.eval(&t)? + log_abs_det(&t[0])).abs());
    }
    let real = real_vanishing_check(&GroupRep::identity(2, SourceGroup::Real)?, 2, &spec, SEED, 3)?;
    let realified = real_vanishing_check(&GroupRep::realify(gl(1)?), 2, &spec, SEED, 3)?;
    let ve = ve_compatibility_check(&gl(2)?, 1, &spec, SEED, 20)?;

    let exact_path = [sum, sum_oracle, tensor, tensor_oracle, dual, dual_oracle];
    let ok = exact_path.iter().all(|v| *v < 1e-6) && real < 1e-3 && realified < 1e-3 && ve < 1e-5;
    verdict(
        ok,
        format!(
            "sum {:.1e}, tensor {:.1e}, dual {:.1e}, real {:.1e}, VE {ve:.1e}",
            sum.max(sum_oracle),
            tensor.max(tensor_oracle),
            dual.max(dual_oracle),
            real.max(realified)
        ),
    )
}

type Criterion = (&'static str, fn() -> Result<Verdict>, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 Betti numbers of gl1C and gl2C", c1_betti, Some(Duration::from_secs(10))),
        ("2 relative Betti of (gl2C, u2)", c2_relative, Some(Duration::from_secs(10))),
        ("3 generator battery u1, u3", c3_generators, None),
        ("4 v1 against log|det| on GL2, GL3", c4_v1, None),
        ("5 VE∘R = id on u1", c5_ve_r, Some(Duration::from_secs(30))),
        ("6 v3 is a normalized 3-cocycle", c6_v3, Some(Duration::from_secs(300))),
        ("7 perturbation lemma instances", c7_perturbation, Some(Duration::from_secs(30))),
        ("8 group-cochain identities", c8_group_cochains, Some(Duration::from_secs(60))),
        ("9 transitive model", c9_transitive, None),
        ("10 characteristic-class laws", c10_classes, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(v) => (v.ok, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| elapsed <= b);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        let limit = budget.map_or(String::new(), |b| format!(" / {}s", b.as_secs()));
        println!(
            "{} criterion {name}: {detail} [{:.2}s{limit}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
