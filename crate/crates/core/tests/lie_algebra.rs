use cohomkit::exterior::{combinations, AltForm};
use cohomkit::lie_algebra::*;
use cohomkit::linalg::{numerical_rank, Matrix, Scalar, Q};
use cohomkit::Exec;
use proptest::prelude::*;

/// Independent differential: `dα(x_0..x_p) = Σ_{i<j} (−1)^{i+j} α([x_i,x_j], x_0..x̂_i..x̂_j..)`,
/// evaluated on basis tuples.
fn oracle_d_matrix(g: &LieAlgebra, p: usize) -> Matrix<f64> {
    let n = g.dim();
    let src = combinations(n, p);
    let dst = combinations(n, p + 1);
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (c, key) in src.iter().enumerate() {
        let alpha = AltForm::<Q>::basis(g.space(), key).unwrap();
        for (r, out) in dst.iter().enumerate() {
            let xs: Vec<Vec<Q>> = out.iter().map(|&i| unit(n, i)).collect();
            let mut acc = Q::zero();
            for i in 0..=p {
                for j in i + 1..=p {
                    let mut args = vec![g.bracket(&xs[i], &xs[j])];
                    args.extend(
                        xs.iter()
                            .enumerate()
                            .filter(|(t, _)| *t != i && *t != j)
                            .map(|(_, v)| v.clone()),
                    );
                    let v = alpha.eval(&args).unwrap();
                    acc = if (i + j) % 2 == 0 { acc + v } else { acc - v };
                }
            }
            m.set(r, c, acc.to_f64());
        }
    }
    m
}

fn oracle_betti(g: &LieAlgebra) -> Vec<usize> {
    let n = g.dim();
    let ranks: Vec<usize> = (0..n).map(|p| numerical_rank(&oracle_d_matrix(g, p))).collect();
    (0..=n)
        .map(|p| {
            let dim = combinations(n, p).len();
            dim - ranks.get(p).copied().unwrap_or(0) - if p == 0 { 0 } else { ranks[p - 1] }
        })
        .collect()
}

#[test]
fn betti_gl1_gl2_su2() {
    let opts = AssemblyOptions::default();
    let gl1 = LieAlgebra::gl_complex(1).unwrap();
    assert_eq!(betti(&gl1, opts).unwrap(), vec![1, 2, 1]);
    let gl2 = LieAlgebra::gl_complex(2).unwrap();
    let b = betti(&gl2, opts).unwrap();
    assert_eq!(b, vec![1, 2, 1, 2, 4, 2, 1, 2, 1]);
    assert_eq!(b, oracle_betti(&gl2));
    let su2 = LieAlgebra::su2();
    assert_eq!(betti(&su2, opts).unwrap(), vec![1, 0, 0, 1]);
    assert_eq!(oracle_betti(&su2), vec![1, 0, 0, 1]);
}

#[test]
fn ce_complex_shapes() {
    let ab = LieAlgebra::abelian(2).unwrap();
    let c = ce_complex(&ab, AssemblyOptions::default()).unwrap();
    assert_eq!(c.dims(), &[1, 2, 1]);
    assert!(c.has_zero_differential());
    let su2 = ce_complex(&LieAlgebra::su2(), AssemblyOptions::default()).unwrap();
    assert_eq!(su2.dims(), &[1, 3, 3, 1]);
    let ranks = su2.ranks(Exec::Sequential);
    for (p, r) in ranks.iter().enumerate() {
        assert_eq!(*r, numerical_rank(&oracle_d_matrix(&LieAlgebra::su2(), p)));
    }
}

#[test]
fn differential_matches_oracle_matrix() {
    for g in [LieAlgebra::su2(), LieAlgebra::heisenberg(), LieAlgebra::gl_complex(2).unwrap()] {
        let c = ce_complex(&g, AssemblyOptions::default()).unwrap();
        for (p, d) in c.differentials().iter().enumerate().take(4) {
            let o = oracle_d_matrix(&g, p);
            assert_eq!(d.to_f64(), o, "degree {p}");
        }
    }
}

#[test]
fn relative_betti_examples() {
    let opts = AssemblyOptions::default();
    let gl1 = LieAlgebra::gl_complex(1).unwrap();
    let u1 = Subalgebra::unitary(&gl1, 1).unwrap();
    assert_eq!(relative_betti(&gl1, &u1, opts).unwrap(), vec![1, 1]);

    let gl2 = LieAlgebra::gl_complex(2).unwrap();
    let u2 = Subalgebra::unitary(&gl2, 2).unwrap();
    let basic = basic_subcomplex(&gl2, &u2, opts).unwrap();
    assert_eq!(basic.complex.dims(), &[1, 1, 0, 1, 1]);
    assert!(basic.complex.has_zero_differential());
    assert_eq!(basic.complex.betti(Exec::Sequential), vec![1, 1, 0, 1, 1]);
    for p in 0..=4 {
        for f in basic.basis_forms(gl2.space(), p).unwrap() {
            assert!(is_horizontal(&u2, &f).unwrap());
            assert!(is_invariant(&gl2, &u2, &f).unwrap());
        }
    }

    let su2 = LieAlgebra::su2();
    let zero = Subalgebra::zero(&su2);
    assert_eq!(
        relative_betti(&su2, &zero, opts).unwrap(),
        betti(&su2, opts).unwrap()
    );
    let full = basic_subcomplex(&su2, &zero, opts).unwrap();
    assert_eq!(full.complex.dims(), &[1, 3, 3, 1]);
}

#[test]
fn whole_subalgebra_leaves_constants() {
    for g in [LieAlgebra::su2(), LieAlgebra::heisenberg()] {
        let k = Subalgebra::whole(&g);
        let basic = basic_subcomplex(&g, &k, AssemblyOptions::default()).unwrap();
        assert_eq!(basic.complex.dims(), &[1]);
    }
}

#[test]
fn lie_derivative_degree_zero_and_abelian() {
    let ab = LieAlgebra::abelian(3).unwrap();
    let f = AltForm::basis(ab.space(), &[0, 2]).unwrap();
    assert!(lie_derivative(&ab, &unit(3, 1), &f).unwrap().is_zero());
    let g = LieAlgebra::su2();
    let c = AltForm::constant(g.space(), Q::from_i64(5));
    assert!(lie_derivative(&g, &unit(3, 0), &c).unwrap().is_zero());
}

#[test]
fn builtin_names() {
    assert_eq!(LieAlgebra::builtin("gl2C").unwrap().dim(), 8);
    assert_eq!(LieAlgebra::builtin("abelian:4").unwrap().dim(), 4);
    assert!(LieAlgebra::builtin("sl7").is_err());
    let g = LieAlgebra::builtin("gl2C").unwrap();
    assert_eq!(Subalgebra::builtin(&g, "u2").unwrap().dim(), 4);
    assert!(Subalgebra::builtin(&g, "u3").is_err());
}

#[test]
fn finite_ad_invariance_check() {
    // Rotation by π about e_2 in su(2): (x,y,z) ↦ (−x,−y,z).
    let g = LieAlgebra::su2();
    let mut ad = Matrix::<Q>::identity(3);
    ad.set(0, 0, -Q::one());
    ad.set(1, 1, -Q::one());
    let f = AltForm::basis(g.space(), &[0, 1]).unwrap();
    assert!(is_ad_invariant(&f, &ad).unwrap());
    let e0 = AltForm::basis(g.space(), &[0]).unwrap();
    assert!(!is_ad_invariant(&e0, &ad).unwrap());
}

fn small_q() -> impl Strategy<Value = Q> {
    (-3i64..=3).prop_map(Q::from_i64)
}

fn form_strategy(dim: usize, p: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), combinations(dim, p).len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn dd_zero_heisenberg(c in form_strategy(3, 1), c2 in form_strategy(3, 2)) {
        let g = LieAlgebra::heisenberg();
        for (p, v) in [(1, c), (2, c2)] {
            let f = AltForm::from_dense(g.space(), p, &v).unwrap();
            let dd = ce_differential(&g, &ce_differential(&g, &f).unwrap()).unwrap();
            prop_assert!(dd.is_zero());
        }
    }

    #[test]
    fn lie_commutator_su2(
        x in prop::collection::vec(small_q(), 3),
        y in prop::collection::vec(small_q(), 3),
        c in form_strategy(3, 2),
    ) {
        let g = LieAlgebra::su2();
        let f = AltForm::from_dense(g.space(), 2, &c).unwrap();
        // [𝓛_x, ι_y] = ι_[x,y]
        let lhs = lie_derivative(&g, &x, &f.contract(&y).unwrap()).unwrap()
            .sub(&lie_derivative(&g, &x, &f).unwrap().contract(&y).unwrap()).unwrap();
        let rhs = f.contract(&g.bracket(&x, &y)).unwrap();
        prop_assert_eq!(lhs, rhs);
        // [𝓛_x, 𝓛_y] = 𝓛_[x,y]
        let lx = |h: &AltForm<Q>| lie_derivative(&g, &x, h).unwrap();
        let ly = |h: &AltForm<Q>| lie_derivative(&g, &y, h).unwrap();
        let comm = lx(&ly(&f)).sub(&ly(&lx(&f))).unwrap();
        prop_assert_eq!(comm, lie_derivative(&g, &g.bracket(&x, &y), &f).unwrap());
    }

    #[test]
    fn lie_commutator_heisenberg(
        x in prop::collection::vec(small_q(), 3),
        y in prop::collection::vec(small_q(), 3),
        c in form_strategy(3, 1),
    ) {
        let g = LieAlgebra::heisenberg();
        let f = AltForm::from_dense(g.space(), 1, &c).unwrap();
        let lx = |h: &AltForm<Q>| lie_derivative(&g, &x, h).unwrap();
        let ly = |h: &AltForm<Q>| lie_derivative(&g, &y, h).unwrap();
        let comm = lx(&ly(&f)).sub(&ly(&lx(&f))).unwrap();
        prop_assert_eq!(comm, lie_derivative(&g, &g.bracket(&x, &y), &f).unwrap());
    }
}
