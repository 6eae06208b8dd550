use cohomkit::exterior::*;
use cohomkit::linalg::{Scalar, Q};
use proptest::prelude::*;

const DIM: usize = 5;

fn space() -> BasedSpace {
    BasedSpace::new(DIM).unwrap()
}

fn small_q() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(a, b)| Q::new(a.into(), b.into()))
}

fn form(p: usize) -> impl Strategy<Value = AltForm<Q>> {
    prop::collection::vec(small_q(), binomial(DIM, p))
        .prop_map(move |v| AltForm::from_dense(&space(), p, &v).unwrap())
}

fn vector() -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), DIM)
}

fn vector_f64() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, DIM)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_leibniz(p in 1usize..3, r in 1usize..3, seed in any::<u64>(), v in vector()) {
        let a = sample(p, seed);
        let b = sample(r, seed.wrapping_mul(31).wrapping_add(7));
        let lhs = a.wedge(&b).unwrap().contract(&v).unwrap();
        let first = a.contract(&v).unwrap().wedge(&b).unwrap();
        let second = a.wedge(&b.contract(&v).unwrap()).unwrap();
        let rhs = if p % 2 == 0 { first.add(&second) } else { first.sub(&second) }.unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(a in form(2), b in form(1), c in form(3)) {
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap());
        let bc = b.wedge(&c).unwrap();
        let cb = c.wedge(&b).unwrap();
        prop_assert_eq!(bc, cb.neg());
    }

    #[test]
    fn wedge_associative(a in form(1), b in form(2), c in form(1)) {
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn double_contraction_vanishes(a in form(3), v in vector()) {
        prop_assert!(a.contract(&v).unwrap().contract(&v).unwrap().is_zero());
    }

    #[test]
    fn eval_alternates_exact(a in form(3), x in vector(), y in vector(), z in vector()) {
        let v1 = a.eval(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let v2 = a.eval(&[y, x, z]).unwrap();
        prop_assert_eq!(v1, -v2);
    }

    #[test]
    fn eval_alternates_float(a in form(3), x in vector_f64(), y in vector_f64(), z in vector_f64()) {
        let f = a.to_f64();
        let v1 = f.eval(&[x.clone(), y.clone(), z.clone()]).unwrap();
        let v2 = f.eval(&[x, z, y]).unwrap();
        prop_assert!((v1 + v2).abs() <= 1e-12 * (1.0 + v1.abs()));
    }

    #[test]
    fn eval_is_iterated_contraction(a in form(2), x in vector(), y in vector()) {
        let direct = a.eval(&[x.clone(), y.clone()]).unwrap();
        let via = a.contract(&x).unwrap().contract(&y).unwrap().coeff(&[]);
        prop_assert_eq!(direct, via);
    }
}

/// Deterministic pseudo-random rational form (keeps the Leibniz test cheap
/// to shrink).
fn sample(p: usize, seed: u64) -> AltForm<Q> {
    let mut s = seed | 1;
    let terms = combinations(DIM, p).into_iter().map(|k| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        (k, Q::from_i64((s % 7) as i64 - 3))
    });
    AltForm::from_terms(&space(), p, terms).unwrap()
}

#[test]
fn basis_eval_returns_coefficient() {
    let a = sample(2, 99);
    for key in combinations(DIM, 2) {
        let vs: Vec<Vec<Q>> = key
            .iter()
            .map(|&i| {
                let mut v = vec![Q::zero(); DIM];
                v[i] = Q::one();
                v
            })
            .collect();
        assert_eq!(a.eval(&vs).unwrap(), a.coeff(&key));
    }
}

#[test]
fn degree_above_dim_is_zero() {
    let s = BasedSpace::new(2).unwrap();
    let a = AltForm::<Q>::basis(&s, &[0, 1]).unwrap();
    let b = AltForm::<Q>::basis(&s, &[0]).unwrap();
    let w = a.wedge(&b).unwrap();
    assert_eq!(w.degree(), 3);
    assert!(w.is_zero());
    assert!(w.to_dense().is_empty());
}

#[test]
fn promotion_keeps_values() {
    let a = sample(2, 5);
    let f = a.to_f64();
    for key in combinations(DIM, 2) {
        assert_eq!(f.coeff(&key), a.coeff(&key).to_f64());
    }
}
