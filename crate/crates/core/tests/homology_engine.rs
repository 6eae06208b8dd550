use cohomkit::homology_engine::*;
use cohomkit::linalg::{Matrix, Scalar, Q};
use cohomkit::Error;
use proptest::prelude::*;

/// `(1 + dh)^{-1}` by exact matrix inversion rather than the series.
fn oracle_inverse(data: &AugmentedData) -> Matrix<Q> {
    let n = data.layout().total();
    let one = Matrix::identity(n);
    one.add(&data.op(Op::D).mul(&data.op(Op::H)))
        .inverse()
        .expect("1 + dh is unipotent")
}

#[test]
fn seed_zero_small_grid_is_valid() {
    let data = synthesize_instance(0, 2, 3).unwrap();
    data.validate().unwrap();
    for (name, ok) in data.invariant_checks() {
        assert!(ok, "{name}");
    }
}

#[test]
fn single_column_with_zero_h() {
    let data = build_from_pieces(
        1,
        3,
        &[Piece::Dot, Piece::VerticalPair { q: 0 }, Piece::VerticalPair { q: 1 }],
    )
    .unwrap();
    assert!(data.op(Op::H).is_zero());
    let pert = perturb_horizontal(&data).unwrap();
    assert!(pert.h_prime.is_zero());
    assert_eq!(pert.p_prime, data.op(Op::P));
}

#[test]
fn zero_vertical_differential_leaves_h_and_p() {
    let data = build_from_pieces(
        3,
        2,
        &[Piece::Dot, Piece::HorizontalPair { p: 0 }, Piece::HorizontalPair { p: 1 }],
    )
    .unwrap();
    assert!(data.op(Op::D).is_zero());
    let pert = perturb_horizontal(&data).unwrap();
    assert_eq!(pert.h_prime, data.op(Op::H));
    assert_eq!(pert.p_prime, data.op(Op::P));
    assert_eq!(pert.series_len, 1);
    let xy = xy_map(&data).unwrap();
    assert!(xy.iter().skip(1).all(Matrix::is_zero));
}

#[test]
fn degree_zero_composite_on_a_dot_is_identity() {
    let data = trivial_instance(2).unwrap();
    let xy = xy_map(&data).unwrap();
    assert_eq!(xy[0], Matrix::identity(2));
    let yx = yx_map(&data).unwrap();
    assert_eq!(yx[0], Matrix::identity(2));
    assert!(back_and_forth_check(&data).unwrap());
}

#[test]
fn hk_violation_is_a_precondition_error() {
    let data = build_from_pieces(2, 2, &[Piece::Dot, Piece::Square { p: 0, q: 0 }]).unwrap();
    match back_and_forth_check(&data) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("h∘k")),
        other => panic!("expected precondition error, got {other:?}"),
    }
}

#[test]
fn pk_violation_is_a_precondition_error() {
    let data = build_from_pieces(1, 2, &[Piece::VerticalPair { q: 0 }]).unwrap();
    match back_and_forth_check(&data) {
        Err(Error::Precondition(msg)) => assert!(msg.contains("p∘k")),
        other => panic!("expected precondition error, got {other:?}"),
    }
}

#[test]
fn missing_vertical_homotopy_is_a_precondition_error() {
    let data = trivial_instance(1).unwrap();
    let blocks: Vec<_> = data
        .blocks()
        .into_iter()
        .filter(|(o, ..)| !matches!(o, Op::K | Op::Qm))
        .collect();
    let stripped = AugmentedData::from_blocks(data.layout().clone(), blocks).unwrap();
    assert!(matches!(back_and_forth_check(&stripped), Err(Error::Precondition(_))));
    assert!(matches!(yx_map(&stripped), Err(Error::Precondition(_))));
}

#[test]
fn broken_homotopy_rejected() {
    let data = synthesize_instance(3, 3, 3).unwrap();
    let mut blocks = data.blocks();
    let pos = blocks.iter().position(|(o, ..)| *o == Op::H);
    if let Some(pos) = pos {
        let (o, t, s, m) = blocks.remove(pos);
        blocks.push((o, t, s, m.scale(&Q::from_i64(2))));
        assert!(matches!(
            AugmentedData::from_blocks(data.layout().clone(), blocks),
            Err(Error::InvariantViolation(_))
        ));
    }
}

#[test]
fn wrong_bidegree_block_rejected() {
    let data = trivial_instance(1).unwrap();
    let mut blocks = data.blocks();
    blocks.push((
        Op::D,
        Slot::D { p: 0, q: 0 },
        Slot::D { p: 0, q: 0 },
        Matrix::identity(1),
    ));
    assert!(AugmentedData::from_blocks(data.layout().clone(), blocks).is_err());
}

#[test]
fn json_roundtrip() {
    for seed in 0..5 {
        let data = synthesize_instance(seed, 3, 3).unwrap();
        let back = AugmentedData::from_json(&data.to_json()).unwrap();
        assert_eq!(back, data);
    }
    assert!(AugmentedData::from_json("{\"d_dims\": []}").is_err());
}

#[test]
fn kk_nonzero_instances_still_valid() {
    let mut found_nonzero = false;
    for seed in 0..20 {
        let mut opts = SynthOptions::new(4, 4, 4);
        opts.kk_zero = false;
        let data = synthesize(seed, opts).unwrap();
        let k = data.op(Op::K);
        found_nonzero |= !k.mul(&k).is_zero();
        perturb_horizontal(&data).unwrap();
    }
    assert!(found_nonzero, "gauge never produced k∘k ≠ 0");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_identity(seed in any::<u64>(), cols in 1usize..=4, rows in 1usize..=4, max_dim in 1usize..=5) {
        let data = synthesize(seed, SynthOptions::new(cols, rows, max_dim)).unwrap();
        prop_assert_eq!(data.op(Op::P).mul(&data.op(Op::I)), data.layout().id_x());
        let delta = data.op(Op::Delta);
        prop_assert!(delta.mul(&delta).is_zero());
        let pert = perturb_horizontal(&data).unwrap();
        prop_assert!(pert.series_len <= cols);
        let inv = oracle_inverse(&data);
        prop_assert_eq!(&pert.h_prime, &data.op(Op::H).mul(&inv));
        prop_assert_eq!(&pert.p_prime, &data.op(Op::P).mul(&inv));
        prop_assert!(perturbed_identity_holds(&data, &pert));
    }

    #[test]
    fn composites_are_cochain_maps(seed in any::<u64>(), size in 1usize..=4) {
        let data = synthesize_instance(seed, size, 4).unwrap();
        let xy = xy_global(&data);
        prop_assert_eq!(xy.mul(&data.op(Op::DY)), data.op(Op::DX).mul(&xy));
        let yx = yx_global(&data).unwrap();
        prop_assert_eq!(yx.mul(&data.op(Op::DX)), data.op(Op::DY).mul(&yx));
    }

    #[test]
    fn back_and_forth_under_hk0(seed in any::<u64>(), size in 1usize..=4, max_dim in 1usize..=5) {
        let mut opts = SynthOptions::new(size, size, max_dim);
        opts.hk0 = true;
        let data = synthesize(seed, opts).unwrap();
        prop_assert!(back_and_forth_check(&data).unwrap());
    }
}
