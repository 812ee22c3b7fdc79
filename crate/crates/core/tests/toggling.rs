use std::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use togglekit::catalog;
use togglekit::rotcore::axis_from_phase;
use togglekit::seqmodel::angle_diff;
use togglekit::toggling::*;
use togglekit::{nest, PulseElement, RotationSequence, UnitVector3};

fn same_phases(actual: &[f64], expected: &[f64], tol: f64) -> bool {
    actual.len() == expected.len()
        && actual.iter().zip(expected).all(|(a, b)| angle_diff(*a, *b).abs() < tol)
}

fn f1_plus_4phi() -> RotationSequence {
    catalog::f1().global_phase_shift(4.0 * catalog::phi_f1())
}

fn arb_axis() -> impl Strategy<Value = UnitVector3> {
    (0.0..TAU, -1.0f64..1.0).prop_map(|(phi, z)| axis_from_phase(phi, z.asin()))
}

fn arb_sequence(beta: f64, max_len: usize) -> impl Strategy<Value = RotationSequence> {
    prop::collection::vec(arb_axis(), 1..=max_len)
        .prop_map(move |axes| RotationSequence::from_axes("r", beta, &axes).unwrap())
}

fn arb_equatorial_pi(max_len: usize) -> impl Strategy<Value = RotationSequence> {
    prop::collection::vec(0.0..TAU, 1..=max_len)
        .prop_map(|p| RotationSequence::from_phases("e", PI, &p).unwrap())
}

#[test]
fn single_element_is_fixed() {
    let s = RotationSequence::from_axes("one", 0.7, &[axis_from_phase(1.0, 0.3)]).unwrap();
    assert!(toggling_map(&s).approx_eq(&s, 1e-15));
    assert!(inverse_toggling_map(&s).approx_eq(&s, 1e-15));
}

#[test]
fn pi_pair_example() {
    let s = RotationSequence::from_axes("xy", PI, &[UnitVector3::X, UnitVector3::Y]).unwrap();
    let t = toggling_map(&s);
    assert!(t.axes()[0].distance(&UnitVector3::X) < 1e-15);
    assert!(t.axes()[1].distance(&-UnitVector3::Y) < 1e-15);
    assert!(toggling_map_iter(&s, 2).approx_eq(&s, 1e-14));
    assert!(toggling_map_iter(&s, 0).approx_eq(&s, 1e-15));
}

#[test]
fn narrowband_and_broadband_are_dual() {
    let dual = toggling_map(&catalog::nb1_tpg());
    assert!(same_phases(&dual.phases().unwrap(), &f1_plus_4phi().phases().unwrap(), 1e-12));
    let back = inverse_toggling_map(&f1_plus_4phi());
    assert!(same_phases(&back.phases().unwrap(), &catalog::nb1_tpg().phases().unwrap(), 1e-12));
}

#[test]
fn phase_map_examples() {
    let phi = catalog::phi_f1();
    let mapped = phase_map(&catalog::nb1_tpg().phases().unwrap());
    let expected: Vec<f64> = [1.0, 3.0, 4.0, 5.0, 7.0].iter().map(|k| k * phi).collect();
    assert!(same_phases(&mapped, &expected, 1e-12));

    let xy4 = phase_map(&[0.0, FRAC_PI_2, 0.0, FRAC_PI_2]);
    assert!(same_phases(&xy4, &[0.0, -FRAC_PI_2, -PI, -1.5 * PI], 1e-15));
    assert_eq!(phase_map(&[0.0; 4]), vec![0.0; 4]);
}

#[test]
fn uniform_angle_returns_after_m() {
    let axes = [axis_from_phase(0.3, 0.2), axis_from_phase(2.0, -0.9), axis_from_phase(4.0, 1.1)];
    for m in 2..=6u32 {
        let s = RotationSequence::from_axes("s", TAU / m as f64, &axes).unwrap();
        assert!(closed_form_toggling(&s, m as usize).approx_eq(&s, 1e-12), "m = {m}");
        assert_eq!(cyclicity_order(&s, 12), Some(m as usize), "m = {m}");
    }
}

#[test]
fn mixed_angles_return_at_lcm() {
    let a = axis_from_phase(0.4, 0.5);
    let b = axis_from_phase(2.1, -0.3);
    let c = axis_from_phase(5.0, 0.1);
    let s = RotationSequence::new(
        "mixed",
        vec![
            PulseElement::new(TAU / 3.0, a).unwrap(),
            PulseElement::new(FRAC_PI_2, b).unwrap(),
            PulseElement::new(TAU / 3.0, c).unwrap(),
        ],
    )
    .unwrap();
    assert!(closed_form_toggling(&s, 12).approx_eq(&s, 1e-11));
    assert!(!closed_form_toggling(&s, 4).approx_eq(&s, 1e-6));
    assert!(!closed_form_toggling(&s, 6).approx_eq(&s, 1e-6));
    assert_eq!(cyclicity_order(&s, 24), Some(12));
}

#[test]
fn cyclicity_examples() {
    let s = RotationSequence::from_phases("five", TAU / 5.0, &[0.0, 1.0, 2.5]).unwrap();
    assert_eq!(cyclicity_order(&s, 10), Some(5));
    let generic = RotationSequence::from_axes(
        "g",
        1.0,
        &[axis_from_phase(0.0, 0.2), axis_from_phase(1.7, -0.4), axis_from_phase(3.1, 0.9)],
    )
    .unwrap();
    assert_eq!(cyclicity_order(&generic, 40), None);
}

#[test]
fn finite_difference_duality_examples() {
    let n5 = catalog::n_prime(5, 1).unwrap();
    let b5 = catalog::b_prime(5, 1).unwrap();
    assert!(finite_difference_duality_check(&n5, &b5).unwrap());
    assert!(finite_difference_duality_check(&b5, &n5).unwrap());
    assert!(!finite_difference_duality_check(&n5, &n5).unwrap());
    let xyz = RotationSequence::from_axes("xz", PI, &[UnitVector3::X, UnitVector3::Z]).unwrap();
    assert!(finite_difference_duality_check(&xyz, &xyz).is_err());
}

#[test]
fn detuning_frame_single_element() {
    let s = RotationSequence::from_phases("x", PI, &[0.0]).unwrap();
    let f = detuning_frame(&s).unwrap();
    assert!(f.vectors[0].distance(&UnitVector3::Y) < 1e-15);
    let two = detuning_frame(&catalog::xy4()).unwrap();
    assert_eq!(two.vectors.len(), 4);
    assert!(two.vectors.iter().all(|v| v.z().abs() < 1e-15));
}

#[test]
fn half_band_examples() {
    assert!(half_band_check(&catalog::t1()));
    assert!(half_band_check(&catalog::pb1()));
    assert!(!half_band_check(&catalog::f1()));
    assert!(!half_band_check(&catalog::levitt()));
}

#[test]
fn frame_set_depths() {
    let s = catalog::f1();
    let f = TogglingFrameSet::new(&s, 1);
    assert_eq!(f.depth, 1);
    assert_eq!(f.vectors, toggling_map(&s).axes());
    assert_eq!(TogglingFrameSet::new(&s, 0).vectors, s.axes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterated_map_is_periodic(
        (m, s) in (2u32..=6).prop_flat_map(|m| (Just(m), arb_sequence(TAU / m as f64, 8)))
    ) {
        prop_assert!(toggling_map_iter(&s, m as usize).max_axis_deviation(&s) < 1e-9);
    }

    #[test]
    fn closed_form_matches_iteration(s in arb_sequence(1.3, 6), m in 0usize..5) {
        let dev = closed_form_toggling(&s, m).max_axis_deviation(&toggling_map_iter(&s, m));
        prop_assert!(dev < 1e-11);
    }

    #[test]
    fn inverse_round_trip(s in arb_sequence(0.9, 8)) {
        prop_assert!(inverse_toggling_map(&toggling_map(&s)).max_axis_deviation(&s) < 1e-12);
        prop_assert!(toggling_map(&inverse_toggling_map(&s)).max_axis_deviation(&s) < 1e-12);
    }

    #[test]
    fn phase_map_agrees_with_vector_map(s in arb_equatorial_pi(8)) {
        let mapped = phase_map(&s.phases().unwrap());
        let direct = toggling_map(&s).phases().unwrap();
        prop_assert!(same_phases(&direct, &mapped, 1e-10));
        prop_assert!(same_phases(&inverse_phase_map(&mapped), &s.phases().unwrap(), 1e-10));
        prop_assert!(finite_difference_duality_check(&s, &toggling_map(&s)).unwrap());
    }

    #[test]
    fn map_commutes_with_z_rotation(s in arb_sequence(1.1, 6), dphi in 0.0..TAU) {
        let a = toggling_map(&s.global_phase_shift(dphi));
        let b = toggling_map(&s).global_phase_shift(dphi);
        prop_assert!(a.max_axis_deviation(&b) < 1e-12);
    }

    #[test]
    fn map_distributes_over_odd_nesting(
        outer in arb_equatorial_pi(3),
        inner in prop::collection::vec(0.0..TAU, 1..=5usize).prop_map(|mut p| {
            p.truncate(p.len() - (1 - p.len() % 2));
            RotationSequence::from_phases("in", PI, &p).unwrap()
        }),
    ) {
        let lhs = toggling_map(&nest(&outer, &inner).unwrap());
        let rhs = nest(&toggling_map(&outer), &toggling_map(&inner)).unwrap();
        prop_assert!(lhs.max_axis_deviation(&rhs) < 1e-10);
    }
}
