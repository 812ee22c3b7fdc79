use std::f64::consts::{PI, TAU};

use togglekit::catalog;
use togglekit::search::*;
use togglekit::{Exec, Rotation, RotationSequence, UnitVector3};

fn diag() -> UnitVector3 {
    UnitVector3::normalize(1.0, 1.0, 1.0).unwrap()
}

fn contains(list: &[RotationSequence], s: &RotationSequence) -> bool {
    list.iter().any(|r| r.max_axis_deviation(s) < 1e-9)
}

fn spec(axis_set: AxisSet, n: usize, m: u32, target: Target, equatorial_only: bool) -> SearchSpec {
    SearchSpec { axis_set, n, m, target, balance: BalanceMode::Full, equatorial_only }
}

#[test]
fn tetrahedral_axis_cycle() {
    let s = spec(AxisSet::tetrahedron(), 4, 3, Target::Rotation(Rotation::from_axis_angle(&diag(), TAU / 3.0)), false);
    let found = enumerate_balanced(&s, Exec::Parallel).unwrap();
    assert!(contains(&found, &catalog::p34()));
    let seq = enumerate_balanced(&s, Exec::Sequential).unwrap();
    assert_eq!(found, seq);
}

#[test]
fn diagonal_plane_inversion() {
    let x_pi = Rotation::from_axis_angle(&UnitVector3::X, PI);
    let found = enumerate_balanced(&spec(AxisSet::diagonal_quad(), 4, 3, Target::Rotation(x_pi), false), Exec::Parallel).unwrap();
    assert!(contains(&found, &catalog::i34()));
    for s in &found {
        let (err, single) = compensation_margin(s, &x_pi);
        assert!(err < single);
    }
}

#[test]
fn octahedral_equatorial_inversions() {
    let found = enumerate_balanced(&spec(AxisSet::octahedron(), 6, 4, Target::AnyEquatorialPi, true), Exec::Parallel).unwrap();
    assert!(!found.is_empty());
    assert!(found.iter().all(|s| s.is_equatorial()));
    assert_eq!(dedupe(&found, &Symmetry::GlobalZMirrorReverse).len(), 1);
    let mut with_derome = found.clone();
    with_derome.push(catalog::derome());
    assert_eq!(dedupe(&with_derome, &Symmetry::GlobalZMirrorReverse).len(), 1);
    let z_classes = dedupe(&found, &Symmetry::GlobalZ).len();
    assert_eq!(dedupe(&with_derome, &Symmetry::GlobalZ).len(), z_classes);
}

#[test]
fn octahedral_axis_cycles() {
    let s = spec(AxisSet::octahedron(), 6, 4, Target::AxisCycling, false);
    let found = nonequatorial_search(&s, Exec::Parallel).unwrap();
    assert!(contains(&found, &catalog::p46()));
    assert!(contains(&found, &catalog::p46_prime()));
    assert!(found.iter().all(|r| Target::AxisCycling.matches(&r.propagator(1.0))));

    let wrong = spec(AxisSet::tetrahedron(), 4, 3, Target::AxisCycling, false);
    assert!(nonequatorial_search(&wrong, Exec::Sequential).is_err());
}

#[test]
fn single_pulse_cannot_cycle_axes() {
    let s = spec(AxisSet::octahedron(), 1, 4, Target::AxisCycling, false);
    assert!(nonequatorial_search(&s, Exec::Sequential).unwrap().is_empty());
}

#[test]
fn dedupe_examples() {
    assert!(dedupe(&[], &Symmetry::GlobalZ).is_empty());
    let a = RotationSequence::from_phases("a", PI / 2.0, &[0.0, PI / 2.0, PI]).unwrap();
    let b = a.global_phase_shift(PI / 2.0);
    assert_eq!(dedupe(&[a.clone(), b.clone()], &Symmetry::GlobalZ).len(), 1);
    assert_eq!(dedupe(&[a.clone(), b], &Symmetry::None).len(), 2);
    assert_eq!(dedupe(&[a.clone(), a], &Symmetry::None).len(), 1);
}

#[test]
fn axis_set_rotations_collapse_images() {
    let group = AxisSet::octahedron().rotation_group();
    let s = catalog::p46();
    let images: Vec<RotationSequence> = group
        .iter()
        .map(|g| {
            let axes: Vec<UnitVector3> = s
                .axes()
                .iter()
                .map(|a| UnitVector3::from_vector(g * a.as_vector()).unwrap())
                .collect();
            RotationSequence::from_axes("img", s.nominal_beta(), &axes).unwrap()
        })
        .collect();
    assert_eq!(dedupe(&images, &Symmetry::AxisSetRotations(AxisSet::octahedron())).len(), 1);
    assert_eq!(dedupe(&images, &Symmetry::None).len(), 24);
}

#[test]
fn exhaustive_spot_check() {
    let set = AxisSet::tetrahedron();
    let target = Target::Rotation(Rotation::from_axis_angle(&diag(), TAU / 3.0));
    let s = spec(set.clone(), 3, 3, target.clone(), false);
    let found = enumerate_balanced(&s, Exec::Sequential).unwrap();
    let mut brute = 0;
    for a in &set.vertices {
        for b in &set.vertices {
            for c in &set.vertices {
                if evaluate_tuple(&s, &[*a, *b, *c]).is_some() {
                    brute += 1;
                }
            }
        }
    }
    assert_eq!(found.len(), brute);
    assert_eq!(s.space_size(), 64);
}

#[test]
fn axis_sets() {
    for name in ["tetrahedron", "cube", "octahedron", "diagonal-quad", "icosahedron"] {
        let set = AxisSet::by_name(name).unwrap();
        assert!(!set.vertices.is_empty());
    }
    assert!(AxisSet::by_name("dodecagon").is_err());
    let big = spec(AxisSet::icosahedron(), 12, 5, Target::AnyEquatorialPi, false);
    assert!(enumerate_balanced(&big, Exec::Sequential).is_err());
}
