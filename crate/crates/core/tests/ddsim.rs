use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use togglekit::averaging::centroid;
use togglekit::catalog;
use togglekit::ddsim::*;
use togglekit::toggling::{toggled_axes, toggling_map};
use togglekit::{nest, Error, Exec, RotationSequence};

fn pulse(phases: &[f64]) -> RotationSequence {
    RotationSequence::from_phases("p", PI, phases).unwrap()
}

#[test]
fn kick_time_examples() {
    let dd = DDSequence::new(pulse(&[0.0, 0.0]), vec![1.0, 1.0, 1.0]).unwrap();
    assert_eq!(dd.kick_times(), vec![1.0, 2.0]);
    let single = DDSequence::new(pulse(&[0.0]), vec![0.0, 1.0]).unwrap();
    assert_eq!(kick_times(&single), vec![0.0]);
    let u = udd(2).unwrap();
    let t = u.kick_times();
    assert!((t[0] - 0.5).abs() < 1e-15 && (t[1] - 1.5).abs() < 1e-15);
    assert!((u.total_time() - 2.0).abs() < 1e-15);
}

#[test]
fn uhrig_timing_formula() {
    for n in 1..=10usize {
        let t = udd(n).unwrap().kick_times();
        for (j, tj) in t.iter().enumerate() {
            let expected = n as f64 * (PI * (j + 1) as f64 / (2.0 * n as f64 + 2.0)).sin().powi(2);
            assert!((tj - expected).abs() < 1e-13);
        }
    }
    assert!(udd(0).is_err());
}

#[test]
fn delay_validation() {
    assert!(matches!(
        DDSequence::new(pulse(&[0.0]), vec![1.0]),
        Err(Error::LengthMismatch(..))
    ));
    assert!(DDSequence::new(pulse(&[0.0]), vec![1.0, -1.0]).is_err());
    assert!(DDSequence::new(pulse(&[0.0]), vec![1.0, f64::NAN]).is_err());
    let free = DDSequence::free(3.0).unwrap();
    assert_eq!(free.pulse_count(), 0);
    assert!(free.kick_times().is_empty());
}

#[test]
fn oscillating_field_dressing() {
    let xy4 = DDSequence::equally_spaced(catalog::xy4());
    let same = osc_field_dressed(&xy4, 2.0, 0.0).unwrap();
    assert!(same.pulses().unwrap().approx_eq(xy4.pulses().unwrap(), 1e-15));

    let fast = osc_field_dressed(&xy4, 1e12, 1.0).unwrap();
    assert!(fast.pulses().unwrap().approx_eq(xy4.pulses().unwrap(), 1e-11));

    let (omega, a) = (FRAC_PI_2 / 0.75, 0.4);
    let one = DDSequence::new(pulse(&[0.0]), vec![0.75, 0.25]).unwrap();
    let d = osc_field_dressed(&one, omega, a).unwrap();
    let theta = d.pulses().unwrap().phases().unwrap()[0];
    assert!((theta - a / omega).abs() < 1e-15);
    assert!(d.trailing_z().is_some());

    assert!(matches!(osc_field_dressed(&xy4, 0.0, 1.0), Err(Error::ZeroFrequency)));
}

#[test]
fn static_field_is_linear_in_time() {
    let dd = DDSequence::new(pulse(&[0.0, 0.0]), vec![1.0, 2.0, 1.0]).unwrap();
    let d = static_field_dressed(&dd, 0.1);
    let p = d.pulses().unwrap().phases().unwrap();
    assert!((p[0] - 0.1).abs() < 1e-15 && (p[1] - 0.3).abs() < 1e-15);
}

#[test]
fn map_limits() {
    let xy4 = DDSequence::equally_spaced(catalog::xy4());
    let t = xy4.total_time();
    let m = centroid_map(&xy4, &[1e10 / t], &[1.0], 1.0 / t, Exec::Sequential).unwrap();
    assert!(m.get(0, 0) < 1e-9);

    let u = udd(8).unwrap();
    let t = u.total_time();
    let m = centroid_map(&u, &[0.1 / t], &[1.0], 1.0 / t, Exec::Sequential).unwrap();
    assert!(m.get(0, 0) > 0.95);

    let kdd = DDSequence::equally_spaced(catalog::kdd20());
    let t = kdd.total_time();
    let omegas: Vec<f64> = [0.1, 0.3, 1.0].iter().map(|w| w / t).collect();
    let m = centroid_map(&kdd, &omegas, &[1.0], 1.0 / t, Exec::Sequential).unwrap();
    assert!(m.column(0).iter().all(|c| *c < 0.05), "{:?}", m.column(0));
}

#[test]
fn zero_field_column_is_pulse_centroid() {
    let kdd = DDSequence::equally_spaced(catalog::kdd20());
    let scales = default_scale_grid(9);
    let omegas = default_omega_grid(kdd.total_time(), 4);
    let m = centroid_map(&kdd, &omegas, &scales, 0.0, Exec::Sequential).unwrap();
    for (j, c) in scales.iter().enumerate() {
        let pure = centroid(&toggled_axes(kdd.pulses().unwrap(), *c)).unwrap().magnitude();
        assert!(m.column(j).iter().all(|v| (v - pure).abs() < 1e-14));
    }
    assert_eq!(m.row(0).len(), 9);
}

#[test]
fn map_is_deterministic_across_executors() {
    let dd = udd(6).unwrap();
    let omegas = default_omega_grid(dd.total_time(), 7);
    let scales = default_scale_grid(11);
    let a = centroid_map(&dd, &omegas, &scales, 1.0, Exec::Sequential).unwrap();
    let b = centroid_map(&dd, &omegas, &scales, 1.0, Exec::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(centroid_map(&dd, &[], &scales, 1.0, Exec::Sequential).is_err());
}

#[test]
fn grids() {
    let g = default_omega_grid(4.0, 5);
    assert!((g[0] - 0.1 / 4.0).abs() < 1e-15 && (g[4] - 100.0 / 4.0).abs() < 1e-12);
    let s = default_scale_grid(5);
    assert_eq!(s, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    assert_eq!(lin_space(1.0, 1.0, 1), vec![1.0]);
    let l = log_space(1.0, 100.0, 3);
    assert!((l[1] - 10.0).abs() < 1e-12);
}

#[test]
fn nested_and_anti_decoupling() {
    let xy4 = DDSequence::equally_spaced(catalog::xy4());
    let anti = anti_dd(&xy4, &catalog::u5()).unwrap();
    let expected = nest(&catalog::xy4(), &toggling_map(&catalog::u5())).unwrap();
    assert!(anti.pulses().unwrap().approx_eq(&expected, 1e-12));
    assert_eq!(anti.delays().len(), 21);
    assert!((anti.total_time() - xy4.total_time()).abs() < 1e-15);

    let plain = nest_dd(&xy4, &catalog::pb1()).unwrap();
    let mirrored = anti_dd(&xy4, &catalog::pb1()).unwrap();
    assert!(plain.pulses().unwrap().approx_eq(mirrored.pulses().unwrap(), 1e-10));

    assert!(anti_dd(&xy4, &catalog::p34()).is_err());
    let kdd = nest_dd(&xy4, &catalog::u5()).unwrap();
    assert!(kdd.pulses().unwrap().approx_eq(&catalog::kdd20(), 1e-12));
    assert_eq!(&kdd.delays()[..6], &[0.5, 0.0, 0.0, 0.0, 0.0, 1.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn map_cells_scale_with_time(
        delays in prop::collection::vec(0.05..2.0f64, 5),
        k in 0.2..5.0f64,
        omega in 0.05..20.0f64,
        scale in 0.0..2.0f64,
    ) {
        let a = DDSequence::new(catalog::xy4(), delays.clone()).unwrap();
        let b = DDSequence::new(catalog::xy4(), delays.iter().map(|d| d * k).collect()).unwrap();
        let ca = centroid_map(&a, &[omega], &[scale], 0.7, Exec::Sequential).unwrap();
        let cb = centroid_map(&b, &[omega / k], &[scale], 0.7 / k, Exec::Sequential).unwrap();
        prop_assert!((ca.cells[0] - cb.cells[0]).abs() < 1e-10);
    }
}
