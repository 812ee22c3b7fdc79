//! The full invariant suite, one outcome per numbered criterion.
//!
//! Randomized checks use a fixed ChaCha seed so every run sees the same
//! samples.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::Serialize;

use crate::averaging::{
    average_orders, centroid, default_eps_grid, numeric_error_expansion, symmetry_class,
    vector_symmetry, wigner_d, SymmetryClass,
};
use crate::catalog::{self, Role, ENTRIES};
use crate::ddsim::{anti_dd, centroid_map, udd, DDSequence};
use crate::error::Result;
use crate::par::{self, Exec};
use crate::profiles::{convert_m2_to_m4, default_grid, glide_reflection_check, rotation_error};
use crate::rotcore::{Rotation, UnitVector3};
use crate::search::{dedupe, enumerate_balanced, AxisSet, BalanceMode, SearchSpec, Symmetry, Target};
use crate::seqmodel::{angle_diff, nest, RotationSequence, SEQ_TOL};
use crate::toggling::{
    closed_form_toggling, detuning_frame, half_band_deviations, finite_difference_duality_check, phase_map,
    toggled_axes, toggling_map, toggling_map_iter,
};
use crate::virtualmas::{mas_cycle, suppression_slope};

pub const SEED: u64 = 0x7067_6c65;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(id: u32, title: &'static str, passed: bool, detail: String) -> CriterionOutcome {
    CriterionOutcome {
        id,
        title,
        passed,
        detail,
    }
}

fn failed(id: u32, title: &'static str, e: crate::Error) -> CriterionOutcome {
    outcome(id, title, false, format!("error: {e}"))
}

pub fn random_axis(rng: &mut impl Rng) -> UnitVector3 {
    let [x, y, z]: [f64; 3] = UnitSphere.sample(rng);
    UnitVector3::normalize(x, y, z).expect("sphere sample")
}

pub fn random_sequence(rng: &mut impl Rng, n: usize, beta: f64) -> RotationSequence {
    let axes: Vec<UnitVector3> = (0..n).map(|_| random_axis(rng)).collect();
    RotationSequence::from_axes("random", beta, &axes).expect("n ≥ 1")
}

/// Fixed-seed generator; each criterion draws from its own stream.
pub fn rng_for(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

/// Runs all criteria in order.
pub fn run_all(exec: Exec) -> Vec<CriterionOutcome> {
    let checks: [fn(Exec) -> CriterionOutcome; 15] = [
        c01_cyclicity,
        c02_closed_form,
        c03_f1_duality,
        c04_glide,
        c05_differences,
        c06_half_band,
        c07_balance_audit,
        c08_symmetry_rules,
        c09_search,
        c10_p34_robustness,
        c11_wigner,
        c12_virtual_mas,
        c13_dd_maps,
        c14_conversion,
        c15_kdd,
    ];
    checks.iter().map(|c| c(exec)).collect()
}

pub fn c01_cyclicity(exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "cyclicity of the toggling map";
    let start = Instant::now();
    let cases: Vec<(usize, u32)> = (1..=8).flat_map(|n| (2..=6).map(move |m| (n, m))).collect();
    let worst = par::map(exec, &cases, |&(n, m)| {
        let mut rng = rng_for((n * 10 + m as usize) as u64);
        (0..1000)
            .map(|_| {
                let s = random_sequence(&mut rng, n, TAU / m as f64);
                toggling_map_iter(&s, m as usize).max_axis_deviation(&s)
            })
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        1,
        TITLE,
        worst < 1e-9 && secs < 10.0,
        format!("40000 sequences, max deviation {worst:.2e}, {secs:.2} s"),
    )
}

pub fn c02_closed_form(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "closed form agrees with iteration";
    let mut rng = rng_for(2);
    let mut worst: f64 = 0.0;
    let mut worst_lcm: f64 = 0.0;
    for _ in 0..500 {
        let n = rng.random_range(1..=8);
        let m = rng.random_range(1..=6);
        let els: Vec<_> = (0..n)
            .map(|_| {
                crate::seqmodel::PulseElement::new(rng.random_range(0.1..TAU), random_axis(&mut rng))
                    .expect("positive angle")
            })
            .collect();
        let s = RotationSequence::new("r", els).expect("nonempty");
        worst = worst.max(closed_form_toggling(&s, m).max_axis_deviation(&toggling_map_iter(&s, m)));

        let mixed: Vec<_> = (0..n)
            .map(|_| {
                let beta = if rng.random_bool(0.5) { TAU / 3.0 } else { FRAC_PI_2 };
                crate::seqmodel::PulseElement::new(beta, random_axis(&mut rng)).expect("positive")
            })
            .collect();
        let s = RotationSequence::new("mixed", mixed).expect("nonempty");
        let it = toggling_map_iter(&s, 12);
        worst = worst.max(closed_form_toggling(&s, 12).max_axis_deviation(&it));
        worst_lcm = worst_lcm.max(it.max_axis_deviation(&s));
    }
    outcome(
        2,
        TITLE,
        worst < 1e-9 && worst_lcm < 1e-9,
        format!("closed vs iterated {worst:.2e}; mixed 2π/3, π/2 return at m = 12 {worst_lcm:.2e}"),
    )
}

pub fn c03_f1_duality(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "F1 / NB1_TPG duality";
    let nb1 = catalog::nb1_tpg().phases().expect("equatorial");
    let f1 = catalog::f1().phases().expect("equatorial");
    let offset = 4.0 * catalog::phi_f1();
    let worst = phase_map(&nb1)
        .iter()
        .zip(&f1)
        .map(|(a, b)| angle_diff(a - b, offset).abs())
        .fold(0.0, f64::max);
    let axes = toggling_map(&catalog::nb1_tpg())
        .max_axis_deviation(&catalog::f1().global_phase_shift(offset));
    outcome(
        3,
        TITLE,
        worst < 1e-12 && axes < 1e-12,
        format!("phase offset error {worst:.2e}, axis check {axes:.2e}"),
    )
}

pub fn c04_glide(exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "glide reflection of dual profiles";
    let grid = default_grid();
    let mut pairs = vec![(
        catalog::f1(),
        catalog::nb1_tpg().global_phase_shift(-4.0 * catalog::phi_f1()),
    )];
    for n in [3, 5, 7, 9, 11] {
        pairs.push((
            catalog::b_prime(n, 1).expect("odd n"),
            catalog::n_prime(n, 1).expect("odd n"),
        ));
    }
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (a, b) in &pairs {
        match glide_reflection_check(a, b, &UnitVector3::Z, &grid, exec) {
            Ok(r) => {
                worst = worst.max(r.best());
                notes.push(format!("{}:{:.1e}", a.name(), r.best()));
            }
            Err(e) => return failed(4, TITLE, e),
        }
    }
    outcome(4, TITLE, worst < 1e-9, notes.join(" "))
}

pub fn c05_differences(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "duality of phase differences";
    let mut checked = 0;
    for n in [3usize, 5, 7, 9, 11] {
        for k in 1..(2 * n as i64) {
            if n as i64 % k == 0 {
                continue;
            }
            let (a, b) = match (catalog::n_prime(n, k), catalog::b_prime(n, k)) {
                (Ok(a), Ok(b)) => (a, b),
                (Err(e), _) | (_, Err(e)) => return failed(5, TITLE, e),
            };
            match finite_difference_duality_check(&a, &b) {
                Ok(true) => checked += 1,
                Ok(false) => {
                    return outcome(5, TITLE, false, format!("fails for n = {n}, k = {k}"))
                }
                Err(e) => return failed(5, TITLE, e),
            }
        }
    }
    outcome(5, TITLE, true, format!("{checked} (n, k) pairs"))
}

pub fn c06_half_band(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "half-band T1 and PB1";
    let worst = |s: &RotationSequence| half_band_deviations(s).into_iter().fold(0.0, f64::max);
    let vector_only = |s: &RotationSequence| {
        toggled_axes(s, 1.0)
            .iter()
            .zip(s.axes())
            .map(|(t, e)| t.distance(&e).min(t.distance(&-e)))
            .fold(0.0, f64::max)
    };
    let (t1, pb1) = (catalog::t1(), catalog::pb1());
    let (dt, dp) = (worst(&t1), worst(&pb1));
    outcome(
        6,
        TITLE,
        dt < 1e-12 && dp < 1e-12,
        format!(
            "T1 {dt:.2e}, PB1 {dp:.2e} (axis-only form: T1 {:.2e}, PB1 {:.2e})",
            vector_only(&t1),
            vector_only(&pb1)
        ),
    )
}

/// Concrete instances of every catalog entry, families at several sizes.
pub fn catalog_instances() -> Vec<(String, Role)> {
    let mut out = Vec::new();
    for e in ENTRIES {
        match e.params {
            "" => out.push((e.name.to_string(), e.role)),
            "n[,k]" => {
                for n in [3, 5, 7, 9, 11] {
                    out.push((format!("{}:{n}", e.name), e.role));
                }
            }
            _ => {
                for (m, n) in [(3, 3), (3, 5), (5, 3)] {
                    out.push((format!("{}:{m},{n}", e.name), e.role));
                }
            }
        }
    }
    out
}

pub fn c07_balance_audit(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "balance audit of the catalog";
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut bad = Vec::new();
    for (name, role) in catalog_instances() {
        let s = match catalog::named(&name) {
            Ok(s) => s,
            Err(e) => return failed(7, TITLE, e),
        };
        let axes = match role {
            Role::Broadband => toggled_axes(&s, 1.0),
            Role::Narrowband => s.axes(),
            _ => continue,
        };
        let c = centroid(&axes).expect("nonempty").magnitude();
        count += 1;
        worst = worst.max(c);
        if c >= 1e-9 {
            bad.push(name);
        }
    }
    outcome(
        7,
        TITLE,
        bad.is_empty(),
        format!("{count} entries, max |C| {worst:.2e}{}", if bad.is_empty() { String::new() } else { format!(", unbalanced: {}", bad.join(", ")) }),
    )
}

pub fn c08_symmetry_rules(exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "symmetry rules and error orders";
    let mut rng = rng_for(8);
    let mut sym2: f64 = 0.0;
    let mut anti: f64 = 0.0;
    for _ in 0..200 {
        let half: Vec<UnitVector3> = (0..rng.random_range(1..=4)).map(|_| random_axis(&mut rng)).collect();
        let odd = rng.random_bool(0.5);
        let mut s = half.clone();
        if odd {
            s.push(random_axis(&mut rng));
        }
        s.extend(half.iter().rev());
        debug_assert_eq!(vector_symmetry(&s), SymmetryClass::Symmetric);
        sym2 = sym2.max(average_orders(&s).order2.magnitude());

        let mut a = half.clone();
        a.extend(half.iter().rev().map(|v| -*v));
        debug_assert_eq!(vector_symmetry(&a), SymmetryClass::Antisymmetric);
        let o = average_orders(&a);
        anti = anti
            .max(o.order1.magnitude())
            .max(o.order2.magnitude())
            .max(o.order3.magnitude());
    }
    let samples: Vec<RotationSequence> = (0..200)
        .map(|_| {
            let n = rng.random_range(1..=6);
            let els = (0..n)
                .map(|_| {
                    crate::seqmodel::PulseElement::new(rng.random_range(0.2..TAU), random_axis(&mut rng))
                        .expect("positive")
                })
                .collect();
            RotationSequence::new("r", els).expect("nonempty")
        })
        .collect();
    let grid = default_eps_grid();
    let oracle: Result<Vec<f64>> = par::map(exec, &samples, |s| {
        let numeric = numeric_error_expansion(s, 1.0, &grid)?;
        Ok(average_orders(&toggled_axes(s, 1.0)).relative_deviation(&numeric))
    })
    .into_iter()
    .collect();
    let rel = match oracle {
        Ok(v) => v.into_iter().fold(0.0, f64::max),
        Err(e) => return failed(8, TITLE, e),
    };
    outcome(
        8,
        TITLE,
        sym2 < 1e-10 && anti < 1e-10 && rel < 1e-6,
        format!("symmetric order2 {sym2:.2e}; antisymmetric orders {anti:.2e}; oracle rel {rel:.2e}"),
    )
}

pub struct SearchRuns {
    pub p34_found: bool,
    pub i34_found: bool,
    pub derome_raw: usize,
    pub derome_classes: Vec<RotationSequence>,
    pub derome_extended: Vec<RotationSequence>,
    pub p46_found: bool,
    pub p46_prime_found: bool,
    pub cycling_raw: usize,
    pub compensated: bool,
}

pub fn run_searches(exec: Exec) -> Result<SearchRuns> {
    let diag = UnitVector3::normalize(1.0, 1.0, 1.0)?;
    let contains = |list: &[RotationSequence], s: &RotationSequence| {
        list.iter().any(|r| r.max_axis_deviation(s) < 1e-9)
    };
    let mut compensated = true;
    let mut check_comp = |list: &[RotationSequence], target: Option<&Rotation>| {
        for s in list {
            let t = target.copied().unwrap_or_else(|| s.propagator(1.0));
            let (err, single) = crate::search::compensation_margin(s, &t);
            compensated &= err < single;
        }
    };

    let cyc_target = Rotation::from_axis_angle(&diag, TAU / 3.0);
    let p34 = enumerate_balanced(
        &SearchSpec {
            axis_set: AxisSet::tetrahedron(),
            n: 4,
            m: 3,
            target: Target::Rotation(cyc_target),
            balance: BalanceMode::Full,
            equatorial_only: false,
        },
        exec,
    )?;
    check_comp(&p34, Some(&cyc_target));
    let x_pi = Rotation::from_axis_angle(&UnitVector3::X, PI);
    let i34 = enumerate_balanced(
        &SearchSpec {
            axis_set: AxisSet::diagonal_quad(),
            n: 4,
            m: 3,
            target: Target::Rotation(x_pi),
            balance: BalanceMode::Full,
            equatorial_only: false,
        },
        exec,
    )?;
    check_comp(&i34, Some(&x_pi));
    let derome = enumerate_balanced(
        &SearchSpec {
            axis_set: AxisSet::octahedron(),
            n: 6,
            m: 4,
            target: Target::AnyEquatorialPi,
            balance: BalanceMode::Full,
            equatorial_only: true,
        },
        exec,
    )?;
    check_comp(&derome, None);
    let cycling = crate::search::nonequatorial_search(
        &SearchSpec {
            axis_set: AxisSet::octahedron(),
            n: 6,
            m: 4,
            target: Target::AxisCycling,
            balance: BalanceMode::Full,
            equatorial_only: false,
        },
        exec,
    )?;
    check_comp(&cycling, Some(&cyc_target));
    Ok(SearchRuns {
        p34_found: contains(&p34, &catalog::p34()),
        i34_found: contains(&i34, &catalog::i34()),
        derome_raw: derome.len(),
        derome_classes: dedupe(&derome, &Symmetry::GlobalZ),
        derome_extended: dedupe(&derome, &Symmetry::GlobalZMirrorReverse),
        p46_found: contains(&cycling, &catalog::p46()),
        p46_prime_found: contains(&cycling, &catalog::p46_prime()),
        cycling_raw: cycling.len(),
        compensated,
    })
}

pub fn c09_search(exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "search rediscovers the polyhedral sequences";
    let start = Instant::now();
    let r = match run_searches(exec) {
        Ok(r) => r,
        Err(e) => return failed(9, TITLE, e),
    };
    let derome = catalog::derome();
    let same_class = |classes: &[RotationSequence], sym: &Symmetry| {
        let mut all = classes.to_vec();
        all.push(derome.clone());
        classes.len() == 1 && dedupe(&all, sym).len() == 1
    };
    let unique = same_class(&r.derome_classes, &Symmetry::GlobalZ);
    let a = r.p34_found && r.i34_found;
    let c = r.p46_found && r.p46_prime_found;
    let ext_is_derome = same_class(&r.derome_extended, &Symmetry::GlobalZMirrorReverse);
    outcome(
        9,
        TITLE,
        a && unique && c && r.compensated,
        format!(
            "(a) P34 {} I34 {}; (b) {} solutions in {} classes up to global z rotation \
             ({} with mirror and reversal{}); (c) {} axis-cycling solutions, P46 {} P46' {}; \
             compensated {}; {:.2} s",
            r.p34_found,
            r.i34_found,
            r.derome_raw,
            r.derome_classes.len(),
            r.derome_extended.len(),
            if ext_is_derome { ", Derome" } else { "" },
            r.cycling_raw,
            r.p46_found,
            r.p46_prime_found,
            r.compensated,
            start.elapsed().as_secs_f64()
        ),
    )
}

/// `(max error in degrees, β′/β where it occurs)` over `[0.8, 1.2]` in 0.01 steps.
pub fn p34_worst_error() -> (f64, f64) {
    let s = catalog::p34();
    let target = Rotation::from_axis_angle(
        &UnitVector3::normalize(1.0, 1.0, 1.0).expect("nonzero"),
        TAU / 3.0,
    );
    (0..=40)
        .map(|k| {
            let c = 0.8 + 0.01 * k as f64;
            (rotation_error(&s, c * s.nominal_beta(), &target), c)
        })
        .fold((0.0, 1.0), |a, b| if b.0 > a.0 { b } else { a })
}

pub fn c10_p34_robustness(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "P34 within 5 degrees over ±20%";
    let (worst, at) = p34_worst_error();
    outcome(
        10,
        TITLE,
        worst <= 5.0,
        format!("max rotation error {worst:.3} deg at β′ = {at:.2}β"),
    )
}

pub fn c11_wigner(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "Wigner matrices";
    let mut rng = rng_for(11);
    let mut unit: f64 = 0.0;
    let mut hom: f64 = 0.0;
    let mut cart: f64 = 0.0;
    let s = spherical_basis();
    for _ in 0..100 {
        let r1 = Rotation::from_axis_angle(&random_axis(&mut rng), rng.random_range(0.0..TAU));
        let r2 = Rotation::from_axis_angle(&random_axis(&mut rng), rng.random_range(0.0..TAU));
        for l in 0..=3 {
            let d1 = wigner_d(l, &r1).expect("rank");
            let d2 = wigner_d(l, &r2).expect("rank");
            let d12 = wigner_d(l, &crate::rotcore::compose(&r2, &r1)).expect("rank");
            let dim = 2 * l as usize + 1;
            unit = unit.max((d1.adjoint() * &d1 - nalgebra::DMatrix::identity(dim, dim)).camax());
            hom = hom.max((d12 - d2 * d1).camax());
        }
        let d = wigner_d(1, &r1).expect("rank");
        let m = r1.matrix().map(|x| num_complex::Complex64::new(x, 0.0));
        let m = nalgebra::DMatrix::from_iterator(3, 3, m.iter().copied());
        cart = cart.max((s.adjoint() * m * &s - d).camax());
    }
    outcome(
        11,
        TITLE,
        unit < 1e-9 && hom < 1e-9 && cart < 1e-10,
        format!("unitarity {unit:.2e}, homomorphism {hom:.2e}, Cartesian {cart:.2e}"),
    )
}

/// Columns `e_{−1} = (x − iy)/√2`, `e_0 = z`, `e_{+1} = −(x + iy)/√2`.
pub fn spherical_basis() -> nalgebra::DMatrix<num_complex::Complex64> {
    use num_complex::Complex64 as C;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    nalgebra::DMatrix::from_row_slice(
        3,
        3,
        &[
            C::new(r, 0.0),
            C::new(0.0, 0.0),
            C::new(-r, 0.0),
            C::new(0.0, -r),
            C::new(0.0, 0.0),
            C::new(0.0, -r),
            C::new(0.0, 0.0),
            C::new(1.0, 0.0),
            C::new(0.0, 0.0),
        ],
    )
}

pub fn c12_virtual_mas(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "virtual MAS rank-2 suppression";
    let run = || -> Result<(f64, f64, f64)> {
        let k = crate::averaging::kappa(&mas_cycle(false), 2, 1.0)?;
        Ok((k.row_max(0), suppression_slope(true, 1e-7)?, suppression_slope(false, 1e-7)?))
    };
    match run() {
        Ok((k0, comp, plain)) => outcome(
            12,
            TITLE,
            k0 < 1e-10 && comp < 1e-6 && plain > 1e-2,
            format!("κ(2,0,·) at β {k0:.2e}; slope compensated {comp:.2e}, uncompensated {plain:.2e}"),
        ),
        Err(e) => failed(12, TITLE, e),
    }
}

pub struct DdFindings {
    pub udd_small_omega: f64,
    pub xy4_large_omega: f64,
    pub kdd_large_omega: f64,
    /// `(ωT, value at β′ = β, value at β′ = 0.5β, value at β′ = 0.9β)`.
    pub anti: Vec<(f64, f64, f64, f64)>,
}

pub fn dd_findings(exec: Exec) -> Result<DdFindings> {
    let cell = |dd: &DDSequence, omega_t: f64, scale: f64| -> Result<f64> {
        let t = dd.total_time();
        let map = centroid_map(dd, &[omega_t / t], &[scale], 1.0 / t, exec)?;
        Ok(map.cells[0])
    };
    let udd8 = udd(8)?;
    let xy4 = catalog::named_dd("XY4")?;
    let kdd = catalog::named_dd("KDD20")?;
    let anti = anti_dd(&xy4, &catalog::u5())?;
    let mut rows = Vec::new();
    for wt in [0.1, 1.0, 10.0, 100.0] {
        rows.push((wt, cell(&anti, wt, 1.0)?, cell(&anti, wt, 0.5)?, cell(&anti, wt, 0.9)?));
    }
    Ok(DdFindings {
        udd_small_omega: cell(&udd8, 0.1, 1.0)?,
        xy4_large_omega: cell(&xy4, 1e10, 1.0)?,
        kdd_large_omega: cell(&kdd, 1e10, 1.0)?,
        anti: rows,
    })
}

pub fn c13_dd_maps(exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "decoupling robustness maps";
    let f = match dd_findings(exec) {
        Ok(f) => f,
        Err(e) => return failed(13, TITLE, e),
    };
    let udd_ok = f.udd_small_omega > 0.95;
    let dd_ok = f.xy4_large_omega < 1e-9 && f.kdd_large_omega < 1e-9;
    let anti_ok = f.anti.iter().all(|(_, at1, at05, _)| *at1 > 2.0 * at05);
    let rows: Vec<String> = f
        .anti
        .iter()
        .map(|(wt, a, b, c)| format!("ωT={wt}: β {a:.3} / 0.5β {b:.3} / 0.9β {c:.3}"))
        .collect();
    outcome(
        13,
        TITLE,
        udd_ok && dd_ok && anti_ok,
        format!(
            "UDD8 at β, ωT=0.1: {:.4}; XY4 {:.1e}, KDD {:.1e} at ωT=1e10; anti-KDD {}",
            f.udd_small_omega,
            f.xy4_large_omega,
            f.kdd_large_omega,
            rows.join("; ")
        ),
    )
}

pub fn c14_conversion(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "m = 2 to m = 4 conversion";
    let x_pi = Rotation::from_axis_angle(&UnitVector3::X, PI);
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [5, 15] {
        let out = match catalog::b_prime(n, 1).and_then(|s| convert_m2_to_m4(&s)) {
            Ok(s) => s,
            Err(e) => return failed(14, TITLE, e),
        };
        let shape = out.len() == 2 * n
            && out.uniform_beta().is_some_and(|b| (b - FRAC_PI_2).abs() < 1e-12);
        let net = out.propagator(1.0).distance(&x_pi);
        let c = centroid(&toggled_axes(&out, 1.0)).expect("nonempty").magnitude();
        let sym = symmetry_class(&out);
        ok &= shape && net < 1e-8 && c < 1e-9 && sym == SymmetryClass::Antisymmetric;
        notes.push(format!("B'{n}: {} elements, net {net:.1e}, |C| {c:.1e}, {sym:?}", out.len()));
    }
    outcome(14, TITLE, ok, notes.join("; "))
}

pub fn c15_kdd(_exec: Exec) -> CriterionOutcome {
    const TITLE: &str = "KDD supercycle and detuning frame";
    let nested = nest(&catalog::xy4(), &catalog::u5()).expect("equatorial");
    let same = nested.approx_eq(&catalog::kdd20(), SEQ_TOL);
    let (s6, h) = (PI / 6.0, FRAC_PI_2);
    let explicit = [
        s6, 0.0, h, 0.0, s6,
        h + s6, h, PI, h, h + s6,
        s6, 0.0, h, 0.0, s6,
        h + s6, h, PI, h, h + s6,
    ];
    let listed = catalog::kdd20()
        .phases()
        .map(|p| p.iter().zip(explicit).all(|(a, b)| angle_diff(*a, b).abs() < 1e-12))
        .unwrap_or(false);
    let frame = match detuning_frame(&catalog::u5()) {
        Ok(f) => f,
        Err(e) => return failed(15, TITLE, e),
    };
    let even: Vec<UnitVector3> = frame.vectors.iter().step_by(2).copied().collect();
    let odd: Vec<UnitVector3> = frame.vectors.iter().skip(1).step_by(2).copied().collect();
    let ce = centroid(&even).expect("nonempty").magnitude();
    let co = centroid(&odd).expect("nonempty").magnitude();
    outcome(
        15,
        TITLE,
        same && listed && ce < 1e-9 && co < 1e-9,
        format!("nest matches catalog {same}, explicit list {listed}; even |C| {ce:.1e}, odd |C| {co:.1e}"),
    )
}
