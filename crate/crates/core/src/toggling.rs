//! The toggling-frame map M̂ and its relatives.
//!
//! `M̂` keeps every element angle and replaces axis `e_i` by `U_i⁻¹ e_i`,
//! where `U_i` is the propagator of the elements before `i`. For uniform
//! angles `β = 2π/m` the map has a cycle of length `m`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rotcore::{compose, Rotation, UnitVector3};
use crate::seqmodel::{angle_diff, RotationSequence, EQUATORIAL_TOL};

/// Axis-wise tolerance for cyclicity detection.
pub const CYCLE_TOL: f64 = 1e-9;
const HALF_BAND_TOL: f64 = 1e-10;

/// Vectors `e_i^(k)` of the `k`-th toggling frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TogglingFrameSet {
    pub depth: usize,
    pub vectors: Vec<UnitVector3>,
    pub source: RotationSequence,
}

impl TogglingFrameSet {
    pub fn new(source: &RotationSequence, depth: usize) -> Self {
        Self {
            depth,
            vectors: toggling_map_iter(source, depth).axes(),
            source: source.clone(),
        }
    }
}

/// `ẽ_i = U_i(c)⁻¹ e_i` with every angle scaled by `c`.
pub fn toggled_axes(s: &RotationSequence, scale: f64) -> Vec<UnitVector3> {
    let mut u = Rotation::identity();
    s.elements()
        .iter()
        .map(|e| {
            let t = u.inverse().rotate(e.axis());
            u = compose(&e.rotation(scale), &u);
            t
        })
        .collect()
}

/// One application of M̂.
pub fn toggling_map(s: &RotationSequence) -> RotationSequence {
    s.with_axes(format!("M({})", s.name()), &toggled_axes(s, 1.0))
}

/// `M̂^m`; `m = 0` returns a copy of `s`.
pub fn toggling_map_iter(s: &RotationSequence, m: usize) -> RotationSequence {
    let mut out = s.clone();
    for _ in 0..m {
        out = out.with_axes(out.name().to_string(), &toggled_axes(&out, 1.0));
    }
    if m > 0 {
        out = out.with_name(format!("M^{}({})", m, s.name()));
    }
    out
}

/// `e_i^(m) = [∏_{j<i} R(m·β_j, e_j)]⁻¹ e_i`, evaluated on the original axes.
pub fn closed_form_toggling(s: &RotationSequence, m: usize) -> RotationSequence {
    s.with_axes(
        format!("M^{}({})", m, s.name()),
        &toggled_axes(s, m as f64),
    )
}

/// Forward reconstruction of `S^(0)` from `S^(1) = s`:
/// `e_0 = t_0`, `e_i = U_i(S^(0)) t_i`.
pub fn inverse_toggling_map(s: &RotationSequence) -> RotationSequence {
    let mut u = Rotation::identity();
    let axes: Vec<UnitVector3> = s
        .elements()
        .iter()
        .map(|e| {
            let a = u.rotate(e.axis());
            u = compose(&Rotation::from_axis_angle(&a, e.beta()), &u);
            a
        })
        .collect();
    s.with_axes(format!("Minv({})", s.name()), &axes)
}

/// Smallest `m ≤ m_max` with `M̂^m s = s` to within [`CYCLE_TOL`].
pub fn cyclicity_order(s: &RotationSequence, m_max: usize) -> Option<usize> {
    let mut cur = s.clone();
    for m in 1..=m_max {
        cur = cur.with_axes(s.name().to_string(), &toggled_axes(&cur, 1.0));
        if cur.max_axis_deviation(s) < CYCLE_TOL {
            return Some(m);
        }
    }
    None
}

/// Phases of `M̂` applied to an equatorial `π` sequence:
/// `φ_i' = φ_0 + Σ_{j=1..i} (−1)^j (φ_j − φ_{j−1})`.
pub fn phase_map(phis: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phis.len());
    let Some(&first) = phis.first() else {
        return out;
    };
    let mut acc = first;
    out.push(acc);
    for j in 1..phis.len() {
        let d = phis[j] - phis[j - 1];
        acc += if j % 2 == 0 { d } else { -d };
        out.push(acc);
    }
    out
}

/// Same formula: the map is an involution on phase lists.
pub fn inverse_phase_map(phis: &[f64]) -> Vec<f64> {
    phase_map(phis)
}

/// `Δφ_i^(b) = (−1)^i Δφ_i^(a)` (mod 2π) for all `i ≥ 1`.
pub fn finite_difference_duality_check(a: &RotationSequence, b: &RotationSequence) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let pa = a.phases()?;
    let pb = b.phases()?;
    Ok((1..pa.len()).all(|i| {
        let da = pa[i] - pa[i - 1];
        let db = pb[i] - pb[i - 1];
        let target = if i % 2 == 0 { da } else { -da };
        angle_diff(db, target).abs() < CYCLE_TOL
    }))
}

/// `ẽ'_i = R((−1)^i π/2, e_z) ẽ_i` for an on-resonance equatorial `π` sequence.
pub fn detuning_frame(s: &RotationSequence) -> Result<TogglingFrameSet> {
    let uniform_pi = s.uniform_beta().is_some_and(|b| (b - PI).abs() < 1e-12);
    if !uniform_pi || !s.is_equatorial() {
        return Err(Error::Precondition(format!(
            "`{}` must be an equatorial sequence of π rotations",
            s.name()
        )));
    }
    let plus = Rotation::from_axis_angle(&UnitVector3::Z, PI / 2.0);
    let minus = plus.inverse();
    let vectors = toggled_axes(s, 1.0)
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { plus.rotate(v) } else { minus.rotate(v) })
        .collect();
    Ok(TogglingFrameSet {
        depth: 1,
        vectors,
        source: s.clone(),
    })
}

/// Per-element half-band deviation: the smaller of `|e^(1) ∓ e^(0)|` and, for
/// equatorial elements, of the phase mismatches `φ^(1) ∓ φ^(0)` (mod 2π).
pub fn half_band_deviations(s: &RotationSequence) -> Vec<f64> {
    let phases = s.phases().ok();
    toggled_axes(s, 1.0)
        .iter()
        .zip(s.axes())
        .enumerate()
        .map(|(i, (t, e))| {
            let vector = t.distance(&e).min(t.distance(&-e));
            match &phases {
                Some(p) if t.is_equatorial(EQUATORIAL_TOL) => {
                    let phi = t.phase();
                    let phase = angle_diff(phi, p[i]).abs().min(angle_diff(phi, -p[i]).abs());
                    vector.min(phase)
                }
                _ => vector,
            }
        })
        .collect()
}

/// True when every element satisfies `e_i^(1) = ±e_i^(0)` or, for equatorial
/// sequences, `φ_i^(1) = ±φ_i^(0)`; false unless all angles are `π`.
pub fn half_band_check(s: &RotationSequence) -> bool {
    if !s.uniform_beta().is_some_and(|b| (b - PI).abs() < 1e-12) {
        return false;
    }
    half_band_deviations(s).iter().all(|d| *d < HALF_BAND_TOL)
}

/// True when every axis of `s` lies in the xy plane.
pub fn axes_equatorial(axes: &[UnitVector3]) -> bool {
    axes.iter().all(|a| a.is_equatorial(EQUATORIAL_TOL))
}
