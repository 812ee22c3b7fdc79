//! Sweeps over the actual flip angle `β′`.
//!
//! A sequence evaluated at `β′` has every element angle multiplied by
//! `β′/β`, where `β` is the sequence's nominal angle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::averaging::{centroid, is_balanced, BALANCE_TOL};
use crate::ddsim::lin_space;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rotcore::{compose, Rotation, UnitVector3};
use crate::seqmodel::{reduce_angle, RotationSequence};
use crate::toggling::{inverse_toggling_map, toggled_axes};

const INVERTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    pub beta_prime: f64,
    pub q: f64,
    pub final_vector: UnitVector3,
    pub net_rotation: Rotation,
}

/// 721 points from 0 to 2π inclusive (0.5° steps).
pub fn default_grid() -> Vec<f64> {
    lin_space(0.0, TAU, 721)
}

pub fn scale_of(s: &RotationSequence, beta_prime: f64) -> f64 {
    beta_prime / s.nominal_beta()
}

pub fn sample(s: &RotationSequence, xi: &UnitVector3, beta_prime: f64) -> ProfileSample {
    let net = s.propagator(scale_of(s, beta_prime));
    let v = net.rotate(xi);
    ProfileSample {
        beta_prime,
        q: xi.dot(&v),
        final_vector: v,
        net_rotation: net,
    }
}

/// `q(β′) = e_ξ·(U_n(β′) e_ξ)` on every grid point.
pub fn q_profile(
    s: &RotationSequence,
    xi: &UnitVector3,
    grid: &[f64],
    exec: Exec,
) -> Result<Vec<ProfileSample>> {
    if grid.is_empty() {
        return Err(Error::Empty("β′ grid"));
    }
    Ok(par::map(exec, grid, |&b| sample(s, xi, b)))
}

fn q_at(s: &RotationSequence, xi: &UnitVector3, beta_prime: f64) -> f64 {
    sample(s, xi, beta_prime).q
}

/// Deviations of `q_dual(β′)` from `−q(π+β′)` and `−q(π−β′)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlideReport {
    pub plus: f64,
    pub minus: f64,
}

impl GlideReport {
    pub fn best(&self) -> f64 {
        self.plus.min(self.minus)
    }

    pub fn branch(&self) -> &'static str {
        if self.plus <= self.minus {
            "+"
        } else {
            "-"
        }
    }
}

fn check_inverter(s: &RotationSequence, xi: &UnitVector3) -> Result<()> {
    let q0 = q_at(s, xi, 0.0);
    let qpi = q_at(s, xi, PI);
    if (q0 - 1.0).abs() > INVERTER_TOL || (qpi + 1.0).abs() > INVERTER_TOL {
        return Err(Error::Precondition(format!(
            "`{}` is not a nominal inverter: q(0) = {q0}, q(π) = {qpi}",
            s.name()
        )));
    }
    Ok(())
}

/// `max_β′ |q_dual(β′) + q_s(π ± β′)|` for both sign branches.
pub fn glide_reflection_check(
    s: &RotationSequence,
    dual: &RotationSequence,
    xi: &UnitVector3,
    grid: &[f64],
    exec: Exec,
) -> Result<GlideReport> {
    check_inverter(s, xi)?;
    check_inverter(dual, xi)?;
    let devs = par::map(exec, grid, |&b| {
        let qd = q_at(dual, xi, b);
        (
            (qd + q_at(s, xi, PI + b)).abs(),
            (qd + q_at(s, xi, PI - b)).abs(),
        )
    });
    Ok(devs.iter().fold(
        GlideReport {
            plus: 0.0,
            minus: 0.0,
        },
        |r, (p, m)| GlideReport {
            plus: r.plus.max(*p),
            minus: r.minus.max(*m),
        },
    ))
}

/// `v0` followed by its image after each element at `β′`.
pub fn trajectory(s: &RotationSequence, v0: &UnitVector3, beta_prime: f64) -> Vec<UnitVector3> {
    s.prefix_propagators(scale_of(s, beta_prime))
        .iter()
        .map(|u| u.rotate(v0))
        .collect()
}

/// Angle of `target⁻¹·U_n(β′)` in degrees.
pub fn rotation_error(s: &RotationSequence, beta_prime: f64, target: &Rotation) -> f64 {
    let u = s.propagator(scale_of(s, beta_prime));
    compose(&target.inverse(), &u).angle().to_degrees()
}

fn check_convertible(s: &RotationSequence) -> Result<Vec<f64>> {
    let fail = |why: &str| Err(Error::Precondition(format!("`{}` {why}", s.name())));
    let Ok(phases) = s.phases() else {
        return fail("is not equatorial");
    };
    if !s.uniform_beta().is_some_and(|b| (b - PI).abs() < 1e-12) {
        return fail("must consist of π rotations");
    }
    if s.len().is_multiple_of(2) {
        return fail("must have odd length");
    }
    let n = phases.len();
    if (0..n).any(|i| crate::seqmodel::angle_diff(phases[i], phases[n - 1 - i]).abs() > 1e-9) {
        return fail("must have an order-reversal-symmetric phase list");
    }
    Ok(phases)
}

/// Turns an odd-length, order-reversal-symmetric `π` inverter into a
/// `2n`-element `π/2` sequence with a compensated net `(π)_x`:
///
/// 1. riffle to `π/2` elements;
/// 2. rotate the toggled vectors by `R(π/2, e_x)` and shift them by `n`;
/// 3. reverse-transform the shifted set;
/// 4. rotate about `e_z` so the phase list becomes antisymmetric.
pub fn convert_m2_to_m4(s: &RotationSequence) -> Result<RotationSequence> {
    check_convertible(s)?;
    let n = s.len();
    let riffled = s.riffle();
    let rx = Rotation::from_axis_angle(&UnitVector3::X, FRAC_PI_2);
    let mut toggled: Vec<UnitVector3> = toggled_axes(&riffled, 1.0)
        .iter()
        .map(|v| rx.rotate(v))
        .collect();
    toggled.rotate_left(n);
    let stage = inverse_toggling_map(&riffled.with_axes(riffled.name().to_string(), &toggled));

    let axes = stage.axes();
    if axes.iter().any(|a| !a.is_equatorial(1e-9)) {
        return Err(Error::NoSymmetrizingAngle);
    }
    let phases: Vec<f64> = axes.iter().map(UnitVector3::phase).collect();
    // φ_i + φ_{2n−1−i} must be one constant S; then δ = −S/2 (mod π).
    let m = phases.len();
    let pair = |i: usize| reduce_angle(phases[i] + phases[m - 1 - i]);
    let s0 = pair(0);
    if (0..m).any(|i| crate::seqmodel::angle_diff(pair(i), s0).abs() > 1e-9) {
        return Err(Error::NoSymmetrizingAngle);
    }
    let d1 = reduce_angle(-s0 / 2.0);
    let d2 = reduce_angle(-s0 / 2.0 + PI);
    let delta = d1.min(d2);
    let shifted: Vec<f64> = phases.iter().map(|p| reduce_angle(p + delta)).collect();
    RotationSequence::from_phases(format!("C24({})", s.name()), FRAC_PI_2, &shifted)
}

/// `(β′, q, v, error)` rows where the error is against the nominal net rotation.
pub fn profile_rows(
    s: &RotationSequence,
    xi: &UnitVector3,
    grid: &[f64],
    exec: Exec,
) -> Result<Vec<[f64; 6]>> {
    let target = s.propagator(1.0);
    Ok(q_profile(s, xi, grid, exec)?
        .into_iter()
        .map(|p| {
            let err = compose(&target.inverse(), &p.net_rotation).angle().to_degrees();
            let v = p.final_vector;
            [p.beta_prime, p.q, v.x(), v.y(), v.z(), err]
        })
        .collect())
}

/// `|C^(1)|` of the converted sequence; convenience for reports.
pub fn toggled_balance(s: &RotationSequence) -> Result<(f64, bool)> {
    let t = toggled_axes(s, 1.0);
    Ok((centroid(&t)?.magnitude(), is_balanced(&t, BALANCE_TOL)))
}
