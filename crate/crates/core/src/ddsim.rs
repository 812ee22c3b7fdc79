//! Dynamical decoupling: pulse sequences interleaved with free delays.
//!
//! A [`DDSequence`] reads `τ_0 – P_0 – τ_1 – P_1 – … – P_{n−1} – τ_n`. Pulses
//! are instantaneous; the kick time of pulse `j` is `t_j = Σ_{l≤j} τ_l`.
//! An oscillating z field `a·cos(ωt)` dresses pulse `j` by a z rotation of
//! its axis through `θ_j = (a/ω)·sin(ω t_j)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::averaging::centroid;
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::seqmodel::{nest, RotationSequence};
use crate::toggling::{toggled_axes, toggling_map};

#[derive(Debug, Clone, PartialEq)]
pub struct DDSequence {
    name: String,
    pulses: Option<RotationSequence>,
    delays: Vec<f64>,
    trailing_z: Option<f64>,
}

impl DDSequence {
    pub fn new(pulses: RotationSequence, delays: Vec<f64>) -> Result<Self> {
        if delays.len() != pulses.len() + 1 {
            return Err(Error::LengthMismatch(delays.len(), pulses.len() + 1));
        }
        check_delays(&delays)?;
        Ok(Self {
            name: pulses.name().to_string(),
            pulses: Some(pulses),
            delays,
            trailing_z: None,
        })
    }

    /// Free evolution with no pulses.
    pub fn free(delay: f64) -> Result<Self> {
        check_delays(&[delay])?;
        Ok(Self {
            name: "free".into(),
            pulses: None,
            delays: vec![delay],
            trailing_z: None,
        })
    }

    /// Pulses at times `½, 3/2, …, n − ½` in a window of length `n`.
    pub fn equally_spaced(pulses: RotationSequence) -> Self {
        let n = pulses.len();
        let mut delays = vec![1.0; n + 1];
        delays[0] = 0.5;
        delays[n] = 0.5;
        Self::new(pulses, delays).expect("delay count matches by construction")
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pulses(&self) -> Option<&RotationSequence> {
        self.pulses.as_ref()
    }

    pub fn pulse_count(&self) -> usize {
        self.pulses.as_ref().map_or(0, RotationSequence::len)
    }

    pub fn delays(&self) -> &[f64] {
        &self.delays
    }

    pub fn total_time(&self) -> f64 {
        self.delays.iter().sum()
    }

    /// Trailing z rotation `θ_n` attached by [`osc_field_dressed`].
    pub fn trailing_z(&self) -> Option<f64> {
        self.trailing_z
    }

    pub fn kick_times(&self) -> Vec<f64> {
        kick_times(self)
    }
}

fn check_delays(delays: &[f64]) -> Result<()> {
    match delays.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        Some(d) => Err(Error::InvalidParams {
            name: "delays".into(),
            reason: format!("delay {d} is not a finite non-negative number"),
        }),
        None => Ok(()),
    }
}

/// `t_j = Σ_{l≤j} τ_l` for `j = 0 … n−1`.
pub fn kick_times(dd: &DDSequence) -> Vec<f64> {
    let mut t = 0.0;
    dd.delays[..dd.pulse_count()]
        .iter()
        .map(|tau| {
            t += tau;
            t
        })
        .collect()
}

/// Uhrig timing: `(π)_0` pulses at `t_j = n·sin²(πj/(2n+2))`, `j = 1…n`,
/// in the window `[0, n]`.
pub fn udd(n: usize) -> Result<DDSequence> {
    if n == 0 {
        return Err(Error::InvalidParams {
            name: "UDD".into(),
            reason: "needs at least one pulse".into(),
        });
    }
    let nf = n as f64;
    let t: Vec<f64> = (0..=n + 1)
        .map(|j| nf * (PI * j as f64 / (2.0 * nf + 2.0)).sin().powi(2))
        .collect();
    let delays = t.windows(2).map(|w| w[1] - w[0]).collect();
    let pulses = RotationSequence::from_phases(format!("UDD{n}"), PI, &vec![0.0; n])?;
    DDSequence::new(pulses, delays)
}

fn dress(dd: &DDSequence, thetas: &[f64], trailing: Option<f64>) -> DDSequence {
    let pulses = dd.pulses.as_ref().map(|p| {
        let el = p
            .elements()
            .iter()
            .zip(thetas)
            .map(|(e, th)| e.rotated_about_z(*th))
            .collect();
        RotationSequence::new(p.name(), el).expect("non-empty by construction")
    });
    DDSequence {
        name: dd.name.clone(),
        pulses,
        delays: dd.delays.clone(),
        trailing_z: trailing,
    }
}

/// Pulse axes phase-shifted by `θ_j = (a/ω)·sin(ω t_j)`; the trailing
/// `θ_n = (a/ω)[sin(ωτ_n) − sin(ωτ_{n−1})]` is kept as metadata.
pub fn osc_field_dressed(dd: &DDSequence, omega: f64, a: f64) -> Result<DDSequence> {
    if omega == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    let k = a / omega;
    let thetas: Vec<f64> = kick_times(dd).iter().map(|t| k * (omega * t).sin()).collect();
    let n = dd.pulse_count();
    let trailing = (n > 0).then(|| {
        k * ((omega * dd.delays[n]).sin() - (omega * dd.delays[n - 1]).sin())
    });
    Ok(dress(dd, &thetas, trailing))
}

/// Static-field limit `θ_j = a·t_j`.
pub fn static_field_dressed(dd: &DDSequence, a: f64) -> DDSequence {
    let thetas: Vec<f64> = kick_times(dd).iter().map(|t| a * t).collect();
    dress(dd, &thetas, None)
}

/// `|C^(1)|` of the dressed pulses at scale `β′/β`, uniform pulse weights.
pub fn dressed_centroid(dd: &DDSequence, omega: f64, a: f64, scale: f64) -> Result<f64> {
    let dressed = osc_field_dressed(dd, omega, a)?;
    match dressed.pulses() {
        Some(p) => Ok(centroid(&toggled_axes(p, scale))?.magnitude()),
        None => Err(Error::Empty("pulse list")),
    }
}

/// Grid of `|C^(1)|` over `ω` (rows) and `β′/β` (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidMap {
    pub omegas: Vec<f64>,
    pub beta_scales: Vec<f64>,
    pub a: f64,
    /// Row-major, one row per `ω`.
    pub cells: Vec<f64>,
}

impl CentroidMap {
    pub fn get(&self, omega_index: usize, scale_index: usize) -> f64 {
        self.cells[omega_index * self.beta_scales.len() + scale_index]
    }

    pub fn row(&self, omega_index: usize) -> &[f64] {
        let w = self.beta_scales.len();
        &self.cells[omega_index * w..(omega_index + 1) * w]
    }

    pub fn column(&self, scale_index: usize) -> Vec<f64> {
        (0..self.omegas.len())
            .map(|i| self.get(i, scale_index))
            .collect()
    }
}

/// Evaluates every `(ω, β′/β)` cell independently.
pub fn centroid_map(
    dd: &DDSequence,
    omegas: &[f64],
    beta_scales: &[f64],
    a: f64,
    exec: Exec,
) -> Result<CentroidMap> {
    if omegas.is_empty() || beta_scales.is_empty() {
        return Err(Error::Empty("centroid map grid"));
    }
    let w = beta_scales.len();
    let cells = par::map_range(exec, omegas.len(), |i| -> Result<Vec<f64>> {
        let dressed = osc_field_dressed(dd, omegas[i], a)?;
        let p = dressed.pulses().ok_or(Error::Empty("pulse list"))?;
        beta_scales
            .iter()
            .map(|&c| Ok(centroid(&toggled_axes(p, c))?.magnitude()))
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .concat();
    debug_assert_eq!(cells.len(), omegas.len() * w);
    Ok(CentroidMap {
        omegas: omegas.to_vec(),
        beta_scales: beta_scales.to_vec(),
        a,
        cells,
    })
}

/// `ω` values with `ωT` log-spaced over `[0.1, 100]`.
pub fn default_omega_grid(total_time: f64, points: usize) -> Vec<f64> {
    log_space(0.1, 100.0, points)
        .into_iter()
        .map(|x| x / total_time)
        .collect()
}

/// `β′/β` uniformly over `[0, 2]`.
pub fn default_scale_grid(points: usize) -> Vec<f64> {
    lin_space(0.0, 2.0, points)
}

pub fn lin_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    lin_space(lo.ln(), hi.ln(), points)
        .into_iter()
        .map(f64::exp)
        .collect()
}

/// Composite-block supercycle `outer(inner)`: each outer pulse becomes the
/// inner block; outer delays sit between blocks, none inside.
pub fn nest_dd(outer: &DDSequence, inner: &RotationSequence) -> Result<DDSequence> {
    let op = outer.pulses().ok_or(Error::Empty("outer pulse list"))?;
    let pulses = nest(op, inner)?;
    let k = inner.len();
    let mut delays = Vec::with_capacity(pulses.len() + 1);
    for (j, tau) in outer.delays.iter().enumerate() {
        if j > 0 {
            delays.extend(std::iter::repeat_n(0.0, k - 1));
        }
        delays.push(*tau);
    }
    DDSequence::new(pulses, delays)
}

/// `outer(M̂ inner)`, robust in `ω` and narrowband in `β′`.
pub fn anti_dd(outer: &DDSequence, inner: &RotationSequence) -> Result<DDSequence> {
    let uniform_pi = inner.uniform_beta().is_some_and(|b| (b - PI).abs() < 1e-12);
    if !uniform_pi || !inner.is_equatorial() {
        return Err(Error::Precondition(format!(
            "inner `{}` must be an equatorial sequence of π rotations",
            inner.name()
        )));
    }
    let dual = toggling_map(inner).with_name(format!("~{}", inner.name()));
    Ok(nest_dd(outer, &dual)?.with_name(format!("{}(~{})", outer.name, inner.name())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kick_time_examples() {
        let p = RotationSequence::from_phases("pp", PI, &[0.0, 0.0]).unwrap();
        let dd = DDSequence::new(p, vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(kick_times(&dd), vec![1.0, 2.0]);
        let t = kick_times(&udd(2).unwrap());
        assert!((t[0] - 0.5).abs() < 1e-15 && (t[1] - 1.5).abs() < 1e-15);
        let one = RotationSequence::from_phases("x", PI, &[0.0]).unwrap();
        let dd = DDSequence::new(one, vec![0.0, 1.0]).unwrap();
        assert_eq!(kick_times(&dd), vec![0.0]);
    }

    #[test]
    fn udd_window_and_symmetry() {
        for n in [1, 2, 5] {
            let dd = udd(n).unwrap();
            assert!((dd.total_time() - n as f64).abs() < 1e-12);
            let d = dd.delays();
            for j in 0..=n {
                assert!((d[j] - d[n - j]).abs() < 1e-12);
            }
        }
        assert!(udd(0).is_err());
    }

    #[test]
    fn dressing_limits() {
        let dd = udd(3).unwrap();
        let same = osc_field_dressed(&dd, 2.0, 0.0).unwrap();
        assert!(same.pulses().unwrap().approx_eq(dd.pulses().unwrap(), 1e-15));
        assert!(matches!(osc_field_dressed(&dd, 0.0, 1.0), Err(Error::ZeroFrequency)));
        let one = RotationSequence::from_phases("x", PI, &[0.0]).unwrap();
        let dd = DDSequence::new(one, vec![PI / 4.0, 1.0]).unwrap();
        let d = osc_field_dressed(&dd, 2.0, 0.6).unwrap();
        let phase = d.pulses().unwrap().phases().unwrap()[0];
        assert!((phase - 0.3).abs() < 1e-15);
    }

    #[test]
    fn nest_dd_delays() {
        let outer = DDSequence::equally_spaced(
            RotationSequence::from_phases("o", PI, &[0.0, PI / 2.0]).unwrap(),
        );
        let inner = RotationSequence::from_phases("i", PI, &[0.0, 1.0, 0.0]).unwrap();
        let dd = nest_dd(&outer, &inner).unwrap();
        assert_eq!(dd.delays(), &[0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn grids() {
        assert_eq!(lin_space(0.0, 2.0, 3), vec![0.0, 1.0, 2.0]);
        let g = log_space(0.1, 100.0, 4);
        assert!((g[0] - 0.1).abs() < 1e-15 && (g[3] - 100.0).abs() < 1e-12);
    }
}
