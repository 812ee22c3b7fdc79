//! Rank-2 suppression under virtual magic-angle spinning.
//!
//! Three equal delays separated by `2π/3` rotations about `(1,1,1)/√3`
//! average a rank-2 interaction to zero. Replacing each rotation by the
//! compensated four-element block keeps the average zero to first order in
//! the flip-angle error.

use serde::Serialize;

use crate::averaging::{kappa, KappaTable};
use crate::catalog::{p34, virtual_mas};
use crate::ddsim::DDSequence;
use crate::error::Result;
use crate::par::{self, Exec};

/// Uncompensated cycle, or three compensated blocks with a unit delay
/// before each block and none inside.
pub fn mas_cycle(compensated: bool) -> DDSequence {
    if !compensated {
        return virtual_mas();
    }
    let block = p34();
    let pulses = block.concat(&block).concat(&block).with_name("VMAS(P34)");
    let k = block.len();
    let mut delays = vec![0.0; 3 * k + 1];
    for b in 0..3 {
        delays[b * k] = 1.0;
    }
    DDSequence::new(pulses, delays).expect("delay count matches")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasRow {
    pub beta_scale: f64,
    pub compensated: bool,
    /// `max_{μ′} |κ_{2,0,μ′}|`.
    pub max_abs: f64,
    pub kappa: KappaTable,
}

pub fn mas_kappa_sweep(compensated: bool, scales: &[f64], exec: Exec) -> Result<Vec<MasRow>> {
    let dd = mas_cycle(compensated);
    par::map(exec, scales, |&c| {
        let k = kappa(&dd, 2, c)?;
        Ok(MasRow {
            beta_scale: c,
            compensated,
            max_abs: k.row_max(0),
            kappa: k,
        })
    })
    .into_iter()
    .collect()
}

/// Finite-difference slope `max|κ_{2,0,·}|(ε)/ε` at `ε = β′ − β = h`.
pub fn suppression_slope(compensated: bool, h: f64) -> Result<f64> {
    let dd = mas_cycle(compensated);
    let beta = dd.pulses().expect("pulses").nominal_beta();
    let at = |eps: f64| kappa(&dd, 2, 1.0 + eps / beta).map(|k| k.row_max(0));
    Ok((at(h)? - at(0.0)?) / h)
}
