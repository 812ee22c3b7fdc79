//! Wigner rotation matrices and delay-weighted rank-λ averages.
//!
//! `D^λ(R) = exp(−iβ e·J)` in the basis `|λ, μ⟩`, rows and columns ordered
//! `μ = −λ, …, λ`. With this convention `D¹(R_z(β)) = diag(e^{iβ}, 1, e^{−iβ})`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ddsim::DDSequence;
use crate::error::{Error, Result};
use crate::rotcore::Rotation;

pub const MAX_RANK: u32 = 3;

fn generators(lambda: u32) -> [DMatrix<Complex64>; 3] {
    let l = lambda as f64;
    let dim = 2 * lambda as usize + 1;
    let mu = |k: usize| k as f64 - l;
    let mut jp = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..dim - 1 {
        let m = mu(k);
        jp[(k + 1, k)] = Complex64::new((l * (l + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let jm = jp.adjoint();
    let jx = (&jp + &jm) * Complex64::new(0.5, 0.0);
    let jy = (&jp - &jm) * Complex64::new(0.0, -0.5);
    let jz = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(mu(r), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    [jx, jy, jz]
}

/// `(2λ+1)×(2λ+1)` Wigner matrix of `r`.
pub fn wigner_d(lambda: u32, r: &Rotation) -> Result<DMatrix<Complex64>> {
    if lambda > MAX_RANK {
        return Err(Error::UnsupportedRank(lambda));
    }
    let theta = r.rotation_vector().0;
    let [jx, jy, jz] = generators(lambda);
    let gen = jx * Complex64::new(theta.x, 0.0)
        + jy * Complex64::new(theta.y, 0.0)
        + jz * Complex64::new(theta.z, 0.0);
    Ok((gen * Complex64::new(0.0, -1.0)).exp())
}

/// Delay-weighted average `κ_{λ,μ,μ′}` of `D^λ(U_j⁻¹)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaTable {
    pub lambda: u32,
    /// Row-major `(re, im)` pairs, rows `μ`, columns `μ′`, both from `−λ`.
    pub entries: Vec<[f64; 2]>,
}

impl KappaTable {
    pub fn dim(&self) -> usize {
        2 * self.lambda as usize + 1
    }

    /// `κ_{λ,μ,μ′}` with `μ, μ′ ∈ −λ..=λ`.
    pub fn get(&self, mu: i32, mu_prime: i32) -> Complex64 {
        let l = self.lambda as i32;
        assert!(mu.abs() <= l && mu_prime.abs() <= l, "index outside rank");
        let [re, im] = self.entries[(mu + l) as usize * self.dim() + (mu_prime + l) as usize];
        Complex64::new(re, im)
    }

    /// `max_{μ′} |κ_{λ,μ,μ′}|`.
    pub fn row_max(&self, mu: i32) -> f64 {
        let l = self.lambda as i32;
        (-l..=l).map(|m| self.get(mu, m).norm()).fold(0.0, f64::max)
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| {
            let [re, im] = self.entries[r * d + c];
            Complex64::new(re, im)
        })
    }

    /// Rows `(λ, μ, μ′, re, im)`.
    pub fn rows(&self) -> Vec<(u32, i32, i32, f64, f64)> {
        let l = self.lambda as i32;
        let mut out = Vec::with_capacity(self.entries.len());
        for mu in -l..=l {
            for mp in -l..=l {
                let z = self.get(mu, mp);
                out.push((self.lambda, mu, mp, z.re, z.im));
            }
        }
        out
    }
}

/// `κ = (Σ τ_j)⁻¹ Σ_{j=0..n} τ_j D^λ(U_j⁻¹)`, with `U_j` the prefix
/// propagator at `scale` preceding delay `j`.
pub fn kappa(dd: &DDSequence, lambda: u32, scale: f64) -> Result<KappaTable> {
    if lambda > MAX_RANK {
        return Err(Error::UnsupportedRank(lambda));
    }
    let total: f64 = dd.delays().iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroDelays);
    }
    let dim = 2 * lambda as usize + 1;
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    let props = dd.pulses().map(|p| p.prefix_propagators(scale));
    for (j, &tau) in dd.delays().iter().enumerate() {
        if tau == 0.0 {
            continue;
        }
        let u = props
            .as_ref()
            .map_or_else(Rotation::identity, |p| p[j]);
        acc += wigner_d(lambda, &u.inverse())? * Complex64::new(tau / total, 0.0);
    }
    Ok(KappaTable {
        lambda,
        entries: acc.transpose().iter().map(|z| [z.re, z.im]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotcore::UnitVector3;

    #[test]
    fn z_rotation_rank_one() {
        let b = 0.7;
        let d = wigner_d(1, &Rotation::from_axis_angle(&UnitVector3::Z, b)).unwrap();
        let expect = [Complex64::from_polar(1.0, b), Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, -b)];
        for k in 0..3 {
            assert!((d[(k, k)] - expect[k]).norm() < 1e-14);
        }
        assert!(d[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn identity_and_rank_guard() {
        for l in 0..=3 {
            let d = wigner_d(l, &Rotation::identity()).unwrap();
            assert!((d - DMatrix::identity(2 * l as usize + 1, 2 * l as usize + 1)).norm() < 1e-15);
        }
        assert!(matches!(wigner_d(4, &Rotation::identity()), Err(Error::UnsupportedRank(4))));
    }
}
