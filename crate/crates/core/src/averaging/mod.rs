//! Error analysis in the toggling frame.
//!
//! With a uniform error `ε` on every element angle, the erroneous propagator
//! factors as `U(β+ε) = U(β)·Ṽ(ε)` with `Ṽ(ε) = R(ε, ẽ_{n−1}) ⋯ R(ε, ẽ_0)`.
//! [`average_orders`] gives the first three terms of `log Ṽ` as rotation
//! vectors per power of `ε`; [`numeric_error_expansion`] extracts the same
//! coefficients by fitting the matrix logarithm directly.

mod wigner;

pub use wigner::{kappa, wigner_d, KappaTable};

use nalgebra::{DMatrix, DVector, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotcore::{compose, Rotation, RotationVector, UnitVector3};
use crate::seqmodel::{angle_diff, RotationSequence};
use crate::toggling::toggled_axes;

/// Default tolerance for [`is_balanced`].
pub const BALANCE_TOL: f64 = 1e-9;
const SYMMETRY_TOL: f64 = 1e-9;
const FIT_RESIDUAL_TOL: f64 = 1e-8;

/// Arithmetic mean of a set of unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub vector: RotationVector,
}

impl Centroid {
    pub fn magnitude(&self) -> f64 {
        self.vector.magnitude()
    }
}

pub fn centroid(vectors: &[UnitVector3]) -> Result<Centroid> {
    if vectors.is_empty() {
        return Err(Error::Empty("vector set"));
    }
    let sum: Vector3<f64> = vectors.iter().map(|v| *v.as_vector()).sum();
    Ok(Centroid {
        vector: RotationVector(sum / vectors.len() as f64),
    })
}

/// `|C| < tol`; an empty set is not balanced.
pub fn is_balanced(vectors: &[UnitVector3], tol: f64) -> bool {
    centroid(vectors).is_ok_and(|c| c.magnitude() < tol)
}

/// Coefficients of `ε`, `ε²`, `ε³` in the rotation vector of `Ṽ(ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageRotationOrders {
    pub order1: RotationVector,
    pub order2: RotationVector,
    pub order3: RotationVector,
}

impl AverageRotationOrders {
    pub fn orders(&self) -> [RotationVector; 3] {
        [self.order1, self.order2, self.order3]
    }

    /// Largest `|a_k − b_k| / max(1, |b_k|)` over the three orders.
    pub fn relative_deviation(&self, reference: &Self) -> f64 {
        self.orders()
            .iter()
            .zip(reference.orders())
            .map(|(a, b)| (a.0 - b.0).norm() / b.magnitude().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Closed-form orders from the toggled axes `ẽ_i` (element 0 first):
///
/// * `order1 = Σ ẽ_i`
/// * `order2 = ½ Σ_{j>i} ẽ_j × ẽ_i`
/// * `order3 = ⅙ Σ_{k>j>i} [ẽ_k×(ẽ_j×ẽ_i) + ẽ_i×(ẽ_j×ẽ_k)]
///   + 1/12 Σ_{j>i} [ẽ_j×(ẽ_j×ẽ_i) + ẽ_i×(ẽ_i×ẽ_j)]`
pub fn average_orders(vectors: &[UnitVector3]) -> AverageRotationOrders {
    let e: Vec<Vector3<f64>> = vectors.iter().map(|v| *v.as_vector()).collect();
    let n = e.len();
    let order1: Vector3<f64> = e.iter().sum();

    let mut order2 = Vector3::zeros();
    let mut pair3 = Vector3::zeros();
    for j in 0..n {
        for i in 0..j {
            order2 += e[j].cross(&e[i]);
            pair3 += e[j].cross(&e[j].cross(&e[i])) + e[i].cross(&e[i].cross(&e[j]));
        }
    }

    // Σ_{k>j>i} with prefix sums over i and suffix sums over k.
    let mut triple3 = Vector3::zeros();
    let mut before: Vector3<f64> = Vector3::zeros();
    let total = order1;
    for ej in e.iter() {
        let after = total - before - ej;
        // Σ_{i<j} Σ_{k>j} ẽ_k×(ẽ_j×ẽ_i) + ẽ_i×(ẽ_j×ẽ_k)
        //   = after×(ẽ_j×before) + before×(ẽ_j×after)
        triple3 += after.cross(&ej.cross(&before)) + before.cross(&ej.cross(&after));
        before += ej;
    }

    AverageRotationOrders {
        order1: RotationVector(order1),
        order2: RotationVector(order2 / 2.0),
        order3: RotationVector(triple3 / 6.0 + pair3 / 12.0),
    }
}

/// Symmetric grid `linspace(−h, h, points)` used by the numeric oracle.
pub fn default_eps_grid() -> Vec<f64> {
    let (h, points) = (1e-2, 21);
    (0..points)
        .map(|k| -h + 2.0 * h * k as f64 / (points - 1) as f64)
        .collect()
}

/// Orders of `log Ṽ(ε)` fitted from the exact product of `R(ε, ẽ_i)`.
pub fn numeric_orders_of_vectors(
    vectors: &[UnitVector3],
    eps_grid: &[f64],
) -> Result<AverageRotationOrders> {
    fit_orders(eps_grid, |eps| {
        vectors.iter().fold(Rotation::identity(), |v, e| {
            compose(&Rotation::from_axis_angle(e, eps), &v)
        })
    })
}

/// Orders of `U_n(c)⁻¹·U_n(c; +ε)` where every element angle is `c·β_i + ε`.
pub fn numeric_error_expansion(
    s: &RotationSequence,
    scale: f64,
    eps_grid: &[f64],
) -> Result<AverageRotationOrders> {
    let base_inv = s.propagator(scale).inverse();
    fit_orders(eps_grid, |eps| {
        let u = s.elements().iter().fold(Rotation::identity(), |u, e| {
            compose(&Rotation::from_axis_angle(e.axis(), scale * e.beta() + eps), &u)
        });
        compose(&base_inv, &u)
    })
}

fn fit_orders<F: Fn(f64) -> Rotation>(eps_grid: &[f64], v: F) -> Result<AverageRotationOrders> {
    let h = eps_grid.iter().fold(0.0_f64, |a, e| a.max(e.abs()));
    let symmetric = eps_grid
        .iter()
        .all(|&x| eps_grid.iter().any(|&y| (x + y).abs() <= 1e-12 * h.max(1e-300)));
    if eps_grid.len() < 5 || h == 0.0 || !symmetric {
        return Err(Error::Precondition(
            "error grid must be symmetric about 0 with at least 5 points".into(),
        ));
    }
    let degree = (eps_grid.len() - 1).min(7);
    let rows = eps_grid.len();
    let a = DMatrix::from_fn(rows, degree, |r, c| (eps_grid[r] / h).powi(c as i32 + 1));
    let mut b = DMatrix::zeros(rows, 3);
    for (r, &eps) in eps_grid.iter().enumerate() {
        let rv = v(eps).rotation_vector().0;
        for c in 0..3 {
            b[(r, c)] = rv[c];
        }
    }
    let svd = a.clone().svd(true, true);
    let coef = svd
        .solve(&b, 1e-14)
        .map_err(|e| Error::Precondition(e.to_string()))?;
    let residual = (&a * &coef - &b).abs().max();
    if !residual.is_finite() || residual > FIT_RESIDUAL_TOL {
        return Err(Error::FitFailure(residual));
    }
    let order = |k: usize| {
        let col: DVector<f64> = coef.row(k).transpose();
        RotationVector(Vector3::new(col[0], col[1], col[2]) / h.powi(k as i32 + 1))
    };
    Ok(AverageRotationOrders {
        order1: order(0),
        order2: order(1),
        order3: order(2),
    })
}

/// Order-reversal symmetry of a sequence or a vector set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    Neither,
}

/// Phase rule for equatorial sequences (`φ_i = ±φ_{n−1−i}` mod 2π),
/// vector rule otherwise.
pub fn symmetry_class(s: &RotationSequence) -> SymmetryClass {
    match s.phases() {
        Ok(p) => phase_symmetry(&p),
        Err(_) => vector_symmetry(&s.axes()),
    }
}

pub fn phase_symmetry(phases: &[f64]) -> SymmetryClass {
    let n = phases.len();
    let holds = |sign: f64| {
        (0..n).all(|i| angle_diff(phases[i], sign * phases[n - 1 - i]).abs() < SYMMETRY_TOL)
    };
    if holds(1.0) {
        SymmetryClass::Symmetric
    } else if holds(-1.0) {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Neither
    }
}

/// `e_i = e_{n−1−i}` (symmetric) or `e_i = −e_{n−1−i}` (antisymmetric).
pub fn vector_symmetry(vectors: &[UnitVector3]) -> SymmetryClass {
    let n = vectors.len();
    let holds = |sign: f64| {
        (0..n).all(|i| {
            (vectors[i].as_vector() - sign * vectors[n - 1 - i].as_vector()).norm() < SYMMETRY_TOL
        })
    };
    if holds(1.0) {
        SymmetryClass::Symmetric
    } else if holds(-1.0) {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Neither
    }
}

/// Toggled-frame orders of a sequence at scale `c`.
pub fn sequence_orders(s: &RotationSequence, scale: f64) -> AverageRotationOrders {
    average_orders(&toggled_axes(s, scale))
}
