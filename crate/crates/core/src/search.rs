//! Exhaustive synthesis on discrete axis sets.
//!
//! Every ordered `n`-tuple of vertices is treated as a candidate toggled set
//! `{e_i^(1)}`. Balanced tuples are reverse-transformed to `{e_i^(0)}` and kept
//! when the net rotation matches the target.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rotcore::{Rotation, UnitVector3};
use crate::seqmodel::{RotationSequence, EQUATORIAL_TOL};
use crate::toggling::inverse_toggling_map;

/// Upper bound on `|axes|^n`.
pub const SEARCH_GUARD: u128 = 1_000_000_000;
const TARGET_TOL: f64 = 1e-8;
const BALANCE_TOL: f64 = 1e-9;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSet {
    pub name: String,
    pub vertices: Vec<UnitVector3>,
}

fn normalized(name: &str, raw: &[[f64; 3]]) -> AxisSet {
    let vertices = raw
        .iter()
        .map(|v| UnitVector3::normalize(v[0], v[1], v[2]).expect("nonzero vertex"))
        .collect();
    AxisSet::new(name, vertices).expect("distinct vertices")
}

impl AxisSet {
    pub fn new(name: impl Into<String>, vertices: Vec<UnitVector3>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Empty("axis set"));
        }
        for (i, a) in vertices.iter().enumerate() {
            if vertices[..i].iter().any(|b| a.dot(b) >= 1.0 - 1e-10) {
                return Err(Error::InvalidParams {
                    name: "axis set".into(),
                    reason: format!("vertex {i} repeats an earlier vertex"),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            vertices,
        })
    }

    pub fn tetrahedron() -> Self {
        normalized(
            "tetrahedron",
            &[[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]],
        )
    }

    pub fn cube() -> Self {
        let mut raw = Vec::new();
        for x in [1.0, -1.0] {
            for y in [1.0, -1.0] {
                for z in [1.0, -1.0] {
                    raw.push([x, y, z]);
                }
            }
        }
        normalized("cube", &raw)
    }

    pub fn octahedron() -> Self {
        normalized(
            "octahedron",
            &[
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
        )
    }

    /// Four cube vertices in the plane `x + z = 0`.
    pub fn diagonal_quad() -> Self {
        normalized(
            "diagonal-quad",
            &[[-1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, -1.0], [-1.0, -1.0, 1.0]],
        )
    }

    pub fn icosahedron() -> Self {
        let g = (1.0 + 5f64.sqrt()) / 2.0;
        let mut raw = Vec::new();
        for a in [1.0, -1.0] {
            for b in [g, -g] {
                raw.push([0.0, a, b]);
                raw.push([a, b, 0.0]);
                raw.push([b, 0.0, a]);
            }
        }
        normalized("icosahedron", &raw)
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "tetrahedron" | "tet" => Ok(Self::tetrahedron()),
            "cube" => Ok(Self::cube()),
            "octahedron" | "oct" => Ok(Self::octahedron()),
            "diagonal-quad" | "quad" => Ok(Self::diagonal_quad()),
            "icosahedron" | "ico" => Ok(Self::icosahedron()),
            other => Err(Error::InvalidParams {
                name: "axis set".into(),
                reason: format!("unknown axis set `{other}`"),
            }),
        }
    }

    /// Proper rotations mapping the vertex set onto itself.
    pub fn rotation_group(&self) -> Vec<Matrix3<f64>> {
        let v: Vec<Vector3<f64>> = self.vertices.iter().map(|u| *u.as_vector()).collect();
        let Some((i0, i1)) = independent_pair(&v) else {
            // Collinear set: only the identity and flips are possible; keep identity.
            return vec![Matrix3::identity()];
        };
        let frame = |a: &Vector3<f64>, b: &Vector3<f64>| {
            let e1 = a.normalize();
            let e2 = (b - e1 * e1.dot(b)).normalize();
            Matrix3::from_columns(&[e1, e2, e1.cross(&e2)])
        };
        let src = frame(&v[i0], &v[i1]);
        let d01 = v[i0].dot(&v[i1]);
        let mut group: Vec<Matrix3<f64>> = Vec::new();
        for a in &v {
            for b in &v {
                if (a.dot(b) - d01).abs() > 1e-9 || (a - b).norm() < 1e-9 {
                    continue;
                }
                let r = frame(a, b) * src.transpose();
                let closed = v
                    .iter()
                    .all(|x| v.iter().any(|y| (r * x - y).norm() < 1e-9));
                if closed && !group.iter().any(|g| (g - r).norm() < 1e-9) {
                    group.push(r);
                }
            }
        }
        group
    }
}

fn independent_pair(v: &[Vector3<f64>]) -> Option<(usize, usize)> {
    (1..v.len()).find_map(|j| (v[0].cross(&v[j]).norm() > 1e-6).then_some((0, j)))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Rotation(Rotation),
    /// Any rotation by `π` about an axis in the xy plane.
    AnyEquatorialPi,
    /// `e_x → e_y → e_z → e_x`.
    AxisCycling,
}

impl Target {
    pub fn matches(&self, net: &Rotation) -> bool {
        match self {
            Target::Rotation(r) => net.distance(r) < TARGET_TOL,
            Target::AnyEquatorialPi => {
                let (axis, angle) = net.to_axis_angle();
                (angle - PI).abs() < TARGET_TOL && axis.z().abs() < TARGET_TOL
            }
            Target::AxisCycling => [
                (UnitVector3::X, UnitVector3::Y),
                (UnitVector3::Y, UnitVector3::Z),
                (UnitVector3::Z, UnitVector3::X),
            ]
            .iter()
            .all(|(a, b)| net.rotate(a).distance(b) < TARGET_TOL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceMode {
    /// `C^(1) = 0`.
    Full,
    /// `C_z^(1) = 0`.
    ZOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpec {
    pub axis_set: AxisSet,
    pub n: usize,
    pub m: u32,
    pub target: Target,
    pub balance: BalanceMode,
    /// Keep only sequences whose `e_i^(0)` all lie in the xy plane.
    pub equatorial_only: bool,
}

impl SearchSpec {
    pub fn space_size(&self) -> u128 {
        (self.axis_set.vertices.len() as u128).saturating_pow(self.n as u32)
    }

    fn check(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams {
                name: "search".into(),
                reason: "n must be at least 1".into(),
            });
        }
        if self.m == 0 {
            return Err(Error::InvalidParams {
                name: "search".into(),
                reason: "m must be at least 1".into(),
            });
        }
        let size = self.space_size();
        if self.n > 64 || size > SEARCH_GUARD {
            return Err(Error::SearchTooLarge(size));
        }
        Ok(())
    }
}

fn balanced(tuple: &[UnitVector3], mode: BalanceMode) -> bool {
    let sum: Vector3<f64> = tuple.iter().map(|v| *v.as_vector()).sum();
    let c = sum / tuple.len() as f64;
    match mode {
        BalanceMode::Full => c.norm() < BALANCE_TOL,
        BalanceMode::ZOnly => c.z.abs() < BALANCE_TOL,
    }
}

/// Tests one toggled tuple; returns the reverse-transformed sequence when it
/// passes balance, the equatorial filter and the target.
pub fn evaluate_tuple(spec: &SearchSpec, tuple: &[UnitVector3]) -> Option<RotationSequence> {
    if !balanced(tuple, spec.balance) {
        return None;
    }
    let beta = TAU / spec.m as f64;
    let toggled = RotationSequence::from_axes("t", beta, tuple).ok()?;
    let s0 = inverse_toggling_map(&toggled);
    if spec.equatorial_only && !s0.axes().iter().all(|a| a.is_equatorial(1e-9)) {
        return None;
    }
    spec.target
        .matches(&s0.propagator(1.0))
        .then(|| s0.with_name(format!("{}-{}", spec.axis_set.name, spec.n)))
}

/// Odometer over all ordered tuples, element 0 most significant.
pub fn enumerate_balanced(spec: &SearchSpec, exec: Exec) -> Result<Vec<RotationSequence>> {
    spec.check()?;
    let k = spec.axis_set.vertices.len() as u64;
    let n = spec.n;
    let total = spec.space_size() as u64;
    let verts = &spec.axis_set.vertices;
    let mut found = par::flat_map_chunks(exec, total, CHUNK, |range| {
        let mut out = Vec::new();
        let mut tuple = vec![verts[0]; n];
        for idx in range {
            let mut rest = idx;
            for slot in (0..n).rev() {
                tuple[slot] = verts[(rest % k) as usize];
                rest /= k;
            }
            if let Some(s) = evaluate_tuple(spec, &tuple) {
                out.push(s);
            }
        }
        out
    });
    for (i, s) in found.iter_mut().enumerate() {
        *s = s.clone().with_name(format!("{}-{}#{}", spec.axis_set.name, n, i));
    }
    Ok(found)
}

/// Axis-cycling search with non-equatorial `e^(0)` on the octahedron.
pub fn nonequatorial_search(spec: &SearchSpec, exec: Exec) -> Result<Vec<RotationSequence>> {
    if spec.target != Target::AxisCycling || spec.axis_set.name != "octahedron" {
        return Err(Error::Precondition(
            "non-equatorial search needs the octahedron and an axis-cycling target".into(),
        ));
    }
    let spec = SearchSpec {
        equatorial_only: false,
        ..spec.clone()
    };
    enumerate_balanced(&spec, exec)
}

/// Equivalences used to collapse search results into classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Symmetry {
    None,
    /// Global rotations about `e_z`.
    GlobalZ,
    /// The rotation group of the given axis set, applied to all axes.
    AxisSetRotations(AxisSet),
    /// Global z rotations, the phase flip `φ → −φ` (a global π rotation about
    /// `e_x`), and time reversal with negated axes (net rotation transposed).
    GlobalZMirrorReverse,
}

type Key = Vec<[i64; 3]>;

fn key_of(axes: &[Vector3<f64>]) -> Key {
    axes.iter()
        .map(|v| {
            let q = |x: f64| {
                let r = (x * 1e8).round() as i64;
                if r == 0 {
                    0
                } else {
                    r
                }
            };
            [q(v.x), q(v.y), q(v.z)]
        })
        .collect()
}

fn z_canonical(axes: &[Vector3<f64>]) -> Option<Vec<Vector3<f64>>> {
    let first = axes
        .iter()
        .find(|v| v.z.abs() < EQUATORIAL_TOL.max(1e-9) && v.xy().norm() > 0.5)?;
    let phi = first.y.atan2(first.x);
    let r = Rotation::from_axis_angle(&UnitVector3::Z, -phi).matrix();
    Some(axes.iter().map(|v| r * v).collect())
}

fn group_canonical(axes: &[Vector3<f64>], group: &[Matrix3<f64>]) -> Key {
    group
        .iter()
        .map(|g| key_of(&axes.iter().map(|v| g * v).collect::<Vec<_>>()))
        .min()
        .unwrap_or_else(|| key_of(axes))
}

fn canonical_key(s: &RotationSequence, symmetry: &Symmetry, fallback: &[Matrix3<f64>]) -> Key {
    let axes: Vec<Vector3<f64>> = s.axes().iter().map(|a| *a.as_vector()).collect();
    let z_key = |ax: &[Vector3<f64>]| match z_canonical(ax) {
        Some(c) => key_of(&c),
        None => group_canonical(ax, fallback),
    };
    match symmetry {
        Symmetry::None => key_of(&axes),
        Symmetry::GlobalZ => z_key(&axes),
        Symmetry::AxisSetRotations(set) => group_canonical(&axes, &set.rotation_group()),
        Symmetry::GlobalZMirrorReverse => {
            let flip = |ax: &[Vector3<f64>]| -> Vec<Vector3<f64>> {
                ax.iter().map(|v| Vector3::new(v.x, -v.y, -v.z)).collect()
            };
            let rev: Vec<Vector3<f64>> = axes.iter().rev().map(|v| -v).collect();
            [z_key(&axes), z_key(&flip(&axes)), z_key(&rev), z_key(&flip(&rev))]
                .into_iter()
                .min()
                .expect("four candidates")
        }
    }
}

/// One representative per class: the lexicographically smallest canonical
/// axis list, built from the first member of the class.
pub fn dedupe(results: &[RotationSequence], symmetry: &Symmetry) -> Vec<RotationSequence> {
    let fallback = match symmetry {
        Symmetry::AxisSetRotations(set) => set.rotation_group(),
        _ => AxisSet::octahedron().rotation_group(),
    };
    let mut classes: BTreeMap<Key, &RotationSequence> = BTreeMap::new();
    for s in results {
        classes
            .entry(canonical_key(s, symmetry, &fallback))
            .or_insert(s);
    }
    classes
        .into_iter()
        .enumerate()
        .map(|(i, (key, s))| {
            let axes: Vec<UnitVector3> = key
                .iter()
                .map(|k| {
                    UnitVector3::normalize(k[0] as f64, k[1] as f64, k[2] as f64)
                        .expect("unit-scale key")
                })
                .collect();
            let name = format!("{}~{}", s.name(), i);
            if axes.iter().all(|a| a.is_equatorial(EQUATORIAL_TOL)) {
                let phases: Vec<f64> = axes.iter().map(UnitVector3::phase).collect();
                RotationSequence::from_phases(name, s.nominal_beta(), &phases)
                    .expect("nonempty class")
            } else {
                s.with_axes(name, &axes)
            }
        })
        .collect()
}

/// `(β′ = 1.1β error of s, error of a single rotation realizing the target)`
/// in degrees; compensation means the first is smaller.
pub fn compensation_margin(s: &RotationSequence, target: &Rotation) -> (f64, f64) {
    let err = crate::profiles::rotation_error(s, 1.1 * s.nominal_beta(), target);
    let single = 0.1 * target.angle().to_degrees();
    (err, single)
}
