//! Piecewise rotation sequences and their structural algebra.
//!
//! A [`RotationSequence`] is an ordered list of `(β_i, e_i)` elements with
//! left-to-right chronology: element 0 acts first. Phases are kept unreduced
//! internally; they are reduced to `[0, 2π)` only when written out.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::rotcore::{compose, Rotation, UnitVector3};

/// Element-wise tolerance used by [`RotationSequence::approx_eq`].
pub const SEQ_TOL: f64 = 1e-10;
/// `|z|` below which an axis counts as equatorial.
pub const EQUATORIAL_TOL: f64 = 1e-12;
const CYCLE_TOL: f64 = 1e-12;

/// Reduces an angle to `[0, 2π)`, snapping values within 1e-12 of 2π to 0.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if TAU - r < 1e-12 {
        0.0
    } else {
        r
    }
}

/// Signed difference `a − b` wrapped into `(−π, π]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = reduce_angle(a - b);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// The `(phase, latitude)` pair an element was built from, kept so that
/// exact phase relations survive without a round trip through `atan2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOrigin {
    pub phase: f64,
    pub latitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseElement {
    beta: f64,
    axis: UnitVector3,
    origin: Option<PhaseOrigin>,
}

impl PulseElement {
    pub fn new(beta: f64, axis: UnitVector3) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self {
            beta,
            axis,
            origin: None,
        })
    }

    pub fn from_phase(beta: f64, phase: f64, latitude: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self {
            beta,
            axis: UnitVector3::from_phase(phase, latitude),
            origin: Some(PhaseOrigin { phase, latitude }),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn axis(&self) -> &UnitVector3 {
        &self.axis
    }

    pub fn origin(&self) -> Option<PhaseOrigin> {
        self.origin
    }

    /// Phase of the axis; the unreduced construction phase when available.
    pub fn phase(&self) -> f64 {
        match self.origin {
            Some(o) => o.phase,
            None => self.axis.phase(),
        }
    }

    pub fn is_equatorial(&self) -> bool {
        match self.origin {
            Some(o) => o.latitude == 0.0,
            None => self.axis.is_equatorial(EQUATORIAL_TOL),
        }
    }

    /// `R(scale·β, e)`.
    pub fn rotation(&self, scale: f64) -> Rotation {
        Rotation::from_axis_angle(&self.axis, scale * self.beta)
    }

    pub(crate) fn with_axis(&self, axis: UnitVector3) -> Self {
        Self {
            beta: self.beta,
            axis,
            origin: None,
        }
    }

    pub(crate) fn with_phase(&self, phase: f64) -> Self {
        Self {
            beta: self.beta,
            axis: UnitVector3::from_phase(phase, 0.0),
            origin: Some(PhaseOrigin {
                phase,
                latitude: 0.0,
            }),
        }
    }

    /// The same element with its axis rotated about `e_z` by `dphi`.
    pub fn rotated_about_z(&self, dphi: f64) -> Self {
        match self.origin {
            Some(o) => Self {
                beta: self.beta,
                axis: UnitVector3::from_phase(o.phase + dphi, o.latitude),
                origin: Some(PhaseOrigin {
                    phase: o.phase + dphi,
                    latitude: o.latitude,
                }),
            },
            None => self.with_axis(
                Rotation::from_axis_angle(&UnitVector3::Z, dphi).rotate(&self.axis),
            ),
        }
    }

    fn with_beta(&self, beta: f64) -> Self {
        Self { beta, ..self.clone() }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAngle(beta))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationSequence {
    name: String,
    elements: Vec<PulseElement>,
    cycle_order: Option<u32>,
}

impl RotationSequence {
    /// Builds a sequence; the cycle order is detected when every element
    /// angle equals `2π/m` for one integer `m`.
    pub fn new(name: impl Into<String>, elements: Vec<PulseElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("rotation sequence"));
        }
        let cycle_order = detect_cycle_order(&elements);
        Ok(Self {
            name: name.into(),
            elements,
            cycle_order,
        })
    }

    /// Uniform-angle equatorial sequence `(β)_{φ_0} (β)_{φ_1} …`.
    pub fn from_phases(name: impl Into<String>, beta: f64, phases: &[f64]) -> Result<Self> {
        let elements = phases
            .iter()
            .map(|&p| PulseElement::from_phase(beta, p, 0.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, elements)
    }

    pub fn from_axes(name: impl Into<String>, beta: f64, axes: &[UnitVector3]) -> Result<Self> {
        let elements = axes
            .iter()
            .map(|a| PulseElement::new(beta, *a))
            .collect::<Result<Vec<_>>>()?;
        Self::new(name, elements)
    }

    /// Declares the cycle order explicitly, checking every element angle.
    pub fn with_cycle_order(mut self, m: u32) -> Result<Self> {
        let beta = TAU / m as f64;
        if let Some(e) = self
            .elements
            .iter()
            .find(|e| (e.beta - beta).abs() >= CYCLE_TOL)
        {
            return Err(Error::CycleOrder { m, beta: e.beta });
        }
        self.cycle_order = Some(m);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn elements(&self) -> &[PulseElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    /// Always false: sequences have at least one element.
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cycle_order(&self) -> Option<u32> {
        self.cycle_order
    }

    pub fn axes(&self) -> Vec<UnitVector3> {
        self.elements.iter().map(|e| e.axis).collect()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.beta).collect()
    }

    /// The common element angle, if all elements share it within 1e-12.
    pub fn uniform_beta(&self) -> Option<f64> {
        let b0 = self.elements[0].beta;
        self.elements
            .iter()
            .all(|e| (e.beta - b0).abs() < CYCLE_TOL)
            .then_some(b0)
    }

    /// Reference angle `β` against which an actual angle `β′` is expressed
    /// as the scale `β′/β`: the uniform angle, or the first element's angle.
    pub fn nominal_beta(&self) -> f64 {
        self.uniform_beta().unwrap_or(self.elements[0].beta)
    }

    pub fn is_equatorial(&self) -> bool {
        self.elements.iter().all(PulseElement::is_equatorial)
    }

    pub fn phases(&self) -> Result<Vec<f64>> {
        if !self.is_equatorial() {
            return Err(Error::NotEquatorial(self.name.clone()));
        }
        Ok(self.elements.iter().map(PulseElement::phase).collect())
    }

    /// `U_i = R(c·β_{i−1}, e_{i−1}) ⋯ R(c·β_0, e_0)` with `c = scale`;
    /// `i = 0` is the identity and `i = n` the full propagator.
    pub fn prefix_propagator(&self, i: usize, scale: f64) -> Result<Rotation> {
        if i > self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(self.elements[..i]
            .iter()
            .fold(Rotation::identity(), |u, e| compose(&e.rotation(scale), &u)))
    }

    /// All `n + 1` prefix propagators `U_0 … U_n`.
    pub fn prefix_propagators(&self, scale: f64) -> Vec<Rotation> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut u = Rotation::identity();
        out.push(u);
        for e in &self.elements {
            u = compose(&e.rotation(scale), &u);
            out.push(u);
        }
        out
    }

    /// Net propagator `U_n` with every angle multiplied by `scale`.
    pub fn propagator(&self, scale: f64) -> Rotation {
        self.elements
            .iter()
            .fold(Rotation::identity(), |u, e| compose(&e.rotation(scale), &u))
    }

    /// Largest Euclidean distance between corresponding axes; `∞` on length
    /// mismatch.
    pub fn max_axis_deviation(&self, other: &Self) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.axis.distance(&b.axis))
            .fold(0.0, f64::max)
    }

    /// Element-wise equality: `e_a·e_b > 1 − tol` and `|Δβ| < tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.axis.dot(&b.axis) > 1.0 - tol && (a.beta - b.beta).abs() < tol)
    }

    pub(crate) fn with_axes(&self, name: impl Into<String>, axes: &[UnitVector3]) -> Self {
        debug_assert_eq!(axes.len(), self.len());
        Self {
            name: name.into(),
            elements: self
                .elements
                .iter()
                .zip(axes)
                .map(|(e, a)| e.with_axis(*a))
                .collect(),
            cycle_order: self.cycle_order,
        }
    }

    fn rebuilt(&self, name: String, elements: Vec<PulseElement>) -> Self {
        let cycle_order = detect_cycle_order(&elements);
        Self {
            name,
            elements,
            cycle_order,
        }
    }

    /// Elements in reverse chronological order.
    pub fn reverse(&self) -> Self {
        let mut el = self.elements.clone();
        el.reverse();
        self.rebuilt(format!("rev({})", self.name), el)
    }

    /// Rotates the element list left by `shift` places.
    pub fn cyclic_permute(&self, shift: usize) -> Self {
        let mut el = self.elements.clone();
        let k = shift % el.len();
        el.rotate_left(k);
        self.rebuilt(format!("perm{}({})", k, self.name), el)
    }

    /// Rotates every axis about `e_z` by `dphi`; adds `dphi` to stored phases.
    pub fn global_phase_shift(&self, dphi: f64) -> Self {
        let el = self
            .elements
            .iter()
            .map(|e| e.rotated_about_z(dphi))
            .collect();
        self.rebuilt(self.name.clone(), el)
    }

    /// Multiplies every phase by the integer `k`.
    pub fn phase_scale(&self, k: i64) -> Result<Self> {
        let phases = self.phases()?;
        let el = self
            .elements
            .iter()
            .zip(phases)
            .map(|(e, p)| e.with_phase(k as f64 * p))
            .collect();
        Ok(self.rebuilt(format!("{}[k={}]", self.name, k), el))
    }

    /// Self-riffling: each `(β, e)` becomes `(β/2, e)(β/2, e)`.
    pub fn riffle(&self) -> Self {
        let el = self
            .elements
            .iter()
            .flat_map(|e| {
                let h = e.with_beta(e.beta / 2.0);
                [h.clone(), h]
            })
            .collect();
        self.rebuilt(format!("{0}v{0}", self.name), el)
    }

    /// Concatenation `self` then `other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut el = self.elements.clone();
        el.extend(other.elements.iter().cloned());
        self.rebuilt(format!("{}{}", self.name, other.name), el)
    }
}

fn detect_cycle_order(elements: &[PulseElement]) -> Option<u32> {
    let b0 = elements.first()?.beta;
    let m = (TAU / b0).round();
    if m < 1.0 || m > u32::MAX as f64 {
        return None;
    }
    let beta = TAU / m;
    elements
        .iter()
        .all(|e| (e.beta - beta).abs() < CYCLE_TOL)
        .then_some(m as u32)
}

/// Nested composition `outer(inner)`: block `j` is the inner phase list
/// offset by outer phase `φ_j`, in reverse order for odd `j`. Element angles
/// are the inner angles.
pub fn nest(outer: &RotationSequence, inner: &RotationSequence) -> Result<RotationSequence> {
    let outer_phases = outer.phases()?;
    inner.phases()?;
    let forward = inner.elements();
    let backward: Vec<PulseElement> = forward.iter().rev().cloned().collect();
    let mut el = Vec::with_capacity(outer.len() * inner.len());
    for (j, offset) in outer_phases.iter().enumerate() {
        let block = if j % 2 == 0 { forward } else { &backward[..] };
        el.extend(block.iter().map(|e| e.with_phase(offset + e.phase())));
    }
    RotationSequence::new(format!("{}({})", outer.name, inner.name), el)
}

/// Element of the shared JSON schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementDoc {
    Phase {
        beta: f64,
        phase: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        latitude: Option<f64>,
    },
    Axis {
        beta: f64,
        axis: [f64; 3],
    },
}

/// `{"name": …, "cycle_order": …?, "elements": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_order: Option<u32>,
    pub elements: Vec<ElementDoc>,
}

impl From<&RotationSequence> for SequenceDoc {
    fn from(s: &RotationSequence) -> Self {
        let elements = s
            .elements
            .iter()
            .map(|e| match e.origin {
                Some(o) => ElementDoc::Phase {
                    beta: e.beta,
                    phase: reduce_angle(o.phase),
                    latitude: (o.latitude != 0.0).then_some(o.latitude),
                },
                None if e.axis.is_equatorial(EQUATORIAL_TOL) => ElementDoc::Phase {
                    beta: e.beta,
                    phase: reduce_angle(e.axis.phase()),
                    latitude: None,
                },
                None => ElementDoc::Axis {
                    beta: e.beta,
                    axis: e.axis.to_array(),
                },
            })
            .collect();
        SequenceDoc {
            name: s.name.clone(),
            cycle_order: s.cycle_order,
            elements,
        }
    }
}

impl TryFrom<SequenceDoc> for RotationSequence {
    type Error = Error;
    fn try_from(doc: SequenceDoc) -> Result<Self> {
        let elements = doc
            .elements
            .into_iter()
            .map(|e| match e {
                ElementDoc::Phase {
                    beta,
                    phase,
                    latitude,
                } => PulseElement::from_phase(beta, phase, latitude.unwrap_or(0.0)),
                ElementDoc::Axis { beta, axis } => {
                    PulseElement::new(beta, UnitVector3::try_from(axis)?)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let s = RotationSequence::new(doc.name, elements)?;
        match doc.cycle_order {
            Some(m) => s.with_cycle_order(m),
            None => Ok(s),
        }
    }
}

impl RotationSequence {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDoc =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_doc(&self) -> SequenceDoc {
        self.into()
    }
}
