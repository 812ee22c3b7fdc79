//! Named composite rotations and decoupling cycles.
//!
//! Phases are evaluated from their analytic expressions. Parameterized
//! families take `NAME:p1,p2`, e.g. `N':5` or `B':7,2`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::ddsim::{udd, DDSequence};
use crate::error::{Error, Result};
use crate::rotcore::UnitVector3;
use crate::seqmodel::{nest, RotationSequence};

/// How a sequence responds to a flip-angle error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Balanced toggled axes: first-order error cancels about `β′ = β`.
    Broadband,
    /// Balanced untoggled axes: error cancels about `β′ = 0`.
    Narrowband,
    /// `e_i^(1) = ±e_i^(0)`: equal behavior about `β′ = 0` and `β′ = π`.
    HalfBand,
    Other,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Broadband => "broadband",
            Role::Narrowband => "narrowband",
            Role::HalfBand => "half-band",
            Role::Other => "other",
        }
    }
}

pub struct Entry {
    pub name: &'static str,
    pub params: &'static str,
    pub role: Role,
    pub summary: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "F1", params: "", role: Role::Broadband, summary: "five-pulse broadband inversion, phases ±3φ, ±φ, 0" },
    Entry { name: "NB1_TPG", params: "", role: Role::Narrowband, summary: "five-pulse narrowband inversion, net axis at 4φ" },
    Entry { name: "T1", params: "", role: Role::HalfBand, summary: "five-pulse universal inversion" },
    Entry { name: "PB1", params: "", role: Role::HalfBand, summary: "nine-pulse universal inversion" },
    Entry { name: "N'", params: "n[,k]", role: Role::Narrowband, summary: "odd-n narrowband family" },
    Entry { name: "B'", params: "n[,k]", role: Role::Broadband, summary: "odd-n broadband family" },
    Entry { name: "B'(N')", params: "m,n", role: Role::Broadband, summary: "nested band-pass B'_m(N'_n)" },
    Entry { name: "N'(B')", params: "m,n", role: Role::Narrowband, summary: "nested band-pass N'_m(B'_n)" },
    Entry { name: "I34", params: "", role: Role::Broadband, summary: "2π/3 rotations giving a compensated (π)_x" },
    Entry { name: "P34", params: "", role: Role::Broadband, summary: "2π/3 rotations giving a compensated (1,1,1) axis cycle" },
    Entry { name: "Derome", params: "", role: Role::Broadband, summary: "π/2 rotations giving a compensated (π)_y" },
    Entry { name: "P46", params: "", role: Role::Broadband, summary: "π/2 octahedral axis cycle" },
    Entry { name: "P46'", params: "", role: Role::Broadband, summary: "π/2 octahedral axis cycle, second form" },
    Entry { name: "XY4", params: "", role: Role::Broadband, summary: "decoupling cycle 0, π/2, 0, π/2" },
    Entry { name: "MLEV4", params: "", role: Role::HalfBand, summary: "decoupling cycle 0, 0, π, π" },
    Entry { name: "U5", params: "", role: Role::Broadband, summary: "KDD element π/6, 0, π/2, 0, π/6" },
    Entry { name: "KDD20", params: "", role: Role::Broadband, summary: "XY4(U5) supercycle" },
    Entry { name: "Tycko", params: "", role: Role::Broadband, summary: "(π)_0 (π)_{2π/3} (π)_0" },
    Entry { name: "Tycko2", params: "", role: Role::Other, summary: "Tycko's sequence as six π/2 rotations" },
    Entry { name: "Levitt", params: "", role: Role::Other, summary: "offset-compensated (π/2)_0 (3π/2)_{π/2} (π/2)_0" },
    Entry { name: "90x180y90x", params: "", role: Role::Other, summary: "as 90x 90y 90y 90x" },
];

pub const DD_ENTRIES: &[(&str, &str)] = &[
    ("WHH4", "four π/2 pulses with τ, 2τ spacing"),
    ("VMAS", "three 2π/3 rotations about (1,1,1) with equal delays"),
    ("UDD:n", "Uhrig timing with n (π)_0 pulses"),
    ("<sequence>", "any catalog sequence with equally spaced pulses"),
];

/// `arccos(−1/4)`.
pub fn phi_f1() -> f64 {
    (-0.25f64).acos()
}

pub fn f1() -> RotationSequence {
    let p = phi_f1();
    seq("F1", PI, &[-3.0 * p, -p, 0.0, p, 3.0 * p])
}

pub fn nb1_tpg() -> RotationSequence {
    let p = phi_f1();
    seq("NB1_TPG", PI, &[p, -p, 0.0, -p, p])
}

pub fn t1() -> RotationSequence {
    let p = phi_f1();
    seq("T1", PI, &[0.0, p, p, -p, -p])
}

pub fn pb1() -> RotationSequence {
    let p = (-0.125f64).acos();
    seq("PB1", PI, &[-p, -p, p, p, p, p, -p, -p, 0.0])
}

fn check_family(name: &str, n: usize, k: i64) -> Result<()> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::InvalidParams {
            name: name.into(),
            reason: format!("n must be odd, got {n}"),
        });
    }
    if k < 1 {
        return Err(Error::InvalidParams {
            name: name.into(),
            reason: format!("k must be a positive integer, got {k}"),
        });
    }
    Ok(())
}

/// `φ_i = (2πk/n)[(−1)^{i+1}⌊(i+1)/2⌋ + (−1)^{(n−1)/2}⌊(n+1)/4⌋]`.
pub fn n_prime(n: usize, k: i64) -> Result<RotationSequence> {
    check_family("N'", n, k)?;
    let step = TAU / n as f64;
    let sign_n = if ((n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    let phases: Vec<f64> = (0..n as i64)
        .map(|i| {
            let sign_i = if (i + 1) % 2 == 0 { 1 } else { -1 };
            let c = sign_i * ((i + 1) / 2) + sign_n * ((n as i64 + 1) / 4);
            (k * c) as f64 * step
        })
        .collect();
    Ok(seq(&family_name("N'", n, k), PI, &phases))
}

/// `φ_i = −(2πk/n)(2i(i+1) − n² + 1)/4`.
pub fn b_prime(n: usize, k: i64) -> Result<RotationSequence> {
    check_family("B'", n, k)?;
    let step = TAU / n as f64;
    let n2 = (n * n) as i64;
    let phases: Vec<f64> = (0..n as i64)
        .map(|i| {
            let c = -(2 * i * (i + 1) - n2 + 1) / 4;
            (k * c) as f64 * step
        })
        .collect();
    Ok(seq(&family_name("B'", n, k), PI, &phases))
}

fn family_name(base: &str, n: usize, k: i64) -> String {
    if k == 1 {
        format!("{base}{n}")
    } else {
        format!("{base}{n},{k}")
    }
}

fn axes_seq(name: &str, beta: f64, raw: &[[f64; 3]]) -> RotationSequence {
    let axes: Vec<UnitVector3> = raw
        .iter()
        .map(|v| UnitVector3::normalize(v[0], v[1], v[2]).expect("nonzero axis"))
        .collect();
    RotationSequence::from_axes(name, beta, &axes).expect("nonempty")
}

fn seq(name: &str, beta: f64, phases: &[f64]) -> RotationSequence {
    RotationSequence::from_phases(name, beta, phases).expect("nonempty, positive angle")
}

pub fn i34() -> RotationSequence {
    axes_seq(
        "I34",
        TAU / 3.0,
        &[[-1.0, 1.0, 1.0], [-1.0, -1.0, -1.0], [-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0]],
    )
}

pub fn p34() -> RotationSequence {
    axes_seq(
        "P34",
        TAU / 3.0,
        &[[1.0, 1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, 1.0, 1.0], [1.0, -1.0, -1.0]],
    )
}

pub fn derome() -> RotationSequence {
    seq("Derome", FRAC_PI_2, &[0.0, FRAC_PI_2, PI, FRAC_PI_2, 0.0, FRAC_PI_2])
}

pub fn p46() -> RotationSequence {
    axes_seq(
        "P46",
        FRAC_PI_2,
        &[[-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]],
    )
}

pub fn p46_prime() -> RotationSequence {
    axes_seq(
        "P46'",
        FRAC_PI_2,
        &[[0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
    )
}

pub fn xy4() -> RotationSequence {
    seq("XY4", PI, &[0.0, FRAC_PI_2, 0.0, FRAC_PI_2])
}

pub fn mlev4() -> RotationSequence {
    seq("MLEV4", PI, &[0.0, 0.0, PI, PI])
}

pub fn u5() -> RotationSequence {
    seq("U5", PI, &[PI / 6.0, 0.0, FRAC_PI_2, 0.0, PI / 6.0])
}

pub fn kdd20() -> RotationSequence {
    nest(&xy4(), &u5())
        .expect("equatorial inputs")
        .with_name("KDD20")
}

pub fn tycko() -> RotationSequence {
    seq("Tycko", PI, &[0.0, TAU / 3.0, 0.0])
}

pub fn tycko_riffled() -> RotationSequence {
    tycko().riffle().with_name("Tycko2")
}

pub fn levitt() -> RotationSequence {
    seq("Levitt", FRAC_PI_2, &[0.0, FRAC_PI_2, FRAC_PI_2, FRAC_PI_2, 0.0])
}

pub fn ninety_180_ninety() -> RotationSequence {
    seq("90x180y90x", FRAC_PI_2, &[0.0, FRAC_PI_2, FRAC_PI_2, 0.0])
}

fn parse_params(name: &str, raw: Option<&str>) -> Result<Vec<i64>> {
    let Some(raw) = raw else { return Ok(vec![]) };
    raw.split(',')
        .map(|p| {
            p.trim().parse::<i64>().map_err(|_| Error::InvalidParams {
                name: name.into(),
                reason: format!("`{p}` is not an integer"),
            })
        })
        .collect()
}

fn split_name(full: &str) -> (&str, Option<&str>) {
    match full.split_once(':') {
        Some((n, p)) => (n.trim(), Some(p)),
        None => (full.trim(), None),
    }
}

fn canonical(name: &str) -> String {
    name.to_ascii_lowercase().replace('′', "'").replace("prime", "'")
}

fn usize_param(name: &str, v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::InvalidParams {
        name: name.into(),
        reason: format!("{v} must be non-negative"),
    })
}

/// Looks up a catalog sequence by name, with optional `:params`.
pub fn named(full: &str) -> Result<RotationSequence> {
    let (base, raw) = split_name(full);
    let params = parse_params(base, raw)?;
    let key = canonical(base);
    let fixed = |s: RotationSequence| {
        if params.is_empty() {
            Ok(s)
        } else {
            Err(Error::InvalidParams {
                name: base.into(),
                reason: "takes no parameters".into(),
            })
        }
    };
    match key.as_str() {
        "f1" => fixed(f1()),
        "nb1_tpg" | "nb1" => fixed(nb1_tpg()),
        "t1" => fixed(t1()),
        "pb1" => fixed(pb1()),
        "i34" => fixed(i34()),
        "p34" => fixed(p34()),
        "derome" | "i46" => fixed(derome()),
        "p46" => fixed(p46()),
        "p46'" => fixed(p46_prime()),
        "xy4" => fixed(xy4()),
        "mlev4" => fixed(mlev4()),
        "u5" => fixed(u5()),
        "kdd20" | "kdd" => fixed(kdd20()),
        "tycko" => fixed(tycko()),
        "tycko2" => fixed(tycko_riffled()),
        "levitt" => fixed(levitt()),
        "90x180y90x" => fixed(ninety_180_ninety()),
        "n'" | "b'" => {
            let (n, k) = match params[..] {
                [n] => (n, 1),
                [n, k] => (n, k),
                _ => {
                    return Err(Error::InvalidParams {
                        name: base.into(),
                        reason: "expects n or n,k".into(),
                    })
                }
            };
            let n = usize_param(base, n)?;
            if key == "n'" {
                n_prime(n, k)
            } else {
                b_prime(n, k)
            }
        }
        "b'(n')" | "n'(b')" => {
            let [m, n] = params[..] else {
                return Err(Error::InvalidParams {
                    name: base.into(),
                    reason: "expects m,n".into(),
                });
            };
            let (m, n) = (usize_param(base, m)?, usize_param(base, n)?);
            if key == "b'(n')" {
                nest(&b_prime(m, 1)?, &n_prime(n, 1)?)
            } else {
                nest(&n_prime(m, 1)?, &b_prime(n, 1)?)
            }
        }
        _ => Err(Error::UnknownSequence(full.into())),
    }
}

/// Role of a catalog name (parameters ignored).
pub fn role(full: &str) -> Option<Role> {
    let key = canonical(split_name(full).0);
    ENTRIES
        .iter()
        .find(|e| canonical(e.name) == key)
        .map(|e| e.role)
}

/// Phase of the net rotation axis when it is not the x axis; the dual of a
/// sequence with offset `δ` is compared against its partner shifted by `δ`.
pub fn net_phase_offset(full: &str) -> Option<f64> {
    match canonical(split_name(full).0).as_str() {
        "nb1_tpg" | "nb1" => Some(4.0 * phi_f1()),
        _ => None,
    }
}

pub fn whh4() -> DDSequence {
    let p = seq("WHH4", FRAC_PI_2, &[0.0, FRAC_PI_2, -FRAC_PI_2, PI]);
    DDSequence::new(p, vec![0.0, 1.0, 2.0, 1.0, 2.0]).expect("five delays")
}

/// Three `2π/3` rotations about `(1,1,1)/√3`, each preceded by a unit delay.
pub fn virtual_mas() -> DDSequence {
    let d = UnitVector3::normalize(1.0, 1.0, 1.0).expect("nonzero");
    let p = RotationSequence::from_axes("VMAS", TAU / 3.0, &[d; 3]).expect("nonempty");
    DDSequence::new(p, vec![1.0, 1.0, 1.0, 0.0]).expect("four delays")
}

/// Decoupling cycle by name: `WHH4`, `VMAS`, `UDD:n`, or any sequence name
/// with equally spaced pulses.
pub fn named_dd(full: &str) -> Result<DDSequence> {
    let (base, raw) = split_name(full);
    match canonical(base).as_str() {
        "whh4" | "whh-4" => Ok(whh4()),
        "vmas" => Ok(virtual_mas()),
        "udd" => match parse_params(base, raw)?[..] {
            [n] => udd(usize_param(base, n)?),
            _ => Err(Error::InvalidParams {
                name: base.into(),
                reason: "expects n".into(),
            }),
        },
        _ => Ok(DDSequence::equally_spaced(named(full)?)),
    }
}
