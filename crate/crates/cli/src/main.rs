use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use togglekit::averaging::{
    centroid, default_eps_grid, is_balanced, kappa, numeric_error_expansion, sequence_orders,
    symmetry_class, AverageRotationOrders, BALANCE_TOL,
};
use togglekit::catalog::{self, DD_ENTRIES, ENTRIES};
use togglekit::ddsim::{centroid_map, default_omega_grid, default_scale_grid, lin_space};
use togglekit::profiles::{self, convert_m2_to_m4, glide_reflection_check, profile_rows, trajectory};
use togglekit::search::{self, AxisSet, BalanceMode, SearchSpec, Symmetry, Target};
use togglekit::toggling::{closed_form_toggling, cyclicity_order, toggled_axes, toggling_map, toggling_map_iter};
use togglekit::virtualmas::mas_kappa_sweep;
use togglekit::{verify, Exec, Rotation, RotationSequence, UnitVector3};

mod format;
mod input;

use format::{csv_row, float};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Io(String),
    Verify(String),
}

impl From<togglekit::Error> for CliError {
    fn from(e: togglekit::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 1,
            CliError::Verify(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "togglekit", version, about = "Toggling-frame analysis of composite rotation sequences")]
struct Cli {
    /// Read angle arguments and JSON inputs in degrees (output stays in radians).
    #[arg(long, global = true)]
    deg: bool,

    /// Write the result to a file instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn unit(self) -> UnitVector3 {
        match self {
            Axis::X => UnitVector3::X,
            Axis::Y => UnitVector3::Y,
            Axis::Z => UnitVector3::Z,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Balance {
    Full,
    Z,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dedupe {
    None,
    GlobalZ,
    AxisSet,
    Extended,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Named sequences and decoupling cycles.
    List,
    /// A sequence as JSON, e.g. `F1`, `N':5`, `B'(N'):3,5`.
    Show { name: String },
}

/// Sequences are catalog names or `@path.json`.
#[derive(Subcommand)]
enum Command {
    /// Browse the built-in sequences.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// The dual sequence (one application of the toggling map).
    Dual { seq: String },
    /// The m-th toggling frame.
    Toggle {
        seq: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Use the closed form instead of iterating.
        #[arg(long)]
        closed_form: bool,
    },
    /// Smallest m at which the toggling map returns the sequence.
    Cycle {
        seq: String,
        #[arg(long, default_value_t = 12)]
        max_m: usize,
    },
    /// Inversion profile q(β′) as CSV.
    Profile {
        seq: String,
        #[arg(long, value_enum, default_value = "z")]
        xi: Axis,
        #[arg(long, default_value_t = 721)]
        points: usize,
        /// First β′ (radians, or degrees with --deg).
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        /// Last β′, inclusive.
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
    },
    /// Path of a vector through the sequence at β′ = scale·β, as CSV.
    Trajectory {
        seq: String,
        #[arg(long, default_value_t = 1.0)]
        beta_scale: f64,
        #[arg(long, value_enum, default_value = "z")]
        v0: Axis,
    },
    /// Glide-reflection deviation between two inverters.
    Glide {
        a: String,
        b: String,
        #[arg(long, value_enum, default_value = "z")]
        xi: Axis,
    },
    /// Centroid of the untoggled (0) or toggled (1) axes.
    Centroid {
        seq: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=1))]
        frame: u8,
        #[arg(long, default_value_t = 1.0)]
        beta_scale: f64,
    },
    /// First three orders of the flip-angle error expansion.
    Orders {
        seq: String,
        #[arg(long, default_value_t = 1.0)]
        beta_scale: f64,
        /// Also fit the orders from the exact propagator.
        #[arg(long)]
        numeric: bool,
    },
    /// Delay-weighted Wigner average of a decoupling cycle, as CSV.
    Kappa {
        dd: String,
        #[arg(long)]
        lambda: u32,
        #[arg(long, default_value_t = 1.0)]
        beta_scale: f64,
    },
    /// |C^(1)| over (ω, β′/β) under an oscillating field.
    Ddmap {
        dd: String,
        #[arg(long, default_value_t = 31)]
        omega_points: usize,
        #[arg(long, default_value_t = 41)]
        scale_points: usize,
        /// Field amplitude; defaults to 1/T for cycle length T.
        #[arg(long)]
        a: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: MapFormat,
    },
    /// Exhaustive search over toggled axis tuples; one JSON sequence per line.
    Search {
        /// tetrahedron, cube, octahedron, diagonal-quad or icosahedron.
        #[arg(long)]
        axes: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
        /// `equatorial-pi`, `axis-cycling`, or `X,Y,Z@ANGLE`.
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value = "full")]
        balance: Balance,
        /// Keep only sequences with equatorial axes.
        #[arg(long)]
        equatorial: bool,
        #[arg(long, value_enum, default_value = "none")]
        dedupe: Dedupe,
    },
    /// Convert an odd, reversal-symmetric π inverter into a π/2 sequence.
    Convert24 { seq: String },
    /// Rank-2 average of the virtual-MAS cycle against flip-angle scale, as CSV.
    Mas {
        #[arg(long)]
        compensated: bool,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Run the full invariant suite.
    Verify,
}

const EXEC: Exec = Exec::Parallel;

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TOGGLEKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("TOGGLEKIT_THREADS must be a positive integer, got `{raw}`")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn doc_json(s: &RotationSequence) -> String {
    format::json(&s.to_doc())
}

fn orders_json(o: &AverageRotationOrders) -> Value {
    json!({
        "order1": o.order1.to_array(),
        "order2": o.order2.to_array(),
        "order3": o.order3.to_array(),
    })
}

fn angle(x: f64, deg: bool) -> f64 {
    if deg {
        x.to_radians()
    } else {
        x
    }
}

fn parse_target(raw: &str, deg: bool) -> Result<Target, CliError> {
    match raw {
        "equatorial-pi" => return Ok(Target::AnyEquatorialPi),
        "axis-cycling" => return Ok(Target::AxisCycling),
        _ => {}
    }
    let bad = || CliError::Usage(format!("target `{raw}`: expected equatorial-pi, axis-cycling or X,Y,Z@ANGLE"));
    let (axis, ang) = raw.split_once('@').ok_or_else(bad)?;
    let c: Vec<f64> = axis
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [x, y, z] = c[..] else { return Err(bad()) };
    let a: f64 = ang.trim().parse().map_err(|_| bad())?;
    let axis = UnitVector3::normalize(x, y, z)?;
    Ok(Target::Rotation(Rotation::from_axis_angle(&axis, angle(a, deg))))
}

fn run(cli: Cli) -> Result<String, CliError> {
    let deg = cli.deg;
    let seq = |s: &str| input::sequence(s, deg);
    let mut out = String::new();
    match cli.command {
        Command::Catalog { action: CatalogAction::List } => {
            out.push_str("name\tparams\trole\tsummary\n");
            for e in ENTRIES {
                writeln!(out, "{}\t{}\t{}\t{}", e.name, e.params, e.role.as_str(), e.summary).unwrap();
            }
            for (name, summary) in DD_ENTRIES {
                writeln!(out, "{name}\t\tdecoupling\t{summary}").unwrap();
            }
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            writeln!(out, "{}", doc_json(&catalog::named(&name)?)).unwrap();
        }
        Command::Dual { seq: s } => writeln!(out, "{}", doc_json(&toggling_map(&seq(&s)?))).unwrap(),
        Command::Toggle { seq: s, m, closed_form } => {
            let s = seq(&s)?;
            let t = if closed_form { closed_form_toggling(&s, m) } else { toggling_map_iter(&s, m) };
            writeln!(out, "{}", doc_json(&t)).unwrap();
        }
        Command::Cycle { seq: s, max_m } => match cyclicity_order(&seq(&s)?, max_m) {
            Some(m) => writeln!(out, "{m}").unwrap(),
            None => out.push_str("none\n"),
        },
        Command::Profile { seq: s, xi, points, from, to } => {
            let s = seq(&s)?;
            let grid = match (from, to) {
                (None, None) if points == 721 => profiles::default_grid(),
                (f, t) => lin_space(
                    f.map_or(0.0, |x| angle(x, deg)),
                    t.map_or(std::f64::consts::TAU, |x| angle(x, deg)),
                    points,
                ),
            };
            out.push_str("beta_prime,q,vx,vy,vz,err_deg\n");
            for row in profile_rows(&s, &xi.unit(), &grid, EXEC)? {
                writeln!(out, "{}", csv_row(&row)).unwrap();
            }
        }
        Command::Trajectory { seq: s, beta_scale, v0 } => {
            let s = seq(&s)?;
            out.push_str("step,x,y,z\n");
            for (i, v) in trajectory(&s, &v0.unit(), beta_scale * s.nominal_beta()).iter().enumerate() {
                writeln!(out, "{i},{}", csv_row(&v.to_array())).unwrap();
            }
        }
        Command::Glide { a, b, xi } => {
            let r = glide_reflection_check(&seq(&a)?, &seq(&b)?, &xi.unit(), &profiles::default_grid(), EXEC)?;
            let v = json!({"plus": r.plus, "minus": r.minus, "best": r.best(), "branch": r.branch()});
            writeln!(out, "{}", format::json(&v)).unwrap();
        }
        Command::Centroid { seq: s, frame, beta_scale } => {
            let s = seq(&s)?;
            let axes = if frame == 0 { s.axes() } else { toggled_axes(&s, beta_scale) };
            let c = centroid(&axes)?;
            let v = json!({
                "frame": frame,
                "beta_scale": beta_scale,
                "vector": c.vector.to_array(),
                "magnitude": c.magnitude(),
                "balanced": is_balanced(&axes, BALANCE_TOL),
            });
            writeln!(out, "{}", format::json(&v)).unwrap();
        }
        Command::Orders { seq: s, beta_scale, numeric } => {
            let s = seq(&s)?;
            let mut v = orders_json(&sequence_orders(&s, beta_scale));
            v["beta_scale"] = json!(beta_scale);
            v["symmetry"] = serde_json::to_value(symmetry_class(&s)).expect("plain enum");
            if numeric {
                let fit = numeric_error_expansion(&s, beta_scale, &default_eps_grid())?;
                v["numeric"] = orders_json(&fit);
            }
            writeln!(out, "{}", format::json(&v)).unwrap();
        }
        Command::Kappa { dd, lambda, beta_scale } => {
            let k = kappa(&input::dd_sequence(&dd, deg)?, lambda, beta_scale)?;
            out.push_str("lambda,mu,mu_prime,re,im\n");
            for (l, mu, mp, re, im) in k.rows() {
                writeln!(out, "{l},{mu},{mp},{},{}", float(re), float(im)).unwrap();
            }
        }
        Command::Ddmap { dd, omega_points, scale_points, a, format: fmt } => {
            let dd = input::dd_sequence(&dd, deg)?;
            let t = dd.total_time();
            let omegas = default_omega_grid(t, omega_points);
            let scales = default_scale_grid(scale_points);
            let map = centroid_map(&dd, &omegas, &scales, a.unwrap_or(1.0 / t), EXEC)?;
            match fmt {
                MapFormat::Csv => {
                    writeln!(out, "omega,{}", csv_row(&map.beta_scales)).unwrap();
                    for (i, w) in map.omegas.iter().enumerate() {
                        writeln!(out, "{},{}", float(*w), csv_row(map.row(i))).unwrap();
                    }
                }
                MapFormat::Json => {
                    let v = json!({
                        "name": dd.name(),
                        "a": map.a,
                        "omegas": map.omegas,
                        "beta_scales": map.beta_scales,
                        "cells": map.cells,
                    });
                    writeln!(out, "{}", format::json(&v)).unwrap();
                }
            }
        }
        Command::Search { axes, n, m, target, balance, equatorial, dedupe } => {
            let axis_set = AxisSet::by_name(&axes)?;
            let spec = SearchSpec {
                axis_set: axis_set.clone(),
                n,
                m,
                target: parse_target(&target, deg)?,
                balance: match balance {
                    Balance::Full => BalanceMode::Full,
                    Balance::Z => BalanceMode::ZOnly,
                },
                equatorial_only: equatorial,
            };
            let found = search::enumerate_balanced(&spec, EXEC)?;
            let kept = match dedupe {
                Dedupe::None => found,
                Dedupe::GlobalZ => search::dedupe(&found, &Symmetry::GlobalZ),
                Dedupe::AxisSet => search::dedupe(&found, &Symmetry::AxisSetRotations(axis_set)),
                Dedupe::Extended => search::dedupe(&found, &Symmetry::GlobalZMirrorReverse),
            };
            for s in &kept {
                writeln!(out, "{}", doc_json(s)).unwrap();
            }
        }
        Command::Convert24 { seq: s } => writeln!(out, "{}", doc_json(&convert_m2_to_m4(&seq(&s)?)?)).unwrap(),
        Command::Mas { compensated, points } => {
            out.push_str("beta_scale,max_abs\n");
            for r in mas_kappa_sweep(compensated, &lin_space(0.8, 1.2, points), EXEC)? {
                writeln!(out, "{}", csv_row(&[r.beta_scale, r.max_abs])).unwrap();
            }
        }
        Command::Verify => {
            let results = verify::run_all(EXEC);
            let passed = results.iter().filter(|r| r.passed).count();
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                writeln!(out, "[{tag}] {:>2}. {}: {}", r.id, r.title, r.detail).unwrap();
            }
            writeln!(out, "{passed} of {} criteria passed", results.len()).unwrap();
            if passed < results.len() {
                return Err(CliError::Verify(out));
            }
        }
    }
    Ok(out)
}

fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let output = cli.output.clone();
    let result = configure_threads().and_then(|_| run(cli)).and_then(|text| emit(&text, output.as_ref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verify(report)) => {
            let code = match emit(&report, output.as_ref()) {
                Ok(()) => 2,
                Err(e) => e.code(),
            };
            eprintln!("togglekit: verification failed");
            ExitCode::from(code)
        }
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) | CliError::Input(m) | CliError::Io(m) | CliError::Verify(m) => m,
            };
            eprintln!("togglekit: {msg}");
            ExitCode::from(e.code())
        }
    }
}
