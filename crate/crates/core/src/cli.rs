//! The `lorenz` command line: argument grammar, report formatting, JSON
//! output and the parameter-triangle sweep.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::classify::{distance, invariant_sequence, region_of, ParamPoint, RegionTag, DEFAULT_MAX_STEPS};
use crate::error::{Error, Result};
use crate::kneading::{check_pair, parse_pair, validate, KneadingConfig, KneadingInvariant, LmoParams, Verdict};
use crate::param::{params_of, spectral_radius, transition_matrix, DEFAULT_TOL};
use crate::renorm::{factorize, RenormStep, StepKind};
use crate::seqcore::{is_cyclic_shift, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ROTATIONAL: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_CANT_CREATE: i32 = 73;

#[derive(Debug, Parser)]
#[command(name = "lorenz", version, about = "Kneading invariants and (β, α) parameters of expansive Lorenz maps")]
pub struct Cli {
    /// Root-finding tolerance on z = 1/β.
    #[arg(long, global = true, env = "LORENZ_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Itinerary depth for kneading data computed from parameters.
    #[arg(long, global = true, env = "LORENZ_DEPTH", default_value_t = 4096)]
    pub depth: usize,

    /// Renormalization step budget.
    #[arg(long, global = true, env = "LORENZ_MAX_STEPS", default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: usize,

    /// Emit one JSON object instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Admissibility verdict: exit 0 Expansive, 2 Rotational, 3 Invalid.
    Check { invariant: String },
    /// Renormalization steps and prime terminal.
    Factor { invariant: String },
    /// β, α, entropy and the invariant sequence.
    Params { invariant: String },
    /// Distance between two invariants.
    Dist { first: String, second: String },
    /// Classify a grid of parameters in the triangle.
    Sweep(SweepArgs),
    /// Transition matrix of a purely periodic invariant.
    Matrix { invariant: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlphaMode {
    /// α ranges over the given interval.
    Absolute,
    /// α = t(2 − β) with t over the given interval.
    Fraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Pgm,
}

/// Closed interval `LO:HI`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Span {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let lo: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
        let hi: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
        if !(lo <= hi) {
            return Err(format!("empty interval {s:?}"));
        }
        Ok(Span { lo, hi })
    }
}

/// `NBxNA` cell counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub n_beta: usize,
    pub n_alpha: usize,
}

impl FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.split_once('x').ok_or_else(|| format!("expected NBxNA, got {s:?}"))?;
        let n_beta: usize = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
        let n_alpha: usize = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
        if n_beta == 0 || n_alpha == 0 {
            return Err("grid counts must be positive".into());
        }
        Ok(Grid { n_beta, n_alpha })
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct SweepArgs {
    /// β interval, within [1, 2].
    #[arg(long, default_value = "1:2")]
    pub beta: Span,
    /// α interval; absolute, or a fraction of [0, 2 − β].
    #[arg(long, default_value = "0:1")]
    pub alpha: Span,
    #[arg(long, value_enum, default_value_t = AlphaMode::Fraction)]
    pub alpha_mode: AlphaMode,
    /// Number of β rows and α columns.
    #[arg(long, default_value = "50x50")]
    pub grid: Grid,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: PathBuf,
}

/// A sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub beta: Span,
    pub alpha: Span,
    pub alpha_mode: AlphaMode,
    pub grid: Grid,
    pub depth: usize,
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellClass {
    Rotation,
    PrimePeriodic,
    PrimeExpansive,
    Renormalizable,
    Ambiguous,
    Undetected,
}

impl CellClass {
    pub fn name(self) -> &'static str {
        match self {
            CellClass::Rotation => "rotation",
            CellClass::PrimePeriodic => "prime_periodic",
            CellClass::PrimeExpansive => "prime_expansive",
            CellClass::Renormalizable => "renormalizable",
            CellClass::Ambiguous => "ambiguous",
            CellClass::Undetected => "undetected",
        }
    }

    /// PGM gray level; 0 is reserved for cells outside the triangle.
    pub fn gray(self) -> u8 {
        match self {
            CellClass::Rotation => 40,
            CellClass::PrimePeriodic => 255,
            CellClass::PrimeExpansive => 210,
            CellClass::Renormalizable => 150,
            CellClass::Ambiguous => 100,
            CellClass::Undetected => 70,
        }
    }

    pub fn is_classified(self) -> bool {
        !matches!(self, CellClass::Ambiguous | CellClass::Undetected)
    }
}

pub const PGM_BACKGROUND: u8 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub row: usize,
    pub col: usize,
    pub beta: f64,
    pub alpha: f64,
    /// `None` when `(β, α)` lies outside the triangle.
    pub class: Option<CellClass>,
    pub detail: String,
}

fn grid_value(span: Span, n: usize, i: usize) -> f64 {
    if n == 1 {
        span.lo
    } else {
        span.lo + (span.hi - span.lo) * i as f64 / (n - 1) as f64
    }
}

fn classify_cell(beta: f64, alpha: f64, cfg: &KneadingConfig, max_steps: usize) -> (Option<CellClass>, String) {
    let Ok(p) = LmoParams::new(beta, alpha) else {
        return (None, String::new());
    };
    match region_of(&p, cfg, max_steps) {
        Ok(RegionTag::Rotation(r)) => (Some(CellClass::Rotation), r.to_string()),
        Ok(RegionTag::PrimePeriodic) => (Some(CellClass::PrimePeriodic), String::new()),
        Ok(RegionTag::PrimeExpansive) => (Some(CellClass::PrimeExpansive), String::new()),
        Ok(RegionTag::Renormalizable(m)) => (Some(CellClass::Renormalizable), format!("m={m}")),
        Ok(RegionTag::Undetected) => (Some(CellClass::Undetected), String::new()),
        Err(Error::AmbiguousItinerary { index }) => (Some(CellClass::Ambiguous), format!("iterate={index}")),
        Err(e) => (Some(CellClass::Undetected), e.to_string().replace(',', ";")),
    }
}

/// Classifies every grid cell; the result is in row-major order whatever
/// the scheduling.
pub fn sweep_cells(spec: &SweepSpec) -> Result<Vec<SweepCell>> {
    if spec.beta.lo < 1.0 || spec.beta.hi > 2.0 {
        return Err(Error::Domain("beta range must lie in [1, 2]".into()));
    }
    let cfg = KneadingConfig {
        depth: spec.depth,
        ..KneadingConfig::default()
    };
    if cfg.depth < 2 * cfg.match_window {
        return Err(Error::Domain(format!("depth must be at least {}", 2 * cfg.match_window)));
    }
    let Grid { n_beta, n_alpha } = spec.grid;
    Ok((0..n_beta * n_alpha)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / n_alpha, idx % n_alpha);
            let beta = grid_value(spec.beta, n_beta, row);
            let t = grid_value(spec.alpha, n_alpha, col);
            let alpha = match spec.alpha_mode {
                AlphaMode::Absolute => t,
                AlphaMode::Fraction => t * (2.0 - beta),
            };
            let (class, detail) = classify_cell(beta, alpha, &cfg, spec.max_steps);
            SweepCell {
                row,
                col,
                beta,
                alpha,
                class,
                detail,
            }
        })
        .collect())
}

/// `beta,alpha,class,detail` rows for the cells inside the triangle.
pub fn write_csv(cells: &[SweepCell], w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "beta,alpha,class,detail")?;
    for c in cells {
        if let Some(class) = c.class {
            writeln!(w, "{},{},{},{}", c.beta, c.alpha, class.name(), c.detail)?;
        }
    }
    Ok(())
}

/// Binary PGM, one byte per cell, β along rows and α along columns.
pub fn write_pgm(cells: &[SweepCell], grid: Grid, w: &mut impl Write) -> io::Result<()> {
    write!(w, "P5\n{} {}\n255\n", grid.n_alpha, grid.n_beta)?;
    let bytes: Vec<u8> = cells
        .iter()
        .map(|c| c.class.map_or(PGM_BACKGROUND, CellClass::gray))
        .collect();
    w.write_all(&bytes)
}

/// Parses arguments and runs one command; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Failure::Lib(e)) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_DATA,
            }
        }
        Err(Failure::Create(path, e)) => {
            let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
            EXIT_CANT_CREATE
        }
        Err(Failure::Output(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CANT_CREATE
        }
    }
}

enum Failure {
    Lib(Error),
    Create(PathBuf, io::Error),
    Output(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Output(e)
    }
}

fn emit_json(out: &mut dyn Write, v: &Value) -> io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"))
}

fn rational_str(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn point_json(p: &ParamPoint) -> Value {
    let rho = match p {
        ParamPoint::Rotation(r) => Value::String(rational_str(*r)),
        ParamPoint::Linear { .. } => Value::Null,
    };
    json!({
        "beta": p.beta(),
        "alpha": p.alpha(),
        "region": p.region().to_string(),
        "rho": rho,
    })
}

fn point_text(p: &ParamPoint) -> String {
    match p {
        ParamPoint::Rotation(r) => format!("(1, {})", rational_str(*r)),
        ParamPoint::Linear { beta, alpha, .. } => format!("({beta:.6}, {alpha:.6})"),
    }
}

/// Point of a renormalization step: `(1, ρ)` or `(β, α)` of its factor.
fn step_point(w: &RenormStep, tol: f64) -> Result<ParamPoint> {
    match w.kind() {
        StepKind::Periodic => Ok(ParamPoint::Rotation(w.rotation_number().expect("periodic"))),
        StepKind::NonPeriodic => {
            let (beta, alpha) = params_of(&w.factor(), tol)?;
            Ok(ParamPoint::Linear {
                beta,
                alpha,
                periodic: true,
            })
        }
    }
}

/// Point of a prime terminal, a rotation when its verdict is rotational.
fn terminal_point(k: &KneadingInvariant, tol: f64) -> Result<Option<ParamPoint>> {
    match validate(k).verdict {
        Verdict::Expansive => {
            let (beta, alpha) = params_of(k, tol)?;
            Ok(Some(ParamPoint::Linear {
                beta,
                alpha,
                periodic: k.is_purely_periodic(),
            }))
        }
        Verdict::Rotational
            if k.is_purely_periodic() && is_cyclic_shift(k.kplus().per(), k.kminus().per()) =>
        {
            Ok(Some(ParamPoint::Rotation(k.kplus().one_frequency())))
        }
        _ => Ok(None),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> std::result::Result<i32, Failure> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance {tol} must be positive")).into());
    }
    match &cli.command {
        Command::Check { invariant } => {
            let (kplus, kminus) = parse_pair(invariant)?;
            let a = check_pair(&kplus, &kminus);
            let code = match a.verdict {
                Verdict::Expansive => EXIT_OK,
                Verdict::Rotational => EXIT_ROTATIONAL,
                Verdict::Invalid => EXIT_INVALID,
            };
            if cli.json {
                let witness = a.witness.map(|w| json!({"n": w.n, "relation": w.relation}));
                emit_json(
                    out,
                    &json!({
                        "kplus": kplus.to_string(),
                        "kminus": kminus.to_string(),
                        "verdict": a.verdict,
                        "witness": witness,
                    }),
                )?;
            } else {
                match (a.verdict, a.witness) {
                    (Verdict::Expansive, _) | (_, None) => writeln!(out, "{}", a.verdict)?,
                    (Verdict::Rotational, Some(w)) => {
                        writeln!(out, "Rotational (σ-equality witness: n={}, {})", w.n, w.relation)?
                    }
                    (Verdict::Invalid, Some(w)) => writeln!(out, "Invalid: {} (n={})", w.relation, w.n)?,
                }
            }
            Ok(code)
        }
        Command::Factor { invariant } => {
            let k: KneadingInvariant = invariant.parse()?;
            let f = factorize(&k, cli.max_steps)?;
            let points = f
                .steps()
                .iter()
                .map(|w| step_point(w, tol))
                .collect::<Result<Vec<_>>>()?;
            let terminal = f.terminal();
            let tpoint = if f.truncated() { None } else { terminal_point(terminal, tol)? };
            if cli.json {
                let steps: Vec<Value> = f
                    .steps()
                    .iter()
                    .zip(&points)
                    .map(|(w, p)| {
                        json!({
                            "wplus": w.wplus().to_string(),
                            "wminus": w.wminus().to_string(),
                            "kind": w.kind().to_string(),
                            "point": point_json(p),
                        })
                    })
                    .collect();
                emit_json(
                    out,
                    &json!({
                        "kplus": k.kplus().to_string(),
                        "kminus": k.kminus().to_string(),
                        "verdict": validate(&k).verdict,
                        "steps": steps,
                        "terminal": {
                            "kplus": terminal.kplus().to_string(),
                            "kminus": terminal.kminus().to_string(),
                            "point": tpoint.as_ref().map(point_json),
                        },
                        "truncated": f.truncated(),
                    }),
                )?;
            } else {
                if f.steps().is_empty() {
                    writeln!(out, "prime")?;
                }
                for (i, (w, p)) in f.steps().iter().zip(&points).enumerate() {
                    writeln!(out, "step {}: {} {} {}", i + 1, w, w.kind(), point_text(p))?;
                }
                let shown = tpoint.as_ref().map_or("no linear model".to_string(), point_text);
                let label = if f.truncated() { "truncated at" } else { "terminal" };
                writeln!(out, "{label}: {terminal} {shown}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Params { invariant } => {
            let k: KneadingInvariant = invariant.parse()?;
            let seq = invariant_sequence(&k, cli.max_steps, tol)?;
            // A non-periodic renormalization leaves K(z) without a root.
            let direct = match params_of(&k, tol) {
                Ok(p) => Some(p),
                Err(Error::NoRoot) => None,
                Err(e) => return Err(e.into()),
            };
            if cli.json {
                let sequence: Vec<Value> = seq.points.iter().map(point_json).collect();
                emit_json(
                    out,
                    &json!({
                        "kplus": k.kplus().to_string(),
                        "kminus": k.kminus().to_string(),
                        "verdict": Verdict::Expansive,
                        "beta": direct.map(|p| p.0),
                        "alpha": direct.map(|p| p.1),
                        "entropy": direct.map(|p| p.0.ln()),
                        "sequence": sequence,
                        "truncated": seq.truncated,
                    }),
                )?;
            } else {
                match direct {
                    Some((beta, alpha)) => {
                        writeln!(out, "beta = {beta:.10}")?;
                        writeln!(out, "alpha = {alpha:.10}")?;
                        writeln!(out, "entropy = {:.10}", beta.ln())?;
                    }
                    None => writeln!(out, "beta = n/a (K(z) has no root in (0, 1); not uniformly linearizable)")?,
                }
                let items: Vec<String> = seq.points.iter().map(|p| format!("{} {}", point_text(p), p.region())).collect();
                writeln!(out, "sequence: {}", items.join("; "))?;
                if seq.truncated {
                    writeln!(out, "sequence truncated after {} steps", cli.max_steps)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Dist { first, second } => {
            let a: KneadingInvariant = first.parse()?;
            let b: KneadingInvariant = second.parse()?;
            let d = distance(&a, &b, cli.max_steps);
            if cli.json {
                emit_json(
                    out,
                    &json!({
                        "kplus": [a.kplus().to_string(), b.kplus().to_string()],
                        "kminus": [a.kminus().to_string(), b.kminus().to_string()],
                        "distance": {
                            "value": d.value,
                            "p": d.p,
                            "splus": d.splus,
                            "sminus": d.sminus,
                        },
                    }),
                )?;
            } else {
                writeln!(out, "{d}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Sweep(args) => {
            let spec = SweepSpec {
                beta: args.beta,
                alpha: args.alpha,
                alpha_mode: args.alpha_mode,
                grid: args.grid,
                depth: cli.depth,
                max_steps: cli.max_steps,
            };
            let cells = sweep_cells(&spec)?;
            write_sweep(&cells, spec.grid, args.format, &args.out)?;
            let inside = cells.iter().filter(|c| c.class.is_some()).count();
            let classified = cells.iter().filter(|c| c.class.is_some_and(CellClass::is_classified)).count();
            if cli.json {
                emit_json(
                    out,
                    &json!({
                        "out": args.out.display().to_string(),
                        "cells": inside,
                        "classified": classified,
                    }),
                )?;
            } else {
                writeln!(
                    out,
                    "wrote {inside} cells to {} ({classified} classified)",
                    args.out.display()
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Matrix { invariant } => {
            let k: KneadingInvariant = invariant.parse()?;
            let m = transition_matrix(&k)?;
            let rho = spectral_radius(&m, tol.max(1e-14));
            if cli.json {
                emit_json(
                    out,
                    &json!({
                        "kplus": k.kplus().to_string(),
                        "kminus": k.kminus().to_string(),
                        "matrix": m.rows(),
                        "spectral_radius": rho,
                    }),
                )?;
            } else {
                write!(out, "{m}")?;
                writeln!(out, "spectral radius = {rho:.10}")?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_sweep(cells: &[SweepCell], grid: Grid, format: Format, path: &Path) -> std::result::Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::Create(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    let res = match format {
        Format::Csv => write_csv(cells, &mut w),
        Format::Pgm => write_pgm(cells, grid, &mut w),
    };
    res.and_then(|_| w.flush())
        .map_err(|e| Failure::Create(path.to_path_buf(), e))
}
