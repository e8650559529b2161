//! Command-line front end.
//!
//! Scalars and verdicts go to stdout as single-line JSON; curves and
//! reconstructions are written as CSV to `--out` (`-` for stdout).
//! Exit codes: 0 success, 2 invalid input or unmet precondition, 3 numerical
//! failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::characterization::{
    parse_param_grid, reconstruct_cdf, theorem_check, uniqueness_probe, Anchor, ParamRange,
    ProbeConfig, ReconstructConfig,
};
use crate::distributions::{Distribution, FamilyTag};
use crate::error::{Error, Result};
use crate::estimation::{past_entropy_estimate, Sample};
use crate::measures::{evaluate, measure_curve, MeasureCurve, MeasureKind};
use crate::numerics::{QuadratureConfig, RootConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pastent",
    version,
    about = "Past, residual and Shannon entropy of lifetime distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one measure at one time point.
    Eval(EvalArgs),
    /// Sample a measure on an even grid and write `t,value` CSV.
    Curve(CurveArgs),
    /// Recover phi and F from a past-entropy curve CSV.
    Reconstruct(ReconstructArgs),
    /// Check the single-point uniqueness claim for a pair of laws.
    Compare(CompareArgs),
    /// Sweep a family pair for counterexample candidates.
    Probe(ProbeArgs),
    /// Spacings estimate of the past entropy from a sample.
    Estimate(EstimateArgs),
}

#[derive(Debug, Args)]
struct QuadArgs {
    #[arg(long = "quad-abs-tol", default_value_t = QuadratureConfig::default().abs_tol)]
    abs_tol: f64,
    #[arg(long = "quad-rel-tol", default_value_t = QuadratureConfig::default().rel_tol)]
    rel_tol: f64,
    #[arg(long = "quad-max-depth", default_value_t = QuadratureConfig::default().max_depth)]
    max_depth: u32,
    #[arg(long = "quad-tail-cut", default_value_t = QuadratureConfig::default().tail_cut)]
    tail_cut: f64,
}

impl QuadArgs {
    fn config(&self) -> Result<QuadratureConfig> {
        let cfg = QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_depth: self.max_depth,
            tail_cut: self.tail_cut,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct RootArgs {
    #[arg(long = "root-x-tol", default_value_t = RootConfig::default().x_tol)]
    x_tol: f64,
    #[arg(long = "root-max-iter", default_value_t = RootConfig::default().max_iter)]
    max_iter: u32,
}

impl RootArgs {
    fn config(&self) -> Result<RootConfig> {
        let cfg = RootConfig {
            x_tol: self.x_tol,
            max_iter: self.max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    dist: String,
    #[arg(long)]
    measure: String,
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(long)]
    dist: String,
    #[arg(long)]
    measure: String,
    #[arg(long = "t-min", allow_negative_numbers = true)]
    t_min: f64,
    #[arg(long = "t-max", allow_negative_numbers = true)]
    t_max: f64,
    #[arg(long)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "anchor-t")]
    anchor_t: f64,
    #[arg(long = "anchor-F")]
    anchor_cdf: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "tangent-slack", default_value_t = ReconstructConfig::default().tangent_slack)]
    tangent_slack: f64,
    #[arg(long = "trial-tol", default_value_t = ReconstructConfig::default().trial_tol)]
    trial_tol: f64,
    #[command(flatten)]
    root: RootArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long = "dist-x")]
    dist_x: String,
    #[arg(long = "dist-y")]
    dist_y: String,
    #[arg(long)]
    t0: f64,
    #[arg(long = "premise-tol", default_value_t = ProbeConfig::default().premise_tol)]
    premise_tol: f64,
    #[arg(long = "separation-tol", default_value_t = ProbeConfig::default().separation_tol)]
    separation_tol: f64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct ProbeArgs {
    #[arg(long = "family-x")]
    family_x: String,
    #[arg(long = "family-y")]
    family_y: String,
    #[arg(long = "param-grid")]
    param_grid: String,
    #[arg(long = "t0-grid")]
    t0_grid: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "premise-tol", default_value_t = ProbeConfig::default().premise_tol)]
    premise_tol: f64,
    #[arg(long = "separation-tol", default_value_t = ProbeConfig::default().separation_tol)]
    separation_tol: f64,
    #[arg(long = "shape-scan", default_value_t = ProbeConfig::default().shape_scan)]
    shape_scan: usize,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(
        long = "in",
        conflicts_with = "synth",
        required_unless_present = "synth"
    )]
    input: Option<PathBuf>,
    #[arg(long)]
    t: f64,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, requires_all = ["synth", "n"])]
    seed: Option<u64>,
    /// Distribution spec to draw a synthetic sample from.
    #[arg(long, requires_all = ["seed", "n"])]
    synth: Option<String>,
    #[arg(long, requires_all = ["seed", "synth"])]
    n: Option<usize>,
}

/// Runs the CLI with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_INVALID
            }
        }
    }
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string(value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// Opens `path` for writing; `-` means stdout.
fn with_output<F>(path: &PathBuf, out: &mut dyn Write, write: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    if path.as_os_str() == "-" {
        write(out)
    } else {
        let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        write(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

fn open(path: &PathBuf) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Eval(a) => {
            let dist: Distribution = a.dist.parse()?;
            let kind: MeasureKind = a.measure.parse()?;
            let quad = a.quad.config()?;
            let value = evaluate(&dist, kind, a.t, &quad)?;
            print_json(
                out,
                &json!({
                    "command": "eval",
                    "dist": dist.to_string(),
                    "measure": kind,
                    "t": a.t,
                    "value": value,
                    "quadrature": quad,
                }),
            )
        }
        Command::Curve(a) => {
            let dist: Distribution = a.dist.parse()?;
            let kind: MeasureKind = a.measure.parse()?;
            let quad = a.quad.config()?;
            let curve = measure_curve(&dist, kind, a.t_min, a.t_max, a.points, &quad)?;
            let to_stdout = a.out.as_os_str() == "-";
            with_output(&a.out, out, |w| curve.write_csv(w))?;
            if to_stdout {
                return Ok(());
            }
            print_json(
                out,
                &json!({
                    "command": "curve",
                    "dist": dist.to_string(),
                    "measure": kind,
                    "points": curve.len(),
                    "out": a.out.display().to_string(),
                    "quadrature": quad,
                }),
            )
        }
        Command::Reconstruct(a) => {
            let curve = MeasureCurve::read_csv(open(&a.input)?, MeasureKind::PastDirect)?;
            let cfg = ReconstructConfig {
                root: a.root.config()?,
                tangent_slack: a.tangent_slack,
                trial_tol: a.trial_tol,
            };
            let anchor = Anchor {
                t: a.anchor_t,
                cdf: a.anchor_cdf,
            };
            let result = reconstruct_cdf(&curve, anchor, &cfg)?;
            let to_stdout = a.out.as_os_str() == "-";
            with_output(&a.out, out, |w| result.write_csv(w))?;
            if to_stdout {
                return Ok(());
            }
            print_json(
                out,
                &json!({
                    "command": "reconstruct",
                    "points": result.grid.len(),
                    "anchor": result.anchor,
                    "branch_switches": result.branch_switches,
                    "branch_ambiguous": result.branch_ambiguous,
                    "projected_points": result.projected_points,
                    "max_selfcheck_residual": result.max_selfcheck_residual,
                    "out": a.out.display().to_string(),
                    "root": cfg.root,
                    "tangent_slack": cfg.tangent_slack,
                    "trial_tol": cfg.trial_tol,
                }),
            )
        }
        Command::Compare(a) => {
            let x: Distribution = a.dist_x.parse()?;
            let y: Distribution = a.dist_y.parse()?;
            let quad = a.quad.config()?;
            let verdict = theorem_check(&x, &y, a.t0, a.premise_tol, a.separation_tol, &quad)?;
            print_json(out, &verdict)
        }
        Command::Probe(a) => {
            let family_x: FamilyTag = a.family_x.parse()?;
            let family_y: FamilyTag = a.family_y.parse()?;
            let params = parse_param_grid(&a.param_grid)?;
            let t0 = ParamRange::parse_bounds("t0", &a.t0_grid)?;
            let cfg = ProbeConfig {
                premise_tol: a.premise_tol,
                separation_tol: a.separation_tol,
                quad: a.quad.config()?,
                shape_scan: a.shape_scan,
                ..ProbeConfig::default()
            };
            let report = uniqueness_probe(family_x, family_y, &params, &t0, &cfg)?;
            with_output(&a.out, out, |w| {
                serde_json::to_writer_pretty(&mut *w, &report)
                    .map_err(|e| Error::Io(e.to_string()))?;
                writeln!(w)?;
                Ok(())
            })?;
            if a.out.as_os_str() == "-" {
                return Ok(());
            }
            print_json(
                out,
                &json!({
                    "command": "probe",
                    "family_x": family_x,
                    "family_y": family_y,
                    "cells": report.cells,
                    "pairs_checked": report.pairs_checked,
                    "cell_errors": report.errors.len(),
                    "candidates": report.candidates.len(),
                    "top_candidate": report.candidates.first(),
                    "premise_tol": cfg.premise_tol,
                    "separation_tol": cfg.separation_tol,
                    "quadrature": cfg.quad,
                    "out": a.out.display().to_string(),
                }),
            )
        }
        Command::Estimate(a) => {
            let (sample, source) = match (&a.input, &a.synth) {
                (Some(path), None) => (
                    Sample::read_csv(open(path)?)?,
                    json!({ "in": path.display().to_string() }),
                ),
                (None, Some(spec)) => {
                    let dist: Distribution = spec.parse()?;
                    let (n, seed) = (a.n.unwrap_or(0), a.seed.unwrap_or(0));
                    (
                        Sample::new(dist.sample(n, seed)?)?,
                        json!({ "synth": dist.to_string(), "n": n, "seed": seed }),
                    )
                }
                _ => return Err(Error::Precondition("give either --in or --synth".into())),
            };
            let value = past_entropy_estimate(&sample, a.t, a.window)?;
            let k = sample.values().iter().filter(|&&v| v <= a.t).count();
            let window = a.window.unwrap_or((k as f64).sqrt().floor() as usize);
            print_json(
                out,
                &json!({
                    "command": "estimate",
                    "source": source,
                    "t": a.t,
                    "n": sample.n(),
                    "k": k,
                    "window": window,
                    "value": value,
                }),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("pastent").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn eval_json_shape() {
        let (code, out, _) = run_capture(&[
            "eval",
            "--dist",
            "uniform:b=1",
            "--measure",
            "past_direct",
            "--t",
            "0.5",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["measure"], "past_direct");
        assert!((v["value"].as_f64().unwrap() - 0.5f64.ln()).abs() < 1e-9);
        assert_eq!(v["quadrature"]["abs_tol"], 1e-10);
        assert_eq!(v["quadrature"]["max_depth"], 50);
    }

    #[test]
    fn invalid_inputs_exit_2() {
        for args in [
            vec![
                "eval",
                "--dist",
                "uniform:b=1",
                "--measure",
                "past_direct",
                "--t",
                "0",
            ],
            vec![
                "eval",
                "--dist",
                "uniform:b=-1",
                "--measure",
                "past_direct",
                "--t",
                "0.5",
            ],
            vec![
                "eval",
                "--dist",
                "uniform:b=1",
                "--measure",
                "bogus",
                "--t",
                "0.5",
            ],
            vec![
                "eval",
                "--dist",
                "uniform:b=1",
                "--measure",
                "shannon",
                "--t",
                "0.5",
                "--bogus",
                "1",
            ],
            vec![
                "eval",
                "--dist",
                "uniform:b=1",
                "--measure",
                "shannon",
                "--t",
                "0.5",
                "--quad-tail-cut",
                "0.1",
            ],
            vec!["frobnicate"],
            vec![],
        ] {
            let (code, out, err) = run_capture(&args);
            assert_eq!(code, 2, "{args:?}: {err}");
            assert!(out.is_empty());
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn numerical_failure_exits_3() {
        let (code, _, err) = run_capture(&[
            "eval",
            "--dist",
            "weibull:shape=0.3,scale=1",
            "--measure",
            "shannon",
            "--t",
            "1",
            "--quad-abs-tol",
            "1e-300",
            "--quad-rel-tol",
            "1e-300",
            "--quad-max-depth",
            "4",
        ]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("reconstruct"));
    }

    #[test]
    fn compare_prints_exact_verdict_fields() {
        let (code, out, _) = run_capture(&[
            "compare",
            "--dist-x",
            "exp:rate=1",
            "--dist-y",
            "exp:rate=1",
            "--t0",
            "1",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "cdf_gap",
                "conclusion_distance",
                "entropy_gap",
                "mismatch",
                "t0",
                "verdict"
            ]
        );
        assert_eq!(v["verdict"], "consistent");
    }

    #[test]
    fn estimate_needs_one_source() {
        let (code, _, _) = run_capture(&["estimate", "--t", "0.5"]);
        assert_eq!(code, 2);
        let (code, _, _) = run_capture(&[
            "estimate",
            "--t",
            "0.5",
            "--synth",
            "uniform:b=1",
            "--n",
            "100",
        ]);
        assert_eq!(code, 2);
        let (code, out, _) = run_capture(&[
            "estimate",
            "--t",
            "0.5",
            "--synth",
            "uniform:b=1",
            "--n",
            "1000",
            "--seed",
            "42",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["window"], v["k"].as_f64().unwrap().sqrt().floor());
    }
}
