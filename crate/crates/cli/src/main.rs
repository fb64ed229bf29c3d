//! Command-line front end: loads a scenario, runs one verifier and writes
//! the report as JSON or CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use smtlab_core::nevanlinna::{fmt_residual, FmtResidual, NevanlinnaProfile, QuadConfig};
use smtlab_core::position::{distributive_constant, SamplingConfig};
use smtlab_core::scenario::{load_scenario, Scenario};
use smtlab_core::smt::{defect_relation_report, problem_constants, verify_main_inequality, RunOptions};
use smtlab_core::weights::{check_evertse_ferretti, chow_weight_estimate, hilbert_weight, ChowEstimate, InequalityCheck};
use smtlab_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "smtlab", version, about = "Second main theorem laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1e-8)]
    quad_tol: f64,
    #[arg(long, global = true, default_value_t = 40)]
    max_u: u32,
    #[arg(long, global = true, default_value_t = 3)]
    samples: usize,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Adds n(0)·log(r/r0) to counting functions.
    #[arg(long, global = true)]
    strict_jensen: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Truncation constants for the scenario.
    Constants,
    /// Distributive constant and subset table.
    Distributive,
    /// Hilbert weights and the Chow-weight estimate for the scenario weights.
    Weights,
    /// Characteristic, proximity and counting functions along the grid.
    Nevanlinna,
    /// First main theorem residuals.
    FmtCheck,
    /// Both sides of the main inequality.
    Verify,
    /// Truncated defects and the defect relation.
    Defects,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

struct Report {
    json: serde_json::Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    falsified: bool,
}

impl Report {
    fn new<T: Serialize>(value: &T, header: &[&str], rows: Vec<Vec<String>>) -> Result<Self> {
        let json = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
        Ok(Self { json, header: header.iter().map(|s| s.to_string()).collect(), rows, falsified: false })
    }

    fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(&self.json).map_err(|e| Error::Io(e.to_string()))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Io(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row).map_err(io)?;
                }
                w.into_inner().map_err(|e| Error::Io(e.to_string()))
            }
        }
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else if x > 0.0 {
        "inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

#[derive(Serialize)]
struct WeightsReport {
    hilbert: Vec<HilbertRow>,
    chow: ChowEstimate,
    check_u: u32,
    check: Option<InequalityCheck>,
}

#[derive(Serialize)]
struct HilbertRow {
    u: u32,
    hilbert_function: u64,
    weight: String,
    normalized: f64,
}

#[derive(Serialize)]
struct FmtEntry {
    index: usize,
    #[serde(flatten)]
    residual: FmtResidual,
}

fn run(cli: &Cli, scenario: &Scenario) -> Result<Report> {
    let sampling = SamplingConfig {
        samples: cli.samples,
        seed: cli.seed.or(scenario.seed).unwrap_or(SamplingConfig::default().seed),
        ..SamplingConfig::default()
    };
    let quad = QuadConfig::with_tol(cli.quad_tol);
    let opts = RunOptions { quad, sampling, strict_jensen: cli.strict_jensen };
    let problem = scenario.to_problem();
    match cli.command {
        Command::Constants => {
            let r = problem_constants(&problem, &sampling)?;
            let mut rows = vec![
                vec!["variant".into(), format!("{:?}", r.constants.variant)],
                vec!["delta".into(), r.distributive.value.to_string()],
                vec!["u".into(), r.constants.u.as_ref().map(|u| u.to_string()).unwrap_or_default()],
                vec!["L".into(), r.constants.l.as_ref().map(|l| l.to_string()).unwrap_or_default()],
                vec!["log10_L".into(), num(r.constants.log10_l)],
            ];
            if let Some(b) = &r.baseline {
                rows.push(vec!["log10_L_baseline".into(), num(b.log10_l)]);
            }
            Report::new(&r, &["key", "value"], rows)
        }
        Command::Distributive => {
            let r = distributive_constant(&scenario.variety, &scenario.family, &sampling)?;
            let rows = r
                .table
                .iter()
                .map(|e| {
                    let s: Vec<String> = e.subset.iter().map(|i| i.to_string()).collect();
                    vec![s.join(" "), e.size.to_string(), e.dim.to_string(), e.ratio.to_string()]
                })
                .collect();
            Report::new(&r, &["subset", "size", "dim", "ratio"], rows)
        }
        Command::Weights => {
            let c = scenario
                .weights
                .as_ref()
                .ok_or_else(|| Error::Validation { field: "weights".into(), message: "required by this command".into() })?;
            let x = &scenario.variety;
            let chow = chow_weight_estimate(x, c, cli.max_u)?;
            let hilbert = chow
                .sequence
                .iter()
                .map(|&(u, su)| {
                    Ok(HilbertRow {
                        u,
                        hilbert_function: x.hilbert_function(u),
                        weight: hilbert_weight(x, u, c)?.value.to_string(),
                        normalized: su,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let check_u = cli.max_u;
            let check = if u64::from(check_u) > x.degree() { Some(check_evertse_ferretti(x, check_u, c, &chow)?) } else { None };
            let rows = hilbert
                .iter()
                .map(|h| vec![h.u.to_string(), h.hilbert_function.to_string(), h.weight.clone(), num(h.normalized)])
                .collect();
            let falsified = check.as_ref().is_some_and(|c| c.falsified);
            let mut rep = Report::new(&WeightsReport { hilbert, chow, check_u, check }, &["u", "H", "S", "s_u"], rows)?;
            rep.falsified = falsified;
            Ok(rep)
        }
        Command::Nevanlinna => {
            let trunc = vec![scenario.truncation; scenario.family.len()];
            let p = NevanlinnaProfile::compute(
                &scenario.curve,
                scenario.family.members(),
                &trunc,
                &scenario.grid,
                &quad,
                cli.strict_jensen,
            )?;
            let header = p.csv_header();
            let rows = p.csv_rows().into_iter().map(|r| r.into_iter().map(num).collect()).collect();
            let mut rep = Report::new(&p, &[], rows)?;
            rep.header = header;
            Ok(rep)
        }
        Command::FmtCheck => {
            let entries = scenario
                .family
                .members()
                .iter()
                .enumerate()
                .map(|(index, q)| Ok(FmtEntry { index, residual: fmt_residual(&scenario.curve, q, &scenario.grid, &quad)? }))
                .collect::<Result<Vec<_>>>()?;
            let rows = entries
                .iter()
                .flat_map(|e| {
                    e.residual
                        .radii
                        .iter()
                        .zip(&e.residual.residuals)
                        .map(move |(r, x)| vec![e.index.to_string(), num(*r), num(*x)])
                })
                .collect();
            Report::new(&entries, &["index", "r", "residual"], rows)
        }
        Command::Verify => {
            let r = verify_main_inequality(&problem, &opts)?;
            let rows = r
                .rows
                .iter()
                .map(|x| {
                    [x.r, x.characteristic, x.lhs, x.counting_sum, x.correction, x.rhs, x.margin]
                        .into_iter()
                        .map(num)
                        .collect()
                })
                .collect();
            let mut rep = Report::new(&r, &["r", "T", "LHS", "N_sum", "correction", "RHS", "margin"], rows)?;
            rep.falsified = r.falsified();
            Ok(rep)
        }
        Command::Defects => {
            let r = defect_relation_report(&problem, &opts)?;
            let rows = r
                .rows
                .iter()
                .map(|x| vec![x.index.to_string(), x.degree.to_string(), num(x.defect.value)])
                .collect();
            let mut rep = Report::new(&r, &["index", "degree", "defect"], rows)?;
            rep.falsified = !r.holds;
            Ok(rep)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| Error::Validation { field: "--scenario".into(), message: "required".into() })?;
    let scenario = load_scenario(path)?;
    let report = run(cli, &scenario)?;
    let bytes = report.render(cli.format)?;
    match &cli.output {
        Some(p) => std::fs::write(p, &bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| Error::Io(e.to_string()))?;
        }
    }
    Ok(report.falsified)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("falsification events reported");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
