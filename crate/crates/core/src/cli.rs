//! The `bohr` command-line front end.
//!
//! Every command produces a [`Table`]; `--format csv` prints it with nine
//! significant digits, `--format json` as `{"command": ..., "rows": [...]}`
//! with round-trip floats. Failures produce an `error` record and a nonzero
//! exit code.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::bounds::{
    ak_parameter_grid, bombieri_m_infty, cauchy_bound, cauchy_chain_check_with, default_mobius_grid,
    default_theorem4_search, default_theorem5_family, default_theorem5_radial, mobius_majorant_sup, random_polynomial,
    random_weight, theorem1_optimize, theorem1_residual, theorem1_root, theorem4_max_over_a, theorem4_scan,
    theorem4_upper_bound, theorem5_gap,
};
use crate::decimal::parse_decimal;
use crate::error::{Error, Result};
use crate::extremal::verify_sharpness;
use crate::grid::{GridSpec, DEFAULT_ANGLE_POINTS, DEFAULT_CRITERION_POINTS, DEFAULT_RADIAL_POINTS};
use crate::norms::weighted_bloch_norm_with;
use crate::series::{CircleScanner, TruncatedSeries};
use crate::solve::SolverConfig;
use crate::weights::{criterion_check_tol, default_r0_grid, find_admissible_r0, h_profile, WeightRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn decimal(s: &str) -> std::result::Result<f64, String> {
    parse_decimal(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "bohr", version, about = "Bohr radii of weighted Bloch spaces")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Main tolerance of the command (solver tolerance, criterion slack, ...).
    #[arg(long, global = true, value_parser = decimal)]
    pub tol: Option<f64>,

    /// Point count of the command's main scan grid.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root of log(1 - r^{2s}) = 1 - r^{-2(1-s)}, or its maximum over s.
    Theorem1 {
        #[arg(long, value_parser = decimal)]
        s: Option<f64>,
        #[arg(long)]
        optimize: bool,
    },
    /// Avkhadiev–Kayumov scan: sup_r R(1-r^2) sum |a_n| (Rr)^n, or the least R exceeding 1.
    Theorem4 {
        #[arg(long, value_parser = decimal)]
        a: Option<f64>,
        #[arg(long = "R", value_parser = decimal)]
        big_r: Option<f64>,
        #[arg(long)]
        search: bool,
        /// Points on the a-grid for --search.
        #[arg(long, default_value_t = 200)]
        a_points: usize,
    },
    /// Random checks of the Cauchy–Schwarz chain and the scan at R = 1/sqrt2.
    #[command(name = "theorem2-check")]
    Theorem2Check {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        a_points: usize,
    },
    /// Probe m_B(R) < R/sqrt(1-R^2) over the default function family.
    #[command(name = "theorem5-probe")]
    Theorem5Probe {
        #[arg(long = "R", value_parser = decimal, num_args = 1..)]
        big_r: Vec<f64>,
    },
    /// Bombieri's m_inf next to the Möbius-family supremum and the Cauchy bound.
    Bombieri {
        #[arg(long, value_parser = decimal)]
        r: Option<f64>,
        /// Points on [1/3, 1/sqrt2] when --r is absent.
        #[arg(long, default_value_t = 20)]
        n: usize,
    },
    /// Check the sharpness criterion at --r0, or search for an admissible r0.
    #[command(name = "weight-check")]
    WeightCheck {
        #[arg(long)]
        weight: String,
        #[arg(long, value_parser = decimal)]
        r0: Option<f64>,
    },
    /// CSV samples of both criterion branches and h(r) on [0, 1].
    #[command(name = "h-profile")]
    HProfile {
        #[arg(long, value_parser = decimal)]
        r0: f64,
        #[arg(long, default_value_t = 201)]
        n: usize,
    },
    /// End-to-end equality check of the extremal at R = 1/sqrt2.
    Sharpness {
        #[arg(long)]
        weight: String,
        /// Defaults to the weight's own r0.
        #[arg(long, value_parser = decimal)]
        r0: Option<f64>,
    },
    /// Circle norms and the weighted Bloch norm of a series read from JSON.
    Norms {
        #[arg(long)]
        series: PathBuf,
        #[arg(long, value_parser = decimal)]
        r: f64,
        #[arg(long, default_value = "standard")]
        weight: String,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Theorem1 { .. } => "theorem1",
            Command::Theorem4 { .. } => "theorem4",
            Command::Theorem2Check { .. } => "theorem2-check",
            Command::Theorem5Probe { .. } => "theorem5-probe",
            Command::Bombieri { .. } => "bombieri",
            Command::WeightCheck { .. } => "weight-check",
            Command::HProfile { .. } => "h-profile",
            Command::Sharpness { .. } => "sharpness",
            Command::Norms { .. } => "norms",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, command: &str) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(k, c)| (k.to_string(), json_cell(c))).collect();
                Value::Object(obj)
            })
            .collect();
        let mut top = Map::new();
        top.insert("command".into(), command.into());
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_sig(*v, 9),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
        Cell::Int(v) => (*v).into(),
        Cell::Bool(v) => (*v).into(),
        Cell::Text(s) => s.clone().into(),
        Cell::Empty => Value::Null,
    }
}

/// Rendered report plus exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

pub fn run(cli: &Cli) -> Outcome {
    let name = cli.command.name();
    match execute(cli) {
        Ok(table) => Outcome {
            output: match cli.format {
                Format::Csv => table.to_csv(),
                Format::Json => format!("{}\n", table.to_json(name)),
            },
            exit_code: 0,
        },
        Err(e) => {
            let output = match cli.format {
                Format::Csv => format!("error\n{}\n", csv_cell(&Cell::Text(e.to_string()))),
                Format::Json => {
                    let mut top = Map::new();
                    top.insert("command".into(), name.into());
                    top.insert("error".into(), e.to_string().into());
                    format!("{}\n", Value::Object(top))
                }
            };
            Outcome { output, exit_code: 1 }
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Argument
/// errors return clap's message with exit code 2.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome { output: e.to_string(), exit_code: if e.use_stderr() { 2 } else { 0 } },
    }
}

fn radial(cli: &Cli, default: usize) -> GridSpec {
    GridSpec::radial(cli.grid.unwrap_or(default))
}

fn execute(cli: &Cli) -> Result<Table> {
    let registry = WeightRegistry::builtin();
    match &cli.command {
        Command::Theorem1 { s, optimize } => {
            let mut cfg = SolverConfig::default();
            if let Some(t) = cli.tol {
                cfg = SolverConfig::new(t, cfg.max_iter, cfg.bracket)?;
            }
            if *optimize {
                let opt = theorem1_optimize(&cfg)?;
                let mut t = Table::new(&["s_star", "r_star", "local_maxima", "samples"]);
                t.push(vec![opt.s_star.into(), opt.r_star.into(), opt.local_maxima.into(), opt.samples.into()]);
                Ok(t)
            } else {
                let s = s.ok_or_else(|| Error::Invalid("theorem1 needs --s or --optimize".into()))?;
                let r = theorem1_root(s, &cfg)?;
                let mut t = Table::new(&["s", "r", "residual"]);
                t.push(vec![s.into(), r.into(), theorem1_residual(r, s).into()]);
                Ok(t)
            }
        }
        Command::Theorem4 { a, big_r, search, a_points } => {
            let r_grid = radial(cli, DEFAULT_RADIAL_POINTS);
            if *search {
                let mut cfg = default_theorem4_search();
                if let Some(t) = cli.tol {
                    cfg = SolverConfig::new(t, cfg.max_iter, cfg.bracket)?;
                }
                let rep = theorem4_upper_bound(&ak_parameter_grid(*a_points), &r_grid, &cfg)?;
                let mut t = Table::new(&["upper_bound", "a", "r", "value", "exceeded", "samples"]);
                t.push(vec![
                    rep.best_params["R"].into(),
                    rep.best_params["a"].into(),
                    rep.best_params["r"].into(),
                    rep.best_value.into(),
                    rep.exceeded_threshold.into(),
                    rep.samples.into(),
                ]);
                Ok(t)
            } else {
                let (Some(a), Some(big_r)) = (a, big_r) else {
                    return Err(Error::Invalid("theorem4 needs --a and --R, or --search".into()));
                };
                let rep = theorem4_scan(*a, *big_r, &r_grid)?;
                let mut t = Table::new(&["a", "R", "r", "sup_value", "exceeded"]);
                t.push(vec![
                    (*a).into(),
                    (*big_r).into(),
                    rep.best_params["r"].into(),
                    rep.best_value.into(),
                    rep.exceeded_threshold.into(),
                ]);
                Ok(t)
            }
        }
        Command::Theorem2Check { samples, seed, a_points } => {
            let tol = cli.tol.unwrap_or(1e-12);
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let scanner = CircleScanner::new(GridSpec::angle(1024));
            let mut violations = 0usize;
            for _ in 0..*samples {
                use rand::Rng;
                let s = random_polynomial(&mut rng, 12);
                let w = random_weight(&mut rng);
                let big_r = rng.gen_range(0.0..0.99);
                let r = rng.gen_range(0.0..0.99);
                if !cauchy_chain_check_with(&s, w.as_ref(), big_r, r, &scanner)?.is_increasing(tol) {
                    violations += 1;
                }
            }
            let scan =
                theorem4_max_over_a(FRAC_1_SQRT_2, &ak_parameter_grid(*a_points), &radial(cli, DEFAULT_RADIAL_POINTS))?;
            let mut t =
                Table::new(&["chain_samples", "chain_violations", "critical_scan_max", "critical_scan_a", "exceeded"]);
            t.push(vec![
                (*samples).into(),
                violations.into(),
                scan.best_value.into(),
                scan.best_params["a"].into(),
                scan.exceeded_threshold.into(),
            ]);
            Ok(t)
        }
        Command::Theorem5Probe { big_r } => {
            let rs = if big_r.is_empty() { vec![0.3, 0.5, FRAC_1_SQRT_2, 0.9] } else { big_r.clone() };
            let radial_grid = cli.grid.map(GridSpec::radial).unwrap_or_else(default_theorem5_radial);
            let scanner = CircleScanner::new(GridSpec::angle(1024));
            let mut t = Table::new(&["R", "bound", "best_ratio", "gap", "best_function"]);
            for r in rs {
                let family = default_theorem5_family(r)?;
                let rep = theorem5_gap(r, &family, &radial_grid, &scanner)?;
                t.push(vec![r.into(), rep.bound.into(), rep.best_ratio.into(), rep.gap.into(), rep.best_label.into()]);
            }
            Ok(t)
        }
        Command::Bombieri { r, n } => {
            let rs: Vec<f64> = match r {
                Some(r) => vec![*r],
                None => GridSpec::new(1.0 / 3.0, FRAC_1_SQRT_2, *n).iter().collect(),
            };
            let a_grid = cli.grid.map(|p| GridSpec::new(0.0, 1.0, p)).unwrap_or_else(default_mobius_grid);
            let mut t = Table::new(&["r", "m_infty", "mobius_sup", "cauchy_bound"]);
            for r in rs {
                let m = bombieri_m_infty(r)?;
                let mob = mobius_majorant_sup(r, &a_grid)?;
                t.push(vec![r.into(), m.into(), mob.value.into(), cauchy_bound(r).into()]);
            }
            Ok(t)
        }
        Command::WeightCheck { weight, r0 } => {
            let w = registry.parse(weight)?;
            let grid = radial(cli, DEFAULT_CRITERION_POINTS);
            let tol = cli.tol.unwrap_or(crate::weights::CRITERION_TOL);
            let mut t = Table::new(&["weight", "mode", "r0", "passed", "worst_margin", "worst_r", "violation_witness"]);
            let report = match r0 {
                Some(r0) => Some(criterion_check_tol(w.as_ref(), *r0, &grid, tol)?),
                None => find_admissible_r0(w.as_ref(), &default_r0_grid(), &grid)?,
            };
            let mode = if r0.is_some() { "check" } else { "search" };
            match report {
                Some(rep) => t.push(vec![
                    rep.weight.into(),
                    mode.into(),
                    rep.r0.into(),
                    rep.passed.into(),
                    rep.worst_margin.into(),
                    rep.worst_r.into(),
                    rep.violation_witness.into(),
                ]),
                None => t.push(vec![
                    w.token().into(),
                    mode.into(),
                    Cell::Empty,
                    false.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                ]),
            }
            Ok(t)
        }
        Command::HProfile { r0, n } => {
            let rows = h_profile(*r0, &GridSpec::new(0.0, 1.0, *n))?;
            let mut t = Table::new(&["r", "omega1", "omega2", "h"]);
            for row in rows {
                t.push(vec![row.r.into(), row.omega1.into(), row.omega2.into(), row.h.into()]);
            }
            Ok(t)
        }
        Command::Sharpness { weight, r0 } => {
            let w = registry.parse(weight)?;
            let r0 = r0
                .or_else(|| w.r0_hint())
                .ok_or_else(|| Error::Invalid(format!("weight {weight} has no built-in r0; pass --r0")))?;
            let rep = verify_sharpness(
                w.as_ref(),
                r0,
                &GridSpec::radial(DEFAULT_CRITERION_POINTS),
                &radial(cli, DEFAULT_RADIAL_POINTS),
            )?;
            let mut t = Table::new(&[
                "weight",
                "r0",
                "passed",
                "lhs_sup",
                "rhs_sup",
                "lhs_witness_r",
                "rhs_witness_r",
                "relative_gap",
            ]);
            t.push(vec![
                rep.weight.into(),
                rep.r0.into(),
                rep.passed.into(),
                rep.lhs_sup.into(),
                rep.rhs_sup.into(),
                rep.lhs_witness_r.into(),
                rep.rhs_witness_r.into(),
                rep.relative_gap.into(),
            ]);
            Ok(t)
        }
        Command::Norms { series, r, weight } => {
            let text =
                std::fs::read_to_string(series).map_err(|e| Error::Invalid(format!("{}: {e}", series.display())))?;
            let s: TruncatedSeries =
                serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", series.display())))?;
            let w = registry.parse(weight)?;
            let scanner = CircleScanner::new(GridSpec::angle(DEFAULT_ANGLE_POINTS));
            let n = scanner.norms(&s, *r)?;
            let bloch = weighted_bloch_norm_with(&s, w.as_ref(), &radial(cli, DEFAULT_RADIAL_POINTS), &scanner)?;
            let mut t =
                Table::new(&["r", "sup_norm", "l2_norm", "coeff_sum", "sup_theta", "error_bound", "bloch_norm"]);
            t.push(vec![
                n.r.into(),
                n.sup_norm.into(),
                n.l2_norm.into(),
                n.coeff_sum.into(),
                n.sup_theta.into(),
                n.error_bound.into(),
                bloch.into(),
            ]);
            Ok(t)
        }
    }
}

/// Renders `outcome` to `--out` or stdout. Returns the process exit code.
pub fn emit(cli_out: Option<&std::path::Path>, outcome: &Outcome) -> i32 {
    match cli_out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.output) {
                eprintln!("error: {}: {e}", path.display());
                return 1;
            }
        }
        None => print!("{}", outcome.output),
    }
    if outcome.exit_code != 0 {
        let mut msg = String::new();
        let _ = write!(msg, "bohr: command failed");
        eprintln!("{msg}");
    }
    outcome.exit_code
}
