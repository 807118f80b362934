//! Parameter sweeps: config parsing, the per-point pipeline, and CSV output.
//!
//! A config is a line-based `key = value` file. `#` starts a comment. Keys:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `h` or `h_min`, `h_max`, `h_steps` | field grid | required |
//! | `k` or `k_min`, `k_max`, `k_steps` | three-spin coupling grid | required |
//! | `t_mean`, `delta_t` | bath temperatures, T1 = T_M + ΔT/2, T3 = T_M − ΔT/2 | one pair required |
//! | `t1`, `t3` | raw bath temperatures | one pair required |
//! | `j` | exchange coupling | 1 |
//! | `gamma` | bath rate | 0.01 |
//! | `pairs` | spin pairs | 13,23 |
//! | `method` | `nullspace` or `rk4` | nullspace |
//! | `jump_mode` | `generic` or `analytic` | generic |
//! | `measure` | measured spin of the pair, `a` or `b` | b |
//! | `out` | CSV path | none |
//! | `emit_occupations` | write P1..P8 columns | true |
//! | `emit_gap` | write the gap_35 column | true |
//!
//! The temperature keys accept comma-separated lists. Every combination of
//! the listed values becomes one series of the sweep.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::correlations::{pair_correlations, MeasuredSide, SpinPair};
use crate::error::{Error, Result};
use crate::lindblad::{occupation_probabilities, solve_point, BathSpec, JumpMode, SteadyMethod};
use crate::spectrum::{energy_gap_35, ChainParams};

/// Rows whose steady-state residual reaches this are sent to the error file.
pub const MAX_RESIDUAL: f64 = 1e-8;
/// Tolerance for the per-row consistency checks.
const ROW_TOL: f64 = 1e-8;
/// Significant digits of every float in the CSV.
pub const DEFAULT_PRECISION: usize = 12;
/// Overrides [`DEFAULT_PRECISION`].
pub const PRECISION_ENV: &str = "XXCHAIN_PRECISION";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Grid {
            min: v,
            max: v,
            steps: 1,
        }
    }

    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::Config(format!(
                "grid bounds must be finite, got [{min}, {max}]"
            )));
        }
        if steps == 0 {
            return Err(Error::Config("grid needs at least one step".into()));
        }
        if min > max {
            return Err(Error::Config(format!(
                "grid minimum {min} exceeds maximum {max}"
            )));
        }
        Ok(Grid { min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.min + span * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathSeries {
    Mean { t_mean: Vec<f64>, delta_t: Vec<f64> },
    Raw { t1: Vec<f64>, t3: Vec<f64> },
}

impl BathSeries {
    /// All (T1, T3) combinations, T_mean (or T1) varying slowest.
    pub fn temperatures(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        match self {
            BathSeries::Mean { t_mean, delta_t } => {
                for &tm in t_mean {
                    for &dt in delta_t {
                        out.push((tm + dt / 2.0, tm - dt / 2.0));
                    }
                }
            }
            BathSeries::Raw { t1, t3 } => {
                for &a in t1 {
                    for &b in t3 {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        for (t1, t3) in self.temperatures() {
            if !(t1 > 0.0 && t1.is_finite()) || !(t3 > 0.0 && t3.is_finite()) {
                return Err(Error::Config(format!(
                    "bath temperatures must be positive, got T1 = {t1}, T3 = {t3}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub h: Grid,
    pub k: Grid,
    pub j: f64,
    pub baths: BathSeries,
    pub gamma: f64,
    pub pairs: Vec<SpinPair>,
    pub method: SteadyMethod,
    pub jump_mode: JumpMode,
    pub measure: MeasuredSide,
    pub out: Option<PathBuf>,
    pub emit_occupations: bool,
    pub emit_gap: bool,
}

const KNOWN_KEYS: &[&str] = &[
    "h",
    "h_min",
    "h_max",
    "h_steps",
    "k",
    "k_min",
    "k_max",
    "k_steps",
    "j",
    "t_mean",
    "delta_t",
    "t1",
    "t3",
    "gamma",
    "pairs",
    "method",
    "jump_mode",
    "measure",
    "out",
    "emit_occupations",
    "emit_gap",
];

pub fn parse_config(text: &str) -> Result<SweepConfig> {
    let mut kv = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got {raw:?}",
                n + 1
            ))
        })?;
        let key = key.trim().to_ascii_lowercase();
        if kv.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key {key:?}",
                n + 1
            )));
        }
    }

    let unknown: Vec<&str> = kv
        .keys()
        .map(String::as_str)
        .filter(|k| !KNOWN_KEYS.contains(k))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::Config(format!(
            "unknown keys: {}",
            unknown.join(", ")
        )));
    }

    // Temperatures first, so an unphysical bath is reported even in a partial config.
    let baths = parse_baths(&kv)?;
    baths.validate()?;

    let h = parse_grid(&kv, "h")?;
    let k = parse_grid(&kv, "k")?;
    let j = opt_f64(&kv, "j")?.unwrap_or(1.0);
    if !(j > 0.0 && j.is_finite()) {
        return Err(Error::Config(format!("j must be positive, got {j}")));
    }
    let gamma = opt_f64(&kv, "gamma")?.unwrap_or(0.01);
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Config(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let pairs = match kv.get("pairs") {
        Some(v) => {
            let mut p = v
                .split(',')
                .map(str::parse)
                .collect::<Result<Vec<SpinPair>>>()?;
            p.sort();
            p.dedup();
            p
        }
        None => vec![SpinPair::P13, SpinPair::P23],
    };
    if pairs.is_empty() {
        return Err(Error::Config("pairs must not be empty".into()));
    }

    Ok(SweepConfig {
        h,
        k,
        j,
        baths,
        gamma,
        pairs,
        method: kv
            .get("method")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(SteadyMethod::Nullspace),
        jump_mode: kv
            .get("jump_mode")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(JumpMode::Generic),
        measure: kv
            .get("measure")
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(MeasuredSide::B),
        out: kv.get("out").map(PathBuf::from),
        emit_occupations: opt_bool(&kv, "emit_occupations")?.unwrap_or(true),
        emit_gap: opt_bool(&kv, "emit_gap")?.unwrap_or(true),
    })
}

pub fn load_config(path: &Path) -> Result<SweepConfig> {
    parse_config(&fs::read_to_string(path)?)
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?} as a number")))
}

fn opt_f64(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    kv.get(key).map(|v| parse_f64(key, v)).transpose()
}

fn list_f64(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<Vec<f64>>> {
    kv.get(key)
        .map(|v| v.split(',').map(|x| parse_f64(key, x)).collect())
        .transpose()
}

fn opt_bool(kv: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>> {
    kv.get(key)
        .map(|v| match v.to_ascii_lowercase().as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            other => Err(Error::Config(format!(
                "{key}: expected true or false, got {other:?}"
            ))),
        })
        .transpose()
}

fn parse_baths(kv: &BTreeMap<String, String>) -> Result<BathSeries> {
    let mean = (list_f64(kv, "t_mean")?, list_f64(kv, "delta_t")?);
    let raw = (list_f64(kv, "t1")?, list_f64(kv, "t3")?);
    let has_mean = mean.0.is_some() || mean.1.is_some();
    let has_raw = raw.0.is_some() || raw.1.is_some();
    match (mean, raw) {
        _ if has_mean && has_raw => Err(Error::Config(
            "give either t_mean/delta_t or t1/t3, not both".into(),
        )),
        ((Some(t_mean), Some(delta_t)), _) => Ok(BathSeries::Mean { t_mean, delta_t }),
        (_, (Some(t1), Some(t3))) => Ok(BathSeries::Raw { t1, t3 }),
        _ if has_mean => Err(Error::Config(
            "t_mean and delta_t must be given together".into(),
        )),
        _ if has_raw => Err(Error::Config("t1 and t3 must be given together".into())),
        _ => Err(Error::Config(
            "missing bath temperatures (t_mean/delta_t or t1/t3)".into(),
        )),
    }
}

fn parse_grid(kv: &BTreeMap<String, String>, name: &str) -> Result<Grid> {
    let single = opt_f64(kv, name)?;
    let min = opt_f64(kv, &format!("{name}_min"))?;
    let max = opt_f64(kv, &format!("{name}_max"))?;
    let steps = kv
        .get(&format!("{name}_steps"))
        .map(|v| {
            v.parse::<usize>().map_err(|_| {
                Error::Config(format!(
                    "{name}_steps: expected a non-negative integer, got {v:?}"
                ))
            })
        })
        .transpose()?;
    match (single, min, max, steps) {
        (Some(v), None, None, None) => Grid::new(v, v, 1),
        (Some(_), ..) => Err(Error::Config(format!(
            "give either {name} or {name}_min/max/steps, not both"
        ))),
        (None, Some(a), Some(b), s) => Grid::new(a, b, s.unwrap_or(1)),
        (None, None, None, None) => Err(Error::Config(format!(
            "missing key {name} (or {name}_min/{name}_max)"
        ))),
        _ => Err(Error::Config(format!(
            "{name}_min and {name}_max must be given together"
        ))),
    }
}

/// One output line: a grid point, a bath setting and a spin pair.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub h: f64,
    pub k: f64,
    pub gamma: f64,
    pub t1: f64,
    pub t3: f64,
    pub pair: SpinPair,
    pub discord: f64,
    pub classical_correlation: f64,
    pub mutual_information: f64,
    pub concurrence: f64,
    pub occupations: [f64; 8],
    pub gap_35: f64,
    pub residual_norm: f64,
}

/// Same field names and order as the CSV columns.
impl Serialize for CorrelationRow {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(19))?;
        m.serialize_entry("h", &self.h)?;
        m.serialize_entry("k", &self.k)?;
        m.serialize_entry("gamma", &self.gamma)?;
        m.serialize_entry("T1", &self.t1)?;
        m.serialize_entry("T3", &self.t3)?;
        m.serialize_entry("pair", &self.pair)?;
        m.serialize_entry("discord", &self.discord)?;
        m.serialize_entry("classical_correlation", &self.classical_correlation)?;
        m.serialize_entry("mutual_information", &self.mutual_information)?;
        m.serialize_entry("concurrence", &self.concurrence)?;
        for (l, p) in self.occupations.iter().enumerate() {
            m.serialize_entry(&format!("P{}", l + 1), p)?;
        }
        m.serialize_entry("gap_35", &self.gap_35)?;
        m.serialize_entry("residual_norm", &self.residual_norm)?;
        m.end()
    }
}

impl CorrelationRow {
    /// The row invariants; a violated one describes itself.
    pub fn check(&self) -> std::result::Result<(), String> {
        let numbers = [
            self.discord,
            self.classical_correlation,
            self.mutual_information,
            self.concurrence,
            self.gap_35,
            self.residual_norm,
        ];
        if numbers
            .iter()
            .chain(&self.occupations)
            .any(|x| !x.is_finite())
        {
            return Err("non-finite value".into());
        }
        if self.residual_norm >= MAX_RESIDUAL {
            return Err(format!(
                "steady-state residual {:e} is not below {MAX_RESIDUAL:e}",
                self.residual_norm
            ));
        }
        let split = self.discord + self.classical_correlation - self.mutual_information;
        if split.abs() > ROW_TOL {
            return Err(format!(
                "discord + classical correlation misses mutual information by {split:e}"
            ));
        }
        if !(-ROW_TOL..=1.0 + ROW_TOL).contains(&self.concurrence) {
            return Err(format!("concurrence {} outside [0, 1]", self.concurrence));
        }
        let total: f64 = self.occupations.iter().sum();
        if (total - 1.0).abs() > ROW_TOL {
            return Err(format!("occupations sum to {total}"));
        }
        Ok(())
    }
}

/// A grid point that produced no row for `pair`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub h: f64,
    pub k: f64,
    pub t1: f64,
    pub t3: f64,
    pub pair: Option<SpinPair>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    pub rows: Vec<CorrelationRow>,
    pub failures: Vec<PointFailure>,
}

struct Point {
    t1: f64,
    t3: f64,
    h: f64,
    k: f64,
}

/// Solves every grid point and evaluates each pair.
///
/// Points run in parallel; results come back in (bath series, h, k, pair)
/// order regardless of scheduling.
pub fn run_sweep(config: &SweepConfig) -> SweepOutcome {
    let mut points = Vec::new();
    for (t1, t3) in config.baths.temperatures() {
        for &h in &config.h.values() {
            for &k in &config.k.values() {
                points.push(Point { t1, t3, h, k });
            }
        }
    }

    let per_point: Vec<(Vec<CorrelationRow>, Vec<PointFailure>)> = points
        .par_iter()
        .map(|p| solve_grid_point(config, p))
        .collect();

    let mut outcome = SweepOutcome::default();
    for (rows, failures) in per_point {
        outcome.rows.extend(rows);
        outcome.failures.extend(failures);
    }
    outcome
}

/// Rows for one (h, k, T1, T3) point under the settings of `config`.
pub fn evaluate_point(
    config: &SweepConfig,
    h: f64,
    k: f64,
    t1: f64,
    t3: f64,
) -> (Vec<CorrelationRow>, Vec<PointFailure>) {
    solve_grid_point(config, &Point { t1, t3, h, k })
}

fn solve_grid_point(config: &SweepConfig, p: &Point) -> (Vec<CorrelationRow>, Vec<PointFailure>) {
    let fail = |pair: Option<SpinPair>, e: String| PointFailure {
        h: p.h,
        k: p.k,
        t1: p.t1,
        t3: p.t3,
        pair,
        message: e,
    };
    let solution = ChainParams::with_coupling(config.j, p.h, p.k).and_then(|params| {
        let baths = BathSpec::new(p.t1, p.t3, config.gamma)?;
        solve_point(&params, &baths, config.method, config.jump_mode)
    });
    let sol = match solution {
        Ok(s) => s,
        Err(e) => {
            log::warn!(
                "h = {}, k = {}, T1 = {}, T3 = {}: {e}",
                p.h,
                p.k,
                p.t1,
                p.t3
            );
            return (
                Vec::new(),
                config
                    .pairs
                    .iter()
                    .map(|&pair| fail(Some(pair), e.to_string()))
                    .collect(),
            );
        }
    };
    let occupations = occupation_probabilities(&sol.steady.rho, &sol.spectrum);
    let gap = energy_gap_35(&sol.spectrum.params);

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &pair in &config.pairs {
        let row =
            pair_correlations(&sol.steady.rho, pair, config.measure).map(|c| CorrelationRow {
                h: p.h,
                k: p.k,
                gamma: config.gamma,
                t1: p.t1,
                t3: p.t3,
                pair,
                discord: c.discord,
                classical_correlation: c.classical_correlation,
                mutual_information: c.mutual_information,
                concurrence: c.concurrence,
                occupations,
                gap_35: gap,
                residual_norm: sol.steady.residual,
            });
        match row
            .map_err(|e| e.to_string())
            .and_then(|r| r.check().map(|_| r))
        {
            Ok(r) => rows.push(r),
            Err(msg) => failures.push(fail(Some(pair), msg)),
        }
    }
    (rows, failures)
}

/// Significant digits for CSV floats, honouring the environment override.
pub fn output_precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&p| (1..=17).contains(&p))
        .unwrap_or(DEFAULT_PRECISION)
}

/// `%g`-style formatting: `digits` significant digits, trailing zeros dropped,
/// exponent form outside [1e-5, 10^digits).
pub fn format_float(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_header(config: &SweepConfig) -> String {
    let mut cols = vec![
        "h",
        "k",
        "gamma",
        "T1",
        "T3",
        "pair",
        "discord",
        "classical_correlation",
        "mutual_information",
        "concurrence",
    ]
    .into_iter()
    .map(String::from)
    .collect::<Vec<_>>();
    if config.emit_occupations {
        cols.extend((1..=8).map(|l| format!("P{l}")));
    }
    if config.emit_gap {
        cols.push("gap_35".into());
    }
    cols.push("residual_norm".into());
    cols.join(",")
}

pub fn csv_line(row: &CorrelationRow, config: &SweepConfig, digits: usize) -> String {
    let f = |x: f64| format_float(x, digits);
    let mut line = String::new();
    for x in [row.h, row.k, row.gamma, row.t1, row.t3] {
        let _ = write!(line, "{},", f(x));
    }
    let _ = write!(line, "{},", row.pair.label());
    for x in [
        row.discord,
        row.classical_correlation,
        row.mutual_information,
        row.concurrence,
    ] {
        let _ = write!(line, "{},", f(x));
    }
    if config.emit_occupations {
        for &p in &row.occupations {
            let _ = write!(line, "{},", f(p));
        }
    }
    if config.emit_gap {
        let _ = write!(line, "{},", f(row.gap_35));
    }
    line.push_str(&f(row.residual_norm));
    line
}

pub fn to_csv(rows: &[CorrelationRow], config: &SweepConfig) -> String {
    let digits = output_precision();
    let mut out = csv_header(config);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_line(r, config, digits));
        out.push('\n');
    }
    out
}

pub fn failures_csv(failures: &[PointFailure]) -> String {
    let digits = output_precision();
    let mut out = String::from("h,k,T1,T3,pair,error\n");
    for e in failures {
        let pair = e.pair.map(|p| p.label()).unwrap_or("");
        let msg = e.message.replace('"', "'");
        let _ = writeln!(
            out,
            "{},{},{},{},{pair},\"{msg}\"",
            format_float(e.h, digits),
            format_float(e.k, digits),
            format_float(e.t1, digits),
            format_float(e.t3, digits)
        );
    }
    out
}

/// Path of the error file next to `out`.
pub fn errors_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".errors.csv");
    PathBuf::from(name)
}

/// Writes the CSV, plus the error file when any point failed.
pub fn write_outputs(outcome: &SweepOutcome, config: &SweepConfig, out: &Path) -> Result<()> {
    fs::write(out, to_csv(&outcome.rows, config))?;
    let sidecar = errors_path(out);
    if outcome.failures.is_empty() {
        if sidecar.exists() {
            fs::remove_file(&sidecar)?;
        }
    } else {
        fs::write(&sidecar, failures_csv(&outcome.failures))?;
    }
    Ok(())
}
