use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use xxchain::correlations::{
    pure_state_pair_correlations, CorrelationRecord, MeasuredSide, SpinPair,
};
use xxchain::linalg::{trace, validate_state, Mat4, Mat8, C64};
use xxchain::lindblad::{
    build_jump_operators, evolve_rk4, occupation_probabilities, suggested_dt, BathSpec, Frame,
    JumpMode, Liouvillian, Rk4Options, SteadyMethod,
};
use xxchain::spectrum::{
    analytic_eigensystem, build_hamiltonian, energy_gap_35, transition_frequencies, ChainParams,
};
use xxchain::sweep::{self, SweepConfig};
use xxchain::{Error, Result};

#[derive(Parser)]
#[command(
    name = "xxchain",
    version,
    about = "Three-spin XX chain between two thermal baths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues, mixing angles and Bohr frequencies as JSON.
    Spectrum {
        #[arg(long)]
        h: f64,
        #[arg(long)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        j: f64,
    },
    /// Steady-state correlations of one pair at one point, as JSON.
    Steady {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "13")]
        pair: SpinPair,
    },
    /// Time evolution from a given initial state, as CSV.
    Evolve {
        #[command(flatten)]
        point: PointArgs,
        /// Initial state: `mixed` or an eigenstate label 1..8.
        #[arg(long, default_value = "mixed")]
        init: String,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 100)]
        sample_every: usize,
        #[arg(long, default_value = "rotating")]
        frame: Frame,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parameter sweep from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair correlations of the eigenstate |φ₅⟩.
    Purestate {
        #[arg(long)]
        k: f64,
        #[arg(long, default_value = "13")]
        pair: SpinPair,
    },
    /// Correlations of a two-spin state read from a JSON 4×4 matrix.
    Discord {
        #[arg(long)]
        state_file: PathBuf,
        #[arg(long, default_value = "b")]
        measure: MeasuredSide,
    },
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    h: f64,
    #[arg(long)]
    k: f64,
    #[arg(long, default_value_t = 1.0)]
    j: f64,
    #[arg(long, requires = "delta_t", conflicts_with_all = ["t1", "t3"])]
    t_mean: Option<f64>,
    #[arg(long, requires = "t_mean")]
    delta_t: Option<f64>,
    #[arg(long, requires = "t3")]
    t1: Option<f64>,
    #[arg(long, requires = "t1")]
    t3: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    gamma: f64,
    #[arg(long, default_value = "nullspace")]
    method: SteadyMethod,
    #[arg(long, default_value = "generic")]
    jump_mode: JumpMode,
    #[arg(long, default_value = "b")]
    measure: MeasuredSide,
}

impl PointArgs {
    fn temperatures(&self) -> Result<(f64, f64)> {
        match (self.t_mean, self.delta_t, self.t1, self.t3) {
            (Some(tm), Some(dt), None, None) => Ok((tm + dt / 2.0, tm - dt / 2.0)),
            (None, None, Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::Config("give --t-mean/--delta-t or --t1/--t3".into())),
        }
    }

    fn params(&self) -> Result<ChainParams> {
        ChainParams::with_coupling(self.j, self.h, self.k)
    }

    fn baths(&self) -> Result<BathSpec> {
        let (t1, t3) = self.temperatures()?;
        BathSpec::new(t1, t3, self.gamma)
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn record_json(r: &CorrelationRecord) -> Value {
    json!({
        "discord": r.discord,
        "classical_correlation": r.classical_correlation,
        "mutual_information": r.mutual_information,
        "concurrence": r.concurrence,
        "theta": r.theta,
        "phi": r.phi,
    })
}

fn cmd_spectrum(h: f64, k: f64, j: f64) -> Result<()> {
    let p = ChainParams::with_coupling(j, h, k)?;
    let spec = analytic_eigensystem(&p);
    let w = transition_frequencies(&p);
    let a = spec.angles;
    let mut v = json!({
        "h": h,
        "k": k,
        "J": j,
        "B": a.b,
        "sin_a1": a.sin_a1,
        "cos_a1": a.cos_a1,
        "sin_a2": a.sin_a2,
        "cos_a2": a.cos_a2,
        "alpha_1": a.alpha1(),
        "alpha_2": a.alpha2(),
        "omega_1": w.omega1,
        "omega_2": w.omega2,
        "omega_3": w.omega3,
        "gap_35": energy_gap_35(&p),
    });
    for (l, e) in spec.energies.iter().enumerate() {
        v[format!("epsilon_{}", l + 1)] = json!(e);
    }
    print_json(&v)
}

fn cmd_steady(point: &PointArgs, pair: SpinPair) -> Result<()> {
    let (t1, t3) = point.temperatures()?;
    let config = SweepConfig {
        h: sweep::Grid::single(point.h),
        k: sweep::Grid::single(point.k),
        j: point.j,
        baths: sweep::BathSeries::Raw {
            t1: vec![t1],
            t3: vec![t3],
        },
        gamma: point.gamma,
        pairs: vec![pair],
        method: point.method,
        jump_mode: point.jump_mode,
        measure: point.measure,
        out: None,
        emit_occupations: true,
        emit_gap: true,
    };
    // Parameter problems surface before any solving.
    point.params()?;
    point.baths()?;
    let (rows, failures) = sweep::evaluate_point(&config, point.h, point.k, t1, t3);
    match (rows.first(), failures.first()) {
        (Some(row), _) => print_json(&serde_json::to_value(row).map_err(std::io::Error::from)?),
        (None, Some(f)) => Err(Error::Integration(f.message.clone())),
        (None, None) => Err(Error::Integration("no result".into())),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_evolve(
    point: &PointArgs,
    init: &str,
    dt: Option<f64>,
    t_end: f64,
    sample_every: usize,
    frame: Frame,
    out: Option<&PathBuf>,
) -> Result<()> {
    let params = point.params()?;
    let spec = analytic_eigensystem(&params);
    let rho0 = match init {
        "mixed" => Mat8::identity() / C64::new(8.0, 0.0),
        label => match label.parse::<usize>() {
            Ok(l @ 1..=8) => spec.projector(l),
            _ => {
                return Err(Error::Config(format!(
                    "--init expects `mixed` or 1..8, got {label:?}"
                )))
            }
        },
    };
    let ops = build_jump_operators(&spec, point.jump_mode)?;
    let generator = Liouvillian::new(&build_hamiltonian(&params)?, &point.baths()?, &ops)?;
    let dt = dt.unwrap_or_else(|| suggested_dt(&generator, frame));
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!(
            "--t-end must be non-negative, got {t_end}"
        )));
    }
    let steps = (t_end / dt).ceil() as usize;
    let traj = evolve_rk4(
        &generator,
        &rho0,
        &Rk4Options {
            dt,
            steps,
            sample_every,
            frame,
        },
    )?;

    let digits = sweep::output_precision();
    let f = |x: f64| sweep::format_float(x, digits);
    let mut text = String::from("t,P1,P2,P3,P4,P5,P6,P7,P8,trace,min_eigenvalue\n");
    for s in &traj.samples {
        let p = occupation_probabilities(&s.rho, &spec);
        let mut cols = vec![f(s.t)];
        cols.extend(p.iter().map(|&x| f(x)));
        cols.push(f(trace(&s.rho).re));
        cols.push(f(s.min_eigenvalue));
        text.push_str(&cols.join(","));
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_sweep(config: &Path, out: Option<PathBuf>) -> Result<()> {
    let cfg = sweep::load_config(config)?;
    let out = out.or_else(|| cfg.out.clone()).ok_or_else(|| {
        Error::Config("no output path: pass --out or set `out` in the config".into())
    })?;
    let outcome = sweep::run_sweep(&cfg);
    sweep::write_outputs(&outcome, &cfg, &out)?;
    if !outcome.failures.is_empty() {
        eprintln!(
            "{} of {} rows failed; see {}",
            outcome.failures.len(),
            outcome.failures.len() + outcome.rows.len(),
            sweep::errors_path(&out).display()
        );
    }
    Ok(())
}

fn cmd_purestate(k: f64, pair: SpinPair) -> Result<()> {
    let r = pure_state_pair_correlations(k, pair)?;
    let mut v = record_json(&r);
    v["k"] = json!(k);
    v["pair"] = json!(pair.label());
    print_json(&v)
}

fn parse_entry(v: &Value) -> Option<C64> {
    match v {
        Value::Number(n) => n.as_f64().map(|re| C64::new(re, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(C64::new(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

/// Reads a 4×4 matrix given as rows of real numbers or `[re, im]` pairs.
fn read_state(path: &Path) -> Result<Mat4> {
    let text = fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: invalid JSON: {e}", path.display())))?;
    let bad = || {
        Error::Config(format!(
            "{}: expected a 4×4 array of numbers or [re, im] pairs",
            path.display()
        ))
    };
    let rows = v.as_array().filter(|r| r.len() == 4).ok_or_else(bad)?;
    let mut m = Mat4::zeros();
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().filter(|r| r.len() == 4).ok_or_else(bad)?;
        for (j, entry) in row.iter().enumerate() {
            m[(i, j)] = parse_entry(entry).ok_or_else(bad)?;
        }
    }
    Ok(m)
}

fn cmd_discord(path: &Path, measure: MeasuredSide) -> Result<()> {
    let rho = read_state(path)?;
    validate_state(&rho, 1e-6)?;
    print_json(&record_json(&CorrelationRecord::from_pair_state(
        &rho, measure,
    )?))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Spectrum { h, k, j } => cmd_spectrum(h, k, j),
        Command::Steady { point, pair } => cmd_steady(&point, pair),
        Command::Evolve {
            point,
            init,
            dt,
            t_end,
            sample_every,
            frame,
            out,
        } => cmd_evolve(&point, &init, dt, t_end, sample_every, frame, out.as_ref()),
        Command::Sweep { config, out } => cmd_sweep(&config, out),
        Command::Purestate { k, pair } => cmd_purestate(k, pair),
        Command::Discord {
            state_file,
            measure,
        } => cmd_discord(&state_file, measure),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
