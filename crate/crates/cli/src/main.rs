//! Command-line surface for the symmetric power L-value toolkit.
//!
//! Data goes to standard output (CSV by default, JSON with `--format json`);
//! progress and diagnostics go to standard error. Exit status: 0 when every
//! requested tolerance was met, 1 when the run finished but a precision
//! warning fired, 2 on hard errors.

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use std::path::PathBuf;
use symlval::constants::{b_closed_form, b_const};
use symlval::hecke::{self, LMethod};
use symlval::moments::{level_factor_log, log_moment_asymptotic, moment};
use symlval::montecarlo::{tail_distribution, SimulationConfig};
use symlval::Sign;

#[derive(Parser)]
#[command(
    name = "symlval",
    version,
    about = "Distribution of L(1, sym^m f): constants, moments, asymptotics, simulation, newform evaluation"
)]
struct Cli {
    /// Output format of the data stream
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Seed of the counter-based generator (simulation commands)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: $SYMLVAL_THREADS, then all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    Sign::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Extremal constants A_m^± and B_m^±, with closed forms where they exist
    Constants {
        /// Symmetric power orders, comma-separated
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        m: Vec<u32>,
        /// Signs, comma-separated (+ or -)
        #[arg(long, value_delimiter = ',', default_value = "+,-",
              allow_hyphen_values = true, value_parser = parse_sign)]
        sign: Vec<Sign>,
        /// Prime cutoff of the Euler product defining B
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        /// Tail-bound tolerance required for exit status 0
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Moments log M^z of the random Euler product, with level correction
    Moments {
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// z grid, comma-separated reals
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        z: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        /// Squarefree level N for the corrected column (1 = no correction)
        #[arg(long, alias = "N", default_value_t = 1)]
        level: u64,
        /// Tail-bound tolerance required for exit status 0
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Saddle-point asymptotics of log M^{±r} at orders 1–3
    Asympt {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "+", allow_hyphen_values = true, value_parser = parse_sign)]
        sign: Sign,
        /// r grid, comma-separated (each r ≥ 8 with A·r > e)
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        #[arg(long, default_value_t = 100_000)]
        cutoff: u64,
        /// Tail-bound tolerance required for exit status 0
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Monte Carlo tail probabilities of the random Euler product
    Simulate {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "+", allow_hyphen_values = true, value_parser = parse_sign)]
        sign: Sign,
        /// Threshold grid in t, comma-separated (needs B^±·t > 1)
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 10_000)]
        cutoff: u64,
    },
    /// Truncated L(1, sym^m f) from a newform coefficient file
    Evaluate {
        /// Coefficient file: k=, N=, normalization= headers, then "p value" lines
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Prime truncation limit
        #[arg(long, default_value_t = 1000)]
        x: u64,
        /// euler-product, dirichlet-log, or both
        #[arg(long, default_value = "euler-product")]
        method: String,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        std::process::exit(2);
    }
    let code = match run(&cli) {
        Ok(false) => 0,
        Ok(true) => {
            eprintln!("warning: a requested tolerance was not met (see output)");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

fn configure_threads(cli_threads: Option<usize>) -> Result<(), String> {
    let n = match cli_threads {
        Some(n) => Some(n),
        None => match std::env::var("SYMLVAL_THREADS") {
            Ok(v) => Some(
                v.parse::<usize>()
                    .map_err(|_| format!("SYMLVAL_THREADS must be an integer, got '{v}'"))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())?;
        }
    }
    Ok(())
}

type RunResult = Result<bool, Box<dyn std::error::Error>>;

fn run(cli: &Cli) -> RunResult {
    match &cli.command {
        Command::Constants { m, sign, cutoff, tol } => {
            cmd_constants(cli.format, m, sign, *cutoff, *tol)
        }
        Command::Moments { m, z, cutoff, level, tol } => {
            cmd_moments(cli.format, *m, z, *cutoff, *level, *tol)
        }
        Command::Asympt { m, sign, r, cutoff, tol } => {
            cmd_asympt(cli.format, *m, *sign, r, *cutoff, *tol)
        }
        Command::Simulate { m, sign, t, samples, cutoff } => {
            cmd_simulate(cli.format, *m, *sign, t, *samples, *cutoff, cli.seed)
        }
        Command::Evaluate { file, m, x, method } => cmd_evaluate(cli.format, file, *m, *x, method),
    }
}

fn emit_json<T: Serialize>(rows: &T) -> Result<(), Box<dyn std::error::Error>> {
    println!("{}", serde_json::to_string_pretty(rows)?);
    Ok(())
}

fn opt_csv(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

#[derive(Serialize)]
struct ConstantsRow {
    m: u32,
    sign: String,
    a: f64,
    b: f64,
    b_closed_form: Option<f64>,
    abs_delta: Option<f64>,
    tail_bound: f64,
    warning: bool,
}

fn cmd_constants(format: Format, ms: &[u32], signs: &[Sign], cutoff: u64, tol: f64) -> RunResult {
    eprintln!("computing B constants at cutoff {cutoff} for {} (m, sign) pairs...",
        ms.len() * signs.len());
    let mut rows = Vec::new();
    let mut warned = false;
    for &m in ms {
        for &sign in signs {
            let c = b_const(m, sign, cutoff, tol)?;
            let closed = b_closed_form(m, sign)?;
            warned |= c.warning;
            rows.push(ConstantsRow {
                m,
                sign: sign.to_string(),
                a: c.a,
                b: c.b,
                b_closed_form: closed,
                abs_delta: closed.map(|x| (c.b - x).abs()),
                tail_bound: c.tail_bound,
                warning: c.warning,
            });
        }
    }
    match format {
        Format::Json => emit_json(&rows)?,
        Format::Csv => {
            println!("m,sign,a,b,b_closed_form,abs_delta,tail_bound,warning");
            for r in &rows {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    r.m,
                    r.sign,
                    r.a,
                    r.b,
                    opt_csv(r.b_closed_form),
                    opt_csv(r.abs_delta),
                    r.tail_bound,
                    r.warning
                );
            }
        }
    }
    Ok(warned)
}

#[derive(Serialize)]
struct MomentsRow {
    z: f64,
    log_moment: f64,
    level_log_moment: f64,
    tail_bound: f64,
    warning: bool,
}

fn cmd_moments(format: Format, m: u32, zs: &[f64], cutoff: u64, level: u64, tol: f64) -> RunResult {
    let mut rows = Vec::new();
    let mut warned = false;
    for &z in zs {
        let zi = Complex64::new(z, 0.0);
        let mo = moment(m, zi, cutoff, tol)?;
        let corr = level_factor_log(m, zi, level)?;
        warned |= mo.warning;
        rows.push(MomentsRow {
            z,
            log_moment: mo.log_value.re,
            level_log_moment: mo.log_value.re + corr.re,
            tail_bound: mo.tail_bound,
            warning: mo.warning,
        });
    }
    match format {
        Format::Json => emit_json(&rows)?,
        Format::Csv => {
            println!("z,log_moment,level_log_moment,tail_bound,warning");
            for r in &rows {
                println!(
                    "{},{},{},{},{}",
                    r.z, r.log_moment, r.level_log_moment, r.tail_bound, r.warning
                );
            }
        }
    }
    Ok(warned)
}

#[derive(Serialize)]
struct AsymptRow {
    r: f64,
    log_moment: f64,
    order1: f64,
    order2: f64,
    order3: f64,
    rem1: f64,
    rem2: f64,
    rem3: f64,
}

fn cmd_asympt(format: Format, m: u32, sign: Sign, rs: &[f64], cutoff: u64, tol: f64) -> RunResult {
    let a = symlval::constants::a_const(m, sign)?;
    let mut rows = Vec::new();
    let mut warned = false;
    for &r in rs {
        eprintln!("moment at r = {r}...");
        let mo = moment(m, Complex64::new(sign.as_f64() * r, 0.0), cutoff, tol)?;
        warned |= mo.warning;
        let direct = mo.log_value.re;
        let scale = (a * r).ln().powi(3) / (a * r);
        let orders: Vec<f64> = (1..=3)
            .map(|k| log_moment_asymptotic(m, sign, r, k))
            .collect::<symlval::Result<_>>()?;
        rows.push(AsymptRow {
            r,
            log_moment: direct,
            order1: orders[0],
            order2: orders[1],
            order3: orders[2],
            rem1: (direct - orders[0]).abs() * scale,
            rem2: (direct - orders[1]).abs() * scale,
            rem3: (direct - orders[2]).abs() * scale,
        });
    }
    match format {
        Format::Json => emit_json(&rows)?,
        Format::Csv => {
            println!("r,log_moment,order1,order2,order3,rem1,rem2,rem3");
            for w in &rows {
                println!(
                    "{},{},{},{},{},{},{},{}",
                    w.r, w.log_moment, w.order1, w.order2, w.order3, w.rem1, w.rem2, w.rem3
                );
            }
        }
    }
    Ok(warned)
}

#[derive(Serialize)]
struct SimulateRow {
    t: f64,
    empirical_prob: f64,
    stderr: f64,
    predicted_prob: f64,
}

fn cmd_simulate(
    format: Format,
    m: u32,
    sign: Sign,
    ts: &[f64],
    samples: u64,
    cutoff: u64,
    seed: u64,
) -> RunResult {
    let config = SimulationConfig {
        m,
        prime_cutoff: cutoff,
        samples,
        seed,
        sign,
    };
    eprintln!("simulating {samples} samples (m = {m}, sign {sign}, cutoff {cutoff}, seed {seed})...");
    let estimates = tail_distribution(m, sign, ts, &config)?;
    let rows: Vec<SimulateRow> = estimates
        .iter()
        .map(|e| SimulateRow {
            t: e.t,
            empirical_prob: e.empirical_prob,
            stderr: e.stderr,
            predicted_prob: e.predicted_prob,
        })
        .collect();
    match format {
        Format::Json => emit_json(&rows)?,
        Format::Csv => {
            println!("t,empirical_prob,stderr,predicted_prob");
            for r in &rows {
                println!("{},{},{},{}", r.t, r.empirical_prob, r.stderr, r.predicted_prob);
            }
        }
    }
    Ok(false)
}

#[derive(Serialize)]
struct EvaluateReport {
    m: u32,
    k: u32,
    level: u64,
    x: u64,
    euler_product: Option<f64>,
    dirichlet_log: Option<f64>,
    methods_abs_diff: Option<f64>,
    heuristic_error: f64,
    grh_lower: f64,
    grh_upper: f64,
    grh_inside: bool,
    harmonic_weight: f64,
}

fn cmd_evaluate(format: Format, file: &PathBuf, m: u32, x: u64, method: &str) -> RunResult {
    let text = std::fs::read_to_string(file)
        .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
    let coeffs = hecke::parse_coefficients(&text)?;
    let (euler, dirichlet) = match method {
        "both" => (
            Some(hecke::l_value_truncated(&coeffs, m, x, LMethod::EulerProduct)?),
            Some(hecke::l_value_truncated(&coeffs, m, x, LMethod::DirichletLog)?),
        ),
        s => match s.parse::<LMethod>()? {
            LMethod::EulerProduct => (
                Some(hecke::l_value_truncated(&coeffs, m, x, LMethod::EulerProduct)?),
                None,
            ),
            LMethod::DirichletLog => (
                None,
                Some(hecke::l_value_truncated(&coeffs, m, x, LMethod::DirichletLog)?),
            ),
        },
    };
    let heuristic_error = euler
        .as_ref()
        .or(dirichlet.as_ref())
        .map(|v| v.heuristic_error)
        .unwrap_or(f64::NAN);
    let grh = hecke::grh_check(&coeffs, m, x)?;
    let l_sym2 = hecke::l_value_truncated(&coeffs, 2, x, LMethod::EulerProduct)?;
    let report = EvaluateReport {
        m,
        k: coeffs.k,
        level: coeffs.level,
        x,
        euler_product: euler.as_ref().map(|v| v.value),
        dirichlet_log: dirichlet.as_ref().map(|v| v.value),
        methods_abs_diff: match (&euler, &dirichlet) {
            (Some(a), Some(b)) => Some((a.value - b.value).abs()),
            _ => None,
        },
        heuristic_error,
        grh_lower: grh.interval.0,
        grh_upper: grh.interval.1,
        grh_inside: grh.inside,
        harmonic_weight: hecke::harmonic_weight(&coeffs, l_sym2.value)?,
    };
    match format {
        Format::Json => emit_json(&report)?,
        Format::Csv => {
            println!("field,value");
            println!("m,{}", report.m);
            println!("k,{}", report.k);
            println!("level,{}", report.level);
            println!("x,{}", report.x);
            println!("euler_product,{}", opt_csv(report.euler_product));
            println!("dirichlet_log,{}", opt_csv(report.dirichlet_log));
            println!("methods_abs_diff,{}", opt_csv(report.methods_abs_diff));
            println!("heuristic_error,{}", report.heuristic_error);
            println!("grh_lower,{}", report.grh_lower);
            println!("grh_upper,{}", report.grh_upper);
            println!("grh_inside,{}", report.grh_inside);
            println!("harmonic_weight,{}", report.harmonic_weight);
        }
    }
    Ok(false)
}
