mod config;
mod format;
mod matrixio;
mod scenario;
mod validate;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use lzsweep::analytic::{figure1a_data, figure1b_data_mode, SineMode};
use lzsweep::model::{Hermiticity, TridiagonalMatrix};
use lzsweep::numerics::TimeGrid;
use lzsweep::triangular::{triangularize, Recursion};
use lzsweep::Error;

use config::ScenarioConfig;
use format::{atomic_write, csv_row};
use scenario::{figure1b_csv_from_table, run_scenario, summary_json};

#[derive(Parser)]
#[command(name = "lzsweep", about = "Level-crossing sweep simulator", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario config and write trajectory + summary
    Evolve(EvolveArgs),
    /// Survival probability vs sweep rate for a linear sweep (CSV)
    Classic(ClassicArgs),
    /// Survival probability vs time for sinusoidal sweeps (CSV)
    Sine(SineArgs),
    /// Triangularize a tridiagonal matrix file and report the factors
    TriCheck(TriCheckArgs),
    /// Block-diagonalize the coupling of a two-manifold matrix file
    Ms(MsArgs),
    /// Run the seeded property suite and write a JSON report
    Validate(ValidateArgs),
    /// Run every scenario in a multi-scenario config
    Scan(ScanArgs),
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClassicArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.001)]
    alpha_min: f64,
    #[arg(long, default_value_t = 10.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    #[arg(long, default_value = "figure1a.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct SineArgs {
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Comma-separated drive frequencies
    #[arg(long, default_value = "1,2", value_delimiter = ',')]
    omegas: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    t1: f64,
    #[arg(long, default_value_t = 629)]
    points: usize,
    /// abs-rate divides by |cos wt|; literal requires cos wt > 0
    #[arg(long, default_value = "abs-rate")]
    mode: String,
    #[arg(long, default_value = "figure1b.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct TriCheckArgs {
    #[arg(long)]
    input: PathBuf,
    /// corrected or paper-literal pivot recursion
    #[arg(long, default_value = "corrected")]
    recursion: String,
    #[arg(long, default_value = "tri_check.json")]
    out: PathBuf,
}

#[derive(Args)]
struct MsArgs {
    /// Coupling block V as a matrix file (rows = upper manifold)
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated lower-manifold detunings, default all zero
    #[arg(long, value_delimiter = ',')]
    detunings: Option<Vec<f64>>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "validate_report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Scenario-level worker count
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, contents: &str) -> Result<(), Error> {
    atomic_write(path, contents).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn cmd_evolve(args: &EvolveArgs) -> Result<(), Error> {
    let text = read_to_string(&args.config)?;
    let pairs = config::parse_pairs(&text)?;
    let cfg = ScenarioConfig::parse_single(&text)?;
    let started = Instant::now();
    let run = run_scenario(&cfg, true)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::input(format!("{}: {e}", args.out_dir.display())))?;
    let wall = started.elapsed().as_secs_f64();
    for (name, contents) in &run.files {
        write_out(&args.out_dir.join(name), contents)?;
    }
    let summary = summary_json(&pairs, &run, wall);
    write_out(&args.out_dir.join(format!("{}_summary.json", cfg.name)), &summary)?;
    Ok(())
}

fn cmd_classic(args: &ClassicArgs) -> Result<(), Error> {
    let rows = figure1a_data(args.eps, args.alpha_min, args.alpha_max, args.points)?;
    let mut out = String::from("alpha,P\n");
    for (alpha, p) in rows {
        out.push_str(&csv_row(&[Some(alpha), Some(p)]));
        out.push('\n');
    }
    write_out(&args.out, &out)
}

fn cmd_sine(args: &SineArgs) -> Result<(), Error> {
    let mode = match args.mode.as_str() {
        "abs-rate" => SineMode::AbsRate,
        "literal" => SineMode::LiteralCos,
        other => return Err(Error::input(format!("unknown mode {other}"))),
    };
    if args.points < 2 {
        return Err(Error::input("points must be >= 2"));
    }
    let grid = TimeGrid::new(args.t0, args.t1, args.points - 1)?;
    let table = figure1b_data_mode(args.eps, args.amplitude, &args.omegas, &grid, mode)?;
    write_out(&args.out, &figure1b_csv_from_table(&table))
}

/// Infers the sign convention of a real tridiagonal matrix from its
/// off-diagonal pairs.
fn tridiagonal_from_file(path: &Path) -> Result<TridiagonalMatrix, Error> {
    let m = matrixio::parse_matrix(&read_to_string(path)?)?;
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::input("tri-check input must be square"));
    }
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n.saturating_sub(1));
    let mut sub = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            if z.im != 0.0 {
                return Err(Error::input("tri-check input must be real"));
            }
            if i.abs_diff(j) > 1 && z.re != 0.0 {
                return Err(Error::input("tri-check input must be tridiagonal"));
            }
        }
        diag.push(m[(i, i)].re);
        if i + 1 < n {
            sup.push(m[(i, i + 1)].re);
            sub.push(m[(i + 1, i)].re);
        }
    }
    let hermitian = sup.iter().zip(&sub).all(|(a, b)| a == b);
    let anti = sup.iter().zip(&sub).all(|(a, b)| *a == -b);
    let hermiticity = if hermitian {
        Hermiticity::Hermitian
    } else if anti {
        Hermiticity::PaperLiteral
    } else {
        return Err(Error::input(
            "off-diagonal pairs must be all equal or all opposite in sign",
        ));
    };
    TridiagonalMatrix::new(diag, sup, sub, hermiticity)
}

fn cmd_tri_check(args: &TriCheckArgs) -> Result<(), Error> {
    let recursion = match args.recursion.as_str() {
        "corrected" => Recursion::Corrected,
        "paper-literal" => Recursion::PaperLiteral,
        other => return Err(Error::input(format!("unknown recursion {other}"))),
    };
    let m = tridiagonal_from_file(&args.input)?;
    let fac = triangularize(&m, recursion)?;

    let recon = fac.reconstruct();
    let n = m.n();
    let mut max_err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j {
                m.diag[i]
            } else if j == i + 1 {
                m.sup[i]
            } else if i == j + 1 {
                m.sub[j]
            } else {
                0.0
            };
            max_err = max_err.max((recon[i][j] - want).abs());
        }
    }
    let report = json!({
        "n": n,
        "recursion": args.recursion,
        "pivots": fac.h,
        "updates": fac.p,
        "cofactor_superdiagonal": fac.m_sup,
        "max_reconstruction_error": max_err,
    });
    write_out(&args.out, &(serde_json::to_string_pretty(&report).expect("json") + "\n"))
}

fn cmd_ms(args: &MsArgs) -> Result<(), Error> {
    let v = matrixio::parse_matrix(&read_to_string(&args.input)?)?;
    let d = args.detunings.clone().unwrap_or_else(|| vec![0.0; v.cols()]);
    let block = lzsweep::morris_shore::BlockHamiltonian::new(v, d)?;
    let res = lzsweep::morris_shore::ms_transform(&block)?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::input(format!("{}: {e}", args.out_dir.display())))?;
    let stem = args
        .input
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("ms")
        .to_string();
    write_out(&args.out_dir.join(format!("{stem}_A.txt")), &matrixio::format_matrix(&res.a))?;
    write_out(&args.out_dir.join(format!("{stem}_B.txt")), &matrixio::format_matrix(&res.b))?;
    write_out(
        &args.out_dir.join(format!("{stem}_Vbar.txt")),
        &matrixio::format_matrix(&res.v_bar),
    )?;
    let summary = json!({
        "singular_values": res.singular_values,
        "rank": res.rank(),
    });
    write_out(
        &args.out_dir.join(format!("{stem}_ms.json")),
        &(serde_json::to_string_pretty(&summary).expect("json") + "\n"),
    )
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Error> {
    let (report, all_pass) = validate::run_suite(args.seed)?;
    write_out(&args.out, &(serde_json::to_string_pretty(&report).expect("json") + "\n"))?;
    if !all_pass {
        return Err(Error::numerical("one or more validation properties failed"));
    }
    Ok(())
}

fn cmd_scan(args: &ScanArgs) -> Result<(), Error> {
    if args.jobs == 0 {
        return Err(Error::input("jobs must be >= 1"));
    }
    let text = read_to_string(&args.config)?;
    let configs = ScenarioConfig::parse_multi(&text)?;
    {
        let mut names: Vec<&str> = configs.iter().map(|(n, _)| n.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        if names.len() != configs.len() {
            return Err(Error::input("duplicate scenario names"));
        }
    }
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::input(format!("{}: {e}", args.out_dir.display())))?;

    // work queue over scenario indices; results keyed by index so the
    // manifest stays in config order regardless of completion order
    let results: Vec<Mutex<Option<Result<Vec<String>, Error>>>> =
        configs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = args.jobs.min(configs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= configs.len() {
                    break;
                }
                let outcome = configs[idx]
                    .1
                    .as_ref()
                    .map_err(|e| e.clone())
                    .and_then(|cfg| run_scenario(cfg, false))
                    .and_then(|run| {
                        let mut written = Vec::new();
                        for (name, contents) in &run.files {
                            write_out(&args.out_dir.join(name), contents)?;
                            written.push(name.clone());
                        }
                        Ok(written)
                    });
                *results[idx].lock().expect("poisoned") = Some(outcome);
            });
        }
    });

    let mut entries = Vec::new();
    let mut any_failed = false;
    for ((name, _), cell) in configs.iter().zip(&results) {
        let outcome = cell.lock().expect("poisoned").take().expect("worker ran");
        let entry = match outcome {
            Ok(outputs) => json!({
                "name": name,
                "status": "ok",
                "outputs": outputs,
            }),
            Err(e) => {
                any_failed = true;
                json!({
                    "name": name,
                    "status": "failed",
                    "error": e.to_string(),
                })
            }
        };
        entries.push(entry);
    }
    let manifest = json!({ "scenarios": Value::Array(entries) });
    write_out(
        &args.out_dir.join("scan_manifest.json"),
        &(serde_json::to_string_pretty(&manifest).expect("json") + "\n"),
    )?;
    if any_failed {
        return Err(Error::numerical("one or more scenarios failed"));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Evolve(a) => cmd_evolve(a),
        Command::Classic(a) => cmd_classic(a),
        Command::Sine(a) => cmd_sine(a),
        Command::TriCheck(a) => cmd_tri_check(a),
        Command::Ms(a) => cmd_ms(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Scan(a) => cmd_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
