//! `pqaoa` — command-line driver tying together instance generation, schedule
//! compilation and verification, and the ensemble experiments.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 verification failure.

mod config;
mod verify;

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use parity_qaoa::circuit::{build_constraint_block, emit_text, parse_text};
use parity_qaoa::lhz::{build_layout, AncillaMode};
use parity_qaoa::mc::run_ensemble;
use parity_qaoa::problem::{generate_instance, write_instance};
use parity_qaoa::report::{
    parse_results, render_histograms, render_results, render_summary, summarize_cells,
};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "pqaoa",
    version,
    about = "Parallelizable parity-encoded QAOA toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random problem instances as text files.
    Gen {
        /// Number of logical spins.
        #[arg(long)]
        n: usize,
        /// How many instances to write.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Seed base; instance i uses seed + i.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory (default: the output root).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the parallel constraint schedule and write it as circuit text.
    Schedule {
        /// Number of logical spins (>= 4).
        #[arg(long)]
        n: usize,
        /// Phase angle applied on every plaquette.
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Output file (default: schedule_n<N>.txt under the output root).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a schedule file: layer disjointness and unitary equivalence.
    Verify {
        /// Circuit text file to check.
        circuit: PathBuf,
        /// Number of logical spins the schedule was built for.
        #[arg(long)]
        n: usize,
    },
    /// Run the ensemble experiment described by a config file.
    Run {
        /// TOML configuration file.
        config: PathBuf,
    },
    /// Re-render summary and histogram tables from a results table.
    Report {
        /// Existing results.csv file.
        results: PathBuf,
        /// Fidelity histogram bin count.
        #[arg(long, default_value_t = 20)]
        bins: usize,
        /// Directory for the re-rendered tables (default: alongside results).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    /// Usage or I/O problem; exit 1.
    Usage(String),
    /// A requested check failed; exit 2.
    Verify(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Output root for relative and defaulted paths.
fn out_root() -> PathBuf {
    env::var_os("PQAOA_OUT").map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn resolve(path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        out_root().join(path)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            n,
            count,
            seed,
            out,
        } => cmd_gen(n, count, seed, out),
        Command::Schedule { n, alpha, out } => cmd_schedule(n, alpha, out),
        Command::Verify { circuit, n } => cmd_verify(&circuit, n),
        Command::Run { config } => cmd_run(&config),
        Command::Report { results, bins, out } => cmd_report(&results, bins, out),
    }
}

fn cmd_gen(n: usize, count: usize, seed: u64, out: Option<PathBuf>) -> Result<(), Failure> {
    let dir = out.map_or_else(out_root, |p| resolve(&p));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    for i in 0..count {
        let problem = generate_instance(n, seed + i as u64).map_err(|e| usage(e.to_string()))?;
        let path = dir.join(format!("instance_{i:04}.txt"));
        write_instance(&problem, &path)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_schedule(n: usize, alpha: f64, out: Option<PathBuf>) -> Result<(), Failure> {
    let layout = build_layout(n, AncillaMode::Augmented).map_err(|e| usage(e.to_string()))?;
    let alphas = vec![alpha; layout.n_constraints()];
    let block = build_constraint_block(&layout, &alphas).map_err(|e| usage(e.to_string()))?;
    let path = out.map_or_else(
        || out_root().join(format!("schedule_n{n}.txt")),
        |p| resolve(&p),
    );
    write_file(&path, &emit_text(&block))?;
    println!(
        "{}: {} layers, {} gates, {} plaquettes",
        path.display(),
        block.depth(),
        block.n_gates(),
        layout.n_constraints()
    );
    Ok(())
}

fn cmd_verify(circuit_path: &Path, n: usize) -> Result<(), Failure> {
    let text = fs::read_to_string(circuit_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", circuit_path.display())))?;
    let circuit = parse_text(&text).map_err(|e| usage(e.to_string()))?;
    let summary = verify::verify_schedule(&circuit, n).map_err(Failure::Verify)?;
    println!("ok: {summary}");
    Ok(())
}

fn cmd_run(config_path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", config_path.display())))?;
    let run_config = RunConfig::parse(&text).map_err(usage)?;
    let ensemble = run_config.to_ensemble().map_err(usage)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run_config.threads)
        .build()
        .map_err(|e| usage(format!("cannot build thread pool: {e}")))?;
    let report = pool
        .install(|| run_ensemble(&ensemble))
        .map_err(|e| usage(e.to_string()))?;

    let dir = resolve(Path::new(&run_config.out_dir));
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;
    write_file(&dir.join("results.csv"), &render_results(&report))?;
    write_file(&dir.join("summary.csv"), &render_summary(&report))?;
    write_file(&dir.join("histograms.csv"), &render_histograms(&report))?;
    // The config travels with its results so every artifact is
    // self-describing; timestamps live only in the sidecar log.
    write_file(&dir.join("config.toml"), &text)?;
    let stamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_file(
        &dir.join("run.log"),
        &format!("completed unix_time={stamp} cells={}\n", report.cells.len()),
    )?;

    for row in &report.summary {
        println!(
            "{} m={}: mean_F={:.4} (stderr {:.4}), mean_E={:.4}",
            row.protocol.label(),
            row.m,
            row.mean_f,
            row.stderr_f,
            row.mean_e
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_report(results_path: &Path, bins: usize, out: Option<PathBuf>) -> Result<(), Failure> {
    if bins == 0 {
        return Err(usage("bins must be >= 1"));
    }
    let text = fs::read_to_string(results_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", results_path.display())))?;
    let (cells, provenance) = parse_results(&text).map_err(|e| usage(e.to_string()))?;
    if cells.is_empty() {
        return Err(usage("results table contains no data rows"));
    }
    let (summary, histograms) = summarize_cells(&cells, bins);

    let dir = match out {
        Some(p) => resolve(&p),
        None => results_path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or_else(|| PathBuf::from("."), Path::to_path_buf),
    };
    fs::create_dir_all(&dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))?;

    let header = provenance
        .as_deref()
        .map(|p| format!("# {p}\n"))
        .unwrap_or_default();
    let mut summary_text = header.clone();
    summary_text.push_str("protocol,m,mean_F,stderr_F,mean_E,stderr_E\n");
    for r in &summary {
        summary_text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.protocol.label(),
            r.m,
            r.mean_f,
            r.stderr_f,
            r.mean_e,
            r.stderr_e
        ));
    }
    let mut hist_text = header;
    hist_text.push_str("protocol,m,bin,bin_lo,bin_hi,mass\n");
    for h in &histograms {
        let n = h.masses.len() as f64;
        for (i, mass) in h.masses.iter().enumerate() {
            hist_text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                h.protocol.label(),
                h.m,
                i,
                i as f64 / n,
                (i + 1) as f64 / n,
                mass
            ));
        }
    }
    write_file(&dir.join("summary.csv"), &summary_text)?;
    write_file(&dir.join("histograms.csv"), &hist_text)?;

    for r in &summary {
        println!(
            "{} m={}: mean_F={:.4} (stderr {:.4})",
            r.protocol.label(),
            r.m,
            r.mean_f,
            r.stderr_f
        );
    }
    Ok(())
}
