use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clusterdet::harness::{
    emit, run_study, ExperimentResult, OutputFormat, Payload, ScenarioConfig, Study, PRESETS,
};
use clusterdet::{Error, Result};

#[derive(Parser)]
#[command(
    name = "clusterdet",
    version,
    about = "Cluster-aware iterative MIMO detection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one case study and write its results.
    Run(RunArgs),
    /// Check a scenario file without running anything.
    Validate { config: PathBuf },
    /// List the built-in scenarios, or print one as TOML.
    Presets {
        /// Print this preset as a config file.
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// study1 (heatmap), study2 (condition numbers), study3 (SER vs iteration)
    /// or study4 (SER vs SNR with CSI errors).
    #[arg(value_parser = parse_study)]
    study: Study,
    /// Scenario file; overrides --preset.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "NAME", default_value = "scenario1")]
    preset: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory; defaults to `<output_dir>/<study>` from the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "json,csv", value_parser = parse_format)]
    format: Vec<OutputFormat>,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_study(s: &str) -> std::result::Result<Study, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { config } => validate(&config),
        Command::Presets { dump } => presets(dump.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::preset(&args.preset)?,
    };
    if let Some(seed) = args.seed {
        cfg.monte_carlo.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.monte_carlo.trials = trials;
    }
    if args.threads.is_some() {
        cfg.monte_carlo.threads = args.threads;
    }
    cfg.validate()?;
    let out = args
        .out
        .unwrap_or_else(|| cfg.output_dir.join(args.study.name()));

    let result = run_study(&cfg, args.study)?;
    let written = emit(&result, &args.format, &out)?;
    print_summary(&result);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn validate(path: &std::path::Path) -> Result<()> {
    let cfg = ScenarioConfig::load(path)?;
    println!(
        "{}: ok ({} users in {} clusters, {} antennas, {} trials)",
        path.display(),
        cfg.num_users(),
        cfg.layout.clusters,
        cfg.geometry.num_elements(),
        cfg.monte_carlo.trials
    );
    Ok(())
}

fn presets(dump: Option<&str>) -> Result<()> {
    match dump {
        Some(name) => print!("{}", ScenarioConfig::preset(name)?.to_toml_string()?),
        None => {
            for name in PRESETS {
                let cfg = ScenarioConfig::preset(name)?;
                println!(
                    "{name}\t{} users, {} clusters, {}x{} array",
                    cfg.num_users(),
                    cfg.layout.clusters,
                    cfg.geometry.upa_rows,
                    cfg.geometry.upa_cols
                );
            }
        }
    }
    Ok(())
}

fn print_summary(r: &ExperimentResult) {
    println!(
        "{} on {}: {} trials ({} failed), {:.1} s",
        r.study,
        r.config.name,
        r.trials,
        r.failed_trials.len(),
        r.wall_time_s
    );
    match &r.payload {
        Payload::Heatmap(p) => match p.gap_db {
            Some(gap) => println!(
                "intra-cluster {:.1} dB, inter-cluster {:.1} dB, gap {gap:.1} dB",
                p.summary.intra_db.unwrap_or(f64::NAN),
                p.summary.inter_db.unwrap_or(f64::NAN)
            ),
            None => println!("single cluster: no inter-cluster entries"),
        },
        Payload::Conditioning(p) => {
            println!(
                "median κ(A) {:.2}, median κ(Ψ) {:.3}, median ratio {:.2}",
                p.median_kappa_a, p.median_kappa_psi, p.median_ratio
            );
            println!(
                "Gershgorin bound informative on {} realizations, held on {}",
                p.bound_informative, p.bound_holds
            );
        }
        Payload::Convergence(p) => {
            let lmmse = r.curve("lmmse").map_or(f64::NAN, |c| c.ser[0]);
            println!("LMMSE SER {lmmse:.3e} at {} dB", p.snr_db);
            for (it, f) in p.iterations_to_lmmse.iter().zip(&p.failures) {
                let t = it
                    .iterations
                    .map_or("not reached".to_string(), |t| t.to_string());
                println!(
                    "  {:<18} iterations to LMMSE: {t:<12} not converged {}/{}",
                    it.method, f.not_converged, f.trials
                );
            }
        }
        Payload::Robustness(p) => {
            let Some(first) = p.curves.first() else {
                return;
            };
            print!("{:>8}", "snr_db");
            for c in &p.curves {
                print!(" {:>20}", c.method);
            }
            println!();
            for (i, snr) in first.x.iter().enumerate() {
                print!("{snr:>8}");
                for c in &p.curves {
                    print!(" {:>20.4e}", c.ser[i]);
                }
                println!();
            }
        }
    }
}
