use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liedeg::acceptance::{run_all, AcceptanceOptions};
use liedeg::config::{parse_rep, ConfigFile, ScenarioConfig, ScenarioName};
use liedeg::scenario::{degree_stage, probe_correlation};
use liedeg::series;
use liedeg::{scenario_run, LabError, LabResult};
use liedeg_core::group::RngHandle;
use liedeg_core::rep::homomorphism_defects;

#[derive(Parser)]
#[command(name = "liedeg", version, about = "Degrees of Lie-group valued cocycles and Koopman spectral diagnostics")]
struct Cli {
    /// Run the acceptance suite and exit nonzero on any failure.
    #[arg(long)]
    self_test: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(clap::Args)]
struct ScenarioArgs {
    #[arg(value_enum)]
    name: ScenarioName,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario end to end and write report.json, series CSV and SVG files.
    Scenario {
        #[command(flatten)]
        args: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the degree section of a scenario as JSON.
    Degree {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Override N_degree.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print one probe correlation series of a scenario as CSV.
    Corr {
        #[command(flatten)]
        args: ScenarioArgs,
        /// Representation label, e.g. `T:1`, `SU2:2`, `SO3:1`, `U2:2,1`.
        #[arg(long)]
        rep: String,
        /// Probe index `k` (unit coefficient vector `e_k`).
        #[arg(long, default_value_t = 0)]
        probe: usize,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Homomorphism and unitarity defects of a representation on Haar pairs.
    RepCheck {
        rep: String,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Render the SVG for a series CSV.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(args: &ScenarioArgs) -> LabResult<ScenarioConfig> {
    let mut file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if args.seed.is_some() {
        file.seed = args.seed;
    }
    ScenarioConfig::resolve(Some(args.name), file)
}

fn to_json(v: &impl serde::Serialize) -> LabResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| LabError::Numeric(e.to_string()))
}

fn run(cli: Cli) -> LabResult<bool> {
    if cli.self_test {
        let results = run_all(&AcceptanceOptions::default())?;
        for r in &results {
            println!("{}", r.line());
        }
        return Ok(results.iter().all(|r| r.passed));
    }
    let Some(command) = cli.command else {
        return Err(LabError::Config("no command given; see --help".into()));
    };
    match command {
        Command::Scenario { args, out } => {
            let mut cfg = load(&args)?;
            if let Some(o) = out {
                cfg.out = o;
            }
            let run = scenario_run(&cfg)?;
            println!("{}", run.report_path.display());
            for s in &run.report.spectral {
                println!("{:>10}  mixing {:<13} ac {}", s.rep, s.mixing.verdict, s.ac.verdict);
            }
            println!("ergodicity: {}", run.report.degree.ergodicity.obstructions.join(", "));
        }
        Command::Degree { args, n } => {
            let mut cfg = load(&args)?;
            cfg.n_degree = n.unwrap_or(cfg.n_degree);
            cfg.validate()?;
            let flow = cfg.flow();
            let phi = cfg.cocycle.build(&flow)?;
            let stage = degree_stage(&cfg, &flow, &phi, &cfg.representations()?)?;
            println!("{}", to_json(&stage.section)?);
        }
        Command::Corr { args, rep, probe, n_max } => {
            let mut cfg = load(&args)?;
            cfg.n_corr = n_max.unwrap_or(cfg.n_corr);
            cfg.validate()?;
            let rows = probe_correlation(&cfg, &rep, probe)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            let err = |e: csv::Error| LabError::io("<stdout>", std::io::Error::other(e.to_string()));
            w.write_record(series::CSV_HEADER).map_err(err)?;
            for r in rows {
                w.write_record([r.n.to_string(), r.value.re.to_string(), r.value.im.to_string(), r.value.norm().to_string(), r.err.to_string()])
                    .map_err(err)?;
            }
            w.flush().map_err(|e| LabError::io("<stdout>", e))?;
        }
        Command::RepCheck { rep, pairs, seed } => {
            let r = parse_rep(&rep)?;
            let (hom, unit) = homomorphism_defects(&r, pairs, &mut RngHandle::new(seed, 0).rng());
            let out = serde_json::json!({ "rep": rep, "pairs": pairs, "homomorphism_defect": hom, "unitarity_defect": unit });
            println!("{}", to_json(&out)?);
            return Ok(hom <= 1e-10 && unit <= 1e-10);
        }
        Command::Plot { csv, out } => {
            let svg = out.unwrap_or_else(|| csv.with_extension("svg"));
            series::emit_plot(&csv, &svg)?;
            println!("{}", svg.display());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("LIEDEG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "liedeg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
