use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use drol_core::diagnostics::voronoi_trace;
use drol_core::rng::{self, streams};
use drol_core::theory::oracle_table;
use drol_core::train::{run_sweep, train_with_sink};
use drol_core::{ActorMode, BallPrior, MetricsRecord, TrainConfig};

#[derive(Parser)]
#[command(name = "drol", version, about = "Routed candidate-set actor training for offline RL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one run; writes metrics.csv, checkpoint.bin and config.txt
    Train(RunArgs),
    /// Train every (K, seed) pair and write sweep.csv
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Routing budgets, comma separated
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32")]
        k_values: Vec<usize>,
        /// Seeds, comma separated
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        seeds: Vec<u64>,
    },
    /// Write the closed-form oracle table as CSV
    Oracle {
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Train with snapshots every 5% of steps and export trace.json
    Trace(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Flat key = value config file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_parser = ["drol", "pointwise"])]
    actor_mode: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> drol_core::Result<TrainConfig> {
        let mut cfg = match &self.config {
            Some(p) => TrainConfig::load(p)?,
            None => TrainConfig::default(),
        };
        if let Some(e) = &self.env {
            cfg.env = e.clone();
        }
        if let Some(k) = self.k {
            cfg.k = k;
        }
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.steps {
            cfg.steps = n;
        }
        if let Some(m) = &self.actor_mode {
            cfg.actor_mode = m.parse::<ActorMode>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one training job into `out`. Returns whether it halted.
fn run_train(args: &RunArgs, trace: bool) -> Result<bool, Box<dyn std::error::Error>> {
    let mut cfg = args.config()?;
    if trace {
        cfg.trace_checkpoints = 20;
    }
    let out = &args.out;
    fs::create_dir_all(out)?;
    fs::write(out.join("config.txt"), cfg.to_text())?;
    let data = cfg.dataset()?;
    let mut metrics = fs::File::create(out.join("metrics.csv"))?;
    writeln!(metrics, "{}", MetricsRecord::CSV_HEADER)?;
    let outcome = train_with_sink(&cfg, &data, |rec| {
        writeln!(metrics, "{}", rec.to_csv_row())?;
        metrics.flush()?;
        Ok(())
    })?;
    if let Some(h) = &outcome.halt {
        h.last_good.save(&out.join("checkpoint.bin"))?;
        fs::write(out.join("halt.txt"), &h.diagnostics)?;
        eprintln!("run halted at step {}: {}", h.step, h.reason);
        return Ok(true);
    }
    outcome.checkpoint(&cfg).save(&out.join("checkpoint.bin"))?;
    if trace {
        write_trace(&cfg, &data, &outcome.snapshots, out)?;
    }
    if let Some(last) = outcome.metrics.last() {
        println!(
            "step {} bc {:.5} td {:.5} return {}",
            last.step,
            last.bc,
            last.td_loss,
            last.eval_return.map_or("-".into(), |r| format!("{r:.4}"))
        );
    }
    Ok(false)
}

fn write_trace(
    cfg: &TrainConfig,
    data: &drol_core::OfflineDataset,
    snapshots: &[(usize, drol_core::Actor)],
    out: &Path,
) -> Result<(), Box<dyn std::error::Error>> {
    let Some((_, first)) = snapshots.first() else {
        return Ok(());
    };
    let env = cfg.env_spec()?;
    let probe = env.initial_state();
    // dataset actions recorded at the probe state, or nearest to it
    let mut near: Vec<_> = data
        .transitions
        .iter()
        .map(|t| {
            let d: f64 = t.s.iter().zip(&probe).map(|(a, b)| (a - b).powi(2)).sum();
            (d, t.a.clone())
        })
        .collect();
    near.sort_by(|a, b| a.0.total_cmp(&b.0));
    let slice: Vec<Vec<f64>> = near.into_iter().take(64).map(|(_, a)| a).collect();
    let mut prior = BallPrior::new(
        first.latent_dim(),
        (first.action_dim() as f64).sqrt(),
        rng::stream(cfg.seed, streams::PROBE),
    )?;
    let trace = voronoi_trace(snapshots, &mut prior, cfg.k, &probe, &slice)?;
    let mut json = serde_json::to_value(&trace)?;
    json["handoff_events"] = trace.handoff_events().into();
    fs::write(out.join("trace.json"), serde_json::to_string_pretty(&json)?)?;
    println!("handoff events: {}", trace.handoff_events());
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Train(args) => run_train(&args, false),
        Command::Trace(args) => run_train(&args, true),
        Command::Sweep { run, k_values, seeds } => {
            let cfg = run.config()?;
            fs::create_dir_all(&run.out)?;
            let report = run_sweep(&cfg, &k_values, &seeds);
            fs::write(run.out.join("sweep.csv"), report.to_csv())?;
            let mut failed = false;
            for r in &report.runs {
                if let Err(e) = &r.result {
                    eprintln!("K={} seed={} failed: {e}", r.k, r.seed);
                    failed = true;
                }
            }
            print!("{}", report.to_csv());
            Ok(failed)
        }
        Command::Oracle { radius, out } => {
            fs::create_dir_all(&out)?;
            let mut csv = String::from("table,key,value\n");
            for row in oracle_table(radius)? {
                csv.push_str(&format!("{},{},{:?}\n", row.table, row.key, row.value));
            }
            fs::write(out.join("oracle.csv"), &csv)?;
            print!("{csv}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
