use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use oneway_epp::code::{build_code, CodeId};
use oneway_epp::experiments::{
    describe_attack, emit_report, exhaustive_grid, run_monte_carlo, run_trial, summary_text, trial_seed,
    verify_bounds, worked_example, BoundCheck, BoundRow, ExperimentConfig, ReportFormat, TrialRecord,
};
use oneway_epp::sampling::GateFactor;
use oneway_epp::Execution;

const SWEEP_DELTAS: [f64; 4] = [0.1, 0.2, 0.3, 0.5];

#[derive(Parser)]
#[command(name = "epp", version, about = "One-way entanglement purification with quantum sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sampling bounds, code saturation and success probability.
    Bounds {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 25)]
        m: usize,
        #[arg(long, default_value_t = 5)]
        d: usize,
        #[arg(long = "gate-factor", default_value = "2")]
        gate_factor: GateFactor,
        /// Estimated relative Hamming weight used for the saturation numbers.
        #[arg(long = "omega-hat", default_value_t = 0.02)]
        omega_hat: f64,
    },
    /// Run a single trial and print its transcript.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo over many trials.
    Mc {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<ReportFormat>,
    },
    /// Exact sampling failure against the closed-form classical bound.
    OracleVerify {
        #[arg(long = "max-n", default_value_t = 16)]
        max_n: usize,
    },
    /// Dump a code's lookup decoder.
    DecoderTable {
        #[arg(long)]
        code: CodeId,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Bounds {
            delta,
            k,
            m,
            d,
            gate_factor,
            omega_hat,
        } => {
            let report = worked_example(delta, k, m, d, gate_factor, omega_hat)?;
            println!("{report}");
        }
        Command::Run { config, seed } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let code = cfg.code_spec()?;
            let seed = trial_seed(cfg.seed, 0);
            let result = run_trial(&cfg, &code, seed)?;
            let p = &cfg.protocol;
            println!("config       M={} N={} d={} gate_factor={} code={} strict_margin={}", p.m, p.n, p.d, p.gate_factor, code.name(), p.strict_margin);
            println!("attack       {}", describe_attack(&cfg.attack));
            println!("master seed  {} (trial seed {seed})", cfg.seed);
            println!("sampling     {} of {} flipped, omega_hat = {}", result.sampling_flips, result.sampling_count, result.omega_hat);
            println!("estimate     est_gates = {} against capacity {}", result.est_gates, result.correctable);
            println!("confidence   delta = {}, eps_qu = {}", result.delta, result.epsilon_qu);
            println!(
                "decision     {}",
                if result.accepted { "accept".to_string() } else { format!("abort ({:?})", result.abort_reason.expect("aborted trials carry a reason")) }
            );
            println!("truth        message weight {}, gates on message {}, relative weight {}", result.true_weight, result.true_gates, result.true_relative_weight);
            println!("outcome      {}", result.outcome.as_str());
            println!("{}", serde_json::to_string(&TrialRecord::new(0, &result))?);
        }
        Command::Mc {
            config,
            trials,
            seed,
            out,
            format,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            cfg.trials = trials;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            let dir = out.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("mc-out"));
            let run = run_monte_carlo(&cfg, Execution::default())?;
            let (report, paths) = emit_report(&run, cfg.format, &dir).with_context(|| format!("writing to {}", dir.display()))?;
            print!("{}", summary_text(&report));
            for p in paths {
                println!("wrote        {}", p.display());
            }
        }
        Command::OracleVerify { max_n } => {
            let grid = exhaustive_grid(max_n, &SWEEP_DELTAS);
            let rows = verify_bounds(&grid, Execution::default());
            println!("{}", BoundRow::HEADER);
            for row in &rows {
                println!("{row}");
            }
            let fails = rows.iter().filter(|r| r.check == BoundCheck::Fail).count();
            let skipped = rows.iter().filter(|r| matches!(r.check, BoundCheck::Skipped(_))).count();
            let non_vacuous = rows.iter().filter(|r| r.bound < 1.0).count();
            println!(
                "{} points: {} pass, {} fail, {} skipped; bound below 1 at {} points",
                rows.len(),
                rows.len() - fails - skipped,
                fails,
                skipped,
                non_vacuous
            );
            if fails > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::DecoderTable { code } => {
            let code = build_code(code)?;
            print!("{}", code.decoder_table_text());
        }
    }
    Ok(ExitCode::SUCCESS)
}
