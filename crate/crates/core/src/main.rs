use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gebayes::harness::{
    cmd_diagnose, cmd_fit, cmd_sample, load_dataset, run_simulation, simulation_csv, FitConfig,
    PointEstimator, SimConfig,
};
use gebayes::posterior::PriorSpec;
use gebayes::Result;

#[derive(Parser)]
#[command(
    name = "gebayes",
    version,
    about = "Objective Bayesian inference for the generalized exponential distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PosteriorArgs {
    /// Data file (one value per line) or the built-in name `bearings`
    #[arg(long, default_value = "bearings")]
    data: String,
    /// Prior exponent on alpha
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    a: f64,
    /// Prior exponent on lambda
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b: f64,
    /// Ratio-of-uniforms exponent
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// Number of posterior draws
    #[arg(long = "M", default_value_t = 10_000)]
    m: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PointEstimator::Median)]
    estimator: PointEstimator,
}

impl PosteriorArgs {
    fn config(&self) -> Result<FitConfig> {
        Ok(FitConfig {
            prior: PriorSpec::new(self.a, self.b)?,
            r: self.r,
            draws: self.m,
            seed: self.seed,
            estimator: self.estimator,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bayes and ML estimates with K-S and Geweke diagnostics
    Fit {
        #[command(flatten)]
        args: PosteriorArgs,
        /// Write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the text table
        #[arg(long)]
        json: bool,
    },
    /// Write posterior draws to CSV, plus a `.summary.json` with plot data
    Sample {
        #[command(flatten)]
        args: PosteriorArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute diagnostics from a sample file
    Diagnose {
        /// Sample file written by `sample`
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Bayes vs MLE simulation study; writes one CSV row per grid cell
    Simulate {
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "10,15,20,25,30,35,40,45,50,55,60,65,70,75,80,85,90,95,100"
        )]
        n_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        alpha_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
        lambda_grid: Vec<f64>,
        /// Replications per cell
        #[arg(long = "N", default_value_t = 200)]
        n_reps: usize,
        #[arg(long = "M", default_value_t = 10_000)]
        m: usize,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PointEstimator::Median)]
        estimator: PointEstimator,
        /// CSV destination; stdout if omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit { args, out, json } => {
            let data = load_dataset(&args.data)?;
            let (report, _) = cmd_fit(&data, &args.config()?)?;
            if let Some(path) = out {
                std::fs::write(path, report.to_json())?;
            }
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}");
            }
        }
        Command::Sample { args, out } => {
            let data = load_dataset(&args.data)?;
            let (sample, summary) = cmd_sample(&data, &args.config()?, &out)?;
            println!(
                "wrote {} draws to {} (acceptance rate {:.4}; Geweke z alpha {:.4}, lambda {:.4})",
                sample.len(),
                out.display(),
                sample.acceptance_rate,
                summary.alpha.geweke_z,
                summary.lambda.geweke_z
            );
        }
        Command::Diagnose { file, json } => {
            let report = cmd_diagnose(&file)?;
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{report}");
            }
        }
        Command::Simulate {
            n_grid,
            alpha_grid,
            lambda_grid,
            n_reps,
            m,
            a,
            b,
            r,
            seed,
            estimator,
            out,
        } => {
            let cfg = SimConfig {
                n_grid,
                alpha_grid,
                lambda_grid,
                replications: n_reps,
                draws: m,
                prior: PriorSpec::new(a, b)?,
                r,
                base_seed: seed,
                point_estimator: estimator,
            };
            let csv = simulation_csv(&run_simulation(&cfg)?);
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
