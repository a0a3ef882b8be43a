//! `tsforecast` command-line pipeline: ingest, fit, train, forecast, compare.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tsforecast::Error;

mod commands;
mod config;
mod io;

use commands::Ctx;
use config::{parse_range, parse_ratios, RunConfig};
use io::{FileError, Mismatch};

#[derive(Debug, Parser)]
#[command(name = "tsforecast", version, about = "SARIMA and LSTM forecasting for daily price series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Price file (OHLCV CSV) or `date,value` series.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flat JSON run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Keep only dates in START:END (inclusive, ISO dates).
    #[arg(long, value_parser = parse_range)]
    range: Option<[chrono::NaiveDate; 2]>,
    /// Train,validation,test proportions.
    #[arg(long, value_parser = parse_ratios)]
    ratios: Option<[f64; 3]>,
    /// Record runtimes as 0 so repeated runs give byte-identical files.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean a price file and write `series.csv`.
    Ingest {
        #[command(flatten)]
        common: Common,
    },
    /// Stepwise SARIMA order search on the training block.
    AutoSarima {
        #[command(flatten)]
        common: Common,
        /// Seasonal period.
        #[arg(long)]
        m: Option<usize>,
        /// aic or bic.
        #[arg(long)]
        criterion: Option<String>,
    },
    /// Fit one SARIMA order, e.g. `1,2,1,0,1,1,12`.
    FitSarima {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        order: Option<String>,
    },
    /// Train an LSTM, or a lookback grid with `--grid-lookback`.
    TrainLstm {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        units: Option<usize>,
        #[arg(long)]
        dropout: Option<f64>,
        #[arg(long)]
        lookback: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        grid_lookback: Option<Vec<usize>>,
    },
    /// Forecast future trading days from a saved model.
    Forecast {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: PathBuf,
        /// Trading days to forecast.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Rank report files by a metric and write `league.csv`.
    Compare {
        #[command(flatten)]
        common: Common,
        /// aic, bic, mse_train, mse_val, mse_test or runtime.
        #[arg(long)]
        metric: Option<String>,
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

fn context(common: &Common) -> anyhow::Result<(RunConfig, bool)> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(|e| FileError(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    set(&mut cfg.input_path, common.input.clone());
    set(&mut cfg.output_dir, common.out.clone());
    set(&mut cfg.seed, common.seed);
    set(&mut cfg.date_range, common.range);
    set(&mut cfg.split_ratios, common.ratios);
    Ok((cfg, common.reproducible))
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Ingest { common } => {
            let (cfg, reproducible) = context(&common)?;
            commands::ingest(&Ctx { cfg, reproducible })
        }
        Command::AutoSarima { common, m, criterion } => {
            let (mut cfg, reproducible) = context(&common)?;
            set(&mut cfg.m, m);
            set(&mut cfg.criterion, criterion);
            commands::auto_sarima(&Ctx { cfg, reproducible })
        }
        Command::FitSarima { common, order } => {
            let (mut cfg, reproducible) = context(&common)?;
            set(&mut cfg.order, order);
            commands::fit_sarima(&Ctx { cfg, reproducible })
        }
        Command::TrainLstm { common, units, dropout, lookback, epochs, learning_rate, batch_size, grid_lookback } => {
            let (mut cfg, reproducible) = context(&common)?;
            set(&mut cfg.units, units);
            set(&mut cfg.dropout, dropout);
            set(&mut cfg.lookback, lookback);
            set(&mut cfg.epochs, epochs);
            set(&mut cfg.learning_rate, learning_rate);
            set(&mut cfg.batch_size, batch_size);
            set(&mut cfg.grid_lookback, grid_lookback);
            commands::train_lstm(&Ctx { cfg, reproducible })
        }
        Command::Forecast { common, model, horizon } => {
            let (mut cfg, reproducible) = context(&common)?;
            set(&mut cfg.horizon, horizon);
            commands::forecast(&Ctx { cfg, reproducible }, &model)
        }
        Command::Compare { common, metric, reports } => {
            let (mut cfg, reproducible) = context(&common)?;
            set(&mut cfg.metric, metric);
            commands::compare(&Ctx { cfg, reproducible }, &reports)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<FileError>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if cause.is::<Mismatch>() {
            return 5;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::Io(_) | Error::Format(_) | Error::Row { .. } | Error::DuplicateDate(_) | Error::EmptySeries => 2,
                Error::Selection(_) | Error::Convergence { .. } => 3,
                Error::Divergence { .. } => 4,
                Error::MetricMissing { .. } | Error::MixedUnits(_) => 6,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
