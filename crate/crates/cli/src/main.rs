//! `expresso`: measure, learn and score the expressiveness of line drawings.

mod commands;
mod load;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use expresso::expressiveness::Aspect;
use expresso::perceptron::{Init, Update};
use expresso::GeometryConfigF64;

use crate::load::InputError;
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "expresso",
    version,
    about = "Expressiveness analysis of line drawings"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Resampling step in millimetres.
    #[arg(long, global = true, default_value_t = 1.0)]
    resample_step: f64,
    /// Minimum turning angle (degrees) of a soft bend.
    #[arg(long, global = true, default_value_t = 5.0)]
    theta_soft: f64,
    /// Minimum turning angle (degrees) of a corner.
    #[arg(long, global = true, default_value_t = 40.0)]
    theta_corner: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
}

impl Global {
    fn geometry(&self) -> Result<GeometryConfigF64> {
        let cfg = GeometryConfigF64 {
            resample_step_mm: self.resample_step,
            theta_soft_deg: self.theta_soft,
            theta_corner_deg: self.theta_corner,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AspectArg {
    A,
    B,
    C,
}

impl From<AspectArg> for Aspect {
    fn from(a: AspectArg) -> Self {
        match a {
            AspectArg::A => Aspect::A,
            AspectArg::B => Aspect::B,
            AspectArg::C => Aspect::C,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UpdateArg {
    PerSample,
    Batch,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print elementary aspects, vectors and aspects (a), (b), (c).
    Analyze {
        /// Drawing files or directories of .drw files.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Write a seeded synthetic corpus and its ground-truth manifest.
    GenCorpus {
        #[arg(long, env = "EXPRESSO_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Couple larger drawings with finer detail.
        #[arg(long)]
        trend_mode: bool,
        /// Add k drawings with extreme (a) and k with extreme (b).
        #[arg(long, value_name = "K")]
        inject_extremes: Option<usize>,
        /// Regenerate drawings until each has this many crossings.
        #[arg(long, default_value_t = 0)]
        min_crossings: usize,
        /// Fixed probability that a turn is a soft curve.
        #[arg(long)]
        soft_fraction: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the 12-5-5 perceptron on a directory of drawings.
    TrainPerceptron {
        #[arg(long)]
        learning_set: PathBuf,
        #[arg(long, default_value_t = 5000)]
        epochs: usize,
        #[arg(long, default_value_t = 0.5)]
        lr: f64,
        /// `paper`, `random` (seeded from EXPRESSO_SEED) or `random:SEED`.
        #[arg(long, default_value = "paper")]
        init: String,
        #[arg(long, value_enum, default_value_t = UpdateArg::PerSample)]
        update: UpdateArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Perceptron outputs and the aspect values rebuilt from them.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Train a linear SVM separating high from low values of one aspect.
    TrainSvm {
        #[arg(long)]
        learning_set: PathBuf,
        #[arg(long, value_enum)]
        aspect: AspectArg,
        #[arg(long = "C", default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decision value and class of drawings under an SVM model.
    SvmScore {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Rank correlations between aspects over a corpus.
    Correlate { dir: PathBuf },
    /// CSV of hand against model values for one aspect, with a fitted line.
    PlotData {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, value_enum)]
        aspect: AspectArg,
    },
}

fn parse_init(spec: &str) -> Result<Init> {
    match spec.split_once(':') {
        None if spec == "paper" => Ok(Init::Paper),
        None if spec == "random" => {
            let seed = match std::env::var("EXPRESSO_SEED") {
                Ok(s) => s
                    .parse()
                    .map_err(|_| anyhow::anyhow!("EXPRESSO_SEED '{s}' is not an integer"))?,
                Err(_) => 1,
            };
            Ok(Init::Random(seed))
        }
        Some(("random", seed)) => {
            Ok(Init::Random(seed.parse().map_err(|_| {
                anyhow::anyhow!("invalid seed '{seed}' in --init")
            })?))
        }
        _ => bail!("--init must be paper, random or random:SEED, got '{spec}'"),
    }
}

fn run(cli: Cli) -> Result<()> {
    let geo = cli.global.geometry()?;
    let format = cli.global.format;
    match cli.command {
        Command::Analyze { paths } => commands::analyze(&paths, &geo, format),
        Command::GenCorpus {
            seed,
            count,
            trend_mode,
            inject_extremes,
            min_crossings,
            soft_fraction,
            out,
        } => commands::gen_corpus(
            commands::GenArgs {
                seed,
                count,
                trend_mode,
                inject_extremes,
                min_crossings,
                soft_fraction,
            },
            &out,
            &geo,
        ),
        Command::TrainPerceptron {
            learning_set,
            epochs,
            lr,
            init,
            update,
            out,
        } => {
            let update = match update {
                UpdateArg::PerSample => Update::PerSample,
                UpdateArg::Batch => Update::Batch,
            };
            let cfg = expresso::perceptron::TrainConfig {
                epochs,
                learning_rate: lr,
                init: parse_init(&init)?,
                update,
            };
            commands::train_perceptron(&learning_set, &cfg, &out, &geo, format)
        }
        Command::Predict { model, paths } => commands::predict(&model, &paths, &geo, format),
        Command::TrainSvm {
            learning_set,
            aspect,
            c,
            out,
        } => commands::train_svm(&learning_set, aspect.into(), c, &out, &geo, format),
        Command::SvmScore { model, paths } => commands::svm_score(&model, &paths, &geo, format),
        Command::Correlate { dir } => commands::correlate(&dir, &geo, format),
        Command::PlotData { model, dir, aspect } => {
            commands::plot_data(&model, &dir, aspect.into(), &geo)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_specs() {
        assert_eq!(parse_init("paper").unwrap(), Init::Paper);
        assert_eq!(parse_init("random:42").unwrap(), Init::Random(42));
        assert!(parse_init("random:x").is_err());
        assert!(parse_init("zeros").is_err());
    }

    #[test]
    fn cli_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
