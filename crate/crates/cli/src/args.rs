use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use mwp::lifting::{DEFAULT_LEVELS, MAX_LEVELS};

#[derive(Debug, Parser)]
#[command(name = "mwp", version, about = "Lossless wavelet-predictive grayscale image codec")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Selection {
    #[default]
    Greedy,
    Exhaustive,
}

impl From<Selection> for mwp::SelectionMode {
    fn from(s: Selection) -> Self {
        match s {
            Selection::Greedy => mwp::SelectionMode::Greedy,
            Selection::Exhaustive => mwp::SelectionMode::Exhaustive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Kind {
    Constant,
    Ramp,
    GaussianBlob,
    SmoothNoise,
}

impl From<Kind> for mwp::PhantomKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Constant => mwp::PhantomKind::Constant,
            Kind::Ramp => mwp::PhantomKind::Ramp,
            Kind::GaussianBlob => mwp::PhantomKind::GaussianBlob,
            Kind::SmoothNoise => mwp::PhantomKind::SmoothNoise,
        }
    }
}

fn levels_parser() -> clap::builder::RangedI64ValueParser<u8> {
    clap::value_parser!(u8).range(1..=i64::from(MAX_LEVELS))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a PGM image into an .mwp container
    Compress {
        /// Binary PGM (P5) image, 8 or 16 bits
        input: PathBuf,
        /// Container to write
        output: PathBuf,
        /// Wavelet decomposition levels
        #[arg(long, default_value_t = DEFAULT_LEVELS, value_parser = levels_parser())]
        levels: u8,
        /// Predictor selection strategy
        #[arg(long, value_enum, default_value_t)]
        selection: Selection,
        /// Code every detail band without prediction
        #[arg(long)]
        no_predict: bool,
    },
    /// Decompress an .mwp container into a PGM image
    Decompress {
        /// Container written by `compress`
        input: PathBuf,
        /// PGM image to write
        output: PathBuf,
    },
    /// Write per-band correlation and predicted-versus-actual CSV files
    Analyze {
        /// Binary PGM (P5) image
        input: PathBuf,
        /// Directory for the CSV files, created if missing
        #[arg(long)]
        out_dir: PathBuf,
        /// Wavelet decomposition levels
        #[arg(long, default_value_t = DEFAULT_LEVELS, value_parser = levels_parser())]
        levels: u8,
        /// Predictor selection strategy
        #[arg(long, value_enum, default_value_t)]
        selection: Selection,
    },
    /// Measure bits per pixel and timings over a directory of PGM images
    Bench {
        /// Directory whose .pgm files are measured
        #[arg(long = "corpus-dir", visible_alias = "corpus")]
        corpus_dir: PathBuf,
        /// Write the CSV here instead of standard output
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Timed runs per image and configuration; the median is reported
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        repeats: u32,
        /// Wavelet decomposition levels
        #[arg(long, default_value_t = DEFAULT_LEVELS, value_parser = levels_parser())]
        levels: u8,
    },
    /// Generate a synthetic 8-bit test image
    Phantom {
        /// Image content
        #[arg(long, value_enum)]
        kind: Kind,
        /// Side length in pixels (at least 8)
        #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u32).range(8..=65536))]
        size: u32,
        /// Seed for smooth_noise; other kinds ignore it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// PGM image to write
        #[arg(long)]
        out: PathBuf,
    },
}
