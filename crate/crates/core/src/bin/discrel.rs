use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use discrel::config::ExperimentConfig;
use discrel::corpus::{import, save_relations, split_by_sections, SourceFormat, Split};
use discrel::experiment::{run_compare, run_eval, run_train, EvalRequest};
use discrel::Error;

#[derive(Parser)]
#[command(name = "discrel", version, about = "Implicit discourse relation classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    PdtbPipes,
    ConllJson,
    Normalized,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Dev,
    Test,
    Blind,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Self {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Dev => Split::Dev,
            SplitArg::Test => Split::Test,
            SplitArg::Blind => Split::Blind,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Convert a source corpus to normalized JSONL.
    Import {
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Split assigned to every imported instance.
        #[arg(long, value_enum)]
        split: Option<SplitArg>,
    },
    /// Train a model from an experiment config.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a checkpoint on one split.
    Eval {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "test")]
        split: SplitArg,
        /// Also report the most-common-class baseline.
        #[arg(long)]
        baseline: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error overlap between two per-instance report TSVs.
    Compare {
        report_a: PathBuf,
        report_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> discrel::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        config.train.seed = seed;
    }
    Ok(config)
}

fn run(cli: Cli) -> discrel::Result<()> {
    match cli.command {
        Command::Import { format, input, out, split } => {
            let format = match format {
                Format::PdtbPipes => SourceFormat::PdtbPipes,
                Format::ConllJson => SourceFormat::ConllJson,
                Format::Normalized => SourceFormat::Normalized,
            };
            let instances = import(format, &input, split.map(Split::from))?;
            save_relations(&out, &instances)?;
            let total = instances.len();
            let parts = split_by_sections(instances)?;
            println!(
                "{total} instances: train {} dev {} test {} blind {} excluded {}",
                parts.train.len(),
                parts.dev.len(),
                parts.test.len(),
                parts.blind.len(),
                parts.excluded
            );
        }
        Command::Train { config, seed, out } => {
            let config = load_config(&config, seed)?;
            let out = out.unwrap_or_else(|| config.output_dir());
            let outcome = run_train(&config, &out)?;
            println!(
                "best epoch {:?}, dev accuracy {:.4}, checkpoint {}",
                outcome.history.best_epoch,
                outcome.dev_report.accuracy,
                outcome.checkpoint.display()
            );
        }
        Command::Eval { config, checkpoint, corpus, split, baseline, out } => {
            let config = load_config(&config, None)?;
            let out = out.unwrap_or_else(|| config.output_dir());
            let request = EvalRequest { checkpoint, corpus, split: split.into(), baseline };
            let outcome = run_eval(&config, &request, &out)?;
            let r = &outcome.report;
            println!("accuracy {:.4} ({}/{})", r.accuracy, r.correct, r.total);
            if !r.never_predictable.is_empty() {
                println!("senses absent from the inventory: {}", r.never_predictable.join(", "));
            }
            if let Some(b) = &outcome.baseline {
                println!("most common class accuracy {:.4} ({}/{})", b.accuracy, b.correct, b.total);
            }
        }
        Command::Compare { report_a, report_b, out } => {
            let s = run_compare(&report_a, &report_b, &out)?;
            println!(
                "errors A {} B {} shared {} union {} jaccard {:.4}",
                s.errors_a, s.errors_b, s.intersection, s.union, s.jaccard
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
