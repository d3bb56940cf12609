//! Config-driven run: writes synthetic inputs and a TOML config, then trains,
//! evaluates with the baseline, and compares error sets, as the `discrel` binary does.

use discrel::config::ExperimentConfig;
use discrel::corpus::Split;
use discrel::experiment::{run_compare, run_eval, run_train, EvalRequest};
use discrel::synthetic::{SyntheticCorpus, SyntheticSpec};

const CONFIG: &str = r#"
[paths]
corpus = "data/corpus.jsonl"
vectors = "data/vectors.txt"
clusters = "data/clusters.txt"

[model]
kind = "pretrained"
word_pairs = true
word_pair_dim = 1024
hidden_width = 32

[train]
max_epochs = 60
seed = 5

[output]
dir = "run"
"#;

fn main() -> discrel::Result<()> {
    let root = tempfile::tempdir()?;
    SyntheticCorpus::generate(SyntheticSpec::default())?.write_to(&root.path().join("data"))?;
    let config_path = root.path().join("experiment.toml");
    std::fs::write(&config_path, CONFIG)?;

    let config = ExperimentConfig::load(&config_path)?;
    let out = config.output_dir();
    let trained = run_train(&config, &out)?;
    println!("dev accuracy {:.3} at epoch {:?}", trained.dev_report.accuracy, trained.history.best_epoch);

    let request = EvalRequest { checkpoint: trained.checkpoint, corpus: None, split: Split::Test, baseline: true };
    let evaluated = run_eval(&config, &request, &out)?;
    println!("test accuracy {:.3}", evaluated.report.accuracy);

    let stats = run_compare(&out.join("test_report.tsv"), &out.join("test_baseline.tsv"), &out)?;
    println!("model vs baseline error jaccard {:.3}", stats.jaccard);
    let mut files: Vec<String> = std::fs::read_dir(&out)?
        .map(|e| e.map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()?;
    files.sort();
    println!("outputs: {}", files.join(", "));
    Ok(())
}
