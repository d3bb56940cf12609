//! Every example runs to completion. `cargo test` builds examples alongside the tests.

use std::path::PathBuf;
use std::process::Command;

const EXAMPLES: [&str; 9] = [
    "adam_quadratic",
    "encode_sentences",
    "evaluate_and_compare",
    "experiment_pipeline",
    "gradient_check",
    "import_corpus",
    "sent2vec_compose",
    "train_synthetic",
    "word_pair_features",
];

fn examples_dir() -> PathBuf {
    // target/<profile>/deps/examples-<hash>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().join("examples")
}

fn run(name: &str) {
    let path = examples_dir().join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
    let output = if path.is_file() {
        Command::new(&path).output().unwrap()
    } else {
        Command::new(env!("CARGO"))
            .args(["run", "-q", "-p", "discrel", "--example", name])
            .output()
            .unwrap()
    };
    assert!(
        output.status.success(),
        "{name} failed:\n{}\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

#[test]
fn all_examples_are_listed() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let mut found: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.unwrap().path().file_stem().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    found.sort();
    assert_eq!(found, EXAMPLES);
}

#[test]
fn examples_run() {
    for name in EXAMPLES {
        run(name);
    }
}
