//! Config-driven train, eval and compare runs writing their artifacts to an output directory.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::classifier::{
    load_checkpoint, save_checkpoint, BilstmBlock, FeatureSources, InputPlan, ModelSpec, RelationModel,
};
use crate::config::ExperimentConfig;
use crate::corpus::{
    build_inventory, expand_multilabel, load_relations, split_by_sections, CorpusSplit, LoadOptions,
    RelationInstance, Split,
};
use crate::encoder::EmbeddingTable;
use crate::error::{Error, Result};
use crate::eval::{error_overlap, evaluate, most_common_class, BoundModel, EvalReport, OverlapStats};
use crate::features::BrownClusterMap;
use crate::pretrained::{compose_store, NgramTable, SentenceVectorStore};
use crate::rng::Rng;
use crate::train::{train, History};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const HISTORY_FILE: &str = "history.csv";

/// Owned feature resources for one corpus.
#[derive(Debug, Clone, Default)]
pub struct Resources {
    pub embeddings: Option<EmbeddingTable<f32>>,
    pub vectors: Option<SentenceVectorStore<f32>>,
    pub clusters: Option<BrownClusterMap>,
}

impl Resources {
    /// Loads what `config` references. GloVe is restricted to the corpus vocabulary and
    /// n-gram tables are composed into a store covering `instances`.
    pub fn load(config: &ExperimentConfig, instances: &[RelationInstance]) -> Result<Self> {
        let embeddings = match config.glove_path() {
            Some(path) => {
                let vocab: HashSet<String> = instances
                    .iter()
                    .flat_map(|i| i.arg1_tokens.iter().chain(i.arg2_tokens.iter()))
                    .cloned()
                    .collect();
                Some(EmbeddingTable::load_glove_filtered(path, Some(&vocab))?)
            }
            None => None,
        };
        let vectors = match (config.vectors_path(), config.ngrams_path()) {
            (Some(path), _) => Some(SentenceVectorStore::load_vector_file(path)?),
            (None, Some(path)) => Some(compose_store(instances, &NgramTable::load(path)?, "sent2vec")?),
            (None, None) => None,
        };
        let clusters = match config.clusters_path() {
            Some(path) if config.model.word_pairs => Some(BrownClusterMap::load(path)?),
            _ => None,
        };
        Ok(Self {
            embeddings,
            vectors,
            clusters,
        })
    }

    pub fn sources(&self) -> FeatureSources<'_, f32> {
        FeatureSources {
            embeddings: self.embeddings.as_ref(),
            vectors: self.vectors.as_ref(),
            clusters: self.clusters.as_ref(),
        }
    }
}

pub fn load_corpus(config: &ExperimentConfig, path: &Path) -> Result<CorpusSplit> {
    let options = if config.data.implicit_only {
        LoadOptions::default()
    } else {
        LoadOptions::all_types()
    };
    split_by_sections(load_relations(path, options)?)
}

fn all_instances(split: &CorpusSplit) -> Vec<RelationInstance> {
    [&split.train, &split.dev, &split.test, &split.blind]
        .into_iter()
        .flatten()
        .cloned()
        .collect()
}

/// Model architecture implied by the config and loaded resources.
pub fn build_spec(config: &ExperimentConfig, resources: &Resources, senses: crate::corpus::SenseInventory) -> Result<ModelSpec> {
    let m = &config.model;
    let bilstm = config.uses_bilstm().then_some(BilstmBlock {
        pooling: m.pooling,
        hidden_dim: m.hidden_dim,
    });
    let pretrained = match (&resources.vectors, config.uses_pretrained()) {
        (Some(v), true) => Some(v.dimension()),
        (None, true) => return Err(Error::Config("pretrained input enabled but no vectors loaded".into())),
        _ => None,
    };
    let plan = InputPlan {
        bilstm,
        pretrained,
        word_pairs: m.word_pairs.then_some(m.word_pair_dim),
    };
    let embedding_dim = resources.embeddings.as_ref().map(|e| e.dimension());
    let mut spec = ModelSpec::new(plan, embedding_dim, config.head_layers(), m.hidden_width, senses)?;
    spec.dropout = config.train.dropout;
    spec.freeze_encoder = m.freeze_encoder;
    Ok(spec)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: RelationModel<f32>,
    pub history: History,
    pub dev_report: EvalReport,
    pub checkpoint: PathBuf,
}

/// Trains per `config` and writes the checkpoint, history CSV and dev report into `out_dir`.
pub fn run_train(config: &ExperimentConfig, out_dir: &Path) -> Result<TrainOutcome> {
    let split = load_corpus(config, &config.corpus_path())?;
    let resources = Resources::load(config, &all_instances(&split))?;
    let inventory = build_inventory(&split.train)?;
    let pairs = expand_multilabel(&split.train, &inventory)?;
    log::info!(
        "{} train instances ({} pairs), {} dev, {} senses",
        split.train.len(),
        pairs.len(),
        split.dev.len(),
        inventory.len()
    );
    let spec = build_spec(config, &resources, inventory)?;
    let mut init_rng = Rng::new(config.train.seed);
    let model = RelationModel::new(spec, &mut init_rng)?;
    let sources = resources.sources();
    let (model, history) = train(model, &pairs, &split.dev, &sources, &config.train)?;
    let dev_report = evaluate(&BoundModel::new(&model, sources), &split.dev)?;

    fs::create_dir_all(out_dir)?;
    let checkpoint = out_dir.join(CHECKPOINT_FILE);
    save_checkpoint(&model, &checkpoint)?;
    history.save_csv(out_dir.join(HISTORY_FILE))?;
    dev_report.save(out_dir, "dev_report")?;
    Ok(TrainOutcome {
        model,
        history,
        dev_report,
        checkpoint,
    })
}

#[derive(Debug, Clone)]
pub struct EvalRequest {
    pub checkpoint: PathBuf,
    /// Overrides the config's corpus.
    pub corpus: Option<PathBuf>,
    pub split: Split,
    pub baseline: bool,
}

#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub report: EvalReport,
    pub baseline: Option<EvalReport>,
}

/// Evaluates a checkpoint on one split; writes `<split>_report.{json,tsv}` and, with the
/// baseline flag, `<split>_baseline.{json,tsv}`.
pub fn run_eval(config: &ExperimentConfig, request: &EvalRequest, out_dir: &Path) -> Result<EvalOutcome> {
    let model: RelationModel<f32> = load_checkpoint(&request.checkpoint)?;
    let corpus_path = request.corpus.clone().unwrap_or_else(|| config.corpus_path());
    let split = load_corpus(config, &corpus_path)?;
    if !split.train.is_empty() {
        let corpus_inventory = build_inventory(&split.train)?;
        if &corpus_inventory != model.senses() {
            return Err(Error::InventoryMismatch {
                checkpoint: model.senses().labels().to_vec(),
                corpus: corpus_inventory.labels().to_vec(),
            });
        }
    }
    let instances = split.get(request.split);
    if instances.is_empty() {
        return Err(Error::invalid(format!("split `{}` is empty", request.split)));
    }
    let resources = Resources::load(config, instances)?;
    let report = evaluate(&BoundModel::new(&model, resources.sources()), instances)?;
    fs::create_dir_all(out_dir)?;
    report.save(out_dir, &format!("{}_report", request.split))?;

    let baseline = if request.baseline {
        if split.train.is_empty() {
            return Err(Error::invalid("the baseline needs a non-empty train split"));
        }
        let pairs = expand_multilabel(&split.train, model.senses())?;
        let majority = most_common_class(&pairs, model.senses())?;
        log::info!("most common class: {}", majority.sense());
        let b = evaluate(&majority, instances)?;
        b.save(out_dir, &format!("{}_baseline", request.split))?;
        Some(b)
    } else {
        None
    };
    Ok(EvalOutcome { report, baseline })
}

/// Error overlap of two per-instance report TSVs; writes `overlap.json` into `out_dir`.
pub fn run_compare(report_a: &Path, report_b: &Path, out_dir: &Path) -> Result<OverlapStats> {
    let a = EvalReport::load_tsv(report_a)?;
    let b = EvalReport::load_tsv(report_b)?;
    let stats = error_overlap(&a, &b)?;
    fs::create_dir_all(out_dir)?;
    let mut json = serde_json::to_vec_pretty(&stats)?;
    json.push(b'\n');
    fs::write(out_dir.join("overlap.json"), json)?;
    Ok(stats)
}
