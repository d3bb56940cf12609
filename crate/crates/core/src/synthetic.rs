//! Seeded, linearly separable toy corpus plus matching resource files.
//!
//! Every argument contains one marker word of its instance's sense among uniform filler
//! words, so each input plan can fit the training set exactly.

use std::path::{Path, PathBuf};

use crate::corpus::{save_relations, RelationInstance, RelationRecord, TokenizerOptions};
use crate::encoder::EmbeddingTable;
use crate::error::{Error, Result};
use crate::features::BrownClusterMap;
use crate::pretrained::{argument_id, ArgSlot, NgramTable, SentenceVectorStore};
use crate::rng::Rng;

const LABELS: [&str; 4] = [
    "Comparison.Contrast",
    "Contingency.Cause",
    "Expansion.Conjunction",
    "Temporal.Asynchronous",
];

/// Marker words per sense.
const MARKERS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub train: usize,
    pub dev: usize,
    pub test: usize,
    pub senses: usize,
    pub vocabulary: usize,
    /// Training instances given a second sense.
    pub double_sense: usize,
    pub embedding_dim: usize,
    pub vector_dim: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            train: 50,
            dev: 12,
            test: 12,
            senses: 4,
            vocabulary: 100,
            double_sense: 0,
            embedding_dim: 16,
            vector_dim: 32,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub spec: SyntheticSpec,
    pub train: Vec<RelationInstance>,
    pub dev: Vec<RelationInstance>,
    pub test: Vec<RelationInstance>,
    pub vocabulary: Vec<String>,
    pub senses: Vec<String>,
}

/// Paths written by [`SyntheticCorpus::write_to`].
#[derive(Debug, Clone)]
pub struct SyntheticFiles {
    pub corpus: PathBuf,
    pub glove: PathBuf,
    pub vectors: PathBuf,
    pub ngrams: PathBuf,
    pub clusters: PathBuf,
}

fn sense_label(i: usize) -> String {
    LABELS.get(i).map_or_else(|| format!("Synthetic.Sense{i}"), |s| s.to_string())
}

impl SyntheticCorpus {
    pub fn generate(spec: SyntheticSpec) -> Result<Self> {
        if spec.senses < 2 || spec.train == 0 || spec.dev == 0 {
            return Err(Error::invalid("synthetic corpus needs at least 2 senses and non-empty train/dev"));
        }
        if spec.vocabulary < spec.senses * MARKERS + 2 {
            return Err(Error::invalid("vocabulary too small for the marker words"));
        }
        if spec.double_sense > spec.train {
            return Err(Error::invalid("more double-sense instances than training instances"));
        }
        let vocabulary: Vec<String> = (0..spec.vocabulary).map(|i| format!("w{i:03}")).collect();
        let senses: Vec<String> = (0..spec.senses).map(sense_label).collect();
        let mut rng = Rng::new(spec.seed);
        let build = |count: usize, sections: &[u32], double: usize, rng: &mut Rng| -> Result<Vec<RelationInstance>> {
            (0..count)
                .map(|n| {
                    let sense = rng.below(spec.senses);
                    let mut labels = vec![senses[sense].clone()];
                    if n < double {
                        labels.push(senses[(sense + 1 + rng.below(spec.senses - 1)) % spec.senses].clone());
                    }
                    let section = sections[n % sections.len()];
                    let doc_id = format!("wsj_{section:02}{:02}", n / sections.len() % 100);
                    let record = RelationRecord {
                        id: format!("{doc_id}:{n}"),
                        doc_id,
                        arg1: argument(&vocabulary, sense, spec.senses, rng),
                        arg2: argument(&vocabulary, sense, spec.senses, rng),
                        senses: labels,
                        relation_type: "Implicit".into(),
                        split: None,
                    };
                    RelationInstance::from_record(record, TokenizerOptions::default())
                })
                .collect()
        };
        let train_sections: Vec<u32> = (2..=20).collect();
        let train = build(spec.train, &train_sections, spec.double_sense, &mut rng)?;
        let dev = build(spec.dev, &[0, 1], 0, &mut rng)?;
        let test = build(spec.test, &[21, 22], 0, &mut rng)?;
        Ok(Self {
            spec,
            train,
            dev,
            test,
            vocabulary,
            senses,
        })
    }

    pub fn all(&self) -> impl Iterator<Item = &RelationInstance> {
        self.train.iter().chain(&self.dev).chain(&self.test)
    }

    /// Uniform random word vectors for the whole vocabulary.
    pub fn glove(&self) -> Result<EmbeddingTable<f32>> {
        let mut rng = Rng::new(self.spec.seed ^ 0x676c6f7665);
        let mut table = EmbeddingTable::new(self.spec.embedding_dim)?;
        for w in &self.vocabulary {
            let v: Vec<f32> = (0..self.spec.embedding_dim)
                .map(|_| rng.uniform(-1.0, 1.0) as f32)
                .collect();
            table.insert(w.clone(), &v)?;
        }
        Ok(table)
    }

    /// Unigram table (no bigrams) of seeded word vectors.
    pub fn ngram_table(&self) -> Result<NgramTable<f32>> {
        let mut rng = Rng::new(self.spec.seed ^ 0x6e6772616d);
        let mut table = NgramTable::new(self.spec.vector_dim)?;
        for w in &self.vocabulary {
            let v: Vec<f32> = (0..self.spec.vector_dim).map(|_| rng.uniform(-1.0, 1.0) as f32).collect();
            table.insert_unigram(w.clone(), v)?;
        }
        Ok(table)
    }

    /// Stand-in for an external sentence encoder: each argument maps to the mean of
    /// seeded per-word vectors, keyed by argument id.
    pub fn fake_encoder_store(&self) -> Result<SentenceVectorStore<f32>> {
        let table = self.ngram_table()?;
        let mut store = SentenceVectorStore::new(self.spec.vector_dim, "fake-encoder")?;
        for inst in self.all() {
            for (slot, seq) in [(ArgSlot::Arg1, &inst.arg1_tokens), (ArgSlot::Arg2, &inst.arg2_tokens)] {
                let rep = crate::pretrained::sent2vec_compose(seq, &table)?;
                store.insert(argument_id(&inst.id, slot), rep.values)?;
            }
        }
        Ok(store)
    }

    /// Marker words share a cluster path per sense; filler words get random 6-bit paths.
    pub fn clusters(&self) -> Result<BrownClusterMap> {
        let mut rng = Rng::new(self.spec.seed ^ 0x62726f776e);
        let mut map = BrownClusterMap::new();
        for (i, w) in self.vocabulary.iter().enumerate() {
            let path = if i < self.spec.senses * MARKERS {
                format!("1{:b}", i / MARKERS)
            } else {
                format!("0{:06b}", rng.below(64))
            };
            map.insert(w.clone(), path)?;
        }
        Ok(map)
    }

    /// Writes the corpus JSONL and every resource file into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<SyntheticFiles> {
        std::fs::create_dir_all(dir)?;
        let files = SyntheticFiles {
            corpus: dir.join("corpus.jsonl"),
            glove: dir.join("glove.txt"),
            vectors: dir.join("vectors.txt"),
            ngrams: dir.join("ngrams.txt"),
            clusters: dir.join("clusters.txt"),
        };
        let all: Vec<RelationInstance> = self.all().cloned().collect();
        save_relations(&files.corpus, &all)?;
        self.glove()?.save_glove(&files.glove)?;
        self.fake_encoder_store()?.save(&files.vectors)?;
        self.ngram_table()?.save(&files.ngrams)?;
        self.clusters()?.save(&files.clusters)?;
        Ok(files)
    }
}

fn argument(vocabulary: &[String], sense: usize, senses: usize, rng: &mut Rng) -> String {
    let filler = &vocabulary[senses * MARKERS..];
    let len = 3 + rng.below(4);
    let marker_at = rng.below(len);
    (0..len)
        .map(|i| {
            if i == marker_at {
                vocabulary[sense * MARKERS + rng.below(MARKERS)].as_str()
            } else {
                filler[rng.below(filler.len())].as_str()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
