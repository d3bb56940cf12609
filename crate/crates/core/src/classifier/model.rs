use serde::{Deserialize, Serialize};

use crate::classifier::head::{head_widths, FfnHead, HeadTrace};
use crate::classifier::plan::{InputPlan, DEFAULT_HIDDEN_CAP};
use crate::corpus::{RelationInstance, SenseInventory};
use crate::encoder::{BiLstmEncoder, EmbeddingTable, EncoderTrace, LstmParams};
use crate::error::{Error, Result};
use crate::features::{word_pair_features, BrownClusterMap};
use crate::kernel::{multiclass_hinge, softmax_nll, Parameterized, Scalar, Tensor};
use crate::pretrained::{argument_id, ArgSlot, SentenceVectorStore};
use crate::rng::Rng;

/// Architecture of a [`RelationModel`]; everything needed to rebuild it apart from weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub plan: InputPlan,
    /// Word-embedding width; required when the plan uses the Bi-LSTM.
    pub embedding_dim: Option<usize>,
    pub lstm_layers: usize,
    pub forget_bias: f64,
    /// Output width of every head layer; the last equals the sense count.
    pub head_widths: Vec<usize>,
    pub senses: SenseInventory,
    pub dropout: f64,
    pub freeze_encoder: bool,
}

impl ModelSpec {
    /// Spec with the default LSTM settings (2 layers, forget bias 1.0) and hidden head
    /// widths equal to the input width capped at 512 unless `hidden_width` is given.
    pub fn new(
        plan: InputPlan,
        embedding_dim: Option<usize>,
        head_layers: usize,
        hidden_width: Option<usize>,
        senses: SenseInventory,
    ) -> Result<Self> {
        let width = hidden_width.unwrap_or_else(|| plan.input_dimension().min(DEFAULT_HIDDEN_CAP));
        let spec = Self {
            head_widths: head_widths(head_layers, width, senses.len())?,
            plan,
            embedding_dim,
            lstm_layers: 2,
            forget_bias: 1.0,
            senses,
            dropout: 0.35,
            freeze_encoder: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        head_widths(self.head_widths.len(), 1, 1)?;
        if self.head_widths.last() != Some(&self.senses.len()) {
            return Err(Error::invalid("final head width must equal the number of senses"));
        }
        if self.plan.bilstm.is_some() && (self.embedding_dim.unwrap_or(0) == 0 || self.lstm_layers == 0) {
            return Err(Error::invalid("Bi-LSTM input needs an embedding dimension and at least one layer"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::invalid(format!("dropout must be in [0, 1), got {}", self.dropout)));
        }
        Ok(())
    }
}

/// Read-only resources the input blocks draw from. Not part of the checkpoint.
#[derive(Debug, Clone, Copy)]
pub struct FeatureSources<'a, T> {
    pub embeddings: Option<&'a EmbeddingTable<T>>,
    pub vectors: Option<&'a SentenceVectorStore<T>>,
    pub clusters: Option<&'a BrownClusterMap>,
}

impl<T> Default for FeatureSources<'_, T> {
    fn default() -> Self {
        Self {
            embeddings: None,
            vectors: None,
            clusters: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Nll,
    Hinge,
}

/// Forward state needed by [`RelationModel::backward`].
#[derive(Debug, Clone)]
pub struct ForwardTrace<T> {
    encoder: Option<(EncoderTrace<T>, EncoderTrace<T>)>,
    head: HeadTrace<T>,
}

/// Input plan, optional Bi-LSTM encoder shared by both arguments, and feedforward head.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationModel<T> {
    spec: ModelSpec,
    pub encoder: Option<BiLstmEncoder<T>>,
    pub head: FfnHead<T>,
}

impl<T: Scalar> RelationModel<T> {
    /// Xavier-initialized model.
    pub fn new(spec: ModelSpec, rng: &mut Rng) -> Result<Self> {
        spec.validate()?;
        let encoder = match spec.plan.bilstm {
            Some(b) => Some(BiLstmEncoder::new(
                LstmParams::xavier(
                    spec.embedding_dim.expect("validated"),
                    b.hidden_dim,
                    spec.lstm_layers,
                    spec.forget_bias,
                    rng,
                )?,
                b.pooling,
            )),
            None => None,
        };
        let head = FfnHead::xavier(spec.plan.input_dimension(), &spec.head_widths, rng)?;
        Ok(Self { spec, encoder, head })
    }

    /// All-zero parameters.
    pub fn zeros(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let encoder = match spec.plan.bilstm {
            Some(b) => Some(BiLstmEncoder::new(
                LstmParams::zeros(spec.embedding_dim.expect("validated"), b.hidden_dim, spec.lstm_layers)?,
                b.pooling,
            )),
            None => None,
        };
        let head = FfnHead::zeros(spec.plan.input_dimension(), &spec.head_widths)?;
        Ok(Self { spec, encoder, head })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn plan(&self) -> &InputPlan {
        &self.spec.plan
    }

    pub fn senses(&self) -> &SenseInventory {
        &self.spec.senses
    }

    pub fn dropout(&self) -> f64 {
        self.spec.dropout
    }

    pub fn set_dropout(&mut self, rate: f64) -> Result<()> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::invalid(format!("dropout must be in [0, 1), got {rate}")));
        }
        self.spec.dropout = rate;
        Ok(())
    }

    pub fn freeze_encoder(&self) -> bool {
        self.spec.freeze_encoder
    }

    pub fn set_freeze_encoder(&mut self, freeze: bool) {
        self.spec.freeze_encoder = freeze;
    }

    /// Checks that every enabled block has its resource with the right width.
    pub fn check_sources(&self, sources: &FeatureSources<'_, T>) -> Result<()> {
        let plan = self.plan();
        if plan.bilstm.is_some() {
            let table = sources
                .embeddings
                .ok_or_else(|| Error::invalid("the Bi-LSTM block needs word embeddings"))?;
            let want = self.spec.embedding_dim.unwrap_or(0);
            if table.dimension() != want {
                return Err(Error::shape("word embedding width", &[want], &[table.dimension()]));
            }
        }
        if let Some(dim) = plan.pretrained {
            let store = sources
                .vectors
                .ok_or_else(|| Error::invalid("the pretrained block needs a sentence-vector store"))?;
            if store.dimension() != dim {
                return Err(Error::shape("pretrained vector width", &[dim], &[store.dimension()]));
            }
        }
        if plan.word_pairs.is_some() && sources.clusters.is_none() {
            return Err(Error::invalid("the word-pair block needs Brown clusters"));
        }
        Ok(())
    }

    fn assemble(
        &self,
        inst: &RelationInstance,
        sources: &FeatureSources<'_, T>,
        traced: bool,
    ) -> Result<(Vec<T>, Option<(EncoderTrace<T>, EncoderTrace<T>)>)> {
        self.check_sources(sources)?;
        let plan = self.plan();
        let mut x = Vec::with_capacity(plan.input_dimension());
        let mut traces = None;

        if let Some(encoder) = &self.encoder {
            let table = sources.embeddings.expect("checked");
            if traced {
                let (r1, t1) = encoder.encode_traced(&inst.arg1_tokens, table)?;
                let (r2, t2) = encoder.encode_traced(&inst.arg2_tokens, table)?;
                x.extend(r1.values);
                x.extend(r2.values);
                traces = Some((t1, t2));
            } else {
                x.extend(encoder.encode(&inst.arg1_tokens, table)?.values);
                x.extend(encoder.encode(&inst.arg2_tokens, table)?.values);
            }
        }
        if plan.pretrained.is_some() {
            let store = sources.vectors.expect("checked");
            x.extend_from_slice(store.lookup(&argument_id(&inst.id, ArgSlot::Arg1))?);
            x.extend_from_slice(store.lookup(&argument_id(&inst.id, ArgSlot::Arg2))?);
        }
        if let Some(dim) = plan.word_pairs {
            let clusters = sources.clusters.expect("checked");
            let features = word_pair_features(&inst.arg1_tokens, &inst.arg2_tokens, clusters, dim)?;
            let start = x.len();
            x.resize(start + dim, T::zero());
            features.fill_dense(&mut x[start..]);
        }
        if x.len() != plan.input_dimension() {
            return Err(Error::shape("assembled input", &[plan.input_dimension()], &[x.len()]));
        }
        Ok((x, traces))
    }

    /// Concatenated head input for one instance.
    pub fn build_input(&self, inst: &RelationInstance, sources: &FeatureSources<'_, T>) -> Result<Vec<T>> {
        Ok(self.assemble(inst, sources, false)?.0)
    }

    /// Logits over the sense inventory. Dropout is active only when `training` is set.
    pub fn forward(
        &self,
        inst: &RelationInstance,
        sources: &FeatureSources<'_, T>,
        training: bool,
        rng: &mut Rng,
    ) -> Result<Vec<T>> {
        let x = self.build_input(inst, sources)?;
        Ok(self.head.forward(&x, self.spec.dropout, rng, training)?.0)
    }

    pub fn forward_traced(
        &self,
        inst: &RelationInstance,
        sources: &FeatureSources<'_, T>,
        training: bool,
        rng: &mut Rng,
    ) -> Result<(Vec<T>, ForwardTrace<T>)> {
        let want_encoder = self.encoder.is_some() && !self.spec.freeze_encoder;
        let (x, encoder) = self.assemble(inst, sources, want_encoder)?;
        let (logits, head) = self.head.forward(&x, self.spec.dropout, rng, training)?;
        Ok((logits, ForwardTrace { encoder, head }))
    }

    /// Accumulates parameter gradients given `∂L/∂logits`. A frozen encoder receives none.
    pub fn backward(&mut self, trace: &ForwardTrace<T>, d_logits: &[T]) {
        let dx = self.head.backward(&trace.head, d_logits);
        if let (Some(encoder), Some((t1, t2))) = (self.encoder.as_mut(), trace.encoder.as_ref()) {
            let w = encoder.output_dim();
            encoder.backward(t1, &dx[..w]);
            encoder.backward(t2, &dx[w..2 * w]);
        }
    }

    /// Forward, loss against `gold`, and backward in one call. Returns the loss.
    pub fn accumulate_gradient(
        &mut self,
        inst: &RelationInstance,
        gold: usize,
        sources: &FeatureSources<'_, T>,
        objective: Objective,
        rng: &mut Rng,
    ) -> Result<T> {
        let (logits, trace) = self.forward_traced(inst, sources, true, rng)?;
        let (loss, d_logits) = match objective {
            Objective::Nll => softmax_nll(&logits, gold)?,
            Objective::Hinge => multiclass_hinge(&logits, gold, T::one())?,
        };
        self.backward(&trace, &d_logits);
        Ok(loss)
    }

    /// Index of the highest logit in inference mode.
    pub fn predict_index(&self, inst: &RelationInstance, sources: &FeatureSources<'_, T>) -> Result<usize> {
        // Inference never draws from the generator.
        let logits = self.forward(inst, sources, false, &mut Rng::new(0))?;
        Ok(argmax(&logits))
    }

    pub fn predict<'s>(&'s self, inst: &RelationInstance, sources: &FeatureSources<'_, T>) -> Result<&'s str> {
        Ok(self.senses().label(self.predict_index(inst, sources)?))
    }
}

/// First index of the maximum value.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl<T: Scalar> Parameterized<T> for RelationModel<T> {
    fn visit_params(&self, f: &mut dyn FnMut(&str, &Tensor<T>)) {
        if let Some(e) = &self.encoder {
            e.visit_params(f);
        }
        self.head.visit_params(f);
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor<T>)) {
        if let Some(e) = &mut self.encoder {
            e.visit_params_mut(f);
        }
        self.head.visit_params_mut(f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::plan::BilstmBlock;
    use crate::corpus::{RelationRecord, TokenizerOptions};
    use crate::encoder::Pooling;

    fn instance() -> RelationInstance {
        RelationInstance::from_record(
            RelationRecord {
                id: "r1".into(),
                doc_id: "wsj_0200".into(),
                arg1: "the firms learned".into(),
                arg2: "they were ready".into(),
                senses: vec!["B".into()],
                relation_type: "Implicit".into(),
                split: None,
            },
            TokenizerOptions::default(),
        )
        .unwrap()
    }

    fn inventory() -> SenseInventory {
        SenseInventory::new(vec!["A".into(), "B".into(), "C".into()]).unwrap()
    }

    fn store(dim: usize) -> SentenceVectorStore<f32> {
        let mut s = SentenceVectorStore::new(dim, "fake").unwrap();
        s.insert("r1#arg1", vec![1.0; dim]).unwrap();
        s.insert("r1#arg2", vec![2.0; dim]).unwrap();
        s
    }

    #[test]
    fn argmax_ties_and_order() {
        assert_eq!(argmax(&[0.1, 2.0, -1.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
    }

    #[test]
    fn pretrained_only_input_layout() {
        let plan = InputPlan { bilstm: None, pretrained: Some(3), word_pairs: None };
        let spec = ModelSpec::new(plan, None, 4, None, inventory()).unwrap();
        let model = RelationModel::<f32>::zeros(spec).unwrap();
        let s = store(3);
        let sources = FeatureSources { vectors: Some(&s), ..Default::default() };
        assert_eq!(model.build_input(&instance(), &sources).unwrap(), vec![1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        let logits = model.forward(&instance(), &sources, true, &mut Rng::new(0)).unwrap();
        assert_eq!(logits, vec![0.0; 3]);
        assert_eq!(model.predict(&instance(), &sources).unwrap(), "A");
    }

    #[test]
    fn missing_vector_is_missing_id() {
        let plan = InputPlan { bilstm: None, pretrained: Some(3), word_pairs: None };
        let model = RelationModel::<f32>::zeros(ModelSpec::new(plan, None, 4, None, inventory()).unwrap()).unwrap();
        let mut s = SentenceVectorStore::new(3, "fake").unwrap();
        s.insert("r1#arg1", vec![0.0; 3]).unwrap();
        let sources = FeatureSources { vectors: Some(&s), ..Default::default() };
        assert!(matches!(model.build_input(&instance(), &sources), Err(Error::MissingId(id)) if id == "r1#arg2"));
    }

    #[test]
    fn store_width_drift_is_shape_error() {
        let plan = InputPlan { bilstm: None, pretrained: Some(4), word_pairs: None };
        let model = RelationModel::<f32>::zeros(ModelSpec::new(plan, None, 4, None, inventory()).unwrap()).unwrap();
        let s = store(3);
        let sources = FeatureSources { vectors: Some(&s), ..Default::default() };
        assert!(matches!(model.build_input(&instance(), &sources), Err(Error::Shape { .. })));
    }

    #[test]
    fn combined_layout_and_determinism() {
        let mut rng = Rng::new(3);
        let mut table = EmbeddingTable::<f32>::new(4).unwrap();
        for w in ["the", "firms", "learned", "they", "were", "ready"] {
            let v: Vec<f32> = (0..4).map(|_| rng.uniform(-1.0, 1.0) as f32).collect();
            table.insert(w, &v).unwrap();
        }
        let mut clusters = BrownClusterMap::new();
        clusters.insert("the", "0").unwrap();
        let plan = InputPlan {
            bilstm: Some(BilstmBlock { pooling: Pooling::Concat, hidden_dim: 5 }),
            pretrained: Some(3),
            word_pairs: Some(16),
        };
        let spec = ModelSpec::new(plan, Some(4), 4, Some(8), inventory()).unwrap();
        let model = RelationModel::<f32>::new(spec, &mut rng).unwrap();
        let s = store(3);
        let sources = FeatureSources { embeddings: Some(&table), vectors: Some(&s), clusters: Some(&clusters) };
        let x = model.build_input(&instance(), &sources).unwrap();
        assert_eq!(x.len(), 20 + 6 + 16);
        assert_eq!(&x[20..26], &[1.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
        assert!(x[26..].iter().any(|&v| v == 1.0));

        let a = model.forward(&instance(), &sources, false, &mut Rng::new(1)).unwrap();
        let b = model.forward(&instance(), &sources, false, &mut Rng::new(2)).unwrap();
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|v| v.is_finite()));
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn missing_resource_is_reported() {
        let plan = InputPlan { bilstm: None, pretrained: None, word_pairs: Some(8) };
        let model = RelationModel::<f32>::zeros(ModelSpec::new(plan, None, 2, None, inventory()).unwrap()).unwrap();
        assert!(model.build_input(&instance(), &FeatureSources::default()).is_err());
    }
}
