//! Bidirectional stacked LSTM sentence encoder.
//!
//! Each direction is its own stack: layer 2 of the forward direction reads layer 1 of the
//! forward direction, and likewise backward. With top-layer states `→h_t` and `←h_t`:
//!
//! * `Concat`: `h_s = [→h_T ; ←h_1]`
//! * `Max` / `Mean`: `h_t = [→h_t ; ←h_t]`, reduced elementwise over `t = 1…T`

use serde::{Deserialize, Serialize};

use crate::encoder::lstm::{backward_stack, run_stack, run_stack_outputs, LstmCell, StackTrace};
use crate::encoder::EmbeddingTable;
use crate::error::{Error, Result};
use crate::kernel::{Parameterized, Scalar, Tensor};
use crate::rng::Rng;
use crate::tokens::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    Concat,
    Max,
    Mean,
}

impl Pooling {
    pub fn provenance(self) -> Provenance {
        match self {
            Pooling::Concat => Provenance::BilstmConcat,
            Pooling::Max => Provenance::BilstmMax,
            Pooling::Mean => Provenance::BilstmMean,
        }
    }
}

impl std::str::FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "concat" => Ok(Pooling::Concat),
            "max" => Ok(Pooling::Max),
            "mean" => Ok(Pooling::Mean),
            other => Err(Error::invalid(format!("unknown pooling mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    BilstmConcat,
    BilstmMax,
    BilstmMean,
    Pretrained,
    Combined,
}

/// Fixed-size sentence vector produced by any encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRepresentation<T> {
    pub values: Vec<T>,
    pub provenance: Provenance,
}

impl<T> SentenceRepresentation<T> {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// Reduces per-timestep vectors elementwise. Returns the pooled vector and, for max
/// pooling, the winning timestep per coordinate (first on ties).
pub fn pool_states<T: Scalar>(states: &[Vec<T>], mode: Pooling) -> Result<(Vec<T>, Option<Vec<usize>>)> {
    let first = states
        .first()
        .ok_or_else(|| Error::invalid("cannot pool an empty sequence of states"))?;
    let dim = first.len();
    if let Some(bad) = states.iter().find(|s| s.len() != dim) {
        return Err(Error::shape("pooled states", &[dim], &[bad.len()]));
    }
    match mode {
        Pooling::Max => {
            let mut out = first.clone();
            let mut arg = vec![0; dim];
            for (t, s) in states.iter().enumerate().skip(1) {
                for k in 0..dim {
                    if s[k] > out[k] {
                        out[k] = s[k];
                        arg[k] = t;
                    }
                }
            }
            Ok((out, Some(arg)))
        }
        Pooling::Mean => {
            let mut out = vec![T::zero(); dim];
            for s in states {
                for (o, &v) in out.iter_mut().zip(s) {
                    *o = *o + v;
                }
            }
            let n = T::from_real(states.len() as f64);
            out.iter_mut().for_each(|o| *o = *o / n);
            Ok((out, None))
        }
        Pooling::Concat => Err(Error::invalid("concat is not a pooling reduction")),
    }
}

/// Parameters of both directions of a stacked LSTM.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams<T> {
    pub forward: Vec<LstmCell<T>>,
    pub backward: Vec<LstmCell<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl<T: Scalar> LstmParams<T> {
    pub fn xavier(input_dim: usize, hidden_dim: usize, layers: usize, forget_bias: f64, rng: &mut Rng) -> Result<Self> {
        if layers == 0 || input_dim == 0 || hidden_dim == 0 {
            return Err(Error::invalid("LSTM needs positive input, hidden and layer counts"));
        }
        let stack = |rng: &mut Rng| -> Result<Vec<LstmCell<T>>> {
            (0..layers)
                .map(|l| {
                    let input = if l == 0 { input_dim } else { hidden_dim };
                    LstmCell::xavier(input, hidden_dim, forget_bias, rng)
                })
                .collect()
        };
        let forward = stack(rng)?;
        let backward = stack(rng)?;
        Ok(Self { forward, backward })
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, layers: usize) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("LSTM needs at least one layer"));
        }
        let stack = || -> Result<Vec<LstmCell<T>>> {
            (0..layers)
                .map(|l| LstmCell::zeros(if l == 0 { input_dim } else { hidden_dim }, hidden_dim))
                .collect()
        };
        Ok(Self {
            forward: stack()?,
            backward: stack()?,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.forward[0].input_dim()
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward[0].hidden_dim()
    }

    pub fn layers(&self) -> usize {
        self.forward.len()
    }

    pub fn cell(&self, direction: Direction, layer: usize) -> Option<&LstmCell<T>> {
        match direction {
            Direction::Forward => self.forward.get(layer),
            Direction::Backward => self.backward.get(layer),
        }
    }

    /// Copies the forward-direction weights into the backward direction.
    pub fn tie_directions(&mut self) {
        self.backward = self.forward.clone();
    }
}

/// One step of the selected cell.
pub fn lstm_cell<T: Scalar>(
    x: &[T],
    h_prev: &[T],
    c_prev: &[T],
    params: &LstmParams<T>,
    direction: Direction,
    layer: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    let cell = params
        .cell(direction, layer)
        .ok_or_else(|| Error::invalid(format!("no LSTM layer {layer} in a {}-layer stack", params.layers())))?;
    cell.forward(x, h_prev, c_prev)
}

/// Cached forward pass of [`BiLstmEncoder::encode_traced`].
#[derive(Debug, Clone)]
pub struct EncoderTrace<T> {
    forward: StackTrace<T>,
    backward: StackTrace<T>,
    argmax: Option<Vec<usize>>,
}

/// Bidirectional stacked LSTM plus pooling mode. Word embeddings are supplied by the caller
/// and are not trained.
#[derive(Debug, Clone, PartialEq)]
pub struct BiLstmEncoder<T> {
    pub params: LstmParams<T>,
    pub pooling: Pooling,
}

impl<T: Scalar> BiLstmEncoder<T> {
    pub fn new(params: LstmParams<T>, pooling: Pooling) -> Self {
        Self { params, pooling }
    }

    pub fn hidden_dim(&self) -> usize {
        self.params.hidden_dim()
    }

    /// `2 × hidden_dim` for every pooling mode.
    pub fn output_dim(&self) -> usize {
        2 * self.params.hidden_dim()
    }

    fn inputs(&self, seq: &TokenSequence, table: &EmbeddingTable<T>) -> Result<Vec<Vec<T>>> {
        if table.dimension() != self.params.input_dim() {
            return Err(Error::shape(
                "embedding dimension vs LSTM input",
                &[table.dimension()],
                &[self.params.input_dim()],
            ));
        }
        table.embed_tokens(seq)
    }

    fn reduce(&self, fwd: &[Vec<T>], bwd: &[Vec<T>]) -> Result<(Vec<T>, Option<Vec<usize>>)> {
        let t = fwd.len();
        match self.pooling {
            Pooling::Concat => {
                // Backward processing order ends at position 1.
                let mut out = fwd[t - 1].clone();
                out.extend_from_slice(&bwd[t - 1]);
                Ok((out, None))
            }
            mode => {
                let states: Vec<Vec<T>> = (0..t)
                    .map(|p| {
                        let mut h = fwd[p].clone();
                        h.extend_from_slice(&bwd[t - 1 - p]);
                        h
                    })
                    .collect();
                pool_states(&states, mode)
            }
        }
    }

    /// Encodes one argument with the configured pooling.
    pub fn encode(&self, seq: &TokenSequence, table: &EmbeddingTable<T>) -> Result<SentenceRepresentation<T>> {
        let inputs = self.inputs(seq, table)?;
        let fwd = run_stack_outputs(&self.params.forward, &inputs)?;
        let reversed: Vec<Vec<T>> = inputs.into_iter().rev().collect();
        let bwd = run_stack_outputs(&self.params.backward, &reversed)?;
        let (values, _) = self.reduce(&fwd, &bwd)?;
        Ok(SentenceRepresentation {
            values,
            provenance: self.pooling.provenance(),
        })
    }

    /// `[→h_T ; ←h_1]` regardless of the configured pooling.
    pub fn encode_concat(&self, seq: &TokenSequence, table: &EmbeddingTable<T>) -> Result<SentenceRepresentation<T>> {
        self.with_pooling(Pooling::Concat).encode(seq, table)
    }

    /// Max- or mean-pooled `[→h_t ; ←h_t]` regardless of the configured pooling.
    pub fn encode_pooled(
        &self,
        seq: &TokenSequence,
        table: &EmbeddingTable<T>,
        mode: Pooling,
    ) -> Result<SentenceRepresentation<T>> {
        if mode == Pooling::Concat {
            return Err(Error::invalid("encode_pooled takes max or mean"));
        }
        self.with_pooling(mode).encode(seq, table)
    }

    fn with_pooling(&self, pooling: Pooling) -> BiLstmEncoder<T> {
        // Cheap relative to a forward pass at the sizes involved.
        Self {
            params: self.params.clone(),
            pooling,
        }
    }

    /// Per-position states `[→h_t ; ←h_t]` of the top layer.
    pub fn timestep_states(&self, seq: &TokenSequence, table: &EmbeddingTable<T>) -> Result<Vec<Vec<T>>> {
        let inputs = self.inputs(seq, table)?;
        let fwd = run_stack_outputs(&self.params.forward, &inputs)?;
        let reversed: Vec<Vec<T>> = inputs.into_iter().rev().collect();
        let bwd = run_stack_outputs(&self.params.backward, &reversed)?;
        let t = fwd.len();
        Ok((0..t)
            .map(|p| {
                let mut h = fwd[p].clone();
                h.extend_from_slice(&bwd[t - 1 - p]);
                h
            })
            .collect())
    }

    pub fn encode_traced(
        &self,
        seq: &TokenSequence,
        table: &EmbeddingTable<T>,
    ) -> Result<(SentenceRepresentation<T>, EncoderTrace<T>)> {
        let inputs = self.inputs(seq, table)?;
        let forward = run_stack(&self.params.forward, &inputs)?;
        let reversed: Vec<Vec<T>> = inputs.into_iter().rev().collect();
        let backward = run_stack(&self.params.backward, &reversed)?;
        let (values, argmax) = self.reduce(&forward.outputs, &backward.outputs)?;
        Ok((
            SentenceRepresentation {
                values,
                provenance: self.pooling.provenance(),
            },
            EncoderTrace {
                forward,
                backward,
                argmax,
            },
        ))
    }

    /// Accumulates parameter gradients given `∂L/∂h_s`.
    pub fn backward(&mut self, trace: &EncoderTrace<T>, d_rep: &[T]) {
        let h = self.hidden_dim();
        let t = trace.forward.outputs.len();
        assert_eq!(d_rep.len(), 2 * h, "representation gradient length");
        let mut d_fwd = vec![vec![T::zero(); h]; t];
        let mut d_bwd = vec![vec![T::zero(); h]; t];
        match self.pooling {
            Pooling::Concat => {
                d_fwd[t - 1].copy_from_slice(&d_rep[..h]);
                d_bwd[t - 1].copy_from_slice(&d_rep[h..]);
            }
            Pooling::Max => {
                let arg = trace.argmax.as_ref().expect("max pooling trace keeps argmax");
                for (k, &p) in arg.iter().enumerate() {
                    if k < h {
                        d_fwd[p][k] = d_fwd[p][k] + d_rep[k];
                    } else {
                        d_bwd[t - 1 - p][k - h] = d_bwd[t - 1 - p][k - h] + d_rep[k];
                    }
                }
            }
            Pooling::Mean => {
                let n = T::from_real(t as f64);
                for p in 0..t {
                    for k in 0..h {
                        d_fwd[p][k] = d_rep[k] / n;
                        d_bwd[p][k] = d_rep[h + k] / n;
                    }
                }
            }
        }
        backward_stack(&mut self.params.forward, &trace.forward, d_fwd);
        backward_stack(&mut self.params.backward, &trace.backward, d_bwd);
    }
}

impl<T: Scalar> Parameterized<T> for BiLstmEncoder<T> {
    fn visit_params(&self, f: &mut dyn FnMut(&str, &Tensor<T>)) {
        for (dir, cells) in [("fwd", &self.params.forward), ("bwd", &self.params.backward)] {
            for (l, cell) in cells.iter().enumerate() {
                for (gate, affine) in super::Gate::ALL.iter().zip(&cell.gates) {
                    f(&format!("encoder.{dir}.l{l}.{}.weight", gate.name()), &affine.weight);
                    f(&format!("encoder.{dir}.l{l}.{}.bias", gate.name()), &affine.bias);
                }
            }
        }
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor<T>)) {
        for (dir, cells) in [("fwd", &mut self.params.forward), ("bwd", &mut self.params.backward)] {
            for (l, cell) in cells.iter_mut().enumerate() {
                for (gate, affine) in super::Gate::ALL.iter().zip(cell.gates.iter_mut()) {
                    f(&format!("encoder.{dir}.l{l}.{}.weight", gate.name()), &mut affine.weight);
                    f(&format!("encoder.{dir}.l{l}.{}.bias", gate.name()), &mut affine.bias);
                }
            }
        }
    }
}
