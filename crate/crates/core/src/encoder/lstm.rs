//! LSTM cell and stacked single-direction recurrence with backpropagation through time.

use crate::error::{Error, Result};
use crate::kernel::{Affine, Scalar};
use crate::rng::Rng;

/// Gate order inside [`LstmCell::gates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Candidate = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Candidate, Gate::Output];

    pub fn name(self) -> &'static str {
        match self {
            Gate::Input => "input",
            Gate::Forget => "forget",
            Gate::Candidate => "candidate",
            Gate::Output => "output",
        }
    }
}

/// One LSTM cell. Each gate is an affine map `hidden × (input + hidden)` over `[x_t ; h_{t-1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmCell<T> {
    input_dim: usize,
    hidden_dim: usize,
    pub gates: [Affine<T>; 4],
}

/// Values cached by a forward step for the matching backward step.
#[derive(Debug, Clone)]
pub struct CellTrace<T> {
    xh: Vec<T>,
    c_prev: Vec<T>,
    i: Vec<T>,
    f: Vec<T>,
    g: Vec<T>,
    o: Vec<T>,
    c: Vec<T>,
    tanh_c: Vec<T>,
}

impl<T> CellTrace<T> {
    pub fn cell_state(&self) -> &[T] {
        &self.c
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

impl<T: Scalar> LstmCell<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Result<Self> {
        let gate = || Affine::zeros(input_dim + hidden_dim, hidden_dim);
        Ok(Self {
            input_dim,
            hidden_dim,
            gates: [gate()?, gate()?, gate()?, gate()?],
        })
    }

    /// Xavier-initialized weights, zero biases except the forget gate, which starts at `forget_bias`.
    pub fn xavier(input_dim: usize, hidden_dim: usize, forget_bias: f64, rng: &mut Rng) -> Result<Self> {
        let fan_in = input_dim + hidden_dim;
        let mut gates = [
            Affine::xavier(fan_in, hidden_dim, rng)?,
            Affine::xavier(fan_in, hidden_dim, rng)?,
            Affine::xavier(fan_in, hidden_dim, rng)?,
            Affine::xavier(fan_in, hidden_dim, rng)?,
        ];
        gates[Gate::Forget as usize]
            .bias
            .values_mut()
            .iter_mut()
            .for_each(|b| *b = T::from_real(forget_bias));
        Ok(Self {
            input_dim,
            hidden_dim,
            gates,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden_dim(&self) -> usize {
        self.hidden_dim
    }

    pub fn gate(&self, gate: Gate) -> &Affine<T> {
        &self.gates[gate as usize]
    }

    pub fn gate_mut(&mut self, gate: Gate) -> &mut Affine<T> {
        &mut self.gates[gate as usize]
    }

    fn check(&self, x: &[T], h_prev: &[T], c_prev: &[T]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::shape("lstm input", &[self.input_dim], &[x.len()]));
        }
        if h_prev.len() != self.hidden_dim || c_prev.len() != self.hidden_dim {
            return Err(Error::shape(
                "lstm state",
                &[self.hidden_dim],
                &[h_prev.len(), c_prev.len()],
            ));
        }
        Ok(())
    }

    /// `c_t = f ⊙ c_{t-1} + i ⊙ g`, `h_t = o ⊙ tanh(c_t)`.
    pub fn forward(&self, x: &[T], h_prev: &[T], c_prev: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        let (h, trace) = self.forward_traced(x, h_prev, c_prev)?;
        Ok((h, trace.c))
    }

    pub fn forward_traced(&self, x: &[T], h_prev: &[T], c_prev: &[T]) -> Result<(Vec<T>, CellTrace<T>)> {
        self.check(x, h_prev, c_prev)?;
        let mut xh = Vec::with_capacity(self.input_dim + self.hidden_dim);
        xh.extend_from_slice(x);
        xh.extend_from_slice(h_prev);

        let i: Vec<T> = self.gates[0].forward(&xh)?.into_iter().map(sigmoid).collect();
        let f: Vec<T> = self.gates[1].forward(&xh)?.into_iter().map(sigmoid).collect();
        let g: Vec<T> = self.gates[2].forward(&xh)?.into_iter().map(T::tanh).collect();
        let o: Vec<T> = self.gates[3].forward(&xh)?.into_iter().map(sigmoid).collect();

        let c: Vec<T> = (0..self.hidden_dim)
            .map(|k| f[k] * c_prev[k] + i[k] * g[k])
            .collect();
        let tanh_c: Vec<T> = c.iter().map(|v| v.tanh()).collect();
        let h = o.iter().zip(&tanh_c).map(|(&o, &t)| o * t).collect();
        Ok((
            h,
            CellTrace {
                xh,
                c_prev: c_prev.to_vec(),
                i,
                f,
                g,
                o,
                c,
                tanh_c,
            },
        ))
    }

    /// Given `∂L/∂h_t` and `∂L/∂c_t` (from the following step), accumulates gate gradients
    /// and returns `(∂L/∂x_t, ∂L/∂h_{t-1}, ∂L/∂c_{t-1})`.
    pub fn backward(&mut self, trace: &CellTrace<T>, dh: &[T], dc_next: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let n = self.hidden_dim;
        let one = T::one();
        let mut dz = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
        let mut dc_prev = vec![T::zero(); n];
        for k in 0..n {
            let (i, f, g, o, t) = (trace.i[k], trace.f[k], trace.g[k], trace.o[k], trace.tanh_c[k]);
            let dc = dc_next[k] + dh[k] * o * (one - t * t);
            dz[0][k] = dc * g * i * (one - i);
            dz[1][k] = dc * trace.c_prev[k] * f * (one - f);
            dz[2][k] = dc * i * (one - g * g);
            dz[3][k] = dh[k] * t * o * (one - o);
            dc_prev[k] = dc * f;
        }
        let mut dxh = vec![T::zero(); self.input_dim + n];
        for (gate, d) in self.gates.iter_mut().zip(&dz) {
            let part = gate.backward(&trace.xh, d);
            for (a, b) in dxh.iter_mut().zip(part) {
                *a = *a + b;
            }
        }
        let dh_prev = dxh.split_off(self.input_dim);
        (dxh, dh_prev, dc_prev)
    }
}

/// Forward pass of one direction through a stack of cells.
#[derive(Debug, Clone)]
pub struct StackTrace<T> {
    /// `layers[l][t]` is the trace of layer `l` at processing step `t`.
    layers: Vec<Vec<CellTrace<T>>>,
    /// Top-layer hidden states in processing order.
    pub outputs: Vec<Vec<T>>,
}

/// Runs a stacked LSTM over `inputs` in the given order. Layer `l+1` reads layer `l`'s hidden states.
pub fn run_stack<T: Scalar>(cells: &[LstmCell<T>], inputs: &[Vec<T>]) -> Result<StackTrace<T>> {
    let mut layers = Vec::with_capacity(cells.len());
    let mut current: Vec<Vec<T>> = inputs.to_vec();
    for cell in cells {
        let n = cell.hidden_dim();
        let mut h = vec![T::zero(); n];
        let mut c = vec![T::zero(); n];
        let mut traces = Vec::with_capacity(current.len());
        let mut outs = Vec::with_capacity(current.len());
        for x in &current {
            let (h_next, trace) = cell.forward_traced(x, &h, &c)?;
            c.clone_from(&trace.c);
            h.clone_from(&h_next);
            outs.push(h_next);
            traces.push(trace);
        }
        layers.push(traces);
        current = outs;
    }
    Ok(StackTrace {
        layers,
        outputs: current,
    })
}

/// Inference-only stacked run that keeps no traces.
pub fn run_stack_outputs<T: Scalar>(cells: &[LstmCell<T>], inputs: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let mut current: Vec<Vec<T>> = inputs.to_vec();
    for cell in cells {
        let n = cell.hidden_dim();
        let mut h = vec![T::zero(); n];
        let mut c = vec![T::zero(); n];
        let mut outs = Vec::with_capacity(current.len());
        for x in &current {
            let (h_next, c_next) = cell.forward(x, &h, &c)?;
            h = h_next;
            c = c_next;
            outs.push(h.clone());
        }
        current = outs;
    }
    Ok(current)
}

/// Backpropagation through time. `d_outputs[t]` is `∂L/∂(top output at step t)`; returns
/// `∂L/∂(input at step t)`.
pub fn backward_stack<T: Scalar>(
    cells: &mut [LstmCell<T>],
    trace: &StackTrace<T>,
    d_outputs: Vec<Vec<T>>,
) -> Vec<Vec<T>> {
    let mut upstream = d_outputs;
    for (cell, traces) in cells.iter_mut().zip(&trace.layers).rev() {
        let n = cell.hidden_dim();
        let mut dh_next = vec![T::zero(); n];
        let mut dc_next = vec![T::zero(); n];
        let mut d_inputs = vec![Vec::new(); traces.len()];
        for t in (0..traces.len()).rev() {
            let dh: Vec<T> = upstream[t].iter().zip(&dh_next).map(|(&a, &b)| a + b).collect();
            let (dx, dh_prev, dc_prev) = cell.backward(&traces[t], &dh, &dc_next);
            d_inputs[t] = dx;
            dh_next = dh_prev;
            dc_next = dc_prev;
        }
        upstream = d_inputs;
    }
    upstream
}
