//! Word-embedding lookup and the bidirectional LSTM sentence encoder.

mod bilstm;
mod embedding;
mod lstm;

pub use bilstm::{
    lstm_cell, pool_states, BiLstmEncoder, Direction, EncoderTrace, LstmParams, Pooling, Provenance,
    SentenceRepresentation,
};
pub use embedding::EmbeddingTable;
pub use lstm::{backward_stack, run_stack, CellTrace, Gate, LstmCell, StackTrace};
