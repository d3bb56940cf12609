//! Input assembly, the feedforward sense classifier and model checkpoints.

mod checkpoint;
mod head;
mod model;
mod plan;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, FORMAT_VERSION};
pub use head::{head_widths, FfnHead, HeadTrace};
pub use model::{argmax, FeatureSources, ForwardTrace, ModelSpec, Objective, RelationModel};
pub use plan::{BilstmBlock, InputPlan, ModelKind, ALLOWED_HEAD_LAYERS, DEFAULT_HIDDEN_CAP};
