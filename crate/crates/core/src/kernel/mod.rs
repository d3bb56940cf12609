//! Dense-network primitives with hand-derived gradients.

mod adam;
mod gradcheck;
mod init;
mod loss;
mod ops;
mod params;
mod scalar;
mod tensor;

pub use adam::{adam_step, Adam, AdamConfig, AdamState};
pub use gradcheck::{finite_difference_check, finite_difference_report, GradCheckReport, DEFAULT_RELATIVE_FLOOR};
pub use init::{xavier_bound, xavier_init};
pub use loss::{multiclass_hinge, softmax, softmax_nll};
pub use ops::{affine_backward, affine_forward, dropout, relu, relu_backward, Affine, DropoutMask};
pub use params::Parameterized;
pub use scalar::Scalar;
pub use tensor::Tensor;
