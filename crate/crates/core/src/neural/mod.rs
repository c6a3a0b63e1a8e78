//! A small fixed-architecture policy/value network written from scratch:
//! forward and backward passes, the combined loss, Adam and checkpoint I/O.

mod adam;
mod checkpoint;
mod network;
mod real;
mod tensor;

use thiserror::Error;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::{peek_precision, Checkpoint, Metadata, FORMAT_VERSION};
pub use network::{
    conv3x3_backward, conv3x3_forward, dense_backward, dense_forward, loss, masked_softmax, Architecture, Batch,
    LossParts, Network, ACTIONS, BOARD, IN_PLANES, INPUT_LEN,
};
pub use real::{Precision, Real};
pub use tensor::Tensor;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch { expected: Vec<usize>, actual: Vec<usize> },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("checkpoint version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checkpoint stores {found:?} parameters, expected {expected:?}")]
    PrecisionMismatch { found: Precision, expected: Precision },
    #[error("corrupt checkpoint: {0}")]
    CorruptFile(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
