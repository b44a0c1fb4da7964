//! Dense/sparse matrices and the reverse-mode gradient tape.

mod mat;
mod sparse;
mod tape;

pub use mat::{Mat, Scalar};
pub use sparse::CsrMatrix;
pub use tape::{sigmoid_f64, Tape, Tensor, TensorError};

pub(crate) use tape::softmax_row;
