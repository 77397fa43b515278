//! PCA dimensionality reduction and LDA classification.

mod lda;
mod linalg;
mod pca;
mod serialize;

pub use lda::{lda_fit, LdaConfig, LdaModel};
pub use linalg::{cholesky, cholesky_solve, dot, jacobi_symmetric, Matrix};
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use serialize::{load_model, read_model, save_model, write_model, TrainedModel};
