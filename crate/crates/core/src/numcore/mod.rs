//! Shared numeric kernels. All functions are pure and thread-safe.

mod adam;
mod pca;
mod scaler;
mod softmax;

pub use adam::AdamState;
pub use pca::{pca_fit, pca_transform, PcaModel};
pub use scaler::{apply_scaler, fit_scaler, Scaler};
pub use softmax::{log_softmax, softmax, softmax_jvp, softmax_rows};
