//! Ensemble learning toolkit and benchmark harness for network intrusion
//! detection.
//!
//! The crate is organised as a pipeline:
//!
//! * [`flowdata`] loads flow-record CSV files, cleans them and produces a
//!   [`flowdata::FeatureMatrix`], and provides stratified splitting plus a
//!   synthetic generator for desk-scale experiments.
//! * [`numcore`] holds the shared numeric kernels (standardisation, PCA,
//!   softmax, Adam).
//! * [`learners`] implements the four base classifiers (CART decision tree,
//!   multinomial logistic regression, k-nearest neighbours, MLP).
//! * [`ensembles`] implements voting/averaging, bagging, random forests,
//!   AdaBoost (SAMME), multiclass gradient boosting, stacking and blending.
//! * [`metrics`] computes confusion matrices, precision/recall/F1 reports,
//!   timings and F1-ranked tables.
//! * [`bench`] drives whole experiments from a TOML config and writes report
//!   bundles.
//!
//! Every trained classifier is a [`Model`] and implements [`Classifier`].

pub mod bench;
pub mod ensembles;
mod error;
pub mod flowdata;
pub mod learners;
pub mod metrics;
mod model;
pub mod numcore;
pub mod seed;

pub use error::{Error, Result};
pub use model::{argmax_lowest, Classifier, Model, ModelEnvelope, MODEL_FORMAT_VERSION};
