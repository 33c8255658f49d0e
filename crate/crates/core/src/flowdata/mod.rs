//! Flow-dataset ingestion and preprocessing.
//!
//! The pipeline is `load_table` → `preprocess` → `stratified_split`
//! (optionally `stratified_subsample` for expensive methods). Desk-scale
//! experiments can use [`synth_dataset`] instead of real captures.

mod cache;
mod matrix;
mod preprocess;
mod schema;
mod split;
mod synth;
mod table;

pub use cache::{load_cached, save_cached, CacheSidecar};
pub use matrix::FeatureMatrix;
pub use preprocess::{preprocess, PreprocessReport};
pub use schema::{DatasetSchema, SCHEMA_VERSION};
pub use split::{
    stratified_kfold, stratified_split, stratified_split_indices, stratified_subsample,
    stratified_subsample_indices, SplitIndices,
};
pub use synth::{synth_dataset, SynthSpec};
pub use table::{load_table, load_tables, RawTable};
