//! Lesion-response radiomics toolkit.
//!
//! End-to-end pipeline for predicting lung lesion shrinkage from
//! two-timepoint CT: dual-ROI radiomic features (shape, first-order,
//! five texture-matrix families), quantitative vessel tortuosity (QVT)
//! and box-counting fractal features, RECIST shrinkage labeling, and
//! deterministic random-forest / gradient-boosting classifiers with
//! patient-stratified cross-validation.
//!
//! Everything is validated against synthetic phantoms with analytic
//! ground truth (see [`phantom`]).

pub mod features;
pub(crate) mod linalg;
pub mod ml;
pub mod phantom;
pub mod pipeline;
pub mod roi;
pub mod stats;
pub mod vessel;
pub mod volume;

pub use volume::{BinaryMask, ScalarVolume};
