//! Dissimilarity-based clustering of mixed-type performance records with
//! calibrated, user-weighted composite validity indexes.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix the common double-precision case.

// Guards of the form `!(x > 0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cluster;
pub mod dissim;
pub mod error;
pub mod features;
pub mod indexes;
pub mod linalg;
pub mod mds;
pub mod pipeline;
pub mod scalar;
pub mod seed;
pub mod survey;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DissimilarityMatrix64 = dissim::DissimilarityMatrix<f64>;
pub type FeatureTable64 = features::FeatureTable<f64>;
