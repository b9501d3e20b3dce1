//! Neutrosophic clustering: density-based indeterminacy, main clusters plus a noise cluster,
//! and boundary/outlier labeling, with an FCM baseline and grayscale image segmentation.

// negated comparisons also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod dataset;
pub mod error;
pub mod export;
pub mod fcm;
pub mod imaging;
pub mod indeterminacy;
pub mod metrics;
pub mod pgm;
pub mod pipeline;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
