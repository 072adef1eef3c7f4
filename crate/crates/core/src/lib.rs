//! Threshold dynamics for anisotropic curvature flow.
//!
//! The crate evolves planar particles by alternating a convolution with a
//! designed kernel and a thresholding step. Free particles follow weighted
//! mean-curvature flow; particles resting on a flat substrate additionally
//! keep their area and meet the substrate at the anisotropic Young angle.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anisotropy;
pub mod grid;
pub mod harness;
pub mod kernels;
pub mod obstacle;
pub mod par;
pub mod twophase;
