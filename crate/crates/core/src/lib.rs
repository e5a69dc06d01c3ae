//! Random walks on the affine groups F_p^d ⋊ SL_d(F_p).

// `!(x >= 0.0)` is the NaN-rejecting form used throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod bg;
pub mod decay;
pub mod error;
pub mod fourier;
pub mod group;
pub mod growth;
pub mod measures;
pub mod sampling;
pub mod spectral;

pub use error::{Error, Result};
pub use group::{AffineElement, AffineGroup, ElementSet, FpScalar, FpVector, GroupIndex, SlMatrix};
pub use measures::{GroupMeasure, VectorMeasure};
pub use spectral::{Representation, SpectralReport, WalkOperator};
