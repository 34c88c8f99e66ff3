//! Core computations for the greedylab workbench: quasi-norm evaluation on
//! finite-dimensional sequence spaces, biorthogonal basis systems, the
//! thresholding-greedy operator family, and the estimators that turn them
//! into basis parameters (fundamental function, democracy, unconditionality
//! constants, threshold functions, Lebesgue constants) with explicit
//! exact/lower-bound provenance.
//!
//! Everything here is pure `f64` computation over `alloc` collections; the
//! crate builds without `std`. IO, file formats, and the CLI live in the
//! companion `greedylab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod basis;
pub mod error;
pub mod estimate;
pub mod lebesgue;
pub mod linalg;
pub mod lpfit;
pub mod math;
pub mod operators;
pub mod params;
pub mod probe;
pub mod sets;
pub mod space;
pub mod threshold;
pub mod verify;

pub use basis::{make_catalog, Basis, BasisProperty, CatalogEntry};
pub use error::{Error, Result};
pub use estimate::{EstimateValue, Mode, ParamTable, Witness};
pub use space::{rearrange_nonincreasing, NormKind, Space};
