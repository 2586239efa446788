//! Spectra of a charged particle confined to a ring, cylinder or sphere,
//! including the curvature-induced geometric potential, magnetic fields,
//! spin, and the thin-shell limit it arises from.

pub mod analysis;
pub mod discretize;
mod eigen;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod hamiltonians;
pub mod radial;
pub mod thinlayer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
