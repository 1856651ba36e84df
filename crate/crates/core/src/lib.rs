//! Frequency estimation with DMD / Matrix Pencil on Hankel-embedded data, and
//! clustering of many sequences by the frequencies they share.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`signal_model`]: damped-sinusoid ground truth, toy ensemble, lattice images
//! - [`hankel`]: delay-matrix pairs for single series and ensembles
//! - [`dmd`]: truncated-SVD DMD, mode scaling and coefficient recovery
//! - [`matrix_pencil`]: the pencil operator and its equivalence with DMD
//! - [`features`]: per-series features from generalized eigenvectors
//! - [`clustering`]: connectivity-constrained Ward agglomeration
//! - [`imaging`]: per-pixel scan ensembles, pixel graphs and maps
//! - [`io`]: CSV / PGM / JSON formats

pub mod clustering;
pub mod dmd;
pub mod error;
pub mod features;
pub mod hankel;
pub mod imaging;
pub mod io;
pub mod linalg;
pub mod matrix_pencil;
pub mod signal_model;

pub use error::{Error, Result};
pub use num_complex::Complex64 as c64;
