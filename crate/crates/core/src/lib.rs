//! Wedge-local scattering on truncated chiral Fock spaces.
//!
//! The crate builds Borchers triples from two truncated chiral free bosons,
//! extracts asymptotic fields by light-ray time averaging, composes two-wave
//! scattering states into the scattering operator, and applies the
//! warped-convolution deformation whose scattering operator picks up the
//! phase `e^{iκ(H²−P²)}`.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod modular;
pub mod net;
pub mod quadrature;
pub mod warp;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector, C64};
