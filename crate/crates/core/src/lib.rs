//! Numerical laboratory for weighted L¹ and Lᵖ Hardy inequalities with
//! distance-to-boundary weights.
//!
//! The catalogue domains (ball, slab, punctured space, punctured ball,
//! annulus) all reduce to one-dimensional integrals through the co-area
//! formula. Test functions are kept as exact BV objects, so quotients are
//! evaluated either in closed form or by singularity-aware quadrature.
//!
//! ```
//! use hardylab::{geometry::{make_domain, DomainSpec}, profiles, functionals};
//!
//! let space = make_domain(DomainSpec::punctured_space(3)).unwrap();
//! let u = profiles::annulus_indicator(0.1, 1.0).unwrap().into();
//! let q = functionals::ratio_plain(&space, &u, 4.0).unwrap();
//! assert!((q - 11.0 / 9.0).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style guards are kept because they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod checks;
pub mod cli;
pub mod constants;
pub mod error;
pub mod fd;
pub mod functionals;
pub mod geometry;
pub mod profiles;
pub mod quadrature;

pub use error::{HardyError, Result};
pub use geometry::{make_domain, Domain, DomainSpec};
pub use quadrature::QuadResult;
