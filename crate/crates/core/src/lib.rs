//! Numerical differential geometry on coordinate charts, oriented at
//! scalar-curvature surgery experiments.
//!
//! The crate is organized in four layers:
//!
//! - **Curvature engine** ([`chart`], [`metric`], [`curvature`],
//!   [`conformal`], [`quotient`], [`models`]): metric fields on
//!   tensor-product grids, finite-difference Christoffel/Riemann/Ricci/scalar
//!   curvature, the conformal transformation law, Laplacians, volume and
//!   Yamabe-quotient quadrature, and builders for model spaces.
//! - **Neck constructions** ([`neck`]): canonical tube metrics with their
//!   curvature-correcting conformal factor, interpolation profiles for
//!   metric gluing, the cylindrical conformal blow-up, the three-step
//!   bending curve with pointwise scalar-curvature certification and
//!   homothetic shrinking, boundary-homotopy metrics, and assembly of the
//!   surgered metric with per-region volume and curvature reports.
//! - **Orbit-space reduction** ([`reduce`], [`averaging`]): cohomogeneity-one
//!   reduction of the invariant Yamabe quotient to a weighted 1D Rayleigh
//!   quotient, its projected-gradient minimizer, and group averaging of test
//!   functions on charts.
//! - **Closed forms** ([`invariants`]): sphere volumes, the round-sphere
//!   Yamabe constant, orbit-counting upper bounds, the disjoint-union
//!   formula, and derivation chains combining them.

pub mod averaging;
pub mod chart;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod field;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod models;
pub mod neck;
pub mod quotient;
pub mod reduce;

pub use chart::{Axis, GridChart};
pub use error::{Error, Result};
pub use field::ScalarField;
pub use metric::MetricField;
