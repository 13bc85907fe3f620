//! Geometric constructions for scalar-curvature surgery: tube metrics and
//! their conformal correction, radial interpolation profiles and cutoffs,
//! the cylindrical blow-up, the certified bending curve, boundary homotopy
//! metrics, and assembly of the surgered metric.

pub mod assembly;
pub mod bend;
pub mod blowup;
pub mod glue;
pub mod homotopy;
pub mod profiles;
pub mod tube;
