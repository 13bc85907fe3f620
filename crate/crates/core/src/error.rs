use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("invalid model spec: {0}")]
    InvalidModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("metric not symmetric at flat index {index} (relative asymmetry {asymmetry:.3e})")]
    NonSymmetricMetric { index: usize, asymmetry: f64 },

    #[error("singular metric at point {point:?} (flat index {index})")]
    SingularMetric { index: usize, point: Vec<f64> },

    #[error("metric not positive definite at point {point:?} (smallest eigenvalue {eigenvalue:.3e})")]
    NotPositiveDefinite { point: Vec<f64>, eigenvalue: f64 },

    #[error("test function is degenerate (zero p-norm)")]
    DegenerateTestFunction,

    #[error("tube radius {requested} too large; positive definiteness holds up to radius {max_admissible:.6e}")]
    TubeRadius { requested: f64, max_admissible: f64 },

    #[error("correction factor non-positive inside tube; shrink tube radius below {max_admissible:.6e}")]
    ShrinkTube { max_admissible: f64 },

    #[error("metrics do not agree to first order on the submanifold: {0}")]
    IncompatibleJet(String),

    #[error("profile construction failed: {0}")]
    ProfileConstruction(String),

    #[error("radial cutoff infeasible: r2 = {r2:.6e} must be below {max_admissible:.6e} (strict slack required)")]
    EtaInfeasible { r2: f64, max_admissible: f64 },

    #[error("bend construction failed: {0}")]
    BendConstruction(String),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("homotopy perturbation breaks positive definiteness at point {point:?}")]
    InvalidPerturbation { point: Vec<f64> },

    #[error("assembly interface mismatch at {interface}: relative error {error:.3e} exceeds tolerance {tolerance:.3e}")]
    AssemblyMismatch { interface: String, error: f64, tolerance: f64 },

    #[error("orbit reduction inconsistent with full-chart curvature: sup deviation {deviation:.3e} exceeds {tolerance:.3e}")]
    ReductionMismatch { deviation: f64, tolerance: f64 },

    #[error("group action element {element} is not an isometry (metric pullback mismatch {mismatch:.3e})")]
    InvalidAction { element: usize, mismatch: f64 },

    #[error("minimization did not converge within {iterations} iterations (last quotient {last:.12e})")]
    NonConvergence { iterations: usize, last: f64, history: Vec<f64> },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(#[from] serde_json::Error),
}
