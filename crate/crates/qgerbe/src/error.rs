use thiserror::Error;

/// Errors surfaced by the algebraic and combinatorial layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero quaternion is not invertible")]
    ZeroQuaternion,

    #[error("matrix is not in the conformal group (residual {residual:.3e} > tol {tol:.3e}, det {det:.3e})")]
    NotConformal { residual: f64, tol: f64, det: f64 },

    #[error("conformal factorization did not converge (residual {residual:.3e} > tol {tol:.3e})")]
    FactorizationUnstable { residual: f64, tol: f64 },

    #[error("morphisms are not composable: target of first differs from source of second by {residual:.3e}")]
    NonComposable { residual: f64 },

    #[error("bimodule actions are degenerate: commutant kernel has dimension {nullity}, expected 1")]
    DegenerateBimodule { nullity: usize },

    #[error("invalid bimodule actions: {0}")]
    InvalidBimodule(String),

    #[error("malformed cover: {0}")]
    MalformedCover(String),

    #[error("overlap {from:?} is not a face of {to:?}")]
    NotAFace { from: String, to: String },

    #[error("missing field on overlap {0}")]
    MissingField(String),

    #[error("cocycles are defined over different nerves")]
    NerveMismatch,

    #[error("transition map hit a pole of an inversion step at |x| = {0:.3e}")]
    PoleHit(f64),

    #[error("finite-difference step underflows at |x| = {0:.3e}")]
    StepTooSmall(f64),

    #[error("no continuous factor alignment found on overlap ({i},{j})")]
    GaugeInconsistency { i: usize, j: usize },

    #[error("unknown atlas `{0}`")]
    UnknownAtlas(String),

    #[error("linear map step is not invertible")]
    SingularStep,
}

pub type Result<T> = std::result::Result<T, Error>;
