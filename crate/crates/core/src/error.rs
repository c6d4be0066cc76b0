use thiserror::Error;

use crate::gbdt::ValidationReport;
use crate::matrix::{ComplexMatrix, C64};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular matrix: pivot {pivot} has magnitude {magnitude:e}")]
    SingularMatrix { pivot: usize, magnitude: f64 },
    #[error("spectra of A1 and A2 overlap (gap {gap:e}); supply S0 and use ODE propagation")]
    SpectraOverlap { gap: f64 },
    #[error("parameter matrix A is singular")]
    SingularA,
    #[error("spectral parameter λ = 0 is a pole of F")]
    LambdaZero,
    #[error("λ = {lambda} lies on σ(A1) (eigenvalue {eigenvalue})")]
    LambdaOnSpectrum { lambda: C64, eigenvalue: C64 },
    #[error("λ = {lambda} lies on σ(θ) (eigenvalue {eigenvalue})")]
    LambdaOnThetaSpectrum { lambda: C64, eigenvalue: C64 },
    #[error("S(x,t) is singular at (x, t) = ({x}, {t}), indicator {indicator:e}")]
    SingularPoint { x: f64, t: f64, indicator: f64 },
    #[error("S(0,0) is degenerate (det = {det:e})")]
    DegenerateS0 { det: f64 },
    #[error("ODE propagation failed: {0}")]
    OdeStepFailure(String),
    #[error("ODE propagation is not available: {0}")]
    OdeUnsupported(&'static str),
    #[error("limit did not converge: last difference {difference:e}")]
    NotConverged {
        difference: f64,
        iterates: Box<(ComplexMatrix, ComplexMatrix)>,
    },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parameter validation failed:\n{0}")]
    InvalidParameters(Box<ValidationReport>),
    #[error("only {regular} regular grid points survive masking, need at least {required}")]
    GridTooCoarse { regular: usize, required: usize },
    #[error("config error{}: {field}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: Option<usize>, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            field: field.into(),
            message: message.into(),
        }
    }
}
