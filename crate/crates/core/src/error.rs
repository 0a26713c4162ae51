use alloc::string::String;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid defining function: {0}")]
    InvalidDefiningFunction(String),

    #[error("point (x={x}, y={y}) is not interior: y - f(x) = {gap:e}")]
    OutsideDomain { x: f64, y: f64, gap: f64 },

    #[error("(zeta1={zeta1}, zeta2={zeta2}) lies outside the dual cone")]
    OutsideCone { zeta1: f64, zeta2: f64 },

    #[error("tail slope estimate did not stabilize: {0}")]
    TailSlopeUnstable(String),

    #[error("mollification infeasible: {0}")]
    MollifyInfeasible(String),

    #[error("quadrature did not converge: relative error {achieved:e} exceeds {requested:e} after {evaluations} evaluations")]
    NonConvergence { achieved: f64, requested: f64, evaluations: usize },

    #[error("integrand does not decay over the integration range")]
    NoDecay,

    #[error("root finding failed: {0}")]
    Root(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),
}

impl Error {
    /// Domain-type failures: bad inputs, points or functions outside the admissible class.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidDefiningFunction(_)
                | Error::OutsideDomain { .. }
                | Error::OutsideCone { .. }
                | Error::MollifyInfeasible(_)
                | Error::InvalidArgument(_)
        )
    }

    /// Numeric failures: non-convergence of an iteration or quadrature.
    pub fn is_numeric(&self) -> bool {
        !self.is_domain()
    }
}

pub type Result<T> = core::result::Result<T, Error>;
