use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid must be strictly increasing with nonnegative nodes")]
    InvalidGrid,
    #[error("grid too coarse: need at least {need} nodes, got {got}")]
    TooCoarse { need: usize, got: usize },
    #[error("invalid parameter `{name}`: {why}")]
    Param { name: &'static str, why: String },
    #[error("radius {r} outside covered range [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("invalid bisection bracket [{lo}, {hi}]: lower end must grow, upper end must not")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("integrator step-size underflow at r = {r}")]
    StepFailure { r: f64 },
    #[error("trajectory is not quadratic-type (asymptotic slope undefined)")]
    NotQuadratic,
    #[error("kernel evaluation at r = s = 0 is singular")]
    SingularKernel,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(name: &'static str, why: impl Into<String>) -> Self {
        Error::Param { name, why: why.into() }
    }
}
