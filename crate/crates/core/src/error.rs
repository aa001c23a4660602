use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: must be {rule}")]
    InvalidParameter {
        name: &'static str,
        rule: &'static str,
        value: f64,
    },

    #[error("signal derivative of order {order} unsupported (max {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("boundary signal incompatible with homogeneous initial data at orders {orders:?}")]
    Compatibility { orders: Vec<usize> },

    #[error("mode index {index} out of range (n = {n})")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("position {x} outside [0, {length}]")]
    PositionOutOfRange { x: f64, length: f64 },

    #[error("derivative order {0} not available (0, 1 or 2)")]
    DerivativeOrder(usize),

    #[error("unknown norm `{0}` (expected L2, H1, H1dual or LaplacianL2)")]
    UnknownSpace(String),

    #[error("domain length must be positive, got {0}")]
    ZeroLength(f64),

    #[error("relaxation time must be positive for the third-order solver, got {0}")]
    NonPositiveTau(f64),

    #[error("singular step matrix at time index {step} (t = {time})")]
    SingularStep { step: usize, time: f64 },

    #[error("third time derivative not recovered for this trajectory")]
    MissingThirdDerivative,

    #[error("trajectory has no absorbing boundary; flux undefined")]
    NoAbsorbingBoundary,

    #[error("nonzero energy {energy} for zero data violates uniqueness")]
    InconsistentAudit { energy: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),
}
