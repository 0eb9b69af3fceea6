use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("y_n has a pole at z = 0")]
    Pole,

    #[error("asymptotic form used outside its domain: {0}")]
    Domain(String),

    #[error("vanishing boundary-matching denominator for n = {n}, l = {l} at k0 R1 = {z}")]
    Resonance { n: usize, l: u8, z: f64 },

    #[error("medium is lossless; use the lossless branch")]
    LosslessBranchRequired,

    #[error("lossless branch called with tan_delta = {0}")]
    WrongBranch(f64),

    #[error("numerical inconsistency: {0}")]
    Numerical(String),

    #[error("Q bound {q_bar} is infeasible; the minimum achievable Q_J is {q_min}")]
    Infeasible { q_bar: f64, q_min: f64 },

    #[error("pattern has no half-gain crossing on this cut")]
    UnboundedBeam,

    #[error("degree-of-freedom count inconclusive: efficiency still above threshold at n_cap = {0}")]
    Inconclusive(usize),

    #[error("sampling too coarse: K = {k} is below alpha N^2 = {bound}")]
    ApproximationInvalid { k: usize, bound: f64 },

    #[error("point r = {r} lies outside the sphere of radius {r1}")]
    OutOfDomain { r: f64, r1: f64 },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
