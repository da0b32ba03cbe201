use thiserror::Error;

use crate::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial degree {degree} exceeds the limit {limit}")]
    DegreeLimit { degree: usize, limit: usize },

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),

    #[error("cutoff must be at least {min}, got {got}")]
    InvalidCutoff { min: usize, got: usize },

    #[error("invalid ladder table: {0}")]
    InvalidLadder(String),

    #[error("non-unitary ladder: s[{level}] = {value} is negative")]
    NonUnitary { level: usize, value: Rational },

    #[error("module cannot be extended beyond its table of {len} levels")]
    NotExtendable { len: usize },

    #[error("no canonical conjugate on finite module: ladder vanishes at level {level}")]
    PoleOnSpectrum { level: usize },

    #[error("tail bound {bound:e} not met within maximal cutoff {max_cutoff}")]
    CutoffExceeded { max_cutoff: usize, bound: f64 },

    #[error("states live on different modules")]
    ModuleMismatch,

    #[error("ladder products are not a Gamma ratio: {0}")]
    NotGammaForm(String),

    #[error("{0}")]
    Domain(String),

    #[error("non-positive integer lower parameter b = {0} in hypergeometric series")]
    BParameterPole(f64),

    #[error("series with p = {p} > q = {q} is not entire")]
    NotEntire { p: usize, q: usize },

    #[error("log-gamma pole at non-positive integer {0}")]
    PoleAtNonpositiveInteger(f64),

    #[error("quadrature not converged: last two estimates {prev:e} and {last:e}")]
    QuadratureNotConverged { prev: f64, last: f64 },

    #[error("series not converged after {terms} terms")]
    SeriesNotConverged { terms: usize },

    #[error("measure has vanishing zeroth moment")]
    DegenerateMeasure,

    #[error("empty sector")]
    EmptySector,

    #[error("commutator [N+, N-] has off-diagonal entry at ({row}, {col})")]
    NotDiagonal { row: usize, col: usize },

    #[error("no polynomial fit: {0}")]
    NoPolynomialFit(String),

    #[error("generator is not a monomial action at basis state {0}")]
    NotMonomial(usize),

    #[error("N+ orbit leaves the cutoff after {len} levels, {wanted} requested")]
    OrbitLeavesCutoff { len: usize, wanted: usize },

    #[error("basis state {0} is not annihilated by N-")]
    NotAVacuum(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
