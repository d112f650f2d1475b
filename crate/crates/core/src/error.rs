use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("point sits on the pole of the map")]
    PoleHit,
    #[error("pole {pole} lies inside the closed disk")]
    PoleInsideDisk { pole: f64 },
    #[error("matrix is not hyperbolic (|Tr| = {trace})")]
    NotHyperbolic { trace: f64 },
    #[error("matrix has determinant -1")]
    WrongDeterminant,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("psi = {psi} outside (0, 2π/{nf})")]
    InvalidPsi { nf: u32, psi: f64 },
    #[error("n_f = {0} is below 3")]
    InvalidFunnelCount(u32),
    #[error("funnel lengths must be positive, got ({0}, {1}, {2})")]
    InvalidLengths(f64, f64, f64),
    #[error("no surface: {0}")]
    NoSuchSurface(String),
    #[error("IFS validation failed: {0}")]
    ValidationFailed(String),
    #[error("word is not closed")]
    NotClosed,
    #[error("invalid transition {from} -> {to}")]
    InvalidTransition { from: u8, to: u8 },
    #[error("word must have at least one transition")]
    EmptyWord,
    #[error("target length {target} not bracketed: funnel length spans [{lo}, {hi}]")]
    OutOfRange { target: f64, lo: f64, hi: f64 },
    #[error("funnel length is not monotone in psi near psi = {0}")]
    NotMonotone(f64),
    #[error("cannot parse surface spec '{0}'")]
    Parse(String),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("elements belong to different groups")]
    GroupMismatch,
    #[error("unknown irrep '{0}'")]
    UnknownIrrep(String),
    #[error("group does not act on this symbol set")]
    ContextMismatch,
    #[error("cannot parse permutation '{0}'")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymbolicError {
    #[error("enumeration too large: {0} words")]
    TooLarge(f64),
    #[error("invalid reduced symbol {0}")]
    InvalidSymbol(i8),
    #[error("enumerators disagree: {0}")]
    Mismatch(String),
    #[error("reduced enumeration needs a symmetric funnel scheme with its full group")]
    NotSymmetricFunnel,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZetaError {
    #[error("order {requested} exceeds table order {available}")]
    OrderTooHigh { requested: usize, available: usize },
    #[error("Euler product needs Re(s) > 1, got {0}")]
    NotConvergent(f64),
    #[error("|Z^(n)(s)| is too small for a relative error")]
    DegenerateDenominator,
    #[error("no real zero of the trivial factor in (0, 1)")]
    NoRealZero,
    #[error("argument principle contour too close to a zero after jitters")]
    ContourTooClose,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("no resonances with |Im s| > {0}")]
    EmptyAboveK(f64),
}
