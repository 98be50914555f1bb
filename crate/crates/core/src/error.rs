use thiserror::Error;

/// Errors raised across the numerical lab.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("s = {re} + {im}i is within the guard radius of the pole at s = 1")]
    PoleAtOne { re: f64, im: f64 },
    #[error("requested accuracy {target:e} unreachable in binary64 (estimate {estimate:e})")]
    PrecisionUnreachable { target: f64, estimate: f64 },
    #[error("s = {re} + {im}i is too close to a singularity of the logarithmic derivative")]
    NearSingularity { re: f64, im: f64 },
    #[error("|Im s| = {0} exceeds the supported height window")]
    OverflowRisk(f64),
    #[error("t = {0} is outside the supported range")]
    UnsupportedRange(f64),
    #[error("argument {0} is a pole of the digamma function")]
    PoleAtNonpositiveInteger(f64),
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error("zero count {found} deviates from the counting formula ({expected:.3}) on [{t_min}, {t_max}]")]
    MissedZeroSuspected { found: usize, expected: f64, t_min: f64, t_max: f64 },
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("ordinates not strictly increasing at line {line}")]
    NonMonotonic { line: usize },
    #[error("bad magic bytes in zero cache")]
    BadMagic,
    #[error("zero cache truncated")]
    TruncatedFile,
    #[error("io error: {0}")]
    Io(String),
    #[error("argument {0} out of the supported range")]
    OutOfRange(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("gcd({n}, {modulus}) != 1")]
    NotCoprime { n: i64, modulus: u64 },
    #[error("enumeration bound {0:.0} is too large for brute force")]
    TooLarge(f64),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("constants violate C^2 < c (C = {big_c}, c = {small_c})")]
    BadConstants { big_c: f64, small_c: f64 },
    #[error("segment passes within {distance:e} of a singularity at {re} + {im}i")]
    SingularityTooClose { re: f64, im: f64, distance: f64 },
    #[error("quadrature budget of {0} evaluations exceeded")]
    MaxEvalExceeded(usize),
    #[error("oscillation too fast: {0} panels required")]
    OscillationTooFast(usize),
    #[error("degenerate shifts: y1 = {y1}, y2 = {y2}")]
    DegenerateShifts { y1: f64, y2: f64 },
    #[error("invalid shift: {0}")]
    InvalidShift(String),
    #[error("catalog count {found} disagrees with the counting formula ({expected:.3})")]
    CatalogGap { found: usize, expected: f64 },
    #[error("no prime pair found: {0}")]
    NoPairFound(String),
    #[error("window holds only {found} zeros (need {needed}); smallest viable T is about {suggested_t:.0}")]
    WindowTooSmall { found: usize, needed: usize, suggested_t: f64 },
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
