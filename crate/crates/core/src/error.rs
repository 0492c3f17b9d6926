use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("polynomial is a nonzero constant; it has no roots")]
    DegreeZero,
    #[error("the zero polynomial has no well-defined root set")]
    ZeroPolynomial,
    #[error("empty input")]
    EmptyInput,
    #[error("operator has no derivative terms or a zero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("negative Fuchs index {0}; apply the y = 1/z transform first")]
    NegativeFuchsIndex(i64),
    #[error("degenerate operator: deg Q_k = {leading_degree}, expected k + r = {expected}")]
    Degenerate {
        leading_degree: usize,
        expected: i64,
    },
    #[error("polynomial degree {degree} exceeds the allowed {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("pencil point has full rank: no Stieltjes polynomial")]
    FullRank,
    #[error("kernel exists but every member has degree below {0}")]
    DegreeDeficient(usize),
    #[error("resonance at level {level}: L_{level} = L_{index}")]
    Resonance { level: usize, index: usize },
    #[error("Fuchs index {0} is not supported by the numeric solver")]
    UnsupportedFuchsIndex(i64),
    #[error("symbolic elimination needs {needed} coefficients, above the bound {bound}")]
    EliminationTooLarge { needed: usize, bound: usize },
    #[error("root finding failed for a degree {degree} polynomial")]
    RootFindingFailure {
        degree: usize,
        coeffs: Vec<num_complex::Complex64>,
    },
    #[error("eliminant root {root} gave no validated pair (residual {residual:e})")]
    SpuriousRoot {
        root: num_complex::Complex64,
        residual: f64,
    },
    #[error("expected {expected} eliminant roots, found degree {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("length mismatch: {0} alphas vs {1} betas")]
    LengthMismatch(usize, usize),
    #[error("classical builder needs k >= 2, got {0}")]
    InvalidOrder(usize),
    #[error("Cauchy transform evaluated at a root")]
    PoleAtPoint,
    #[error("measure support leaves the disk of radius {radius}")]
    SupportViolation { radius: f64 },
    #[error("evaluation point lies inside the support disk")]
    InsideDisk,
    #[error("operator is not monic")]
    NotMonic,
    #[error("coincident roots make the identity undefined")]
    CoincidentRoots,
    #[error("classical data violates its hypotheses: {0}")]
    SpecViolation(String),
    #[error("level {level}: {source}")]
    Level { level: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
