use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Each variant carries a stable machine-readable code (see [`Error::code`]) and
/// is classified as either malformed input or a domain error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("dangling vertex {vertex:?} referenced by {by}")]
    DanglingVertex { vertex: String, by: String },
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("relation {index}: {reason}")]
    BadRelation { index: usize, reason: String },
    #[error("path is not composable: {0}")]
    NotComposable(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("entry {0} is not reducible modulo the prime")]
    NotReducible(String),
    #[error("representation violates relation {index}")]
    RelationViolated { index: usize },
    #[error("instance too large: {count} subspace tuples exceed the cap of {cap}")]
    InstanceTooLarge { count: u128, cap: u128 },
    #[error("slope of the zero object is undefined")]
    UndefinedSlope,
    #[error("object is not semistable")]
    NotSemistable,
    #[error("multi-rank is zero")]
    ZeroRank,
    #[error("leading coefficient vanishes")]
    ZeroLeadingCoefficient,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not regular: {0}")]
    NotRegular(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("denominator vanishes: {0}")]
    ZeroDenominator(String),
    #[error("missing ranks: torsion-free data required")]
    MissingRanks,
    #[error("wall {0} has no linear form")]
    NonLinearWall(usize),
    #[error("point lies outside the cone")]
    OutsideCone,
    #[error("cone is empty or has no strictly positive point")]
    DegenerateCone,
    #[error("linear program is unbounded")]
    Unbounded,
}

impl Error {
    /// Stable identifier used in machine-readable reports.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            Parse(_) => "E_PARSE",
            BadRational(_) => "E_BAD_RATIONAL",
            DanglingVertex { .. } => "E_DANGLING_VERTEX",
            UnknownArrow(_) => "E_UNKNOWN_ARROW",
            UnknownVertex(_) => "E_UNKNOWN_VERTEX",
            DuplicateId(_) => "E_DUPLICATE_ID",
            BadRelation { .. } => "E_BAD_RELATION",
            NotComposable(_) => "E_NOT_COMPOSABLE",
            ShapeMismatch(_) => "E_SHAPE_MISMATCH",
            InvalidParameter(_) => "E_INVALID_PARAMETER",
            NotReducible(_) => "E_NOT_REDUCIBLE",
            RelationViolated { .. } => "E_RELATION_VIOLATED",
            InstanceTooLarge { .. } => "E_INSTANCE_TOO_LARGE",
            UndefinedSlope => "E_UNDEFINED_SLOPE",
            NotSemistable => "E_NOT_SEMISTABLE",
            ZeroRank => "E_ZERO_RANK",
            ZeroLeadingCoefficient => "E_ZERO_LEADING_COEFFICIENT",
            Precondition(_) => "E_PRECONDITION",
            NotRegular(_) => "E_NOT_REGULAR",
            DegreeMismatch(_) => "E_DEGREE_MISMATCH",
            ZeroDenominator(_) => "E_ZERO_DENOMINATOR",
            MissingRanks => "E_MISSING_RANKS",
            NonLinearWall(_) => "E_NON_LINEAR_WALL",
            OutsideCone => "E_OUTSIDE_CONE",
            DegenerateCone => "E_DEGENERATE_CONE",
            Unbounded => "E_UNBOUNDED",
        }
    }

    /// True when the error means the input itself is malformed, as opposed to a
    /// well-formed input on which the requested computation is not defined.
    pub fn is_input_error(&self) -> bool {
        use Error::*;
        matches!(
            self,
            Parse(_)
                | BadRational(_)
                | DanglingVertex { .. }
                | UnknownArrow(_)
                | UnknownVertex(_)
                | DuplicateId(_)
                | BadRelation { .. }
                | NotComposable(_)
                | ShapeMismatch(_)
                | InvalidParameter(_)
                | DegreeMismatch(_)
        )
    }
}
