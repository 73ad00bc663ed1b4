use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the exact pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// A zero argument where a nonzero one is required.
    Zero(&'static str),
    /// An argument outside the operation's domain.
    Domain(String),
    /// `a1^2 - 4 a2` is a perfect square, so the characteristic polynomial splits.
    Reducible,
    /// The root quotient is a root of unity.
    Torsion,
    /// A parameter that must be nonzero (`a1` or `a2`) is zero.
    ZeroParameter(&'static str),
    /// Binary operation on elements of different quadratic fields.
    DiscMismatch {
        left: i64,
        right: i64,
    },
    DivisionByZero,
    /// The direct-γ input does not have norm one.
    NormNotOne,
    /// The approximate n-th root stage ran out of floating point precision.
    PrecisionExhausted,
    /// `c = 0` in the square-root data; only possible for a torsion input.
    Degenerate,
    /// A conductor violated its structural shape.
    Shape(String),
    /// The hypothesis `(h, ν^∞) | ν` of the product formula failed.
    Hypothesis {
        h: u64,
        nu: u64,
    },
    /// A case formula was invoked outside its preconditions.
    Case(String),
    /// A closed form fell outside the series-oracle interval.
    OracleMismatch(String),
    /// The dispatcher found no applicable case (never expected).
    UnreachableCase(String),
    /// A sieve or prime limit is out of range.
    Limit(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Zero(what) => write!(f, "{what} must be nonzero"),
            Error::Domain(msg) => write!(f, "invalid argument: {msg}"),
            Error::Reducible => write!(f, "discriminant is a perfect square: polynomial is reducible"),
            Error::Torsion => write!(f, "root quotient is a root of unity"),
            Error::ZeroParameter(p) => write!(f, "parameter {p} must be nonzero"),
            Error::DiscMismatch { left, right } => {
                write!(f, "elements live in different fields (discriminants {left} and {right})")
            }
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::NormNotOne => write!(f, "gamma must have norm 1"),
            Error::PrecisionExhausted => write!(f, "n-th root certification ran out of precision"),
            Error::Degenerate => write!(f, "degenerate square-root data (c = 0)"),
            Error::Shape(msg) => write!(f, "conductor shape violated: {msg}"),
            Error::Hypothesis { h, nu } => write!(f, "(h, nu^inf) does not divide nu for h={h}, nu={nu}"),
            Error::Case(msg) => write!(f, "case preconditions failed: {msg}"),
            Error::OracleMismatch(msg) => write!(f, "closed form outside oracle interval: {msg}"),
            Error::UnreachableCase(msg) => write!(f, "no density case applies: {msg}"),
            Error::Limit(msg) => write!(f, "limit out of range: {msg}"),
        }
    }
}
