use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

use crate::ring::Elem;

/// Errors shared by every algebraic module.
///
/// `ImpossibleInverse` is an expected control-flow outcome: generic
/// algorithms over rings with zero divisors catch it and fall back to a
/// division-free method. It carries the witness zero divisor so callers can
/// act on it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    MixedParents,
    InvalidParameter(String),
    NoCoercion,
    DivisionByZero,
    ImpossibleInverse(Box<Elem>),
    InexactDivision,
    NonSquare,
    NotSquarefree,
    ContainsZero,
    ContainsNegative,
    InsufficientPoints,
    RandomSearchExhausted,
    IndexDivisor,
    TorsionCertificationFailed,
    PrecisionExhausted,
    ZeroPivotUnresolvable,
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MixedParents => write!(f, "operands belong to different parent rings"),
            Error::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            Error::NoCoercion => write!(f, "no canonical coercion exists"),
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::ImpossibleInverse(w) => write!(f, "impossible inverse (witness {w})"),
            Error::InexactDivision => write!(f, "inexact division"),
            Error::NonSquare => write!(f, "matrix is not square"),
            Error::NotSquarefree => write!(f, "polynomial is not squarefree"),
            Error::ContainsZero => write!(f, "ball contains zero"),
            Error::ContainsNegative => write!(f, "ball contains negative numbers"),
            Error::InsufficientPoints => write!(f, "not enough evaluation points in the base ring"),
            Error::RandomSearchExhausted => write!(f, "random search exhausted its iteration cap"),
            Error::IndexDivisor => write!(f, "prime divides the index of the equation order"),
            Error::TorsionCertificationFailed => {
                write!(f, "ball test reported torsion but no candidate order verified")
            }
            Error::PrecisionExhausted => write!(f, "working precision exceeded the hard cap"),
            Error::ZeroPivotUnresolvable => write!(f, "zero pivot could not be resolved"),
            Error::Parse(s) => write!(f, "parse error: {s}"),
        }
    }
}

impl core::error::Error for Error {}
