use alloc::string::String;

use thiserror::Error;

use crate::expr::{ExponentForm, JetVar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cyclic binding for `{0}`")]
    CyclicBinding(String),
    #[error("total t-derivative through fractional jet variable {0:?}")]
    FractionalChain(JetVar),
    #[error("basis jet variable occurs non-polynomially in `{0}`")]
    NonPolynomial(String),
    #[error("exponent is not affine over the declared symbols: {0}")]
    NonAffineExponent(String),
    #[error("negative binomial index {0}")]
    NegativeIndex(i64),
    #[error("cannot decide the sign of {0} from the declared assumptions")]
    UndecidableExponent(ExponentForm),
    #[error("power t^({0}) lies below the admissible range of the power rule")]
    ExponentOutOfRange(ExponentForm),
    #[error("expression is not a power sum in t: {0}")]
    NotPowerSum(String),
    #[error("generator is not a pure translation")]
    NotTranslation,
    #[error("generator is not a scaling generator: {0}")]
    NotScaling(String),
    #[error("generator violates the admissible shape: {0}")]
    ShapeViolation(String),
    #[error("null-space dimension changed from {low} to {high} when raising polynomial degree to {degree}")]
    DegreeInsufficient { degree: u32, low: usize, high: usize },
    #[error("h-template leaves a fractional residual: {0}")]
    TemplateResidual(String),
    #[error("input function has a t-exponent <= -1: {0}")]
    SingularInput(String),
    #[error("determining equation is not linear homogeneous in the unknowns: {0}")]
    NotLinear(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = core::result::Result<T, Error>;
