//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdent(String),
    #[error("jet order {order} exceeds the order cap {cap}")]
    OrderCap { order: usize, cap: usize },
    #[error("invalid signature: {0}")]
    BadSignature(String),
    #[error("division by a zero expression")]
    DivisionByZero,
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("coordinate `{0}` has no assigned value")]
    UnassignedCoordinate(String),
    #[error("expression contains the reserved scaling parameter")]
    ReservedParameter,
    #[error("parameter integral has no closed form: {0}")]
    NonIntegrable(String),
    #[error("no antiderivative available: {0}")]
    NoAntiderivative(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("signature mismatch between operands")]
    SignatureMismatch,
    #[error("expected a homogeneous form of contact degree {expected_contact} and horizontal degree {expected_horizontal}")]
    NotHomogeneous {
        expected_contact: usize,
        expected_horizontal: usize,
    },
    #[error("field prolonged to order {have} but order {need} is required")]
    InsufficientProlongation { have: usize, need: usize },
    #[error("component count {got} does not match the signature ({want})")]
    ComponentCount { got: usize, want: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalcError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error("vector field is not projectable: {0}")]
    NotProjectable(String),
    #[error("Noether momenta are only available for Lagrangians of order <= 2 (got order {0})")]
    UnsupportedOrder(usize),
    #[error("source form fails the Helmholtz conditions; {0}")]
    NotLocallyVariational(String),
    #[error("operation needs a star-shaped fiber domain about the declared base point")]
    NotStarShaped,
    #[error("density is not variationally trivial: E_n residual `{0}` is nonzero")]
    NotTrivial(String),
    #[error("constructive potential recovery needs a single base coordinate; supply a candidate current instead")]
    NeedCandidate,
    #[error("precondition `{name}` failed: {detail}")]
    Precondition { name: String, detail: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CechError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Calc(#[from] CalcError),
    #[error("nerve is not a simplicial complex: {0}")]
    BadNerve(String),
    #[error("cochain is not total on {0}-simplices")]
    NotTotal(usize),
    #[error("covers differ")]
    CoverMismatch,
    #[error("entry on simplex {simplex:?} is not constant (partial in `{coord}` is nonzero)")]
    NotConstant { simplex: Vec<usize>, coord: String },
    #[error("could not identify the constant on simplex {simplex:?} against the declared periods")]
    UnidentifiedConstant { simplex: Vec<usize> },
    #[error("no sample point declared for simplex {0:?}")]
    MissingSample(Vec<usize>),
    #[error("class extraction is implemented for a single base coordinate; got n = {0}")]
    UnsupportedBase(usize),
    #[error("presentation is invalid: {0}")]
    InvalidPresentation(String),
    #[error("precondition `{name}` failed: {detail}")]
    Precondition { name: String, detail: String },
}
