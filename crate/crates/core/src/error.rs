use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable sets differ: [{left}] vs [{right}]")]
    SpaceMismatch { left: String, right: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` has no image under the substitution")]
    UnmappedVariable(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },

    #[error("vector fields X{i} and X{j} do not commute")]
    NonCommutingFields { i: usize, j: usize },

    #[error("order {requested} exceeds the order cap {cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not a module structure at order {order}: {witness}")]
    NotAModule { order: usize, witness: String },

    #[error("not a cocycle: {witness}")]
    NotACocycle { witness: String },

    #[error("not an equivalence at order {order}: {witness}")]
    NotAnEquivalence { order: usize, witness: String },

    #[error("sP-bracket property {property} fails: {witness}")]
    BracketProperty { property: String, witness: String },

    #[error("bracket is not natural: {witness}")]
    NotNatural { witness: String },

    #[error("lift is not flat: {witness}")]
    NonFlat { witness: String },

    #[error("evaluator is not A^e-linear")]
    NotAeLinear,

    #[error("problem size {estimate} exceeds the budget of {budget} basis elements")]
    Budget { estimate: usize, budget: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}
