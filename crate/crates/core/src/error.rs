use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown value `{value}` for variable `{var}`")]
    UnknownValue { var: String, value: String },
    #[error("unknown context `{0}`")]
    UnknownContext(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate value `{value}` in the range of `{var}`")]
    DuplicateValue { var: String, value: String },
    #[error("variable `{0}` has an empty range")]
    EmptyRange(String),
    #[error("a signature needs at least one exogenous variable")]
    NoExogenous,
    #[error("a signature needs at least one endogenous variable")]
    NoEndogenous,
    #[error("`{0}` is exogenous; only endogenous variables can be intervened on or used as causes")]
    Exogenous(String),
    #[error("`{0}` is exogenous and has no structural equation")]
    EquationForExogenous(String),
    #[error("missing structural equation for `{0}`")]
    MissingEquation(String),
    #[error("duplicate structural equation for `{0}`")]
    DuplicateEquation(String),
    #[error("`{0}` lists itself as a parent")]
    SelfParent(String),
    #[error("`{parent}` is listed twice as a parent of `{var}`")]
    DuplicateParent { var: String, parent: String },
    #[error("table for `{var}` has {found} rows, expected {expected}")]
    NonTotalTable { var: String, expected: usize, found: usize },
    #[error("dependency cycle through {}", .0.join(", "))]
    CyclicModel(Vec<String>),
    #[error("context `{context}` does not assign `{var}`")]
    IncompleteContext { context: String, var: String },
    #[error("duplicate context `{0}`")]
    DuplicateContext(String),
    #[error("the model has no contexts")]
    NoContexts,
    #[error("a cause pattern must mention at least one variable")]
    EmptyPattern,
    #[error("`{0}` occurs twice in a cause pattern")]
    DuplicatePatternVariable(String),
    #[error("an intervention must set at least one variable")]
    EmptyIntervention,
    #[error("`{0}` is set twice in one intervention")]
    DuplicateInterventionTarget(String),
    #[error("value variable `{0}` is not bound by an enclosing `exists`")]
    UnboundBinder(String),
    #[error("wildcard `{0}` is only allowed in a cause pattern or directly in a cause's effect")]
    MisplacedWildcard(String),
    #[error("cause pattern entry `{0}` is not a concrete value")]
    NonConcretePattern(String),
    #[error("`{var}` cannot be both {first} and {second}")]
    LabelConflict { var: String, first: &'static str, second: &'static str },
    #[error("`{0}` is not labelled untrusted")]
    NotUntrusted(String),
    #[error("`{0}` appears more than once in the delegation chain")]
    DuplicateChainName(String),
    #[error("the models have different signatures")]
    SignatureMismatch,
    #[error("the models disagree on whether `{var}` depends on `{on}`")]
    DependencyMismatch { var: String, on: String },
    #[error("the solved worlds differ at `{0}`")]
    AssignmentMismatch(String),
    #[error("no subvector of the candidate cause verifies in the first model")]
    ConstructionFailed,
}
