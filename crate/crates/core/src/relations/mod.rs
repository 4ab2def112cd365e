//! Finite binary relations over typed state spaces and the correctness
//! predicates defined on them.

mod order;
mod relation;
mod space;

pub use order::{competence_domain, correctness_order, is_correct, more_correct, CorrectnessOrder};
pub use relation::{
    Kind, Predicates, Relation, RelationJson, SetOp, StateSet, DEFAULT_PAIR_CAP,
};
pub use space::{Binding, Domain, Interval, State, StateId, StateSpace, VarDecl};
