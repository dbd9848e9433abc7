//! Consistent query answering over a single inconsistent relation.
//!
//! A *repair* of an instance under denial constraints is a maximal subset of
//! its tuples that violates no constraint; a query answer is *consistent*
//! when it holds in every repair. Repairs are exactly the maximal independent
//! sets of the conflict hypergraph ([`conflict`]), so the crate offers:
//!
//! - [`engine`]: polynomial algorithms for ground quantifier-free queries and
//!   a first-order rewriting for single-literal existential queries under one
//!   FD, plus a strategy dispatcher;
//! - [`oracle`]: exact exponential-time repair enumeration used as ground truth;
//! - [`reductions`]: instance generators for the co-NP-hard cases.

pub mod conflict;
pub mod constraints;
pub mod csv;
pub mod engine;
pub mod error;
mod matching;
pub mod model;
pub mod oracle;
pub mod query;
pub mod reductions;
pub mod selftest;
mod syntax;
pub mod workload;

pub use constraints::{
    fd_to_denial, is_consistent, parse_constraints, violations, BuiltinAtom, ConstraintSet,
    DenialConstraint, Fd, Term,
};
pub use csv::{parse_instance, read_instance, serialize_instance};
pub use error::{CqaError, Result};
pub use model::{active_domain, AttrType, Instance, Schema, Tuple, Value, VertexId};
pub use syntax::CmpOp;
