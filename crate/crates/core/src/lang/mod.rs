//! Core data model: names, values, expressions, choreographies and process
//! behaviours.

pub mod behaviour;
pub mod chor;
pub mod expr;
pub mod list;
pub mod name;
pub mod value;

pub use behaviour::{
    Action, Behaviour, Network, ProcedureSet, ProcessState, ProjectedProc, ProjectedProgram,
};
pub use chor::{Choreography, ProcedureDef, SourceProgram, Span, Stmt, StmtKind};
pub use expr::{BinOp, Builtin, EvalError, Expr, RecvBuiltin, RecvFunction};
pub use list::{Adjacency, ArgExpr, ArgValue, ListError, ListFn, Width};
pub use name::{Name, Param, ParamKind};
pub use value::Value;

/// Cell contents by process; absent names read as `undef`.
pub type StateMap = std::collections::BTreeMap<Name, Value>;
