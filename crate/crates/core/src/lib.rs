//! Procedural choreographies: parsing, static checks, endpoint projection to
//! procedural processes, and simulators for both levels.

pub mod check;
pub mod corpus;
pub mod diag;
pub mod engine;
pub mod epp;
pub mod lang;
pub mod syntax;
