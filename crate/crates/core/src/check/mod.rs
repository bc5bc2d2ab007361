//! Static checks: structure, connections and projectability.

mod connections;
mod structure;

pub use connections::{
    check_connections, infer_contracts, ConnectionContract, ConnectionReport, Edge,
};
pub use structure::check_structure;

use crate::diag::{has_errors, Diagnostic};
use crate::lang::{SourceProgram, StateMap};

/// Merge failures of endpoint projection, one per conditional and role.
pub fn check_projectable(prog: &SourceProgram) -> Vec<Diagnostic> {
    crate::epp::epp_program(prog, &StateMap::new())
        .err()
        .unwrap_or_default()
}

/// All checks. Connection and projectability checks run only on a
/// structurally sound program.
pub fn check_program(prog: &SourceProgram) -> Vec<Diagnostic> {
    let mut out = check_structure(prog);
    if has_errors(&out) {
        return out;
    }
    out.extend(check_connections(prog, &prog.initial_edges()).diagnostics);
    out.extend(check_projectable(prog));
    out
}
