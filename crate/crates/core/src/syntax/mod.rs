//! Surface syntax: `.pc` choreographies, `.pp` networks and state files.

mod cursor;
mod pc;
mod pp;
mod print;
mod state;
mod terms;

pub use pc::{parse_choreography, parse_program, scope_diagnostics};
pub use pp::{parse_behaviour, parse_projected, split_proc_name};
pub use print::{
    pretty_print, print_adjacency, print_behaviour, print_choreography, print_projected,
    print_projected_proc,
};
pub use state::{parse_state, print_state};

/// Parses a single value such as `[1, 2]` or `0.5-2.0i`.
pub fn parse_value(text: &str) -> Result<crate::lang::Value, crate::diag::Diagnostic> {
    let mut c = cursor::Cursor::new(text);
    let v = terms::value(&mut c)?;
    if !c.at_end() {
        return c.error("unexpected input after value");
    }
    Ok(v)
}

/// Parses a single expression such as `fst<snd`.
pub fn parse_expr(text: &str) -> Result<crate::lang::Expr, crate::diag::Diagnostic> {
    let mut c = cursor::Cursor::new(text);
    let e = terms::expr(&mut c)?;
    if !c.at_end() {
        return c.error("unexpected input after expression");
    }
    Ok(e)
}
