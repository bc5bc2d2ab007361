use super::cursor::Cursor;
use super::terms::value;
use crate::diag::Diagnostic;
use crate::lang::{Span, StateMap};

/// Parses `name = value` lines. Blank lines and `--` comments are ignored.
pub fn parse_state(text: &str) -> Result<StateMap, Diagnostic> {
    let mut out = StateMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u32 + 1;
        let mut c = Cursor::new(line);
        if c.at_end() {
            continue;
        }
        let at = |c: &Cursor, d: Diagnostic| Diagnostic {
            span: Span::new(line_no, c.span_at(c.pos, 1).col, 1),
            ..d
        };
        let name = c.process_name(false).map_err(|d| at(&c, d))?;
        c.expect("=").map_err(|d| at(&c, d))?;
        let v = value(&mut c).map_err(|d| at(&c, d))?;
        if !c.at_end() {
            return Err(Diagnostic::error(
                "unexpected input after value",
                Span::new(line_no, 1, 1),
            ));
        }
        if out.insert(name.clone(), v).is_some() {
            return Err(Diagnostic::error(
                format!("`{name}` assigned twice"),
                Span::new(line_no, 1, 1),
            ));
        }
    }
    Ok(out)
}

/// Renders a state as `name = value` lines in name order.
pub fn print_state(state: &StateMap) -> String {
    state.iter().map(|(n, v)| format!("{n} = {v}\n")).collect()
}
