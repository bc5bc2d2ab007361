use crate::diag::Diagnostic;
use crate::lang::{Name, Span};

pub type PResult<T> = Result<T, Diagnostic>;

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Character scanner with the name rules of the surface syntax.
pub(crate) struct Cursor {
    chars: Vec<char>,
    pub pos: usize,
    line_starts: Vec<usize>,
    /// Disables `--` comments, for edge blocks where `--` is an edge.
    pub raw_dashes: bool,
}

impl Cursor {
    pub fn new(text: &str) -> Self {
        let chars: Vec<char> = text.chars().collect();
        let mut line_starts = vec![0];
        for (i, c) in chars.iter().enumerate() {
            if *c == '\n' {
                line_starts.push(i + 1);
            }
        }
        Cursor {
            chars,
            pos: 0,
            line_starts,
            raw_dashes: false,
        }
    }

    pub fn span_at(&self, pos: usize, len: usize) -> Span {
        let line = self.line_starts.partition_point(|s| *s <= pos);
        let col = pos - self.line_starts[line - 1] + 1;
        Span::new(line as u32, col as u32, len as u32)
    }

    pub fn span_from(&self, start: usize) -> Span {
        self.span_at(start, self.pos.saturating_sub(start).max(1))
    }

    pub fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Diagnostic::error(message, self.span_at(self.pos, 1)))
    }

    pub fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    pub fn peek(&self) -> Option<char> {
        self.peek_at(0)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    pub fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => self.pos += 1,
                Some('-') if !self.raw_dashes && self.peek_at(1) == Some('-') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_none()
    }

    pub fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    /// Skips whitespace, then reports whether `s` comes next.
    pub fn at(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.starts_with(s)
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = match self.peek() {
                Some(c) => format!("`{c}`"),
                None => "end of input".to_string(),
            };
            self.error(format!("expected `{s}`, found {found}"))
        }
    }

    pub fn at_keyword(&mut self, kw: &str) -> bool {
        self.at(kw)
            && !self
                .peek_at(kw.len())
                .is_some_and(|c| is_ident_char(c) || c == '\'')
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            self.error(format!("expected `{kw}`"))
        }
    }

    /// `[A-Za-z_][A-Za-z0-9_]*`
    pub fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        if !self.peek().is_some_and(is_ident_start) {
            return None;
        }
        let start = self.pos;
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    pub fn expect_ident(&mut self, what: &str) -> PResult<String> {
        match self.ident() {
            Some(s) => Ok(s),
            None => self.error(format!("expected {what}")),
        }
    }

    fn primes(&mut self, out: &mut String) {
        while self.peek() == Some('\'') {
            out.push('\'');
            self.pos += 1;
        }
    }

    /// A process name: an identifier, then at most one of `<`, `=`, `>`,
    /// then any number of primes.
    ///
    /// Inside `<...>` argument lists a trailing `>` is the closing bracket
    /// unless another `,` or `>` follows it.
    pub fn process_name(&mut self, in_angle: bool) -> PResult<Name> {
        let Some(mut s) = self.ident() else {
            return self.error("expected a process name");
        };
        if !s.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return self.error("process names start with a letter");
        }
        match self.peek() {
            Some('<') if !(self.peek_at(1) == Some('-') && self.peek_at(2) == Some('>')) => {
                if !self.peek_at(1).is_some_and(is_ident_start) {
                    s.push('<');
                    self.pos += 1;
                }
            }
            Some('=') => {
                s.push('=');
                self.pos += 1;
            }
            Some('>') if !in_angle || matches!(self.peek_at(1), Some(',') | Some('>')) => {
                if self.peek_at(1) != Some('-') {
                    s.push('>');
                    self.pos += 1;
                }
            }
            _ => {}
        }
        self.primes(&mut s);
        Ok(Name::new(s))
    }

    /// A procedure name. A suffix from `<=>` (with primes) belongs to the name
    /// only when an argument list follows it, as in `split_q<<p, q<>`.
    pub fn proc_name(&mut self) -> Option<String> {
        let mut s = self.ident()?;
        if let Some(c @ ('<' | '=' | '>')) = self.peek() {
            let mut j = 1;
            while self.peek_at(j) == Some('\'') {
                j += 1;
            }
            if matches!(self.peek_at(j), Some('<') | Some('(')) {
                s.push(c);
                self.pos += 1;
            }
        }
        self.primes(&mut s);
        Some(s)
    }

    /// Whether an argument list opens at the cursor: `(` (but not the
    /// selection operator `(+)`), or `<` followed by an argument.
    pub fn at_call_open(&self) -> bool {
        match self.peek() {
            Some('(') => !(self.peek_at(1) == Some('+') && self.peek_at(2) == Some(')')),
            Some('<') => self
                .peek_at(1)
                .is_some_and(|c| is_ident_start(c) || c == '['),
            _ => false,
        }
    }

    pub fn unsigned(&mut self) -> PResult<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected a number");
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().or_else(|_| self.error("number out of range"))
    }

    /// Scans a numeric literal (digits with an optional fraction and
    /// exponent) and returns its text.
    pub fn number_text(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mut j = 1;
            if matches!(self.peek_at(1), Some('+') | Some('-')) {
                j = 2;
            }
            if self.peek_at(j).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += j;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            }
        }
        Some(self.chars[start..self.pos].iter().collect())
    }

    pub fn save(&self) -> usize {
        self.pos
    }

    pub fn restore(&mut self, pos: usize) {
        self.pos = pos;
    }
}
