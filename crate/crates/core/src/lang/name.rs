use std::fmt;

/// A process name such as `p`, `q<`, `a11` or `n'`.
///
/// Names minted at runtime carry a `#k` suffix; names renamed when a
/// projected procedure is unfolded carry a `~k` suffix. Neither character
/// is accepted by the parser, so generated names never collide with source
/// names.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(String);

impl Name {
    pub fn new(s: impl Into<String>) -> Self {
        Name(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The source part of the name, without any `#k` or `~k` suffix.
    pub fn base(&self) -> &str {
        let end = self.0.find(['#', '~']).unwrap_or(self.0.len());
        &self.0[..end]
    }

    /// True for names created by a `start` at runtime.
    pub fn is_fresh(&self) -> bool {
        self.0.contains('#')
    }

    pub fn fresh(&self, k: u64) -> Name {
        Name(format!("{}#{}", self.base(), k))
    }

    pub fn renamed(&self, k: u64) -> Name {
        Name(format!("{}~{}", self.base(), k))
    }

    /// List parameters are written with an upper-case initial.
    pub fn is_list_like(&self) -> bool {
        self.0
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_uppercase())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name(s.to_string())
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(s)
    }
}

/// Whether a procedure parameter stands for one process or a list of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Single,
    List,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: Name,
    pub kind: ParamKind,
}

impl Param {
    /// Kind is decided by capitalisation: `A`, `Y1` are lists, `p`, `q<` are not.
    pub fn from_name(name: Name) -> Self {
        let kind = if name.is_list_like() {
            ParamKind::List
        } else {
            ParamKind::Single
        };
        Param { name, kind }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        let q = Name::from("q<");
        assert_eq!(q.fresh(3).as_str(), "q<#3");
        assert_eq!(q.fresh(3).base(), "q<");
        assert_eq!(q.fresh(3).renamed(9).as_str(), "q<~9");
        assert!(q.fresh(1).is_fresh());
        assert!(!q.renamed(1).is_fresh());
    }

    #[test]
    fn kinds() {
        assert_eq!(Param::from_name("Y1".into()).kind, ParamKind::List);
        assert_eq!(Param::from_name("n'".into()).kind, ParamKind::Single);
    }
}
