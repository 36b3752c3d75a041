use std::fmt;
use std::str::FromStr;

use super::{RegularTree, VertexId};
use crate::error::{Error, Result};

/// A word over `{0,1}`; `0` is the left child, `1` the right child.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address(Vec<u8>);

impl Address {
    pub fn root() -> Self {
        Address(Vec::new())
    }

    pub fn from_dirs(dirs: Vec<u8>) -> Self {
        debug_assert!(dirs.iter().all(|&d| d < 2));
        Address(dirs)
    }

    pub fn dirs(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, dir: u8) -> Address {
        let mut d = self.0.clone();
        d.push(dir);
        Address(d)
    }

    pub fn concat(&self, other: &Address) -> Address {
        let mut d = self.0.clone();
        d.extend_from_slice(&other.0);
        Address(d)
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for d in &self.0 {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for Address {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s == "e" || s == "ε" {
            return Ok(Address::root());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::InvalidAddress(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Address)
    }
}

/// An ultimately periodic path: follow `prefix` from the root, then repeat
/// `cycle` forever. Valid in a tree iff the cycle returns to the vertex it
/// starts from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpPath {
    prefix: Address,
    cycle: Address,
}

impl UpPath {
    pub fn new(prefix: Address, cycle: Address) -> Self {
        UpPath { prefix, cycle }
    }

    pub fn prefix(&self) -> &Address {
        &self.prefix
    }

    pub fn cycle(&self) -> &Address {
        &self.cycle
    }

    /// Checks the path against `tree` and returns the vertex where the
    /// periodic part starts.
    pub fn validate<L>(&self, tree: &RegularTree<L>) -> Result<VertexId> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidAddress(format!("{} (empty loop)", self)));
        }
        let start = tree.resolve(&self.prefix)?;
        let end = tree.resolve_from(start, &self.cycle)?;
        if end != start {
            return Err(Error::InvalidAddress(format!(
                "{self}: loop does not return to its start vertex"
            )));
        }
        Ok(start)
    }

    /// The same path with a different prefix (used to test prefix
    /// independence).
    pub fn with_prefix(&self, prefix: Address) -> UpPath {
        UpPath {
            prefix,
            cycle: self.cycle.clone(),
        }
    }
}

impl fmt::Display for UpPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})^w", self.prefix, self.cycle)
    }
}

impl FromStr for UpPath {
    type Err = Error;

    /// Parses `prefix:loop`, e.g. `01:1`.
    fn from_str(s: &str) -> Result<Self> {
        let (p, l) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidAddress(format!("{s} (expected prefix:loop)")))?;
        Ok(UpPath::new(p.parse()?, l.parse()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn address_text() {
        let a: Address = "0110".parse().unwrap();
        assert_eq!(a.to_string(), "0110");
        assert_eq!(Address::root().to_string(), "e");
        assert_eq!("ε".parse::<Address>().unwrap(), Address::root());
        assert!("012".parse::<Address>().is_err());
        assert!(Address::from_dirs(vec![0]).is_prefix_of(&a));
    }

    #[test]
    fn up_path_text() {
        let p: UpPath = "01:1".parse().unwrap();
        assert_eq!(p.prefix().to_string(), "01");
        assert_eq!(p.cycle().to_string(), "1");
        assert!("01".parse::<UpPath>().is_err());
    }
}
