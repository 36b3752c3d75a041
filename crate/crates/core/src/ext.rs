//! Natural numbers extended with a top element.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// A value in `ℕ ∪ {∞}`.
///
/// Arithmetic saturates: anything plus `Inf` is `Inf`, and finite sums that
/// overflow `u64` also become `Inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ExtNat {
    Fin(u64),
    #[default]
    Inf,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Fin(0);
    pub const ONE: ExtNat = ExtNat::Fin(1);

    pub fn is_inf(self) -> bool {
        matches!(self, ExtNat::Inf)
    }

    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }

    /// Multiplication by a positive integer; `0·n = 0` and `∞·n = ∞`.
    pub fn scale(self, n: u64) -> ExtNat {
        match self {
            ExtNat::Fin(0) => ExtNat::Fin(0),
            ExtNat::Fin(v) => v.checked_mul(n).map_or(ExtNat::Inf, ExtNat::Fin),
            ExtNat::Inf => {
                if n == 0 {
                    ExtNat::Fin(0)
                } else {
                    ExtNat::Inf
                }
            }
        }
    }
}

impl From<u64> for ExtNat {
    fn from(v: u64) -> Self {
        ExtNat::Fin(v)
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.cmp(b),
            (ExtNat::Fin(_), ExtNat::Inf) => Ordering::Less,
            (ExtNat::Inf, ExtNat::Fin(_)) => Ordering::Greater,
            (ExtNat::Inf, ExtNat::Inf) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_add(b).map_or(ExtNat::Inf, ExtNat::Fin),
            _ => ExtNat::Inf,
        }
    }
}

impl Add<u64> for ExtNat {
    type Output = ExtNat;

    fn add(self, rhs: u64) -> ExtNat {
        self + ExtNat::Fin(rhs)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtNat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "∞" => Ok(ExtNat::Inf),
            _ => s
                .parse::<u64>()
                .map(ExtNat::Fin)
                .map_err(|_| format!("`{s}` is neither a natural number nor `inf`")),
        }
    }
}
