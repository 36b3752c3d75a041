//! Max-plus affine maps on counter valuations.

use crate::ext::ExtNat;

/// `y[c] = max(k[c], max_j m[c][j] + x[j])`; `None` is the max-plus zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    n: usize,
    m: Vec<Option<ExtNat>>,
    k: Vec<Option<ExtNat>>,
}

fn plus(a: Option<ExtNat>, b: Option<ExtNat>) -> Option<ExtNat> {
    Some(a? + b?)
}

fn join(a: Option<ExtNat>, b: Option<ExtNat>) -> Option<ExtNat> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![None; n * n];
        for c in 0..n {
            m[c * n + c] = Some(ExtNat::ZERO);
        }
        AffineMap { n, m, k: vec![None; n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, c: usize, j: usize) -> Option<ExtNat> {
        self.m[c * self.n + j]
    }

    pub fn constant(&self, c: usize) -> Option<ExtNat> {
        self.k[c]
    }

    /// `c := c + w`.
    pub fn add(n: usize, c: usize, w: ExtNat) -> Self {
        let mut f = Self::identity(n);
        f.m[c * n + c] = Some(w);
        f
    }

    /// `c := 0`.
    pub fn reset(n: usize, c: usize) -> Self {
        let mut f = Self::identity(n);
        f.m[c * n + c] = None;
        f.k[c] = Some(ExtNat::ZERO);
        f
    }

    /// `c := max(d, e)`.
    pub fn max_of(n: usize, c: usize, d: usize, e: usize) -> Self {
        let mut f = Self::identity(n);
        for j in 0..n {
            f.m[c * n + j] = None;
        }
        f.m[c * n + d] = Some(ExtNat::ZERO);
        f.m[c * n + e] = Some(ExtNat::ZERO);
        f
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &AffineMap) -> AffineMap {
        let n = self.n;
        let mut m = vec![None; n * n];
        let mut k = vec![None; n];
        for c in 0..n {
            let mut kc = next.k[c];
            for l in 0..n {
                let Some(w) = next.m[c * n + l] else { continue };
                kc = join(kc, plus(Some(w), self.k[l]));
                for j in 0..n {
                    m[c * n + j] = join(m[c * n + j], plus(Some(w), self.m[l * n + j]));
                }
            }
            k[c] = kc;
        }
        AffineMap { n, m, k }
    }

    pub fn apply(&self, x: &[ExtNat]) -> Vec<ExtNat> {
        (0..self.n)
            .map(|c| {
                let mut y = self.k[c];
                for j in 0..self.n {
                    y = join(y, plus(self.m[c * self.n + j], Some(x[j])));
                }
                y.unwrap_or(ExtNat::ZERO)
            })
            .collect()
    }

    /// `self` applied `e` times; `e = ∞` gives the pointwise supremum of
    /// all positive powers.
    pub fn power(&self, e: ExtNat) -> AffineMap {
        match e {
            ExtNat::Fin(mut e) => {
                let mut acc = AffineMap::identity(self.n);
                let mut base = self.clone();
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc.then(&base);
                    }
                    base = base.then(&base);
                    e >>= 1;
                }
                acc
            }
            ExtNat::Inf => {
                let n = self.n;
                let plus = self.closure();
                let mut m = vec![None; n * n];
                let mut k = vec![None; n];
                for c in 0..n {
                    for j in 0..n {
                        m[c * n + j] = plus[c * (n + 1) + j];
                    }
                    k[c] = plus[c * (n + 1) + n];
                }
                AffineMap { n, m, k }
            }
        }
    }

    /// Transitive closure (walks of length at least one) of the augmented
    /// `(n+1)×(n+1)` matrix whose extra node carries the constants.
    /// Computed with the Floyd–Warshall scheme for closed semirings, where
    /// the star of a positive weight is `∞` and of zero is zero.
    pub fn closure(&self) -> Vec<Option<ExtNat>> {
        let n = self.n;
        let s = n + 1;
        let mut a = vec![None; s * s];
        for c in 0..n {
            for j in 0..n {
                a[c * s + j] = self.m[c * n + j];
            }
            a[c * s + n] = self.k[c];
        }
        a[n * s + n] = Some(ExtNat::ZERO);
        for p in 0..s {
            let star = match a[p * s + p] {
                Some(w) if w > ExtNat::ZERO => Some(ExtNat::Inf),
                _ => Some(ExtNat::ZERO),
            };
            for i in 0..s {
                let Some(ip) = a[i * s + p] else { continue };
                let through = plus(Some(ip), star);
                for j in 0..s {
                    let v = plus(through, a[p * s + j]);
                    a[i * s + j] = join(a[i * s + j], v);
                }
            }
        }
        a
    }

    /// Counters that are `∞` after applying the map to a valuation whose
    /// `∞` entries are exactly `inf`.
    pub fn inf_image(&self, inf: &[bool]) -> Vec<bool> {
        (0..self.n)
            .map(|c| {
                self.k[c].is_some_and(ExtNat::is_inf)
                    || (0..self.n).any(|j| match self.m[c * self.n + j] {
                        Some(w) => w.is_inf() || inf[j],
                        None => false,
                    })
            })
            .collect()
    }

    /// True iff output `c` depends on `j` with a finite coefficient.
    pub fn depends(&self, c: usize, j: usize) -> bool {
        self.m[c * self.n + j].is_some()
    }

    /// True iff output `c` is `∞` whatever the input.
    pub fn forces_inf(&self, c: usize) -> bool {
        self.k[c].is_some_and(ExtNat::is_inf) || (0..self.n).any(|j| self.m[c * self.n + j].is_some_and(ExtNat::is_inf))
    }

    pub fn describe(&self, names: &[String]) -> String {
        let mut rows = Vec::new();
        for c in 0..self.n {
            let mut terms = Vec::new();
            for j in 0..self.n {
                if let Some(w) = self.m[c * self.n + j] {
                    terms.push(if w == ExtNat::ZERO { names[j].clone() } else { format!("{}+{w}", names[j]) });
                }
            }
            if let Some(k) = self.k[c] {
                terms.push(k.to_string());
            }
            if terms == [names[c].clone()] {
                continue;
            }
            rows.push(format!("{}=max({})", names[c], terms.join(",")));
        }
        format!("[{}]", rows.join(" "))
    }
}
