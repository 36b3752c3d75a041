/// An ultimately periodic ω-word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UpWord<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

impl<T> UpWord<T> {
    pub fn new(prefix: Vec<T>, cycle: Vec<T>) -> Self {
        assert!(!cycle.is_empty(), "an ultimately periodic word needs a nonempty loop");
        UpWord { prefix, cycle }
    }

    pub fn get(&self, i: usize) -> &T {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    pub fn take(&self, n: usize) -> Vec<T>
    where
        T: Clone,
    {
        (0..n).map(|i| self.get(i).clone()).collect()
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> UpWord<U> {
        UpWord {
            prefix: self.prefix.iter().map(&mut f).collect(),
            cycle: self.cycle.iter().map(&mut f).collect(),
        }
    }

    /// Same ω-word with the loop rotated left by `k` (prefix absorbs the
    /// first `k` loop letters).
    pub fn rotated(&self, k: usize) -> Self
    where
        T: Clone,
    {
        let k = k % self.cycle.len();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..k]);
        let mut cycle = self.cycle[k..].to_vec();
        cycle.extend_from_slice(&self.cycle[..k]);
        UpWord { prefix, cycle }
    }

    /// Canonical representation: primitive loop, shortest prefix.
    pub fn normalized(&self) -> Self
    where
        T: Clone + Eq,
    {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| self.cycle[i] == self.cycle[i % p]))
            .unwrap_or(n);
        let mut prefix = self.prefix.clone();
        let mut cycle = self.cycle[..period].to_vec();
        while let Some(last) = prefix.last() {
            if *last == cycle[cycle.len() - 1] {
                let l = prefix.pop().expect("nonempty");
                cycle.rotate_right(1);
                cycle[0] = l;
            } else {
                break;
            }
        }
        UpWord { prefix, cycle }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let w = UpWord::new(vec!['a'], vec!['b', 'a']);
        assert_eq!(w.normalized(), UpWord::new(vec![], vec!['a', 'b']));
        let w = UpWord::new(vec!['x', 'a', 'a'], vec!['a', 'a', 'a']);
        assert_eq!(w.normalized(), UpWord::new(vec!['x'], vec!['a']));
        let w = UpWord::new(vec!['a', 'b'], vec!['c', 'd']);
        assert_eq!(w.rotated(1).normalized(), w);
    }

    #[test]
    fn indexing() {
        let w = UpWord::new(vec![1], vec![2, 3]);
        assert_eq!(w.take(6), vec![1, 2, 3, 2, 3, 2]);
    }
}
