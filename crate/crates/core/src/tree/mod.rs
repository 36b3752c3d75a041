//! Finite presentations of regular binary trees.
//!
//! A [`RegularTree`] is a finite graph: each vertex carries a label and is
//! either a leaf or has an ordered pair of children. Its unfolding from the
//! root is a (possibly infinite) binary tree in which every node has zero or
//! two children. One vertex presents one subtree, so finite trees are simply
//! presentations without cycles.

mod address;
pub mod text;
mod upword;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::Hash;

pub use address::{Address, UpPath};
pub use upword::UpWord;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularTree<L> {
    labels: Vec<L>,
    children: Vec<Option<[VertexId; 2]>>,
    root: VertexId,
}

impl<L> RegularTree<L> {
    /// Builds a presentation, checking that child ids are in range and that
    /// every vertex is reachable from the root.
    pub fn new(labels: Vec<L>, children: Vec<Option<[VertexId; 2]>>, root: VertexId) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::MalformedTree("a tree needs at least one vertex".into()));
        }
        if labels.len() != children.len() {
            return Err(Error::MalformedTree(format!(
                "{} labels but {} child entries",
                labels.len(),
                children.len()
            )));
        }
        let n = labels.len();
        if root.0 >= n {
            return Err(Error::MalformedTree(format!("root {} out of range", root.0)));
        }
        for (v, ch) in children.iter().enumerate() {
            if let Some([l, r]) = ch {
                if l.0 >= n || r.0 >= n {
                    return Err(Error::MalformedTree(format!("vertex {v} has a child out of range")));
                }
            }
        }
        let tree = RegularTree {
            labels,
            children,
            root,
        };
        let reach = tree.reachable();
        if let Some(v) = reach.iter().position(|r| !r) {
            return Err(Error::MalformedTree(format!("vertex {v} is unreachable from the root")));
        }
        Ok(tree)
    }

    /// Like [`RegularTree::new`] but silently drops unreachable vertices.
    pub fn new_pruned(labels: Vec<L>, children: Vec<Option<[VertexId; 2]>>, root: VertexId) -> Result<Self>
    where
        L: Clone,
    {
        let raw = RegularTree {
            labels,
            children,
            root,
        };
        if raw.root.0 >= raw.labels.len() || raw.labels.len() != raw.children.len() {
            return RegularTree::new(raw.labels, raw.children, raw.root);
        }
        for ch in raw.children.iter().flatten() {
            if ch.iter().any(|c| c.0 >= raw.labels.len()) {
                return RegularTree::new(raw.labels, raw.children, raw.root);
            }
        }
        Ok(raw.canonical())
    }

    pub fn leaf(label: L) -> Self {
        RegularTree {
            labels: vec![label],
            children: vec![None],
            root: VertexId(0),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn label(&self, v: VertexId) -> &L {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn children(&self, v: VertexId) -> Option<[VertexId; 2]> {
        self.children[v.0]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v.0].is_none()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len()).map(VertexId)
    }

    /// Successor lists (children, in order) for graph algorithms.
    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.children[v.0].into_iter().flatten()
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.labels.len()];
        let mut stack = vec![self.root];
        seen[self.root.0] = true;
        while let Some(v) = stack.pop() {
            for c in self.successors(v) {
                if !seen[c.0] {
                    seen[c.0] = true;
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// The vertex presenting the subtree at `addr`.
    pub fn resolve(&self, addr: &Address) -> Result<VertexId> {
        self.resolve_from(self.root, addr)
    }

    pub fn resolve_from(&self, start: VertexId, addr: &Address) -> Result<VertexId> {
        let mut v = start;
        for &dir in addr.dirs() {
            match self.children[v.0] {
                Some(ch) => v = ch[dir as usize],
                None => return Err(Error::InvalidAddress(addr.to_string())),
            }
        }
        Ok(v)
    }

    /// True iff the presentation has no cycle, i.e. the unfolding is finite.
    pub fn is_finite(&self) -> bool {
        // Kahn's algorithm on the child relation.
        let n = self.len();
        let mut indeg = vec![0usize; n];
        for v in self.vertices() {
            for c in self.successors(v) {
                indeg[c.0] += 1;
            }
        }
        let mut queue: Vec<VertexId> = self.vertices().filter(|v| indeg[v.0] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for c in self.successors(v) {
                indeg[c.0] -= 1;
                if indeg[c.0] == 0 {
                    queue.push(c);
                }
            }
        }
        seen == n
    }

    pub fn map_labels<M>(&self, mut f: impl FnMut(VertexId, &L) -> M) -> RegularTree<M> {
        RegularTree {
            labels: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| f(VertexId(i), l))
                .collect(),
            children: self.children.clone(),
            root: self.root,
        }
    }

    /// Renumbers vertices in breadth-first order from the root (left child
    /// first) and drops unreachable ones.
    pub fn canonical(&self) -> Self
    where
        L: Clone,
    {
        let mut order = Vec::with_capacity(self.len());
        let mut index: HashMap<VertexId, usize> = HashMap::new();
        let mut queue = VecDeque::from([self.root]);
        index.insert(self.root, 0);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for c in self.successors(v) {
                if !index.contains_key(&c) {
                    index.insert(c, index.len());
                    queue.push_back(c);
                }
            }
        }
        RegularTree {
            labels: order.iter().map(|v| self.labels[v.0].clone()).collect(),
            children: order
                .iter()
                .map(|v| self.children[v.0].map(|[l, r]| [VertexId(index[&l]), VertexId(index[&r])]))
                .collect(),
            root: VertexId(0),
        }
    }

    /// Identifies vertices presenting equal subtrees (bisimulation quotient).
    pub fn minimize(&self) -> Self
    where
        L: Clone + Eq + Hash,
    {
        let n = self.len();
        let mut class: Vec<usize> = {
            let mut ids: HashMap<(&L, bool), usize> = HashMap::new();
            self.vertices()
                .map(|v| {
                    let k = (&self.labels[v.0], self.is_leaf(v));
                    let next = ids.len();
                    *ids.entry(k).or_insert(next)
                })
                .collect()
        };
        loop {
            let mut ids: HashMap<(usize, Option<[usize; 2]>), usize> = HashMap::new();
            let refined: Vec<usize> = (0..n)
                .map(|v| {
                    let sig = (class[v], self.children[v].map(|[l, r]| [class[l.0], class[r.0]]));
                    let next = ids.len();
                    *ids.entry(sig).or_insert(next)
                })
                .collect();
            let done = ids.len() == class.iter().copied().max().map_or(0, |m| m + 1);
            class = refined;
            if done {
                break;
            }
        }
        let k = class.iter().copied().max().map_or(0, |m| m + 1);
        let mut rep = vec![usize::MAX; k];
        for v in 0..n {
            if rep[class[v]] == usize::MAX {
                rep[class[v]] = v;
            }
        }
        let quotient = RegularTree {
            labels: rep.iter().map(|&v| self.labels[v].clone()).collect(),
            children: rep
                .iter()
                .map(|&v| self.children[v].map(|[l, r]| [VertexId(class[l.0]), VertexId(class[r.0])]))
                .collect(),
            root: VertexId(class[self.root.0]),
        };
        quotient.canonical()
    }

    /// The finite tree of all nodes at depth `<= depth`; nodes at the cut
    /// become leaves. Vertices of the result are nodes in breadth-first order.
    pub fn truncate(&self, depth: usize) -> RegularTree<L>
    where
        L: Clone,
    {
        let mut labels = Vec::new();
        let mut children: Vec<Option<[VertexId; 2]>> = Vec::new();
        let mut queue = VecDeque::from([(self.root, 0usize)]);
        labels.push(self.labels[self.root.0].clone());
        children.push(None);
        let mut idx = 0;
        while let Some((v, d)) = queue.pop_front() {
            if d < depth {
                if let Some([l, r]) = self.children[v.0] {
                    let li = labels.len();
                    labels.push(self.labels[l.0].clone());
                    children.push(None);
                    labels.push(self.labels[r.0].clone());
                    children.push(None);
                    children[idx] = Some([VertexId(li), VertexId(li + 1)]);
                    queue.push_back((l, d + 1));
                    queue.push_back((r, d + 1));
                }
            }
            idx += 1;
        }
        RegularTree {
            labels,
            children,
            root: VertexId(0),
        }
    }

    /// Unfolds a finite tree into explicit nodes.
    pub fn unfold(&self) -> Result<Unfolding> {
        if !self.is_finite() {
            return Err(Error::NotFinite);
        }
        let mut u = Unfolding::default();
        let mut queue = VecDeque::from([(self.root, None::<usize>, Address::root())]);
        while let Some((v, parent, addr)) = queue.pop_front() {
            let id = u.vertex.len();
            u.vertex.push(v);
            u.parent.push(parent);
            u.children.push(None);
            u.index.insert(addr.clone(), id);
            u.address.push(addr.clone());
            if let Some(p) = parent {
                let slot = u.children[p].get_or_insert([usize::MAX; 2]);
                let dir = *addr.dirs().last().expect("non-root node has a direction") as usize;
                slot[dir] = id;
            }
            if let Some([l, r]) = self.children[v.0] {
                queue.push_back((l, Some(id), addr.child(0)));
                queue.push_back((r, Some(id), addr.child(1)));
            }
        }
        Ok(u)
    }

    /// Product of two presentations with identical unfolded domains.
    pub fn product<M: Clone>(&self, other: &RegularTree<M>) -> Result<RegularTree<(L, M)>>
    where
        L: Clone,
    {
        let mut index: HashMap<(VertexId, VertexId), usize> = HashMap::new();
        let mut pairs = vec![(self.root, other.root)];
        index.insert((self.root, other.root), 0);
        let mut children = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            let ch = match (self.children(a), other.children(b)) {
                (None, None) => None,
                (Some(ca), Some(cb)) => {
                    let mut out = [VertexId(0); 2];
                    for d in 0..2 {
                        let key = (ca[d], cb[d]);
                        let next = pairs.len();
                        let id = *index.entry(key).or_insert_with(|| {
                            pairs.push(key);
                            next
                        });
                        out[d] = VertexId(id);
                    }
                    Some(out)
                }
                _ => {
                    return Err(Error::ShapeMismatch(format!(
                        "vertex pair ({}, {}) disagrees on leafness",
                        a.0, b.0
                    )))
                }
            };
            children.push(ch);
            i += 1;
        }
        let labels = pairs
            .iter()
            .map(|&(a, b)| (self.label(a).clone(), other.label(b).clone()))
            .collect();
        Ok(RegularTree {
            labels,
            children,
            root: VertexId(0),
        })
    }

    /// Checks that `other` unfolds to a tree of the same shape and, when
    /// `same_label` holds on every reachable vertex pair, the same labels.
    pub fn agrees_with<M>(&self, other: &RegularTree<M>, same_label: impl Fn(&L, &M) -> bool) -> Result<()> {
        let mut seen: HashMap<(VertexId, VertexId), ()> = HashMap::new();
        let mut stack = vec![(self.root, other.root)];
        seen.insert((self.root, other.root), ());
        while let Some((a, b)) = stack.pop() {
            if !same_label(self.label(a), other.label(b)) {
                return Err(Error::ShapeMismatch(format!(
                    "labels differ at vertex pair ({}, {})",
                    a.0, b.0
                )));
            }
            match (self.children(a), other.children(b)) {
                (None, None) => {}
                (Some(ca), Some(cb)) => {
                    for d in 0..2 {
                        if seen.insert((ca[d], cb[d]), ()).is_none() {
                            stack.push((ca[d], cb[d]));
                        }
                    }
                }
                _ => {
                    return Err(Error::ShapeMismatch(format!(
                        "vertex pair ({}, {}) disagrees on leafness",
                        a.0, b.0
                    )))
                }
            }
        }
        Ok(())
    }

    /// Labels along an ultimately periodic path, normalized.
    pub fn path_word(&self, path: &UpPath) -> Result<UpWord<L>>
    where
        L: Clone + Eq,
    {
        let start = path.validate(self)?;
        let mut prefix = Vec::with_capacity(path.prefix().len());
        let mut v = self.root;
        for &d in path.prefix().dirs() {
            prefix.push(self.labels[v.0].clone());
            v = self.children[v.0].expect("validated")[d as usize];
        }
        debug_assert_eq!(v, start);
        let mut cycle = Vec::with_capacity(path.cycle().len());
        for &d in path.cycle().dirs() {
            cycle.push(self.labels[v.0].clone());
            v = self.children[v.0].expect("validated")[d as usize];
        }
        Ok(UpWord::new(prefix, cycle).normalized())
    }

    /// Vertices visited by the periodic part of `path` (after validation).
    pub fn path_cycle_vertices(&self, path: &UpPath) -> Result<Vec<VertexId>> {
        let mut v = path.validate(self)?;
        let mut out = Vec::with_capacity(path.cycle().len());
        for &d in path.cycle().dirs() {
            out.push(v);
            v = self.children[v.0].expect("validated")[d as usize];
        }
        Ok(out)
    }

    /// Shortest address from the root to `target`.
    pub fn address_of(&self, target: VertexId) -> Option<Address> {
        let mut prev: BTreeMap<VertexId, (VertexId, u8)> = BTreeMap::new();
        let mut queue = VecDeque::from([self.root]);
        let mut seen = vec![false; self.len()];
        seen[self.root.0] = true;
        while let Some(v) = queue.pop_front() {
            if v == target {
                let mut dirs = Vec::new();
                let mut cur = v;
                while let Some(&(p, d)) = prev.get(&cur) {
                    dirs.push(d);
                    cur = p;
                }
                dirs.reverse();
                return Some(Address::from_dirs(dirs));
            }
            if let Some(ch) = self.children[v.0] {
                for (d, c) in ch.into_iter().enumerate() {
                    if !seen[c.0] {
                        seen[c.0] = true;
                        prev.insert(c, (v, d as u8));
                        queue.push_back(c);
                    }
                }
            }
        }
        None
    }

    /// Directions of a walk from `from` through `via` (a list of successive
    /// vertices, each a child of the previous one).
    pub fn directions(&self, from: VertexId, via: &[VertexId]) -> Option<Address> {
        let mut dirs = Vec::with_capacity(via.len());
        let mut cur = from;
        for &next in via {
            let ch = self.children[cur.0]?;
            let d = ch.iter().position(|&c| c == next)?;
            dirs.push(d as u8);
            cur = next;
        }
        Some(Address::from_dirs(dirs))
    }
}

/// Explicit nodes of a finite tree, in breadth-first order (node 0 is the
/// root).
#[derive(Debug, Clone, Default)]
pub struct Unfolding {
    pub vertex: Vec<VertexId>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Option<[usize; 2]>>,
    pub address: Vec<Address>,
    pub index: HashMap<Address, usize>,
}

impl Unfolding {
    pub fn len(&self) -> usize {
        self.vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty()
    }

    pub fn node(&self, addr: &Address) -> Result<usize> {
        self.index
            .get(addr)
            .copied()
            .ok_or_else(|| Error::InvalidAddress(addr.to_string()))
    }

    /// True iff `a` is a strict ancestor of `b`.
    pub fn is_strict_ancestor(&self, a: usize, b: usize) -> bool {
        let mut cur = self.parent[b];
        while let Some(p) = cur {
            if p == a {
                return true;
            }
            cur = self.parent[p];
        }
        false
    }

    /// Strict ancestors of `node`, nearest first.
    pub fn ancestors(&self, node: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self.parent[node];
        while let Some(p) = cur {
            out.push(p);
            cur = self.parent[p];
        }
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.children[i].is_none())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    /// Root `a` with distinct leaf children `b` (left) and `c` (right).
    fn three() -> RegularTree<char> {
        RegularTree::new(vec!['a', 'b', 'c'], vec![Some([v(1), v(2)]), None, None], v(0)).unwrap()
    }

    fn constant(c: char) -> RegularTree<char> {
        RegularTree::new(vec![c], vec![Some([v(0), v(0)])], v(0)).unwrap()
    }

    /// a/b alternating at every level.
    fn alternating() -> RegularTree<char> {
        RegularTree::new(vec!['a', 'b'], vec![Some([v(1), v(1)]), Some([v(0), v(0)])], v(0)).unwrap()
    }

    #[test]
    fn resolve_examples() {
        let t = constant('a');
        assert_eq!(t.resolve(&"0101".parse().unwrap()).unwrap(), v(0));
        assert_eq!(three().resolve(&Address::root()).unwrap(), v(0));
        assert_eq!(three().resolve(&"1".parse().unwrap()).unwrap(), v(2));
        assert!(matches!(
            three().resolve(&"10".parse().unwrap()),
            Err(Error::InvalidAddress(_))
        ));
    }

    #[test]
    fn construction_rejects_unreachable_and_out_of_range() {
        assert!(RegularTree::new(vec!['a', 'b'], vec![None, None], v(0)).is_err());
        assert!(RegularTree::new(vec!['a'], vec![Some([v(0), v(3)])], v(0)).is_err());
        let pruned = RegularTree::new_pruned(vec!['a', 'b'], vec![None, None], v(0)).unwrap();
        assert_eq!(pruned.len(), 1);
    }

    #[test]
    fn truncation_sizes() {
        assert_eq!(three().truncate(0).len(), 1);
        assert_eq!(constant('a').truncate(2).len(), 7);
        assert_eq!(RegularTree::leaf('x').truncate(5).len(), 1);
        assert!(constant('a').truncate(3).is_finite());
    }

    #[test]
    fn product_of_constants_is_constant() {
        let p = constant('a').product(&constant('b')).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(*p.label(p.root()), ('a', 'b'));
    }

    #[test]
    fn product_with_self_is_diagonal() {
        let t = alternating();
        let p = t.product(&t).unwrap();
        assert!(p.labels().iter().all(|(x, y)| x == y));
    }

    #[test]
    fn product_detects_shape_mismatch() {
        assert!(matches!(
            three().product(&constant('z')),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn product_against_truncations() {
        // 3-vertex cyclic tree: x -> (y, z), y -> (x, x), z -> (z, y)
        let t3 = RegularTree::new(
            vec!['x', 'y', 'z'],
            vec![Some([v(1), v(2)]), Some([v(0), v(0)]), Some([v(2), v(1)])],
            v(0),
        )
        .unwrap();
        let t2 = alternating();
        let p = t2.product(&t3).unwrap();
        assert!(p.len() <= 6);
        let depth = 4;
        let tp = p.truncate(depth);
        let a = t2.truncate(depth);
        let b = t3.truncate(depth);
        // truncations are BFS-numbered node-by-node, so they align index-wise
        assert_eq!(tp.len(), a.len());
        for i in 0..tp.len() {
            assert_eq!(*tp.label(v(i)), (*a.label(v(i)), *b.label(v(i))));
        }
    }

    #[test]
    fn path_words() {
        let w = constant('a')
            .path_word(&UpPath::new("01".parse().unwrap(), "1".parse().unwrap()))
            .unwrap();
        assert_eq!(w, UpWord::new(vec![], vec!['a']));

        // left spine alternating a/b: the a-vertex's left child is b and
        // the b-vertex's left child is a
        let w = alternating()
            .path_word(&UpPath::new(Address::root(), "00".parse().unwrap()))
            .unwrap();
        // unfold six levels by hand: a b a b a b ...
        let expect: Vec<char> = "ababab".chars().collect();
        assert_eq!(w.take(6), expect);
        assert_eq!(w, UpWord::new(vec![], vec!['a', 'b']));

        let w = three();
        assert!(w
            .path_word(&UpPath::new(Address::root(), "0".parse().unwrap()))
            .is_err());
    }

    #[test]
    fn path_word_prefix_labels() {
        let t = RegularTree::new(
            vec!['r', 's', 'u', 'w'],
            vec![Some([v(1), v(2)]), Some([v(3), v(2)]), Some([v(2), v(2)]), Some([v(3), v(3)])],
            v(0),
        )
        .unwrap();
        let prefix: Address = "010".parse().unwrap();
        let w = t
            .path_word(&UpPath::new(prefix.clone(), "1".parse().unwrap()))
            .unwrap();
        let letters = w.take(3);
        for i in 0..3 {
            let a = Address::from_dirs(prefix.dirs()[..i].to_vec());
            assert_eq!(letters[i], *t.label(t.resolve(&a).unwrap()));
        }
    }

    #[test]
    fn minimize_merges_bisimilar_vertices() {
        let t = RegularTree::new(
            vec!['a', 'a', 'a'],
            vec![Some([v(1), v(2)]), Some([v(2), v(1)]), Some([v(0), v(0)])],
            v(0),
        )
        .unwrap();
        assert_eq!(t.minimize().len(), 1);
        assert_eq!(three().minimize().len(), 3);
    }

    #[test]
    fn unfolding_of_shared_leaves() {
        let t = RegularTree::new(vec!['a', 'b'], vec![Some([v(1), v(1)]), None], v(0)).unwrap();
        let u = t.unfold().unwrap();
        assert_eq!(u.len(), 3);
        assert_eq!(u.node(&"1".parse().unwrap()).unwrap(), 2);
        assert!(u.is_strict_ancestor(0, 2));
        assert!(!u.is_strict_ancestor(2, 2));
        assert!(matches!(constant('a').unfold(), Err(Error::NotFinite)));
    }
}
