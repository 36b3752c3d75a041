//! Line-oriented tree format.
//!
//! ```text
//! tree example
//! node 0 label=a left=1 right=2
//! node 1 label=b left=- right=-
//! node 2 label=a left=0 right=0
//! root 0
//! ```
//!
//! Node attributes other than `left`/`right` are passed through to the
//! label-specific reader. Any other line keyword (e.g. `counters`) is kept
//! as a header for the caller. Blank lines and `#` comments are ignored.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{RegularTree, VertexId};
use crate::error::{parse as perr, Error, Result};

/// `key=value` pairs of one `node` line, in order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Attrs {
    pub line: usize,
    pub pairs: Vec<(String, String)>,
}

impl Attrs {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| perr(self.line, format!("missing attribute `{key}`")))
    }
}

#[derive(Debug, Clone)]
pub struct RawTree {
    pub name: String,
    /// Lines other than `tree`/`node`/`root`: (line number, keyword, rest).
    pub headers: Vec<(usize, String, String)>,
    pub tree: RegularTree<Attrs>,
}

/// Splits on whitespace, keeping bracketed groups (`{}`, `[]`, `()`) whole.
pub fn tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '{' | '[' | '(' => depth += 1,
            '}' | ']' | ')' => depth -= 1,
            _ => {}
        }
        if ch.is_whitespace() && depth <= 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

/// Non-comment, non-blank lines with 1-based numbers.
pub fn content_lines(src: &str) -> impl Iterator<Item = (usize, &str)> {
    src.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse(src: &str) -> Result<RawTree> {
    let mut name = None;
    let mut headers = Vec::new();
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut nodes: Vec<(Attrs, Option<(String, String)>)> = Vec::new();
    let mut root = None;
    for (ln, line) in content_lines(src) {
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "tree" => {
                if name.is_some() {
                    return Err(perr(ln, "duplicate `tree` header"));
                }
                name = Some(rest.to_string());
            }
            "node" => {
                let toks = tokens(rest);
                let id = toks.first().ok_or_else(|| perr(ln, "node line without id"))?;
                if ids.insert(id.to_string(), nodes.len()).is_some() {
                    return Err(perr(ln, format!("duplicate node id `{id}`")));
                }
                let mut attrs = Attrs {
                    line: ln,
                    pairs: Vec::new(),
                };
                let (mut left, mut right) = (None, None);
                for t in &toks[1..] {
                    let (k, v) = t
                        .split_once('=')
                        .ok_or_else(|| perr(ln, format!("expected key=value, found `{t}`")))?;
                    match k {
                        "left" => left = Some(v.to_string()),
                        "right" => right = Some(v.to_string()),
                        _ => attrs.pairs.push((k.to_string(), v.to_string())),
                    }
                }
                let children = match (left.as_deref(), right.as_deref()) {
                    (None | Some("-"), None | Some("-")) => None,
                    (Some(l), Some(r)) if l != "-" && r != "-" => Some((l.to_string(), r.to_string())),
                    _ => return Err(perr(ln, "a node has either two children or none")),
                };
                nodes.push((attrs, children));
            }
            "root" => root = Some((ln, rest.to_string())),
            _ => headers.push((ln, kw.to_string(), rest.to_string())),
        }
    }
    let name = name.ok_or_else(|| perr(1, "missing `tree <name>` header"))?;
    let (rln, root) = root.ok_or_else(|| perr(0, "missing `root` line"))?;
    let lookup = |ln: usize, id: &str| -> Result<VertexId> {
        ids.get(id)
            .map(|&i| VertexId(i))
            .ok_or_else(|| perr(ln, format!("unknown node id `{id}`")))
    };
    let root = lookup(rln, &root)?;
    let mut labels = Vec::with_capacity(nodes.len());
    let mut children = Vec::with_capacity(nodes.len());
    for (attrs, ch) in nodes {
        let ln = attrs.line;
        children.push(match ch {
            None => None,
            Some((l, r)) => Some([lookup(ln, &l)?, lookup(ln, &r)?]),
        });
        labels.push(attrs);
    }
    let tree = RegularTree::new(labels, children, root).map_err(|e| match e {
        Error::MalformedTree(m) => perr(0, m),
        other => other,
    })?;
    Ok(RawTree {
        name,
        headers,
        tree,
    })
}

/// Prints `tree` with canonical ids. `attrs` renders a label as the
/// attribute text placed between the id and `left=`.
pub fn write<L: Clone>(name: &str, headers: &[String], tree: &RegularTree<L>, attrs: impl Fn(&L) -> String) -> String {
    let tree = tree.canonical();
    let mut out = String::new();
    let _ = writeln!(out, "tree {name}");
    for h in headers {
        let _ = writeln!(out, "{h}");
    }
    for v in tree.vertices() {
        let (l, r) = match tree.children(v) {
            Some([l, r]) => (l.0.to_string(), r.0.to_string()),
            None => ("-".into(), "-".into()),
        };
        let a = attrs(tree.label(v));
        let sep = if a.is_empty() { "" } else { " " };
        let _ = writeln!(out, "node {}{sep}{a} left={l} right={r}", v.0);
    }
    let _ = writeln!(out, "root {}", tree.root().0);
    out
}

/// Trees whose labels are plain letters (`label=<letter>`).
pub fn parse_labeled(src: &str) -> Result<(String, RegularTree<String>)> {
    let raw = parse(src)?;
    let mut labels = Vec::with_capacity(raw.tree.len());
    for v in raw.tree.vertices() {
        labels.push(raw.tree.label(v).require("label")?.to_string());
    }
    let tree = raw.tree.map_labels(|v, _| labels[v.0].clone());
    Ok((raw.name, tree))
}

pub fn write_labeled(name: &str, tree: &RegularTree<String>) -> String {
    write(name, &[], tree, |l| format!("label={l}"))
}

/// Parses a `{a, b, c}` set literal into trimmed items.
pub fn parse_set(line: usize, s: &str) -> Result<Vec<String>> {
    let inner = s
        .trim()
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| perr(line, format!("expected a {{...}} set, found `{s}`")))?;
    Ok(split_top(inner, ',')
        .into_iter()
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect())
}

/// Splits on `sep` outside of brackets.
pub fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '{' | '[' | '(' => depth += 1,
            '}' | ']' | ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn format_set<I, T>(items: I) -> String
where
    I: IntoIterator<Item = T>,
    T: std::fmt::Display,
{
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}
