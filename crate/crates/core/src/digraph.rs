//! Finite digraphs without self-loops: parsing, transitive closure and
//! reachability queries.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Dense vertex index into a [`Digraph`]. Labels live on the digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DigraphError {
    #[error("line {line}: malformed edge line `{content}`")]
    Malformed { line: usize, content: String },
    #[error("line {line}: self-loop on `{label}` is not allowed")]
    SelfLoop { line: usize, label: String },
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown vertex label `{0}`")]
    UnknownLabel(String),
}

/// A digraph `(V, E)` with `E ⊆ V × V` and no edges of the form `u → u`.
///
/// Vertices keep insertion order; adjacency sets are ordered by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Digraph {
    labels: Vec<String>,
    lookup: HashMap<String, usize>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Digraph on vertices `v0 .. v{n-1}` with the given index edges.
    ///
    /// Panics on a self-loop or an out-of-range endpoint; meant for fixtures
    /// and generators where both are programming errors.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new();
        for i in 0..n {
            g.add_vertex(&format!("v{i}"));
        }
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))
                .expect("fixture edge must be valid");
        }
        g
    }

    /// Returns the id of `label`, inserting it if it is new.
    pub fn add_vertex(&mut self, label: &str) -> VertexId {
        if let Some(&i) = self.lookup.get(label) {
            return VertexId(i);
        }
        let i = self.labels.len();
        self.labels.push(label.to_string());
        self.lookup.insert(label.to_string(), i);
        self.succ.push(BTreeSet::new());
        self.pred.push(BTreeSet::new());
        VertexId(i)
    }

    /// Inserts `u → v`. Returns `Ok(false)` when the edge already existed.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, DigraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(DigraphError::SelfLoop {
                line: 0,
                label: self.labels[u.0].clone(),
            });
        }
        let fresh = self.succ[u.0].insert(v.0);
        self.pred[v.0].insert(u.0);
        Ok(fresh)
    }

    /// Parses the edge-list format: `a b` or `a -> b` per line, `#` comments,
    /// blank lines, and `vertex a` for isolated vertices.
    pub fn parse(text: &str) -> Result<Self, DigraphError> {
        let mut g = Self::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let malformed = || DigraphError::Malformed {
                line,
                content: raw.trim().to_string(),
            };
            let (a, b) = if content.contains("->") {
                let mut parts = content.splitn(2, "->").map(str::trim);
                let a = parts.next().unwrap_or("");
                let b = parts.next().unwrap_or("");
                if !is_token(a) || !is_token(b) {
                    return Err(malformed());
                }
                (a, b)
            } else {
                let tokens: Vec<&str> = content.split_whitespace().collect();
                match tokens.as_slice() {
                    ["vertex", label] => {
                        g.add_vertex(label);
                        continue;
                    }
                    [a, b] => (*a, *b),
                    _ => return Err(malformed()),
                }
            };
            if a == b {
                return Err(DigraphError::SelfLoop {
                    line,
                    label: a.to_string(),
                });
            }
            let u = g.add_vertex(a);
            let v = g.add_vertex(b);
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(BTreeSet::len).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len()).map(VertexId)
    }

    /// Edges in lexicographic order of endpoint indices.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(u, out)| out.iter().map(move |&v| (VertexId(u), VertexId(v))))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ.get(u).is_some_and(|s| s.contains(&v))
    }

    pub fn successors(&self, v: usize) -> &BTreeSet<usize> {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &BTreeSet<usize> {
        &self.pred[v]
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.0]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId, DigraphError> {
        self.lookup
            .get(label)
            .map(|&i| VertexId(i))
            .ok_or_else(|| DigraphError::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.labels.len()
    }

    fn check(&self, v: VertexId) -> Result<(), DigraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(DigraphError::UnknownVertex(v))
        }
    }

    /// Vertices reachable from `u` by a directed path of length at least one.
    /// `u` itself is included only when it lies on a directed cycle.
    pub fn reachable_set(&self, u: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = self.succ[u].iter().copied().collect();
        seen.extend(self.succ[u].iter().copied());
        while let Some(x) = queue.pop_front() {
            for &y in &self.succ[x] {
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn reachable(&self, u: VertexId, v: VertexId) -> Result<bool, DigraphError> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.reachable_set(u.0).contains(&v.0))
    }

    pub fn on_directed_cycle(&self, v: VertexId) -> Result<bool, DigraphError> {
        self.reachable(v, v)
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, DigraphError> {
        self.check(v)?;
        Ok(self.succ[v.0].len() + self.pred[v.0].len())
    }

    /// Shortest directed path `u … v` of length at least one, as a vertex
    /// sequence, or `None` when `v` is not reachable from `u`.
    pub fn shortest_path(&self, u: usize, v: usize) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let mut visited = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in &self.succ[u] {
            if !visited[s] {
                visited[s] = true;
                parent[s] = Some(u);
                queue.push_back(s);
            }
        }
        while let Some(x) = queue.pop_front() {
            if x == v {
                let mut path = vec![v];
                let mut cur = v;
                loop {
                    let p = parent[cur].expect("bfs parent");
                    path.push(p);
                    if p == u {
                        break;
                    }
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &y in &self.succ[x] {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = Some(x);
                    queue.push_back(y);
                }
            }
        }
        None
    }

    /// The smallest transitive digraph containing `self`, on the same vertex
    /// set. Pairs `u → u` forced by cycles are left out.
    pub fn transitive_closure(&self) -> Digraph {
        let mut closed = self.clone();
        for u in 0..self.vertex_count() {
            for w in self.reachable_set(u) {
                if w != u {
                    closed.succ[u].insert(w);
                    closed.pred[w].insert(u);
                }
            }
        }
        closed
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive_closure().edge_count() == self.edge_count()
    }

    /// Edges of `other` that are not edges of `self`, in lexicographic order.
    pub fn missing_edges(&self, other: &Digraph) -> Vec<(VertexId, VertexId)> {
        other
            .edges()
            .filter(|&(u, v)| !self.has_edge(u.0, v.0))
            .collect()
    }

    /// Serializes back into the edge-list format, isolated vertices first.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            if self.succ[v.0].is_empty() && self.pred[v.0].is_empty() {
                out.push_str(&format!("vertex {}\n", self.label(v)));
            }
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("{} -> {}\n", self.label(u), self.label(v)));
        }
        out
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}
