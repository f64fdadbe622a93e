//! Elementary paths, chains of paths, the boundary operator and the
//! `Ω_n` subspaces of allowed chains with allowed boundary.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::digraph::{Digraph, DigraphError, VertexId};
use crate::linalg::{Field, Matrix, Subspace};

/// An elementary `n`-path `v_0 v_1 … v_n` (repeats permitted).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(Vec<usize>);

impl Path {
    /// Panics on an empty sequence.
    pub fn new(vertices: Vec<usize>) -> Self {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        Self(vertices)
    }

    pub fn vertex(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    /// `d_i`: the path with the `i`-th vertex removed. Requires `dim >= 1`.
    pub fn face(&self, i: usize) -> Path {
        let mut v = self.0.clone();
        v.remove(i);
        Path(v)
    }

    /// The path with `w` inserted so that it becomes the `i`-th vertex.
    pub fn insert(&self, i: usize, w: usize) -> Path {
        let mut v = self.0.clone();
        v.insert(i, w);
        Path(v)
    }

    /// Every consecutive pair is an edge of `g` (hence consecutive vertices
    /// differ). Vertices outside `g` make the path simply not allowed.
    pub fn is_allowed_in(&self, g: &Digraph) -> bool {
        self.0.iter().all(|&v| v < g.vertex_count())
            && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn label(&self, g: &Digraph) -> String {
        self.0.iter().map(|&v| g.label(VertexId(v))).collect()
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|v| format!("v{v}")).collect();
        write!(f, "{}", s.join(""))
    }
}

pub fn is_allowed(g: &Digraph, p: &Path) -> Result<bool, DigraphError> {
    if let Some(&v) = p.0.iter().find(|&&v| v >= g.vertex_count()) {
        return Err(DigraphError::UnknownVertex(VertexId(v)));
    }
    Ok(p.is_allowed_in(g))
}

/// A finite linear combination of `n`-paths; zero coefficients are never
/// stored.
#[derive(Clone, PartialEq)]
pub struct Chain<F: Field> {
    field: F,
    dim: usize,
    terms: BTreeMap<Path, F::Elem>,
}

impl<F: Field> fmt::Debug for Chain<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().map(|(p, c)| (p, self.field.render(c))))
            .finish()
    }
}

impl<F: Field> Chain<F> {
    pub fn zero(field: &F, dim: usize) -> Self {
        Self {
            field: field.clone(),
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_path(field: &F, p: Path) -> Self {
        let mut c = Self::zero(field, p.dim());
        c.add_term(p, field.one());
        c
    }

    /// Builds a chain from `(path, integer coefficient)` pairs.
    pub fn from_terms(field: &F, dim: usize, terms: &[(Path, i64)]) -> Self {
        let mut c = Self::zero(field, dim);
        for (p, k) in terms {
            c.add_term(p.clone(), field.from_i64(*k));
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Path, &F::Elem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, p: &Path) -> F::Elem {
        self.terms
            .get(p)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, p: Path, c: F::Elem) {
        assert_eq!(p.dim(), self.dim, "chain terms share one dimension");
        let f = &self.field;
        let sum = match self.terms.get(&p) {
            Some(old) => f.add(old, &c),
            None => c,
        };
        if f.is_zero(&sum) {
            self.terms.remove(&p);
        } else {
            self.terms.insert(p, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, k: &F::Elem) -> Self {
        let mut out = Self::zero(&self.field, self.dim);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), self.field.mul(c, k));
        }
        out
    }

    /// `⟨self, p⟩` with the elementary paths orthonormal.
    pub fn inner(&self, p: &Path) -> F::Elem {
        self.coefficient(p)
    }

    /// Support is contained in the allowed paths of `g`.
    pub fn is_allowed_in(&self, g: &Digraph) -> bool {
        self.terms.keys().all(|p| p.is_allowed_in(g))
    }

    /// Coordinates in `basis`; `None` when a term lies outside the basis.
    pub fn coordinates(&self, basis: &PathBasis) -> Option<Vec<F::Elem>> {
        let mut v = vec![self.field.zero(); basis.len()];
        for (p, c) in &self.terms {
            v[basis.position(p)?] = c.clone();
        }
        Some(v)
    }

    pub fn from_coordinates(field: &F, basis: &PathBasis, coords: &[F::Elem]) -> Self {
        let mut c = Self::zero(field, basis.dim());
        for (p, x) in basis.paths().iter().zip(coords) {
            if !field.is_zero(x) {
                c.add_term(p.clone(), x.clone());
            }
        }
        c
    }

    /// Signed sum of path labels, terms in descending path order, e.g.
    /// `v0v2 - v0v1`.
    pub fn render(&self, g: &Digraph) -> String {
        render_terms(
            &self.field,
            self.terms
                .iter()
                .rev()
                .map(|(p, c)| (p.label(g), c.clone())),
        )
    }
}

pub(crate) fn render_terms<F: Field>(
    field: &F,
    terms: impl Iterator<Item = (String, F::Elem)>,
) -> String {
    let mut out = String::new();
    for (label, c) in terms {
        let (negative, magnitude) = match field.unit_sign(&c) {
            Some(positive) => (!positive, None),
            None if field.is_negative(&c) => (true, Some(field.render(&field.neg(&c)))),
            None => (false, Some(field.render(&c))),
        };
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        if let Some(m) = magnitude {
            out.push_str(&m);
            out.push(' ');
        }
        out.push_str(&label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// `∂_n(v_0 … v_n) = Σ (-1)^i d_i(v_0 … v_n)` over all elementary paths,
/// including faces with consecutive repeated vertices. The boundary of a
/// 0-chain is the empty chain.
pub fn boundary<F: Field>(c: &Chain<F>) -> Chain<F> {
    let f = &c.field;
    if c.dim == 0 {
        return Chain::zero(f, 0);
    }
    let mut out = Chain::zero(f, c.dim - 1);
    for (p, coef) in &c.terms {
        for i in 0..=p.dim() {
            let k = if i % 2 == 0 {
                coef.clone()
            } else {
                f.neg(coef)
            };
            out.add_term(p.face(i), k);
        }
    }
    out
}

/// Ordered basis of allowed elementary `n`-paths (lexicographic by vertex
/// index).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBasis {
    dim: usize,
    paths: Vec<Path>,
    index: HashMap<Path, usize>,
}

impl PathBasis {
    pub fn from_paths(dim: usize, mut paths: Vec<Path>) -> Self {
        paths.sort();
        paths.dedup();
        let index = paths
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        Self { dim, paths, index }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn position(&self, p: &Path) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn labels(&self, g: &Digraph) -> Vec<String> {
        self.paths.iter().map(|p| p.label(g)).collect()
    }

    /// `index_map[i]` = position in `larger` of this basis' `i`-th path.
    /// Panics if some path is missing from `larger`.
    pub fn embedding_into(&self, larger: &PathBasis) -> Vec<usize> {
        self.paths
            .iter()
            .map(|p| {
                larger
                    .position(p)
                    .expect("basis path missing from larger basis")
            })
            .collect()
    }
}

/// All allowed elementary `n`-paths of `g`, by depth-first extension along
/// out-edges (ordered adjacency yields lexicographic order directly).
pub fn enumerate_allowed(g: &Digraph, n: usize) -> PathBasis {
    fn extend(g: &Digraph, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Path>) {
        if cur.len() == n + 1 {
            out.push(Path(cur.clone()));
            return;
        }
        let last = *cur.last().expect("nonempty prefix");
        for &w in g.successors(last) {
            cur.push(w);
            extend(g, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for v in 0..g.vertex_count() {
        extend(g, n, &mut vec![v], &mut out);
    }
    PathBasis::from_paths(n, out)
}

/// Matrix of `∂_n : P_n(g) → P_{n-1}(g)` in the row convention (one row per
/// allowed `n`-path). Faces that are not allowed are dropped; for `n = 0`
/// the result has no columns.
pub fn boundary_matrix<F: Field>(
    field: &F,
    domain: &PathBasis,
    codomain: Option<&PathBasis>,
) -> Matrix<F> {
    let Some(codomain) = codomain else {
        return Matrix::zeros(field, domain.len(), 0);
    };
    let mut m = Matrix::zeros(field, domain.len(), codomain.len());
    for (r, p) in domain.paths().iter().enumerate() {
        for i in 0..=p.dim() {
            if let Some(c) = codomain.position(&p.face(i)) {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let v = field.add(m.get(r, c), &field.from_i64(sign));
                m.set(r, c, v);
            }
        }
    }
    m
}

/// Convenience form of [`boundary_matrix`] that enumerates both bases.
pub fn boundary_matrix_of<F: Field>(field: &F, g: &Digraph, n: usize) -> Matrix<F> {
    let domain = enumerate_allowed(g, n);
    if n == 0 {
        return boundary_matrix(field, &domain, None);
    }
    boundary_matrix(field, &domain, Some(&enumerate_allowed(g, n - 1)))
}

/// Incidences of the basis paths with faces that are not allowed in `g`:
/// `(number of distinct such faces, [(row, face column, ±1)])`.
pub fn obstruction_entries(g: &Digraph, basis: &PathBasis) -> (usize, Vec<(usize, usize, i64)>) {
    let mut bad: BTreeMap<Path, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    if basis.dim() == 0 {
        return (0, entries);
    }
    for (r, p) in basis.paths().iter().enumerate() {
        for i in 0..=p.dim() {
            let face = p.face(i);
            if face.is_allowed_in(g) {
                continue;
            }
            let next = bad.len();
            let c = *bad.entry(face).or_insert(next);
            entries.push((r, c, if i % 2 == 0 { 1 } else { -1 }));
        }
    }
    (bad.len(), entries)
}

/// `Ω_n(g) = {x ∈ P_n(g) : ∂x ∈ P_{n-1}(g)}` in the coordinates of `basis`
/// (which must be `P_n(g)`): the left kernel of the boundary restricted to
/// faces that are not allowed.
pub fn omega_in_basis<F: Field>(field: &F, g: &Digraph, basis: &PathBasis) -> Subspace<F> {
    let (cols, entries) = obstruction_entries(g, basis);
    let mut m = Matrix::zeros(field, basis.len(), cols);
    for (r, c, s) in entries {
        let v = field.add(m.get(r, c), &field.from_i64(s));
        m.set(r, c, v);
    }
    m.left_kernel()
}

pub fn omega_basis<F: Field>(field: &F, g: &Digraph, n: usize) -> Subspace<F> {
    omega_in_basis(field, g, &enumerate_allowed(g, n))
}
