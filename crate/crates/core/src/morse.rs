//! Discrete Morse functions on digraphs.
//!
//! A function `f : V → [0, ∞)` extends to paths by summing vertex values,
//! so an allowed coface (face) of a path has the same value exactly when the
//! inserted (deleted) vertex is a zero of `f`. This turns the quantifier over
//! all allowed paths, an infinite family on cyclic digraphs, into four finite
//! checks:
//!
//! 1. no zero lies on a directed cycle;
//! 2. no zero reaches a different zero along a directed path;
//! 3. for every edge `u → v`, at most one zero `w` with `u → w → v`;
//! 4. for every vertex, at most one zero among in- and out-neighbours
//!    (counted per adjacency).
//!
//! [`check_morse`] uses these; [`check_morse_bruteforce`] enumerates paths
//! up to a length bound and is kept as an independent oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::digraph::{Digraph, VertexId};
use crate::path::Path;

/// Nonnegative rational value per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseFunction {
    values: Vec<BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    TwoCofaces,
    TwoFaces,
    ZeroOnCycle,
    ZeroReachesZero,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::TwoCofaces => "two-cofaces",
            Self::TwoFaces => "two-faces",
            Self::ZeroOnCycle => "zero-on-cycle",
            Self::ZeroReachesZero => "zero-reaches-zero",
        }
    }
}

/// A concrete counterexample to the Morse conditions. `witness[0]` is the
/// offending path, the remaining entries are its two equal-value
/// cofaces or faces. Every witness path is allowed in the digraph checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorseViolation {
    pub kind: ViolationKind,
    pub witness: Vec<Path>,
    reason: String,
    description: String,
}

impl MorseViolation {
    fn new(g: &Digraph, kind: ViolationKind, witness: Vec<Path>) -> Self {
        let labels: Vec<String> = witness.iter().map(|p| p.label(g)).collect();
        let reason = match kind {
            ViolationKind::TwoCofaces => format!("two equal-value cofaces at {}", labels[0]),
            ViolationKind::TwoFaces => format!("two equal-value faces of {}", labels[0]),
            ViolationKind::ZeroOnCycle => format!(
                "zero vertex {} lies on a directed loop",
                g.label(VertexId(witness[0].vertices()[0]))
            ),
            ViolationKind::ZeroReachesZero => {
                let v = witness[0].vertices();
                format!(
                    "zero vertex {} reaches zero vertex {}",
                    g.label(VertexId(v[0])),
                    g.label(VertexId(v[v.len() - 1]))
                )
            }
        };
        let description = match kind {
            ViolationKind::TwoCofaces | ViolationKind::TwoFaces => {
                format!("{reason} ({}, {})", labels[1], labels[2])
            }
            _ => format!(
                "{reason} ({}; faces {}, {})",
                labels[0], labels[1], labels[2]
            ),
        };
        Self {
            kind,
            witness,
            reason,
            description,
        }
    }

    /// One-line summary without the witness paths, e.g.
    /// `two equal-value cofaces at v3`.
    pub fn reason(&self) -> &str {
        &self.reason
    }
}

impl fmt::Display for MorseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

/// A vertex related to two distinct zeros, with the allowed paths relating
/// them (a single-vertex path when the zero is the vertex itself).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarWitness {
    pub vertex: VertexId,
    pub zeros: [VertexId; 2],
    pub paths: [Path; 2],
    reason: String,
    description: String,
}

impl StarWitness {
    /// e.g. `condition (*) fails at v3`.
    pub fn reason(&self) -> &str {
        &self.reason
    }
}

impl fmt::Display for StarWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.description)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("function has {found} values but the digraph has {expected} vertices")]
    DomainMismatch { expected: usize, found: usize },
    #[error("negative value for vertex `{0}`")]
    NegativeValue(String),
    #[error("value for vertex `{0}` must be positive")]
    NonPositiveValue(String),
    #[error("line {line}: malformed value line `{content}`")]
    MalformedValue { line: usize, content: String },
    #[error("no value given for vertex `{0}`")]
    MissingValue(String),
    #[error("value file names unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertex `{0}` is assigned twice")]
    DuplicateValue(String),
    #[error("not a discrete Morse function: {0}")]
    NotMorse(MorseViolation),
    #[error("extension is not Morse on the transitive closure: {0}")]
    NotMorseOnClosure(MorseViolation),
    #[error("condition (*) fails: {0}")]
    ConditionStar(StarWitness),
    #[error("vertex `{0}` lies on a directed cycle")]
    VertexOnCycle(String),
}

impl MorseFunction {
    pub fn new(g: &Digraph, values: Vec<BigRational>) -> Result<Self, MorseError> {
        if values.len() != g.vertex_count() {
            return Err(MorseError::DomainMismatch {
                expected: g.vertex_count(),
                found: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|x| x.is_negative()) {
            return Err(MorseError::NegativeValue(g.labels()[i].clone()));
        }
        Ok(Self { values })
    }

    pub fn from_integers(g: &Digraph, values: &[i64]) -> Result<Self, MorseError> {
        Self::new(
            g,
            values
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect(),
        )
    }

    /// `f(zero) = 0` and the remaining vertices get `1, 2, 3, …` in index
    /// order.
    pub fn distinct_with_zero(g: &Digraph, zero: VertexId) -> Self {
        let mut next = 0i64;
        let values = g
            .vertices()
            .map(|v| {
                if v == zero {
                    0
                } else {
                    next += 1;
                    next
                }
            })
            .collect::<Vec<_>>();
        Self::from_integers(g, &values).expect("values match the vertex set")
    }

    /// Parses `<label> <value>` lines; values are `p/q`, integers or
    /// decimals, converted exactly. Every vertex must be assigned once.
    pub fn parse(g: &Digraph, text: &str) -> Result<Self, MorseError> {
        let mut values: Vec<Option<BigRational>> = vec![None; g.vertex_count()];
        for (lineno, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let malformed = || MorseError::MalformedValue {
                line: lineno + 1,
                content: raw.trim().to_string(),
            };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            let [label, value] = tokens.as_slice() else {
                return Err(malformed());
            };
            let v = g
                .vertex(label)
                .map_err(|_| MorseError::UnknownVertex(label.to_string()))?;
            let x = parse_rational(value).ok_or_else(malformed)?;
            if values[v.0].replace(x).is_some() {
                return Err(MorseError::DuplicateValue(label.to_string()));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, x)| x.ok_or_else(|| MorseError::MissingValue(g.labels()[i].clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(g, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, v: VertexId) -> &BigRational {
        &self.values[v.0]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn is_zero_at(&self, v: usize) -> bool {
        self.values[v].is_zero()
    }

    pub fn zero_set(&self) -> Vec<VertexId> {
        (0..self.values.len())
            .filter(|&v| self.is_zero_at(v))
            .map(VertexId)
            .collect()
    }

    /// `f(v_0 … v_n) = Σ f(v_i)`.
    pub fn path_value(&self, p: &Path) -> BigRational {
        p.vertices()
            .iter()
            .fold(BigRational::zero(), |acc, &v| acc + &self.values[v])
    }

    fn check_domain(&self, g: &Digraph) -> Result<(), MorseError> {
        if self.values.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(MorseError::DomainMismatch {
                expected: g.vertex_count(),
                found: self.values.len(),
            })
        }
    }

    pub fn render(&self, g: &Digraph) -> String {
        g.vertices()
            .map(|v| format!("{} {}\n", g.label(v), self.values[v.0]))
            .collect()
    }
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
            "" => BigInt::zero(),
            digits => digits.parse().ok()?,
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let frac_part: BigInt = frac.parse().ok()?;
        let magnitude = BigRational::new(int_part * &scale + frac_part, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Allowed cofaces `γ > α` obtained by inserting a zero of `f`, i.e. the
/// cofaces with `f(γ) = f(α)`, as `(insert position, vertex, γ)`.
pub fn equal_value_cofaces(
    g: &Digraph,
    f: &MorseFunction,
    alpha: &Path,
) -> Vec<(usize, usize, Path)> {
    let mut out = Vec::new();
    let zeros = f.zero_set();
    for pos in 0..=alpha.vertices().len() {
        for z in &zeros {
            let gamma = alpha.insert(pos, z.0);
            if gamma.is_allowed_in(g) {
                out.push((pos, z.0, gamma));
            }
        }
    }
    out
}

/// Allowed faces `β < α` obtained by deleting a zero of `f`, as
/// `(delete position, β)`.
pub fn equal_value_faces(g: &Digraph, f: &MorseFunction, alpha: &Path) -> Vec<(usize, Path)> {
    if alpha.dim() == 0 {
        return Vec::new();
    }
    (0..alpha.vertices().len())
        .filter(|&i| f.is_zero_at(alpha.vertices()[i]))
        .map(|i| (i, alpha.face(i)))
        .filter(|(_, beta)| beta.is_allowed_in(g))
        .collect()
}

/// Decides whether `f` is a discrete Morse function on `g`, returning a
/// witness on failure.
pub fn check_morse(g: &Digraph, f: &MorseFunction) -> Result<(), MorseError> {
    f.check_domain(g)?;
    let zeros = f.zero_set();
    let violation =
        |kind, witness| Err(MorseError::NotMorse(MorseViolation::new(g, kind, witness)));

    for &z in &zeros {
        if let Some(cycle) = g.shortest_path(z.0, z.0) {
            let (loop_path, faces) = with_end_faces(cycle);
            return violation(
                ViolationKind::ZeroOnCycle,
                [vec![loop_path], faces].concat(),
            );
        }
    }
    for &z in &zeros {
        for &w in &zeros {
            if z == w {
                continue;
            }
            if let Some(path) = g.shortest_path(z.0, w.0) {
                let (p, faces) = with_end_faces(path);
                return violation(ViolationKind::ZeroReachesZero, [vec![p], faces].concat());
            }
        }
    }
    for (u, v) in g.edges() {
        let mids: Vec<usize> = zeros
            .iter()
            .filter(|w| g.has_edge(u.0, w.0) && g.has_edge(w.0, v.0))
            .map(|w| w.0)
            .take(2)
            .collect();
        if let [a, b] = mids[..] {
            return violation(
                ViolationKind::TwoCofaces,
                vec![
                    Path::new(vec![u.0, v.0]),
                    Path::new(vec![u.0, a, v.0]),
                    Path::new(vec![u.0, b, v.0]),
                ],
            );
        }
    }
    for v in g.vertices() {
        let mut cofaces: Vec<Path> = g
            .predecessors(v.0)
            .iter()
            .filter(|&&w| f.is_zero_at(w))
            .map(|&w| Path::new(vec![w, v.0]))
            .collect();
        cofaces.extend(
            g.successors(v.0)
                .iter()
                .filter(|&&w| f.is_zero_at(w))
                .map(|&w| Path::new(vec![v.0, w])),
        );
        if cofaces.len() >= 2 {
            return violation(
                ViolationKind::TwoCofaces,
                vec![Path::vertex(v.0), cofaces[0].clone(), cofaces[1].clone()],
            );
        }
    }
    Ok(())
}

pub fn is_morse(g: &Digraph, f: &MorseFunction) -> bool {
    check_morse(g, f).is_ok()
}

/// `(α, [α without its last vertex, α without its first vertex])`.
fn with_end_faces(vertices: Vec<usize>) -> (Path, Vec<Path>) {
    let p = Path::new(vertices);
    let last = p.dim();
    let faces = vec![p.face(last), p.face(0)];
    (p, faces)
}

/// Checks both Morse conditions literally on every allowed path of
/// dimension at most `max_len`: cofaces by inserting any vertex anywhere,
/// faces by deleting any vertex, values compared as path sums.
pub fn check_morse_bruteforce(
    g: &Digraph,
    f: &MorseFunction,
    max_len: usize,
) -> Result<(), MorseError> {
    f.check_domain(g)?;
    let mut found = None;
    for_each_allowed_path(g, max_len, &mut |alpha| {
        let value = f.path_value(alpha);
        let cofaces = all_cofaces(g, alpha)
            .into_iter()
            .filter(|gamma| f.path_value(gamma) == value)
            .collect::<Vec<_>>();
        if cofaces.len() >= 2 {
            found = Some((ViolationKind::TwoCofaces, alpha.clone(), cofaces));
            return false;
        }
        let faces = all_faces(g, alpha)
            .into_iter()
            .filter(|beta| f.path_value(beta) == value)
            .collect::<Vec<_>>();
        if faces.len() >= 2 {
            found = Some((ViolationKind::TwoFaces, alpha.clone(), faces));
            return false;
        }
        true
    });
    match found {
        None => Ok(()),
        Some((kind, alpha, others)) => Err(MorseError::NotMorse(MorseViolation::new(
            g,
            kind,
            vec![alpha, others[0].clone(), others[1].clone()],
        ))),
    }
}

pub fn is_morse_bruteforce(g: &Digraph, f: &MorseFunction, max_len: usize) -> bool {
    check_morse_bruteforce(g, f, max_len).is_ok()
}

/// Distinct allowed `(n+1)`-paths containing `alpha` as a face.
fn all_cofaces(g: &Digraph, alpha: &Path) -> BTreeSet<Path> {
    let mut out = BTreeSet::new();
    for pos in 0..=alpha.vertices().len() {
        for w in 0..g.vertex_count() {
            let gamma = alpha.insert(pos, w);
            if gamma.is_allowed_in(g) {
                out.insert(gamma);
            }
        }
    }
    out
}

/// Distinct allowed `(n-1)`-paths obtained by deleting one vertex.
fn all_faces(g: &Digraph, alpha: &Path) -> BTreeSet<Path> {
    if alpha.dim() == 0 {
        return BTreeSet::new();
    }
    (0..alpha.vertices().len())
        .map(|i| alpha.face(i))
        .filter(|beta| beta.is_allowed_in(g))
        .collect()
}

/// Visits allowed paths by dimension `0..=max_len`, stopping early when the
/// visitor returns `false`.
fn for_each_allowed_path(g: &Digraph, max_len: usize, visit: &mut dyn FnMut(&Path) -> bool) {
    let mut layer: Vec<Vec<usize>> = (0..g.vertex_count()).map(|v| vec![v]).collect();
    for _ in 0..=max_len {
        for p in &layer {
            if !visit(&Path::new(p.clone())) {
                return;
            }
        }
        layer = layer
            .iter()
            .flat_map(|p| {
                let last = *p.last().expect("nonempty");
                g.successors(last).iter().map(move |&w| {
                    let mut q = p.clone();
                    q.push(w);
                    q
                })
            })
            .collect();
        if layer.is_empty() {
            return;
        }
    }
}

/// Condition (*): every vertex is related (as itself, or by a directed path
/// in either direction) to at most one zero of `f`.
pub fn check_condition_star(g: &Digraph, f: &MorseFunction) -> Result<(), MorseError> {
    f.check_domain(g)?;
    let zeros = f.zero_set();
    let reach: Vec<BTreeSet<usize>> = (0..g.vertex_count()).map(|v| g.reachable_set(v)).collect();
    for v in g.vertices() {
        let related: Vec<(VertexId, Path)> = zeros
            .iter()
            .filter_map(|&z| {
                if z == v {
                    Some((z, Path::vertex(v.0)))
                } else if reach[z.0].contains(&v.0) {
                    g.shortest_path(z.0, v.0).map(|p| (z, Path::new(p)))
                } else if reach[v.0].contains(&z.0) {
                    g.shortest_path(v.0, z.0).map(|p| (z, Path::new(p)))
                } else {
                    None
                }
            })
            .take(2)
            .collect();
        if let [(z1, p1), (z2, p2)] = &related[..] {
            let description = format!(
                "vertex {} is related to zeros {} (via {}) and {} (via {})",
                g.label(v),
                g.label(*z1),
                p1.label(g),
                g.label(*z2),
                p2.label(g)
            );
            return Err(MorseError::ConditionStar(StarWitness {
                vertex: v,
                zeros: [*z1, *z2],
                paths: [p1.clone(), p2.clone()],
                reason: format!("condition (*) fails at {}", g.label(v)),
                description,
            }));
        }
    }
    Ok(())
}

pub fn condition_star(g: &Digraph, f: &MorseFunction) -> bool {
    check_condition_star(g, f).is_ok()
}

/// Extends a Morse function on `g` to its transitive closure (same vertex
/// values). Returns the closure together with the extension.
pub fn extend_to_closure(
    g: &Digraph,
    f: &MorseFunction,
) -> Result<(Digraph, MorseFunction), MorseError> {
    check_morse(g, f)?;
    check_condition_star(g, f)?;
    let closure = g.transitive_closure();
    match check_morse(&closure, f) {
        Ok(()) => Ok((closure, f.clone())),
        Err(MorseError::NotMorse(v)) => Err(MorseError::NotMorseOnClosure(v)),
        Err(e) => Err(e),
    }
}

/// Critical allowed `n`-paths: no equal-value coface and no equal-value
/// face. Returned in basis (lexicographic) order.
pub fn critical_paths(g: &Digraph, f: &MorseFunction, n: usize) -> Result<Vec<Path>, MorseError> {
    check_morse(g, f)?;
    Ok(crate::path::enumerate_allowed(g, n)
        .paths()
        .iter()
        .filter(|a| {
            equal_value_cofaces(g, f, a).is_empty() && equal_value_faces(g, f, a).is_empty()
        })
        .cloned()
        .collect())
}

/// Bounded check of the Witten-Morse inequalities (strict averages over
/// pairs of distinct cofaces / faces) and the flatness inequalities, over
/// allowed paths of dimension at most `max_len`.
pub fn is_flat_witten_morse(g: &Digraph, f: &MorseFunction, max_len: usize) -> bool {
    if f.check_domain(g).is_err() {
        return false;
    }
    let mut ok = true;
    for_each_allowed_path(g, max_len, &mut |alpha| {
        let value = f.path_value(alpha);
        let twice = &value + &value;
        let up: Vec<BigRational> = all_cofaces(g, alpha)
            .iter()
            .map(|p| f.path_value(p))
            .collect();
        let down: Vec<BigRational> = all_faces(g, alpha)
            .iter()
            .map(|p| f.path_value(p))
            .collect();
        let pairs = |xs: &[BigRational], good: &dyn Fn(&BigRational) -> bool| {
            (0..xs.len()).all(|i| (i + 1..xs.len()).all(|j| good(&(&xs[i] + &xs[j]))))
        };
        ok = pairs(&up, &|s| *s > twice)
            && pairs(&down, &|s| *s < twice)
            && up.iter().all(|x| *x >= value)
            && down.iter().all(|x| *x <= value);
        ok
    });
    ok
}

/// `f(zero) = 0` and `f = positive_values` elsewhere; `zero` must not lie on
/// a directed cycle. The result is Morse and satisfies condition (*).
pub fn single_zero_morse(
    g: &Digraph,
    zero: VertexId,
    positive_values: &BTreeMap<VertexId, BigRational>,
) -> Result<MorseFunction, MorseError> {
    let label = |v: VertexId| g.label(v).to_string();
    if !g.contains(zero) {
        return Err(MorseError::UnknownVertex(zero.to_string()));
    }
    if g.on_directed_cycle(zero).unwrap_or(false) {
        return Err(MorseError::VertexOnCycle(label(zero)));
    }
    let mut values = Vec::with_capacity(g.vertex_count());
    for v in g.vertices() {
        if v == zero {
            values.push(BigRational::zero());
            continue;
        }
        let x = positive_values
            .get(&v)
            .ok_or_else(|| MorseError::MissingValue(label(v)))?;
        if !x.is_positive() {
            return Err(MorseError::NonPositiveValue(label(v)));
        }
        values.push(x.clone());
    }
    let f = MorseFunction::new(g, values)?;
    check_morse(g, &f)?;
    check_condition_star(g, &f)?;
    Ok(f)
}

/// Most zero occurrences on any allowed path of dimension at most `max_len`.
pub fn max_zeros_on_paths(g: &Digraph, f: &MorseFunction, max_len: usize) -> usize {
    let mut best = 0;
    for_each_allowed_path(g, max_len, &mut |p| {
        best = best.max(p.vertices().iter().filter(|&&v| f.is_zero_at(v)).count());
        true
    });
    best
}

/// Vertex values as a label map, for reports.
pub fn value_map(g: &Digraph, f: &MorseFunction) -> BTreeMap<String, String> {
    g.vertices()
        .map(|v| (g.label(v).to_string(), f.value(v).to_string()))
        .collect()
}
