//! Reference computations that share no code with the library beyond the
//! digraph adjacency: paths are enumerated as raw vertex sequences, linear
//! algebra is a plain fraction Gaussian elimination, the gradient and flow
//! act on chains term by term.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pathmorse::digraph::Digraph;

pub type Q = BigRational;
pub type Seq = Vec<usize>;
pub type Chain = BTreeMap<Seq, Q>;

pub fn q(x: i64) -> Q {
    Q::from_integer(BigInt::from(x))
}

pub fn is_allowed(g: &Digraph, p: &[usize]) -> bool {
    p.windows(2).all(|w| g.has_edge(w[0], w[1]))
}

/// Allowed sequences of `n + 1` vertices, found by filtering all `|V|^{n+1}`
/// sequences, in lexicographic order.
pub fn allowed_paths(g: &Digraph, n: usize) -> Vec<Seq> {
    let k = g.vertex_count();
    let total = k.pow(n as u32 + 1);
    (0..total)
        .map(|mut code| {
            let mut s = vec![0; n + 1];
            for slot in s.iter_mut().rev() {
                *slot = code % k;
                code /= k;
            }
            s
        })
        .filter(|s| is_allowed(g, s))
        .collect()
}

fn add(c: &mut Chain, p: Seq, x: Q) {
    let e = c.entry(p.clone()).or_insert_with(Q::zero);
    *e += x;
    if e.is_zero() {
        c.remove(&p);
    }
}

pub fn single(p: Seq) -> Chain {
    [(p, Q::one())].into()
}

pub fn scale(c: &Chain, k: &Q) -> Chain {
    let mut out = Chain::new();
    for (p, x) in c {
        add(&mut out, p.clone(), x * k);
    }
    out
}

pub fn sum(a: &Chain, b: &Chain) -> Chain {
    let mut out = a.clone();
    for (p, x) in b {
        add(&mut out, p.clone(), x.clone());
    }
    out
}

/// Alternating sum of vertex deletions, keeping every face.
pub fn boundary(c: &Chain) -> Chain {
    let mut out = Chain::new();
    for (p, x) in c {
        if p.len() < 2 {
            continue;
        }
        for i in 0..p.len() {
            let mut face = p.clone();
            face.remove(i);
            let sign = if i % 2 == 0 { x.clone() } else { -x.clone() };
            add(&mut out, face, sign);
        }
    }
    out
}

/// Drops terms that are not allowed in `g`.
pub fn project(g: &Digraph, c: &Chain) -> Chain {
    c.iter()
        .filter(|(p, _)| is_allowed(g, p))
        .map(|(p, x)| (p.clone(), x.clone()))
        .collect()
}

pub fn value(values: &[Q], p: &[usize]) -> Q {
    p.iter().map(|&v| values[v].clone()).sum()
}

/// Gradient on one path: search every vertex insertion for an allowed
/// coface of equal value and take `-⟨∂γ, α⟩ γ`.
pub fn gradient_path(g: &Digraph, values: &[Q], alpha: &[usize]) -> Chain {
    let target = value(values, alpha);
    let mut found: BTreeSet<Seq> = BTreeSet::new();
    for pos in 0..=alpha.len() {
        for w in 0..g.vertex_count() {
            let mut gamma = alpha.to_vec();
            gamma.insert(pos, w);
            if is_allowed(g, &gamma) && value(values, &gamma) == target {
                found.insert(gamma);
            }
        }
    }
    assert!(found.len() <= 1, "several equal-value cofaces of {alpha:?}");
    match found.into_iter().next() {
        None => Chain::new(),
        Some(gamma) => {
            let incidence = boundary(&single(gamma.clone()))
                .get(alpha)
                .cloned()
                .unwrap_or_else(Q::zero);
            scale(&single(gamma), &-incidence)
        }
    }
}

pub fn gradient(g: &Digraph, values: &[Q], c: &Chain) -> Chain {
    let mut out = Chain::new();
    for (p, x) in c {
        out = sum(&out, &scale(&gradient_path(g, values, p), x));
    }
    out
}

/// `x + ∂V x + V ∂ x` with the boundary projected onto allowed paths.
pub fn flow(g: &Digraph, values: &[Q], x: &Chain) -> Chain {
    let dv = project(g, &boundary(&gradient(g, values, x)));
    let vd = gradient(g, values, &project(g, &boundary(x)));
    sum(&sum(x, &dv), &vd)
}

/// Applies the flow until the chain stops changing; returns the limit and
/// the number of applications that changed it.
pub fn flow_limit(g: &Digraph, values: &[Q], x: &Chain, cap: usize) -> (Chain, usize) {
    let mut cur = x.clone();
    for k in 0..cap {
        let next = flow(g, values, &cur);
        if next == cur {
            return (cur, k);
        }
        cur = next;
    }
    panic!("flow did not settle within {cap} steps");
}

/// Row reduction over `Q`; returns the nonzero rows and pivot columns.
pub fn rref(mut rows: Vec<Vec<Q>>, cols: usize) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / rows[r][c].clone();
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let k = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &k * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

pub fn rank(rows: &[Vec<Q>], cols: usize) -> usize {
    rref(rows.to_vec(), cols).1.len()
}

/// Basis of `{x : Σ_i x_i · rows[i] = 0}`.
pub fn left_null(rows: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let m = rows.len();
    let transposed: Vec<Vec<Q>> = (0..cols)
        .map(|c| rows.iter().map(|r| r[c].clone()).collect())
        .collect();
    let (red, pivots) = rref(transposed, m);
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); m];
            x[f] = Q::one();
            for (row, &p) in red.iter().zip(&pivots) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

pub fn same_span(a: &[Vec<Q>], b: &[Vec<Q>], cols: usize) -> bool {
    let ra = rank(a, cols);
    let rb = rank(b, cols);
    let both: Vec<Vec<Q>> = a.iter().chain(b).cloned().collect();
    ra == rb && rank(&both, cols) == ra
}

pub fn coords(c: &Chain, basis: &[Seq]) -> Vec<Q> {
    basis
        .iter()
        .map(|p| c.get(p).cloned().unwrap_or_else(Q::zero))
        .collect()
}

pub fn chain_of(v: &[Q], basis: &[Seq]) -> Chain {
    basis
        .iter()
        .zip(v)
        .filter(|(_, x)| !x.is_zero())
        .map(|(p, x)| (p.clone(), x.clone()))
        .collect()
}

/// Basis of `Ω_n(g)` as chains.
pub fn omega(g: &Digraph, n: usize) -> Vec<Chain> {
    let paths = allowed_paths(g, n);
    if n == 0 {
        return paths.into_iter().map(single).collect();
    }
    let images: Vec<Chain> = paths.iter().map(|p| boundary(&single(p.clone()))).collect();
    let bad: Vec<Seq> = images
        .iter()
        .flat_map(|c| c.keys().cloned())
        .filter(|f| !is_allowed(g, f))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows: Vec<Vec<Q>> = images.iter().map(|c| coords(c, &bad)).collect();
    left_null(&rows, bad.len())
        .iter()
        .map(|x| chain_of(x, &paths))
        .collect()
}

/// Betti numbers `0..=max_dim` of the `Ω` complex.
pub fn betti(g: &Digraph, max_dim: usize) -> Vec<usize> {
    let groups: Vec<Vec<Chain>> = (0..=max_dim + 1).map(|n| omega(g, n)).collect();
    let ranks: Vec<usize> = (0..=max_dim + 1)
        .map(|n| {
            if n == 0 {
                return 0;
            }
            let lower = allowed_paths(g, n - 1);
            let rows: Vec<Vec<Q>> = groups[n]
                .iter()
                .map(|c| coords(&boundary(c), &lower))
                .collect();
            rank(&rows, lower.len())
        })
        .collect();
    (0..=max_dim)
        .map(|n| groups[n].len() - ranks[n] - ranks[n + 1])
        .collect()
}

/// Invariant factors from determinantal divisors: `d_k` is the gcd of all
/// `k × k` minors and the factors are `d_k / d_{k-1}`.
pub fn smith_invariants(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut divisors = vec![BigInt::one()];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<Q>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| q(m[r][c])).collect())
                    .collect();
                g = g.gcd(&det(minor).to_integer());
            }
        }
        if g.is_zero() {
            break;
        }
        divisors.push(g);
    }
    divisors.windows(2).map(|w| (&w[1] / &w[0]).abs()).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c].clone();
        for r in c + 1..n {
            let k = &a[r][c] / &a[c][c];
            let pivot = a[c].clone();
            for (x, y) in a[r].iter_mut().zip(&pivot) {
                *x -= &k * y;
            }
        }
    }
    d
}

/// Allowed `n`-paths with no equal-value coface and no equal-value face.
pub fn critical(g: &Digraph, values: &[Q], n: usize) -> Vec<Seq> {
    allowed_paths(g, n)
        .into_iter()
        .filter(|p| {
            let v = value(values, p);
            let coface = allowed_paths(g, n + 1)
                .iter()
                .any(|c| value(values, c) == v && boundary(&single(c.clone())).contains_key(p));
            let face = n > 0
                && (0..p.len()).any(|i| {
                    let mut q = p.clone();
                    q.remove(i);
                    is_allowed(g, &q) && value(values, &q) == v
                });
            !coface && !face
        })
        .collect()
}

/// Dimension of `span(a) ∩ span(b)`.
pub fn intersection_dim(a: &[Vec<Q>], b: &[Vec<Q>], cols: usize) -> usize {
    let both: Vec<Vec<Q>> = a.iter().chain(b).cloned().collect();
    rank(a, cols) + rank(b, cols) - rank(&both, cols)
}

pub fn contains(span: &[Vec<Q>], x: &[Q], cols: usize) -> bool {
    let mut more = span.to_vec();
    more.push(x.to_vec());
    rank(span, cols) == rank(&more, cols)
}
