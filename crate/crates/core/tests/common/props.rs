//! Seed-pinned random instances and the properties checked on them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use pathmorse::digraph::{Digraph, VertexId};
use pathmorse::flow::{check_omega_invariance, flow, gradient};
use pathmorse::homology::{
    compare, default_max_dim, direct_complex, morse_pipeline, HomologyError,
};
use pathmorse::linalg::{Matrix, Rationals};
use pathmorse::morse::{
    condition_star, critical_paths, extend_to_closure, is_flat_witten_morse, is_morse,
    is_morse_bruteforce, max_zeros_on_paths, single_zero_morse, MorseFunction,
};
use pathmorse::path::{boundary, boundary_matrix_of, enumerate_allowed, omega_basis, Chain};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestError, TestRunner};

use super::oracle;

pub const SEED: u64 = 0x5E_ED0F_DA7A;
pub const CASES: u32 = 256;

pub fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        max_shrink_iters: 256,
        ..Config::default()
    })
}

/// Runs `check` on `CASES` instances, returning a printable failure.
pub fn run<S: Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner().run(&strategy, check).map_err(|e| match e {
        TestError::Fail(reason, value) => format!("{reason} for {value:?}"),
        TestError::Abort(reason) => format!("aborted: {reason}"),
    })
}

/// A digraph with at most six vertices. Acyclic ones put edges along a
/// random vertex order; cyclic ones may use any ordered pair.
pub fn digraph(cyclic: bool) -> impl Strategy<Value = Digraph> {
    sized_digraph(cyclic, 6)
}

pub fn sized_digraph(cyclic: bool, max: usize) -> impl Strategy<Value = Digraph> {
    shaped_digraph(
        cyclic,
        prop_oneof![1 => 1usize..=3, 3 => 4usize..=max],
        prop_oneof![Just(25u32), Just(40), Just(55)],
    )
}

fn shaped_digraph(
    cyclic: bool,
    sizes: impl Strategy<Value = usize>,
    percents: impl Strategy<Value = u32>,
) -> impl Strategy<Value = Digraph> {
    (sizes, percents)
        .prop_flat_map(|(n, pct)| {
            (
                Just(n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(0u32..100, n * n),
                Just(pct),
            )
        })
        .prop_map(move |(n, order, coins, pct)| {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let keep = if cyclic {
                        i != j && coins[i * n + j] < pct * 2 / 3
                    } else {
                        i < j && coins[i * n + j] < pct
                    };
                    if keep {
                        edges.push((order[i], order[j]));
                    }
                }
            }
            Digraph::from_edges(n, &edges)
        })
}

pub fn any_digraph() -> impl Strategy<Value = Digraph> {
    prop_oneof![3 => digraph(false), 2 => digraph(true)]
}

/// Digraph with positive values and a wish list of zeros, the zeros
/// applied in the given order.
#[derive(Clone, Debug)]
pub struct Draft {
    pub g: Digraph,
    pub values: Vec<i64>,
    pub zero_order: Vec<usize>,
}

pub fn draft(graphs: impl Strategy<Value = Digraph>) -> impl Strategy<Value = Draft> {
    draft_with(graphs, 0.45)
}

pub fn draft_with(
    graphs: impl Strategy<Value = Digraph>,
    wish: f64,
) -> impl Strategy<Value = Draft> {
    graphs.prop_flat_map(move |g| {
        let n = g.vertex_count();
        (
            Just(g),
            proptest::collection::vec(1i64..=4, n),
            Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            proptest::collection::vec(proptest::bool::weighted(wish), n),
        )
            .prop_map(|(g, values, order, wish)| Draft {
                g,
                values,
                zero_order: order.into_iter().filter(|&v| wish[v]).collect(),
            })
    })
}

fn function(g: &Digraph, values: &[i64]) -> MorseFunction {
    MorseFunction::from_integers(g, values).unwrap()
}

/// Every wished zero applied at once, Morse or not.
#[derive(Clone, Debug)]
pub struct Weighted {
    pub g: Digraph,
    pub f: MorseFunction,
}

pub fn weighted() -> impl Strategy<Value = Weighted> {
    draft(any_digraph()).prop_map(|d| {
        let mut values = d.values.clone();
        for &z in &d.zero_order {
            values[z] = 0;
        }
        Weighted {
            f: function(&d.g, &values),
            g: d.g,
        }
    })
}

/// Wished zeros kept greedily while `keep` holds.
fn greedy(d: &Draft, keep: impl Fn(&Digraph, &MorseFunction) -> bool) -> MorseFunction {
    let mut values = d.values.clone();
    for &z in &d.zero_order {
        let before = values[z];
        values[z] = 0;
        if !keep(&d.g, &function(&d.g, &values)) {
            values[z] = before;
        }
    }
    function(&d.g, &values)
}

/// A Morse function on `g`.
pub fn morse_on_g() -> impl Strategy<Value = Weighted> {
    draft(any_digraph()).prop_map(|d| Weighted {
        f: greedy(&d, is_morse),
        g: d.g,
    })
}

/// A sparse acyclic digraph containing `a → v` and `a' → x → v`, with
/// zeros wished first at `a` and `a'`.
fn two_sources() -> impl Strategy<Value = Draft> {
    (4usize..=6)
        .prop_flat_map(|n| {
            (
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                proptest::collection::vec(0u32..100, n * n),
                proptest::collection::vec(1i64..=4, n),
                proptest::collection::vec(proptest::bool::weighted(0.5), n),
            )
        })
        .prop_map(|(order, coins, values, wish)| {
            let n = order.len();
            let mut edges = vec![
                (order[0], order[3]),
                (order[1], order[2]),
                (order[2], order[3]),
            ];
            for i in 0..n {
                for j in i + 1..n {
                    if coins[i * n + j] < 20 {
                        edges.push((order[i], order[j]));
                    }
                }
            }
            let mut zero_order = vec![order[0], order[1]];
            zero_order.extend(order[2..].iter().copied().filter(|&v| wish[v]));
            Draft {
                g: Digraph::from_edges(n, &edges),
                values,
                zero_order,
            }
        })
}

/// A Morse function on `g`, with cyclic digraphs kept to four vertices so
/// brute force on the closure stays cheap.
pub fn morse_for_star() -> impl Strategy<Value = Weighted> {
    prop_oneof![
        2 => draft(prop_oneof![3 => digraph(false), 1 => sized_digraph(true, 4)]),
        1 => two_sources(),
    ]
    .prop_map(|d| Weighted {
        f: greedy(&d, is_morse),
        g: d.g,
    })
}

/// A Morse function that extends to the transitive closure.
pub fn extendable() -> impl Strategy<Value = Weighted> {
    draft(any_digraph()).prop_map(|d| Weighted {
        f: greedy(&d, |g, f| extend_to_closure(g, f).is_ok()),
        g: d.g,
    })
}

/// Extendable functions on acyclic digraphs, where homology is cheap.
pub fn extendable_dag() -> impl Strategy<Value = Weighted> {
    draft(digraph(false)).prop_map(|d| Weighted {
        f: greedy(&d, |g, f| extend_to_closure(g, f).is_ok()),
        g: d.g,
    })
}

/// Top dimension for flow checks: at most 4, lowered until the dense
/// matrices stay small on cyclic closures.
fn flow_top(g: &Digraph) -> usize {
    (0..=g.vertex_count().min(4))
        .take_while(|&n| enumerate_allowed(g, n + 1).paths().len() <= 240)
        .last()
        .unwrap_or(0)
}

fn mat_rows(m: &Matrix<Rationals>) -> Vec<Vec<BigRational>> {
    m.row_vectors()
}

// ---- criterion properties ----

pub fn boundary_squares_to_zero(g: Digraph) -> Result<(), TestCaseError> {
    for n in 2..=3 {
        for p in enumerate_allowed(&g, n).paths() {
            let c = Chain::from_path(&Rationals, p.clone());
            prop_assert!(boundary(&boundary(&c)).is_zero());
            let o = oracle::boundary(&oracle::boundary(&oracle::single(p.vertices().to_vec())));
            prop_assert!(o.is_empty());
        }
    }
    let c = g.transitive_closure();
    for n in 2..=4 {
        let d =
            boundary_matrix_of(&Rationals, &c, n).mul(&boundary_matrix_of(&Rationals, &c, n - 1));
        prop_assert!(
            d.is_zero(),
            "projected boundary squares to nonzero in dimension {}",
            n
        );
    }
    Ok(())
}

pub fn gradient_squares_to_zero(w: Weighted) -> Result<(), TestCaseError> {
    let (c, f) = extend_to_closure(&w.g, &w.f).unwrap();
    let v = gradient(&Rationals, &c, &f, flow_top(&c)).unwrap();
    for n in 0..v.top() {
        prop_assert!(
            v.matrix(n).mul(v.matrix(n + 1)).is_zero(),
            "V V ≠ 0 at {}",
            n
        );
    }
    Ok(())
}

pub fn gradient_unit_images(w: Weighted) -> Result<(), TestCaseError> {
    let (c, f) = extend_to_closure(&w.g, &w.f).unwrap();
    let v = gradient(&Rationals, &c, &f, flow_top(&c)).unwrap();
    let values: Vec<BigRational> = f.values().to_vec();
    for n in 0..=v.top() {
        let m = v.matrix(n);
        let one = BigRational::from_integer(BigInt::from(1));
        for r in 0..m.rows() {
            let nz: Vec<&BigRational> = m
                .row(r)
                .iter()
                .filter(|x| **x != BigRational::from_integer(0.into()))
                .collect();
            prop_assert!(nz.len() <= 1);
            prop_assert!(nz.iter().all(|x| **x == one || **x == -one.clone()));
        }
        for col in 0..m.cols() {
            let hits = (0..m.rows())
                .filter(|&r| *m.get(r, col) != BigRational::from_integer(0.into()))
                .count();
            prop_assert!(hits <= 1, "path hit twice by V in dimension {}", n + 1);
        }
        for p in v.basis(n).paths() {
            let lib = v.apply_path(p);
            let lib: oracle::Chain = lib
                .terms()
                .map(|(q, x)| (q.vertices().to_vec(), x.clone()))
                .collect();
            prop_assert_eq!(lib, oracle::gradient_path(&c, &values, p.vertices()));
        }
    }
    Ok(())
}

pub fn criticality_matches_gradient(w: Weighted) -> Result<(), TestCaseError> {
    let (c, f) = extend_to_closure(&w.g, &w.f).unwrap();
    let v = gradient(&Rationals, &c, &f, flow_top(&c)).unwrap();
    for n in 0..=v.top() {
        let crit: BTreeSet<_> = critical_paths(&c, &f, n).unwrap().into_iter().collect();
        let hit: BTreeSet<usize> = v.image_support(n).into_iter().collect();
        let from_v: BTreeSet<_> = v
            .basis(n)
            .paths()
            .iter()
            .enumerate()
            .filter(|(i, _)| v.image_of(n, *i).is_none() && !hit.contains(i))
            .map(|(_, p)| p.clone())
            .collect();
        prop_assert_eq!(crit, from_v);
    }
    Ok(())
}

pub fn flow_commutes(w: Weighted) -> Result<(), TestCaseError> {
    let (c, f) = extend_to_closure(&w.g, &w.f).unwrap();
    let v = gradient(&Rationals, &c, &f, flow_top(&c)).unwrap();
    let phi = flow(&v).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for n in 1..=phi.top() {
        let d = v.boundary_matrix(n);
        prop_assert_eq!(phi.matrix(n).mul(&d), d.mul(phi.matrix(n - 1)));
    }
    let values: Vec<BigRational> = f.values().to_vec();
    for n in 0..=phi.top().min(2) {
        let basis: Vec<Vec<usize>> = phi
            .basis(n)
            .paths()
            .iter()
            .map(|p| p.vertices().to_vec())
            .collect();
        for (i, p) in basis.iter().enumerate() {
            let expected = oracle::coords(
                &oracle::flow(&c, &values, &oracle::single(p.clone())),
                &basis,
            );
            prop_assert_eq!(phi.matrix(n).row(i).to_vec(), expected);
        }
    }
    Ok(())
}

pub fn stable_image_is_fixed_space(w: Weighted) -> Result<(), TestCaseError> {
    let (c, f) = extend_to_closure(&w.g, &w.f).unwrap();
    let v = gradient(&Rationals, &c, &f, flow_top(&c)).unwrap();
    let phi = flow(&v).unwrap().stabilize(None).unwrap();
    for n in 0..=phi.top() {
        let crit = critical_paths(&c, &f, n).unwrap();
        let image = phi.stable_image_of(n, &crit);
        let fixed = phi.invariant_space(n);
        prop_assert_eq!(image.dim(), crit.len());
        prop_assert_eq!(&image, &fixed);
        let stable = phi.stable_matrix(n).unwrap();
        prop_assert_eq!(&stable.mul(phi.matrix(n)), stable);
        for x in fixed.basis() {
            prop_assert_eq!(&stable.apply_row(x), x);
        }
    }
    Ok(())
}

pub fn structural_matches_bruteforce(w: Weighted) -> Result<(), TestCaseError> {
    let l = 2 * w.g.vertex_count();
    prop_assert_eq!(is_morse(&w.g, &w.f), is_morse_bruteforce(&w.g, &w.f, l));
    Ok(())
}

/// Length bound for brute force on closures (see `closure_bound`).
pub fn closure_bound(g: &Digraph) -> usize {
    g.vertex_count() + 1
}

pub fn condition_star_matches_closure(w: Weighted) -> Result<(), TestCaseError> {
    prop_assume!(is_morse(&w.g, &w.f));
    let c = w.g.transitive_closure();
    prop_assert_eq!(
        condition_star(&w.g, &w.f),
        is_morse_bruteforce(&c, &w.f, closure_bound(&w.g))
    );
    Ok(())
}

pub fn single_zero_constructor(input: (Digraph, usize, Vec<i64>)) -> Result<(), TestCaseError> {
    let (g, pick, values) = input;
    let positives: BTreeMap<VertexId, BigRational> = g
        .vertices()
        .map(|v| (v, BigRational::from_integer(BigInt::from(values[v.0]))))
        .collect();
    let eligible: Vec<VertexId> = g
        .vertices()
        .filter(|&v| !g.on_directed_cycle(v).unwrap())
        .collect();
    for v in g.vertices().filter(|v| !eligible.contains(v)) {
        prop_assert!(single_zero_morse(&g, v, &positives).is_err());
    }
    if eligible.is_empty() {
        return Ok(());
    }
    let zero = eligible[pick % eligible.len()];
    let f =
        single_zero_morse(&g, zero, &positives).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(is_morse(&g, &f));
    prop_assert!(condition_star(&g, &f));
    prop_assert_eq!(f.zero_set(), vec![zero]);
    Ok(())
}

pub fn single_zero_input() -> impl Strategy<Value = (Digraph, usize, Vec<i64>)> {
    any_digraph().prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), 0usize..6, proptest::collection::vec(1i64..=9, n))
    })
}

pub fn invariance_implies_agreement(w: Weighted) -> Result<(), TestCaseError> {
    let n = default_max_dim(&w.g).min(3);
    match compare(&Rationals, &w.g, &w.f, n) {
        Ok(r) => {
            if r.invariance == Some(true) {
                prop_assert_eq!(Some(r.betti), r.morse_betti);
            }
            Ok(())
        }
        Err(HomologyError::AgreementViolation { direct, morse }) => Err(TestCaseError::fail(
            format!("invariant instance disagrees: direct {direct:?}, Morse {morse:?}"),
        )),
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

/// The criterion-7 list, in order, as `(name, outcome)`.
pub fn criterion_seven() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        (
            "boundary squares to zero",
            run(any_digraph(), boundary_squares_to_zero),
        ),
        (
            "gradient squares to zero",
            run(extendable(), gradient_squares_to_zero),
        ),
        (
            "unit images, unique preimages",
            run(extendable(), gradient_unit_images),
        ),
        (
            "critical iff outside image and kernel",
            run(extendable(), criticality_matches_gradient),
        ),
        (
            "flow commutes with boundary",
            run(extendable(), flow_commutes),
        ),
        (
            "stable image of critical paths is the fixed space",
            run(extendable(), stable_image_is_fixed_space),
        ),
        (
            "structural Morse check matches brute force",
            run(weighted(), structural_matches_bruteforce),
        ),
        (
            "condition (*) matches brute force on the closure",
            run(morse_for_star(), condition_star_matches_closure),
        ),
        (
            "single-zero constructor gives Morse with (*)",
            run(single_zero_input(), single_zero_constructor),
        ),
        (
            "invariance implies agreement",
            run(extendable_dag(), invariance_implies_agreement),
        ),
    ]
}

// ---- further invariants ----

pub fn morse_lemmas(w: Weighted) -> Result<(), TestCaseError> {
    prop_assume!(is_morse(&w.g, &w.f));
    prop_assert!(max_zeros_on_paths(&w.g, &w.f, w.g.vertex_count() + 1) <= 1);
    for z in w.f.zero_set() {
        prop_assert!(!w.g.on_directed_cycle(z).unwrap());
    }
    prop_assert!(is_flat_witten_morse(&w.g, &w.f, w.g.vertex_count().min(4)));
    if w.g.is_transitive() {
        for v in w.g.vertices() {
            let zeros =
                w.g.successors(v.0)
                    .iter()
                    .chain(w.g.predecessors(v.0))
                    .filter(|&&u| w.f.is_zero_at(u))
                    .count();
            prop_assert!(zeros <= 1);
        }
    }
    Ok(())
}

pub fn omega_matches_oracle(g: Digraph) -> Result<(), TestCaseError> {
    for n in 0..=3 {
        let basis: Vec<Vec<usize>> = oracle::allowed_paths(&g, n);
        let lib_basis: Vec<Vec<usize>> = enumerate_allowed(&g, n)
            .paths()
            .iter()
            .map(|p| p.vertices().to_vec())
            .collect();
        prop_assert_eq!(&lib_basis, &basis);
        let lib = omega_basis(&Rationals, &g, n);
        let expected: Vec<Vec<BigRational>> = oracle::omega(&g, n)
            .iter()
            .map(|c| oracle::coords(c, &basis))
            .collect();
        prop_assert!(oracle::same_span(lib.basis(), &expected, basis.len()));
    }
    Ok(())
}

pub fn betti_matches_oracle(g: Digraph) -> Result<(), TestCaseError> {
    let n = default_max_dim(&g).min(2);
    let lib = direct_complex(&Rationals, &g, n + 1).unwrap();
    prop_assert_eq!(lib.betti(), oracle::betti(&g, n));
    prop_assert!(lib.squares_to_zero());
    Ok(())
}

pub fn relabel_invariance(input: (Weighted, Vec<usize>)) -> Result<(), TestCaseError> {
    let (w, perm) = input;
    let n = w.g.vertex_count();
    let perm: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
    let edges: Vec<(usize, usize)> = w.g.edges().map(|(u, v)| (perm[u.0], perm[v.0])).collect();
    let h = Digraph::from_edges(n, &edges);
    let mut values = vec![BigRational::from_integer(0.into()); n];
    for v in 0..n {
        values[perm[v]] = w.f.values()[v].clone();
    }
    let fh = MorseFunction::new(&h, values).unwrap();
    let top = default_max_dim(&w.g).min(3);
    let a = morse_pipeline(&Rationals, &w.g, &w.f, top + 1).unwrap();
    let b = morse_pipeline(&Rationals, &h, &fh, top + 1).unwrap();
    prop_assert_eq!(a.complex.betti(), b.complex.betti());
    prop_assert_eq!(a.complex.dims(), b.complex.dims());
    let da = direct_complex(&Rationals, &w.g, top + 1).unwrap();
    let db = direct_complex(&Rationals, &h, top + 1).unwrap();
    prop_assert_eq!(da.betti(), db.betti());
    prop_assert_eq!(a.invariance.holds(), b.invariance.holds());
    Ok(())
}

pub fn relabel_input() -> impl Strategy<Value = (Weighted, Vec<usize>)> {
    (
        extendable_dag(),
        Just((0..6).collect::<Vec<_>>()).prop_shuffle(),
    )
}

pub fn morse_dims_bounded(w: Weighted) -> Result<(), TestCaseError> {
    let top = default_max_dim(&w.g).min(3) + 1;
    let p = morse_pipeline(&Rationals, &w.g, &w.f, top).unwrap();
    let omega = direct_complex(&Rationals, &w.g, top).unwrap().dims();
    for (n, m) in p.complex.dims().into_iter().enumerate() {
        prop_assert!(m <= p.critical[n].len());
        prop_assert!(m <= omega[n]);
    }
    prop_assert!(p.complex.squares_to_zero());
    let inv = check_omega_invariance(&w.g, &p.gradient);
    prop_assert_eq!(inv.holds(), p.invariance.holds());
    let _ = mat_rows;
    Ok(())
}
