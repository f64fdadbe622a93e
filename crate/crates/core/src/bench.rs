//! Random acyclic digraphs and a trial harness comparing the direct and
//! Morse pipelines.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::digraph::{Digraph, VertexId};
use crate::homology::{default_max_dim, direct_complex, morse_pipeline};
use crate::linalg::Rationals;
use crate::morse::{single_zero_morse, MorseError, MorseFunction};

/// Edges `π(i) → π(j)` for `i < j`, each kept with probability `density`,
/// where `π` is a random permutation of `v0 … v{n-1}`.
pub fn generate_random_dag(n: usize, density: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let p = density.clamp(0.0, 1.0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Digraph::from_edges(n, &edges)
}

/// Among vertices on no directed cycle, one of maximum degree in the
/// transitive closure; ties go to the smallest index.
pub fn auto_zero(g: &Digraph) -> Result<VertexId, MorseError> {
    let closure = g.transitive_closure();
    let degree = |v: VertexId| closure.successors(v.0).len() + closure.predecessors(v.0).len();
    g.vertices()
        .filter(|&v| !g.on_directed_cycle(v).unwrap_or(true))
        .fold(None, |best: Option<VertexId>, v| match best {
            Some(b) if degree(b) >= degree(v) => Some(b),
            _ => Some(v),
        })
        .ok_or_else(|| MorseError::VertexOnCycle("every vertex".to_string()))
}

/// `f(zero) = 0` and `1, 2, 3, …` on the other vertices in index order,
/// through the single-zero constructor.
pub fn auto_zero_function(g: &Digraph) -> Result<MorseFunction, MorseError> {
    let zero = auto_zero(g)?;
    let values: BTreeMap<VertexId, BigRational> = g
        .vertices()
        .filter(|&v| v != zero)
        .enumerate()
        .map(|(i, v)| (v, BigRational::from_integer(BigInt::from(i + 1))))
        .collect();
    single_zero_morse(g, zero, &values)
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: RangeInclusive<usize>,
    pub density: f64,
    pub trials: usize,
    pub seed: u64,
    pub max_dim: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: 4..=8,
            density: 0.4,
            trials: 50,
            seed: 0,
            max_dim: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub id: usize,
    pub vertices: usize,
    pub edges: usize,
    pub closure_edges: usize,
    pub zero: Option<String>,
    pub omega_dims: Vec<usize>,
    pub morse_dims: Vec<usize>,
    pub direct_betti: Vec<usize>,
    pub morse_betti: Vec<usize>,
    pub direct_ms: f64,
    pub morse_ms: f64,
    pub invariance: Option<bool>,
    pub agreement: Option<bool>,
    pub error: Option<String>,
}

pub const CSV_HEADER: [&str; 14] = [
    "id",
    "vertices",
    "edges",
    "closure_edges",
    "zero",
    "omega_dims",
    "morse_dims",
    "direct_betti",
    "morse_betti",
    "direct_ms",
    "morse_ms",
    "invariance",
    "agreement",
    "error",
];

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn flag(x: Option<bool>) -> String {
    x.map_or_else(String::new, |b| b.to_string())
}

impl BenchRecord {
    /// Fields in [`CSV_HEADER`] order; lists are `;`-separated.
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.id.to_string(),
            self.vertices.to_string(),
            self.edges.to_string(),
            self.closure_edges.to_string(),
            self.zero.clone().unwrap_or_default(),
            join(&self.omega_dims),
            join(&self.morse_dims),
            join(&self.direct_betti),
            join(&self.morse_betti),
            format!("{:.3}", self.direct_ms),
            format!("{:.3}", self.morse_ms),
            flag(self.invariance),
            flag(self.agreement),
            self.error.clone().unwrap_or_default(),
        ]
    }

    pub fn omega_total(&self) -> usize {
        self.omega_dims.iter().sum()
    }

    pub fn morse_total(&self) -> usize {
        self.morse_dims.iter().sum()
    }

    /// `dim M_n ≤ dim Ω_n` in every dimension.
    pub fn within_bound(&self) -> bool {
        self.morse_dims.len() == self.omega_dims.len()
            && self
                .morse_dims
                .iter()
                .zip(&self.omega_dims)
                .all(|(m, o)| m <= o)
    }

    /// `dim M / dim Ω` summed over dimensions (`1` when `Ω` is empty).
    pub fn reduction_ratio(&self) -> f64 {
        match self.omega_total() {
            0 => 1.0,
            o => self.morse_total() as f64 / o as f64,
        }
    }
}

/// Runs both pipelines over the rationals on one instance.
pub fn run_trial(id: usize, g: &Digraph, f: &MorseFunction, max_dim: usize) -> BenchRecord {
    let zero = f.zero_set().first().map(|&z| g.label(z).to_string());
    let mut record = BenchRecord {
        id,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        closure_edges: g.transitive_closure().edge_count(),
        zero,
        omega_dims: Vec::new(),
        morse_dims: Vec::new(),
        direct_betti: Vec::new(),
        morse_betti: Vec::new(),
        direct_ms: 0.0,
        morse_ms: 0.0,
        invariance: None,
        agreement: None,
        error: None,
    };
    let start = Instant::now();
    let direct = direct_complex(&Rationals, g, max_dim + 1);
    record.direct_ms = start.elapsed().as_secs_f64() * 1e3;
    let direct = match direct {
        Ok(c) => c,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.omega_dims = direct.dims();
    record.direct_betti = direct.betti();

    let start = Instant::now();
    let morse = morse_pipeline(&Rationals, g, f, max_dim + 1);
    record.morse_ms = start.elapsed().as_secs_f64() * 1e3;
    let morse = match morse {
        Ok(p) => p,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    record.morse_dims = morse.complex.dims();
    record.morse_betti = morse.complex.betti();
    let invariance = morse.invariance.holds();
    let agreement = record.direct_betti == record.morse_betti;
    record.invariance = Some(invariance);
    record.agreement = Some(agreement);
    if invariance && !agreement {
        record.error = Some("Betti numbers differ although Ω(G) is V̄-invariant".to_string());
    }
    record
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchSummary {
    pub trials: usize,
    pub errors: usize,
    pub invariant: usize,
    pub agreeing: usize,
    pub bound_violations: usize,
    pub mean_reduction_ratio: f64,
}

pub fn summarize(records: &[BenchRecord]) -> BenchSummary {
    let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    let mean = if ok.is_empty() {
        1.0
    } else {
        ok.iter().map(|r| r.reduction_ratio()).sum::<f64>() / ok.len() as f64
    };
    BenchSummary {
        trials: records.len(),
        errors: records.len() - ok.len(),
        invariant: records
            .iter()
            .filter(|r| r.invariance == Some(true))
            .count(),
        agreeing: records.iter().filter(|r| r.agreement == Some(true)).count(),
        bound_violations: ok.iter().filter(|r| !r.within_bound()).count(),
        mean_reduction_ratio: mean,
    }
}

/// Trial `i` draws its vertex count and generator seed from one seeded
/// stream, so records depend only on the configuration. Trials run on the
/// rayon pool; the result is in trial order.
pub fn bench(config: &BenchConfig) -> Vec<BenchRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let plan: Vec<(usize, u64)> = (0..config.trials)
        .map(|_| (rng.gen_range(config.sizes.clone()), rng.gen()))
        .collect();
    plan.into_par_iter()
        .enumerate()
        .map(|(id, (n, seed))| {
            let g = generate_random_dag(n, config.density, seed);
            let max_dim = config.max_dim.unwrap_or_else(|| default_max_dim(&g));
            match auto_zero_function(&g) {
                Ok(f) => run_trial(id, &g, &f, max_dim),
                Err(e) => BenchRecord {
                    id,
                    vertices: g.vertex_count(),
                    edges: g.edge_count(),
                    closure_edges: g.transitive_closure().edge_count(),
                    zero: None,
                    omega_dims: Vec::new(),
                    morse_dims: Vec::new(),
                    direct_betti: Vec::new(),
                    morse_betti: Vec::new(),
                    direct_ms: 0.0,
                    morse_ms: 0.0,
                    invariance: None,
                    agreement: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}
