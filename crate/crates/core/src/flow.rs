//! Gradient vector field, gradient flow and its stabilization.
//!
//! Matrices use the row convention: row `i` is the image of basis path `i`,
//! a chain `x` maps to `x · M`, and "first `A`, then `B`" is `M(A) · M(B)`.
//! The flow is `Φ_n = Id + V_n ∂_{n+1} + ∂_n V_{n-1}` with `∂` the boundary
//! projected onto allowed paths; on a transitive digraph the only faces
//! dropped by the projection are those with a repeated consecutive vertex,
//! so the projected boundary still squares to zero.

use rayon::prelude::*;
use thiserror::Error;

use crate::digraph::Digraph;
use crate::linalg::{Field, LinalgError, Matrix, Subspace};
use crate::morse::{check_morse, equal_value_cofaces, MorseError, MorseFunction};
use crate::path::{
    boundary, boundary_matrix, enumerate_allowed, omega_in_basis, Chain, Path, PathBasis,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("path {0} has several equal-value cofaces")]
    MultipleCofaces(String),
    #[error("sign of the gradient at {0} disagrees with the boundary coefficient")]
    SignMismatch(String),
    #[error("flow does not commute with the boundary in dimension {0}")]
    CommutationFailure(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `V_n : P_n → P_{n+1}` for `n = 0..=top`, together with the bases
/// `P_0 … P_{top+1}` they are written in.
#[derive(Clone, Debug)]
pub struct GradientField<F: Field> {
    field: F,
    bases: Vec<PathBasis>,
    matrices: Vec<Matrix<F>>,
    /// `pairs[n][i] = Some((j, sign))` when `V(path i) = sign · path j`.
    pairs: Vec<Vec<Option<(usize, i64)>>>,
}

/// `V(α) = -⟨∂γ, α⟩ γ` for the unique coface `γ` with `f(γ) = f(α)`.
pub fn gradient<F: Field>(
    field: &F,
    g: &Digraph,
    f: &MorseFunction,
    top: usize,
) -> Result<GradientField<F>, FlowError> {
    check_morse(g, f)?;
    let bases: Vec<PathBasis> = (0..=top + 1).map(|n| enumerate_allowed(g, n)).collect();
    let per_dim: Vec<Result<(Matrix<F>, Vec<Option<(usize, i64)>>), FlowError>> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let (src, dst) = (&bases[n], &bases[n + 1]);
            let mut m = Matrix::zeros(field, src.len(), dst.len());
            let mut pairs = vec![None; src.len()];
            for (i, alpha) in src.paths().iter().enumerate() {
                let cofaces = equal_value_cofaces(g, f, alpha);
                let (pos, _, gamma) = match cofaces.as_slice() {
                    [] => continue,
                    [one] => one,
                    _ => return Err(FlowError::MultipleCofaces(alpha.label(g))),
                };
                let sign = if pos % 2 == 0 { -1 } else { 1 };
                let incidence =
                    boundary(&Chain::from_path(field, gamma.clone())).coefficient(alpha);
                if field.neg(&incidence) != field.from_i64(sign) {
                    return Err(FlowError::SignMismatch(alpha.label(g)));
                }
                let j = dst.position(gamma).expect("coface is an allowed path");
                m.set(i, j, field.from_i64(sign));
                pairs[i] = Some((j, sign));
            }
            Ok((m, pairs))
        })
        .collect();
    let mut matrices = Vec::with_capacity(top + 1);
    let mut pairs = Vec::with_capacity(top + 1);
    for r in per_dim {
        let (m, p) = r?;
        matrices.push(m);
        pairs.push(p);
    }
    Ok(GradientField {
        field: field.clone(),
        bases,
        matrices,
        pairs,
    })
}

impl<F: Field> GradientField<F> {
    pub fn field(&self) -> &F {
        &self.field
    }

    /// Highest `n` with `V_n` available.
    pub fn top(&self) -> usize {
        self.matrices.len() - 1
    }

    pub fn basis(&self, n: usize) -> &PathBasis {
        &self.bases[n]
    }

    pub fn bases(&self) -> &[PathBasis] {
        &self.bases
    }

    pub fn matrix(&self, n: usize) -> &Matrix<F> {
        &self.matrices[n]
    }

    /// `V_n` applied to a chain written in the coordinates of `P_n`.
    pub fn apply(&self, n: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        self.matrices[n].apply_row(x)
    }

    /// The image of a single basis path, as `(index in P_{n+1}, ±1)`.
    pub fn image_of(&self, n: usize, i: usize) -> Option<(usize, i64)> {
        self.pairs[n][i]
    }

    /// `V(α)` as a chain; `α` must be an allowed `n`-path with `n ≤ top`.
    pub fn apply_path(&self, alpha: &Path) -> Chain<F> {
        let n = alpha.dim();
        let i = self.bases[n].position(alpha).expect("path in basis");
        match self.pairs[n][i] {
            None => Chain::zero(&self.field, n + 1),
            Some((j, s)) => {
                let gamma = self.bases[n + 1].paths()[j].clone();
                Chain::from_path(&self.field, gamma).scale(&self.field.from_i64(s))
            }
        }
    }

    /// Paths hit by `V_{n-1}`, i.e. the support of its image in `P_n`.
    pub fn image_support(&self, n: usize) -> Vec<usize> {
        if n == 0 {
            return Vec::new();
        }
        let mut hit: Vec<usize> = self.pairs[n - 1]
            .iter()
            .flatten()
            .map(|&(j, _)| j)
            .collect();
        hit.sort_unstable();
        hit
    }

    /// The projected boundary `∂_n : P_n → P_{n-1}`.
    pub fn boundary_matrix(&self, n: usize) -> Matrix<F> {
        if n == 0 {
            boundary_matrix(&self.field, &self.bases[0], None)
        } else {
            boundary_matrix(&self.field, &self.bases[n], Some(&self.bases[n - 1]))
        }
    }
}

/// Per-dimension flow matrices `M(Φ_n)` for `n = 0..=top`.
#[derive(Clone, Debug)]
pub struct FlowOperator<F: Field> {
    field: F,
    bases: Vec<PathBasis>,
    matrices: Vec<Matrix<F>>,
    stabilized: Option<Vec<Matrix<F>>>,
    exponents: Vec<usize>,
}

/// Assembles `Φ = Id + ∂V + V∂` from a gradient field and checks
/// `Φ ∂ = ∂ Φ` in every dimension.
pub fn flow<F: Field>(v: &GradientField<F>) -> Result<FlowOperator<F>, FlowError> {
    let field = &v.field;
    let top = v.top();
    let boundaries: Vec<Matrix<F>> = (0..=top + 1).map(|n| v.boundary_matrix(n)).collect();
    let matrices: Vec<Matrix<F>> = (0..=top)
        .into_par_iter()
        .map(|n| {
            let mut phi = Matrix::identity(field, v.bases[n].len());
            phi = phi.add(&v.matrices[n].mul(&boundaries[n + 1]));
            if n > 0 {
                phi = phi.add(&boundaries[n].mul(&v.matrices[n - 1]));
            }
            phi
        })
        .collect();
    for n in 1..=top {
        if matrices[n].mul(&boundaries[n]) != boundaries[n].mul(&matrices[n - 1]) {
            return Err(FlowError::CommutationFailure(n));
        }
    }
    Ok(FlowOperator {
        field: field.clone(),
        bases: v.bases[..=top].to_vec(),
        matrices,
        stabilized: None,
        exponents: Vec::new(),
    })
}

impl<F: Field> FlowOperator<F> {
    pub fn top(&self) -> usize {
        self.matrices.len() - 1
    }

    pub fn basis(&self, n: usize) -> &PathBasis {
        &self.bases[n]
    }

    pub fn matrix(&self, n: usize) -> &Matrix<F> {
        &self.matrices[n]
    }

    pub fn is_stabilized(&self) -> bool {
        self.stabilized.is_some()
    }

    /// `Φ_n^∞`, available after [`FlowOperator::stabilize`].
    pub fn stable_matrix(&self, n: usize) -> Option<&Matrix<F>> {
        self.stabilized.as_ref().map(|s| &s[n])
    }

    /// Smallest `k` with `Φ_n^k = Φ_n^{k+1}`, per dimension.
    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    /// Powers each `Φ_n` to its fixpoint. `cap = None` uses
    /// `dim P_n + 1` per dimension.
    pub fn stabilize(mut self, cap: Option<usize>) -> Result<Self, FlowError> {
        let results: Vec<Result<(Matrix<F>, usize), LinalgError>> = self
            .matrices
            .par_iter()
            .map(|m| m.power_stabilize(cap.unwrap_or(m.rows() + 1)))
            .collect();
        let mut stable = Vec::with_capacity(results.len());
        let mut exponents = Vec::with_capacity(results.len());
        for r in results {
            let (m, k) = r?;
            stable.push(m);
            exponents.push(k);
        }
        self.stabilized = Some(stable);
        self.exponents = exponents;
        Ok(self)
    }

    /// `P_n^Φ = {x : Φ x = x}`.
    pub fn invariant_space(&self, n: usize) -> Subspace<F> {
        self.matrices[n]
            .fixed_space()
            .expect("flow matrices are square")
    }

    /// `span Φ^∞(paths)` in the coordinates of `P_n`.
    pub fn stable_image_of(&self, n: usize, paths: &[Path]) -> Subspace<F> {
        let stable = self
            .stable_matrix(n)
            .expect("stabilize the flow before taking stable images");
        let rows = paths
            .iter()
            .map(|p| self.bases[n].position(p).expect("path in basis"))
            .map(|i| stable.row(i).to_vec())
            .collect();
        Subspace::from_vectors(&self.field, self.bases[n].len(), rows)
    }
}

pub fn flow_invariant_space<F: Field>(flow: &FlowOperator<F>, n: usize) -> Subspace<F> {
    flow.invariant_space(n)
}

/// An `Ω_n(G)` basis chain whose image under `V̄` leaves `Ω_{n+1}(G)`.
#[derive(Clone, Debug)]
pub struct InvarianceWitness<F: Field> {
    pub dim: usize,
    pub chain: Chain<F>,
    pub image: Chain<F>,
}

impl<F: Field> InvarianceWitness<F> {
    /// `V̄(chain) = image`, e.g. `V̄(v1v2) = -v0v1v2`.
    pub fn render(&self, g: &Digraph) -> String {
        format!("V̄({}) = {}", self.chain.render(g), self.image.render(g))
    }
}

/// Outcome of testing `V̄(Ω_n(G)) ⊆ Ω_{n+1}(G)` for `n = 0..=vbar.top()`.
/// Every failing basis vector is listed, lowest dimension first.
#[derive(Clone, Debug)]
pub struct InvarianceCheck<F: Field> {
    pub witnesses: Vec<InvarianceWitness<F>>,
}

impl<F: Field> InvarianceCheck<F> {
    pub fn holds(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// `vbar` must be the gradient field of the extension on the transitive
/// closure of `g` (whose allowed paths contain those of `g`).
pub fn check_omega_invariance<F: Field>(
    g: &Digraph,
    vbar: &GradientField<F>,
) -> InvarianceCheck<F> {
    let field = &vbar.field;
    let top = vbar.top();
    let g_bases: Vec<PathBasis> = (0..=top + 1).map(|n| enumerate_allowed(g, n)).collect();
    let omegas: Vec<Subspace<F>> = g_bases
        .par_iter()
        .map(|b| omega_in_basis(field, g, b))
        .collect();
    let mut witnesses = Vec::new();
    for n in 0..=top {
        let embed = g_bases[n].embedding_into(&vbar.bases[n]);
        for b in omegas[n].basis() {
            let mut x = vec![field.zero(); vbar.bases[n].len()];
            for (i, c) in b.iter().enumerate() {
                x[embed[i]] = c.clone();
            }
            let image = Chain::from_coordinates(field, &vbar.bases[n + 1], &vbar.apply(n, &x));
            let inside = image
                .coordinates(&g_bases[n + 1])
                .is_some_and(|y| omegas[n + 1].contains(&y));
            if !inside {
                witnesses.push(InvarianceWitness {
                    dim: n,
                    chain: Chain::from_coordinates(field, &g_bases[n], b),
                    image,
                });
            }
        }
    }
    InvarianceCheck { witnesses }
}
