//! Chain complexes and Betti numbers, computed directly from `Ω_*(G)` and
//! from the Morse complex `Ω_*(G) ∩ Φ̄^∞(Crit_*(Ḡ))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::digraph::Digraph;
use crate::flow::{
    check_omega_invariance, flow, gradient, FlowError, FlowOperator, GradientField, InvarianceCheck,
};
use crate::linalg::{
    smith_decomposition, smith_normal_form, Field, IntMatrix, LinalgError, Matrix, Rationals,
    Subspace,
};
use crate::morse::{critical_paths, extend_to_closure, MorseError, MorseFunction};
use crate::path::{
    boundary_matrix, enumerate_allowed, obstruction_entries, omega_in_basis, render_terms, Chain,
    Path, PathBasis,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("boundary leaves the chain group in dimension {0}")]
    ClosednessFailure(usize),
    #[error("Ω(G) is V̄-invariant but Betti numbers differ: direct {direct:?}, Morse {morse:?}")]
    AgreementViolation {
        direct: Vec<usize>,
        morse: Vec<usize>,
    },
}

/// Chain groups as subspaces of `P_n` (for a fixed ambient basis per
/// dimension) with the ambient boundary matrices.
#[derive(Clone, Debug)]
pub struct ChainComplex<F: Field> {
    field: F,
    bases: Vec<PathBasis>,
    groups: Vec<Subspace<F>>,
    boundaries: Vec<Matrix<F>>,
}

impl<F: Field> ChainComplex<F> {
    /// Verifies that `∂_n` maps each group into the one below.
    pub fn new(
        field: &F,
        bases: Vec<PathBasis>,
        groups: Vec<Subspace<F>>,
        boundaries: Vec<Matrix<F>>,
    ) -> Result<Self, HomologyError> {
        assert_eq!(bases.len(), groups.len());
        assert_eq!(bases.len(), boundaries.len());
        for n in 1..groups.len() {
            let image = groups[n].map(&boundaries[n]);
            if !image.is_subspace_of(&groups[n - 1]) {
                return Err(HomologyError::ClosednessFailure(n));
            }
        }
        Ok(Self {
            field: field.clone(),
            bases,
            groups,
            boundaries,
        })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Highest dimension present.
    pub fn top(&self) -> usize {
        self.groups.len() - 1
    }

    pub fn basis(&self, n: usize) -> &PathBasis {
        &self.bases[n]
    }

    pub fn group(&self, n: usize) -> &Subspace<F> {
        &self.groups[n]
    }

    pub fn boundary(&self, n: usize) -> &Matrix<F> {
        &self.boundaries[n]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.groups.iter().map(Subspace::dim).collect()
    }

    /// Boundary of each group basis vector, in ambient coordinates one
    /// dimension down.
    pub fn restricted_boundary(&self, n: usize) -> Matrix<F> {
        self.groups[n].basis_matrix().mul(&self.boundaries[n])
    }

    /// `rank ∂_n|` for `n = 0..=top` (`rank ∂_0 = 0`).
    pub fn ranks(&self) -> Vec<usize> {
        (0..=self.top())
            .map(|n| {
                if n == 0 {
                    0
                } else {
                    self.restricted_boundary(n).rank()
                }
            })
            .collect()
    }

    /// `β_n = dim C_n − rank ∂_n − rank ∂_{n+1}` for `n < top`.
    pub fn betti(&self) -> Vec<usize> {
        let dims = self.dims();
        let ranks = self.ranks();
        (0..self.top())
            .map(|n| dims[n] - ranks[n] - ranks[n + 1])
            .collect()
    }

    pub fn squares_to_zero(&self) -> bool {
        (2..=self.top()).all(|n| {
            self.restricted_boundary(n)
                .mul(&self.boundaries[n - 1])
                .is_zero()
        })
    }

    pub fn basis_chains(&self, n: usize) -> Vec<Chain<F>> {
        self.groups[n]
            .basis()
            .iter()
            .map(|b| Chain::from_coordinates(&self.field, &self.bases[n], b))
            .collect()
    }

    /// Basis vectors rescaled so their last nonzero coordinate is `1`,
    /// printed as signed sums, e.g. `v0v2 - v0v1`.
    pub fn render_basis(&self, n: usize, g: &Digraph) -> Vec<String> {
        let f = &self.field;
        self.groups[n]
            .basis()
            .iter()
            .map(|b| {
                let last = b
                    .iter()
                    .rev()
                    .find(|x| !f.is_zero(x))
                    .expect("basis vectors are nonzero");
                let k = f.inv(last);
                let terms = b
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, x)| !f.is_zero(x))
                    .map(|(i, x)| (self.bases[n].paths()[i].label(g), f.mul(x, &k)));
                render_terms(f, terms)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Direct,
    Morse,
    Both,
}

/// Result of a homology computation. `dims` and `ranks` run through
/// `max_dim + 1` (the extra dimension supplies `rank ∂_{N+1}`); `betti`
/// through `max_dim`. In `both` mode the top-level lists describe the
/// direct complex and the `morse_*` lists the Morse complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainComplexReport {
    pub mode: Mode,
    pub coeffs: String,
    pub max_dim: usize,
    pub complex_top: usize,
    pub dims: Vec<usize>,
    pub ranks: Vec<usize>,
    pub betti: Vec<usize>,
    pub invariance: Option<bool>,
    pub agreement: Option<bool>,
    pub morse_basis: Vec<Vec<String>>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_ranks: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub morse_betti: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invariance_witnesses: Vec<String>,
    /// Torsion coefficients of `H_n(G; Z)`, only in integer mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<Vec<Vec<String>>>,
}

/// `min(|V| − 1, 6)`.
pub fn default_max_dim(g: &Digraph) -> usize {
    g.vertex_count().saturating_sub(1).min(6)
}

/// `Ω_0(g) … Ω_top(g)` in the coordinates of the allowed paths of `g`.
pub fn direct_complex<F: Field>(
    field: &F,
    g: &Digraph,
    top: usize,
) -> Result<ChainComplex<F>, HomologyError> {
    let bases: Vec<PathBasis> = (0..=top).map(|n| enumerate_allowed(g, n)).collect();
    let groups = bases.iter().map(|b| omega_in_basis(field, g, b)).collect();
    let boundaries = (0..=top)
        .map(|n| boundary_matrix(field, &bases[n], n.checked_sub(1).map(|m| &bases[m])))
        .collect();
    ChainComplex::new(field, bases, groups, boundaries)
}

pub fn direct_homology<F: Field>(
    field: &F,
    g: &Digraph,
    max_dim: usize,
) -> Result<ChainComplexReport, HomologyError> {
    let complex = direct_complex(field, g, max_dim + 1)?;
    Ok(ChainComplexReport {
        mode: Mode::Direct,
        coeffs: field.name(),
        max_dim,
        complex_top: max_dim + 1,
        dims: complex.dims(),
        ranks: complex.ranks(),
        betti: complex.betti(),
        invariance: None,
        agreement: None,
        morse_basis: Vec::new(),
        warnings: Vec::new(),
        morse_dims: None,
        morse_ranks: None,
        morse_betti: None,
        invariance_witnesses: Vec::new(),
        torsion: None,
    })
}

/// Every intermediate object of the Morse pipeline on `Ḡ`.
#[derive(Clone, Debug)]
pub struct MorsePipeline<F: Field> {
    pub closure: Digraph,
    pub extension: MorseFunction,
    pub gradient: GradientField<F>,
    pub flow: FlowOperator<F>,
    pub critical: Vec<Vec<Path>>,
    pub complex: ChainComplex<F>,
    pub invariance: InvarianceCheck<F>,
}

/// Builds `M_n = Ω_n(G) ∩ span Φ̄^∞(Crit_n(Ḡ))` for `n = 0..=top`.
pub fn morse_pipeline<F: Field>(
    field: &F,
    g: &Digraph,
    f: &MorseFunction,
    top: usize,
) -> Result<MorsePipeline<F>, HomologyError> {
    let (closure, extension) = extend_to_closure(g, f)?;
    let v = gradient(field, &closure, &extension, top)?;
    let phi = flow(&v)?.stabilize(None)?;
    let critical = (0..=top)
        .map(|n| critical_paths(&closure, &extension, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut groups = Vec::with_capacity(top + 1);
    for (n, crit) in critical.iter().enumerate() {
        let own = enumerate_allowed(g, n);
        let omega =
            omega_in_basis(field, g, &own).embed(v.basis(n).len(), &own.embedding_into(v.basis(n)));
        groups.push(omega.intersect(&phi.stable_image_of(n, crit))?);
    }
    let bases = v.bases()[..=top].to_vec();
    let boundaries = (0..=top).map(|n| v.boundary_matrix(n)).collect();
    let complex = ChainComplex::new(field, bases, groups, boundaries)?;
    let invariance = check_omega_invariance(g, &v);
    Ok(MorsePipeline {
        closure,
        extension,
        gradient: v,
        flow: phi,
        critical,
        complex,
        invariance,
    })
}

pub fn morse_complex<F: Field>(
    field: &F,
    g: &Digraph,
    f: &MorseFunction,
    max_dim: usize,
) -> Result<ChainComplex<F>, HomologyError> {
    Ok(morse_pipeline(field, g, f, max_dim + 1)?.complex)
}

fn morse_report<F: Field>(
    g: &Digraph,
    max_dim: usize,
    pipeline: &MorsePipeline<F>,
) -> ChainComplexReport {
    let c = &pipeline.complex;
    let field = c.field();
    let invariance = pipeline.invariance.holds();
    let invariance_witnesses: Vec<String> = pipeline
        .invariance
        .witnesses
        .iter()
        .map(|w| w.render(&pipeline.closure))
        .collect();
    let mut warnings = Vec::new();
    if let Some(first) = invariance_witnesses.first() {
        warnings.push(format!(
            "Ω(G) is not V̄-invariant ({first} leaves Ω(G)); Morse Betti numbers may differ from path homology"
        ));
    }
    ChainComplexReport {
        mode: Mode::Morse,
        coeffs: field.name(),
        max_dim,
        complex_top: max_dim + 1,
        dims: c.dims(),
        ranks: c.ranks(),
        betti: c.betti(),
        invariance: Some(invariance),
        agreement: None,
        morse_basis: (0..=max_dim).map(|n| c.render_basis(n, g)).collect(),
        warnings,
        morse_dims: None,
        morse_ranks: None,
        morse_betti: None,
        invariance_witnesses,
        torsion: None,
    }
}

pub fn morse_homology<F: Field>(
    field: &F,
    g: &Digraph,
    f: &MorseFunction,
    max_dim: usize,
) -> Result<ChainComplexReport, HomologyError> {
    let pipeline = morse_pipeline(field, g, f, max_dim + 1)?;
    Ok(morse_report(g, max_dim, &pipeline))
}

/// Runs both pipelines. When `Ω(G)` is `V̄`-invariant the Betti numbers
/// must agree; a disagreement then is an error, not a warning.
pub fn compare<F: Field>(
    field: &F,
    g: &Digraph,
    f: &MorseFunction,
    max_dim: usize,
) -> Result<ChainComplexReport, HomologyError> {
    let (direct, morse) = rayon::join(
        || direct_homology(field, g, max_dim),
        || morse_homology(field, g, f, max_dim),
    );
    let (direct, morse) = (direct?, morse?);
    let agreement = direct.betti == morse.betti;
    if morse.invariance == Some(true) && !agreement {
        return Err(HomologyError::AgreementViolation {
            direct: direct.betti,
            morse: morse.betti,
        });
    }
    let mut warnings = morse.warnings;
    if !agreement {
        warnings.push(format!(
            "Betti numbers differ: direct {:?}, Morse {:?}",
            direct.betti, morse.betti
        ));
    }
    Ok(ChainComplexReport {
        mode: Mode::Both,
        agreement: Some(agreement),
        invariance: morse.invariance,
        morse_basis: morse.morse_basis,
        warnings,
        morse_dims: Some(morse.dims),
        morse_ranks: Some(morse.ranks),
        morse_betti: Some(morse.betti),
        invariance_witnesses: morse.invariance_witnesses,
        ..direct
    })
}

/// Torsion coefficients (invariant factors `> 1`) of `H_n(G; Z)` for
/// `n = 0..=max_dim`, from the lattices `Ω_n(G; Z)` of integer chains with
/// allowed boundary.
pub fn integer_torsion(g: &Digraph, max_dim: usize) -> Vec<Vec<BigInt>> {
    let top = max_dim + 1;
    let bases: Vec<PathBasis> = (0..=top).map(|n| enumerate_allowed(g, n)).collect();
    let lattices: Vec<Vec<Vec<BigInt>>> = bases.iter().map(|b| omega_lattice(g, b)).collect();
    (0..=max_dim)
        .map(|n| {
            let d = lattice_boundary(&bases[n + 1], &bases[n], &lattices[n + 1], &lattices[n]);
            smith_normal_form(&d)
                .into_iter()
                .filter(|x| !x.is_one())
                .collect()
        })
        .collect()
}

/// A `Z`-basis of `{x ∈ Z^{P_n} : ∂x allowed}`, saturated in `Z^{P_n}`.
fn omega_lattice(g: &Digraph, basis: &PathBasis) -> Vec<Vec<BigInt>> {
    let (cols, entries) = obstruction_entries(g, basis);
    let mut t = vec![vec![BigInt::zero(); basis.len()]; cols];
    for (r, c, s) in entries {
        t[c][r] += s;
    }
    let transposed = IntMatrix::from_rows(basis.len(), t);
    smith_decomposition(&transposed).integer_kernel()
}

/// Matrix of `∂ : Ω_n(Z) → Ω_{n-1}(Z)` in lattice coordinates (row
/// convention).
fn lattice_boundary(
    upper: &PathBasis,
    lower: &PathBasis,
    upper_lattice: &[Vec<BigInt>],
    lower_lattice: &[Vec<BigInt>],
) -> IntMatrix {
    let q = Rationals;
    let to_q = |x: &BigInt| BigRational::from_integer(x.clone());
    let d = boundary_matrix(&q, upper, Some(lower));
    let images: Vec<Vec<BigRational>> = upper_lattice
        .iter()
        .map(|k| d.apply_row(&k.iter().map(to_q).collect::<Vec<_>>()))
        .collect();
    // c · K = y for every image y at once, from the rref of [Kᵀ | Yᵀ]
    let r = lower_lattice.len();
    let augmented: Vec<Vec<BigRational>> = (0..lower.len())
        .map(|i| {
            lower_lattice
                .iter()
                .map(|k| to_q(&k[i]))
                .chain(images.iter().map(|y| y[i].clone()))
                .collect()
        })
        .collect();
    let (red, pivots) = Matrix::from_rows(&q, r + images.len(), augmented).rref();
    let rows = (0..images.len())
        .map(|j| {
            let mut c = vec![BigInt::zero(); r];
            for (row, &p) in pivots.iter().enumerate().filter(|(_, &p)| p < r) {
                let x = red.get(row, r + j);
                assert!(x.is_integer(), "lattice coordinates are integral");
                c[p] = x.to_integer();
            }
            c
        })
        .collect();
    IntMatrix::from_rows(r, rows)
}

/// `rank ∂_n` over `Z` (equal to the rank over `Q`) for `n = 0..=top`.
pub fn integer_ranks(g: &Digraph, top: usize) -> Vec<usize> {
    let bases: Vec<PathBasis> = (0..=top).map(|n| enumerate_allowed(g, n)).collect();
    let lattices: Vec<Vec<Vec<BigInt>>> = bases.iter().map(|b| omega_lattice(g, b)).collect();
    (0..=top)
        .map(|n| match n {
            0 => 0,
            _ => smith_normal_form(&lattice_boundary(
                &bases[n],
                &bases[n - 1],
                &lattices[n],
                &lattices[n - 1],
            ))
            .len(),
        })
        .collect()
}

/// Chains of a complex group rendered through `g`'s labels.
pub fn render_group<F: Field>(complex: &ChainComplex<F>, n: usize, g: &Digraph) -> Vec<String> {
    complex
        .basis_chains(n)
        .iter()
        .map(|c| c.render(g))
        .collect()
}
