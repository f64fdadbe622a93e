use super::{Field, LinalgError, Matrix};

/// A linear subspace of `F^ambient`, stored as the nonzero rows of its
/// reduced row-echelon basis. Equal subspaces have identical representations.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    basis: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn from_vectors(field: &F, ambient: usize, vectors: Vec<Vec<F::Elem>>) -> Self {
        let (r, pivots) = Matrix::from_rows(field, ambient, vectors).rref();
        Self {
            field: field.clone(),
            ambient,
            basis: r.row_vectors(),
            pivots,
        }
    }

    pub fn from_i64(field: &F, ambient: usize, vectors: &[Vec<i64>]) -> Self {
        let vectors = vectors
            .iter()
            .map(|v| v.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_vectors(field, ambient, vectors)
    }

    pub fn zero(field: &F, ambient: usize) -> Self {
        Self::from_vectors(field, ambient, Vec::new())
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        Matrix::identity(field, ambient).image()
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(&self.field, self.ambient, self.basis.clone())
    }

    /// Coordinates of `v` with respect to the echelon basis, or `None` if
    /// `v` does not lie in the subspace.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(v.len(), self.ambient);
        let f = &self.field;
        let coords: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if f.is_zero(c) {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(b) {
                if !f.is_zero(x) {
                    *r = f.sub(r, &f.mul(c, x));
                }
            }
        }
        residual.iter().all(|x| f.is_zero(x)).then_some(coords)
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|b| other.contains(b))
    }

    /// `self ∩ other`, from the left kernel of the stacked basis matrix
    /// `[A; -B]`: every `(x, y)` with `x·A = y·B` yields the vector `x·A`.
    pub fn intersect(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.ambient != other.ambient {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient,
                right: other.ambient,
            });
        }
        let f = &self.field;
        let k = self.dim();
        let mut stacked = self.basis.clone();
        stacked.extend(
            other
                .basis
                .iter()
                .map(|b| b.iter().map(|x| f.neg(x)).collect::<Vec<_>>()),
        );
        let relations = Matrix::from_rows(f, self.ambient, stacked).left_kernel();
        let a = self.basis_matrix();
        let vectors = relations
            .basis()
            .iter()
            .map(|rel| a.apply_row(&rel[..k]))
            .collect();
        Ok(Self::from_vectors(f, self.ambient, vectors))
    }

    /// Image of the subspace under `M` in the row convention.
    pub fn map(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.rows(), self.ambient);
        let vectors = self.basis.iter().map(|b| m.apply_row(b)).collect();
        Self::from_vectors(&self.field, m.cols(), vectors)
    }

    /// Re-expresses the subspace in a larger ambient space through a
    /// coordinate injection `index_map[i] = j`.
    pub fn embed(&self, ambient: usize, index_map: &[usize]) -> Self {
        let f = &self.field;
        let vectors = self
            .basis
            .iter()
            .map(|b| {
                let mut v = vec![f.zero(); ambient];
                for (i, x) in b.iter().enumerate() {
                    v[index_map[i]] = x.clone();
                }
                v
            })
            .collect();
        Self::from_vectors(f, ambient, vectors)
    }
}
