use std::fmt;

use super::{Field, LinalgError, Subspace};

/// Dense matrix over a [`Field`], stored row-major.
///
/// Linear maps between path spaces use the row convention: row `i` holds the
/// coordinates of the image of the `i`-th domain basis vector, so a
/// coordinate row vector `x` maps to `x · M` and the composite "first `A`,
/// then `B`" is `M(A) · M(B)`.
#[derive(Clone, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Matrix {}x{} over {}",
            self.rows,
            self.cols,
            self.field.name()
        )?;
        for r in self.to_strings() {
            writeln!(f, "  [{}]", r.join(", "))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Self {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Self {
            field: field.clone(),
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i64(field: &F, rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, cols, rows)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let rows = idx.iter().map(|&i| self.row(i).to_vec()).collect();
        Self::from_rows(&self.field, self.cols, rows)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&F::Elem, &F::Elem) -> F::Elem) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| self.field.add(a, b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| self.field.sub(a, b))
    }

    /// `x · M` for a coordinate row vector `x`.
    pub fn apply_row(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(x.len(), self.rows);
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, xi) in x.iter().enumerate() {
            if f.is_zero(xi) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let m = self.get(i, j);
                if !f.is_zero(m) {
                    *o = f.add(o, &f.mul(xi, m));
                }
            }
        }
        out
    }

    /// Reduced row-echelon form together with the pivot column of each
    /// nonzero row. Zero rows are dropped.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = &self.field;
        let mut rows = self.row_vectors();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            let Some(p) = (lead..rows.len()).find(|&r| !f.is_zero(&rows[r][c])) else {
                continue;
            };
            rows.swap(lead, p);
            let inv = f.inv(&rows[lead][c]);
            for x in rows[lead].iter_mut() {
                *x = f.mul(x, &inv);
            }
            let pivot_row = rows[lead].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == lead || f.is_zero(&row[c]) {
                    continue;
                }
                let factor = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    if !f.is_zero(p) {
                        *x = f.sub(x, &f.mul(&factor, p));
                    }
                }
            }
            pivots.push(c);
            lead += 1;
            if lead == rows.len() {
                break;
            }
        }
        rows.truncate(lead);
        (Self::from_rows(f, self.cols, rows), pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// `{x : M · x = 0}` (column vectors).
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(i, free));
            }
            basis.push(v);
        }
        Subspace::from_vectors(f, self.cols, basis)
    }

    /// `{x : x · M = 0}` (row vectors), the kernel of the map in the row
    /// convention.
    pub fn left_kernel(&self) -> Subspace<F> {
        self.transpose().kernel()
    }

    /// The row space `{x · M}`.
    pub fn image(&self) -> Subspace<F> {
        Subspace::from_vectors(&self.field, self.cols, self.row_vectors())
    }

    /// Fixed vectors of a square matrix in the row convention:
    /// `{x : x · M = x}`.
    pub fn fixed_space(&self) -> Result<Subspace<F>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self
            .sub(&Self::identity(&self.field, self.rows))
            .left_kernel())
    }

    /// Returns `(M^k, k)` for the smallest `1 <= k <= cap` with
    /// `M^k = M^(k+1)`.
    pub fn power_stabilize(&self, cap: usize) -> Result<(Self, usize), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut power = self.clone();
        for k in 1..=cap {
            let next = power.mul(self);
            if next == power {
                return Ok((power, k));
            }
            power = next;
        }
        Err(LinalgError::NoStabilization { cap })
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| self.field.render(x)).collect())
            .collect()
    }
}
