//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    fn at(&mut self, r: usize, c: usize) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.get(k, j);
                    *out.at(i, j) += prod;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                *t.at(c, r) = self.get(r, c).clone();
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(src, c) * k;
            *self.at(dst, c) += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, src) * k;
            *self.at(r, dst) += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -self.get(r, c).clone();
            *self.at(r, c) = v;
        }
    }
}

/// `left · input · right = diagonal` with `left`, `right` unimodular.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    pub diagonal: IntMatrix,
    pub right: IntMatrix,
    /// Nonzero diagonal entries `d_1 | d_2 | …`, all positive.
    pub invariants: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }

    /// A basis of the integer lattice `{x ∈ Z^cols : input · x = 0}` as the
    /// trailing columns of `right`.
    pub fn integer_kernel(&self) -> Vec<Vec<BigInt>> {
        (self.rank()..self.right.cols())
            .map(|c| self.right.column(c))
            .collect()
    }
}

pub fn smith_decomposition(input: &IntMatrix) -> SmithDecomposition {
    let mut d = input.clone();
    let mut left = IntMatrix::identity(d.rows);
    let mut right = IntMatrix::identity(d.cols);
    let n = d.rows.min(d.cols);
    let mut t = 0;
    while t < n {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for r in t..d.rows {
            for c in t..d.cols {
                let v = d.get(r, c);
                if !v.is_zero() && best.is_none_or(|(br, bc)| v.abs() < d.get(br, bc).abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        d.swap_rows(t, pr);
        left.swap_rows(t, pr);
        d.swap_cols(t, pc);
        right.swap_cols(t, pc);

        let mut dirty = false;
        for r in t + 1..d.rows {
            if d.get(r, t).is_zero() {
                continue;
            }
            let q = -d.get(r, t).div_floor(d.get(t, t));
            d.add_row(r, t, &q);
            left.add_row(r, t, &q);
            dirty |= !d.get(r, t).is_zero();
        }
        for c in t + 1..d.cols {
            if d.get(t, c).is_zero() {
                continue;
            }
            let q = -d.get(t, c).div_floor(d.get(t, t));
            d.add_col(c, t, &q);
            right.add_col(c, t, &q);
            dirty |= !d.get(t, c).is_zero();
        }
        if dirty {
            continue;
        }
        // the pivot must divide every entry of the remaining block
        let pivot = d.get(t, t).clone();
        let offender =
            (t + 1..d.rows).find(|&r| (t + 1..d.cols).any(|c| !d.get(r, c).is_multiple_of(&pivot)));
        if let Some(r) = offender {
            let one = BigInt::one();
            d.add_row(t, r, &one);
            left.add_row(t, r, &one);
            continue;
        }
        if pivot.is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }
    let invariants = (0..n)
        .map(|i| d.get(i, i).clone())
        .take_while(|x| !x.is_zero())
        .collect();
    SmithDecomposition {
        left,
        diagonal: d,
        right,
        invariants,
    }
}

/// Invariant factors `d_1 | d_2 | …` of an integer matrix (nonzero ones only).
pub fn smith_normal_form(input: &IntMatrix) -> Vec<BigInt> {
    smith_decomposition(input).invariants
}
