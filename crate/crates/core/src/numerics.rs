//! Dense complex matrices and matrix permanents.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted by [`permanent`]. Ryser costs `O(2^n n)`.
pub const MAX_PERMANENT_ORDER: usize = 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix must be at least 1x1");
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::from_vec(r, c, data)
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * c).collect() }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Square submatrix picked by (possibly repeated) row and column indices.
    pub fn select(&self, sel: &IndexSelection) -> Result<Self> {
        sel.validate(self)?;
        let n = sel.rows.len();
        if n == 0 {
            return Err(Error::Dimension("empty selection".into()));
        }
        let data = sel
            .rows
            .iter()
            .flat_map(|&i| sel.cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self[(i, j)])
            .collect();
        Self::from_vec(n, n, data)
    }

    /// Principal submatrix on the given (distinct) indices.
    pub fn principal(&self, idx: &[usize]) -> Result<Self> {
        self.select(&IndexSelection::new(idx.to_vec(), idx.to_vec()))
    }

    /// `‖M M† − I‖_max`, or `None` when the matrix is not square.
    pub fn unitarity_defect(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let prod = self.matmul(&self.adjoint()).ok()?;
        prod.max_abs_diff(&Self::identity(self.rows)).ok()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Row and column picks for a square submatrix. Indices are 0-based and may
/// repeat, which is how multiply-occupied modes enter a permanent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSelection {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl IndexSelection {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Self {
        Self { rows, cols }
    }

    /// Expands occupation counts into repeated indices, e.g. `[0, 2, 1]` → `[1, 1, 2]`.
    pub fn from_occupations(row_occ: &[u32], col_occ: &[u32]) -> Self {
        Self { rows: expand_occupations(row_occ), cols: expand_occupations(col_occ) }
    }

    fn validate(&self, m: &ComplexMatrix) -> Result<()> {
        if self.rows.len() != self.cols.len() {
            return Err(Error::Dimension(format!(
                "selection has {} rows but {} columns",
                self.rows.len(),
                self.cols.len()
            )));
        }
        if let Some(&i) = self.rows.iter().find(|&&i| i >= m.rows()) {
            return Err(Error::IndexOutOfRange { index: i, size: m.rows() });
        }
        if let Some(&j) = self.cols.iter().find(|&&j| j >= m.cols()) {
            return Err(Error::IndexOutOfRange { index: j, size: m.cols() });
        }
        Ok(())
    }
}

pub(crate) fn expand_occupations(occ: &[u32]) -> Vec<usize> {
    occ.iter().enumerate().flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize)).collect()
}

/// Matrix permanent by Ryser's inclusion–exclusion formula, visiting column
/// subsets in Gray-code order so each step updates the row sums by one column.
///
/// The summation order is fixed, so repeated calls are bit-identical.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("permanent of non-square {}x{} matrix", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > MAX_PERMANENT_ORDER {
        return Err(Error::Resource(format!("permanent order {n} exceeds {MAX_PERMANENT_ORDER}")));
    }
    Ok(ryser(m.as_slice(), n))
}

fn ryser(a: &[Complex64], n: usize) -> Complex64 {
    match n {
        0 => return ONE,
        1 => return a[0],
        2 => return a[0] * a[3] + a[1] * a[2],
        _ => {}
    }
    let mut row_sums = vec![ZERO; n];
    let mut in_subset = vec![false; n];
    let mut total = ZERO;
    let mut subset_size = 0usize;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        in_subset[j] = !in_subset[j];
        if in_subset[j] {
            subset_size += 1;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[i * n + j];
            }
        } else {
            subset_size -= 1;
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[i * n + j];
            }
        }
        let prod = row_sums.iter().fold(ONE, |acc, &s| acc * s);
        if subset_size % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Permanent of the matrix expanded by repeating rows and columns as listed
/// in `sel`. No factorial normalisation is applied.
pub fn permanent_with_multiplicity(m: &ComplexMatrix, sel: &IndexSelection) -> Result<Complex64> {
    sel.validate(m)?;
    if sel.rows.is_empty() {
        return Ok(ONE);
    }
    permanent(&m.select(sel)?)
}

/// True iff `m` is square and `‖M M† − I‖_max < tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.unitarity_defect().is_some_and(|d| d < tol)
}

pub fn adjoint(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}
