use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape { expected: (rows, cols), found: (data.len(), 1) });
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds from row slices; panics on ragged input (use `try_from_rows` for fallible input).
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        Self::try_from_rows(rows).expect("ragged rows")
    }

    pub fn try_from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let cols = rows.first().map(|x| x.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Shape { expected: (r, cols), found: (r, row.len()) });
            }
            data.extend_from_slice(row);
        }
        Ok(CMatrix { rows: r, cols, data })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let converted: Vec<Vec<C64>> =
            rows.iter().map(|r| r.as_ref().iter().map(|&x| cr(x)).collect()).collect();
        Self::from_rows(&converted)
    }

    pub fn from_columns<V: AsRef<[C64]>>(nrows: usize, cols: &[V]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            let col = col.as_ref();
            assert_eq!(col.len(), nrows, "column length mismatch");
            for i in 0..nrows {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| cr(x)).collect();
        Self::diag(&v)
    }

    /// Upper-triangular Jordan block `lambda*I + N` with ones on the superdiagonal.
    pub fn jordan_block(size: usize, lambda: C64) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = lambda;
            if i + 1 < size {
                m[(i, i + 1)] = cr(1.0);
            }
        }
        m
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(blocks: &[CMatrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)];
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Columns `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            for j in start..end {
                out[(i, j - start)] = self[(i, j)];
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> CMatrix {
        let mut out = CMatrix::zeros(row_idx.len(), col_idx.len());
        for (ii, &i) in row_idx.iter().enumerate() {
            for (jj, &j) in col_idx.iter().enumerate() {
                out[(ii, jj)] = self[(i, j)];
            }
        }
        out
    }

    pub fn hstack(parts: &[&CMatrix]) -> CMatrix {
        let rows = parts.first().map(|p| p.rows).unwrap_or(0);
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = CMatrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..p.cols {
                    out[(i, c0 + j)] = p[(i, j)];
                }
            }
            c0 += p.cols;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "mul_vec length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(C64::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Index of the first entry of maximal modulus (row-major order).
    pub fn argmax_entry(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, f64)> = None;
        for (idx, z) in self.data.iter().enumerate() {
            let a = z.norm();
            if best.map_or(true, |(_, b)| a > b) {
                best = Some((idx, a));
            }
        }
        best.map(|(idx, _)| (idx / self.cols, idx % self.cols))
    }

    /// Divides by the first maximal-modulus entry so that entry becomes exactly 1.
    pub fn normalize_sup_entry(&self) -> CMatrix {
        match self.argmax_entry() {
            Some((i, j)) if !self[(i, j)].is_zero() => {
                let pivot = self[(i, j)];
                let mut out = self.scale(pivot.inv());
                out[(i, j)] = cr(1.0);
                out
            }
            _ => self.clone(),
        }
    }

    /// Divides by the largest entry modulus (no phase change).
    pub fn normalize_sup_norm(&self) -> CMatrix {
        let s = self.norm_max();
        if s > 0.0 {
            self.scale_real(1.0 / s)
        } else {
            self.clone()
        }
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// `self^m` by repeated squaring.
    pub fn pow(&self, m: u64) -> CMatrix {
        self.pow_normalized(m, false)
    }

    /// `self^m` by repeated squaring; with `renormalize`, every product is divided by its
    /// sup-norm, which yields the projective class of the power without overflow.
    pub fn pow_normalized(&self, mut m: u64, renormalize: bool) -> CMatrix {
        assert!(self.is_square());
        let mut result = CMatrix::identity(self.rows);
        let mut base = self.clone();
        while m > 0 {
            if m & 1 == 1 {
                result = &result * &base;
                if renormalize {
                    result = result.normalize_sup_norm();
                }
            }
            m >>= 1;
            if m > 0 {
                base = &base * &base;
                if renormalize {
                    base = base.normalize_sup_norm();
                }
            }
        }
        result
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a CMatrix> for &'a CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &'a CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Vector helpers. `dot(x, y)` is linear in `x` and conjugate-linear in `y`.

pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).fold(C64::zero(), |acc, (a, b)| acc + a * b.conj())
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm_max(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn scale_vec(x: &[C64], s: C64) -> Vec<C64> {
    x.iter().map(|&z| z * s).collect()
}

pub fn sub_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn add_vec(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// Unit vector in the direction of `x`; `None` for the zero vector.
pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let n = norm(x);
    if n == 0.0 || !n.is_finite() {
        None
    } else {
        Some(x.iter().map(|&z| z / n).collect())
    }
}

/// Canonical representative of a projective point: unit norm, first maximal-modulus
/// coordinate real and positive.
pub fn projective_normalize(x: &[C64]) -> Option<Vec<C64>> {
    let u = normalized(x)?;
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in u.iter().enumerate() {
        // ties within 1e-12 go to the lower index
        if z.norm() > best_abs + 1e-12 {
            best_abs = z.norm();
            best = i;
        }
    }
    let phase = u[best] / u[best].norm();
    Some(u.iter().map(|&z| z / phase).collect())
}

/// Fubini-Study chordal distance `sqrt(1 - |<x,y>|^2 / (|x|^2 |y|^2))`.
pub fn chordal(x: &[C64], y: &[C64]) -> f64 {
    let (xn, yn) = match (normalized(x), normalized(y)) {
        (Some(a), Some(b)) => (a, b),
        _ => return 1.0,
    };
    // sine of the angle, computed from the residual for accuracy near zero
    let c = dot(&xn, &yn);
    let r: f64 = xn.iter().zip(&yn).map(|(a, b)| (a - c * b).norm_sqr()).sum();
    r.sqrt().min(1.0)
}

pub fn basis_vector(n: usize, i: usize) -> Vec<C64> {
    let mut v = vec![C64::zero(); n];
    v[i] = cr(1.0);
    v
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Real dot product in twice the working precision (compensated products and sums).
fn dot2(terms: &[(f64, f64)]) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for &(a, b) in terms {
        let p = a * b;
        let e = Float::mul_add(a, b, -p);
        let (t, q) = two_sum(s, p);
        s = t;
        c += q + e;
    }
    s + c
}

/// `a x` with every entry evaluated by `dot2`.
pub fn accurate_mul_vec(a: &CMatrix, x: &[C64]) -> Vec<C64> {
    let mut re = Vec::with_capacity(2 * x.len());
    let mut im = Vec::with_capacity(2 * x.len());
    (0..a.rows())
        .map(|i| {
            re.clear();
            im.clear();
            for (m, v) in a.row(i).iter().zip(x) {
                re.push((m.re, v.re));
                re.push((-m.im, v.im));
                im.push((m.re, v.im));
                im.push((m.im, v.re));
            }
            C64::new(dot2(&re), dot2(&im))
        })
        .collect()
}
