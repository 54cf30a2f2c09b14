use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::matrix::{dot, norm, CMatrix, C64};
use super::svd::Svd;
use crate::error::{Error, Result};

/// Linear subspace of `C^ambient` stored by an orthonormal basis (columns of `basis`).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: CMatrix,
}

/// Result of comparing two subspaces by principal angles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubspaceDistance {
    /// Largest principal angle (from the smaller space into the larger one when the dimensions differ).
    pub angle: f64,
    pub dims_differ: bool,
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns whose residual drops
/// below `drop_tol` (relative to their original norm) are discarded.
fn orthonormalize(cols: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for col in cols {
        let n0 = norm(col);
        if n0 == 0.0 {
            continue;
        }
        let mut x = col.clone();
        for _ in 0..2 {
            for q in &out {
                let c = dot(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= c * qi;
                }
            }
        }
        let nx = norm(&x);
        if nx > drop_tol * n0 {
            out.push(x.iter().map(|&z| z / nx).collect());
        }
    }
    out
}

impl Subspace {
    pub fn zero(ambient: usize) -> Subspace {
        Subspace { ambient, basis: CMatrix::zeros(ambient, 0) }
    }

    pub fn whole(ambient: usize) -> Subspace {
        Subspace { ambient, basis: CMatrix::identity(ambient) }
    }

    /// Span of the columns of `m`; the numerical rank uses `rank_tol * s_max`.
    pub fn span(m: &CMatrix, rank_tol: f64) -> Subspace {
        let ambient = m.rows();
        if m.cols() == 0 || m.norm_max() == 0.0 {
            return Subspace::zero(ambient);
        }
        let svd = match Svd::new(m) {
            Ok(s) => s,
            Err(_) => return Subspace::from_vectors_gs(ambient, &m.columns()),
        };
        let r = svd.rank(rank_tol * svd.s[0]);
        Subspace::from_orthonormal_columns(ambient, &svd.u.column_range(0, r))
    }

    /// The `dim`-dimensional subspace best approximating the column span of `m`.
    pub fn span_with_dim(m: &CMatrix, dim: usize) -> Subspace {
        let ambient = m.rows();
        if dim == 0 || m.cols() == 0 {
            return Subspace::zero(ambient);
        }
        match Svd::new(m) {
            Ok(svd) => Subspace::from_orthonormal_columns(ambient, &svd.u.column_range(0, dim.min(svd.u.cols()))),
            Err(_) => Subspace::from_vectors_gs(ambient, &m.columns()),
        }
    }

    pub fn span_vectors(ambient: usize, vectors: &[Vec<C64>], rank_tol: f64) -> Subspace {
        if vectors.is_empty() {
            return Subspace::zero(ambient);
        }
        Subspace::span(&CMatrix::from_columns(ambient, vectors), rank_tol)
    }

    fn from_vectors_gs(ambient: usize, cols: &[Vec<C64>]) -> Subspace {
        let q = orthonormalize(cols, 1e-10);
        Subspace { ambient, basis: CMatrix::from_columns(ambient, &q) }
    }

    /// Accepts columns that are already (nearly) orthonormal and polishes them.
    pub fn from_orthonormal_columns(ambient: usize, q: &CMatrix) -> Subspace {
        let q = orthonormalize(&q.columns(), 1e-8);
        Subspace { ambient, basis: CMatrix::from_columns(ambient, &q) }
    }

    /// Coordinate subspace spanned by `e_i` for the given 0-based indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Subspace {
        let cols: Vec<Vec<C64>> =
            indices.iter().map(|&i| super::matrix::basis_vector(ambient, i)).collect();
        Subspace { ambient, basis: CMatrix::from_columns(ambient, &cols) }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<C64>> {
        self.basis.columns()
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * &self.basis.adjoint()
    }

    /// Orthogonal projection of `x` onto the subspace.
    pub fn project(&self, x: &[C64]) -> Vec<C64> {
        let mut out = alloc::vec![C64::zero(); self.ambient];
        for j in 0..self.dim() {
            let q = self.basis.column(j);
            let c = dot(x, &q);
            for (o, qi) in out.iter_mut().zip(&q) {
                *o += c * qi;
            }
        }
        out
    }

    /// Angle between the line through `x` and the subspace (`pi/2` for the zero subspace).
    pub fn angle_to_vector(&self, x: &[C64]) -> f64 {
        let p = self.project(x);
        let r: Vec<C64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        norm(&r).atan2(norm(&p))
    }

    pub fn contains_vector(&self, x: &[C64], tol: f64) -> bool {
        self.angle_to_vector(x) <= tol
    }

    /// True when every basis vector of `other` lies within angle `tol` of `self`.
    pub fn contains(&self, other: &Subspace, tol: f64) -> bool {
        other.dim() <= self.dim()
            && (0..other.dim()).all(|j| self.angle_to_vector(&other.basis.column(j)) <= tol)
    }

    pub fn join(&self, other: &Subspace, rank_tol: f64) -> Subspace {
        let mut cols = self.basis_vectors();
        cols.extend(other.basis_vectors());
        Subspace::span_vectors(self.ambient, &cols, rank_tol)
    }

    pub fn join_all(ambient: usize, parts: &[&Subspace], rank_tol: f64) -> Subspace {
        let mut cols = Vec::new();
        for p in parts {
            cols.extend(p.basis_vectors());
        }
        Subspace::span_vectors(ambient, &cols, rank_tol)
    }

    /// Image under `m`, keeping the dimension (for invertible `m`).
    pub fn image_under(&self, m: &CMatrix) -> Subspace {
        Subspace::span_with_dim(&(m * &self.basis), self.dim())
    }

    /// Deterministic orthonormal basis depending only on the subspace: column-pivoted
    /// Gram-Schmidt on the orthogonal projector, each vector phase-normalized.
    pub fn canonical_basis(&self) -> CMatrix {
        let n = self.ambient;
        let d = self.dim();
        let p = self.projector();
        let mut cols: Vec<Vec<C64>> = p.columns();
        let mut out: Vec<Vec<C64>> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut best = 0;
            let mut best_norm = -1.0;
            for (i, c) in cols.iter().enumerate() {
                let nc = norm(c);
                if nc > best_norm * (1.0 + 1e-9) + 1e-300 {
                    best_norm = nc;
                    best = i;
                }
            }
            let pick = cols[best].clone();
            let q = match super::matrix::projective_normalize(&pick) {
                Some(q) => q,
                None => break,
            };
            for c in cols.iter_mut() {
                for _ in 0..2 {
                    let s = dot(c, &q);
                    for (ci, qi) in c.iter_mut().zip(&q) {
                        *ci -= s * qi;
                    }
                }
            }
            out.push(q);
        }
        let polished = orthonormalize(&out, 1e-8);
        let fixed: Vec<Vec<C64>> =
            polished.iter().filter_map(|v| super::matrix::projective_normalize(v)).collect();
        CMatrix::from_columns(n, &fixed)
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let k = self.ambient - self.dim();
        if k == 0 {
            return Subspace::zero(self.ambient);
        }
        let p = &CMatrix::identity(self.ambient) - &self.projector();
        Subspace::span_with_dim(&p, k)
    }

    pub fn canonical(&self) -> Subspace {
        Subspace { ambient: self.ambient, basis: self.canonical_basis() }
    }
}

pub fn subspace_distance(s1: &Subspace, s2: &Subspace) -> Result<SubspaceDistance> {
    if s1.ambient != s2.ambient {
        return Err(Error::AmbientMismatch { left: s1.ambient, right: s2.ambient });
    }
    let dims_differ = s1.dim() != s2.dim();
    let (small, large) = if s1.dim() <= s2.dim() { (s1, s2) } else { (s2, s1) };
    if small.dim() == 0 {
        return Ok(SubspaceDistance { angle: 0.0, dims_differ });
    }
    let mut sin_max: f64 = 0.0;
    let pl = large.projector();
    let resid = &small.basis - &(&pl * &small.basis);
    if let Ok(svd) = Svd::new(&resid) {
        sin_max = svd.s[0];
    }
    let cross = &small.basis.adjoint() * &large.basis;
    let cos_min = if large.dim() == 0 {
        0.0
    } else {
        Svd::new(&cross).map(|s| *s.s.last().unwrap_or(&0.0)).unwrap_or(0.0)
    };
    Ok(SubspaceDistance { angle: sin_max.min(1.0).atan2(cos_min.min(1.0)), dims_differ })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::cr;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn principal_angle_examples() {
        let e1 = Subspace::coordinate(2, &[0]);
        let e2 = Subspace::coordinate(2, &[1]);
        assert_eq!(subspace_distance(&e1, &e1).unwrap().angle, 0.0);
        let d = subspace_distance(&e1, &e2).unwrap();
        assert!((d.angle - core::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let h = 1.0 / 2f64.sqrt();
        let diag = Subspace::span_vectors(2, &[alloc::vec![cr(h), cr(h)]], 1e-12);
        assert!((subspace_distance(&e1, &diag).unwrap().angle - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn dims_differ_flag() {
        let line = Subspace::coordinate(3, &[0]);
        let plane = Subspace::coordinate(3, &[0, 1]);
        let d = subspace_distance(&line, &plane).unwrap();
        assert!(d.dims_differ);
        assert!(d.angle < 1e-15);
        assert!(subspace_distance(&line, &Subspace::zero(4)).is_err());
    }

    #[test]
    fn canonical_basis_is_basis_independent() {
        let a = Subspace::span_vectors(3, &[alloc::vec![cr(1.0), cr(1.0), cr(0.0)], alloc::vec![cr(0.0), cr(1.0), cr(1.0)]], 1e-12);
        let b = Subspace::span_vectors(3, &[alloc::vec![cr(1.0), cr(2.0), cr(1.0)], alloc::vec![cr(1.0), cr(0.0), cr(-1.0)]], 1e-12);
        assert!(a.canonical_basis().max_abs_diff(&b.canonical_basis()) < 1e-12);
    }
}
