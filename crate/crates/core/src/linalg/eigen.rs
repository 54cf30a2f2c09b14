use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use super::matrix::{CMatrix, C64};
use super::schur::Schur;
use super::subspace::Subspace;
use super::svd::{condition_number, norm2, Svd};
use super::SLMatrix;
use crate::error::{Error, Result};

/// One eigenvalue cluster with its multiplicity data.
#[derive(Clone, Debug)]
pub struct EigenCluster {
    pub value: C64,
    pub algebraic_mult: usize,
    pub geometric_mult: usize,
    pub max_chain_length: usize,
    /// `kernel_dims[p-1] = dim ker (M - value)^p` restricted to the generalized eigenspace.
    pub kernel_dims: Vec<usize>,
}

impl EigenCluster {
    /// Jordan block sizes, descending.
    pub fn jordan_partition(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        let d = &self.kernel_dims;
        for p in 1..=d.len() {
            let at_least_p = d[p - 1] - if p >= 2 { d[p - 2] } else { 0 };
            let at_least_next = if p < d.len() { d[p] - d[p - 1] } else { 0 };
            for _ in 0..(at_least_p - at_least_next) {
                sizes.push(p);
            }
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

/// Eigenvalues clustered with multiplicities, their generalized eigenspaces, and the
/// restriction of the matrix to each of them.
#[derive(Clone, Debug)]
pub struct EigenStructure {
    pub eigenvalues: Vec<EigenCluster>,
    pub generalized_eigenspaces: Vec<Subspace>,
    /// `restricted[i] = U_i^H M U_i` with `U_i` the basis of `generalized_eigenspaces[i]`.
    pub restricted: Vec<CMatrix>,
    /// Nested kernels of `restricted[i] - value` in the coordinates of `U_i`.
    pub kernel_chains: Vec<Vec<Subspace>>,
    pub condition_estimate: f64,
}

impl EigenStructure {
    pub fn is_diagonalizable(&self) -> bool {
        self.eigenvalues.iter().all(|c| c.max_chain_length == 1)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.iter().map(|c| c.algebraic_mult).sum()
    }
}

/// Nested kernels `K_p = ker((I - P_{K_{p-1}}) N)` until the dimension stalls.
/// Returns `None` unless the chain exhausts the whole space.
pub(crate) fn kernel_chain(n: &CMatrix, thr: f64) -> Option<Vec<Subspace>> {
    let m = n.rows();
    let mut chain: Vec<Subspace> = Vec::new();
    let mut prev = Subspace::zero(m);
    loop {
        let proj = &CMatrix::identity(m) - &prev.projector();
        let a = &proj * n;
        let svd = Svd::new(&a).ok()?;
        let d = svd.s.iter().filter(|&&s| s <= thr).count();
        if d <= prev.dim() {
            return None;
        }
        let ker = svd.v.column_range(m - d, m);
        let mut cols = prev.basis_vectors();
        cols.extend(ker.columns());
        let next = Subspace::span_with_dim(&CMatrix::from_columns(m, &cols), d);
        chain.push(next.clone());
        if d == m {
            return Some(chain);
        }
        prev = next;
    }
}

fn nilpotency_threshold(mu: C64, scale: f64, tol: f64) -> f64 {
    tol * mu.norm().max(1e-3 * scale)
}

struct Candidate {
    indices: Vec<usize>,
    mean: C64,
    restricted: CMatrix,
    basis: CMatrix,
    chain: Vec<Subspace>,
}

fn try_cluster(schur: &Schur, a: &CMatrix, indices: &[usize], scale: f64, tol: f64) -> Option<Candidate> {
    let ev = schur.eigenvalues();
    let m = indices.len();
    let mean = indices.iter().map(|&i| ev[i]).sum::<C64>() / (m as f64);
    let mut s = schur.clone();
    s.reorder_to_front(indices);
    let basis = s.q.column_range(0, m);
    let restricted = &(&basis.adjoint() * a) * &basis;
    let thr = nilpotency_threshold(mean, scale, tol);
    let n = &restricted - &CMatrix::identity(m).scale(mean);
    let chain = if m == 1 {
        vec![Subspace::whole(1)]
    } else {
        kernel_chain(&n, thr)?
    };
    Some(Candidate { indices: indices.to_vec(), mean, restricted, basis, chain })
}

/// Eigen-structure of an arbitrary square matrix.
///
/// Computed eigenvalues are grouped largest-group-first: a group of `m` nearest
/// neighbours is accepted when its spread is at most `s * tol^(1/m)` (`s` the spectral
/// norm, which is the size of the splitting a defective eigenvalue suffers under
/// rounding) and the restricted operator minus the group mean is numerically nilpotent.
pub fn eigen_structure_of(a: &CMatrix, tol: f64, cond_cap: f64) -> Result<EigenStructure> {
    if !a.is_square() {
        return Err(Error::Shape { expected: (a.rows(), a.rows()), found: (a.rows(), a.cols()) });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let schur = Schur::new(a)?;
    let ev = schur.eigenvalues();
    let scale = norm2(a).max(f64::MIN_POSITIVE);
    let mut assigned = vec![false; n];
    let mut groups: Vec<Candidate> = Vec::new();
    for m in (2..=n).rev() {
        let radius = scale * tol.powf(1.0 / m as f64);
        for i in 0..n {
            if assigned[i] {
                continue;
            }
            let mut pool: Vec<usize> = (0..n).filter(|&j| !assigned[j]).collect();
            if pool.len() < m {
                break;
            }
            pool.sort_by(|&x, &y| {
                (ev[x] - ev[i])
                    .norm()
                    .partial_cmp(&(ev[y] - ev[i]).norm())
                    .unwrap_or(core::cmp::Ordering::Equal)
                    .then(x.cmp(&y))
            });
            let set = &pool[..m];
            let mean = set.iter().map(|&j| ev[j]).sum::<C64>() / (m as f64);
            if set.iter().any(|&j| (ev[j] - mean).norm() > radius) {
                continue;
            }
            if let Some(c) = try_cluster(&schur, a, set, scale, tol) {
                for &j in set {
                    assigned[j] = true;
                }
                groups.push(c);
            }
        }
    }
    for i in 0..n {
        if !assigned[i] {
            groups.push(try_cluster(&schur, a, &[i], scale, tol).expect("singleton cluster"));
        }
    }
    groups.sort_by(|x, y| {
        let kx = (x.mean.norm(), x.mean.im.atan2(x.mean.re));
        let ky = (y.mean.norm(), y.mean.im.atan2(y.mean.re));
        kx.partial_cmp(&ky).unwrap_or(core::cmp::Ordering::Equal).then(x.indices.cmp(&y.indices))
    });
    let all_cols: Vec<&CMatrix> = groups.iter().map(|g| &g.basis).collect();
    let condition_estimate = if groups.len() <= 1 { 1.0 } else { condition_number(&CMatrix::hstack(&all_cols)) };
    if !(condition_estimate <= cond_cap) {
        return Err(Error::IllConditioned { estimate: condition_estimate });
    }
    let mut eigenvalues = Vec::with_capacity(groups.len());
    let mut spaces = Vec::with_capacity(groups.len());
    let mut restricted = Vec::with_capacity(groups.len());
    let mut chains = Vec::with_capacity(groups.len());
    for g in groups {
        let kernel_dims: Vec<usize> = g.chain.iter().map(|k| k.dim()).collect();
        eigenvalues.push(EigenCluster {
            value: g.mean,
            algebraic_mult: g.indices.len(),
            geometric_mult: kernel_dims[0],
            max_chain_length: kernel_dims.len(),
            kernel_dims,
        });
        spaces.push(Subspace::from_orthonormal_columns(n, &g.basis));
        restricted.push(g.restricted);
        chains.push(g.chain);
    }
    Ok(EigenStructure {
        eigenvalues,
        generalized_eigenspaces: spaces,
        restricted,
        kernel_chains: chains,
        condition_estimate,
    })
}

pub const DEFAULT_COND_CAP: f64 = 1e12;

pub fn eigen_structure(m: &SLMatrix, tol: f64) -> Result<EigenStructure> {
    eigen_structure_of(m.matrix(), tol, DEFAULT_COND_CAP)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(m: &CMatrix) -> f64 {
    match super::schur::eigenvalues(m) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(0.0, f64::max),
        Err(_) => f64::NAN,
    }
}

/// Kernel and image with the rank decided by `tol * s_max`.
pub fn kernel_image(m: &CMatrix, tol: f64) -> (Subspace, Subspace) {
    let rows = m.rows();
    let cols = m.cols();
    let svd = match Svd::new(m) {
        Ok(s) => s,
        Err(_) => return (Subspace::zero(cols), Subspace::zero(rows)),
    };
    let smax = svd.s.first().copied().unwrap_or(0.0);
    let r = if smax == 0.0 { 0 } else { svd.rank(tol * smax) };
    let row_space = Subspace::from_orthonormal_columns(cols, &svd.v.column_range(0, r));
    let kernel = row_space.orthogonal_complement();
    let image = Subspace::from_orthonormal_columns(rows, &svd.u.column_range(0, r));
    (kernel, image)
}

