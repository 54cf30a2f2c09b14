//! Unitary decomposition (split by eigenvalue modulus), block decomposition (scaled
//! identity and Jordan blocks), the index `k(v, T)` and the height/`Xi` data.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::lu::Lu;
use crate::linalg::matrix::{norm_max, CMatrix, C64};
use crate::linalg::svd::{norm2, Svd};
use crate::linalg::{eigen_structure_of, EigenStructure, SLMatrix, Subspace};
use crate::Tolerances;

/// One modulus group: `V_j`, the unit-spectrum action `gamma_j` in the orthonormal basis
/// of `V_j`, and the modulus `r_j`.
#[derive(Clone, Debug)]
pub struct UnitaryBlock {
    pub subspace: Subspace,
    pub gamma: CMatrix,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct UnitaryDecomposition {
    /// Sorted by strictly increasing `r`.
    pub blocks: Vec<UnitaryBlock>,
}

impl UnitaryDecomposition {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// `sum_j r_j Q_j gamma_j Q_j^+` with `Q = [Q_1 | ... | Q_k]`.
    pub fn reconstruct(&self) -> CMatrix {
        let cols: Vec<&CMatrix> = self.blocks.iter().map(|b| b.subspace.basis()).collect();
        let q = CMatrix::hstack(&cols);
        let parts: Vec<CMatrix> = self.blocks.iter().map(|b| b.gamma.scale_real(b.r)).collect();
        let d = CMatrix::direct_sum(&parts);
        let qinv = crate::linalg::lu::inverse(&q).expect("decomposition basis is invertible");
        &(&q * &d) * &qinv
    }
}

pub(crate) fn group_by_modulus(es: &EigenStructure, unit_tol: f64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..es.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| {
        es.eigenvalues[a].value.norm().partial_cmp(&es.eigenvalues[b].value.norm()).unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<f64> = None;
    for i in idx {
        let lm = es.eigenvalues[i].value.norm().ln();
        match (last, groups.last_mut()) {
            (Some(prev), Some(g)) if (lm - prev).abs() <= unit_tol => g.push(i),
            _ => groups.push(alloc::vec![i]),
        }
        last = Some(lm);
    }
    groups
}

pub(crate) fn unitary_decomposition_from(g: &CMatrix, es: &EigenStructure, tols: &Tolerances) -> UnitaryDecomposition {
    let n = g.rows();
    let mut blocks = Vec::new();
    for group in group_by_modulus(es, tols.unit_tol) {
        let mut cols = Vec::new();
        let mut dim = 0;
        for &i in &group {
            cols.extend(es.generalized_eigenspaces[i].basis_vectors());
            dim += es.eigenvalues[i].algebraic_mult;
        }
        let q = if group.len() == 1 {
            es.generalized_eigenspaces[group[0]].clone()
        } else {
            Subspace::span_with_dim(&CMatrix::from_columns(n, &cols), dim)
        };
        let restricted = &(&q.basis().adjoint() * g) * q.basis();
        let det = crate::linalg::lu::det(&restricted).norm();
        let r = det.powf(1.0 / dim as f64);
        blocks.push(UnitaryBlock { subspace: q, gamma: restricted.scale_real(1.0 / r), r });
    }
    UnitaryDecomposition { blocks }
}

pub fn unitary_decomposition(g: &SLMatrix, tols: &Tolerances) -> Result<UnitaryDecomposition> {
    let es = eigen_structure_of(g.matrix(), tols.cluster_tol, tols.cond_cap)?;
    Ok(unitary_decomposition_from(g.matrix(), &es, tols))
}

/// A scaled identity or scaled unipotent Jordan block.
#[derive(Clone, Debug)]
pub struct Block {
    /// Chain basis `beta_j` as columns, eigenvector first, top chain vector last.
    pub basis: CMatrix,
    pub lambda: C64,
    pub is_jordan: bool,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// `gamma_j`: the identity, or the Jordan block with eigenvalue one.
    pub fn gamma(&self) -> CMatrix {
        if self.is_jordan {
            CMatrix::jordan_block(self.dim(), crate::linalg::cr(1.0))
        } else {
            CMatrix::identity(self.dim())
        }
    }

    pub fn subspace(&self) -> Subspace {
        Subspace::span_with_dim(&self.basis, self.dim())
    }

    pub fn top(&self) -> Vec<C64> {
        self.basis.column(self.dim() - 1)
    }

    pub fn eigenvector(&self) -> Vec<C64> {
        self.basis.column(0)
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub ambient: usize,
    /// Sorted by (dimension descending, eigenvalue argument ascending, Jordan first).
    pub blocks: Vec<Block>,
    /// `|T B - B D| / (|T| |B|)` for the assembled basis `B` and action `D`.
    pub residual: f64,
}

impl BlockDecomposition {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn assembled_basis(&self) -> CMatrix {
        let cols: Vec<&CMatrix> = self.blocks.iter().map(|b| &b.basis).collect();
        CMatrix::hstack(&cols)
    }

    /// `(+)_j lambda_j gamma_j`.
    pub fn assembled_action(&self) -> CMatrix {
        let parts: Vec<CMatrix> = self.blocks.iter().map(|b| b.gamma().scale(b.lambda)).collect();
        CMatrix::direct_sum(&parts)
    }

    pub fn jordan_sizes(&self) -> Vec<usize> {
        self.blocks.iter().filter(|b| b.is_jordan).map(|b| b.dim()).collect()
    }
}

/// Jordan chains of the nilpotent `np` from its nested kernels, built top-down. Each
/// chain is returned eigenvector first.
fn jordan_chains(np: &CMatrix, kernels: &[Subspace]) -> Vec<Vec<Vec<C64>>> {
    let m = np.rows();
    let depth = kernels.len();
    let d = |p: usize| if p == 0 { 0 } else { kernels[p - 1].dim() };
    let mut chains: Vec<Vec<Vec<C64>>> = Vec::new();
    for p in (1..=depth).rev() {
        let ge_p = d(p) - d(p - 1);
        let ge_next = if p < depth { d(p + 1) - d(p) } else { 0 };
        let new = ge_p.saturating_sub(ge_next);
        if new == 0 {
            continue;
        }
        let mut cols: Vec<Vec<C64>> = if p >= 2 { kernels[p - 2].basis_vectors() } else { Vec::new() };
        for c in &chains {
            cols.push(c[p - 1].clone());
        }
        let taken = cols.len();
        let kp = kernels[p - 1].basis();
        let resid = if taken == 0 {
            kp.clone()
        } else {
            let qs = Subspace::span_with_dim(&CMatrix::from_columns(m, &cols), taken.min(m));
            &(&CMatrix::identity(m) - &qs.projector()) * kp
        };
        let svd = match Svd::new(&resid) {
            Ok(s) => s,
            Err(_) => continue,
        };
        for w_idx in 0..new.min(svd.v.cols()) {
            let w = svd.v.column(w_idx);
            let top = kp.mul_vec(&w);
            let mut down = alloc::vec![top];
            for _ in 1..p {
                let next = np.mul_vec(down.last().expect("nonempty"));
                down.push(next);
            }
            down.reverse();
            let s = crate::linalg::matrix::norm(&down[0]);
            let s = if s > 0.0 { 1.0 / s } else { 1.0 };
            chains.push(down.iter().map(|v| v.iter().map(|&z| z * s).collect()).collect());
        }
    }
    chains
}

/// Blocks of one eigenvalue cluster: one Jordan block per chain of length at least two and
/// a merged identity block for the eigenvectors without a chain.
fn cluster_blocks(es: &EigenStructure, i: usize, n: usize) -> Vec<Block> {
    let cluster = &es.eigenvalues[i];
    let u = es.generalized_eigenspaces[i].basis();
    let m = cluster.algebraic_mult;
    let mu = cluster.value;
    let np = &es.restricted[i].scale(mu.inv()) - &CMatrix::identity(m);
    let mut blocks = Vec::new();
    let mut singles: Vec<Vec<C64>> = Vec::new();
    for ch in jordan_chains(&np, &es.kernel_chains[i]) {
        if ch.len() == 1 {
            singles.push(u.mul_vec(&ch[0]));
        } else {
            let cols: Vec<Vec<C64>> = ch.iter().map(|v| u.mul_vec(v)).collect();
            blocks.push(Block { basis: CMatrix::from_columns(n, &cols), lambda: mu, is_jordan: true });
        }
    }
    if !singles.is_empty() {
        let d = singles.len();
        let s = Subspace::span_with_dim(&CMatrix::from_columns(n, &singles), d);
        blocks.push(Block { basis: s.basis().clone(), lambda: mu, is_jordan: false });
    }
    blocks
}

/// Block decomposition of `t` restricted to the generalized eigenspaces of `clusters`
/// (no unitarity requirement; `lambda` is the eigenvalue itself).
pub(crate) fn blocks_of_clusters(t: &CMatrix, es: &EigenStructure, clusters: &[usize]) -> BlockDecomposition {
    let n = t.rows();
    let mut blocks: Vec<Block> = clusters.iter().flat_map(|&i| cluster_blocks(es, i, n)).collect();
    blocks.sort_by(|a, b| {
        b.dim()
            .cmp(&a.dim())
            .then(a.lambda.im.atan2(a.lambda.re).partial_cmp(&b.lambda.im.atan2(b.lambda.re)).unwrap_or(core::cmp::Ordering::Equal))
            .then(b.is_jordan.cmp(&a.is_jordan))
    });
    let mut bd = BlockDecomposition { ambient: n, blocks, residual: 0.0 };
    let basis = bd.assembled_basis();
    let lhs = t * &basis;
    let rhs = &basis * &bd.assembled_action();
    bd.residual = norm2(&(&lhs - &rhs)) / (norm2(t) * norm2(&basis)).max(f64::MIN_POSITIVE);
    bd
}

pub(crate) fn block_decomposition_from(t: &CMatrix, es: &EigenStructure, tols: &Tolerances) -> Result<BlockDecomposition> {
    for c in &es.eigenvalues {
        if (c.value.norm() - 1.0).abs() > tols.unit_tol {
            return Err(Error::NonUnitarySpectrum { modulus: c.value.norm() });
        }
    }
    let all: Vec<usize> = (0..es.eigenvalues.len()).collect();
    Ok(blocks_of_clusters(t, es, &all))
}

pub fn block_decomposition(t: &CMatrix, tols: &Tolerances) -> Result<BlockDecomposition> {
    let es = eigen_structure_of(t, tols.cluster_tol, tols.cond_cap)?;
    block_decomposition_from(t, &es, tols)
}

/// Relative size below which a chain coordinate counts as zero in `k_index`.
const COORD_TOL: f64 = 1e-9;

/// `k(v, T)` from the coordinates of `v` in a block decomposition of `T`.
pub fn k_index_in(bd: &BlockDecomposition, v: &[C64]) -> Result<usize> {
    if norm_max(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let b = bd.assembled_basis();
    let coords = Lu::new(&b).solve_vec(v)?;
    let scale = norm_max(&coords);
    let mut k = 0;
    let mut offset = 0;
    for block in &bd.blocks {
        let d = block.dim();
        if block.is_jordan {
            for i in (0..d).rev() {
                if coords[offset + i].norm() > COORD_TOL * scale {
                    k = k.max(i);
                    break;
                }
            }
        }
        offset += d;
    }
    Ok(k)
}

pub fn k_index(v: &[C64], t: &CMatrix, tols: &Tolerances) -> Result<usize> {
    if norm_max(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    k_index_in(&block_decomposition(t, tols)?, v)
}

/// `H(T)` and `Xi(T)`.
#[derive(Clone, Debug)]
pub struct XiData {
    pub h: usize,
    /// Absent when `h < 2`.
    pub xi: Option<Subspace>,
}

pub fn xi_of(bd: &BlockDecomposition) -> XiData {
    let h = bd.blocks.iter().filter(|b| b.is_jordan).map(|b| b.dim()).max().unwrap_or(0);
    if h < 2 {
        return XiData { h, xi: None };
    }
    let mut cols = Vec::new();
    for b in &bd.blocks {
        let d = b.dim();
        let keep = if b.is_jordan && d == h { d - 1 } else { d };
        for i in 0..keep {
            cols.push(b.basis.column(i));
        }
    }
    let dim = cols.len();
    let xi = Subspace::span_with_dim(&CMatrix::from_columns(bd.ambient, &cols), dim);
    XiData { h, xi: Some(xi) }
}

pub fn height_and_xi(t: &CMatrix, tols: &Tolerances) -> Result<XiData> {
    Ok(xi_of(&block_decomposition(t, tols)?))
}
