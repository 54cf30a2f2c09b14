//! Dense complex linear algebra used by every other module.

pub mod eigen;
pub mod hermitian_eig;
pub mod lu;
pub mod matrix;
pub mod schur;
pub mod subspace;
pub mod svd;

pub use eigen::{eigen_structure, eigen_structure_of, kernel_image, spectral_radius, EigenCluster, EigenStructure};
pub use matrix::{c, cr, CMatrix, C64};
pub use schur::eigenvalues;
pub use subspace::{subspace_distance, Subspace, SubspaceDistance};

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Lift of a projective transformation, normalized to determinant one.
#[derive(Clone, Debug, PartialEq)]
pub struct SLMatrix {
    matrix: CMatrix,
    det_tol: f64,
}

impl SLMatrix {
    pub fn new(m: &CMatrix, tol: f64) -> Result<SLMatrix> {
        normalize_to_sl(m, tol)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Ambient linear dimension `n + 1`.
    pub fn n_plus_1(&self) -> usize {
        self.matrix.rows()
    }

    pub fn det_tol(&self) -> f64 {
        self.det_tol
    }

    pub fn inverse(&self) -> SLMatrix {
        let inv = lu::inverse(&self.matrix).expect("determinant one matrices are invertible");
        SLMatrix { matrix: inv, det_tol: self.det_tol }
    }

    pub fn pow(&self, m: u64) -> SLMatrix {
        SLMatrix { matrix: self.matrix.pow(m), det_tol: self.det_tol }
    }

    /// `P self P^{-1}`, renormalized.
    pub fn conjugate_by(&self, p: &CMatrix) -> Result<SLMatrix> {
        let pinv = lu::inverse(p)?;
        normalize_to_sl(&(&(p * &self.matrix) * &pinv), self.det_tol)
    }
}

pub const DEFAULT_DET_TOL: f64 = 1e-12;

/// Divides by the principal `(n+1)`-th root of the determinant (argument in
/// `(-pi/(n+1), pi/(n+1)]`).
pub fn normalize_to_sl(m: &CMatrix, tol: f64) -> Result<SLMatrix> {
    if !m.is_square() || m.rows() < 2 {
        return Err(Error::Shape { expected: (m.rows().max(2), m.rows().max(2)), found: (m.rows(), m.cols()) });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = m.rows() as f64;
    let det = lu::det(m);
    let det_abs = det.norm();
    if !(det_abs > tol) {
        return Err(Error::SingularInput { det_abs });
    }
    let arg = det.im.atan2(det.re);
    let root = C64::from_polar(det_abs.powf(1.0 / n), arg / n);
    let matrix = m.scale(root.inv());
    Ok(SLMatrix { matrix, det_tol: tol })
}
