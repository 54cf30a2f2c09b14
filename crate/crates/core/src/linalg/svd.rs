use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::matrix::{CMatrix, C64};
use crate::error::{Error, Result};

/// Thin singular value decomposition `A = U diag(s) V^H`, singular values descending.
///
/// `u` is `rows x p` and `v` is `cols x p` with `p = min(rows, cols)`. Columns of `u`
/// belonging to zero singular values are completed to an orthonormal set.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

const MAX_SWEEPS: usize = 80;

impl Svd {
    /// One-sided Jacobi on the columns of `A` (on `A^H` when `A` is wide).
    pub fn new(a: &CMatrix) -> Result<Svd> {
        if a.rows() < a.cols() {
            let t = Svd::new(&a.adjoint())?;
            return Ok(Svd { u: t.v, s: t.s, v: t.u });
        }
        let m = a.rows();
        let n = a.cols();
        let mut w = a.clone();
        let mut v = CMatrix::identity(n);
        let eps = f64::EPSILON;
        // pairs whose coupling is this far below |A|^2 only affect negligible singular values
        let floor = a.norm_fro().powi(2) * eps * eps * eps;
        let mut converged = n < 2;
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = Complex64::zero();
                    for i in 0..m {
                        let x = w[(i, p)];
                        let y = w[(i, q)];
                        alpha += x.norm_sqr();
                        beta += y.norm_sqr();
                        gamma += x.conj() * y;
                    }
                    let g = gamma.norm();
                    if g <= floor || g <= eps * alpha.sqrt() * beta.sqrt() {
                        continue;
                    }
                    rotated = true;
                    let phase = gamma / g;
                    let zeta = (beta - alpha) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let cs = 1.0 / (1.0 + t * t).sqrt();
                    let sn = cs * t;
                    for i in 0..m {
                        let x = w[(i, p)];
                        let y = w[(i, q)] * phase.conj();
                        w[(i, p)] = x * cs - y * sn;
                        w[(i, q)] = x * sn + y * cs;
                    }
                    for i in 0..n {
                        let x = v[(i, p)];
                        let y = v[(i, q)] * phase.conj();
                        v[(i, p)] = x * cs - y * sn;
                        v[(i, q)] = x * sn + y * cs;
                    }
                }
            }
            if !rotated {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { routine: "jacobi svd" });
        }
        let norms: Vec<f64> = (0..n).map(|j| super::matrix::norm(&w.column(j))).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));
        let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let smax = s.first().copied().unwrap_or(0.0);
        let mut u = CMatrix::zeros(m, n);
        let mut vs = CMatrix::zeros(n, n);
        let mut filled: Vec<Vec<C64>> = Vec::with_capacity(n);
        for (jj, &j) in order.iter().enumerate() {
            vs.set_column(jj, &v.column(j));
            let col = w.column(j);
            let sigma = norms[j];
            let usable = sigma > 0.0 && sigma > smax * 1e-300;
            let mut uc: Vec<C64> = if usable {
                col.iter().map(|&z| z / sigma).collect()
            } else {
                Vec::new()
            };
            if !usable || !orthogonal_enough(&uc, &filled) {
                uc = complete_direction(m, &filled);
            }
            u.set_column(jj, &uc);
            filled.push(uc);
        }
        Ok(Svd { u, s, v: vs })
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.s.iter().filter(|&&x| x > threshold).count()
    }
}

fn orthogonal_enough(x: &[C64], others: &[Vec<C64>]) -> bool {
    others.iter().all(|o| super::matrix::dot(x, o).norm() < 1e-6)
}

/// A unit vector orthogonal to `others`, found by projecting standard basis vectors.
fn complete_direction(m: usize, others: &[Vec<C64>]) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for i in 0..m {
        let mut x = super::matrix::basis_vector(m, i);
        for _ in 0..2 {
            for o in others {
                let c = super::matrix::dot(&x, o);
                for (xi, oi) in x.iter_mut().zip(o) {
                    *xi -= c * oi;
                }
            }
        }
        let nx = super::matrix::norm(&x);
        if best.as_ref().map_or(true, |(b, _)| nx > *b + 1e-12) {
            best = Some((nx, x));
        }
    }
    let (nx, x) = best.expect("nonempty ambient space");
    x.iter().map(|&z| z / nx).collect()
}

pub fn norm2(a: &CMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    Svd::new(a).map(|s| s.s[0]).unwrap_or_else(|_| a.norm_fro())
}

/// 2-norm condition number `s_max / s_min` (infinite for rank-deficient input).
pub fn condition_number(a: &CMatrix) -> f64 {
    match Svd::new(a) {
        Ok(svd) => {
            let smax = svd.s.first().copied().unwrap_or(0.0);
            let smin = svd.s.last().copied().unwrap_or(0.0);
            if smin == 0.0 {
                f64::INFINITY
            } else {
                smax / smin
            }
        }
        Err(_) => f64::INFINITY,
    }
}
