use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::matrix::{cr, CMatrix, C64};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix: `A = V diag(values) V^H`, values ascending.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEig {
    /// Cyclic Jacobi. The input is symmetrized first, so a small Hermiticity defect
    /// is tolerated.
    pub fn new(a: &CMatrix) -> Result<HermitianEig> {
        assert!(a.is_square());
        let n = a.rows();
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            }
        }
        let mut v = CMatrix::identity(n);
        let scale = h.norm_fro();
        let mut converged = n < 2 || scale == 0.0;
        for _ in 0..100 {
            if converged {
                break;
            }
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += h[(i, j)].norm_sqr();
                    }
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = h[(p, q)];
                    let g = apq.norm();
                    if g <= 1e-300 {
                        continue;
                    }
                    let phase = apq / g;
                    let app = h[(p, p)].re;
                    let aqq = h[(q, q)].re;
                    let zeta = (aqq - app) / (2.0 * g);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    // U acts on columns p, q: col_p' = c col_p - s conj(phase) col_q,
                    // col_q' = s phase col_p + c col_q.
                    let u_pp = cr(c);
                    let u_qp = -phase.conj() * s;
                    let u_pq = phase * s;
                    let u_qq = cr(c);
                    for k in 0..n {
                        let x = h[(k, p)];
                        let y = h[(k, q)];
                        h[(k, p)] = x * u_pp + y * u_qp;
                        h[(k, q)] = x * u_pq + y * u_qq;
                    }
                    for k in 0..n {
                        let x = h[(p, k)];
                        let y = h[(q, k)];
                        h[(p, k)] = u_pp.conj() * x + u_qp.conj() * y;
                        h[(q, k)] = u_pq.conj() * x + u_qq.conj() * y;
                    }
                    h[(p, q)] = C64::zero();
                    h[(q, p)] = C64::zero();
                    for k in 0..n {
                        let x = v[(k, p)];
                        let y = v[(k, q)];
                        v[(k, p)] = x * u_pp + y * u_qp;
                        v[(k, q)] = x * u_pq + y * u_qq;
                    }
                }
            }
        }
        if !converged {
            return Err(Error::NoConvergence { routine: "hermitian jacobi" });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| h[(i, i)].re.partial_cmp(&h[(j, j)].re).unwrap_or(core::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| h[(i, i)].re).collect();
        let vectors = v.select_columns(&order);
        Ok(HermitianEig { values, vectors })
    }
}
