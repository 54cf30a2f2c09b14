use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use super::matrix::{cr, CMatrix, C64};
use crate::error::{Error, Result};

/// Complex Schur form `A = Q T Q^H` with `T` upper triangular and `Q` unitary.
#[derive(Clone, Debug)]
pub struct Schur {
    pub t: CMatrix,
    pub q: CMatrix,
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G [a; b] = [r; 0]`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(a: C64, b: C64) -> Givens {
        let an = a.norm();
        let bn = b.norm();
        if bn == 0.0 {
            return Givens { c: 1.0, s: C64::zero() };
        }
        if an == 0.0 {
            return Givens { c: 0.0, s: cr(1.0) };
        }
        let r = an.hypot(bn);
        Givens { c: an / r, s: (a / an) * b.conj() / r }
    }

    /// Rows `i, j` of `m` over columns `cols` become `G` applied from the left.
    fn rotate_rows(&self, m: &mut CMatrix, i: usize, j: usize, cols: core::ops::Range<usize>) {
        for k in cols {
            let x = m[(i, k)];
            let y = m[(j, k)];
            m[(i, k)] = x * self.c + self.s * y;
            m[(j, k)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `i, j` of `m` over rows `rows` are multiplied on the right by `G^H`.
    fn rotate_cols(&self, m: &mut CMatrix, i: usize, j: usize, rows: core::ops::Range<usize>) {
        for k in rows {
            let x = m[(k, i)];
            let y = m[(k, j)];
            m[(k, i)] = x * self.c + y * self.s.conj();
            m[(k, j)] = -x * self.s + y * self.c;
        }
    }
}

fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = super::matrix::norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == 0.0 { cr(1.0) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- (I - 2 v v^H / |v|^2) H (I - 2 v v^H / |v|^2)
        for j in 0..n {
            let mut s = C64::zero();
            for (ii, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + ii, j)];
            }
            s = s * (2.0 / vnorm2);
            for (ii, vi) in v.iter().enumerate() {
                h[(k + 1 + ii, j)] -= vi * s;
            }
        }
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = C64::zero();
                for (jj, vj) in v.iter().enumerate() {
                    s += m[(i, k + 1 + jj)] * vj;
                }
                s = s * (2.0 / vnorm2);
                for (jj, vj) in v.iter().enumerate() {
                    m[(i, k + 1 + jj)] -= s * vj.conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::zero();
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

impl Schur {
    pub fn new(a: &CMatrix) -> Result<Schur> {
        assert!(a.is_square(), "Schur form of a non-square matrix");
        let n = a.rows();
        let (mut t, mut q) = hessenberg(a);
        if n < 2 {
            return Ok(Schur { t, q });
        }
        let eps = f64::EPSILON;
        let anorm = a.norm_fro().max(f64::MIN_POSITIVE);
        let mut hi = n - 1;
        let mut iter = 0usize;
        let mut total = 0usize;
        let budget = 100 * n;
        while hi > 0 {
            // find the start of the active unreduced block
            let mut lo = hi;
            while lo > 0 {
                let sub = t[(lo, lo - 1)].norm();
                let mut scale = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
                if scale == 0.0 {
                    scale = anorm;
                }
                if sub <= eps * scale {
                    t[(lo, lo - 1)] = C64::zero();
                    break;
                }
                lo -= 1;
            }
            if lo == hi {
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > budget {
                return Err(Error::NoConvergence { routine: "complex Schur QR" });
            }
            let mu = if iter % 11 == 0 {
                t[(hi, hi)] + cr(0.75 * t[(hi, hi - 1)].norm())
            } else {
                wilkinson_shift(
                    t[(hi - 1, hi - 1)],
                    t[(hi - 1, hi)],
                    t[(hi, hi - 1)],
                    t[(hi, hi)],
                )
            };
            for i in lo..=hi {
                t[(i, i)] -= mu;
            }
            let mut rots: Vec<Givens> = Vec::with_capacity(hi - lo);
            for k in lo..hi {
                let g = Givens::new(t[(k, k)], t[(k + 1, k)]);
                g.rotate_rows(&mut t, k, k + 1, k..n);
                t[(k + 1, k)] = C64::zero();
                rots.push(g);
            }
            for (idx, k) in (lo..hi).enumerate() {
                let g = rots[idx];
                g.rotate_cols(&mut t, k, k + 1, 0..(k + 2).min(hi + 1));
                g.rotate_cols(&mut q, k, k + 1, 0..n);
            }
            for i in lo..=hi {
                t[(i, i)] += mu;
            }
        }
        for i in 1..n {
            for j in 0..i {
                t[(i, j)] = C64::zero();
            }
        }
        Ok(Schur { t, q })
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.rows()).map(|i| self.t[(i, i)]).collect()
    }

    /// Swaps the adjacent diagonal entries `k` and `k+1` by a unitary similarity.
    fn swap(&mut self, k: usize) {
        let n = self.t.rows();
        let a = self.t[(k, k)];
        let b = self.t[(k + 1, k + 1)];
        let x = self.t[(k, k + 1)];
        if a == b {
            return;
        }
        let g = Givens::new(x, b - a);
        g.rotate_rows(&mut self.t, k, k + 1, k..n);
        g.rotate_cols(&mut self.t, k, k + 1, 0..k + 2);
        g.rotate_cols(&mut self.q, k, k + 1, 0..n);
        self.t[(k + 1, k)] = C64::zero();
        self.t[(k, k)] = b;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Reorders so that the diagonal entries currently at `selected` move to the leading
    /// positions (relative order preserved). The first `selected.len()` columns of `q`
    /// then span the corresponding invariant subspace.
    pub fn reorder_to_front(&mut self, selected: &[usize]) {
        let n = self.t.rows();
        let mut mask: Vec<bool> = (0..n).map(|i| selected.contains(&i)).collect();
        let mut target = 0;
        for _ in 0..selected.len() {
            let mut j = target;
            while !mask[j] {
                j += 1;
            }
            while j > target {
                self.swap(j - 1);
                mask.swap(j - 1, j);
                j -= 1;
            }
            target += 1;
        }
    }
}

pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(Schur::new(a)?.eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::c;

    fn check(a: &CMatrix, s: &Schur) {
        let rec = &(&s.q * &s.t) * &s.q.adjoint();
        assert!(rec.max_abs_diff(a) < 1e-12 * a.norm_fro().max(1.0));
        let qq = &s.q.adjoint() * &s.q;
        assert!(qq.max_abs_diff(&CMatrix::identity(a.rows())) < 1e-13);
    }

    #[test]
    fn schur_of_rotation_finds_conjugate_pair() {
        let a = CMatrix::from_real_rows(&[[0.0, -1.0], [1.0, 0.0]]);
        let s = Schur::new(&a).unwrap();
        check(&a, &s);
        let mut ev = s.eigenvalues();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn schur_of_general_complex() {
        let a = CMatrix::from_rows(&[
            [c(1.0, 2.0), cr(0.3), c(-1.0, 0.5), cr(4.0)],
            [cr(3.0), c(0.0, 1.0), cr(2.0), cr(0.0)],
            [c(0.5, 0.5), cr(1.0), cr(-2.0), c(0.0, -3.0)],
            [cr(1.0), cr(0.0), c(1.0, 1.0), cr(0.25)],
        ]);
        let mut s = Schur::new(&a).unwrap();
        check(&a, &s);
        let ev = s.eigenvalues();
        s.reorder_to_front(&[3, 1]);
        check(&a, &s);
        let ev2 = s.eigenvalues();
        assert!((ev2[0] - ev[1]).norm() < 1e-10);
        assert!((ev2[1] - ev[3]).norm() < 1e-10);
    }

    #[test]
    fn trace_matches_eigenvalue_sum() {
        let a = CMatrix::jordan_block(5, c(0.0, 1.0));
        let ev = eigenvalues(&a).unwrap();
        let sum: C64 = ev.iter().sum();
        assert!((sum - c(0.0, 5.0)).norm() < 1e-12);
    }
}
