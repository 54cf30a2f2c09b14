//! Random test inputs: conditioned conjugators, normal forms of each kind, and
//! isometries of the signature-(k, l) form.
//!
//! Everything is driven by a caller-supplied RNG so that runs are reproducible.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::classification::Kind;
use crate::hermitian::form_matrix;
use crate::linalg::matrix::{c, cr, dot, norm};
use crate::linalg::{normalize_to_sl, CMatrix, SLMatrix, C64};

/// Standard normal deviate.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(gaussian(rng), gaussian(rng))
}

pub fn random_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(rng)).collect()
}

pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_vec(rows, cols, data).expect("sizes match")
}

pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.gen_range(-PI..PI))
}

/// Haar-like random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut x = random_vector(n, rng);
        for _ in 0..2 {
            for q in &cols {
                let s = dot(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= s * qi;
                }
            }
        }
        let nx = norm(&x);
        if nx > 1e-6 {
            cols.push(x.iter().map(|&z| z / nx).collect());
        }
    }
    CMatrix::from_columns(n, &cols)
}

/// `U diag(s) V^H` with singular values log-uniform in `[1, max_cond]`, the extremes
/// included, so the 2-norm condition number is exactly `max_cond`.
pub fn random_conditioned<R: Rng + ?Sized>(n: usize, max_cond: f64, rng: &mut R) -> CMatrix {
    let u = random_unitary(n, rng);
    let v = random_unitary(n, rng);
    let lc = max_cond.ln();
    let s: Vec<C64> = (0..n)
        .map(|i| {
            let t = if i == 0 {
                0.0
            } else if i == n - 1 {
                lc
            } else {
                rng.gen::<f64>() * lc
            };
            cr(t.exp())
        })
        .collect();
    &(&u * &CMatrix::diag(&s)) * &v.adjoint()
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = num_traits::Euclid::rem_euclid(&(a - b), &TAU);
    d.min(TAU - d)
}

/// `count` angles in `(-pi, pi]` pairwise at least `min_sep` apart on the circle.
pub fn separated_phases<R: Rng + ?Sized>(count: usize, min_sep: f64, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..count).map(|_| rng.gen_range(-PI..PI)).collect();
        let ok = (0..count).all(|i| (i + 1..count).all(|j| circular_gap(v[i], v[j]) >= min_sep));
        if ok {
            return v;
        }
    }
}

/// A random element with its construction data.
#[derive(Clone, Debug)]
pub struct Sample {
    pub element: SLMatrix,
    pub normal_form: CMatrix,
    pub conjugator: CMatrix,
    pub kind: Kind,
}

fn conjugate(normal_form: CMatrix, p: CMatrix, kind: Kind) -> Sample {
    let pinv = crate::linalg::lu::inverse(&p).expect("conditioned matrices are invertible");
    let m = &(&p * &normal_form) * &pinv;
    let element = normalize_to_sl(&m, 1e-12).expect("nonsingular");
    Sample { element, normal_form, conjugator: p, kind }
}

/// Random composition of `n` into parts, at least one part of size at least two.
fn partition_with_jordan<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let mut parts = Vec::new();
        let mut left = n;
        while left > 0 {
            let p = rng.gen_range(1..=left);
            parts.push(p);
            left -= p;
        }
        if parts.iter().any(|&p| p >= 2) {
            parts.sort_unstable_by(|a, b| b.cmp(a));
            return parts;
        }
    }
}

/// Diagonal with unit, well separated eigenvalues; with probability 1/4 one eigenvalue
/// is repeated.
pub fn elliptic_normal_form<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let mut phases = separated_phases(n, 0.05, rng);
    if n >= 3 && rng.gen::<f64>() < 0.25 {
        phases[n - 1] = phases[0];
    }
    let d: Vec<C64> = phases.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    CMatrix::diag(&d)
}

/// Direct sum of Jordan blocks with unit eigenvalues, at least one block of size two or more.
pub fn parabolic_normal_form<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let parts = partition_with_jordan(n, rng);
    let phases = separated_phases(parts.len(), 0.05, rng);
    let blocks: Vec<CMatrix> = parts
        .iter()
        .zip(&phases)
        .map(|(&p, &t)| CMatrix::jordan_block(p, C64::from_polar(1.0, t)))
        .collect();
    CMatrix::direct_sum(&blocks)
}

/// Log-moduli with pairwise ratios at least 1.1 apart, not all equal.
fn separated_log_moduli<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    let gap = 1.1f64.ln();
    loop {
        let v: Vec<f64> = (0..count).map(|_| rng.gen_range(-1.2..1.2)).collect();
        let ok = (0..count).all(|i| (i + 1..count).all(|j| (v[i] - v[j]).abs() >= gap));
        if ok {
            return v;
        }
    }
}

/// Jordan blocks with eigenvalues of at least two distinct moduli (ratios at least 1.1);
/// blocks may share a modulus when their phases are separated.
pub fn loxodromic_normal_form<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let parts: Vec<usize> = if rng.gen::<f64>() < 0.5 {
        vec![1; n]
    } else {
        let mut p = partition_with_jordan(n, rng);
        if p.len() < 2 {
            p = vec![n - 1, 1];
        }
        p
    };
    let groups = rng.gen_range(2..=parts.len());
    let logs = separated_log_moduli(groups, rng);
    let phases = separated_phases(parts.len(), 0.05, rng);
    let blocks: Vec<CMatrix> = parts
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let lm = if i < groups { logs[i] } else { logs[rng.gen_range(0..groups)] };
            CMatrix::jordan_block(p, C64::from_polar(lm.exp(), phases[i]))
        })
        .collect();
    CMatrix::direct_sum(&blocks)
}

/// Diagonal loxodromic normal form with pairwise distinct moduli.
pub fn distinct_moduli_normal_form<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let logs = separated_log_moduli(n, rng);
    let d: Vec<C64> = logs.iter().map(|&l| C64::from_polar(l.exp(), rng.gen_range(-PI..PI))).collect();
    CMatrix::diag(&d)
}

pub fn normal_form<R: Rng + ?Sized>(kind: Kind, n: usize, rng: &mut R) -> CMatrix {
    match kind {
        Kind::Elliptic => elliptic_normal_form(n, rng),
        Kind::Parabolic => parabolic_normal_form(n, rng),
        Kind::Loxodromic => loxodromic_normal_form(n, rng),
    }
}

/// Normal form of the given kind conjugated by a random matrix of condition `max_cond`.
pub fn random_of_kind<R: Rng + ?Sized>(kind: Kind, n: usize, max_cond: f64, rng: &mut R) -> Sample {
    let nf = normal_form(kind, n, rng);
    let p = random_conditioned(n, max_cond, rng);
    conjugate(nf, p, kind)
}

pub fn conjugated<R: Rng + ?Sized>(normal_form: CMatrix, kind: Kind, max_cond: f64, rng: &mut R) -> Sample {
    let p = random_conditioned(normal_form.rows(), max_cond, rng);
    conjugate(normal_form, p, kind)
}

/// Elliptic element of exact projective order `order` (`order >= 2`): eigenvalue
/// angles are multiples of `2 pi / order`, one of them a primitive root.
pub fn finite_order_elliptic<R: Rng + ?Sized>(n: usize, order: u64, max_cond: f64, rng: &mut R) -> Sample {
    let mut ks: Vec<u64> = vec![0, 1];
    while ks.len() < n {
        ks.push(rng.gen_range(0..order));
    }
    let d: Vec<C64> = ks.iter().map(|&k| C64::from_polar(1.0, TAU * k as f64 / order as f64)).collect();
    conjugated(CMatrix::diag(&d), Kind::Elliptic, max_cond, rng)
}

/// Elliptic element of infinite order: angle ratios built from irrational numbers.
pub fn infinite_order_elliptic<R: Rng + ?Sized>(n: usize, max_cond: f64, rng: &mut R) -> Sample {
    let irr = [2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt(), PI, core::f64::consts::E, 7f64.sqrt()];
    let base = rng.gen_range(0.3..1.3);
    let mut angles = vec![0.0];
    for i in 1..n {
        angles.push(base * irr[(i - 1) % irr.len()] + rng.gen_range(0.0..0.01));
    }
    let d: Vec<C64> = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    conjugated(CMatrix::diag(&d), Kind::Elliptic, max_cond, rng)
}

/// Hyperbolic rotation in the plane of coordinates `i < k <= j`.
pub fn boost(k: usize, l: usize, i: usize, j: usize, t: f64) -> CMatrix {
    let mut m = CMatrix::identity(k + l);
    m[(i, i)] = cr(t.cosh());
    m[(j, j)] = cr(t.cosh());
    m[(i, j)] = cr(t.sinh());
    m[(j, i)] = cr(t.sinh());
    m
}

/// Random product of block unitaries `U(k) x U(l)` and boosts: an isometry of `J`.
pub fn random_j_isometry<R: Rng + ?Sized>(k: usize, l: usize, rng: &mut R) -> CMatrix {
    let mut h = CMatrix::identity(k + l);
    for _ in 0..3 {
        let u = CMatrix::direct_sum(&[random_unitary(k, rng), random_unitary(l, rng)]);
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(k..k + l);
        let b = boost(k, l, i, j, rng.gen_range(-1.0..1.0));
        h = &(&h * &u) * &b;
    }
    h
}

/// Null-plane unipotent in coordinates `i < k <= j`: in the null basis
/// `f = (e_i + e_j)/sqrt 2`, `g = (e_j - e_i)/sqrt 2` it reads `[[1, i s], [0, 1]]`.
pub fn null_unipotent(k: usize, l: usize, i: usize, j: usize, s: f64) -> CMatrix {
    let h = 1.0 / 2f64.sqrt();
    let mut basis = CMatrix::identity(k + l);
    basis[(i, i)] = cr(h);
    basis[(j, i)] = cr(h);
    basis[(i, j)] = cr(-h);
    basis[(j, j)] = cr(h);
    let mut u = CMatrix::identity(k + l);
    u[(i, j)] = c(0.0, s);
    let binv = basis.adjoint();
    &(&basis * &u) * &binv
}

/// Random element of `U(k, l)` of the requested kind, conjugated by a random isometry.
///
/// Loxodromic and parabolic cores act by boosts or null unipotents on a random number
/// (`1..=min(k, l)`) of disjoint negative/positive coordinate planes.
pub fn random_pu_element<R: Rng + ?Sized>(kind: Kind, k: usize, l: usize, rng: &mut R) -> CMatrix {
    let n = k + l;
    let phases = separated_phases(n, 0.05, rng);
    let mut dd: Vec<C64> = phases.iter().map(|&t| C64::from_polar(1.0, t)).collect();
    let planes = rng.gen_range(1..=k.min(l));
    let mut pos: Vec<usize> = (k..n).collect();
    let mut core_elt = CMatrix::identity(n);
    if kind != Kind::Elliptic {
        for i in 0..planes {
            let j = pos.swap_remove(rng.gen_range(0..pos.len()));
            dd[j] = dd[i];
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let plane = if kind == Kind::Loxodromic {
                boost(k, l, i, j, sign * rng.gen_range(0.2..1.5))
            } else {
                null_unipotent(k, l, i, j, sign * rng.gen_range(0.3..2.0))
            };
            core_elt = &core_elt * &plane;
        }
    }
    let core_elt = &CMatrix::diag(&dd) * &core_elt;
    let h = random_j_isometry(k, l, rng);
    let hinv = &(&form_matrix(k, l) * &h.adjoint()) * &form_matrix(k, l);
    &(&h * &core_elt) * &hinv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd::condition_number;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conditioned_matrix_hits_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_conditioned(4, 1e3, &mut rng);
        assert!((condition_number(&p) / 1e3 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn isometries_preserve_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (k, l) in [(1, 1), (1, 2), (2, 2)] {
            let j = form_matrix(k, l);
            for kind in [Kind::Elliptic, Kind::Parabolic, Kind::Loxodromic] {
                let g = random_pu_element(kind, k, l, &mut rng);
                let g2 = &(&g.adjoint() * &j) * &g;
                assert!(g2.max_abs_diff(&j) < 1e-10, "{kind:?} ({k},{l})");
            }
        }
    }
}
