//! Brute-force orbit oracle used to cross-check the algebraic limit sets and certificates.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classification::{classify, Kind};
use crate::decomposition::{block_decomposition, k_index_in};
use crate::error::{Error, Result};
use crate::hermitian::ParabolicCertificate;
use crate::limit_sets::SubspaceUnion;
use crate::linalg::lu::inverse;
use crate::linalg::matrix::{accurate_mul_vec, chordal, norm, norm_max, projective_normalize};
use crate::linalg::{CMatrix, SLMatrix, Subspace, C64};
use crate::sampling::{random_matrix, random_vector};
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitSettings {
    /// Iterations discarded from the start of every orbit.
    pub burn_in: usize,
    /// Chordal radius of the covering balls.
    pub cluster_radius: f64,
    /// Each iteration applies `g^step` (1 is the plain orbit).
    pub step: u64,
    /// Clusters holding fewer iterates than this are counted as transient.
    pub min_visits: usize,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        OrbitSettings { burn_in: 100, cluster_radius: 1e-3, step: 1, min_visits: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterPoint {
    pub point: Vec<C64>,
    pub visits: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitRun {
    pub seed_points: Vec<Vec<C64>>,
    pub iterations: usize,
    pub cluster_points: Vec<ClusterPoint>,
    /// Burn-in iterates plus iterates in clusters below `min_visits`.
    pub transient: usize,
    pub settings: OrbitSettings,
}

impl OrbitRun {
    pub fn points(&self) -> Vec<Vec<C64>> {
        self.cluster_points.iter().map(|c| c.point.clone()).collect()
    }
}

/// Rescales by a power of two near the sup norm, which is exact in floating point.
fn renormalize(x: &mut [C64]) {
    let s = norm_max(x);
    if s > 0.0 && s.is_finite() {
        let f = Float::exp2(-Float::floor(Float::log2(s)));
        for z in x.iter_mut() {
            *z *= f;
        }
    }
}

fn lex_cmp(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// `x^H A x` for unit `x`. With `|A|_F = 1` this is 1-Lipschitz for the Frobenius
/// distance of the projectors `x x^H`, which equals `sqrt 2` times the chordal distance.
fn projector_coordinate(a: &CMatrix, x: &[C64]) -> f64 {
    let ax = a.mul_vec(x);
    x.iter().zip(&ax).map(|(p, q)| (p.conj() * q).re).sum::<f64>() / x.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Order-preserving map from `f64` to `i64`.
fn ordered(t: f64) -> i64 {
    let b = t.to_bits() as i64;
    b ^ (((b >> 63) as u64) >> 1) as i64
}

/// Greedy covering by chordal balls, applied after a global lexicographic sort so the
/// result does not depend on the order the iterates were produced in. Centers are
/// indexed by a projector coordinate so each point is only compared with centers in a
/// band of width `2 sqrt(2) radius` around its own coordinate.
fn cover(mut points: Vec<Vec<C64>>, radius: f64) -> Vec<ClusterPoint> {
    points.sort_by(|a, b| lex_cmp(a, b));
    let n = points.first().map_or(0, |p| p.len());
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let r = random_matrix(n, n, &mut rng);
    let h = &r + &r.adjoint();
    let a = h.scale_real(1.0 / h.norm_fro().max(f64::MIN_POSITIVE));
    let band = 2f64.sqrt() * radius * (1.0 + 1e-9) + 1e-15;
    let mut out: Vec<ClusterPoint> = Vec::new();
    let mut index: BTreeMap<(i64, usize), ()> = BTreeMap::new();
    for p in points {
        let t = projector_coordinate(&a, &p);
        let lo = (ordered(t - band), 0);
        let hi = (ordered(t + band), usize::MAX);
        let hit = index.range(lo..=hi).map(|(&(_, i), _)| i).filter(|&i| chordal(&out[i].point, &p) <= radius).min();
        match hit {
            Some(i) => out[i].visits += 1,
            None => {
                index.insert((ordered(t), out.len()), ());
                out.push(ClusterPoint { point: p, visits: 1 });
            }
        }
    }
    out
}

/// Forward and backward orbits of every seed, with their recurrent points estimated
/// by a radius-ball covering of the post-burn-in iterates.
pub fn orbit_accumulate(g: &SLMatrix, seeds: &[Vec<C64>], iters: usize, settings: &OrbitSettings) -> Result<OrbitRun> {
    let n = g.n_plus_1();
    accumulate(g.matrix(), g.inverse().matrix(), None, n, seeds, iters, settings)
}

/// Orbit of `p t p^-1` computed in the frame of `t`: seeds are pulled back by `p`, the
/// maps are powers of `t`, and iterates are pushed forward by `p` before clustering.
/// For an upper triangular `t` the computed powers keep equal diagonal entries equal,
/// so a Jordan block stays defective over long runs. Iterating the assembled matrix
/// instead follows the eigenvectors of its rounded, non-defective neighbour.
pub fn orbit_accumulate_factored(
    p: &CMatrix,
    t: &CMatrix,
    seeds: &[Vec<C64>],
    iters: usize,
    settings: &OrbitSettings,
) -> Result<OrbitRun> {
    let n = t.rows();
    if t.cols() != n || p.rows() != n || p.cols() != n {
        return Err(Error::Shape { expected: (n, n), found: (p.rows(), p.cols()) });
    }
    let t_inv = inverse(t)?;
    let p_inv = inverse(p)?;
    accumulate(t, &t_inv, Some((p, &p_inv)), n, seeds, iters, settings)
}

fn accumulate(
    forward: &CMatrix,
    backward: &CMatrix,
    frame: Option<(&CMatrix, &CMatrix)>,
    n: usize,
    seeds: &[Vec<C64>],
    iters: usize,
    settings: &OrbitSettings,
) -> Result<OrbitRun> {
    if iters == 0 {
        return Err(Error::EmptyInput);
    }
    let step = settings.step.max(1);
    let maps = [forward.pow_normalized(step, true), backward.pow_normalized(step, true)];
    let burn = settings.burn_in.min(iters - 1);
    let mut kept = Vec::new();
    let mut seed_points = Vec::with_capacity(seeds.len());
    for s in seeds {
        if s.len() != n {
            return Err(Error::Shape { expected: (n, 1), found: (s.len(), 1) });
        }
        let start = projective_normalize(s).ok_or(Error::ZeroVector)?;
        seed_points.push(start.clone());
        let start = match frame {
            Some((_, p_inv)) => p_inv.mul_vec(&start),
            None => start,
        };
        for a in &maps {
            let mut x = start.clone();
            for t in 1..=iters {
                x = a.mul_vec(&x);
                renormalize(&mut x);
                if t > burn {
                    let y = match frame {
                        Some((p, _)) => p.mul_vec(&x),
                        None => x.clone(),
                    };
                    kept.push(projective_normalize(&y).ok_or(Error::NonFinite)?);
                }
            }
        }
    }
    let mut transient = 2 * seeds.len() * burn;
    let mut clusters = cover(kept, settings.cluster_radius);
    clusters.retain(|c| {
        let keep = c.visits >= settings.min_visits;
        if !keep {
            transient += c.visits;
        }
        keep
    });
    Ok(OrbitRun { seed_points, iterations: iters, cluster_points: clusters, transient, settings: *settings })
}

/// Largest angle from a point to the nearest component of `target`.
pub fn hausdorff_to_union(points: &[Vec<C64>], target: &SubspaceUnion) -> Result<f64> {
    if points.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut worst: f64 = 0.0;
    for p in points {
        if p.len() != target.ambient_dim() {
            return Err(Error::AmbientMismatch { left: p.len(), right: target.ambient_dim() });
        }
        worst = worst.max(target.angle_to_vector(p));
    }
    Ok(worst)
}

/// `binom(m, k)` in floating point.
pub fn binomial(m: u64, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k as u64 {
        b = b * (m - i) as f64 / (i + 1) as f64;
    }
    b
}

/// The sequence `binom(m, k)^-1 T^m v` for `m = 0..=m_max`, with `k = k(v, T)`.
#[derive(Clone, Debug)]
pub struct NormalizedBlockOrbit {
    pub k: usize,
    /// Span of the eigenvectors of `T`.
    pub eigenvectors: Subspace,
    t: CMatrix,
    current: Vec<C64>,
    m: u64,
    m_max: u64,
}

impl Iterator for NormalizedBlockOrbit {
    type Item = (u64, Vec<C64>);

    fn next(&mut self) -> Option<(u64, Vec<C64>)> {
        if self.m > self.m_max {
            return None;
        }
        let m = self.m;
        let b = if m as usize >= self.k { binomial(m, self.k) } else { 1.0 };
        let term = self.current.iter().map(|&z| z / b).collect();
        self.current = self.t.mul_vec(&self.current);
        self.m += 1;
        Some((m, term))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockOrbitSummary {
    pub k: usize,
    pub sup_norm: f64,
    /// Smallest norm over the second half of the sequence.
    pub tail_min_norm: f64,
    pub last: Vec<C64>,
    /// `|(I - P) w| / |w|` for the last term `w`, `P` the projector on the eigenvectors.
    pub residual: f64,
}

impl NormalizedBlockOrbit {
    pub fn summarize(self) -> BlockOrbitSummary {
        let k = self.k;
        let half = self.m_max / 2;
        let eig = self.eigenvectors.clone();
        let mut sup_norm: f64 = 0.0;
        let mut tail_min_norm = f64::INFINITY;
        let mut last = Vec::new();
        for (m, w) in self {
            let r = norm(&w);
            if m as usize >= k {
                sup_norm = sup_norm.max(r);
            }
            if m >= half {
                tail_min_norm = tail_min_norm.min(r);
            }
            last = w;
        }
        let p = eig.project(&last);
        let off: Vec<C64> = last.iter().zip(&p).map(|(a, b)| a - b).collect();
        let residual = norm(&off) / norm(&last);
        BlockOrbitSummary { k, sup_norm, tail_min_norm, last, residual }
    }
}

/// Binomially normalized orbit of `v` under a unitary-spectrum `T`.
pub fn normalized_block_orbit(t: &CMatrix, v: &[C64], m_max: u64, tols: &Tolerances) -> Result<NormalizedBlockOrbit> {
    if norm_max(v) == 0.0 {
        return Err(Error::ZeroVector);
    }
    if v.len() != t.rows() {
        return Err(Error::Shape { expected: (t.rows(), 1), found: (v.len(), 1) });
    }
    let bd = block_decomposition(t, tols)?;
    let k = k_index_in(&bd, v)?;
    let mut cols = Vec::new();
    for b in &bd.blocks {
        if b.is_jordan {
            cols.push(b.eigenvector());
        } else {
            cols.extend(b.basis.columns());
        }
    }
    let eigenvectors = Subspace::span_vectors(t.rows(), &cols, 1e-10);
    Ok(NormalizedBlockOrbit { k, eigenvectors, t: t.clone(), current: v.to_vec(), m: 0, m_max })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetSequence {
    /// `points[m-1] = k_m = g^-m (z)` for `m = 1..=m_max`.
    pub points: Vec<Vec<C64>>,
    /// `residuals[m-1]` is the chordal distance from `g^m (k_m)` to `z`.
    pub residuals: Vec<f64>,
}

impl TargetSequence {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Points `k_m` with `g^m (k_m) = z`, each verified by pushing it forward `m` times.
///
/// Products are evaluated in compensated arithmetic so the residuals stay at roundoff
/// level even when `g^m` is badly conditioned. The verification costs `O(m_max^2)`
/// matrix-vector products.
pub fn greedy_target_sequence(g: &SLMatrix, z: &[C64], m_max: usize) -> Result<TargetSequence> {
    let n = g.n_plus_1();
    if z.len() != n {
        return Err(Error::Shape { expected: (n, 1), found: (z.len(), 1) });
    }
    let target = projective_normalize(z).ok_or(Error::ZeroVector)?;
    let inv = inverse(g.matrix())?;
    let mut points = Vec::with_capacity(m_max);
    let mut residuals = Vec::with_capacity(m_max);
    let mut k = target.clone();
    for m in 1..=m_max {
        k = accurate_mul_vec(&inv, &k);
        renormalize(&mut k);
        let mut y = k.clone();
        for _ in 0..m {
            y = accurate_mul_vec(g.matrix(), &y);
            renormalize(&mut y);
        }
        residuals.push(chordal(&y, &target));
        points.push(projective_normalize(&k).ok_or(Error::NonFinite)?);
    }
    Ok(TargetSequence { points, residuals })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoliationKind {
    EllipticSpheres,
    ParabolicQuadrics,
}

impl FoliationKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FoliationKind::EllipticSpheres => "elliptic-spheres",
            FoliationKind::ParabolicQuadrics => "parabolic-quadrics",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FoliationReport {
    pub kind: FoliationKind,
    pub max_leaf_drift: f64,
    /// Elliptic: drift of each of the `n+1` coordinate foliations. Parabolic: one entry.
    pub per_foliation: Vec<f64>,
    pub samples: usize,
    /// Parabolic samples on which the leaf function is undefined (the `W` locus).
    pub w_locus: usize,
}

/// Seed of the sample generator, so reports are reproducible.
pub const FOLIATION_SEED: u64 = 0xf01a;

/// `sum_{j != i} |y_j|^2 / |y_i|^2`.
fn sphere_leaf(y: &[C64], i: usize) -> f64 {
    let yi = y[i].norm_sqr();
    y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, z)| z.norm_sqr()).sum::<f64>() / yi
}

/// Measures how far `g` moves points off the leaves of its invariant foliations.
///
/// Samples are drawn in the frame of `conjugator`: `x = P y` with `y` Gaussian. The
/// elliptic leaves are read in the frame coordinates, where `P^-1 g P` should be
/// diagonal; the parabolic leaves come from `certificate`.
pub fn foliation_check(
    g: &SLMatrix,
    conjugator: &SLMatrix,
    kind: FoliationKind,
    samples: usize,
    certificate: Option<&ParabolicCertificate>,
    tols: &Tolerances,
) -> Result<FoliationReport> {
    let n = g.n_plus_1();
    if conjugator.n_plus_1() != n {
        return Err(Error::AmbientMismatch { left: n, right: conjugator.n_plus_1() });
    }
    let class = classify(g, tols)?.kind;
    let mut rng = ChaCha8Rng::seed_from_u64(FOLIATION_SEED);
    let p = conjugator.matrix();
    match kind {
        FoliationKind::EllipticSpheres => {
            if class != Kind::Elliptic {
                return Err(Error::WrongKind);
            }
            let h = &(&inverse(p)? * g.matrix()) * p;
            let mut per = vec![0.0; n];
            for _ in 0..samples {
                let y = random_vector(n, &mut rng);
                let hy = h.mul_vec(&y);
                for (i, d) in per.iter_mut().enumerate() {
                    let r = sphere_leaf(&y, i);
                    *d = f64::max(*d, (sphere_leaf(&hy, i) - r).abs() / r);
                }
            }
            let max_leaf_drift = per.iter().copied().fold(0.0, f64::max);
            Ok(FoliationReport { kind, max_leaf_drift, per_foliation: per, samples, w_locus: 0 })
        }
        FoliationKind::ParabolicQuadrics => {
            if class != Kind::Parabolic {
                return Err(Error::WrongKind);
            }
            let cert = certificate.ok_or(Error::MissingCertificate)?;
            let mut drift: f64 = 0.0;
            let mut w_locus = 0;
            for _ in 0..samples {
                let x = p.mul_vec(&random_vector(n, &mut rng));
                let gx = g.matrix().mul_vec(&x);
                match (cert.leaf(&x), cert.leaf(&gx)) {
                    (Some(a), Some(b)) => drift = drift.max((b - a).abs() / a.abs().max(1.0)),
                    _ => w_locus += 1,
                }
            }
            Ok(FoliationReport { kind, max_leaf_drift: drift, per_foliation: vec![drift], samples, w_locus })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::parabolic_certificate;
    use crate::limit_sets::{lambda_set, PointSet};
    use crate::linalg::matrix::basis_vector;
    use crate::linalg::{cr, normalize_to_sl};
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn sl(m: &CMatrix) -> SLMatrix {
        normalize_to_sl(m, 1e-12).unwrap()
    }

    fn line(n: usize, idx: &[usize]) -> SubspaceUnion {
        SubspaceUnion::new(n, vec![Subspace::coordinate(n, idx)])
    }

    #[test]
    fn hyperbolic_orbit_accumulates_on_axes() {
        let g = sl(&CMatrix::real_diag(&[2.0, 0.5]));
        let run = orbit_accumulate(&g, &[vec![cr(1.0), cr(1.0)]], 200, &OrbitSettings::default()).unwrap();
        assert_eq!(run.cluster_points.len(), 2);
        let pts = run.points();
        assert!(pts.iter().any(|p| chordal(p, &basis_vector(2, 0)) < 1e-12));
        assert!(pts.iter().any(|p| chordal(p, &basis_vector(2, 1)) < 1e-12));
        assert_eq!(run.transient, 200);
    }

    #[test]
    fn identity_orbit_clusters_are_seeds() {
        let g = sl(&CMatrix::identity(3));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let seeds: Vec<Vec<C64>> = (0..5).map(|_| random_vector(3, &mut rng)).collect();
        let run = orbit_accumulate(&g, &seeds, 150, &OrbitSettings::default()).unwrap();
        assert_eq!(run.cluster_points.len(), 5);
        for s in &seeds {
            assert!(run.points().iter().any(|p| chordal(p, s) < 1e-14));
        }
        assert!(run.cluster_points.iter().all(|c| c.visits == 100));
    }

    #[test]
    fn jordan_orbit_clusters_at_eigenvector() {
        let g = sl(&CMatrix::jordan_block(3, cr(1.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let seeds: Vec<Vec<C64>> = (0..100).map(|_| random_vector(3, &mut rng)).collect();
        let settings = OrbitSettings { step: 100_000, ..OrbitSettings::default() };
        let run = orbit_accumulate(&g, &seeds, 150, &settings).unwrap();
        let worst = run.points().iter().map(|p| chordal(p, &basis_vector(3, 0))).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
        let PointSet::Union(lambda) = lambda_set(&g, &Tolerances::default()).unwrap() else { panic!() };
        assert!(hausdorff_to_union(&run.points(), &lambda).unwrap() < 1e-4);
    }

    #[test]
    fn factored_orbit_of_conjugated_jordan_block() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = CMatrix::jordan_block(4, C64::from_polar(1.0, 0.9));
        let p = crate::sampling::random_conditioned(4, 1e3, &mut rng);
        let target = projective_normalize(&p.column(0)).unwrap();
        let seeds: Vec<Vec<C64>> = (0..20).map(|_| random_vector(4, &mut rng)).collect();
        let settings = OrbitSettings { step: 100_000, ..OrbitSettings::default() };
        let run = orbit_accumulate_factored(&p, &t, &seeds, 300, &settings).unwrap();
        let worst = run.points().iter().map(|x| chordal(x, &target)).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
        let err = orbit_accumulate_factored(&p, &CMatrix::identity(3), &seeds, 10, &settings);
        assert!(err.is_err());
    }

    #[test]
    fn orbit_runs_are_deterministic() {
        let g = sl(&CMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 0.5]]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let seeds: Vec<Vec<C64>> = (0..10).map(|_| random_vector(3, &mut rng)).collect();
        let a = orbit_accumulate(&g, &seeds, 300, &OrbitSettings::default()).unwrap();
        let mut rev = seeds.clone();
        rev.reverse();
        let b = orbit_accumulate(&g, &rev, 300, &OrbitSettings::default()).unwrap();
        assert_eq!(a, orbit_accumulate(&g, &seeds, 300, &OrbitSettings::default()).unwrap());
        assert_eq!(a.cluster_points, b.cluster_points);
        assert_eq!(orbit_accumulate(&g, &seeds, 0, &OrbitSettings::default()).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn hausdorff_examples() {
        let r = FRAC_PI_2.sqrt();
        let pts = vec![vec![cr(1.0), cr(0.0), cr(0.0)], vec![cr(0.3), cr(-2.0), cr(0.0)]];
        assert!(hausdorff_to_union(&pts, &line(3, &[0, 1])).unwrap() < 1e-15);
        let two = SubspaceUnion::new(3, vec![Subspace::coordinate(3, &[0]), Subspace::coordinate(3, &[1])]);
        let d = hausdorff_to_union(&[basis_vector(3, 2)], &two).unwrap();
        assert!((d - FRAC_PI_2).abs() < 1e-15);
        let d = hausdorff_to_union(&[vec![cr(r), cr(0.0), cr(r)]], &line(3, &[0])).unwrap();
        assert!((d - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(hausdorff_to_union(&[], &two).unwrap_err(), Error::EmptyInput);
        assert_eq!(hausdorff_to_union(&pts, &SubspaceUnion::new(3, vec![])).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(10, 3), 120.0);
        assert_eq!(binomial(1000, 2), 499500.0);
    }

    #[test]
    fn block_orbit_of_identity_is_constant() {
        let v = vec![cr(1.0), cr(-2.0), cr(0.5)];
        let o = normalized_block_orbit(&CMatrix::identity(3), &v, 50, &Tolerances::default()).unwrap();
        assert_eq!(o.k, 0);
        for (_, w) in o {
            assert_eq!(w, v);
        }
    }

    #[test]
    fn block_orbit_of_jordan_three() {
        let t = CMatrix::jordan_block(3, cr(1.0));
        let o = normalized_block_orbit(&t, &basis_vector(3, 2), 10_000_000, &Tolerances::default()).unwrap();
        assert_eq!(o.k, 2);
        // oracle: binom(m,2)^-1 J^m e3 = e1 + 2/(m-1) e2 + 2/(m(m-1)) e3
        let mut check = o.clone().skip(5).take(3);
        let (m, w) = check.next().unwrap();
        let mf = m as f64;
        assert!((w[0] - cr(1.0)).norm() < 1e-15);
        assert!((w[1] - cr(2.0 / (mf - 1.0))).norm() < 1e-15);
        assert!((w[2] - cr(2.0 / (mf * (mf - 1.0)))).norm() < 1e-15);
        let s = o.summarize();
        assert!(s.sup_norm < 3.0);
        assert!(s.tail_min_norm > 0.99);
        assert!(s.residual <= 1e-6, "{}", s.residual);
        assert!(chordal(&s.last, &basis_vector(3, 0)) < 1e-6);
    }

    #[test]
    fn block_orbit_with_rotating_phase() {
        let lam = C64::from_polar(1.0, 1.0);
        let t = CMatrix::jordan_block(2, lam);
        let o = normalized_block_orbit(&t, &basis_vector(2, 1), 2_000_000, &Tolerances::default()).unwrap();
        assert_eq!(o.k, 1);
        let s = o.summarize();
        assert!(s.sup_norm < 2.5 && s.tail_min_norm > 0.99);
        assert!(s.residual <= 1e-6, "{}", s.residual);
        assert_eq!(
            normalized_block_orbit(&t, &[cr(0.0), cr(0.0)], 10, &Tolerances::default()).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn target_sequences_hit_the_target() {
        let g = sl(&CMatrix::real_diag(&[2.0, 0.5]));
        let z = vec![cr(1.0), cr(1.0)];
        let seq = greedy_target_sequence(&g, &z, 30).unwrap();
        for (m, k) in seq.points.iter().enumerate() {
            let want = vec![cr(0.25f64.powi(m as i32 + 1)), cr(1.0)];
            assert!(chordal(k, &want) < 1e-15);
        }
        assert!(seq.max_residual() < 1e-15);

        let fixed = greedy_target_sequence(&g, &basis_vector(2, 0), 20).unwrap();
        assert!(fixed.points.iter().all(|k| chordal(k, &basis_vector(2, 0)) == 0.0));

        let j = sl(&CMatrix::jordan_block(3, cr(1.0)));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let z = random_vector(3, &mut rng);
            let seq = greedy_target_sequence(&j, &z, 1000).unwrap();
            assert!(seq.max_residual() <= 1e-10, "{}", seq.max_residual());
        }
    }

    #[test]
    fn foliation_examples() {
        let t = Tolerances::default();
        let id = sl(&CMatrix::identity(3));
        let g = sl(&CMatrix::diag(&[C64::from_polar(1.0, 0.4), C64::from_polar(1.0, 1.3), C64::from_polar(1.0, -1.7)]));
        let r = foliation_check(&g, &id, FoliationKind::EllipticSpheres, 200, None, &t).unwrap();
        assert_eq!(r.per_foliation.len(), 3);
        assert!(r.max_leaf_drift < 1e-12);

        let j = sl(&CMatrix::jordan_block(3, cr(1.0)));
        let cert = parabolic_certificate(&j, &t).unwrap();
        let r = foliation_check(&j, &id, FoliationKind::ParabolicQuadrics, 200, Some(&cert), &t).unwrap();
        assert!(r.max_leaf_drift < 1e-10, "{}", r.max_leaf_drift);
        assert_eq!(r.w_locus, 0);
        assert_eq!(
            foliation_check(&j, &id, FoliationKind::ParabolicQuadrics, 10, None, &t).unwrap_err(),
            Error::MissingCertificate
        );

        let lox = sl(&CMatrix::real_diag(&[2.0, 0.5]));
        let id2 = sl(&CMatrix::identity(2));
        assert_eq!(
            foliation_check(&lox, &id2, FoliationKind::EllipticSpheres, 10, None, &t).unwrap_err(),
            Error::WrongKind
        );
    }

    #[test]
    fn conjugated_elliptic_foliation() {
        let t = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = crate::sampling::infinite_order_elliptic(3, 1e2, &mut rng);
        let p = sl(&s.conjugator);
        let r = foliation_check(&s.element, &p, FoliationKind::EllipticSpheres, 100, None, &t).unwrap();
        assert!(r.max_leaf_drift < 1e-10, "{}", r.max_leaf_drift);
    }
}
