//! Exterior powers, Plücker coordinates, attracting points of the induced action on
//! Grassmannians, and the contraction certificate for loxodromic elements.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};

use crate::classification::{classify_with_structure, Kind};
use crate::decomposition::unitary_decomposition_from;
use crate::error::{Error, Result};
use crate::linalg::lu::{det, inverse};
use crate::linalg::matrix::{chordal, cr, projective_normalize};
use crate::linalg::schur::Schur;
use crate::linalg::svd::Svd;
use crate::linalg::{eigen_structure_of, CMatrix, SLMatrix, Subspace, C64};
use crate::Tolerances;

/// Sorted `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn minor(m: &CMatrix, rows: &[usize], cols: &[usize]) -> C64 {
    let k = rows.len();
    let mut sub = CMatrix::zeros(k, k);
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            sub[(a, b)] = m[(i, j)];
        }
    }
    det(&sub)
}

/// `k`-th exterior power in the basis of sorted `k`-subsets.
#[derive(Clone, Debug)]
pub struct WedgeOperator {
    pub source_dim: usize,
    pub k: usize,
    pub subsets: Vec<Vec<usize>>,
    pub matrix: CMatrix,
}

pub fn wedge_power(m: &CMatrix, k: usize) -> Result<WedgeOperator> {
    let n = m.rows();
    if !m.is_square() {
        return Err(Error::Shape { expected: (n, n), found: (m.rows(), m.cols()) });
    }
    if k == 0 || k > n {
        return Err(Error::BadK { k, dim: n });
    }
    let subs = subsets(n, k);
    let c = subs.len();
    let mut w = CMatrix::zeros(c, c);
    for (a, i) in subs.iter().enumerate() {
        for (b, j) in subs.iter().enumerate() {
            w[(a, b)] = minor(m, i, j);
        }
    }
    Ok(WedgeOperator { source_dim: n, k, subsets: subs, matrix: w })
}

/// Plücker coordinates of a subspace (unit norm, first largest coordinate real positive).
pub fn plucker_embed(s: &Subspace) -> Result<Vec<C64>> {
    let d = s.dim();
    if d == 0 {
        return Err(Error::ZeroSubspace);
    }
    plucker_of_columns(s.basis())
}

/// Plücker coordinates of the span of the columns of `b` (assumed independent).
pub fn plucker_of_columns(b: &CMatrix) -> Result<Vec<C64>> {
    let all: Vec<usize> = (0..b.cols()).collect();
    let coords: Vec<C64> = subsets(b.rows(), b.cols()).iter().map(|rows| minor(b, rows, &all)).collect();
    projective_normalize(&coords).ok_or(Error::ZeroSubspace)
}

/// Largest violation of the quadratic Plücker relations, relative to `|w|^2`.
///
/// For every `(d-1)`-subset `I` and `(d+1)`-subset `J`,
/// `sum_{j in J} sign * w[I + j] w[J - j] = 0` holds exactly when `w` is decomposable.
pub fn plucker_defect(w: &[C64], n: usize, d: usize) -> f64 {
    if d <= 1 || d + 1 > n {
        return 0.0;
    }
    let subs = subsets(n, d);
    let index = |s: &[usize]| subs.iter().position(|t| t.as_slice() == s);
    // signed coordinate of a possibly unsorted index list
    let coord = |list: &[usize]| -> C64 {
        let mut v = list.to_vec();
        let mut sign = 1.0;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                } else if v[j] == v[j + 1] {
                    return cr(0.0);
                }
            }
        }
        if v.windows(2).any(|p| p[0] == p[1]) {
            return cr(0.0);
        }
        index(&v).map(|i| w[i] * sign).unwrap_or(cr(0.0))
    };
    let scale: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let mut worst: f64 = 0.0;
    for i_set in subsets(n, d - 1) {
        for j_set in subsets(n, d + 1) {
            let mut acc = cr(0.0);
            for (pos, &j) in j_set.iter().enumerate() {
                let mut left = i_set.clone();
                left.push(j);
                let right: Vec<usize> = j_set.iter().copied().filter(|&x| x != j).collect();
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                acc += coord(&left) * coord(&right) * sign;
            }
            worst = worst.max(acc.norm() / scale.max(f64::MIN_POSITIVE));
        }
    }
    worst
}

/// Eigendirection of a simple dominant eigenvalue and the gap `|l_1| - |l_2|`, when the
/// gap exceeds `tol |l_1|`.
pub fn attracting_point(m: &CMatrix, tol: f64) -> Option<(Vec<C64>, f64)> {
    let schur = Schur::new(m).ok()?;
    let ev = schur.eigenvalues();
    let mut order: Vec<usize> = (0..ev.len()).collect();
    order.sort_by(|&a, &b| ev[b].norm().partial_cmp(&ev[a].norm()).unwrap_or(core::cmp::Ordering::Equal));
    let top = ev[order[0]].norm();
    let second = order.get(1).map_or(0.0, |&i| ev[i].norm());
    let gap = top - second;
    if !(gap > tol * top) {
        return None;
    }
    let mut s = schur;
    s.reorder_to_front(&[order[0]]);
    let v = projective_normalize(&s.q.column(0))?;
    Some((v, gap))
}

/// Sampled check of the one-step contraction at radius `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContractionRecord {
    pub radius: f64,
    pub samples: usize,
    /// Largest angle from the attracting subspace among images of boundary samples.
    pub max_image_angle: f64,
    /// `radius - max_image_angle`.
    pub margin: f64,
}

/// Certificate that `g` is loxodromic: an attracting point of the induced action on
/// `Gr(d, n)`, a ball around it mapped into itself, and a point outside the union `W` of
/// the planes in the ball.
#[derive(Clone, Debug)]
pub struct LoxodromicCertificate {
    /// `d - 1` where `d` is the dimension of the dominant modulus block.
    pub grassmann_k: usize,
    pub attracting_subspace: Subspace,
    pub attracting_point: Vec<C64>,
    /// Columns: adapted basis in which balls and angles are measured; the dominant block
    /// occupies the last `d` columns.
    pub frame: CMatrix,
    pub radius: f64,
    pub contraction: ContractionRecord,
    pub excluded_witness: Vec<C64>,
    /// Angle in the frame from the witness to the attracting subspace, minus the radius.
    pub excluded_margin: f64,
    pub plucker_defect: f64,
}

/// Relative size of the off-diagonal couplings left in the adapted frame.
pub const FRAME_COUPLING: f64 = 0.01;
const BOUNDARY_SAMPLES: usize = 64;
const BISECTION_STEPS: usize = 40;
/// Upper end of the radius search. Frame angle `pi/2` is where the excluded witness
/// sits, so the ball has to stop short of it by more than rounding.
const RADIUS_CAP: f64 = FRAC_PI_2 * (1.0 - 1e-6);
const CERT_SEED: u64 = 0x10c0;

impl LoxodromicCertificate {
    pub fn dim(&self) -> usize {
        self.grassmann_k + 1
    }

    /// Coordinates in the frame.
    pub fn to_frame(&self, x: &[C64]) -> Vec<C64> {
        crate::linalg::lu::Lu::new(&self.frame).solve_vec(x).expect("frame is invertible")
    }

    /// Angle in the frame between the line through `x` and the attracting subspace.
    pub fn frame_angle(&self, x: &[C64]) -> f64 {
        let y = self.to_frame(x);
        let n = y.len();
        let d = self.dim();
        let top: f64 = y[n - d..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let rest: f64 = y[..n - d].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        rest.atan2(top)
    }

    /// Membership of a point in `W`, the union of the planes of the certified ball.
    pub fn in_w(&self, x: &[C64]) -> bool {
        self.frame_angle(x) < self.radius
    }

    /// A `d`-plane at frame angle at most `angle` from the attracting subspace, as
    /// ambient basis columns.
    pub fn random_plane_in_ball<R: Rng + ?Sized>(&self, angle: f64, rng: &mut R) -> CMatrix {
        let n = self.frame.rows();
        let d = self.dim();
        let x = scaled_graph(n - d, d, angle.tan(), rng);
        &self.frame * &graph_basis(&x)
    }
}

/// Random `(n-d) x d` matrix with largest singular value `t`.
fn scaled_graph<R: Rng + ?Sized>(rows: usize, cols: usize, t: f64, rng: &mut R) -> CMatrix {
    let x = crate::sampling::random_matrix(rows, cols, rng);
    let s = Svd::new(&x).map(|s| s.s[0]).unwrap_or(1.0);
    if s == 0.0 {
        x
    } else {
        x.scale_real(t / s)
    }
}

/// Basis `[X; I]` of the graph of `X` over the last coordinates.
fn graph_basis(x: &CMatrix) -> CMatrix {
    let (r, d) = (x.rows(), x.cols());
    let mut b = CMatrix::zeros(r + d, d);
    for i in 0..r {
        for j in 0..d {
            b[(i, j)] = x[(i, j)];
        }
    }
    for j in 0..d {
        b[(r + j, j)] = cr(1.0);
    }
    b
}

/// Frame made of Schur bases of the modulus blocks, with couplings scaled down.
fn adapted_frame(n: usize, blocks: &[crate::decomposition::UnitaryBlock]) -> Result<CMatrix> {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for b in blocks {
        let schur = Schur::new(&b.gamma)?;
        let d = b.gamma.rows();
        let mut off: f64 = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                off = off.max(schur.t[(i, j)].norm());
            }
        }
        let t = if off > FRAME_COUPLING { FRAME_COUPLING / off } else { 1.0 };
        let basis = b.subspace.basis() * &schur.q;
        let mut scale = 1.0;
        for j in 0..d {
            cols.push(basis.column(j).iter().map(|z| z * scale).collect());
            scale *= t;
        }
    }
    Ok(CMatrix::from_columns(n, &cols))
}

fn block(m: &CMatrix, r0: usize, r1: usize, c0: usize, c1: usize) -> CMatrix {
    let rows: Vec<usize> = (r0..r1).collect();
    let cols: Vec<usize> = (c0..c1).collect();
    m.submatrix(&rows, &cols)
}

fn image_angle(gf: &CMatrix, x: &CMatrix) -> f64 {
    let n = gf.rows();
    let d = x.cols();
    let img = gf * &graph_basis(x);
    let top = block(&img, n - d, n, 0, d);
    let rest = block(&img, 0, n - d, 0, d);
    match inverse(&top) {
        Ok(ti) => {
            let y = &rest * &ti;
            Svd::new(&y).map(|s| s.s[0].atan()).unwrap_or(FRAC_PI_2)
        }
        Err(_) => FRAC_PI_2,
    }
}

fn check_radius<R: Rng + ?Sized>(gf: &CMatrix, d: usize, rho: f64, rng: &mut R) -> ContractionRecord {
    let n = gf.rows();
    let t = rho.tan();
    let mut worst: f64 = 0.0;
    let mut samples = 0;
    // worst rank-one direction of the linearization, then random directions
    let top = block(gf, n - d, n, n - d, n);
    let rest = block(gf, 0, n - d, 0, n - d);
    if let (Ok(ti), Ok(sr)) = (inverse(&top), Svd::new(&rest)) {
        if let Ok(st) = Svd::new(&ti) {
            let u = sr.v.column(0);
            let v = st.u.column(0);
            let mut x = CMatrix::zeros(n - d, d);
            for i in 0..n - d {
                for j in 0..d {
                    x[(i, j)] = u[i] * v[j].conj() * t;
                }
            }
            worst = worst.max(image_angle(gf, &x));
            samples += 1;
        }
    }
    for _ in 0..BOUNDARY_SAMPLES {
        let x = scaled_graph(n - d, d, t, rng);
        worst = worst.max(image_angle(gf, &x));
        samples += 1;
    }
    ContractionRecord { radius: rho, samples, max_image_angle: worst, margin: rho - worst }
}

pub fn loxodromic_certificate(g: &SLMatrix, tols: &Tolerances) -> Result<LoxodromicCertificate> {
    let gm = g.matrix();
    let n = gm.rows();
    let es = eigen_structure_of(gm, tols.cluster_tol, tols.cond_cap)?;
    if classify_with_structure(&es, tols).kind != Kind::Loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let ud = unitary_decomposition_from(gm, &es, tols);
    let dominant = ud.blocks.last().expect("loxodromic elements have two blocks");
    let d = dominant.subspace.dim();
    let frame = adapted_frame(n, &ud.blocks)?;
    let frame_inv = inverse(&frame)?;
    let gf = &(&frame_inv * gm) * &frame;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(CERT_SEED);
    let mut best: Option<ContractionRecord> = None;
    let (mut lo, mut hi) = (0.0, RADIUS_CAP);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let rec = check_radius(&gf, d, mid, &mut rng);
        if rec.margin > 0.0 {
            lo = mid;
            best = Some(rec);
        } else {
            hi = mid;
        }
    }
    let contraction = best.ok_or(Error::CertificateSearchFailed)?;
    let radius = contraction.radius;
    let point = plucker_embed(&dominant.subspace)?;
    let defect = plucker_defect(&point, n, d);
    if defect > 1e-8 {
        return Err(Error::CertificateCheckFailed { what: "Plücker relations", residual: defect });
    }
    // the dominant eigendirection of the wedge power is the same point
    let w = wedge_power(gm, d)?;
    let r = attracting_point(&w.matrix, tols.unit_tol).map_or(1.0, |(p, _)| chordal(&p, &point));
    if r > 1e-6 {
        return Err(Error::CertificateCheckFailed { what: "wedge attracting point", residual: r });
    }
    let excluded_witness = frame.column(0);
    let mut cert = LoxodromicCertificate {
        grassmann_k: d - 1,
        attracting_subspace: dominant.subspace.clone(),
        attracting_point: point,
        frame,
        radius,
        contraction,
        excluded_witness: vec![],
        excluded_margin: 0.0,
        plucker_defect: defect,
    };
    cert.excluded_margin = cert.frame_angle(&excluded_witness) - radius;
    cert.excluded_witness = excluded_witness;
    if !(cert.excluded_margin > 0.0) {
        return Err(Error::CertificateCheckFailed { what: "excluded witness", residual: cert.excluded_margin });
    }
    Ok(cert)
}
