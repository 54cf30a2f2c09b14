//! Hermitian forms of signature `(k, l)`, the invariant quadric families of a unipotent
//! Jordan block, and the assembled certificate for parabolic elements.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};

use crate::classification::{classify_with_structure, Kind};
use crate::decomposition::{block_decomposition_from, BlockDecomposition};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eig::HermitianEig;
use crate::linalg::matrix::{c, cr, dot, norm};
use crate::linalg::{eigen_structure_of, subspace_distance, CMatrix, SLMatrix, Subspace, C64};
use crate::Tolerances;

/// `J = diag(-I_k, I_l)`.
pub fn form_matrix(k: usize, l: usize) -> CMatrix {
    let d: Vec<f64> = (0..k + l).map(|i| if i < k { -1.0 } else { 1.0 }).collect();
    CMatrix::real_diag(&d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignType {
    Negative,
    Null,
    Positive,
}

/// `<u, v> = -sum_{j<=k} u_j conj(v_j) + sum_{j>k} u_j conj(v_j)` and the sign type of `u`
/// (null band `tol * |u|^2`).
pub fn form_value_and_sign(u: &[C64], v: &[C64], k: usize, l: usize, tol: f64) -> Result<(C64, SignType)> {
    let n = k + l;
    if u.len() != n || v.len() != n {
        return Err(Error::Shape { expected: (n, 1), found: (u.len().max(v.len()), 1) });
    }
    let pair = |a: &[C64], b: &[C64]| -> C64 {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(j, (x, y))| if j < k { -(x * y.conj()) } else { x * y.conj() })
            .sum()
    };
    let value = pair(u, v);
    let uu = pair(u, u).re;
    let band = tol * u.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let sign = if uu < -band {
        SignType::Negative
    } else if uu > band {
        SignType::Positive
    } else {
        SignType::Null
    };
    Ok((value, sign))
}

pub const DEFAULT_SIGN_TOL: f64 = 1e-9;

/// Inertia of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub neg: usize,
    pub pos: usize,
    pub zero: usize,
    /// The Weyl bound makes the counts rigorous: the smallest nonzero eigenvalue modulus
    /// exceeds twice the Hermiticity defect.
    pub stable: bool,
}

impl Signature {
    pub fn pair(&self) -> (usize, usize) {
        (self.neg, self.pos)
    }
}

/// Eigenvalue sign counts with zero band `tol * |H|`.
pub fn signature(h: &CMatrix, tol: f64) -> Result<Signature> {
    if !h.is_square() {
        return Err(Error::Shape { expected: (h.rows(), h.rows()), found: (h.rows(), h.cols()) });
    }
    let defect = h.hermitian_defect();
    let scale = h.norm_max().max(f64::MIN_POSITIVE);
    if defect > 1e-10 * scale.max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let eig = HermitianEig::new(h)?;
    let norm = eig.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let band = tol * norm;
    let mut s = Signature { neg: 0, pos: 0, zero: 0, stable: true };
    let mut min_nonzero = f64::INFINITY;
    for &v in &eig.values {
        if v < -band {
            s.neg += 1;
            min_nonzero = min_nonzero.min(v.abs());
        } else if v > band {
            s.pos += 1;
            min_nonzero = min_nonzero.min(v.abs());
        } else {
            s.zero += 1;
        }
    }
    s.stable = s.zero == 0 && min_nonzero > 2.0 * defect;
    Ok(s)
}

/// `arccosh sqrt(<x,y><y,x> / (<x,x><y,y>))` on the negative cone.
pub fn distance_kl(x: &[C64], y: &[C64], k: usize, l: usize) -> Result<f64> {
    let (xx, sx) = form_value_and_sign(x, x, k, l, DEFAULT_SIGN_TOL)?;
    let (yy, sy) = form_value_and_sign(y, y, k, l, DEFAULT_SIGN_TOL)?;
    if sx != SignType::Negative || sy != SignType::Negative {
        return Err(Error::NotNegativeType);
    }
    let (xy, _) = form_value_and_sign(x, y, k, l, DEFAULT_SIGN_TOL)?;
    let q = xy.norm_sqr() / (xx.re * yy.re);
    Ok(q.max(1.0).sqrt().acosh())
}

/// Hermitian matrix together with its inertia.
#[derive(Clone, Debug)]
pub struct HermitianForm {
    pub matrix: CMatrix,
    pub signature: Signature,
}

impl HermitianForm {
    pub fn new(matrix: CMatrix, tol: f64) -> Result<HermitianForm> {
        let signature = signature(&matrix, tol)?;
        Ok(HermitianForm { matrix, signature })
    }

    /// `z^H C z`.
    pub fn eval(&self, z: &[C64]) -> f64 {
        quad(&self.matrix, z)
    }
}

/// `z^H C z` (real part).
pub fn quad(c: &CMatrix, z: &[C64]) -> f64 {
    dot(&c.mul_vec(z), z).re
}

/// Gaussian integer `re + i im`.
pub type GaussInt = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// `C_r = C_0 + r E` invariant under the unipotent Jordan block of size `jordan_size`.
///
/// Coefficients are kept exactly as `2 C_0` and `2 E` with Gaussian integer entries.
#[derive(Clone, Debug)]
pub struct HermitianFormFamily {
    pub jordan_size: usize,
    pub parity: Parity,
    pub base_twice: Vec<Vec<GaussInt>>,
    pub direction_twice: Vec<Vec<GaussInt>>,
}

fn binom(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn sgn(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

struct Builder {
    m: Vec<Vec<GaussInt>>,
}

impl Builder {
    /// Adds `coef * <<i, j>>^{(+/-)}` (1-based), where
    /// `<<i, j>>^{(+/-)}(z) = z_i conj(z_j) +/- conj(z_i) z_j`; `coef` is given doubled.
    fn add(&mut self, i: usize, j: usize, coef_twice: GaussInt, plus: bool) {
        let (i, j) = (i - 1, j - 1);
        // as z^H C z the monomial z_i conj(z_j) sits at C[j][i]
        self.m[j][i].0 += coef_twice.0;
        self.m[j][i].1 += coef_twice.1;
        let s = if plus { 1 } else { -1 };
        self.m[i][j].0 += s * coef_twice.0;
        self.m[i][j].1 += s * coef_twice.1;
    }
}

/// Quadric family of Jordan size `n >= 2`.
pub fn parabolic_form_family(jordan_size: usize) -> Result<HermitianFormFamily> {
    let n = jordan_size;
    if n < 2 {
        return Err(Error::SizeTooSmall { size: n });
    }
    let mut b = Builder { m: vec![vec![(0, 0); n]; n] };
    let ni = n as i64;
    let parity;
    if n % 2 == 1 {
        parity = Parity::Odd;
        let k = (ni - 1) / 2;
        for j in 0..k {
            b.add((1 + j) as usize, (ni - j) as usize, (2 * sgn(j + k), 0), true);
        }
        for j in 0..(k - 1).max(0) {
            for m in 0..=j {
                for l in 0..=m {
                    let c2 = 2 * sgn(m - j + k) * binom(m, l);
                    b.add((2 + j - l) as usize, (ni - j + m) as usize, (c2, 0), true);
                }
            }
        }
        for m in 1..=k {
            for j in 0..m {
                let c2 = sgn(2 * k - m) * binom(m - 1, j);
                b.add((k + 1 - j) as usize, (k + 1 + m) as usize, (c2, 0), true);
            }
        }
        b.add((k + 1) as usize, (k + 1) as usize, (1, 0), true);
    } else {
        parity = Parity::Even;
        let k = ni / 2;
        for j in 0..k {
            b.add((1 + j) as usize, (ni - j) as usize, (0, 2 * sgn(j)), false);
        }
        for j in 0..(k - 1).max(0) {
            for m in 0..=j {
                for l in 0..=m {
                    let c2 = 2 * sgn(m - j) * binom(m, l);
                    b.add((2 + j - l) as usize, (ni - j + m) as usize, (0, c2), false);
                }
            }
        }
    }
    let mut dir = vec![vec![(0, 0); n]; n];
    dir[n - 1][n - 1] = (4, 0);
    Ok(HermitianFormFamily { jordan_size: n, parity, base_twice: b.m, direction_twice: dir })
}

fn to_matrix(m: &[Vec<GaussInt>], factor: f64) -> CMatrix {
    let rows: Vec<Vec<C64>> =
        m.iter().map(|r| r.iter().map(|&(a, b)| c(a as f64 * factor, b as f64 * factor)).collect()).collect();
    CMatrix::from_rows(&rows)
}

impl HermitianFormFamily {
    pub fn base(&self) -> CMatrix {
        to_matrix(&self.base_twice, 0.5)
    }

    /// The rank-one direction `E = 2 e_n e_n^H`.
    pub fn direction(&self) -> CMatrix {
        to_matrix(&self.direction_twice, 0.5)
    }

    pub fn at(&self, r: f64) -> CMatrix {
        &self.base() + &self.direction().scale_real(r)
    }

    /// `2 C_r` for integer `r`, exactly.
    pub fn twice_at_integer(&self, r: i64) -> Vec<Vec<GaussInt>> {
        let n = self.jordan_size;
        let mut out = self.base_twice.clone();
        for i in 0..n {
            for j in 0..n {
                out[i][j].0 += r * self.direction_twice[i][j].0;
                out[i][j].1 += r * self.direction_twice[i][j].1;
            }
        }
        out
    }

    pub fn expected_signature(&self) -> (usize, usize) {
        let k = self.jordan_size / 2;
        match self.parity {
            Parity::Odd => (k, k + 1),
            Parity::Even => (k, k),
        }
    }

    /// Exact check of `A^H (2 C_r) A = 2 C_r` for the unipotent Jordan block `A`.
    pub fn exact_invariance(&self, r: i64) -> bool {
        let c = self.twice_at_integer(r);
        let n = self.jordan_size;
        // (A^H C A)[i][j] = sum_{p,q} conj(A[p][i]) C[p][q] A[q][j]; A has ones on the
        // diagonal and superdiagonal and real entries.
        let a = |p: usize, q: usize| -> i64 { (p == q || p + 1 == q) as i64 };
        for i in 0..n {
            for j in 0..n {
                let mut acc: GaussInt = (0, 0);
                for p in 0..n {
                    let api = a(p, i);
                    if api == 0 {
                        continue;
                    }
                    for q in 0..n {
                        let aqj = a(q, j);
                        if aqj == 0 {
                            continue;
                        }
                        acc.0 += api * c[p][q].0 * aqj;
                        acc.1 += api * c[p][q].1 * aqj;
                    }
                }
                if acc != c[i][j] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_hermitian_exact(&self) -> bool {
        let c = &self.base_twice;
        let n = self.jordan_size;
        (0..n).all(|i| (0..n).all(|j| c[i][j].0 == c[j][i].0 && c[i][j].1 == -c[j][i].1))
    }
}

/// Outcome of the five quadric-family checks for one Jordan size.
#[derive(Clone, Debug)]
pub struct SelfCheckReport {
    pub size: usize,
    pub e1_membership: bool,
    pub intersection_ok: bool,
    pub intersection_max_residual: f64,
    pub covering_ok: bool,
    pub covering_solved: usize,
    pub covering_w_locus: usize,
    pub signature_ok: bool,
    pub signatures: Vec<(i64, (usize, usize))>,
    pub exact_invariance: bool,
    pub samples: usize,
}

impl SelfCheckReport {
    pub fn all_pass(&self) -> bool {
        self.e1_membership && self.intersection_ok && self.covering_ok && self.signature_ok && self.exact_invariance
    }
}

pub const SIGNATURE_SAMPLES: [i64; 5] = [-10, -1, 0, 1, 10];

fn random_vec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    crate::sampling::random_vector(n, rng)
}

/// A point of the quadric `z^H C z = 0` on the segment between a negative and a positive
/// vector, each a random perturbation of an extreme eigenvector of `C`.
fn point_on_quadric<R: Rng + ?Sized>(cm: &CMatrix, rng: &mut R) -> Vec<C64> {
    let n = cm.rows();
    let eig = HermitianEig::new(cm).expect("quadric matrices are Hermitian");
    let mut near = |col: usize, want_neg: bool| -> Vec<C64> {
        let v = eig.vectors.column(col);
        let mut t = 1.0;
        loop {
            let p = random_vec(n, rng);
            let s = t / norm(&p);
            let x: Vec<C64> = v.iter().zip(&p).map(|(a, b)| a + b * s).collect();
            let q = quad(cm, &x);
            if (want_neg && q < 0.0) || (!want_neg && q > 0.0) {
                return x;
            }
            t *= 0.5;
        }
    };
    let x = near(0, true);
    let y = near(n - 1, false);
    // Q(x + t d) = Q(x) + 2 t Re(d^H C x) + t^2 Q(d), root in (0, 1)
    let d: Vec<C64> = y.iter().zip(&x).map(|(p, q)| p - q).collect();
    let q0 = quad(cm, &x);
    let b1 = 2.0 * dot(&cm.mul_vec(&x), &d).re;
    let a2 = quad(cm, &d);
    let mut lo = 0.0;
    let mut hi = 1.0;
    let f = |t: f64| q0 + t * b1 + t * t * a2;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let z: Vec<C64> = x.iter().zip(&d).map(|(p, q)| p + q * t).collect();
    let s = 1.0 / norm(&z);
    z.iter().map(|&w| w * s).collect()
}

/// Runs the five quadric-family properties for Jordan size `size` with `samples` points.
pub fn selfcheck<R: Rng + ?Sized>(size: usize, samples: usize, rng: &mut R) -> Result<SelfCheckReport> {
    let fam = parabolic_form_family(size)?;
    let n = size;
    // 1. e_1 lies on every quadric, exactly
    let e1_membership = [-5i64, 0, 7].iter().chain(SIGNATURE_SAMPLES.iter()).all(|&r| fam.twice_at_integer(r)[0][0] == (0, 0));
    // 2. Q_s - Q_r = 2 (s - r) |z_n|^2 on points of Q_r, so pairwise intersections lie in z_n = 0
    let mut inter_max: f64 = 0.0;
    for _ in 0..samples {
        let r = rng.gen_range(-10.0..10.0);
        let mut s = rng.gen_range(-10.0..10.0);
        if s == r {
            s += 1.0;
        }
        let cr_ = fam.at(r);
        let cs = fam.at(s);
        let z = point_on_quadric(&cr_, rng);
        let scale = norm(&z).powi(2) * cr_.norm_max().max(cs.norm_max()).max(1.0);
        let qr = quad(&cr_, &z);
        let qs = quad(&cs, &z);
        let zn = z[n - 1].norm_sqr();
        let resid = (qr.abs() + (qs - 2.0 * (s - r) * zn).abs()) / scale;
        inter_max = inter_max.max(resid);
    }
    let intersection_ok = inter_max <= 1e-10;
    // 3. every point off the hyperplane z_n = 0 lies on some Q_r, r real
    let c0 = fam.base();
    let dir = fam.direction();
    let mut solved = 0;
    let mut w_locus = 0;
    let mut covering_ok = true;
    for idx in 0..samples {
        let mut z = random_vec(n, rng);
        if idx % 10 == 0 {
            z[n - 1] = cr(0.0);
        }
        let e = quad(&dir, &z);
        let zz = norm(&z).powi(2);
        if e.abs() <= 1e-12 * zz {
            w_locus += 1;
            continue;
        }
        let r = -quad(&c0, &z) / e;
        let cr_ = fam.at(r);
        let resid = quad(&cr_, &z).abs();
        if resid <= 1e-10 * zz * cr_.norm_max().max(1.0) {
            solved += 1;
        } else {
            covering_ok = false;
        }
    }
    // 4. constant signature
    let expected = fam.expected_signature();
    let mut signatures = Vec::new();
    let mut signature_ok = true;
    for &r in SIGNATURE_SAMPLES.iter() {
        let s = signature(&fam.at(r as f64), 1e-12)?;
        signatures.push((r, s.pair()));
        signature_ok &= s.pair() == expected && s.zero == 0;
    }
    // 5. exact invariance
    let exact_invariance = fam.is_hermitian_exact() && SIGNATURE_SAMPLES.iter().all(|&r| fam.exact_invariance(r));
    Ok(SelfCheckReport {
        size,
        e1_membership,
        intersection_ok,
        intersection_max_residual: inter_max,
        covering_ok,
        covering_solved: solved,
        covering_w_locus: w_locus,
        signature_ok,
        signatures,
        exact_invariance,
        samples,
    })
}

/// Certificate for a parabolic element: invariant quadric family, signature, and the
/// invariant subspaces `Z` (common points) and `W` (where quadrics meet).
#[derive(Clone, Debug)]
pub struct ParabolicCertificate {
    /// `C_0` in ambient coordinates.
    pub base: CMatrix,
    /// Direction `E` in ambient coordinates (rank = number of Jordan blocks).
    pub direction: CMatrix,
    /// Base and direction in the block basis.
    pub base_in_block_basis: CMatrix,
    pub direction_in_block_basis: CMatrix,
    pub block_basis: CMatrix,
    pub jordan_sizes: Vec<usize>,
    pub signature: (usize, usize),
    pub z: Subspace,
    pub w: Subspace,
    /// Largest relative invariance defect over the sampled `r`.
    pub invariance_residual: f64,
}

impl ParabolicCertificate {
    pub fn at(&self, r: f64) -> CMatrix {
        &self.base + &self.direction.scale_real(r)
    }

    /// Leaf value: the `r` with `z` on `Q_r`, or `None` when `z` lies in the locus where
    /// the direction vanishes.
    pub fn leaf(&self, z: &[C64]) -> Option<f64> {
        let e = quad(&self.direction, z);
        let zz = norm(z).powi(2) * self.direction.norm_max().max(f64::MIN_POSITIVE);
        if e.abs() <= 1e-12 * zz {
            None
        } else {
            Some(-quad(&self.base, z) / e)
        }
    }
}

pub const CERT_SAMPLE_R: [f64; 5] = [-10.0, -1.0, 0.0, 1.0, 10.0];
const CERT_TOL: f64 = 1e-10;

fn assemble_in_block_basis(bd: &BlockDecomposition) -> Result<(CMatrix, CMatrix)> {
    let mut bases = Vec::new();
    let mut dirs = Vec::new();
    for b in &bd.blocks {
        if b.is_jordan {
            let fam = parabolic_form_family(b.dim())?;
            bases.push(fam.base());
            dirs.push(fam.direction());
        } else {
            bases.push(CMatrix::identity(b.dim()));
            dirs.push(CMatrix::zeros(b.dim(), b.dim()));
        }
    }
    Ok((CMatrix::direct_sum(&bases), CMatrix::direct_sum(&dirs)))
}

const INTERSECTION_SAMPLES: usize = 64;

/// Sampled check that `Q_r` and `Q_s` only meet where the direction vanishes, and that the
/// direction vanishes on `W`: `Q_s - Q_r = (s - r) E` on points of `Q_r`, and `E(B y) = 0`
/// whenever the Jordan-top coordinates of `y` are zero.
fn sampled_intersection_check(base: &CMatrix, direction: &CMatrix, b: &CMatrix, bd: &BlockDecomposition) -> f64 {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let n = b.rows();
    let mut worst: f64 = 0.0;
    let mut tops = Vec::new();
    let mut offset = 0;
    for blk in &bd.blocks {
        if blk.is_jordan {
            tops.push(offset + blk.dim() - 1);
        }
        offset += blk.dim();
    }
    let scale = base.norm_max().max(direction.norm_max());
    for _ in 0..INTERSECTION_SAMPLES {
        let r = rng.gen_range(-10.0..10.0);
        let s = rng.gen_range(-10.0..10.0);
        let c_r = base + &direction.scale_real(r);
        let c_s = base + &direction.scale_real(s);
        let z = point_on_quadric(&c_r, &mut rng);
        let want = (s - r) * quad(direction, &z);
        let got = quad(&c_s, &z) - quad(&c_r, &z);
        worst = worst.max((got - want).abs() / (scale * (1.0 + (s - r).abs())));
        let mut y = random_vec(n, &mut rng);
        for &t in &tops {
            y[t] = cr(0.0);
        }
        let w = b.mul_vec(&y);
        worst = worst.max(quad(direction, &w).abs() / (scale * norm(&w).powi(2)));
    }
    worst
}

pub fn parabolic_certificate(g: &SLMatrix, tols: &Tolerances) -> Result<ParabolicCertificate> {
    let gm = g.matrix();
    let n = gm.rows();
    let es = eigen_structure_of(gm, tols.cluster_tol, tols.cond_cap)?;
    if classify_with_structure(&es, tols).kind != Kind::Parabolic {
        return Err(Error::NotParabolic);
    }
    let bd = block_decomposition_from(gm, &es, tols)?;
    let (f0, fe) = assemble_in_block_basis(&bd)?;
    let b = bd.assembled_basis();
    let binv = crate::linalg::lu::inverse(&b)?;
    let binv_h = binv.adjoint();
    let base = &(&binv_h * &f0) * &binv;
    let direction = &(&binv_h * &fe) * &binv;
    let expected: (usize, usize) = bd.blocks.iter().fold((0, 0), |acc, blk| {
        if blk.is_jordan {
            let k = blk.dim() / 2;
            if blk.dim() % 2 == 1 {
                (acc.0 + k, acc.1 + k + 1)
            } else {
                (acc.0 + k, acc.1 + k)
            }
        } else {
            (acc.0, acc.1 + blk.dim())
        }
    });
    // Z: eigenvectors of Jordan blocks; W: everything except Jordan tops
    let mut zc = Vec::new();
    let mut wc = Vec::new();
    for blk in &bd.blocks {
        if blk.is_jordan {
            zc.push(blk.eigenvector());
            for i in 0..blk.dim() - 1 {
                wc.push(blk.basis.column(i));
            }
        } else {
            for i in 0..blk.dim() {
                wc.push(blk.basis.column(i));
            }
        }
    }
    let z = Subspace::span_with_dim(&CMatrix::from_columns(n, &zc), zc.len());
    let w = Subspace::span_with_dim(&CMatrix::from_columns(n, &wc), wc.len());
    let cert_tol = CERT_TOL;
    let gnorm2 = gm.norm_fro().powi(2);
    let gh = gm.adjoint();
    let mut invariance_residual: f64 = 0.0;
    for &r in CERT_SAMPLE_R.iter() {
        let c_r = &base + &direction.scale_real(r);
        let lhs = &(&gh * &c_r) * gm;
        let resid = lhs.max_abs_diff(&c_r) / (gnorm2 * c_r.norm_max()).max(f64::MIN_POSITIVE);
        invariance_residual = invariance_residual.max(resid);
        let s = signature(&(&f0 + &fe.scale_real(r)), 1e-12)?;
        if s.pair() != expected || s.zero != 0 {
            return Err(Error::CertificateCheckFailed { what: "signature", residual: s.zero as f64 });
        }
        for j in 0..z.dim() {
            let v = z.basis().column(j);
            let q = quad(&c_r, &v).abs() / c_r.norm_max().max(f64::MIN_POSITIVE);
            if q > 1e-8 {
                return Err(Error::CertificateCheckFailed { what: "Z inside quadric", residual: q });
            }
        }
    }
    let intersection_residual = sampled_intersection_check(&base, &direction, &b, &bd);
    if intersection_residual > 1e-8 {
        return Err(Error::CertificateCheckFailed { what: "quadric intersections inside W", residual: intersection_residual });
    }
    if invariance_residual > cert_tol {
        return Err(Error::CertificateCheckFailed { what: "form invariance", residual: invariance_residual });
    }
    for (what, s) in [("Z invariance", &z), ("W invariance", &w)] {
        let img = s.image_under(gm);
        let d = subspace_distance(&img, s)?.angle;
        if d > 1e-8 {
            return Err(Error::CertificateCheckFailed { what, residual: d });
        }
    }
    Ok(ParabolicCertificate {
        base,
        direction,
        base_in_block_basis: f0,
        direction_in_block_basis: fe,
        block_basis: b,
        jordan_sizes: bd.jordan_sizes(),
        signature: expected,
        z,
        w,
        invariance_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::basis_vector;
    use crate::linalg::normalize_to_sl;
    use crate::sampling::random_j_isometry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn form_values_and_signs() {
        let e1 = basis_vector(3, 0);
        let (v, s) = form_value_and_sign(&e1, &e1, 1, 2, DEFAULT_SIGN_TOL).unwrap();
        assert_eq!((v, s), (cr(-1.0), SignType::Negative));
        let u = [cr(1.0), cr(1.0), cr(0.0)];
        let (v, s) = form_value_and_sign(&u, &u, 1, 2, DEFAULT_SIGN_TOL).unwrap();
        assert_eq!((v, s), (cr(0.0), SignType::Null));
        let t: f64 = 0.7;
        let (v, _) = form_value_and_sign(&[cr(1.0), cr(0.0)], &[cr(t.cosh()), cr(t.sinh())], 1, 1, 1e-9).unwrap();
        assert!((v - cr(-t.cosh())).norm() < 1e-15);
    }

    #[test]
    fn signature_examples() {
        let s = signature(&CMatrix::real_diag(&[-1.0, 1.0, 1.0]), 1e-12).unwrap();
        assert_eq!((s.neg, s.pos, s.zero), (1, 2, 0));
        assert!(s.stable);
        let s = signature(&CMatrix::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]), 1e-12).unwrap();
        assert_eq!((s.neg, s.pos, s.zero), (1, 1, 0));
        let fam = parabolic_form_family(3).unwrap();
        for r in [-1.0, 0.0, 1.0] {
            assert_eq!(signature(&fam.at(r), 1e-12).unwrap().pair(), (1, 2));
        }
        let bad = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(signature(&bad, 1e-12), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn distance_examples_and_invariance() {
        let e1 = [cr(1.0), cr(0.0)];
        assert!(distance_kl(&e1, &e1, 1, 1).unwrap().abs() < 1e-12);
        let t: f64 = 1.3;
        let y = [cr(t.cosh()), cr(t.sinh())];
        assert!((distance_kl(&e1, &y, 1, 1).unwrap() - t).abs() < 1e-10);
        assert_eq!(distance_kl(&[cr(0.0), cr(1.0)], &e1, 1, 1), Err(Error::NotNegativeType));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (k, l) in [(1, 2), (2, 2)] {
            let h = random_j_isometry(k, l, &mut rng);
            let mut x = crate::sampling::random_vector(k + l, &mut rng);
            let mut y = crate::sampling::random_vector(k + l, &mut rng);
            for v in [&mut x, &mut y] {
                v[0] = v[0] * 10.0;
            }
            let d = distance_kl(&x, &y, k, l).unwrap();
            let d2 = distance_kl(&h.mul_vec(&x), &h.mul_vec(&y), k, l).unwrap();
            assert!((d - d2).abs() < 1e-10 * d.max(1.0));
        }
    }

    #[test]
    fn size_three_family_matches_closed_form() {
        let fam = parabolic_form_family(3).unwrap();
        let want = CMatrix::from_real_rows(&[&[0.0, 0.0, -1.0], &[0.0, 1.0, -0.5], &[-1.0, -0.5, 0.0]]);
        assert_eq!(fam.base().max_abs_diff(&want), 0.0);
        assert_eq!(fam.parity, Parity::Odd);
        for r in [-5, 0, 7] {
            let z = basis_vector(3, 0);
            assert_eq!(quad(&fam.at(r as f64), &z), 0.0);
        }
    }

    #[test]
    fn size_two_family_is_exactly_invariant() {
        let fam = parabolic_form_family(2).unwrap();
        assert_eq!(fam.expected_signature(), (1, 1));
        for r in [-3, 0, 4] {
            assert!(fam.exact_invariance(r));
            assert_eq!(signature(&fam.at(r as f64), 1e-12).unwrap().pair(), (1, 1));
        }
        assert_eq!(parabolic_form_family(1).unwrap_err(), Error::SizeTooSmall { size: 1 });
    }

    #[test]
    fn exact_invariance_up_to_size_nine() {
        for n in 2..=9 {
            let fam = parabolic_form_family(n).unwrap();
            assert!(fam.is_hermitian_exact(), "size {n}");
            for r in -3..=3 {
                assert!(fam.exact_invariance(r), "size {n}, r {r}");
            }
        }
    }

    #[test]
    fn selfcheck_passes_small_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 2..=5 {
            let rep = selfcheck(n, 200, &mut rng).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
            assert!(rep.covering_w_locus > 0);
        }
    }

    #[test]
    fn antidiagonal_spectrum_from_product() {
        // [[0, A], [A^H, 0]] has eigenvalues +- the singular values of A
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = crate::sampling::random_matrix(3, 3, &mut rng);
        let z = CMatrix::zeros(3, 3);
        let top = CMatrix::hstack(&[&z, &a]);
        let bottom = CMatrix::hstack(&[&a.adjoint(), &z]);
        let rows: Vec<Vec<C64>> = (0..3).map(|i| top.row(i).to_vec()).chain((0..3).map(|i| bottom.row(i).to_vec())).collect();
        let h = CMatrix::from_rows(&rows);
        let eig = HermitianEig::new(&h).unwrap();
        let aah = &a * &a.adjoint();
        let mut want: Vec<f64> = HermitianEig::new(&aah).unwrap().values.iter().map(|l| l.max(0.0).sqrt()).collect();
        let neg: Vec<f64> = want.iter().map(|x| -x).collect();
        want.extend(neg);
        want.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in eig.values.iter().zip(&want) {
            assert!((x - y).abs() < 1e-8);
        }
        assert_eq!(signature(&h, 1e-12).unwrap().pair(), (3, 3));
    }

    #[test]
    fn null_pairs_span_unmixed_forms() {
        // the form restricted to the span of two independent null vectors is (1,1) or zero
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let j = form_matrix(1, 2);
        for _ in 0..50 {
            let mut vs = Vec::new();
            for _ in 0..2 {
                let w = crate::sampling::random_vector(2, &mut rng);
                let s = norm(&w);
                vs.push(alloc::vec![cr(1.0), w[0] / s, w[1] / s]);
            }
            let b = CMatrix::from_columns(3, &vs);
            let f = &(&b.adjoint() * &j) * &b;
            let s = signature(&f, 1e-9).unwrap();
            assert!(s.pair() == (1, 1) || s.zero == 2, "{s:?}");
        }
    }

    fn sl(m: &CMatrix) -> SLMatrix {
        normalize_to_sl(m, 1e-12).unwrap()
    }

    fn jb(n: usize) -> CMatrix {
        CMatrix::jordan_block(n, cr(1.0))
    }

    #[test]
    fn certificate_for_jordan_three() {
        let cert = parabolic_certificate(&sl(&jb(3)), &Tolerances::default()).unwrap();
        assert_eq!(cert.signature, (1, 2));
        assert!(subspace_distance(&cert.z, &Subspace::coordinate(3, &[0])).unwrap().angle < 1e-12);
        assert!(subspace_distance(&cert.w, &Subspace::coordinate(3, &[0, 1])).unwrap().angle < 1e-12);
        assert!(cert.invariance_residual < 1e-14);
    }

    #[test]
    fn certificate_signatures_of_examples() {
        let t = Tolerances::default();
        let c = parabolic_certificate(&sl(&CMatrix::direct_sum(&[jb(2), jb(2)])), &t).unwrap();
        assert_eq!(c.signature, (2, 2));
        let c = parabolic_certificate(&sl(&CMatrix::direct_sum(&[jb(2), CMatrix::identity(1)])), &t).unwrap();
        assert_eq!(c.signature, (1, 2));
        let c = parabolic_certificate(&sl(&jb(2)), &t).unwrap();
        assert_eq!(c.signature, (1, 1));
        assert_eq!(parabolic_certificate(&sl(&CMatrix::real_diag(&[2.0, 0.5])), &t).unwrap_err(), Error::NotParabolic);
    }

    #[test]
    fn certificate_on_conjugated_parabolics() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let t = Tolerances::default();
        for i in 0..40 {
            let s = crate::sampling::random_of_kind(Kind::Parabolic, 3 + i % 3, 1e3, &mut rng);
            let cert = parabolic_certificate(&s.element, &t).unwrap();
            assert!(cert.invariance_residual <= 1e-10);
        }
    }
}
