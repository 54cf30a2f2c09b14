//! Elliptic / parabolic / loxodromic classification, finite order detection, restriction
//! to invariant lines, and the fixed-point based classification inside `PU(k, l)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eig::HermitianEig;
use crate::linalg::matrix::{chordal, norm};
use crate::linalg::{eigen_structure_of, normalize_to_sl, CMatrix, EigenStructure, SLMatrix, C64};
use crate::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Elliptic,
    Parabolic,
    Loxodromic,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Elliptic => "elliptic",
            Kind::Parabolic => "parabolic",
            Kind::Loxodromic => "loxodromic",
        }
    }
}

/// Eigenvalue summary backing a classification.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub eigenvalues: Vec<C64>,
    pub algebraic_mults: Vec<usize>,
    pub moduli: Vec<f64>,
    pub diagonalizable: bool,
    /// Largest `| |lambda| - 1 |` over the eigenvalues.
    pub max_unit_deviation: f64,
    /// Some modulus deviation lies in `(unit_tol / 2, 2 unit_tol]`, close to the decision boundary.
    pub marginal: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult {
    pub kind: Kind,
    pub finite_order: Option<u64>,
    pub evidence: Evidence,
}

pub const DEFAULT_MAX_ORDER: u64 = 10_000;

fn evidence_of(es: &EigenStructure, tols: &Tolerances) -> Evidence {
    let eigenvalues: Vec<C64> = es.eigenvalues.iter().map(|c| c.value).collect();
    let moduli: Vec<f64> = eigenvalues.iter().map(|z| z.norm()).collect();
    let devs: Vec<f64> = moduli.iter().map(|m| (m - 1.0).abs()).collect();
    let max_unit_deviation = devs.iter().copied().fold(0.0, f64::max);
    let marginal = devs.iter().any(|&d| d > 0.5 * tols.unit_tol && d <= 2.0 * tols.unit_tol);
    Evidence {
        eigenvalues,
        algebraic_mults: es.eigenvalues.iter().map(|c| c.algebraic_mult).collect(),
        moduli,
        diagonalizable: es.is_diagonalizable(),
        max_unit_deviation,
        marginal,
    }
}

pub(crate) fn kind_of(es: &EigenStructure, tols: &Tolerances) -> Kind {
    if es.eigenvalues.iter().any(|c| (c.value.norm() - 1.0).abs() > tols.unit_tol) {
        Kind::Loxodromic
    } else if !es.is_diagonalizable() {
        Kind::Parabolic
    } else {
        Kind::Elliptic
    }
}

pub(crate) fn classify_with_structure(es: &EigenStructure, tols: &Tolerances) -> ClassificationResult {
    let kind = kind_of(es, tols);
    let finite = if kind == Kind::Elliptic {
        finite_order_from(es, DEFAULT_MAX_ORDER).order
    } else {
        None
    };
    ClassificationResult { kind, finite_order: finite, evidence: evidence_of(es, tols) }
}

pub fn classify(g: &SLMatrix, tols: &Tolerances) -> Result<ClassificationResult> {
    let es = eigen_structure_of(g.matrix(), tols.cluster_tol, tols.cond_cap)?;
    Ok(classify_with_structure(&es, tols))
}

/// Outcome of the finite-order test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteOrder {
    /// Least `m <= max_order` with `g^m` scalar, confirmed by an explicit power.
    pub order: Option<u64>,
    /// Whether every eigenvalue-ratio angle is a rational multiple of `2 pi` with
    /// denominator at most `max_order`.
    pub rational_phases: bool,
}

/// Angle tolerance (radians) for the rationality test.
const PHASE_TOL: f64 = 1e-8;
/// Relative tolerance for the confirming power `g^m = c I`.
const POWER_TOL: f64 = 1e-8;

/// Continued-fraction convergent `p/q` of `x` with `|x - p/q| <= tol` and `q <= max_den`.
pub fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    let a0 = x.floor();
    let (mut h_prev, mut h) = (1.0f64, a0);
    let (mut k_prev, mut k) = (0.0f64, 1.0f64);
    let mut frac = x - a0;
    for _ in 0..64 {
        if (x - h / k).abs() <= tol {
            return Some((h as i64, k as u64));
        }
        if frac.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        if k_next > max_den as f64 {
            return None;
        }
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Whether `g^m` is scalar, read in eigen-coordinates: every ratio `(lambda_i / lambda_0)^m`
/// is within `POWER_TOL` of 1. Only called on diagonalizable elements. The test is
/// conjugation invariant; a matrix-norm test on `g^m` would scale the eigenvalue error
/// by `m` and by the conditioning of the representative.
fn is_scalar_power(es: &EigenStructure, m: u64) -> bool {
    let base = es.eigenvalues[0].value;
    es.eigenvalues.iter().all(|c| {
        let r = c.value / base;
        let z = C64::from_polar(Float::powf(r.norm(), m as f64), r.arg() * m as f64);
        (z - C64::new(1.0, 0.0)).norm() <= POWER_TOL
    })
}

fn finite_order_from(es: &EigenStructure, max_order: u64) -> FiniteOrder {
    if !es.is_diagonalizable() || es.eigenvalues.iter().any(|c| (c.value.norm() - 1.0).abs() > 1e-6) {
        return FiniteOrder { order: None, rational_phases: false };
    }
    let base = es.eigenvalues[0].value;
    let mut order: u64 = 1;
    let mut rational = true;
    for c in es.eigenvalues.iter().skip(1) {
        let r = c.value / base;
        let turns = r.im.atan2(r.re) / TAU;
        match rational_approximation(turns, max_order, PHASE_TOL / TAU) {
            Some((_, q)) => {
                order = order / gcd(order, q) * q;
                if order > max_order {
                    rational = false;
                    break;
                }
            }
            None => {
                rational = false;
                break;
            }
        }
    }
    if !rational {
        return FiniteOrder { order: None, rational_phases: false };
    }
    let confirmed = is_scalar_power(es, order);
    FiniteOrder { order: if confirmed { Some(order) } else { None }, rational_phases: true }
}

/// Least projective order up to `max_order` (absent for non-elliptic elements).
pub fn finite_order(g: &SLMatrix, max_order: u64, tols: &Tolerances) -> Result<FiniteOrder> {
    let es = eigen_structure_of(g.matrix(), tols.cluster_tol, tols.cond_cap)?;
    if kind_of(&es, tols) != Kind::Elliptic {
        return Ok(FiniteOrder { order: None, rational_phases: false });
    }
    Ok(finite_order_from(&es, max_order))
}

/// Chordal threshold for a point to count as fixed.
pub const FIXED_TOL: f64 = 1e-8;

/// Classifies the restriction of `g` to the line through two fixed points.
pub fn line_restriction_class(g: &SLMatrix, x: &[C64], y: &[C64], tols: &Tolerances) -> Result<ClassificationResult> {
    let n = g.n_plus_1();
    if x.len() != n || y.len() != n {
        return Err(Error::Shape { expected: (n, 1), found: (x.len().max(y.len()), 1) });
    }
    if norm(x) == 0.0 || norm(y) == 0.0 {
        return Err(Error::ZeroVector);
    }
    for p in [x, y] {
        let r = chordal(&g.matrix().mul_vec(p), p);
        if r > FIXED_TOL {
            return Err(Error::NotFixed { residual: r });
        }
    }
    if chordal(x, y) <= FIXED_TOL {
        return Err(Error::CoincidentPoints);
    }
    let b = CMatrix::from_columns(n, &[x.to_vec(), y.to_vec()]);
    let gram = &b.adjoint() * &b;
    let pinv = &crate::linalg::lu::inverse(&gram)? * &b.adjoint();
    let r = &(&pinv * g.matrix()) * &b;
    let r = normalize_to_sl(&r, 1e-300)?;
    classify(&r, tols)
}

/// Whether `g^H J g = J` for `J = diag(-I_k, I_l)`, within `tol` relative to `|g|^2`.
pub fn preserves_form(g: &SLMatrix, k: usize, l: usize, tol: f64) -> bool {
    let n = g.n_plus_1();
    if k + l != n {
        return false;
    }
    let j = crate::hermitian::form_matrix(k, l);
    let gm = g.matrix();
    let lhs = &(&gm.adjoint() * &j) * gm;
    let scale = gm.norm_fro().powi(2).max(1.0);
    lhs.max_abs_diff(&j) <= tol * scale
}

/// Fixed-point classification in `PU(k, l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PUClassification {
    pub kind: Kind,
    /// Fixed point (unit lift) in the closed ball: negative for elliptic, null otherwise.
    pub fixed_point_witness: Vec<C64>,
    /// Form value of the witness.
    pub witness_form_value: f64,
    pub signature: (usize, usize),
}

const PU_NULL_BAND: f64 = 1e-7;

/// Eigenspace of one cluster in ambient coordinates (orthonormal columns).
fn eigenspace(es: &EigenStructure, i: usize) -> CMatrix {
    let u = es.generalized_eigenspaces[i].basis();
    let k1 = es.kernel_chains[i][0].basis();
    u * k1
}

pub fn classify_pu(g: &SLMatrix, k: usize, l: usize, tols: &Tolerances) -> Result<PUClassification> {
    if !preserves_form(g, k, l, 1e-8) {
        return Err(Error::NotInPU);
    }
    let j = crate::hermitian::form_matrix(k, l);
    let es = eigen_structure_of(g.matrix(), tols.cluster_tol, tols.cond_cap)?;
    // restricted forms on the eigenspaces
    let mut null_dirs: Vec<(usize, Vec<C64>)> = Vec::new();
    let mut best_negative: Option<(f64, Vec<C64>)> = None;
    let mut least_form: Option<(f64, Vec<C64>)> = None;
    for i in 0..es.eigenvalues.len() {
        let e = eigenspace(&es, i);
        let f = &(&e.adjoint() * &j) * &e;
        let h = HermitianEig::new(&f)?;
        for (idx, &val) in h.values.iter().enumerate() {
            let v = e.mul_vec(&h.vectors.column(idx));
            if least_form.as_ref().map_or(true, |(b, _)| val < *b) {
                least_form = Some((val, v.clone()));
            }
            if val < -PU_NULL_BAND {
                if best_negative.as_ref().map_or(true, |(b, _)| val < *b) {
                    best_negative = Some((val, v));
                }
            } else if val.abs() <= PU_NULL_BAND {
                null_dirs.push((i, v));
            }
        }
    }
    if let Some((val, v)) = best_negative {
        return Ok(PUClassification { kind: Kind::Elliptic, fixed_point_witness: v, witness_form_value: val, signature: (k, l) });
    }
    // a loxodromic line needs null fixed points of different moduli; take the extreme pair
    let modulus = |i: usize| es.eigenvalues[i].value.norm();
    let lo = null_dirs.iter().min_by(|a, b| modulus(a.0).partial_cmp(&modulus(b.0)).unwrap());
    let hi = null_dirs.iter().max_by(|a, b| modulus(a.0).partial_cmp(&modulus(b.0)).unwrap());
    if let (Some(lo), Some(hi)) = (lo, hi) {
        if (modulus(hi.0) / modulus(lo.0)).ln().abs() > tols.unit_tol {
            let w = hi.1.clone();
            let val = form_value(&j, &w);
            return Ok(PUClassification { kind: Kind::Loxodromic, fixed_point_witness: w, witness_form_value: val, signature: (k, l) });
        }
    }
    // parabolic: prefer a null eigenvector of a defective eigenvalue
    let pick = null_dirs
        .iter()
        .find(|(i, _)| es.eigenvalues[*i].max_chain_length > 1)
        .or(null_dirs.first())
        .map(|(_, v)| v.clone())
        .or(least_form.map(|(_, v)| v))
        .ok_or(Error::NotInPU)?;
    let val = form_value(&j, &pick);
    Ok(PUClassification { kind: Kind::Parabolic, fixed_point_witness: pick, witness_form_value: val, signature: (k, l) })
}

fn form_value(j: &CMatrix, v: &[C64]) -> f64 {
    let jv = j.mul_vec(v);
    crate::linalg::matrix::dot(&jv, v).re / v.iter().map(|z| z.norm_sqr()).sum::<f64>()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{basis_vector, c, cr};
    use crate::sampling::{boost, random_of_kind, random_pu_element};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn sl(m: &CMatrix) -> SLMatrix {
        normalize_to_sl(m, 1e-12).unwrap()
    }

    fn phase(t: f64) -> C64 {
        C64::from_polar(1.0, t)
    }

    fn example_6x6() -> CMatrix {
        let j2 = CMatrix::jordan_block(2, cr(1.0));
        CMatrix::direct_sum(&[j2.clone(), j2, CMatrix::identity(2)])
    }

    #[test]
    fn kind_examples() {
        let lox = sl(&CMatrix::real_diag(&[2.0, 0.5]));
        assert_eq!(classify(&lox, &tols()).unwrap().kind, Kind::Loxodromic);
        let par = sl(&CMatrix::jordan_block(2, cr(1.0)));
        assert_eq!(classify(&par, &tols()).unwrap().kind, Kind::Parabolic);
        let ex = sl(&example_6x6());
        assert_eq!(classify(&ex, &tols()).unwrap().kind, Kind::Parabolic);
        let id = classify(&sl(&CMatrix::identity(3)), &tols()).unwrap();
        assert_eq!(id.kind, Kind::Elliptic);
        assert_eq!(id.finite_order, Some(1));
    }

    #[test]
    fn marginal_flag_near_boundary() {
        let t = tols();
        let g = sl(&CMatrix::real_diag(&[1.0 + 1.5 * t.unit_tol, 1.0 / (1.0 + 1.5 * t.unit_tol)]));
        let r = classify(&g, &t).unwrap();
        assert_eq!(r.kind, Kind::Loxodromic);
        assert!(r.evidence.marginal);
        let r = classify(&sl(&CMatrix::real_diag(&[2.0, 0.5])), &t).unwrap();
        assert!(!r.evidence.marginal);
    }

    #[test]
    fn finite_order_examples() {
        let third = TAU / 3.0;
        let g = sl(&CMatrix::diag(&[phase(third), phase(-third), cr(1.0)]));
        assert_eq!(finite_order(&g, DEFAULT_MAX_ORDER, &tols()).unwrap().order, Some(3));
        let g = sl(&CMatrix::diag(&[phase(1.0), phase(-1.0)]));
        let f = finite_order(&g, DEFAULT_MAX_ORDER, &tols()).unwrap();
        assert_eq!(f.order, None);
        assert!(!f.rational_phases);
        let g = sl(&CMatrix::identity(4));
        assert_eq!(finite_order(&g, DEFAULT_MAX_ORDER, &tols()).unwrap().order, Some(1));
        let g = sl(&CMatrix::jordan_block(3, cr(1.0)));
        assert_eq!(finite_order(&g, DEFAULT_MAX_ORDER, &tols()).unwrap().order, None);
    }

    #[test]
    fn finite_order_matches_brute_force_powers() {
        // oracle: least m with g^m scalar, found by iterating powers
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for order in [2u64, 5, 7, 12, 30] {
            let s = crate::sampling::finite_order_elliptic(3, order, 10.0, &mut rng);
            let g = &s.element;
            let brute = (1..=order)
                .find(|&m| {
                    let p = g.matrix().pow(m);
                    let d = p.trace() / 3.0;
                    (&p - &CMatrix::identity(3).scale(d)).norm_fro() <= 1e-6 * p.norm_fro()
                })
                .unwrap();
            assert_eq!(finite_order(g, DEFAULT_MAX_ORDER, &tols()).unwrap().order, Some(brute));
        }
    }

    #[test]
    fn rational_approximation_finds_small_denominators() {
        assert_eq!(rational_approximation(0.375, 100, 1e-12), Some((3, 8)));
        assert_eq!(rational_approximation(-1.0 / 3.0, 100, 1e-12), Some((-1, 3)));
        assert_eq!(rational_approximation(2f64.sqrt(), 10_000, 1e-12), None);
    }

    #[test]
    fn line_restrictions() {
        let e = |i| basis_vector(3, i);
        let g = sl(&CMatrix::real_diag(&[2.0, 0.5, 1.0]));
        assert_eq!(line_restriction_class(&g, &e(0), &e(1), &tols()).unwrap().kind, Kind::Loxodromic);
        let g = sl(&CMatrix::diag(&[phase(0.7), cr(1.0), phase(-0.7)]));
        assert_eq!(line_restriction_class(&g, &e(0), &e(1), &tols()).unwrap().kind, Kind::Elliptic);
        let par = sl(&CMatrix::direct_sum(&[CMatrix::jordan_block(2, cr(1.0)), CMatrix::identity(1)]));
        let r = line_restriction_class(&par, &e(0), &e(2), &tols()).unwrap();
        assert_eq!(r.kind, Kind::Elliptic);
        assert_eq!(r.finite_order, Some(1));
        assert!(matches!(line_restriction_class(&par, &e(1), &e(2), &tols()), Err(Error::NotFixed { .. })));
        assert_eq!(line_restriction_class(&par, &e(0), &e(0), &tols()), Err(Error::CoincidentPoints));
    }

    #[test]
    fn preserves_form_examples() {
        let g = sl(&CMatrix::diag(&[phase(0.3), phase(1.1)]));
        assert!(preserves_form(&g, 1, 1, 1e-10));
        let g = sl(&CMatrix::real_diag(&[2.0, 0.5]));
        assert!(!preserves_form(&g, 1, 1, 1e-10));
        let g = sl(&boost(1, 1, 0, 1, 0.8));
        assert!(preserves_form(&g, 1, 1, 1e-10));
    }

    #[test]
    fn classify_pu_examples() {
        let g = sl(&CMatrix::diag(&[phase(0.3), phase(1.1)]));
        let r = classify_pu(&g, 1, 1, &tols()).unwrap();
        assert_eq!(r.kind, Kind::Elliptic);
        assert!(chordal(&r.fixed_point_witness, &basis_vector(2, 0)) < 1e-12);
        assert!(r.witness_form_value < 0.0);

        let t = 0.8;
        let g = sl(&boost(1, 1, 0, 1, t));
        let r = classify_pu(&g, 1, 1, &tols()).unwrap();
        assert_eq!(r.kind, Kind::Loxodromic);
        // eigenvalue e^t has eigenvector (1, 1), e^{-t} has (1, -1)
        assert!(chordal(&r.fixed_point_witness, &[cr(1.0), cr(1.0)]) < 1e-8);
        assert!(r.witness_form_value.abs() < 1e-8);

        // [[1,1],[0,1]] preserves the off-diagonal form i(z1 conj z2 - z2 conj z1) ~ diag(-1, 1)
        let h = 1.0 / 2f64.sqrt();
        let p = CMatrix::from_rows(&[vec![c(h, 0.0), c(0.0, h)], vec![c(0.0, h), c(h, 0.0)]]);
        let u = CMatrix::jordan_block(2, cr(1.0));
        let g = sl(&(&(&p.adjoint() * &u) * &p));
        assert!(preserves_form(&g, 1, 1, 1e-12));
        let r = classify_pu(&g, 1, 1, &tols()).unwrap();
        assert_eq!(r.kind, Kind::Parabolic);
        assert!(r.witness_form_value.abs() < 1e-8);

        assert_eq!(classify_pu(&sl(&CMatrix::real_diag(&[2.0, 0.5])), 1, 1, &tols()), Err(Error::NotInPU));
    }

    #[test]
    fn classify_pu_agrees_in_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (k, l) in [(1, 1), (1, 2), (1, 3)] {
            for kind in [Kind::Elliptic, Kind::Parabolic, Kind::Loxodromic] {
                for _ in 0..20 {
                    let g = sl(&random_pu_element(kind, k, l, &mut rng));
                    assert_eq!(classify(&g, &tols()).unwrap().kind, kind);
                    assert_eq!(classify_pu(&g, k, l, &tols()).unwrap().kind, kind, "({k},{l})");
                }
            }
        }
    }

    #[test]
    fn classification_is_conjugation_and_inverse_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for kind in [Kind::Elliptic, Kind::Parabolic, Kind::Loxodromic] {
            for n in 3..=4 {
                for _ in 0..30 {
                    let s = random_of_kind(kind, n, 1e3, &mut rng);
                    assert_eq!(classify(&s.element, &tols()).unwrap().kind, kind);
                    assert_eq!(classify(&s.element.inverse(), &tols()).unwrap().kind, kind);
                    let sq = s.element.pow(2);
                    let k2 = classify(&sq, &tols()).unwrap().kind;
                    assert_eq!(k2 == Kind::Loxodromic, kind == Kind::Loxodromic);
                }
            }
        }
    }
}
