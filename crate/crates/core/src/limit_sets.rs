//! Limit sets of cyclic groups as finite unions of projective subspaces: the
//! accumulation set, the complement of the equicontinuity region, the Kulkarni limit
//! set, the two maximal discontinuity regions, and pseudo-projective power limits.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)] // shadowed by inherent f64 methods when std is linked
use num_traits::Float;

use crate::classification::{classify_with_structure, ClassificationResult, Kind};
use crate::decomposition::{blocks_of_clusters, group_by_modulus, unitary_decomposition_from, xi_of, UnitaryDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{eigen_structure_of, kernel_image, CMatrix, EigenStructure, SLMatrix, Subspace, C64};
use crate::Tolerances;

/// Angle below which one subspace counts as contained in another.
pub const CONTAINMENT_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-9;

/// Finite union of projective subspaces, stored as their linear lifts.
///
/// No component is contained in another; components are sorted by dimension and then by
/// their canonical bases.
#[derive(Clone, Debug)]
pub struct SubspaceUnion {
    ambient: usize,
    components: Vec<Subspace>,
}

fn cmp_f64(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

fn cmp_bases(a: &CMatrix, b: &CMatrix) -> Ordering {
    for j in 0..a.cols().min(b.cols()) {
        for i in 0..a.rows() {
            let (x, y) = (a[(i, j)], b[(i, j)]);
            let o = cmp_f64(x.re, y.re).then(cmp_f64(x.im, y.im));
            if o != Ordering::Equal && (x - y).norm() > 1e-9 {
                return o;
            }
        }
    }
    Ordering::Equal
}

impl SubspaceUnion {
    pub fn new(ambient: usize, parts: Vec<Subspace>) -> SubspaceUnion {
        let mut parts: Vec<Subspace> = parts.into_iter().filter(|p| p.dim() > 0).map(|p| p.canonical()).collect();
        parts.sort_by(|a, b| b.dim().cmp(&a.dim()));
        let mut kept: Vec<Subspace> = Vec::new();
        for p in parts {
            if !kept.iter().any(|k| k.contains(&p, CONTAINMENT_TOL)) {
                kept.push(p);
            }
        }
        kept.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| cmp_bases(a.basis(), b.basis())));
        SubspaceUnion { ambient, components: kept }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn components(&self) -> &[Subspace] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Projective dimensions of the components.
    pub fn projective_dims(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.dim() - 1).collect()
    }

    /// Smallest angle from the line through `x` to a component.
    pub fn angle_to_vector(&self, x: &[C64]) -> f64 {
        self.components.iter().map(|c| c.angle_to_vector(x)).fold(PI / 2.0, f64::min)
    }

    /// Whether some component contains `s`.
    pub fn covers(&self, s: &Subspace, tol: f64) -> bool {
        self.components.iter().any(|c| c.contains(s, tol))
    }

    /// Same components, up to `tol` in subspace distance.
    pub fn same_as(&self, other: &SubspaceUnion, tol: f64) -> bool {
        self.len() == other.len()
            && self.components.iter().all(|c| other.components.iter().any(|d| c.dim() == d.dim() && c.contains(d, tol)))
    }
}

/// A set of points of projective space.
#[derive(Clone, Debug)]
pub enum PointSet {
    Empty,
    WholeSpace,
    Union(SubspaceUnion),
}

impl PointSet {
    fn from_union(u: SubspaceUnion) -> PointSet {
        if u.is_empty() {
            PointSet::Empty
        } else if u.components().iter().any(|c| c.dim() == u.ambient_dim()) {
            PointSet::WholeSpace
        } else {
            PointSet::Union(u)
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PointSet::Empty)
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self, PointSet::WholeSpace)
    }

    pub fn as_union(&self) -> Option<&SubspaceUnion> {
        match self {
            PointSet::Union(u) => Some(u),
            _ => None,
        }
    }

    pub fn marker(&self) -> &'static str {
        match self {
            PointSet::Empty => "empty",
            PointSet::WholeSpace => "whole_space",
            PointSet::Union(_) => "union",
        }
    }
}

/// Everything the limit-set routines need, computed once.
struct Analysis {
    g: CMatrix,
    es: EigenStructure,
    groups: Vec<Vec<usize>>,
    ud: UnitaryDecomposition,
    class: ClassificationResult,
}

fn analyse(g: &SLMatrix, tols: &Tolerances) -> Result<Analysis> {
    let es = eigen_structure_of(g.matrix(), tols.cluster_tol, tols.cond_cap)?;
    let groups = group_by_modulus(&es, tols.unit_tol);
    let ud = unitary_decomposition_from(g.matrix(), &es, tols);
    let class = classify_with_structure(&es, tols);
    Ok(Analysis { g: g.matrix().clone(), es, groups, ud, class })
}

/// Span of the eigenvectors of the clusters in `group`.
fn eigenvector_span(a: &Analysis, group: &[usize]) -> Subspace {
    let n = a.g.rows();
    let mut cols = Vec::new();
    for &i in group {
        let u = a.es.generalized_eigenspaces[i].basis();
        let k1 = a.es.kernel_chains[i][0].basis();
        cols.extend((u * k1).columns());
    }
    let d = cols.len();
    Subspace::span_with_dim(&CMatrix::from_columns(n, &cols), d)
}

fn xi_of_group(a: &Analysis, j: usize) -> Option<Subspace> {
    xi_of(&blocks_of_clusters(&a.g, &a.es, &a.groups[j])).xi
}

fn lambda_of(a: &Analysis) -> PointSet {
    if a.class.kind == Kind::Elliptic {
        return if a.class.finite_order.is_some() { PointSet::Empty } else { PointSet::WholeSpace };
    }
    let n = a.g.rows();
    let parts = (0..a.groups.len()).map(|j| eigenvector_span(a, &a.groups[j])).collect();
    PointSet::from_union(SubspaceUnion::new(n, parts))
}

fn eq_complement_of(a: &Analysis) -> PointSet {
    if a.class.kind == Kind::Elliptic {
        return PointSet::Empty;
    }
    let n = a.g.rows();
    let k = a.ud.k();
    let term = |skip: usize| -> Subspace {
        let mut parts: Vec<&Subspace> = Vec::new();
        for (j, b) in a.ud.blocks.iter().enumerate() {
            if j != skip {
                parts.push(&b.subspace);
            }
        }
        let xi = xi_of_group(a, skip);
        if let Some(x) = xi.as_ref() {
            parts.push(x);
        }
        Subspace::join_all(n, &parts, RANK_TOL)
    };
    let first = term(0);
    let last = term(k - 1);
    PointSet::from_union(SubspaceUnion::new(n, alloc::vec![first, last]))
}

/// Accumulation set of orbits: one component per modulus group, the span of the
/// eigenvectors of that group. Empty for finite order, the whole space for elliptic
/// elements of infinite order.
pub fn lambda_set(g: &SLMatrix, tols: &Tolerances) -> Result<PointSet> {
    Ok(lambda_of(&analyse(g, tols)?))
}

/// Complement of the equicontinuity region:
/// `<V_2, ..., V_k, Xi(gamma_1)> u <V_1, ..., V_{k-1}, Xi(gamma_k)>`.
pub fn equicontinuity_complement(g: &SLMatrix, tols: &Tolerances) -> Result<PointSet> {
    Ok(eq_complement_of(&analyse(g, tols)?))
}

fn kulkarni_of(a: &Analysis) -> PointSet {
    match a.class.kind {
        Kind::Elliptic => lambda_of(a),
        _ => eq_complement_of(a),
    }
}

/// Kulkarni limit set: empty or the whole space for elliptic elements, otherwise the
/// complement of the equicontinuity region.
pub fn kulkarni_limit_set(g: &SLMatrix, tols: &Tolerances) -> Result<PointSet> {
    Ok(kulkarni_of(&analyse(g, tols)?))
}

/// Open region given as the complement of a union of projective subspaces.
#[derive(Clone, Debug)]
pub struct Region {
    pub complement: SubspaceUnion,
}

/// `Omega_1` and `Omega_2`, present when there are more than three modulus groups and
/// the smallest modulus is below one.
pub fn maximal_regions(g: &SLMatrix, tols: &Tolerances) -> Result<Option<(Region, Region)>> {
    let a = analyse(g, tols)?;
    Ok(maximal_regions_of(&a))
}

fn maximal_regions_of(a: &Analysis) -> Option<(Region, Region)> {
    let k = a.ud.k();
    if k <= 3 || a.ud.blocks[0].r >= 1.0 {
        return None;
    }
    let n = a.g.rows();
    let v = |j: usize| &a.ud.blocks[j].subspace;
    let upper: Vec<&Subspace> = (2..k).map(v).collect();
    let lower: Vec<&Subspace> = (0..k - 1).map(v).collect();
    let omega1 = SubspaceUnion::new(n, alloc::vec![v(0).clone(), Subspace::join_all(n, &upper, RANK_TOL)]);
    let omega2 = SubspaceUnion::new(n, alloc::vec![v(k - 1).clone(), Subspace::join_all(n, &lower, RANK_TOL)]);
    Some((Region { complement: omega1 }, Region { complement: omega2 }))
}

/// All limit sets of `<g>` at once.
#[derive(Clone, Debug)]
pub struct LimitSetReport {
    pub lambda: PointSet,
    pub eq_complement: PointSet,
    pub kulkarni: PointSet,
    pub maximal_regions: Option<(Region, Region)>,
    pub classification: ClassificationResult,
    pub unitary_decomposition: UnitaryDecomposition,
}

pub fn limit_set_report(g: &SLMatrix, tols: &Tolerances) -> Result<LimitSetReport> {
    let a = analyse(g, tols)?;
    Ok(LimitSetReport {
        lambda: lambda_of(&a),
        eq_complement: eq_complement_of(&a),
        kulkarni: kulkarni_of(&a),
        maximal_regions: maximal_regions_of(&a),
        classification: a.class.clone(),
        unitary_decomposition: a.ud.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Projectivization of a nonzero, possibly singular matrix.
#[derive(Clone, Debug)]
pub struct PseudoProjectiveMap {
    /// Normalized so the first entry of largest modulus is `1`.
    pub matrix: CMatrix,
    pub kernel: Subspace,
    pub image: Subspace,
    /// Exponent `m` of the last power used.
    pub exponent: u64,
    pub stride: u64,
    /// Sup-norm distance between the last two elements of the subsequence.
    pub cauchy_defect: f64,
}

pub const DEFAULT_MAX_M: u64 = 100_000;
pub const DEFAULT_POWER_TOL: f64 = 1e-10;
/// Largest allowed phase defect of the stride.
const STRIDE_PHASE_TOL: f64 = 1e-9;
const MAX_DOUBLINGS: u32 = 62;

fn wrap(theta: f64) -> f64 {
    let t = num_traits::Euclid::rem_euclid(&theta, &TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Relative phases of the clusters that dominate `g^m` (largest modulus, longest chain).
fn dominant_phases(a: &Analysis, direction: Direction) -> Vec<f64> {
    let group = match direction {
        Direction::Forward => a.groups.last(),
        Direction::Backward => a.groups.first(),
    }
    .expect("at least one modulus group");
    let h = group.iter().map(|&i| a.es.eigenvalues[i].max_chain_length).max().unwrap_or(1);
    let dom: Vec<C64> =
        group.iter().filter(|&&i| a.es.eigenvalues[i].max_chain_length == h).map(|&i| a.es.eigenvalues[i].value).collect();
    let base = dom[0];
    dom.iter().skip(1).map(|z| (z / base).arg()).collect()
}

/// Smallest stride `s <= max_m` after which the dominant phases recur, with its defect.
fn find_stride(phases: &[f64], max_m: u64) -> (u64, f64) {
    let defect = |s: u64| phases.iter().map(|&t| wrap(t * s as f64).abs()).fold(0.0, f64::max);
    let mut best = (1, defect(1));
    for s in 1..=max_m.max(1) {
        let d = defect(s);
        if d <= STRIDE_PHASE_TOL {
            return (s, d);
        }
        if d < best.1 {
            best = (s, d);
        }
    }
    best
}

fn align_phase(b: &CMatrix, reference: &CMatrix) -> CMatrix {
    let mut ip = C64::new(0.0, 0.0);
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            ip += reference[(i, j)].conj() * b[(i, j)];
        }
    }
    if ip.norm() == 0.0 {
        b.clone()
    } else {
        b.scale((ip / ip.norm()).conj())
    }
}

/// Limit of `g^{+-m}` along the subsequence `m = s 2^p`, normalized projectively.
///
/// The stride `s` makes the phases of the dominant eigenvalues recur (pass `stride = 0`
/// to search `s <= max_m`); the exponent is then doubled by squaring until two
/// consecutive elements agree to `tol` in sup norm. Kernel and image are computed with
/// rank threshold `sqrt(tol)`.
pub fn power_limit(g: &SLMatrix, direction: Direction, stride: u64, max_m: u64, tol: f64, tols: &Tolerances) -> Result<PseudoProjectiveMap> {
    let a = analyse(g, tols)?;
    if a.class.kind == Kind::Elliptic && a.class.finite_order.is_some() {
        return Err(Error::WrongKind);
    }
    let (s, phase_defect) = if stride == 0 { find_stride(&dominant_phases(&a, direction), max_m) } else { (stride, 0.0) };
    if phase_defect > STRIDE_PHASE_TOL {
        return Err(Error::NoConvergenceWithinBudget { defect: phase_defect });
    }
    let base = match direction {
        Direction::Forward => g.matrix().clone(),
        Direction::Backward => g.inverse().into_matrix(),
    };
    let mut cur = base.pow_normalized(s, true).normalize_sup_norm();
    let mut exponent = s;
    let mut defect = f64::INFINITY;
    for _ in 0..MAX_DOUBLINGS {
        let sq = (&cur * &cur).normalize_sup_norm();
        let next = align_phase(&sq, &cur);
        defect = next.max_abs_diff(&cur);
        cur = next;
        exponent = exponent.saturating_mul(2);
        if defect <= tol {
            break;
        }
    }
    if !(defect <= tol) {
        return Err(Error::NoConvergenceWithinBudget { defect });
    }
    let matrix = cur.normalize_sup_entry();
    let (kernel, image) = kernel_image(&matrix, tol.sqrt());
    Ok(PseudoProjectiveMap { matrix, kernel, image, exponent, stride: s, cauchy_defect: defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::cr;
    use crate::linalg::{normalize_to_sl, subspace_distance};
    use alloc::vec;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn sl(m: &CMatrix) -> SLMatrix {
        normalize_to_sl(m, 1e-12).unwrap()
    }

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx)
    }

    fn union_is(set: &PointSet, want: &[Subspace]) -> bool {
        let u = set.as_union().expect("a union");
        u.same_as(&SubspaceUnion::new(u.ambient_dim(), want.to_vec()), 1e-10)
    }

    fn jb(n: usize) -> CMatrix {
        CMatrix::jordan_block(n, cr(1.0))
    }

    fn example(extra: usize) -> CMatrix {
        CMatrix::direct_sum(&[jb(2), jb(2), CMatrix::identity(extra)])
    }

    #[test]
    fn lambda_examples() {
        let g = sl(&CMatrix::real_diag(&[2.0, 1.0, 0.5]));
        let l = lambda_set(&g, &tols()).unwrap();
        assert!(union_is(&l, &[coord(3, &[0]), coord(3, &[1]), coord(3, &[2])]));
        let l = lambda_set(&sl(&jb(3)), &tols()).unwrap();
        assert!(union_is(&l, &[coord(3, &[0])]));
        assert!(lambda_set(&sl(&CMatrix::identity(3)), &tols()).unwrap().is_empty());
    }

    #[test]
    fn equicontinuity_examples() {
        let g = sl(&CMatrix::real_diag(&[2.0, 1.0, 0.5]));
        let e = equicontinuity_complement(&g, &tols()).unwrap();
        assert!(union_is(&e, &[coord(3, &[0, 1]), coord(3, &[1, 2])]));
        let e = equicontinuity_complement(&sl(&jb(3)), &tols()).unwrap();
        assert!(union_is(&e, &[coord(3, &[0, 1])]));
        let e = equicontinuity_complement(&sl(&example(2)), &tols()).unwrap();
        let u = e.as_union().unwrap();
        assert_eq!(u.projective_dims(), vec![3]);
        assert!(union_is(&e, &[coord(6, &[0, 2, 4, 5])]));
    }

    #[test]
    fn kulkarni_examples() {
        assert!(kulkarni_limit_set(&sl(&CMatrix::identity(3)), &tols()).unwrap().is_empty());
        let k = kulkarni_limit_set(&sl(&jb(3)), &tols()).unwrap();
        assert!(union_is(&k, &[coord(3, &[0, 1])]));
        let irr = CMatrix::diag(&[
            C64::from_polar(1.0, 1.0),
            C64::from_polar(1.0, 2f64.sqrt()),
            C64::from_polar(1.0, -1.0 - 2f64.sqrt()),
        ]);
        assert!(kulkarni_limit_set(&sl(&irr), &tols()).unwrap().is_whole_space());
    }

    #[test]
    fn maximal_region_examples() {
        let g = sl(&CMatrix::real_diag(&[4.0, 2.0, 1.0, 0.5, 0.125]));
        let (o1, o2) = maximal_regions(&g, &tols()).unwrap().unwrap();
        let want1 = SubspaceUnion::new(5, vec![coord(5, &[4]), coord(5, &[0, 1, 2])]);
        assert!(o1.complement.same_as(&want1, 1e-10));
        let want2 = SubspaceUnion::new(5, vec![coord(5, &[0]), coord(5, &[1, 2, 3, 4])]);
        assert!(o2.complement.same_as(&want2, 1e-10));
        assert!(maximal_regions(&sl(&CMatrix::real_diag(&[2.0, 1.0, 0.5])), &tols()).unwrap().is_none());
        assert!(maximal_regions(&sl(&jb(4)), &tols()).unwrap().is_none());
    }

    #[test]
    fn union_normalization_drops_contained_and_duplicates() {
        let u = SubspaceUnion::new(3, vec![coord(3, &[0]), coord(3, &[0, 1]), coord(3, &[1, 0]), coord(3, &[2])]);
        assert_eq!(u.len(), 2);
        assert_eq!(u.projective_dims(), vec![0, 1]);
    }

    #[test]
    fn power_limit_examples() {
        let t = tols();
        let g = sl(&CMatrix::real_diag(&[2.0, 1.0, 0.5]));
        let p = power_limit(&g, Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t).unwrap();
        assert!(p.matrix.max_abs_diff(&CMatrix::real_diag(&[1.0, 0.0, 0.0])) < 1e-10);
        assert!(subspace_distance(&p.kernel, &coord(3, &[1, 2])).unwrap().angle < 1e-10);

        let p = power_limit(&sl(&jb(3)), Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t).unwrap();
        assert_eq!(p.image.dim(), 1);
        assert!(subspace_distance(&p.image, &coord(3, &[0])).unwrap().angle < 1e-8);
        assert!(subspace_distance(&p.kernel, &coord(3, &[0, 1])).unwrap().angle < 1e-8);

        // the Example: limit is e_1 e_2^T + e_3 e_4^T
        let p = power_limit(&sl(&example(2)), Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t).unwrap();
        let mut want = CMatrix::zeros(6, 6);
        want[(0, 1)] = cr(1.0);
        want[(2, 3)] = cr(1.0);
        assert!(p.matrix.max_abs_diff(&want) < 1e-8);
        assert!(subspace_distance(&p.kernel, &coord(6, &[0, 2, 4, 5])).unwrap().angle < 1e-8);
        assert!(subspace_distance(&p.image, &coord(6, &[0, 2])).unwrap().angle < 1e-8);

        assert_eq!(
            power_limit(&sl(&CMatrix::identity(2)), Direction::Forward, 0, 10, 1e-10, &t).unwrap_err(),
            Error::WrongKind
        );
    }

    #[test]
    fn power_limit_stride_handles_rotating_dominant_pair() {
        // dominant eigenvalues 2 and 2i: the phases recur after 4 steps
        let g = sl(&CMatrix::diag(&[cr(2.0), C64::new(0.0, 2.0), cr(0.25)]));
        let p = power_limit(&g, Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &tols()).unwrap();
        assert_eq!(p.stride, 4);
        assert!(subspace_distance(&p.image, &coord(3, &[0, 1])).unwrap().angle < 1e-10);
        let irr = sl(&CMatrix::diag(&[cr(2.0), C64::from_polar(2.0, 1.0), cr(0.25)]));
        assert!(matches!(
            power_limit(&irr, Direction::Forward, 0, 1000, DEFAULT_POWER_TOL, &tols()),
            Err(Error::NoConvergenceWithinBudget { .. })
        ));
    }

    #[test]
    fn backward_limit_kernel_is_the_other_component() {
        let g = sl(&CMatrix::real_diag(&[2.0, 1.0, 0.5]));
        let p = power_limit(&g, Direction::Backward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &tols()).unwrap();
        assert!(subspace_distance(&p.kernel, &coord(3, &[0, 1])).unwrap().angle < 1e-10);
    }
}
