//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line for each;
//! exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use projdyn_core::classification::{classify, classify_pu, finite_order, Kind, DEFAULT_MAX_ORDER};
use projdyn_core::grassmann::{loxodromic_certificate, plucker_embed, subsets, wedge_power};
use projdyn_core::classification::PUClassification;
use projdyn_core::hermitian::{parabolic_form_family, selfcheck};
use projdyn_core::limit_sets::{
    equicontinuity_complement, kulkarni_limit_set, lambda_set, power_limit, Direction, PointSet, DEFAULT_MAX_M,
    DEFAULT_POWER_TOL,
};
use projdyn_core::linalg::matrix::{basis_vector, chordal, cr};
use projdyn_core::linalg::{eigenvalues, normalize_to_sl, subspace_distance, CMatrix, SLMatrix, Subspace, C64};
use projdyn_core::orbit::{foliation_check, hausdorff_to_union, orbit_accumulate_factored, FoliationKind, OrbitSettings};
use projdyn_core::sampling::{
    conjugated, distinct_moduli_normal_form, finite_order_elliptic, infinite_order_elliptic, random_matrix,
    random_of_kind, random_pu_element, random_vector, Sample,
};
use projdyn_core::Tolerances;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = (bool, String);

const KINDS: [Kind; 3] = [Kind::Elliptic, Kind::Parabolic, Kind::Loxodromic];

fn sl(m: &CMatrix) -> SLMatrix {
    normalize_to_sl(m, 1e-12).unwrap()
}

/// The item-1 battery: 200 elements per kind in SL(3) and SL(4), condition 1e3.
fn battery() -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut out = Vec::new();
    for n in [3, 4] {
        for kind in KINDS {
            for _ in 0..200 {
                out.push(random_of_kind(kind, n, 1e3, &mut rng));
            }
        }
    }
    out
}

fn union_of(p: PointSet) -> Option<projdyn_core::limit_sets::SubspaceUnion> {
    match p {
        PointSet::Union(u) => Some(u),
        _ => None,
    }
}

fn classification_by_construction(b: &[Sample]) -> Check {
    let t = Tolerances::default();
    let mut wrong = 0;
    let mut errors = 0;
    for s in b {
        match classify(&s.element, &t) {
            Ok(r) if r.kind == s.kind => {}
            Ok(_) => wrong += 1,
            Err(_) => errors += 1,
        }
    }
    (wrong + errors == 0, format!("{} elements, {} misclassified, {} errors", b.len(), wrong, errors))
}

fn orbit_oracle_agreement() -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let settings = OrbitSettings { step: 100_000, ..OrbitSettings::default() };
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for kind in [Kind::Loxodromic, Kind::Parabolic] {
        for i in 0..50 {
            let n = 3 + i % 2;
            let s = random_of_kind(kind, n, 1e3, &mut rng);
            let seeds: Vec<Vec<C64>> = (0..100).map(|_| random_vector(n, &mut rng)).collect();
            let lambda = match lambda_set(&s.element, &t).ok().and_then(union_of) {
                Some(u) => u,
                None => {
                    failures += 1;
                    continue;
                }
            };
            let run = orbit_accumulate_factored(&s.conjugator, &s.normal_form, &seeds, 500, &settings).unwrap();
            let d = hausdorff_to_union(&run.points(), &lambda).unwrap();
            worst = worst.max(d);
            if d > 1e-4 {
                failures += 1;
            }
        }
    }
    (failures == 0, format!("100 elements, worst Hausdorff angle {worst:.2e}, {failures} above 1e-4"))
}

fn equicontinuity_vs_power_limits() -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..50 {
        let n = 3 + i % 2;
        let s = conjugated(distinct_moduli_normal_form(n, &mut rng), Kind::Loxodromic, 1e3, &mut rng);
        let eq = equicontinuity_complement(&s.element, &t).ok().and_then(union_of);
        let fwd = power_limit(&s.element, Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t);
        let bwd = power_limit(&s.element, Direction::Backward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t);
        let (Some(eq), Ok(fwd), Ok(bwd)) = (eq, fwd, bwd) else {
            failures += 1;
            continue;
        };
        let kernels = [fwd.kernel, bwd.kernel];
        let mut ok = eq.len() == 2;
        for k in &kernels {
            let closest = eq
                .components()
                .iter()
                .map(|c| {
                    let d = subspace_distance(c, k).unwrap();
                    if d.dims_differ { f64::INFINITY } else { d.angle }
                })
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(closest);
            ok &= closest <= 1e-6;
        }
        if !ok {
            failures += 1;
        }
    }
    (failures == 0, format!("50 elements, {failures} mismatches, closest-match angle up to {worst:.2e}"))
}

/// Principal-angle distance of Plücker vectors (chordal, scale free).
fn hyperplane_distance(basis: &CMatrix, target: &[C64]) -> f64 {
    let n = basis.rows();
    let s = Subspace::span_with_dim(basis, n - 1);
    chordal(&plucker_embed(&s).unwrap(), target)
}

fn jordan_hyperplane_attraction() -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    let mut notes = Vec::new();
    let mut ok = true;
    for size in 3..=6 {
        let g = sl(&CMatrix::jordan_block(size, cr(1.0)));
        let idx: Vec<usize> = (0..size - 1).collect();
        let h = Subspace::coordinate(size, &idx);
        let target = plucker_embed(&h).unwrap();
        // random hyperplane avoiding [e1]: kernel of a functional f with f(e1) != 0
        let f = random_vector(size, &mut rng);
        let ell = Subspace::span_vectors(size, &[f.iter().map(|z| z.conj()).collect()], 1e-12).orthogonal_complement();
        assert!(!ell.contains_vector(&basis_vector(size, 0), 1e-6));
        let mut b = ell.basis().clone();
        let mut dists = Vec::with_capacity(1000);
        for _ in 0..1000 {
            b = Subspace::span_with_dim(&(g.matrix() * &b), size - 1).basis().clone();
            dists.push(hyperplane_distance(&b, &target));
        }
        let last = dists[999];
        let decreasing = dists[499..].windows(2).all(|w| w[1] < w[0]);
        let kul = kulkarni_limit_set(&g, &t).ok().and_then(union_of);
        let exact = kul.is_some_and(|u| {
            u.len() == 1 && u.components()[0].projector().max_abs_diff(&h.projector()) <= 1e-10
        });
        ok &= last < 1e-2 && decreasing && exact;
        notes.push(format!("size {size}: d(1000)={last:.2e} decreasing={decreasing} kulkarni={exact}"));
    }
    (ok, notes.join("; "))
}

fn quadric_families() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let mut failed = Vec::new();
    let mut worst: f64 = 0.0;
    for size in 2..=9 {
        let r = selfcheck(size, 1000, &mut rng).unwrap();
        worst = worst.max(r.intersection_max_residual);
        // independent recheck of e1 on every sampled quadric, in floating point
        let fam = parabolic_form_family(size).unwrap();
        let e1 = basis_vector(size, 0);
        let e1_float = [-10.0, -1.0, 0.0, 1.0, 10.0].iter().all(|&s| {
            let c = fam.at(s);
            projdyn_core::hermitian::quad(&c, &e1) == 0.0
        });
        let covered = r.covering_solved + r.covering_w_locus == r.samples;
        if !(r.all_pass() && e1_float && covered) {
            failed.push(size);
        }
    }
    (failed.is_empty(), format!("sizes 2..=9, failing sizes {failed:?}, intersection residual up to {worst:.2e}"))
}

fn multiset_gap(a: &[C64], b: &[C64]) -> f64 {
    let scale = a.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d / scale);
    }
    worst
}

fn wedge_spectra() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1006);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = random_matrix(5, 5, &mut rng);
        let ev = eigenvalues(&m).unwrap();
        for k in [2, 3] {
            let w = wedge_power(&m, k).unwrap();
            let products: Vec<C64> = subsets(5, k).iter().map(|s| s.iter().map(|&i| ev[i]).product()).collect();
            worst = worst.max(multiset_gap(&eigenvalues(&w.matrix).unwrap(), &products));
        }
    }
    (worst <= 1e-8, format!("200 wedge powers, worst relative gap {worst:.2e}"))
}

fn loxodromic_certificates(b: &[Sample]) -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1007);
    let mut cert_failures = 0;
    let mut slow = 0;
    let mut count = 0;
    let mut worst_iters = 0;
    for s in b.iter().filter(|s| s.kind == Kind::Loxodromic) {
        count += 1;
        let c = match loxodromic_certificate(&s.element, &t) {
            Ok(c) if c.contraction.margin > 0.0 => c,
            _ => {
                cert_failures += 1;
                continue;
            }
        };
        let n = s.element.n_plus_1();
        let d = c.dim();
        for _ in 0..50 {
            let mut plane = c.random_plane_in_ball(c.radius * rng.gen_range(0.0..1.0), &mut rng);
            let mut reached = None;
            for it in 1..=1000 {
                plane = Subspace::span_with_dim(&(s.element.matrix() * &plane), d).basis().clone();
                let dist = subspace_distance(&Subspace::from_orthonormal_columns(n, &plane), &c.attracting_subspace)
                    .unwrap()
                    .angle;
                if dist < 1e-8 {
                    reached = Some(it);
                    break;
                }
            }
            match reached {
                Some(it) => worst_iters = worst_iters.max(it),
                None => slow += 1,
            }
        }
    }
    (
        cert_failures == 0 && slow == 0,
        format!("{count} elements, {cert_failures} certificate failures, {slow} starts not converged, slowest {worst_iters} iterations"),
    )
}

fn witness_ok(g: &SLMatrix, p: &PUClassification) -> bool {
    let fixed = chordal(&g.matrix().mul_vec(&p.fixed_point_witness), &p.fixed_point_witness) <= 1e-6;
    let located = match p.kind {
        Kind::Elliptic => p.witness_form_value < 0.0,
        _ => p.witness_form_value.abs() <= 1e-6,
    };
    fixed && located
}

fn pu_coherence() -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1008);
    let mut notes = Vec::new();
    let mut ok = true;
    for (k, l) in [(1, 1), (1, 2), (2, 2)] {
        let mut agree = 0;
        let mut witnesses = 0;
        for _ in 0..100 {
            let kind = KINDS[rng.gen_range(0..3)];
            let g = sl(&random_pu_element(kind, k, l, &mut rng));
            let alg = classify(&g, &t).map(|r| r.kind);
            let ball = classify_pu(&g, k, l, &t);
            if let (Ok(a), Ok(b)) = (&alg, &ball) {
                if *a == b.kind {
                    agree += 1;
                }
                if witness_ok(&g, b) {
                    witnesses += 1;
                }
            }
        }
        ok &= agree == 100 && witnesses == 100;
        notes.push(format!("U({k},{l}): {agree}/100 agree, {witnesses}/100 witnesses located"));
    }
    (ok, notes.join("; "))
}

fn elliptic_foliations() -> Check {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for i in 0..50 {
        let n = 3 + i % 2;
        let s = random_of_kind(Kind::Elliptic, n, 1e3, &mut rng);
        match foliation_check(&s.element, &sl(&s.conjugator), FoliationKind::EllipticSpheres, 100, None, &t) {
            Ok(r) => worst = worst.max(r.max_leaf_drift),
            Err(_) => errors += 1,
        }
    }
    let mut dichotomy = 0;
    for i in 0..40 {
        let n = 3 + i % 2;
        let finite = i < 20;
        let s = if finite {
            finite_order_elliptic(n, rng.gen_range(2..=12), 1e3, &mut rng)
        } else {
            infinite_order_elliptic(n, 1e3, &mut rng)
        };
        let detected = finite_order(&s.element, DEFAULT_MAX_ORDER, &t).map(|f| f.order.is_some());
        let lam = lambda_set(&s.element, &t);
        let kul = kulkarni_limit_set(&s.element, &t);
        if let (Ok(det), Ok(lam), Ok(kul)) = (detected, lam, kul) {
            let sets_match = if det {
                lam.is_empty() && kul.is_empty()
            } else {
                lam.is_whole_space() && kul.is_whole_space()
            };
            if det == finite && sets_match {
                dichotomy += 1;
            }
        }
    }
    (
        worst <= 1e-9 && errors == 0 && dichotomy == 40,
        format!("50 elements, worst drift {worst:.2e}, {errors} errors; dichotomy {dichotomy}/40"),
    )
}

fn example_reproduction() -> Check {
    let t = Tolerances::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for size in 6..=8 {
        let j2 = CMatrix::jordan_block(2, cr(1.0));
        let m = CMatrix::direct_sum(&[j2.clone(), j2, CMatrix::identity(size - 4)]);
        let g = sl(&m);
        let eq = equicontinuity_complement(&g, &t).ok().and_then(union_of);
        let dims = eq.as_ref().map(|u| u.projective_dims()).unwrap_or_default();
        let not_hyperplane = !(dims.len() == 1 && dims[0] == size - 2);
        let rest: Vec<usize> = (4..size).collect();
        let mut ker_idx = vec![0, 2];
        ker_idx.extend(&rest);
        let kernel = Subspace::coordinate(size, &ker_idx);
        let image = Subspace::coordinate(size, &[0, 2]);
        let limit_ok = match power_limit(&g, Direction::Forward, 0, DEFAULT_MAX_M, DEFAULT_POWER_TOL, &t) {
            Ok(p) => {
                let dk = subspace_distance(&p.kernel, &kernel).unwrap();
                let di = subspace_distance(&p.image, &image).unwrap();
                !dk.dims_differ && !di.dims_differ && dk.angle <= 1e-8 && di.angle <= 1e-8
            }
            Err(_) => false,
        };
        ok &= not_hyperplane && limit_ok;
        notes.push(format!("{size}x{size}: eq complement projective dims {dims:?}, power limit kernel/image ok={limit_ok}"));
    }
    (ok, notes.join("; "))
}

fn main() -> ExitCode {
    let b = battery();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Check + '_>)> = vec![
        (1, "classification by construction", Box::new(|| classification_by_construction(&b))),
        (2, "orbit oracle vs accumulation set", Box::new(orbit_oracle_agreement)),
        (3, "equicontinuity complement vs power-limit kernels", Box::new(equicontinuity_vs_power_limits)),
        (4, "Jordan block hyperplane attraction", Box::new(jordan_hyperplane_attraction)),
        (5, "parabolic quadric families", Box::new(quadric_families)),
        (6, "wedge power spectra", Box::new(wedge_spectra)),
        (7, "loxodromic certificates", Box::new(|| loxodromic_certificates(&b))),
        (8, "PU(k,l) ball vs algebraic kind", Box::new(pu_coherence)),
        (9, "elliptic foliations and finite-order dichotomy", Box::new(elliptic_foliations)),
        (10, "Jordan2+Jordan2+identity example", Box::new(example_reproduction)),
    ];
    let mut failed = 0;
    for (id, name, run) in &criteria {
        let start = Instant::now();
        let (pass, detail) = run();
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {id:>2} {name} ({:.1}s): {detail}", start.elapsed().as_secs_f64());
        if !pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
