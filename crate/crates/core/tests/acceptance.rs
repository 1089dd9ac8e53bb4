//! End-to-end acceptance checks. Each test prints one summary line so a full
//! run reads as a checklist.

use std::path::PathBuf;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hypercode::code::{
    code_from_entries, entries_only_code, extremal_three_ball_entries, from_spherical,
    prune_antipodal, random_feasible_entries, verify_strict, xi_directions, Entry, SphericalCode,
};
use hypercode::halfspace::{descriptor, pair_condition};
use hypercode::io;
use hypercode::lattice::{check_family, find_pq, random_lattice, FamilyOutcome};
use hypercode::lorentz::{angle, angle_at_least_right, inner, AngleResult, LorentzVector};
use hypercode::phi0;
use hypercode::report::Verdict;
use hypercode::search::{
    extremal_config, lemma61_grid, lemma61_max, search_code, SearchParams,
};
use hypercode::tol::Tolerances;
use hypercode::bounds::{csw_rate, kl_rate, r_bounds};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn tol() -> Tolerances {
    Tolerances::default()
}

#[test]
fn criterion_1_three_ball_angle_maximum() {
    let start = Instant::now();
    let cells = lemma61_grid(50, 32, 0).unwrap();
    let best = cells
        .iter()
        .max_by(|a, b| a.max_cos.total_cmp(&b.max_cos))
        .unwrap();
    for cell in &cells {
        assert!(
            cell.max_cos <= 0.75 + 1e-6,
            "cell ({}, {}) exceeds the ceiling: {}",
            cell.d1,
            cell.d2,
            cell.max_cos
        );
    }
    assert!((best.max_cos - 0.75).abs() <= 1e-6, "max {}", best.max_cos);
    let refined = lemma61_max(best.d1, best.d2, 32, 0).unwrap();
    assert!((refined.max_cos - 0.75).abs() <= 1e-6);
    let dist = refined.argmax.distance(&extremal_config());
    assert!(dist <= 1e-4, "argmax off by {dist}");
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "took {secs:.1} s");
    println!("criterion 1 (three-ball angle maximum 3/4, sharp): pass [{secs:.1} s]");
}

#[test]
fn criterion_2_shipped_three_ball_certificate() {
    let start = Instant::now();
    let code = io::load_code(&fixture("remark62.json")).unwrap();
    let report = verify_strict(&code, &tol()).unwrap();
    assert_eq!(report.size, 3);
    assert!(report.strict);
    let mut angles: Vec<f64> = report
        .pairs
        .iter()
        .map(|p| {
            angle(&code.vectors[p.i], &code.vectors[p.j], 1e-9)
                .unwrap()
                .angle()
                .expect("intersecting boundaries")
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    let expected = [
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI,
        std::f64::consts::PI,
    ];
    for (a, e) in angles.iter().zip(expected) {
        assert!((a - e).abs() <= 1e-8, "angle {a} vs {e}");
    }
    for p in &report.pairs {
        assert_eq!(p.verdict, Verdict::Marginal, "pair ({}, {})", p.i, p.j);
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 1.0, "took {secs:.2} s");
    println!("criterion 2 (tangent/orthogonal three-ball certificate): pass [{secs:.2} s]");
}

#[test]
fn criterion_3_entry_feasibility_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..1000 {
        let n = 2 + trial % 3;
        let m = if n == 2 { 2 } else { 2 + trial % 2 };
        let entries = random_feasible_entries(&mut rng, n, m);
        assert!(entries.len() >= 2, "generator stalled at trial {trial}");
        let code = entries_only_code(&entries, n, &tol()).unwrap();
        let report = verify_strict(&code, &tol()).unwrap();
        assert!(
            report.strict,
            "feasible trial {trial} (n {n}) failed: {:?}",
            report.failing_pairs()
        );

        // Pull entry 1 inside the orthogonality radius of entry 0.
        let mut bad = entries.clone();
        let gap: Vec<f64> = bad[1]
            .z
            .iter()
            .zip(&bad[0].z)
            .map(|(a, b)| a - b)
            .collect();
        let dist = gap.iter().map(|x| x * x).sum::<f64>().sqrt();
        let target = 0.9 * (bad[0].d * bad[0].d + bad[1].d * bad[1].d).sqrt();
        bad[1].z = bad[0]
            .z
            .iter()
            .zip(&gap)
            .map(|(b, g)| b + g * target / dist)
            .collect();
        let code = entries_only_code(&bad, n, &tol()).unwrap();
        let report = verify_strict(&code, &tol()).unwrap();
        assert!(
            report.failing_pairs().contains(&(0, 1)),
            "perturbed trial {trial} (n {n}) still verifies"
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 120.0, "took {secs:.1} s");
    println!("criterion 3 (1000 feasible certify + 1000 perturbed fail): pass [{secs:.1} s]");
}

#[test]
fn criterion_4_right_angle_route_agreement() {
    let start = Instant::now();
    let band = 1e-7;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    let mut sampled = 0;
    while checked < 10_000 {
        sampled += 1;
        assert!(sampled < 200_000, "rejection rate too high");
        let n = 2 + sampled % 3;
        let dim = n - 1;
        let mk = |rng: &mut ChaCha8Rng| {
            let z: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let d = rng.gen_range(0.2..2.0f64);
            Entry::new(z, d)
        };
        let (e1, e2) = (mk(&mut rng), mk(&mut rng));
        let code = entries_only_code(&[e1, e2], n, &tol()).unwrap();
        let (w1, w2) = (&code.vectors[0], &code.vectors[1]);

        // Route 1: analytic inequality pair.
        let rep = angle_at_least_right(w1, w2, band).unwrap();
        if rep.cond_iii == Verdict::Marginal {
            continue;
        }
        let analytic = rep.cond_iii.passes();

        // Route 2: nonpositivity of the form on a cone grid. The vectors
        // are unit-normalized first (the condition is scale-invariant), so
        // a failing wedge peaks on the grid diagonal and the grid decides.
        let u1 = w1.normalize_negative(1e-12).unwrap();
        let u2 = w2.normalize_negative(1e-12).unwrap();
        let beta = inner(&u1, &u2).unwrap();
        if beta.abs() <= band {
            continue;
        }
        let mut grid_ok = beta >= 0.0;
        let mut marginal = false;
        for ai in 0..=100 {
            for bi in 0..=100 {
                if ai == 0 && bi == 0 {
                    continue; // the cone apex is identically zero
                }
                let (a, b) = (ai as f64 * 0.1, bi as f64 * 0.1);
                let v = -a * a + 2.0 * a * b * beta - b * b;
                if v.abs() <= band * (a * a + b * b).max(1.0) {
                    marginal = true;
                } else if v > 0.0 {
                    grid_ok = false;
                }
            }
        }
        if marginal {
            continue;
        }

        // Route 3: the dihedral-angle formula.
        let ang = angle(w1, w2, band).unwrap();
        let angle_ok = match ang {
            AngleResult::Angle(t) => {
                let c = t.cos();
                if c.abs() <= band || (c.abs() - 1.0).abs() <= band {
                    continue;
                }
                t >= std::f64::consts::FRAC_PI_2
            }
            AngleResult::Disjoint => false,
        };

        // Route 4: the center-distance window of the descriptors.
        let (d1, d2) = (
            descriptor(w1, 1e-12).unwrap(),
            descriptor(w2, 1e-12).unwrap(),
        );
        let pair = pair_condition(&d1, &d2, band).unwrap();
        if pair.verdict() == Verdict::Marginal {
            continue;
        }
        let window_ok = pair.verdict().passes();

        assert_eq!(analytic, grid_ok, "analytic vs grid at sample {sampled}");
        assert_eq!(analytic, angle_ok, "analytic vs angle at sample {sampled}");
        assert_eq!(analytic, window_ok, "analytic vs window at sample {sampled}");
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "took {secs:.1} s");
    println!("criterion 4 (10000 pairs, four right-angle routes agree): pass [{secs:.1} s]");
}

#[test]
fn criterion_5_spherical_construction_and_direction_closure() {
    let start = Instant::now();
    let sc = io::load_spherical(&fixture("spherical_2pi3.json")).unwrap();
    let entries = from_spherical(&sc, &tol()).unwrap();
    let d_expected = 1.5f64.sqrt();
    for e in &entries {
        assert!((e.d - d_expected).abs() <= 1e-9, "d {} vs sqrt(3/2)", e.d);
    }
    let code = code_from_entries(&entries, 3, &tol()).unwrap();
    let report = verify_strict(&code, &tol()).unwrap();
    assert!(report.strict);
    assert!(report.size >= 3, "size {}", report.size);

    // Direction closure: every certified entry set in this suite maps back
    // to a spherical code with min angle >= phi0.
    let floor = phi0() - 1e-8;
    let mut sets: Vec<Vec<Entry>> = vec![entries, extremal_three_ball_entries()];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..200 {
        let n = 2 + trial % 3;
        let m = if n == 2 { 2 } else { 3 };
        sets.push(random_feasible_entries(&mut rng, n, m));
    }
    for (k, set) in sets.iter().enumerate() {
        if set.len() < 2 {
            continue;
        }
        let n = set[0].z.len() + 1;
        let report = verify_strict(&entries_only_code(set, n, &tol()).unwrap(), &tol()).unwrap();
        assert!(report.strict, "set {k} not certified");
        if set.len() < 3 {
            continue; // one direction, no pairwise angle
        }
        let dirs = xi_directions(set).unwrap();
        let (lo, _) = dirs.observed_angles();
        assert!(lo >= floor, "set {k}: direction angle {lo} < phi0");
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "took {secs:.1} s");
    println!("criterion 5 (2pi/3 construction, directions stay >= phi0): pass [{secs:.1} s]");
}

#[test]
fn criterion_6_dimension_three_sandwich() {
    let start = Instant::now();
    let report = r_bounds(3, None).unwrap();
    assert!(report.lower.unwrap() >= 3, "lower {:?}", report.lower);
    assert!(report.upper.unwrap() <= 10, "upper {:?}", report.upper);
    for seed in 0..10u64 {
        let params = SearchParams {
            budget: 1_000_000,
            seed,
            restarts: 2,
            ..SearchParams::default()
        };
        let outcome = search_code(3, 11, &params, &tol()).unwrap();
        if let Some(m) = outcome.certified_size {
            assert!(m <= 10, "seed {seed} certified {m} > 10");
        }
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 600.0, "took {secs:.1} s");
    println!("criterion 6 (3 <= R_3(pi/2) <= 10, search never beats 10): pass [{secs:.1} s]");
}

#[test]
fn criterion_7_rate_identities() {
    let p0 = phi0();
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let c = kl_rate(p0).unwrap().value;
    assert!(rel(c, 2.0f64.powf(0.901)) <= 1e-12, "c(phi0) {c}");
    let r = csw_rate(2.0 * p0).unwrap();
    assert!(rel(r, 8.0 / (3.0 * 7.0f64.sqrt())) <= 1e-12, "1/sin(2 phi0) {r}");
    let s2 = 2.0 * p0.sin().powi(2);
    let half = ((std::f64::consts::PI - p0) / 2.0).sin().powi(2);
    assert!(rel(s2, 0.875) <= 1e-12);
    assert!(rel(half, 0.875) <= 1e-12);
    println!("criterion 7 (rate constants to 12 digits): pass");
}

#[test]
fn criterion_8_lattice_dichotomy() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut produced = 0;
    let mut attempts = 0;
    let (mut certificates, mut violations) = (0, 0);
    while produced < 1000 {
        attempts += 1;
        assert!(attempts < 100_000, "generator stalled");
        let rho = 2 + attempts % 5;
        let lat = random_lattice(&mut rng, rho, 2);
        if lat.classes.len() < 2 || lat.validate().is_err() {
            continue;
        }
        match check_family(&lat).unwrap() {
            FamilyOutcome::Certificate { pairs, .. } => {
                assert!(!pairs.is_empty());
                certificates += 1;
            }
            FamilyOutcome::Violation { combination, .. } => {
                assert!(combination.verify(), "inexact certificate");
                violations += 1;
            }
        }
        produced += 1;
    }
    assert!(certificates > 0 && violations > 0, "degenerate sample");

    // The headline pair (-2, 3, -3), cross-checked by brute force.
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let core = find_pq(&q(-2), &q(3), &q(-3)).unwrap();
    assert_eq!(core.p, BigInt::from(4));
    assert_eq!(core.q, BigInt::from(3));
    assert_eq!(core.e_squared, q(13));
    let brute = (1..=10i64)
        .find_map(|qq| {
            (1..=100i64).find_map(|pp| {
                let inside = q(pp) / q(qq) > q(3) / q(3) && q(pp) / q(qq) < q(3) / q(2);
                let pos = (q(pp) * q(-2) + q(qq) * q(3)).is_positive()
                    && (q(pp) * q(3) + q(qq) * q(-3)).is_positive()
                    && (q(pp * pp) * q(-2) + q(2 * pp * qq) * q(3) + q(qq * qq) * q(-3))
                        .is_positive();
                (inside && pos).then_some((pp, qq))
            })
        })
        .unwrap();
    assert_eq!(brute, (4, 3));

    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "took {secs:.1} s");
    println!(
        "criterion 8 (1000 lattice dichotomies, exact certificates): pass \
         [{certificates} certificates, {violations} violations, {secs:.1} s]"
    );
}

#[test]
fn criterion_9_antipodal_pruning_retention() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let floor = 2.0 * phi0();
    let ceiling = std::f64::consts::PI - phi0();
    for trial in 0..1000 {
        // Rejection-sample a code on S^2 with min angle 2 phi0; antipodes
        // are deliberately injected to exercise the conflict matching.
        let k = 2 + trial % 3;
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut guard = 0;
        while points.len() < k && guard < 50_000 {
            guard += 1;
            let p: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0f64)).collect();
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-3 {
                continue;
            }
            let p: Vec<f64> = p.iter().map(|x| x / norm).collect();
            let candidate = if !points.is_empty() && rng.gen_bool(0.4) {
                points[0].iter().map(|x| -x).collect::<Vec<f64>>()
            } else {
                p
            };
            let fits = points.iter().all(|q| {
                let c: f64 = candidate.iter().zip(q).map(|(a, b)| a * b).sum();
                c.clamp(-1.0, 1.0).acos() >= floor + 1e-6
            });
            if fits {
                points.push(candidate);
            }
        }
        let size = points.len();
        let sc = SphericalCode {
            points,
            min_angle: floor,
            max_angle: std::f64::consts::PI,
        };
        let pruned = prune_antipodal(&sc, &tol()).unwrap();
        assert!(
            pruned.points.len() >= size.div_ceil(2),
            "trial {trial}: kept {} of {size}",
            pruned.points.len()
        );
        let (lo, hi) = pruned.observed_angles();
        if pruned.points.len() >= 2 {
            assert!(lo >= floor - 1e-9, "trial {trial}: min angle {lo}");
            assert!(hi <= ceiling + 1e-9, "trial {trial}: max angle {hi}");
        }
    }
    println!("criterion 9 (1000 pruned codes keep >= half, capped angles): pass");
}
