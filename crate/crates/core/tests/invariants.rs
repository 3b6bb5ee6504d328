//! Cross-module invariants: closed forms against the brute-force oracles,
//! algebraic identities on randomized inputs, and property tests of the
//! geometric primitives.

use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use paretax::conflict::{
    classify_capability, effective_angle, effective_angle_from_vectors, effective_angle_multi,
    equal_improvement, safety_safety_frontier, ConflictLabel, SafetyPair,
};
use paretax::frontier::{
    free_safety, frontier_safety, max_safety_constrained, optimal_delta_single, whiten, Budget,
};
use paretax::geometry::{principal_angle, tax_rate, CapabilitySet, Direction};
use paretax::oracle::{oracle_equal_improvement, oracle_max_safety, OracleConfig};
use paretax::scaling::sample_uniform_direction;

const RANK_TOL: f64 = 1e-10;

fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

#[test]
fn frontier_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xba77e21);
    let cfg = OracleConfig::new(512).unwrap();
    for _ in 0..200 {
        let d = rng.random_range(2..=32);
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let budget = uniform_in(&mut rng, 1e-3, 4.0);
        let delta_c = uniform_in(&mut rng, -budget, budget);
        let alpha = principal_angle(&v, &c).unwrap();

        let closed = frontier_safety(alpha, budget, delta_c).unwrap();
        let brute = oracle_max_safety(&v, &c, budget, delta_c, &cfg).unwrap();
        let tol = cfg.tolerance_bound(budget);
        assert!(brute <= closed + tol, "oracle exceeded the closed form");
        assert!(closed <= brute + tol, "closed form not attained");
    }
}

#[test]
fn optimal_delta_realizes_the_frontier_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0d617a);
    for _ in 0..300 {
        let d = rng.random_range(2..=32);
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let budget = uniform_in(&mut rng, 1e-3, 4.0);
        let delta_c = uniform_in(&mut rng, -budget, budget);
        let alpha = principal_angle(&v, &c).unwrap();

        let delta = optimal_delta_single(&v, &c, budget, delta_c).unwrap();
        assert!((delta.norm() - budget).abs() < 1e-10, "budget saturation");
        assert!((c.coords().dot(delta.delta()) - delta_c).abs() < 1e-10);
        let want = frontier_safety(alpha, budget, delta_c).unwrap();
        assert!((v.coords().dot(delta.delta()) - want).abs() < 1e-10);
    }
}

#[test]
fn constrained_max_reduces_to_the_single_capability_frontier() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e2);
    for _ in 0..300 {
        let d = rng.random_range(2..=32);
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let budget = uniform_in(&mut rng, 1e-3, 4.0);
        let delta_c = uniform_in(&mut rng, -budget, budget);
        let alpha = principal_angle(&v, &c).unwrap();

        let set = CapabilitySet::from_directions(vec![c.clone()], RANK_TOL).unwrap();
        let target = c.coords() * delta_c;
        let got = max_safety_constrained(&v, &set, &target, budget).unwrap();
        let want = frontier_safety(alpha, budget, delta_c).unwrap();
        assert!((got.delta_s_max - want).abs() < 1e-10);
    }
}

#[test]
fn free_safety_agrees_with_the_unconstrained_max() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf2ee);
    for _ in 0..200 {
        let d = rng.random_range(3..=24);
        let m = rng.random_range(1..=d.min(6) - 1);
        let v = sample_uniform_direction(d, &mut rng);
        let members: Vec<Direction> = (0..m)
            .map(|_| sample_uniform_direction(d, &mut rng))
            .collect();
        let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
        let budget = uniform_in(&mut rng, 1e-3, 4.0);

        let tau = tax_rate(&v, &set).unwrap().joint_tax;
        let zero = DVector::zeros(d);
        let got = max_safety_constrained(&v, &set, &zero, budget).unwrap();
        assert!((got.delta_s_max - free_safety(tau, budget)).abs() < 1e-10);
    }
}

#[test]
fn positive_subsidy_beats_the_residual_free_amount() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b51d);
    let mut kept = 0;
    while kept < 150 {
        let d = rng.random_range(3..=24);
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let set = CapabilitySet::from_directions(vec![c.clone()], RANK_TOL).unwrap();
        let budget = uniform_in(&mut rng, 0.5, 4.0);
        let scale = uniform_in(&mut rng, -0.9, 0.9) * budget;
        let target = c.coords() * scale;

        let got = max_safety_constrained(&v, &set, &target, budget).unwrap();
        if got.subsidy <= 1e-8 {
            continue;
        }
        kept += 1;
        let tau = tax_rate(&v, &set).unwrap().joint_tax;
        let floor = got.residual_budget * (1.0 - tau).max(0.0).sqrt();
        assert!(
            got.delta_s_max > floor,
            "subsidy {} failed to beat the floor",
            got.subsidy
        );
        assert!((got.delta_s_max - floor - got.subsidy).abs() < 1e-10);
    }
}

#[test]
fn doubling_oracle_resolution_at_least_halves_the_worst_gap() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a9);
    let instances: Vec<(Direction, Direction, f64, f64)> = (0..100)
        .map(|_| {
            let d = rng.random_range(2..=16);
            let v = sample_uniform_direction(d, &mut rng);
            let c = sample_uniform_direction(d, &mut rng);
            let budget = uniform_in(&mut rng, 0.1, 4.0);
            let delta_c = uniform_in(&mut rng, -budget, budget);
            (v, c, budget, delta_c)
        })
        .collect();

    let worst_gap = |resolution: usize| -> f64 {
        let cfg = OracleConfig::new(resolution).unwrap();
        instances
            .iter()
            .map(|(v, c, budget, delta_c)| {
                let alpha = principal_angle(v, c).unwrap();
                let closed = frontier_safety(alpha, *budget, *delta_c).unwrap();
                let brute = oracle_max_safety(v, c, *budget, *delta_c, &cfg).unwrap();
                closed - brute
            })
            .fold(0.0, f64::max)
    };

    let coarse = worst_gap(256);
    let fine = worst_gap(512);
    assert!(
        fine <= coarse / 2.0 + 1e-12,
        "coarse {coarse:e}, fine {fine:e}"
    );
}

#[test]
fn constrained_oracle_converges_from_below() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0a);
    let instances: Vec<(Direction, CapabilitySet, DVector<f64>, f64)> = (0..60)
        .map(|_| {
            let d = rng.random_range(4..=16);
            let m = rng.random_range(1..=3);
            let v = sample_uniform_direction(d, &mut rng);
            let members: Vec<Direction> = (0..m)
                .map(|_| sample_uniform_direction(d, &mut rng))
                .collect();
            let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
            let budget = uniform_in(&mut rng, 0.2, 4.0);
            let probe = sample_uniform_direction(d, &mut rng);
            let in_span = set.project(&probe).unwrap();
            let target = if in_span.norm() > 1e-9 {
                in_span.normalize() * (0.8 * budget * rng.random::<f64>())
            } else {
                DVector::zeros(d)
            };
            (v, set, target, budget)
        })
        .collect();

    let worst_gap = |resolution: usize| -> f64 {
        let cfg = OracleConfig::new(resolution).unwrap();
        instances
            .iter()
            .map(|(v, set, target, budget)| {
                let closed = max_safety_constrained(v, set, target, *budget)
                    .unwrap()
                    .delta_s_max;
                let brute =
                    paretax::oracle::oracle_max_safety_constrained(v, set, target, *budget, &cfg)
                        .unwrap();
                let tol = cfg.tolerance_bound(*budget);
                assert!(brute <= closed + tol, "oracle exceeded the closed form");
                assert!(closed <= brute + tol, "closed form not attained");
                closed - brute
            })
            .fold(0.0, f64::max)
    };

    let coarse = worst_gap(128);
    let fine = worst_gap(256);
    assert!(
        fine <= coarse / 2.0 + 1e-12,
        "coarse {coarse:e}, fine {fine:e}"
    );
}

#[test]
fn equal_improvement_matches_its_bisection_oracle() {
    let cfg = OracleConfig::new(1024).unwrap();
    for k in 0..=64 {
        let theta = std::f64::consts::PI * k as f64 / 64.0;
        let closed = equal_improvement(theta);
        let brute = oracle_equal_improvement(theta, &cfg);
        assert!((closed - brute).abs() < 1e-9, "theta {theta}");
    }
}

#[test]
fn safety_frontier_recursion_is_pointwise_identical() {
    for &theta in &[
        0.0,
        0.3,
        std::f64::consts::FRAC_PI_2,
        2.2,
        std::f64::consts::PI,
    ] {
        for k in 0..=2000 {
            let s2 = -1.0 + 2.0 * k as f64 / 2000.0;
            let conflict_path = safety_safety_frontier(theta, s2).unwrap();
            let frontier_path = frontier_safety(theta, 1.0, s2).unwrap();
            assert!(
                (conflict_path - frontier_path).abs() < 1e-12,
                "theta {theta}, s2 {s2}"
            );
        }
    }
}

#[test]
fn partial_correlation_stays_inside_unit_range_for_real_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xabc1);
    for _ in 0..2000 {
        let d = rng.random_range(3..=16);
        let v1 = sample_uniform_direction(d, &mut rng);
        let v2 = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let rho = v1.dot(&v2).unwrap();
        let a = c.dot(&v1).unwrap();
        let b = c.dot(&v2).unwrap();
        let raw = (rho - a * b) / ((1.0 - a * a) * (1.0 - b * b)).sqrt();
        assert!(
            raw.abs() <= 1.0 + 1e-9,
            "unclamped partial correlation {raw}"
        );
        let got = effective_angle(rho, a, b).unwrap();
        assert!(got.cos_theta.abs() <= 1.0);
    }
}

#[test]
fn opposite_sign_projections_improve_nonnegative_correlations() {
    // The opposite-sign guarantee C(c) > rho holds whenever rho >= 0; the
    // exact validity region is rho * (1 - D) > a*b with
    // D = sqrt((1-a^2)(1-b^2)), which the second assertion pins down.
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a6a);
    let mut checked = 0;
    for _ in 0..30000 {
        let d = rng.random_range(3..=16);
        let v1 = sample_uniform_direction(d, &mut rng);
        let v2 = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let rho = v1.dot(&v2).unwrap();
        let a = c.dot(&v1).unwrap();
        let b = c.dot(&v2).unwrap();
        if a * b >= 0.0 {
            continue;
        }
        let got = classify_capability(rho, a, b).unwrap();
        assert_eq!(got.label, ConflictLabel::OppositeSign);

        if rho >= 0.0 {
            checked += 1;
            assert!(
                got.effective_corr > rho,
                "rho {rho}, a {a}, b {b}, C {}",
                got.effective_corr
            );
        }
        let margin = rho * (1.0 - ((1.0 - a * a) * (1.0 - b * b)).sqrt()) - a * b;
        if margin.abs() > 1e-9 {
            assert_eq!(
                got.effective_corr > rho,
                margin > 0.0,
                "validity region mismatch at rho {rho}, a {a}, b {b}"
            );
        }
    }
    assert!(checked > 3000, "too few opposite-sign nonnegative cases");
}

#[test]
fn symmetric_projections_never_improve_the_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2b2b);
    for _ in 0..2000 {
        let d = rng.random_range(3..=16);
        let v1 = sample_uniform_direction(d, &mut rng);
        let v2 = sample_uniform_direction(d, &mut rng);
        let rho = v1.dot(&v2).unwrap();
        let midline = v1.coords() + v2.coords();
        if midline.norm() < 1e-2 {
            continue;
        }
        let midline = midline.normalize();
        // Orthonormal frame of span(v1, v2) for a clean complement draw.
        let second = v2.coords() - v1.coords() * rho;
        if second.norm() < 1e-6 {
            continue;
        }
        let second = second.normalize();
        let mut ortho = sample_uniform_direction(d, &mut rng).coords().clone();
        for basis in [v1.coords(), &second] {
            let along = ortho.dot(basis);
            ortho -= basis * along;
        }
        if ortho.norm() < 1e-6 {
            continue;
        }
        let ortho = ortho.normalize();
        // Mixing the midline with the complement direction projects equally
        // onto both safeties.
        let mix = uniform_in(&mut rng, -0.95, 0.95);
        let c = Direction::from_vector(midline * mix + ortho * (1.0 - mix * mix).sqrt()).unwrap();

        let a = c.dot(&v1).unwrap();
        let b = c.dot(&v2).unwrap();
        assert!((a - b).abs() < 1e-10, "construction should give a = b");
        let symmetric = 0.5 * (a + b);
        let got = effective_angle(rho, symmetric, symmetric).unwrap();
        assert!(got.cos_theta <= rho + 1e-12);
    }
}

#[test]
fn multi_capability_angle_matches_the_direct_complement_computation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3c3c);
    for _ in 0..300 {
        let d = rng.random_range(4..=64);
        let m = rng.random_range(1..=8.min(d - 2));
        let v1 = sample_uniform_direction(d, &mut rng);
        let v2 = sample_uniform_direction(d, &mut rng);
        let members: Vec<Direction> = (0..m)
            .map(|_| sample_uniform_direction(d, &mut rng))
            .collect();
        let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
        let pair = SafetyPair::new(v1.clone(), v2.clone()).unwrap();

        let via_basis = effective_angle_multi(&pair, &set).unwrap();
        let r1 = set.complement(&v1).unwrap();
        let r2 = set.complement(&v2).unwrap();
        let direct = r1.dot(&r2) / (r1.norm() * r2.norm());
        assert!(
            (via_basis.cos_theta - direct).abs() < 1e-10,
            "d {d}, m {m}: {} vs {direct}",
            via_basis.cos_theta
        );
    }
}

#[test]
fn scalar_and_vector_paths_agree_for_one_capability() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1f1f);
    for _ in 0..200 {
        let d = rng.random_range(3..=16);
        let v1 = sample_uniform_direction(d, &mut rng);
        let v2 = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let scalar = effective_angle_from_vectors(&v1, &v2, &c).unwrap();
        let set = CapabilitySet::from_directions(vec![c], RANK_TOL).unwrap();
        let pair = SafetyPair::new(v1, v2).unwrap();
        let multi = effective_angle_multi(&pair, &set).unwrap();
        assert!((scalar.cos_theta - multi.cos_theta).abs() < 1e-12);
    }
}

#[test]
fn scalar_fisher_whitening_matches_isotropic_at_adjusted_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d4d);
    for &scale in &[0.25, 1.0, 9.0] {
        let d = 6;
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let budget_radius = 1.7;
        let fisher = nalgebra::DMatrix::identity(d, d) * scale;
        let budget = Budget::anisotropic(budget_radius, fisher).unwrap();

        let whitened = whiten(&budget, &[v.clone(), c.clone()]).unwrap();
        let adjusted = budget_radius / scale.sqrt();
        assert!((whitened.diagnostics.raw_radius_min - adjusted).abs() < 1e-10);

        let alpha_white =
            principal_angle(&whitened.directions[0], &whitened.directions[1]).unwrap();
        let alpha_raw = principal_angle(&v, &c).unwrap();
        assert!((alpha_white - alpha_raw).abs() < 1e-10);

        for k in 0..=16 {
            let delta_c = adjusted * (2.0 * k as f64 / 16.0 - 1.0);
            let from_white = frontier_safety(alpha_white, adjusted, delta_c).unwrap();
            let from_raw = frontier_safety(alpha_raw, adjusted, delta_c).unwrap();
            assert!((from_white - from_raw).abs() < 1e-10);
        }

        let set_white =
            CapabilitySet::from_directions(vec![whitened.directions[1].clone()], RANK_TOL).unwrap();
        let set_raw = CapabilitySet::from_directions(vec![c.clone()], RANK_TOL).unwrap();
        let tau_white = tax_rate(&whitened.directions[0], &set_white)
            .unwrap()
            .joint_tax;
        let tau_raw = tax_rate(&v, &set_raw).unwrap().joint_tax;
        assert!((tau_white - tau_raw).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tax_is_invariant_under_change_of_generating_set(
        seed in any::<u64>(),
        m in 2usize..=4,
        d in 6usize..=16,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members: Vec<Direction> =
            (0..m).map(|_| sample_uniform_direction(d, &mut rng)).collect();
        let set_a = CapabilitySet::from_directions(members.clone(), RANK_TOL).unwrap();
        prop_assume!(set_a.rank() == m);

        // Prefix sums are an invertible recombination of the generators.
        let mut acc = DVector::zeros(d);
        let mut recombined = Vec::with_capacity(m);
        for c in &members {
            acc += c.coords();
            prop_assume!(acc.norm() > 1e-3);
            recombined.push(Direction::from_vector(acc.clone()).unwrap());
        }
        let set_b = CapabilitySet::from_directions(recombined, RANK_TOL).unwrap();
        prop_assume!(set_b.rank() == m);

        let v = sample_uniform_direction(d, &mut rng);
        let tau_a = tax_rate(&v, &set_a).unwrap().joint_tax;
        let tau_b = tax_rate(&v, &set_b).unwrap().joint_tax;
        prop_assert!((tau_a - tau_b).abs() < 1e-9);
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), m in 1usize..=5, d in 3usize..=24) {
        prop_assume!(m < d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members: Vec<Direction> =
            (0..m).map(|_| sample_uniform_direction(d, &mut rng)).collect();
        let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
        let v = sample_uniform_direction(d, &mut rng);
        let once = set.project(&v).unwrap();
        let twice = set.project_vector(&once).unwrap();
        prop_assert!((&twice - &once).norm() < 1e-10);
    }

    #[test]
    fn pythagoras_and_tax_range(seed in any::<u64>(), m in 1usize..=6, d in 3usize..=24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members: Vec<Direction> =
            (0..m).map(|_| sample_uniform_direction(d, &mut rng)).collect();
        let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
        let v = sample_uniform_direction(d, &mut rng);
        let report = tax_rate(&v, &set).unwrap();
        prop_assert!((0.0..=1.0).contains(&report.joint_tax));
        let projected = set.project(&v).unwrap();
        let residual = v.coords() - &projected;
        prop_assert!(
            (projected.norm_squared() + residual.norm_squared() - 1.0).abs() < 1e-10
        );
        prop_assert!(
            (report.free_safety_fraction.powi(2) + report.joint_tax - 1.0).abs() < 1e-10
        );
    }

    #[test]
    fn orthonormal_capabilities_make_the_tax_additive(
        seed in any::<u64>(),
        m in 1usize..=6,
        d in 8usize..=24,
    ) {
        prop_assume!(m < d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Gram-Schmidt on uniform draws gives an orthonormal set.
        let mut members: Vec<Direction> = Vec::with_capacity(m);
        for _ in 0..m {
            let mut raw = sample_uniform_direction(d, &mut rng).coords().clone();
            for b in &members {
                let along = raw.dot(b.coords());
                raw -= b.coords() * along;
            }
            prop_assume!(raw.norm() > 1e-6);
            members.push(Direction::from_vector(raw).unwrap());
        }
        let set = CapabilitySet::from_directions(members, RANK_TOL).unwrap();
        let v = sample_uniform_direction(d, &mut rng);
        let report = tax_rate(&v, &set).unwrap();
        let sum: f64 = report.per_task.iter().map(|&(_, t)| t).sum();
        prop_assert!((report.joint_tax - sum).abs() < 1e-10);
    }

    #[test]
    fn curve_points_respect_the_budget(
        alpha in 0.0..std::f64::consts::PI,
        budget in 1e-3f64..4.0,
        n in 2usize..64,
    ) {
        let curve = frontier_curve_checked(alpha, budget, n)?;
        for p in &curve {
            prop_assert!(p.0.abs() <= budget + 1e-12);
            prop_assert!(p.1 <= budget + 1e-12);
        }
    }
}

fn frontier_curve_checked(
    alpha: f64,
    budget: f64,
    n: usize,
) -> Result<Vec<(f64, f64)>, TestCaseError> {
    let curve = paretax::frontier::frontier_curve(alpha, budget, n)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    Ok(curve
        .points
        .iter()
        .map(|p| (p.delta_c, p.delta_s))
        .collect())
}
