//! Subcommand implementations: each one delegates to a library operation
//! and wraps the result in a report.

use indexmap::IndexMap;
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use paretax::conflict::{
    classify_capability, denormalize_gain, effective_angle_multi, equal_improvement,
    safety_safety_frontier, SafetyPair,
};
use paretax::frontier::{
    free_safety, frontier_curve, frontier_safety, max_safety_constrained, optimal_delta_single,
    whiten,
};
use paretax::geometry::{principal_angle, tax_rate};
use paretax::oracle::{
    oracle_equal_improvement, oracle_max_safety, oracle_max_safety_constrained, OracleConfig,
};
use paretax::scaling::{sample_uniform_direction, scaling_series};
use paretax::{CapabilitySet, Direction};

use crate::error::CliError;
use crate::problem::{hex_digest, Problem};
use crate::report::{write_csv, Report};

const AUDIT_DEFAULT_SEED: u64 = 0xa0d17;

#[derive(Debug, Serialize)]
struct TaxOptions {
    input_digest_of: String,
}

#[derive(Debug, Serialize)]
struct PerTaskTax {
    name: String,
    tau: f64,
    angle_radians: f64,
}

#[derive(Debug, Serialize)]
struct TaxResults {
    joint_tax: f64,
    free_safety_fraction: f64,
    free_safety_gain: f64,
    subspace_rank: usize,
    per_task: Vec<PerTaskTax>,
}

pub fn run_tax(problem: &Problem, output: Option<&std::path::Path>) -> Result<(), CliError> {
    let report = tax_rate(&problem.safety, &problem.capabilities)?;
    let per_task = report
        .per_task
        .iter()
        .map(|&(i, tau)| {
            Ok(PerTaskTax {
                name: problem.names[i].clone(),
                tau,
                angle_radians: principal_angle(
                    &problem.safety,
                    &problem.capabilities.directions()[i],
                )?,
            })
        })
        .collect::<Result<Vec<_>, paretax::Error>>()?;
    let results = TaxResults {
        joint_tax: report.joint_tax,
        free_safety_fraction: report.free_safety_fraction,
        free_safety_gain: free_safety(report.joint_tax, problem.budget.radius()),
        subspace_rank: problem.capabilities.rank(),
        per_task,
    };
    Report::new(
        "tax",
        TaxOptions {
            input_digest_of: "problem".into(),
        },
        problem.digest.clone(),
        None,
        results,
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct FrontierOptions {
    alpha_radians: f64,
    alpha_source: String,
    samples: usize,
    audit_resolution: Option<usize>,
}

#[derive(Debug, Serialize)]
struct CurvePoint {
    delta_c: f64,
    delta_s: f64,
}

#[derive(Debug, Serialize)]
struct OracleCheck {
    resolution: usize,
    max_gap: f64,
    tolerance_bound: f64,
    within_tolerance: bool,
}

#[derive(Debug, Serialize)]
struct FrontierResults {
    alpha_radians: f64,
    budget_radius: f64,
    peak: CurvePoint,
    free_safety: CurvePoint,
    points: Vec<CurvePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<OracleCheck>,
}

pub struct FrontierArgs<'a> {
    pub alpha: Option<f64>,
    pub alpha_from: Option<String>,
    pub samples: usize,
    pub audit_resolution: Option<usize>,
    pub csv: Option<&'a std::path::Path>,
    pub output: Option<&'a std::path::Path>,
}

/// Resolves the frontier angle from an explicit value or a named
/// capability; the index is present only in the named case.
fn resolve_alpha(
    problem: &Problem,
    alpha: Option<f64>,
    alpha_from: &Option<String>,
) -> Result<(f64, String, Option<usize>), CliError> {
    match (alpha, alpha_from) {
        (Some(a), None) => {
            if !(0.0..=std::f64::consts::PI).contains(&a) {
                return Err(CliError::Schema(format!(
                    "--alpha must be in [0, pi], got {a}"
                )));
            }
            Ok((a, "explicit".into(), None))
        }
        (None, Some(name)) => {
            let index = problem.capability_index(name)?;
            let a = principal_angle(&problem.safety, &problem.capabilities.directions()[index])?;
            Ok((a, format!("capability \"{name}\""), Some(index)))
        }
        _ => Err(CliError::Schema(
            "give exactly one of --alpha or --alpha-from".into(),
        )),
    }
}

pub fn run_frontier(problem: &Problem, args: FrontierArgs<'_>) -> Result<(), CliError> {
    let (alpha, alpha_source, capability_index) =
        resolve_alpha(problem, args.alpha, &args.alpha_from)?;
    let budget_radius = problem.budget.radius();
    let curve = frontier_curve(alpha, budget_radius, args.samples)?;

    let audit = match (args.audit_resolution, capability_index) {
        (Some(resolution), Some(capability_index)) => {
            let cfg = OracleConfig::new(resolution)?;
            let c = &problem.capabilities.directions()[capability_index];
            let max_gap = curve
                .points
                .iter()
                .map(|p| {
                    oracle_max_safety(&problem.safety, c, budget_radius, p.delta_c, &cfg)
                        .map(|brute| (p.delta_s - brute).abs())
                })
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let tolerance_bound = cfg.tolerance_bound(budget_radius);
            Some(OracleCheck {
                resolution,
                max_gap,
                tolerance_bound,
                within_tolerance: max_gap <= tolerance_bound,
            })
        }
        (Some(_), None) => {
            return Err(CliError::Schema(
                "--audit needs --alpha-from so the oracle has actual directions".into(),
            ))
        }
        (None, _) => None,
    };

    if let Some(path) = args.csv {
        write_csv(
            path,
            "delta_c,delta_s",
            curve.points.iter().map(|p| vec![p.delta_c, p.delta_s]),
        )?;
    }

    let results = FrontierResults {
        alpha_radians: alpha,
        budget_radius,
        peak: CurvePoint {
            delta_c: budget_radius * alpha.cos(),
            delta_s: budget_radius,
        },
        free_safety: CurvePoint {
            delta_c: 0.0,
            delta_s: frontier_safety(alpha, budget_radius, 0.0)?,
        },
        points: curve
            .points
            .iter()
            .map(|p| CurvePoint {
                delta_c: p.delta_c,
                delta_s: p.delta_s,
            })
            .collect(),
        audit,
    };
    Report::new(
        "frontier",
        FrontierOptions {
            alpha_radians: alpha,
            alpha_source,
            samples: args.samples,
            audit_resolution: args.audit_resolution,
        },
        problem.digest.clone(),
        None,
        results,
    )
    .emit(args.output)
}

#[derive(Debug, Serialize)]
struct OptimalDeltaOptions {
    capability: String,
    delta_c: f64,
}

#[derive(Debug, Serialize)]
struct OptimalDeltaResults {
    alpha_radians: f64,
    budget_radius: f64,
    delta: Vec<f64>,
    norm: f64,
    realized_delta_s: f64,
    realized_delta_c: f64,
    frontier_delta_s: f64,
}

pub fn run_optimal_delta(
    problem: &Problem,
    capability: &str,
    delta_c: f64,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let index = problem.capability_index(capability)?;
    let c = &problem.capabilities.directions()[index];
    let budget_radius = problem.budget.radius();
    let alpha = principal_angle(&problem.safety, c)?;
    let perturbation = optimal_delta_single(&problem.safety, c, budget_radius, delta_c)?;
    let results = OptimalDeltaResults {
        alpha_radians: alpha,
        budget_radius,
        delta: perturbation.delta().iter().copied().collect(),
        norm: perturbation.norm(),
        realized_delta_s: problem.safety.coords().dot(perturbation.delta()),
        realized_delta_c: c.coords().dot(perturbation.delta()),
        frontier_delta_s: frontier_safety(alpha, budget_radius, delta_c)?,
    };
    Report::new(
        "optimal-delta",
        OptimalDeltaOptions {
            capability: capability.to_owned(),
            delta_c,
        },
        problem.digest.clone(),
        None,
        results,
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct MaxSafetyOptions {
    target: IndexMap<String, f64>,
    audit_resolution: Option<usize>,
}

#[derive(Debug, Serialize)]
struct MaxSafetyResults {
    delta_s_max: f64,
    residual_budget: f64,
    subsidy: f64,
    free_safety_gain: f64,
    delta_c_star: Vec<f64>,
    optimizer: Vec<f64>,
    optimizer_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<OracleCheck>,
}

/// Parses `name=coef,name=coef` into per-capability coefficients.
pub fn parse_target(spec: &str) -> Result<IndexMap<String, f64>, CliError> {
    let mut out = IndexMap::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let (name, value) = part.split_once('=').ok_or_else(|| {
            CliError::Schema(format!("--target entry \"{part}\" is not name=coefficient"))
        })?;
        let coefficient: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad coefficient \"{value}\"")))?;
        out.insert(name.trim().to_owned(), coefficient);
    }
    Ok(out)
}

pub fn run_max_safety(
    problem: &Problem,
    target_spec: Option<&str>,
    audit_resolution: Option<usize>,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let target = match target_spec {
        Some(spec) => parse_target(spec)?,
        None => IndexMap::new(),
    };
    let mut delta_c_star = DVector::zeros(problem.dim);
    for (name, coefficient) in &target {
        let index = problem.capability_index(name)?;
        delta_c_star += problem.capabilities.directions()[index].coords() * *coefficient;
    }

    let budget_radius = problem.budget.radius();
    let result = max_safety_constrained(
        &problem.safety,
        &problem.capabilities,
        &delta_c_star,
        budget_radius,
    )?;
    let tau = tax_rate(&problem.safety, &problem.capabilities)?.joint_tax;

    let audit = match audit_resolution {
        Some(resolution) => {
            let cfg = OracleConfig::new(resolution)?;
            let brute = oracle_max_safety_constrained(
                &problem.safety,
                &problem.capabilities,
                &delta_c_star,
                budget_radius,
                &cfg,
            )?;
            let max_gap = (result.delta_s_max - brute).abs();
            let tolerance_bound = cfg.tolerance_bound(budget_radius);
            Some(OracleCheck {
                resolution,
                max_gap,
                tolerance_bound,
                within_tolerance: max_gap <= tolerance_bound,
            })
        }
        None => None,
    };

    let results = MaxSafetyResults {
        delta_s_max: result.delta_s_max,
        residual_budget: result.residual_budget,
        subsidy: result.subsidy,
        free_safety_gain: free_safety(tau, budget_radius),
        delta_c_star: delta_c_star.iter().copied().collect(),
        optimizer: result.optimizer.delta().iter().copied().collect(),
        optimizer_norm: result.optimizer.norm(),
        audit,
    };
    Report::new(
        "max-safety",
        MaxSafetyOptions {
            target,
            audit_resolution,
        },
        problem.digest.clone(),
        None,
        results,
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct ConflictOptions {
    samples: usize,
}

#[derive(Debug, Serialize)]
struct NormalizedPoint {
    s2: f64,
    s1: f64,
}

#[derive(Debug, Serialize)]
struct ConflictResults {
    rho: f64,
    cos_theta: f64,
    theta_radians: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    tilde_norms: (f64, f64),
    equal_improvement: f64,
    /// Raw-gain value of the equal-improvement point for each objective at
    /// full budget (no capability change target).
    equal_gains_raw: (f64, f64),
    curve: Vec<NormalizedPoint>,
}

pub fn run_conflict(
    problem: &Problem,
    samples: usize,
    csv: Option<&std::path::Path>,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let (v1, v2) = problem.safety_pair()?;
    let pair = SafetyPair::new(v1.clone(), v2.clone())?;
    let angle = effective_angle_multi(&pair, &problem.capabilities)?;

    if samples < 2 {
        return Err(CliError::Core(paretax::Error::InvalidSampleCount(samples)));
    }
    let curve: Vec<NormalizedPoint> = (0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1) as f64;
            let s2 = 2.0 * t - 1.0;
            safety_safety_frontier(angle.theta, s2).map(|s1| NormalizedPoint { s2, s1 })
        })
        .collect::<Result<_, _>>()?;

    if let Some(path) = csv {
        write_csv(path, "s2,s1", curve.iter().map(|p| vec![p.s2, p.s1]))?;
    }

    let equal = equal_improvement(angle.theta);
    let budget_radius = problem.budget.radius();
    let tau1 = 1.0 - angle.tilde_norms.0 * angle.tilde_norms.0;
    let tau2 = 1.0 - angle.tilde_norms.1 * angle.tilde_norms.1;
    let results = ConflictResults {
        rho: pair.rho(),
        cos_theta: angle.cos_theta,
        theta_radians: angle.theta,
        a: angle.a.clone(),
        b: angle.b.clone(),
        tilde_norms: angle.tilde_norms,
        equal_improvement: equal,
        equal_gains_raw: (
            denormalize_gain(equal, budget_radius, tau1),
            denormalize_gain(equal, budget_radius, tau2),
        ),
        curve,
    };
    Report::new(
        "conflict",
        ConflictOptions { samples },
        problem.digest.clone(),
        None,
        results,
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct ClassifyResults {
    rho: f64,
    capabilities: Vec<ClassifiedCapability>,
}

#[derive(Debug, Serialize)]
struct ClassifiedCapability {
    name: String,
    a: f64,
    b: f64,
    label: &'static str,
    effective_corr: f64,
    improves_tradeoff: bool,
}

pub fn run_classify(problem: &Problem, output: Option<&std::path::Path>) -> Result<(), CliError> {
    let (v1, v2) = problem.safety_pair()?;
    let rho = v1.dot(v2)?;
    let capabilities = problem
        .capabilities
        .directions()
        .iter()
        .zip(&problem.names)
        .map(|(c, name)| {
            let a = c.dot(v1)?;
            let b = c.dot(v2)?;
            let class = classify_capability(rho, a, b)?;
            Ok(ClassifiedCapability {
                name: name.clone(),
                a,
                b,
                label: class.label.as_str(),
                effective_corr: class.effective_corr,
                improves_tradeoff: class.improves_tradeoff,
            })
        })
        .collect::<Result<Vec<_>, paretax::Error>>()?;
    Report::new(
        "classify",
        serde_json::json!({}),
        problem.digest.clone(),
        None,
        ClassifyResults { rho, capabilities },
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct WhitenResults {
    whitened_budget_radius: f64,
    eigenvalue_min: f64,
    eigenvalue_max: f64,
    condition_number: f64,
    raw_radius_min: f64,
    raw_radius_max: f64,
    safety: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    safety2: Option<Vec<f64>>,
    capabilities: IndexMap<String, Vec<f64>>,
    whitened_joint_tax: f64,
    whitened_angles: IndexMap<String, f64>,
}

pub fn run_whiten(problem: &Problem, output: Option<&std::path::Path>) -> Result<(), CliError> {
    let mut directions: Vec<Direction> = vec![problem.safety.clone()];
    if let Some(v2) = &problem.safety2 {
        directions.push(v2.clone());
    }
    let capability_offset = directions.len();
    directions.extend(problem.capabilities.directions().iter().cloned());

    let whitened = whiten(&problem.budget, &directions)?;
    let safety = &whitened.directions[0];
    let capability_dirs = &whitened.directions[capability_offset..];

    let whitened_set = CapabilitySet::from_directions(
        capability_dirs.to_vec(),
        problem.capabilities.rank_tolerance(),
    )?;
    let whitened_tax = tax_rate(safety, &whitened_set)?;

    let mut capabilities = IndexMap::new();
    let mut whitened_angles = IndexMap::new();
    for (name, dir) in problem.names.iter().zip(capability_dirs) {
        capabilities.insert(name.clone(), dir.as_slice().to_vec());
        whitened_angles.insert(name.clone(), principal_angle(safety, dir)?);
    }

    let results = WhitenResults {
        whitened_budget_radius: whitened.budget_radius,
        eigenvalue_min: whitened.diagnostics.eigenvalue_min,
        eigenvalue_max: whitened.diagnostics.eigenvalue_max,
        condition_number: whitened.diagnostics.condition_number,
        raw_radius_min: whitened.diagnostics.raw_radius_min,
        raw_radius_max: whitened.diagnostics.raw_radius_max,
        safety: safety.as_slice().to_vec(),
        safety2: problem
            .safety2
            .as_ref()
            .map(|_| whitened.directions[1].as_slice().to_vec()),
        capabilities,
        whitened_joint_tax: whitened_tax.joint_tax,
        whitened_angles,
    };
    Report::new(
        "whiten",
        serde_json::json!({}),
        problem.digest.clone(),
        None,
        results,
    )
    .emit(output)
}

#[derive(Debug, Serialize)]
struct ScalingSimOptions {
    d_values: Vec<usize>,
    m_prime: usize,
    gamma: Vec<f64>,
    trials: usize,
}

#[derive(Debug, Serialize)]
struct ScalingPointOut {
    d: usize,
    mean_tax: f64,
    std_error: f64,
    trials: usize,
}

#[derive(Debug, Serialize)]
struct ScalingSimResults {
    tau0: f64,
    fitted_slope: f64,
    regime: &'static str,
    points: Vec<ScalingPointOut>,
}

#[allow(clippy::too_many_arguments)]
pub fn run_scaling_sim(
    d_values: &[usize],
    m_prime: usize,
    gamma: &[f64],
    trials: usize,
    seed: u64,
    csv: Option<&std::path::Path>,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let series = scaling_series(gamma, m_prime, d_values, trials, seed)?;

    if let Some(path) = csv {
        write_csv(
            path,
            "d,mean,stderr",
            series
                .points
                .iter()
                .map(|p| vec![p.d as f64, p.mean_tax, p.std_error]),
        )?;
    }

    let options = ScalingSimOptions {
        d_values: d_values.to_vec(),
        m_prime,
        gamma: gamma.to_vec(),
        trials,
    };
    let digest = hex_digest(
        serde_json::to_string(&options)
            .expect("options always serialize")
            .as_bytes(),
    );
    let results = ScalingSimResults {
        tau0: series.tau0,
        fitted_slope: series.fitted_slope,
        regime: series.regime.as_str(),
        points: series
            .points
            .iter()
            .map(|p| ScalingPointOut {
                d: p.d,
                mean_tax: p.mean_tax,
                std_error: p.std_error,
                trials: p.trials,
            })
            .collect(),
    };
    Report::new("scaling-sim", options, digest, Some(seed), results).emit(output)
}

#[derive(Debug, Serialize)]
struct AuditOptions {
    instances: usize,
    resolution: usize,
}

#[derive(Debug, Serialize)]
struct AuditBattery {
    instances: usize,
    max_gap: f64,
    max_gap_over_tolerance: f64,
    within_tolerance: bool,
}

#[derive(Debug, Serialize)]
struct AuditResults {
    frontier: AuditBattery,
    constrained: AuditBattery,
    equal_improvement: AuditBattery,
}

/// Randomized closed-form versus oracle comparison over the three optima.
pub fn run_audit(
    instances: usize,
    resolution: usize,
    seed: Option<u64>,
    output: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let seed = seed.unwrap_or(AUDIT_DEFAULT_SEED);
    let cfg = OracleConfig::new(resolution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut frontier_worst = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let d = rng.random_range(2..=32);
        let v = sample_uniform_direction(d, &mut rng);
        let c = sample_uniform_direction(d, &mut rng);
        let budget = 1e-3 + 3.999 * rng.random::<f64>();
        let delta_c = budget * (2.0 * rng.random::<f64>() - 1.0);
        let alpha = principal_angle(&v, &c)?;
        let closed = frontier_safety(alpha, budget, delta_c)?;
        let brute = oracle_max_safety(&v, &c, budget, delta_c, &cfg)?;
        let gap = (closed - brute).abs();
        frontier_worst.0 = frontier_worst.0.max(gap);
        frontier_worst.1 = frontier_worst.1.max(gap / cfg.tolerance_bound(budget));
    }

    let mut constrained_worst = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let d = rng.random_range(4..=24);
        let m = rng.random_range(1..=4);
        let v = sample_uniform_direction(d, &mut rng);
        let members: Vec<Direction> = (0..m)
            .map(|_| sample_uniform_direction(d, &mut rng))
            .collect();
        let set = CapabilitySet::from_directions(members, 1e-10)?;
        let budget = 0.1 + 3.9 * rng.random::<f64>();
        let probe = sample_uniform_direction(d, &mut rng);
        let in_span = set.project(&probe)?;
        let target = if in_span.norm() > 1e-9 {
            let scale = 0.9 * budget * rng.random::<f64>();
            in_span.normalize() * scale
        } else {
            DVector::zeros(d)
        };
        let closed = max_safety_constrained(&v, &set, &target, budget)?.delta_s_max;
        let brute = oracle_max_safety_constrained(&v, &set, &target, budget, &cfg)?;
        let gap = (closed - brute).abs();
        constrained_worst.0 = constrained_worst.0.max(gap);
        constrained_worst.1 = constrained_worst.1.max(gap / cfg.tolerance_bound(budget));
    }

    let mut equal_worst = 0.0f64;
    for k in 0..instances {
        let theta = std::f64::consts::PI * k as f64 / (instances.max(2) - 1) as f64;
        let gap = (equal_improvement(theta) - oracle_equal_improvement(theta, &cfg)).abs();
        equal_worst = equal_worst.max(gap);
    }
    let equal_tolerance = 1e-9;

    let results = AuditResults {
        frontier: AuditBattery {
            instances,
            max_gap: frontier_worst.0,
            max_gap_over_tolerance: frontier_worst.1,
            within_tolerance: frontier_worst.1 <= 1.0,
        },
        constrained: AuditBattery {
            instances,
            max_gap: constrained_worst.0,
            max_gap_over_tolerance: constrained_worst.1,
            within_tolerance: constrained_worst.1 <= 1.0,
        },
        equal_improvement: AuditBattery {
            instances,
            max_gap: equal_worst,
            max_gap_over_tolerance: equal_worst / equal_tolerance,
            within_tolerance: equal_worst <= equal_tolerance,
        },
    };
    let options = AuditOptions {
        instances,
        resolution,
    };
    let digest = hex_digest(
        serde_json::to_string(&options)
            .expect("options always serialize")
            .as_bytes(),
    );
    Report::new("audit", options, digest, Some(seed), results).emit(output)
}

#[cfg(test)]
mod tests {
    use super::parse_target;

    #[test]
    fn target_spec_parses_in_order() {
        let target = parse_target("math=0.3, code=-0.1").unwrap();
        let entries: Vec<_> = target.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        assert_eq!(entries, vec![("math", 0.3), ("code", -0.1)]);
    }

    #[test]
    fn target_spec_rejects_malformed_entries() {
        assert!(parse_target("math").is_err());
        assert!(parse_target("math=abc").is_err());
        assert!(parse_target("").unwrap().is_empty());
    }
}
