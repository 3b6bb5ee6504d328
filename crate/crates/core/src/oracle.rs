//! Brute-force verification of the closed-form optima.
//!
//! Every optimum the library computes analytically is re-derived here by
//! dense enumeration of the feasible set, restricted to the two-plane each
//! problem reduces to (components orthogonal to both objectives contribute
//! to neither; see the out-of-plane invariance test). The oracles never
//! evaluate the closed forms they exist to falsify.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::conflict::safety_safety_frontier;
use crate::error::{Error, Result};
use crate::geometry::{check_dims, CapabilitySet, Direction};

/// Fixed seed for the deterministic auxiliary complement direction used by
/// [`oracle_max_safety_constrained`].
const COMPLEMENT_SEED: u64 = 0x0a11_ce00_0000_0001;

/// Grid configuration for the enumeration oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    grid_resolution: usize,
}

impl OracleConfig {
    /// Requires at least 16 points per axis; coarser grids give useless
    /// tolerance bounds.
    pub fn new(grid_resolution: usize) -> Result<Self> {
        if grid_resolution < 16 {
            return Err(Error::InvalidResolution(grid_resolution));
        }
        Ok(Self { grid_resolution })
    }

    pub fn grid_resolution(&self) -> usize {
        self.grid_resolution
    }

    /// Conservative Lipschitz-based bound on the gap between the oracle
    /// value and the true optimum: `2 pi B / grid_resolution`. Decreases
    /// monotonically with the resolution.
    pub fn tolerance_bound(&self, budget_radius: f64) -> f64 {
        2.0 * std::f64::consts::PI * budget_radius / self.grid_resolution as f64
    }
}

/// Maximum of `<v, delta>` over `||delta|| <= B`, `<c, delta> = delta_c`,
/// by dense enumeration within the plane `span(v, c)`.
///
/// The feasible set inside the plane is a chord of the budget disk; the
/// oracle walks a cell-centered grid along it and keeps the best objective
/// value it sees. The result is within `cfg.tolerance_bound(B)` of the
/// true maximum and never exceeds it.
pub fn oracle_max_safety(
    v: &Direction,
    c: &Direction,
    budget_radius: f64,
    delta_c: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    check_dims(v.dim(), c.dim())?;
    if budget_radius.is_nan() || budget_radius <= 0.0 {
        return Err(Error::InvalidBudgetRadius(budget_radius));
    }
    if delta_c.abs() > budget_radius {
        return Err(Error::InfeasibleTarget {
            target: delta_c,
            bound: budget_radius,
        });
    }

    // Plane coordinates: first axis along c, second along the part of v
    // orthogonal to c. Any feasible delta in the plane is
    // delta_c * c + t * e2 with t^2 <= B^2 - delta_c^2.
    let cos_vc = v.coords().dot(c.coords());
    let residual = v.coords() - c.coords() * cos_vc;
    let residual_norm = residual.norm();
    let base_value = delta_c * cos_vc;
    if residual_norm < 1e-12 {
        // The plane collapses to a line; the constraint pins delta exactly.
        return Ok(base_value);
    }
    let e2 = residual / residual_norm;
    let v_along_e2 = v.coords().dot(&e2);

    let half_chord = (budget_radius * budget_radius - delta_c * delta_c)
        .max(0.0)
        .sqrt();
    let n = cfg.grid_resolution;
    let step = 2.0 * half_chord / n as f64;
    let mut best = f64::NEG_INFINITY;
    for k in 0..n {
        let t = -half_chord + (k as f64 + 0.5) * step;
        let objective = base_value + t * v_along_e2;
        if objective > best {
            best = objective;
        }
    }
    Ok(best)
}

/// Maximum of `<v, delta>` subject to `P_C delta = delta_c_star` and
/// `||delta|| <= B`, by angular/radial enumeration of the orthogonal part
/// over the 2-plane spanned by the complement component of `v` and one
/// deterministic auxiliary complement direction.
pub fn oracle_max_safety_constrained(
    v: &Direction,
    set: &CapabilitySet,
    delta_c_star: &DVector<f64>,
    budget_radius: f64,
    cfg: &OracleConfig,
) -> Result<f64> {
    check_dims(set.dim(), v.dim())?;
    check_dims(set.dim(), delta_c_star.len())?;
    let norm = delta_c_star.norm();
    if norm > budget_radius {
        return Err(Error::InfeasibleBudget {
            norm,
            budget: budget_radius,
        });
    }

    let base_value = v.coords().dot(delta_c_star);
    let residual_budget = (budget_radius * budget_radius - norm * norm)
        .max(0.0)
        .sqrt();
    let dim = set.dim();
    if set.rank() >= dim {
        // No orthogonal complement to search.
        return Ok(base_value);
    }

    // First plane axis: the complement component of v when it survives,
    // otherwise a deterministic stand-in from the complement.
    let v_complement = set.complement(v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(COMPLEMENT_SEED);
    let u1 = if v_complement.norm() >= 1e-10 {
        v_complement.normalize()
    } else {
        match complement_direction(set, &[], &mut rng) {
            Some(u) => u,
            None => return Ok(base_value),
        }
    };
    // Second axis: deterministic complement direction orthogonal to u1.
    let u2 = complement_direction(set, &[&u1], &mut rng);

    let v_u1 = v.coords().dot(&u1);
    let v_u2 = u2.as_ref().map_or(0.0, |u| v.coords().dot(u));

    let angular = cfg.grid_resolution;
    let radial = (cfg.grid_resolution / 128).max(2);
    let mut best = f64::NEG_INFINITY;
    for j in 0..=radial {
        let radius = residual_budget * j as f64 / radial as f64;
        for k in 0..angular {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / angular as f64;
            let objective = base_value + radius * (phi.cos() * v_u1 + phi.sin() * v_u2);
            if objective > best {
                best = objective;
            }
        }
    }
    Ok(best)
}

/// Draws a unit vector from the orthogonal complement of `set`, orthogonal
/// to every vector in `avoid`, by projecting Gaussian draws. Returns `None`
/// when the complement has no room left.
fn complement_direction(
    set: &CapabilitySet,
    avoid: &[&DVector<f64>],
    rng: &mut ChaCha8Rng,
) -> Option<DVector<f64>> {
    let dim = set.dim();
    for _ in 0..64 {
        let raw = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut candidate = &raw - set.project_vector(&raw).ok()?;
        for &u in avoid {
            let overlap = candidate.dot(u);
            candidate -= u * overlap;
        }
        let norm = candidate.norm();
        if norm > 1e-8 {
            return Some(candidate / norm);
        }
    }
    None
}

/// Locates the equal-gain point of the safety-safety frontier by scanning
/// and bisection, without using the closed form `cos(theta/2)`.
///
/// Finds the largest `s` in `[0, 1]` with `frontier(theta, s) >= s`; the
/// scan uses `cfg.grid_resolution` points to bracket the crossing and
/// bisection tightens it to 1e-12.
pub fn oracle_equal_improvement(theta: f64, cfg: &OracleConfig) -> f64 {
    let gap = |s: f64| safety_safety_frontier(theta, s).expect("|s| <= 1") - s;
    if gap(1.0) >= -1e-15 {
        // Fully aligned objectives: every s is feasible up to 1.
        return 1.0;
    }
    // Coarse bracket of the sign change.
    let n = cfg.grid_resolution;
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for k in 1..=n {
        let s = k as f64 / n as f64;
        if gap(s) < 0.0 {
            hi = s;
            lo = (k - 1) as f64 / n as f64;
            break;
        }
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
