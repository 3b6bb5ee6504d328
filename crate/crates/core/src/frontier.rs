//! Safety-capability Pareto frontiers, optimal perturbations, constrained
//! maxima, free safety, and anisotropic budget whitening.
//!
//! For a safety direction `v`, a capability direction `c` at angle `alpha`,
//! and a budget `||delta|| <= B`, the maximum safety gain at capability
//! change `delta_c` is
//!
//! ```text
//! delta_s = delta_c * cos(alpha) + sin(alpha) * sqrt(B^2 - delta_c^2)
//! ```
//!
//! and the frontier is tight: a perturbation of norm exactly `B` achieves
//! it. With several capabilities held at a fixed target `delta_c_star`, the
//! maximum becomes `<v, delta_c_star> + B' * sqrt(1 - tau)` with residual
//! budget `B' = sqrt(B^2 - ||delta_c_star||^2)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{check_dims, CapabilitySet, Direction};

/// Below this value of `sin(alpha)` the safety and capability directions
/// are treated as collinear and the two-plane construction collapses.
pub const DEGENERATE_ANGLE_TOLERANCE: f64 = 1e-8;

/// Relative eigenvalue floor (against the largest eigenvalue) under which a
/// Fisher matrix is rejected as not positive definite.
pub const SPD_TOLERANCE: f64 = 1e-12;

/// Tolerance for the out-of-subspace residual of a capability constraint.
pub const IN_SPAN_TOLERANCE: f64 = 1e-8;

/// Norm bound on representation shifts: a sphere of radius `radius`, or an
/// ellipsoid `delta^T F delta <= radius^2` when a Fisher matrix is present.
#[derive(Debug, Clone)]
pub struct Budget {
    radius: f64,
    fisher: Option<DMatrix<f64>>,
}

impl Budget {
    /// A spherical budget `||delta|| <= radius`.
    pub fn isotropic(radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidBudgetRadius(radius));
        }
        Ok(Self {
            radius,
            fisher: None,
        })
    }

    /// An ellipsoidal budget `delta^T F delta <= radius^2` with `F`
    /// symmetric positive definite.
    pub fn anisotropic(radius: f64, fisher: DMatrix<f64>) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidBudgetRadius(radius));
        }
        let scale = fisher.abs().max().max(1.0);
        let asymmetry = (&fisher - fisher.transpose()).abs().max();
        if asymmetry > 1e-10 * scale {
            return Err(Error::NotSpd(format!(
                "asymmetry {asymmetry:.3e} exceeds tolerance"
            )));
        }
        let eigen = symmetrized(&fisher).symmetric_eigen();
        let max_eig = eigen.eigenvalues.max();
        let min_eig = eigen.eigenvalues.min();
        if min_eig.is_nan() || min_eig <= SPD_TOLERANCE * max_eig {
            return Err(Error::NotSpd(format!(
                "smallest eigenvalue {min_eig:.3e} is at or below {SPD_TOLERANCE:.0e} relative to largest {max_eig:.3e}"
            )));
        }
        Ok(Self {
            radius,
            fisher: Some(fisher),
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The Fisher matrix; `None` means the budget is isotropic.
    pub fn fisher(&self) -> Option<&DMatrix<f64>> {
        self.fisher.as_ref()
    }
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// One sampled point of a Pareto frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint {
    /// Capability change `<c, delta>`.
    pub delta_c: f64,
    /// Maximum safety gain at that capability change.
    pub delta_s: f64,
}

/// A frontier sampled at uniformly spaced capability changes.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierCurve {
    pub alpha: f64,
    pub budget_radius: f64,
    pub points: Vec<FrontierPoint>,
}

/// A representation shift together with its cached norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    delta: DVector<f64>,
    norm: f64,
}

impl Perturbation {
    pub fn new(delta: DVector<f64>) -> Self {
        let norm = delta.norm();
        Self { delta, norm }
    }

    pub fn delta(&self) -> &DVector<f64> {
        &self.delta
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// Output of [`max_safety_constrained`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedMaxResult {
    /// Maximum safety gain subject to the capability constraint.
    pub delta_s_max: f64,
    /// A perturbation achieving the maximum.
    pub optimizer: Perturbation,
    /// Residual budget `B' = sqrt(B^2 - ||delta_c_star||^2)` left for the
    /// orthogonal complement.
    pub residual_budget: f64,
    /// `<v, delta_c_star>`: the safety contribution of the capability
    /// target itself. Positive values subsidize safety beyond the free
    /// amount.
    pub subsidy: f64,
}

/// Maximum safety gain at capability change `delta_c`, for directions at
/// angle `alpha` under budget radius `budget_radius`.
pub fn frontier_safety(alpha: f64, budget_radius: f64, delta_c: f64) -> Result<f64> {
    if budget_radius.is_nan() || budget_radius <= 0.0 {
        return Err(Error::InvalidBudgetRadius(budget_radius));
    }
    if delta_c.abs() > budget_radius {
        return Err(Error::InfeasibleTarget {
            target: delta_c,
            bound: budget_radius,
        });
    }
    let headroom = (budget_radius * budget_radius - delta_c * delta_c).max(0.0);
    Ok(delta_c * alpha.cos() + alpha.sin() * headroom.sqrt())
}

/// Samples the frontier at `n_samples` capability changes uniformly spaced
/// over `[-B, B]`, endpoints included.
pub fn frontier_curve(alpha: f64, budget_radius: f64, n_samples: usize) -> Result<FrontierCurve> {
    if n_samples < 2 {
        return Err(Error::InvalidSampleCount(n_samples));
    }
    let points = (0..n_samples)
        .map(|k| {
            let t = k as f64 / (n_samples - 1) as f64;
            let delta_c = budget_radius * (2.0 * t - 1.0);
            frontier_safety(alpha, budget_radius, delta_c)
                .map(|delta_s| FrontierPoint { delta_c, delta_s })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontierCurve {
        alpha,
        budget_radius,
        points,
    })
}

/// The frontier-achieving perturbation for a single capability direction.
///
/// Returns `delta` with `||delta|| = B`, `<c, delta> = delta_c`, and
/// `<v, delta>` equal to [`frontier_safety`]. When `v` and `c` are
/// collinear within [`DEGENERATE_ANGLE_TOLERANCE`] the two-plane collapses
/// and the canonical minimum-norm achiever `delta_c * c` is returned
/// instead; any orthogonal filler would be safety-neutral.
pub fn optimal_delta_single(
    v: &Direction,
    c: &Direction,
    budget_radius: f64,
    delta_c: f64,
) -> Result<Perturbation> {
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

    let cos_a = v.coords().dot(c.coords());
    let in_plane = c.coords() - v.coords() * cos_a;
    let sin_a = in_plane.norm();
    if sin_a < DEGENERATE_ANGLE_TOLERANCE {
        return Ok(Perturbation::new(c.coords() * delta_c));
    }
    let e2 = in_plane / sin_a;

    let headroom = (budget_radius * budget_radius - delta_c * delta_c).max(0.0);
    let along_safety = delta_c * cos_a + sin_a * headroom.sqrt();
    let along_e2 = (delta_c - along_safety * cos_a) / sin_a;
    Ok(Perturbation::new(v.coords() * along_safety + e2 * along_e2))
}

/// Maximum safety gain when the projection onto the capability subspace is
/// pinned to `delta_c_star`.
///
/// The constraint vector must lie in the span of the capability set within
/// [`IN_SPAN_TOLERANCE`] (relative to its norm) and its norm must not
/// exceed the budget. The optimizer spends the residual budget along the
/// normalized orthogonal component of `v`; when that component vanishes
/// (tax of 1) the constraint target alone is returned.
pub fn max_safety_constrained(
    v: &Direction,
    set: &CapabilitySet,
    delta_c_star: &DVector<f64>,
    budget_radius: f64,
) -> Result<ConstrainedMaxResult> {
    check_dims(set.dim(), v.dim())?;
    check_dims(set.dim(), delta_c_star.len())?;
    if budget_radius.is_nan() || budget_radius <= 0.0 {
        return Err(Error::InvalidBudgetRadius(budget_radius));
    }
    let norm = delta_c_star.norm();
    if norm > budget_radius {
        return Err(Error::InfeasibleBudget {
            norm,
            budget: budget_radius,
        });
    }
    let target = set.project_vector(delta_c_star)?;
    let residual = (delta_c_star - &target).norm();
    if residual > IN_SPAN_TOLERANCE * norm.max(1.0) {
        return Err(Error::ConstraintNotInSubspace { residual });
    }

    let orthogonal = set.complement(v)?;
    let room = orthogonal.norm();
    let target_norm = target.norm();
    let residual_budget = (budget_radius * budget_radius - target_norm * target_norm)
        .max(0.0)
        .sqrt();
    let subsidy = v.coords().dot(&target);

    let (delta_s_max, optimizer) = if room < 1e-10 {
        // tau ~ 1: no orthogonal room, avoid the 0/0 normalization.
        (subsidy, Perturbation::new(target))
    } else {
        (
            subsidy + residual_budget * room,
            Perturbation::new(target + orthogonal * (residual_budget / room)),
        )
    };

    Ok(ConstrainedMaxResult {
        delta_s_max,
        optimizer,
        residual_budget,
        subsidy,
    })
}

/// `B * sqrt(1 - tau)`: the safety gain available at zero capability cost.
///
/// Inputs are assumed validated upstream (`tax` in `[0, 1]`, positive
/// radius); tiny negative arguments from round-off are clamped.
pub fn free_safety(tax: f64, budget_radius: f64) -> f64 {
    budget_radius * (1.0 - tax).max(0.0).sqrt()
}

/// Spectral diagnostics of a whitening transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitenDiagnostics {
    pub eigenvalue_min: f64,
    pub eigenvalue_max: f64,
    pub condition_number: f64,
    /// Raw-space radius of the ellipsoid along its stiffest axis,
    /// `B / sqrt(eigenvalue_max)`.
    pub raw_radius_min: f64,
    /// Raw-space radius along the softest axis, `B / sqrt(eigenvalue_min)`.
    pub raw_radius_max: f64,
}

/// Directions mapped into the whitened coordinate system where the budget
/// is spherical again.
#[derive(Debug, Clone)]
pub struct WhitenedGeometry {
    /// Budget radius in whitened coordinates; the contract is
    /// `||F^{1/2} delta|| <= budget_radius`.
    pub budget_radius: f64,
    /// `F^{-1/2} u / ||F^{-1/2} u||` for each input direction.
    pub directions: Vec<Direction>,
    pub diagnostics: WhitenDiagnostics,
}

/// Maps directions into the whitened coordinates of an anisotropic budget.
///
/// All frontier and tax computations on the whitened directions realize
/// the anisotropic theory with modified angles; reported gains live in the
/// whitened space. A budget without a Fisher matrix whitens trivially.
pub fn whiten(budget: &Budget, directions: &[Direction]) -> Result<WhitenedGeometry> {
    let Some(fisher) = budget.fisher() else {
        return Ok(WhitenedGeometry {
            budget_radius: budget.radius(),
            directions: directions.to_vec(),
            diagnostics: WhitenDiagnostics {
                eigenvalue_min: 1.0,
                eigenvalue_max: 1.0,
                condition_number: 1.0,
                raw_radius_min: budget.radius(),
                raw_radius_max: budget.radius(),
            },
        });
    };
    for u in directions {
        check_dims(fisher.nrows(), u.dim())?;
    }

    // F^{-1/2} through the symmetric eigendecomposition; the spectrum feeds
    // the diagnostics and conditions the SPD check.
    let eigen = symmetrized(fisher).symmetric_eigen();
    let max_eig = eigen.eigenvalues.max();
    let min_eig = eigen.eigenvalues.min();
    if min_eig.is_nan() || min_eig <= SPD_TOLERANCE * max_eig {
        return Err(Error::NotSpd(format!(
            "smallest eigenvalue {min_eig:.3e} is at or below {SPD_TOLERANCE:.0e} relative to largest {max_eig:.3e}"
        )));
    }
    let inv_sqrt = DMatrix::from_diagonal(&eigen.eigenvalues.map(|x| 1.0 / x.sqrt()));
    let transform = &eigen.eigenvectors * inv_sqrt * eigen.eigenvectors.transpose();

    let whitened = directions
        .iter()
        .map(|u| Direction::from_vector(&transform * u.coords()))
        .collect::<Result<Vec<_>>>()?;

    Ok(WhitenedGeometry {
        budget_radius: budget.radius(),
        directions: whitened,
        diagnostics: WhitenDiagnostics {
            eigenvalue_min: min_eig,
            eigenvalue_max: max_eig,
            condition_number: max_eig / min_eig,
            raw_radius_min: budget.radius() / max_eig.sqrt(),
            raw_radius_max: budget.radius() / min_eig.sqrt(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{principal_angle, tax_rate, DEFAULT_RANK_TOLERANCE};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn unit(coords: &[f64]) -> Direction {
        Direction::new(coords.to_vec()).unwrap()
    }

    fn e(i: usize, d: usize) -> Direction {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Direction::new(v).unwrap()
    }

    #[test]
    fn aligned_directions_trade_linearly() {
        assert_eq!(frontier_safety(0.0, 1.0, 0.5).unwrap(), 0.5);
    }

    #[test]
    fn orthogonal_directions_give_a_quarter_circle() {
        let got = frontier_safety(FRAC_PI_2, 2.0, 1.0).unwrap();
        assert!((got - 3.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sixty_degree_frontier_at_half_budget_peaks_at_one() {
        let got = frontier_safety(FRAC_PI_3, 1.0, 0.5).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frontier_endpoints_drop_the_root_term() {
        for &alpha in &[0.3, 1.2, 2.8] {
            for &b in &[0.5, 1.0, 3.7] {
                assert!((frontier_safety(alpha, b, b).unwrap() - b * alpha.cos()).abs() < 1e-12);
                assert!((frontier_safety(alpha, b, -b).unwrap() + b * alpha.cos()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn over_budget_target_is_infeasible() {
        assert!(matches!(
            frontier_safety(1.0, 1.0, 1.5).unwrap_err(),
            Error::InfeasibleTarget { .. }
        ));
    }

    #[test]
    fn quarter_circle_curve_samples() {
        let curve = frontier_curve(FRAC_PI_2, 1.0, 3).unwrap();
        let expect = [(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
        for (p, (dc, ds)) in curve.points.iter().zip(expect) {
            assert!((p.delta_c - dc).abs() < 1e-15);
            assert!((p.delta_s - ds).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_curve_samples() {
        let curve = frontier_curve(0.0, 1.0, 3).unwrap();
        let expect = [(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)];
        for (p, (dc, ds)) in curve.points.iter().zip(expect) {
            assert!((p.delta_c - dc).abs() < 1e-15);
            assert!((p.delta_s - ds).abs() < 1e-15);
        }
    }

    #[test]
    fn curve_peak_sits_at_budget_times_cos_alpha() {
        let curve = frontier_curve(FRAC_PI_3, 1.0, 5).unwrap();
        let peak = &curve.points[3];
        assert!((peak.delta_c - 0.5).abs() < 1e-15);
        assert!((peak.delta_s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_curve_is_rejected() {
        assert!(matches!(
            frontier_curve(1.0, 1.0, 1).unwrap_err(),
            Error::InvalidSampleCount(1)
        ));
    }

    #[test]
    fn orthogonal_optimal_delta_is_the_safety_direction() {
        let delta = optimal_delta_single(&e(0, 3), &e(1, 3), 1.0, 0.0).unwrap();
        assert!((delta.delta() - e(0, 3).coords()).norm() < 1e-12);
    }

    #[test]
    fn orthogonal_optimal_delta_splits_the_budget() {
        let delta = optimal_delta_single(&e(0, 3), &e(1, 3), 1.0, 0.6).unwrap();
        assert!((delta.delta()[0] - 0.8).abs() < 1e-12);
        assert!((delta.delta()[1] - 0.6).abs() < 1e-12);
        assert!((delta.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_optimal_delta_is_minimum_norm() {
        let delta = optimal_delta_single(&e(0, 3), &e(0, 3), 1.0, 0.5).unwrap();
        assert!((delta.delta() - e(0, 3).coords() * 0.5).norm() < 1e-15);
        assert!((delta.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn optimal_delta_realizes_the_frontier() {
        let v = unit(&[0.6, 0.2, -0.5, 0.1]);
        let c = unit(&[0.1, -0.9, 0.3, 0.2]);
        let alpha = principal_angle(&v, &c).unwrap();
        for &(b, dc) in &[(1.0, 0.4), (2.5, -1.9), (0.7, 0.7)] {
            let delta = optimal_delta_single(&v, &c, b, dc).unwrap();
            assert!((delta.norm() - b).abs() < 1e-10, "budget saturation");
            assert!((c.coords().dot(delta.delta()) - dc).abs() < 1e-10);
            let want = frontier_safety(alpha, b, dc).unwrap();
            assert!((v.coords().dot(delta.delta()) - want).abs() < 1e-10);
        }
    }

    #[test]
    fn constrained_max_with_orthogonal_safety() {
        let set = CapabilitySet::from_directions(vec![e(1, 3)], DEFAULT_RANK_TOLERANCE).unwrap();
        let target = e(1, 3).coords() * 0.6;
        let got = max_safety_constrained(&e(0, 3), &set, &target, 1.0).unwrap();
        assert!((got.delta_s_max - 0.8).abs() < 1e-12);
        assert!((got.residual_budget - 0.8).abs() < 1e-12);
        assert!(got.subsidy.abs() < 1e-12);
    }

    #[test]
    fn constrained_max_with_full_tax_has_no_room() {
        let set = CapabilitySet::from_directions(vec![e(0, 3)], DEFAULT_RANK_TOLERANCE).unwrap();
        let got = max_safety_constrained(&e(0, 3), &set, &DVector::zeros(3), 1.0).unwrap();
        assert_eq!(got.delta_s_max, 0.0);
        assert_eq!(got.optimizer.norm(), 0.0);
    }

    #[test]
    fn aligned_target_subsidizes_safety() {
        let c = unit(&[1.0, 1.0, 0.0]);
        let set = CapabilitySet::from_directions(vec![c.clone()], DEFAULT_RANK_TOLERANCE).unwrap();
        let target = c.coords() * 0.3;
        let got = max_safety_constrained(&e(0, 3), &set, &target, 1.0).unwrap();
        assert!((got.delta_s_max - 0.886_668_912_517_566_4).abs() < 1e-10);
        let tax = tax_rate(&e(0, 3), &set).unwrap().joint_tax;
        assert!(got.delta_s_max > got.residual_budget * (1.0 - tax).sqrt() + 1e-6);
        // The optimizer honors the constraint and the budget.
        let p = set.project_vector(got.optimizer.delta()).unwrap();
        assert!((p - target).norm() < 1e-9);
        assert!((got.optimizer.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn over_budget_constraint_is_rejected() {
        let set = CapabilitySet::from_directions(vec![e(0, 3)], DEFAULT_RANK_TOLERANCE).unwrap();
        let target = e(0, 3).coords() * 1.5;
        assert!(matches!(
            max_safety_constrained(&e(1, 3), &set, &target, 1.0).unwrap_err(),
            Error::InfeasibleBudget { .. }
        ));
    }

    #[test]
    fn out_of_span_constraint_is_rejected() {
        let set = CapabilitySet::from_directions(vec![e(0, 3)], DEFAULT_RANK_TOLERANCE).unwrap();
        let target = e(1, 3).coords() * 0.5;
        assert!(matches!(
            max_safety_constrained(&e(2, 3), &set, &target, 1.0).unwrap_err(),
            Error::ConstraintNotInSubspace { .. }
        ));
    }

    #[test]
    fn free_safety_limits() {
        assert_eq!(free_safety(0.0, 1.0), 1.0);
        assert_eq!(free_safety(1.0, 5.0), 0.0);
        assert!((free_safety(0.5, 1.0) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn identity_fisher_whitens_trivially() {
        let budget = Budget::anisotropic(1.5, DMatrix::identity(3, 3)).unwrap();
        let dirs = vec![e(0, 3), unit(&[1.0, 1.0, 0.0])];
        let got = whiten(&budget, &dirs).unwrap();
        assert_eq!(got.budget_radius, 1.5);
        for (w, d) in got.directions.iter().zip(&dirs) {
            assert!((w.coords() - d.coords()).norm() < 1e-12);
        }
        assert!((got.diagnostics.condition_number - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_fisher_preserves_angles_and_shrinks_raw_radius() {
        let budget = Budget::anisotropic(1.0, DMatrix::identity(3, 3) * 4.0).unwrap();
        let dirs = vec![e(0, 3), unit(&[1.0, 1.0, 0.0])];
        let got = whiten(&budget, &dirs).unwrap();
        let alpha = principal_angle(&got.directions[0], &got.directions[1]).unwrap();
        let alpha_raw = principal_angle(&dirs[0], &dirs[1]).unwrap();
        assert!((alpha - alpha_raw).abs() < 1e-12);
        assert!((got.diagnostics.raw_radius_min - 0.5).abs() < 1e-12);
        assert!((got.diagnostics.raw_radius_max - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diagonal_fisher_reshapes_directions() {
        let fisher = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let budget = Budget::anisotropic(1.0, fisher).unwrap();
        let v = unit(&[1.0, 1.0]);
        let got = whiten(&budget, &[v]).unwrap();
        let w = &got.directions[0];
        assert!((w.coords()[0] - 0.447_213_595_499_958).abs() < 1e-10);
        assert!((w.coords()[1] - 0.894_427_190_999_916).abs() < 1e-10);
    }

    #[test]
    fn indefinite_fisher_is_rejected() {
        let fisher = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -0.5]));
        assert!(matches!(
            Budget::anisotropic(1.0, fisher).unwrap_err(),
            Error::NotSpd(_)
        ));
    }

    #[test]
    fn asymmetric_fisher_is_rejected() {
        let mut fisher = DMatrix::identity(2, 2);
        fisher[(0, 1)] = 0.3;
        assert!(matches!(
            Budget::anisotropic(1.0, fisher).unwrap_err(),
            Error::NotSpd(_)
        ));
    }

    #[test]
    fn frontier_peak_is_the_budget() {
        for &alpha in &[0.2, FRAC_PI_3, 2.0, PI - 0.2] {
            let b = 1.7;
            let peak = frontier_safety(alpha, b, b * alpha.cos()).unwrap();
            assert!((peak - b).abs() < 1e-12);
        }
    }
}
