//! Safety-safety tradeoffs under capability preservation.
//!
//! Holding a capability direction fixed projects both safety directions
//! into its orthogonal complement. The angle `theta` between the projected
//! directions is the partial correlation of the two safety objectives
//! given the capability,
//!
//! ```text
//! cos(theta) = (rho - a*b) / sqrt((1 - a^2)(1 - b^2))
//! ```
//!
//! and the normalized safety-safety frontier is the safety-capability
//! frontier with `alpha` replaced by `theta` and unit budget. Whether
//! preservation helps (`cos(theta) > rho`) or hurts depends on the sign
//! pattern of the projections `a` and `b`.

use crate::error::{Error, Result};
use crate::geometry::{check_dims, CapabilitySet, Direction};

/// Residual mass `1 - a^2` (or `1 - tau`) below which a projected safety
/// direction is considered to vanish.
pub const DEGENERATE_PROJECTION_TOLERANCE: f64 = 1e-12;

/// Tolerance for classifying the projections as exactly symmetric.
pub const SIGN_EQUALITY_TOLERANCE: f64 = 1e-12;

/// Two safety directions with their raw correlation.
#[derive(Debug, Clone)]
pub struct SafetyPair {
    v1: Direction,
    v2: Direction,
    rho: f64,
}

impl SafetyPair {
    pub fn new(v1: Direction, v2: Direction) -> Result<Self> {
        let rho = v1.dot(&v2)?;
        Ok(Self { v1, v2, rho })
    }

    pub fn v1(&self) -> &Direction {
        &self.v1
    }

    pub fn v2(&self) -> &Direction {
        &self.v2
    }

    /// Raw correlation `<v1, v2>`.
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// Effective angle between safety objectives after projecting out
/// capabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveAngleResult {
    /// Partial correlation, clamped into `[-1, 1]`.
    pub cos_theta: f64,
    /// `arccos(cos_theta)` in radians.
    pub theta: f64,
    /// Projections of the first safety direction onto each capability.
    pub a: Vec<f64>,
    /// Projections of the second safety direction onto each capability.
    pub b: Vec<f64>,
    /// Norms `(||v1 - P_C v1||, ||v2 - P_C v2||) = (sqrt(1-tau1), sqrt(1-tau2))`
    /// of the projected safety directions.
    pub tilde_norms: (f64, f64),
}

/// Sign pattern of the capability projections of two safety directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConflictLabel {
    /// `a*b < 0`: the capability mediates the conflict; preserving it
    /// raises the effective correlation whenever the raw correlation is
    /// nonnegative.
    OppositeSign,
    /// `a = b` with `a*b > 0`: preservation weakly lowers the effective
    /// correlation.
    SymmetricSameSign,
    /// Same sign but unequal: preservation may act as a suppressor and
    /// raise the effective correlation for sufficiently correlated
    /// objectives.
    AsymmetricSameSign,
    /// At least one projection is exactly zero.
    ZeroProjection,
}

impl ConflictLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConflictLabel::OppositeSign => "OppositeSign",
            ConflictLabel::SymmetricSameSign => "SymmetricSameSign",
            ConflictLabel::AsymmetricSameSign => "AsymmetricSameSign",
            ConflictLabel::ZeroProjection => "ZeroProjection",
        }
    }
}

/// Classification of one capability against a pair of safety objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictClass {
    pub label: ConflictLabel,
    /// Effective correlation `C(c) = cos(theta)` under preservation.
    pub effective_corr: f64,
    /// Raw correlation `rho` without preservation.
    pub raw_corr: f64,
    /// Whether preservation raises the correlation, `C(c) > rho`.
    pub improves_tradeoff: bool,
}

/// Partial correlation of two safety objectives given one capability, from
/// the scalar overlaps `rho = <v1, v2>`, `a = <c, v1>`, `b = <c, v2>`.
///
/// The inputs are not checked for joint realizability; use
/// [`effective_angle_from_vectors`] to guarantee a consistent triple.
pub fn effective_angle(rho: f64, a: f64, b: f64) -> Result<EffectiveAngleResult> {
    let ra = 1.0 - a * a;
    let rb = 1.0 - b * b;
    if ra <= DEGENERATE_PROJECTION_TOLERANCE {
        return Err(Error::DegenerateProjection { remaining: ra });
    }
    if rb <= DEGENERATE_PROJECTION_TOLERANCE {
        return Err(Error::DegenerateProjection { remaining: rb });
    }
    let cos_theta = ((rho - a * b) / (ra * rb).sqrt()).clamp(-1.0, 1.0);
    Ok(EffectiveAngleResult {
        cos_theta,
        theta: cos_theta.acos(),
        a: vec![a],
        b: vec![b],
        tilde_norms: (ra.sqrt(), rb.sqrt()),
    })
}

/// [`effective_angle`] with the overlaps measured from actual vectors,
/// which guarantees a realizable triple.
pub fn effective_angle_from_vectors(
    v1: &Direction,
    v2: &Direction,
    c: &Direction,
) -> Result<EffectiveAngleResult> {
    let rho = v1.dot(v2)?;
    let a = c.dot(v1)?;
    let b = c.dot(v2)?;
    effective_angle(rho, a, b)
}

/// Partial correlation of a safety pair given a whole capability set,
/// computed on the rank-revealed basis.
pub fn effective_angle_multi(
    pair: &SafetyPair,
    set: &CapabilitySet,
) -> Result<EffectiveAngleResult> {
    check_dims(set.dim(), pair.v1().dim())?;
    let q1 = set.basis().transpose() * pair.v1().coords();
    let q2 = set.basis().transpose() * pair.v2().coords();
    let tau1 = q1.norm_squared().clamp(0.0, 1.0);
    let tau2 = q2.norm_squared().clamp(0.0, 1.0);
    if 1.0 - tau1 <= DEGENERATE_PROJECTION_TOLERANCE {
        return Err(Error::DegenerateProjection {
            remaining: 1.0 - tau1,
        });
    }
    if 1.0 - tau2 <= DEGENERATE_PROJECTION_TOLERANCE {
        return Err(Error::DegenerateProjection {
            remaining: 1.0 - tau2,
        });
    }
    // On the orthonormal basis, a^T (C^T C)^{-1} b collapses to <q1, q2>.
    let cross = q1.dot(&q2);
    let cos_theta = ((pair.rho() - cross) / ((1.0 - tau1) * (1.0 - tau2)).sqrt()).clamp(-1.0, 1.0);

    let overlaps = |v: &Direction| {
        set.directions()
            .iter()
            .map(|c| c.coords().dot(v.coords()))
            .collect::<Vec<_>>()
    };
    Ok(EffectiveAngleResult {
        cos_theta,
        theta: cos_theta.acos(),
        a: overlaps(pair.v1()),
        b: overlaps(pair.v2()),
        tilde_norms: ((1.0 - tau1).sqrt(), (1.0 - tau2).sqrt()),
    })
}

/// Normalized safety-safety frontier: the maximum normalized gain `s1`
/// given `s2`, for projected directions at effective angle `theta`.
///
/// Gains are normalized as `s_i = delta_s_i / (B' * ||v_i - P_C v_i||)`;
/// see [`denormalize_gain`].
pub fn safety_safety_frontier(theta: f64, s2: f64) -> Result<f64> {
    if s2.abs() > 1.0 {
        return Err(Error::InfeasibleTarget {
            target: s2,
            bound: 1.0,
        });
    }
    Ok(s2 * theta.cos() + theta.sin() * (1.0 - s2 * s2).max(0.0).sqrt())
}

/// Maximum equal normalized gain `s1 = s2`, which is `cos(theta / 2)`.
pub fn equal_improvement(theta: f64) -> f64 {
    (theta / 2.0).cos()
}

/// Converts a normalized gain back to a raw safety gain,
/// `delta_s = s * B' * sqrt(1 - tau)`.
pub fn denormalize_gain(s: f64, residual_budget: f64, tau: f64) -> f64 {
    s * residual_budget * (1.0 - tau).max(0.0).sqrt()
}

/// Classifies the sign pattern of one capability's projections onto a
/// safety pair and reports whether preserving it raises the effective
/// correlation.
pub fn classify_capability(rho: f64, a: f64, b: f64) -> Result<ConflictClass> {
    let angle = effective_angle(rho, a, b)?;
    let product = a * b;
    let label = if product < 0.0 {
        ConflictLabel::OppositeSign
    } else if product == 0.0 {
        ConflictLabel::ZeroProjection
    } else if (a - b).abs() <= SIGN_EQUALITY_TOLERANCE {
        ConflictLabel::SymmetricSameSign
    } else {
        ConflictLabel::AsymmetricSameSign
    };
    Ok(ConflictClass {
        label,
        effective_corr: angle.cos_theta,
        raw_corr: rho,
        improves_tradeoff: angle.cos_theta > rho,
    })
}

/// Upper bound on the smaller of two safety gains under capability
/// preservation: `B' * cos(theta/2) * min(sqrt(1-tau1), sqrt(1-tau2))`.
///
/// The bound factors the joint difficulty into the residual budget, the
/// effective angle, and the larger of the individual taxes.
pub fn decomposition_bound(
    budget_radius: f64,
    delta_c_star_norm: f64,
    theta: f64,
    tau1: f64,
    tau2: f64,
) -> Result<f64> {
    if budget_radius.is_nan() || budget_radius <= 0.0 {
        return Err(Error::InvalidBudgetRadius(budget_radius));
    }
    if delta_c_star_norm > budget_radius {
        return Err(Error::InfeasibleBudget {
            norm: delta_c_star_norm,
            budget: budget_radius,
        });
    }
    let residual_budget = (budget_radius * budget_radius - delta_c_star_norm * delta_c_star_norm)
        .max(0.0)
        .sqrt();
    let rooms = ((1.0 - tau1).max(0.0).sqrt()).min((1.0 - tau2).max(0.0).sqrt());
    Ok(residual_budget * (theta / 2.0).cos() * rooms)
}
