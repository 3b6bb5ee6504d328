//! Monte Carlo laboratory for the packing model of the alignment tax.
//!
//! Features are packed as unit vectors; a capability either has a
//! prescribed intrinsic overlap `gamma_i` with the safety direction or is
//! incidental (overlap driven purely by finite-dimensional packing noise,
//! mean square `1/d`). The tax then splits into an irreducible part
//! `tau_0 = sum(gamma_i^2)` and a packing residual that shrinks as
//! capacity grows. This module constructs such ensembles with the
//! prescribed overlaps realized exactly, estimates the tax by Monte Carlo,
//! bounds the residual, and classifies how a measured tax series scales
//! with dimension.
//!
//! Every stochastic operation takes a 64-bit seed; trial `t` draws from
//! stream `t` of a counter-based generator, so results are bit-identical
//! regardless of execution order or thread count.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::conflict::{effective_angle_multi, SafetyPair};
use crate::error::{Error, Result};
use crate::geometry::{tax_rate, CapabilitySet, Direction, DEFAULT_RANK_TOLERANCE};

/// Fraction of excess variance the `1/d` model must explain for a series
/// to be classified as having a fixed number of incidental capabilities.
pub const R2_FIXED_THRESHOLD: f64 = 0.95;

/// Sum of squares with a +0.0 identity (`Iterator::sum` on floats starts
/// from -0.0, which would leak a negative zero into reports).
fn sum_of_squares(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, x| acc + x * x)
}

/// Relative spread of the excess below which a series counts as a plateau.
pub const PLATEAU_SPREAD_THRESHOLD: f64 = 0.10;

/// Absolute excess below which a plateau is treated as already converged.
pub const PLATEAU_ABSOLUTE_TOLERANCE: f64 = 1e-9;

/// Prescription for a packing ensemble: dimension, intrinsic overlaps of
/// the safety direction with a subset of capabilities, and a count of
/// incidental capabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingSpec {
    d: usize,
    intrinsic_overlaps: Vec<f64>,
    m_prime: usize,
    n_total_features: Option<usize>,
}

impl PackingSpec {
    pub fn new(d: usize, intrinsic_overlaps: Vec<f64>, m_prime: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyInput("dimension"));
        }
        for &g in &intrinsic_overlaps {
            if g.is_nan() || g.abs() >= 1.0 {
                return Err(Error::SpecInfeasible(format!(
                    "intrinsic overlap {g} is not inside (-1, 1)"
                )));
            }
        }
        let sum_sq = sum_of_squares(&intrinsic_overlaps);
        if sum_sq >= 1.0 {
            return Err(Error::SpecInfeasible(format!(
                "sum of squared overlaps {sum_sq} >= 1; no unit safety direction admits them"
            )));
        }
        if !intrinsic_overlaps.is_empty() && d < 2 {
            return Err(Error::SpecInfeasible(
                "intrinsic overlaps need dimension >= 2".to_owned(),
            ));
        }
        Ok(Self {
            d,
            intrinsic_overlaps,
            m_prime,
            n_total_features: None,
        })
    }

    /// Declares the total feature count `N` for coherence context.
    pub fn with_total_features(mut self, n: usize) -> Self {
        self.n_total_features = Some(n);
        self
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn intrinsic_overlaps(&self) -> &[f64] {
        &self.intrinsic_overlaps
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn n_total_features(&self) -> Option<usize> {
        self.n_total_features
    }

    /// Total capability count `m = |I| + m'`.
    pub fn total_capabilities(&self) -> usize {
        self.intrinsic_overlaps.len() + self.m_prime
    }

    /// True when the capabilities cannot all be linearly independent; the
    /// ensemble is then in the superposition regime.
    pub fn exceeds_dimension(&self) -> bool {
        self.total_capabilities() > self.d
    }
}

/// A realized packing: safety direction, capability set, and the measured
/// safety-capability overlaps.
#[derive(Debug, Clone)]
pub struct PackingEnsemble {
    safety: Direction,
    capabilities: CapabilitySet,
    realized_overlaps: Vec<f64>,
    seed: u64,
}

impl PackingEnsemble {
    pub fn safety(&self) -> &Direction {
        &self.safety
    }

    pub fn capabilities(&self) -> &CapabilitySet {
        &self.capabilities
    }

    /// `<v, c_i>` for every capability, intrinsic ones first in spec
    /// order, then the incidental ones.
    pub fn realized_overlaps(&self) -> &[f64] {
        &self.realized_overlaps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Draws a direction uniformly distributed on the unit sphere in `R^d` by
/// normalizing a standard Gaussian vector.
pub fn sample_uniform_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Direction {
    loop {
        let raw = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        if let Ok(dir) = Direction::from_vector(raw) {
            return dir;
        }
    }
}

/// Draws a direction uniform on the unit sphere of the orthogonal
/// complement of the given orthonormal vectors.
fn sample_complement_direction<R: Rng + ?Sized>(
    orthonormal: &[&DVector<f64>],
    d: usize,
    rng: &mut R,
) -> DVector<f64> {
    loop {
        let mut raw = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        for &b in orthonormal {
            let overlap = raw.dot(b);
            raw -= b * overlap;
        }
        let norm = raw.norm();
        if norm > 1e-8 {
            return raw / norm;
        }
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds a packing ensemble: a uniform random safety direction `v`,
/// intrinsic capabilities `c_i = gamma_i v + sqrt(1 - gamma_i^2) u_i` with
/// `u_i` uniform in the complement of `v` (so the prescribed overlap is
/// realized exactly), and incidental capabilities uniform on the sphere.
///
/// Identical `(spec, seed)` yield bit-identical ensembles.
pub fn build_packing(spec: &PackingSpec, seed: u64) -> Result<PackingEnsemble> {
    build_packing_stream(spec, seed, 0)
}

fn build_packing_stream(spec: &PackingSpec, seed: u64, stream: u64) -> Result<PackingEnsemble> {
    if spec.total_capabilities() == 0 {
        return Err(Error::EmptyInput("capabilities"));
    }
    let mut rng = stream_rng(seed, stream);
    let d = spec.d;
    let safety = sample_uniform_direction(d, &mut rng);

    let mut members = Vec::with_capacity(spec.total_capabilities());
    for &gamma in &spec.intrinsic_overlaps {
        let residual = sample_complement_direction(&[safety.coords()], d, &mut rng);
        let coords = safety.coords() * gamma + residual * (1.0 - gamma * gamma).sqrt();
        members.push(Direction::from_vector(coords)?);
    }
    for _ in 0..spec.m_prime {
        members.push(sample_uniform_direction(d, &mut rng));
    }

    let realized_overlaps = members
        .iter()
        .map(|c| c.coords().dot(safety.coords()))
        .collect();
    let capabilities = CapabilitySet::from_directions(members, DEFAULT_RANK_TOLERANCE)?;
    Ok(PackingEnsemble {
        safety,
        capabilities,
        realized_overlaps,
        seed,
    })
}

/// Coherence of a packing: the largest absolute overlap among the declared
/// intrinsically-unrelated pairs.
pub fn coherence(vectors: &[Direction], zero_pairs: &[(usize, usize)]) -> Result<f64> {
    if vectors.len() < 2 {
        return Err(Error::EmptyInput("coherence needs at least two vectors"));
    }
    if zero_pairs.is_empty() {
        return Err(Error::EmptyPairSet);
    }
    let mut mu = 0.0f64;
    for &(i, j) in zero_pairs {
        for index in [i, j] {
            if index >= vectors.len() {
                return Err(Error::IndexOutOfRange {
                    index,
                    len: vectors.len(),
                });
            }
        }
        let overlap = vectors[i].coords().dot(vectors[j].coords()).abs();
        if overlap > mu {
            mu = overlap;
        }
    }
    Ok(mu)
}

/// Welch lower bound `sqrt((N - d) / (d (N - 1)))` on the coherence of `N`
/// unit vectors in `R^d`. Returns 0 at `N = d` and fails for fewer
/// features than dimensions.
pub fn welch_bound(n_features: usize, d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::EmptyInput("dimension"));
    }
    if n_features < d {
        return Err(Error::NotSuperposed { n_features, dim: d });
    }
    if n_features == d {
        return Ok(0.0);
    }
    let n = n_features as f64;
    let dim = d as f64;
    Ok(((n - dim) / (dim * (n - 1.0))).sqrt())
}

/// The irreducible tax `tau_0 = sum(gamma_i^2)`: the part of the tax that
/// scaling cannot remove.
pub fn irreducible_tax(spec: &PackingSpec) -> f64 {
    sum_of_squares(&spec.intrinsic_overlaps)
}

/// Upper bound on the packing residual `|tau - tau_0|` under
/// near-orthogonality (`m * mu < 1`):
///
/// ```text
/// (tau_0 m mu + m' mu^2 + 2 gamma_bar |I| mu + |I| mu^2) / (1 - m mu)
/// ```
pub fn residual_bound(
    tau0: f64,
    m: usize,
    m_prime: usize,
    mu: f64,
    gamma_bar: f64,
    i_count: usize,
) -> Result<f64> {
    let m_mu = m as f64 * mu;
    if m_mu >= 1.0 {
        return Err(Error::NearOrthogonalityViolated { m_mu });
    }
    let numerator = tau0 * m_mu
        + m_prime as f64 * mu * mu
        + 2.0 * gamma_bar * i_count as f64 * mu
        + i_count as f64 * mu * mu;
    Ok(numerator / (1.0 - m_mu))
}

/// Runs the closure once per trial, in parallel when the `parallel`
/// feature is on. Outputs are collected in trial order, so reductions are
/// independent of thread count.
fn map_trials<T, F>(trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials as u64).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials as u64).map(f).collect()
    }
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Mean and standard error of the joint tax over independently seeded
/// ensembles. Deterministic given `(spec, trials, seed)`; trial `t` uses
/// stream `t`.
pub fn monte_carlo_tax(spec: &PackingSpec, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::EmptyInput("trials"));
    }
    if spec.total_capabilities() == 0 {
        return Ok((0.0, 0.0));
    }
    let taxes = map_trials(trials, |t| -> Result<f64> {
        let ensemble = build_packing_stream(spec, seed, t)?;
        Ok(tax_rate(ensemble.safety(), ensemble.capabilities())?.joint_tax)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(mean_and_stderr(&taxes))
}

/// How a tax series behaves as dimension grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Excess tax shrinks like `1/d`: a fixed number of incidental
    /// capabilities; scaling removes the packing residual.
    Fixed,
    /// Excess shrinks, but slower than `1/d`.
    Sublinear,
    /// Excess does not shrink: incidental capabilities grow with `d` and
    /// scaling does not reduce the tax.
    Linear,
    Undetermined,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Fixed => "Fixed",
            Regime::Sublinear => "Sublinear",
            Regime::Linear => "Linear",
            Regime::Undetermined => "Undetermined",
        }
    }
}

/// Outcome of fitting `tax(d) ~ tau_0 + slope / d` to a measured series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeVerdict {
    pub regime: Regime,
    /// Coefficient of `1/d` in the through-origin fit of the excess.
    pub slope: f64,
    /// Fraction of the excess variance the `1/d` model explains.
    pub r_squared: f64,
    /// Largest absolute fit residual.
    pub max_abs_residual: f64,
    /// Spread of the excess across the series, `max - min`.
    pub excess_spread: f64,
    pub mean_excess: f64,
}

/// Classifies a `(d, mean_tax)` series against the scaling regimes, given
/// an estimate of the irreducible tax.
///
/// The thresholds are finite-sample decision rules, not theory: the `1/d`
/// model must explain at least [`R2_FIXED_THRESHOLD`] of the excess
/// variance for a `Fixed` verdict, and a spread below
/// [`PLATEAU_SPREAD_THRESHOLD`] of the mean excess reads as a plateau.
pub fn regime_classify(series: &[(usize, f64)], tau0_estimate: f64) -> Result<RegimeVerdict> {
    let dims = series.iter().map(|&(d, _)| d).collect::<Vec<_>>();
    if dims.len() < 3 || dims.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InsufficientSeries(dims.len()));
    }

    let excess: Vec<f64> = series.iter().map(|&(_, tax)| tax - tau0_estimate).collect();
    let inverse_d: Vec<f64> = series.iter().map(|&(d, _)| 1.0 / d as f64).collect();

    let sum_ex = excess
        .iter()
        .zip(&inverse_d)
        .map(|(e, x)| e * x)
        .sum::<f64>();
    let sum_xx = inverse_d.iter().map(|x| x * x).sum::<f64>();
    let slope = sum_ex / sum_xx;
    let residuals: Vec<f64> = excess
        .iter()
        .zip(&inverse_d)
        .map(|(e, x)| e - slope * x)
        .collect();
    let ss_res = residuals.iter().map(|r| r * r).sum::<f64>();
    let ss_tot = excess.iter().map(|e| e * e).sum::<f64>();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    let max_abs_residual = residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));

    let mean_excess = excess.iter().sum::<f64>() / excess.len() as f64;
    let max_excess = excess.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min_excess = excess.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let excess_spread = max_excess - min_excess;

    let regime = if excess_spread <= PLATEAU_SPREAD_THRESHOLD * mean_excess.abs() {
        if mean_excess.abs() <= PLATEAU_ABSOLUTE_TOLERANCE {
            Regime::Fixed
        } else {
            Regime::Linear
        }
    } else if r_squared >= R2_FIXED_THRESHOLD {
        Regime::Fixed
    } else if excess.windows(2).all(|w| w[1] < w[0]) {
        Regime::Sublinear
    } else {
        Regime::Undetermined
    };

    Ok(RegimeVerdict {
        regime,
        slope,
        r_squared,
        max_abs_residual,
        excess_spread,
        mean_excess,
    })
}

/// One measured point of a scaling series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub d: usize,
    pub mean_tax: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Monte Carlo tax estimates across dimensions, with the irreducible tax
/// and the fitted scaling verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSeries {
    pub points: Vec<ScalingPoint>,
    pub tau0: f64,
    pub fitted_slope: f64,
    pub regime: Regime,
}

fn per_dimension_seed(seed: u64, d: usize) -> u64 {
    // Decorrelates the trial streams of different dimensions.
    seed ^ (d as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs [`monte_carlo_tax`] at each dimension with the same overlaps and
/// incidental count, then fits the scaling regime.
///
/// With fewer than three dimensions the verdict is `Undetermined` and the
/// slope is reported as 0.
pub fn scaling_series(
    gammas: &[f64],
    m_prime: usize,
    d_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<ScalingSeries> {
    if d_values.is_empty() {
        return Err(Error::EmptyInput("dimension values"));
    }
    let mut points = Vec::with_capacity(d_values.len());
    for &d in d_values {
        let spec = PackingSpec::new(d, gammas.to_vec(), m_prime)?;
        let (mean_tax, std_error) = monte_carlo_tax(&spec, trials, per_dimension_seed(seed, d))?;
        points.push(ScalingPoint {
            d,
            mean_tax,
            std_error,
            trials,
        });
    }
    let tau0 = sum_of_squares(gammas);
    let series: Vec<(usize, f64)> = points.iter().map(|p| (p.d, p.mean_tax)).collect();
    let (fitted_slope, regime) = match regime_classify(&series, tau0) {
        Ok(verdict) => (verdict.slope, verdict.regime),
        Err(Error::InsufficientSeries(_)) => (0.0, Regime::Undetermined),
        Err(e) => return Err(e),
    };
    Ok(ScalingSeries {
        points,
        tau0,
        fitted_slope,
        regime,
    })
}

/// Packing prescription for a pair of safety directions sharing intrinsic
/// capabilities.
///
/// Capability `i` has overlap `gamma1[i]` with the first safety direction
/// and `gamma2[i]` with the second; the safeties correlate at `rho0`.
/// Intrinsic capabilities are built mutually orthonormal, so the
/// prescribed overlaps and the capability Gram matrix are realized
/// exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictPackingSpec {
    gamma1: Vec<f64>,
    gamma2: Vec<f64>,
    rho0: f64,
    m_prime: usize,
}

impl ConflictPackingSpec {
    pub fn new(gamma1: Vec<f64>, gamma2: Vec<f64>, rho0: f64, m_prime: usize) -> Result<Self> {
        if gamma1.len() != gamma2.len() {
            return Err(Error::DimensionMismatch {
                expected: gamma1.len(),
                got: gamma2.len(),
            });
        }
        if rho0.is_nan() || rho0.abs() >= 1.0 {
            return Err(Error::SpecInfeasible(format!(
                "safety correlation {rho0} is not inside (-1, 1)"
            )));
        }
        for &g in gamma1.iter().chain(&gamma2) {
            if g.is_nan() || g.abs() >= 1.0 {
                return Err(Error::SpecInfeasible(format!(
                    "intrinsic overlap {g} is not inside (-1, 1)"
                )));
            }
        }
        for (name, g) in [("first", &gamma1), ("second", &gamma2)] {
            let sum_sq = sum_of_squares(g);
            if sum_sq >= 1.0 {
                return Err(Error::SpecInfeasible(format!(
                    "{name} safety direction cannot admit squared overlap mass {sum_sq}"
                )));
            }
        }
        let spec = Self {
            gamma1,
            gamma2,
            rho0,
            m_prime,
        };
        // Realizability of orthonormal capabilities with the prescribed
        // overlaps: the in-plane components must fit inside unit balls.
        if !spec.gamma1.is_empty() {
            let (pp, pq, qq) = spec.plane_gram();
            let trace = pp + qq;
            let det = pp * qq - pq * pq;
            let lambda_max = 0.5 * (trace + (trace * trace - 4.0 * det).max(0.0).sqrt());
            if lambda_max > 1.0 + 1e-12 {
                return Err(Error::SpecInfeasible(format!(
                    "in-plane capability mass {lambda_max} exceeds 1; overlaps not jointly realizable"
                )));
            }
        }
        Ok(spec)
    }

    pub fn gamma1(&self) -> &[f64] {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &[f64] {
        &self.gamma2
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    pub fn intrinsic_count(&self) -> usize {
        self.gamma1.len()
    }

    /// In-plane coefficients of intrinsic capability `i` on the
    /// orthonormal frame `(v1, w)` where `v2 = rho0 v1 + sqrt(1-rho0^2) w`.
    fn plane_coefficients(&self, i: usize) -> (f64, f64) {
        let p = self.gamma1[i];
        let q =
            (self.gamma2[i] - self.rho0 * self.gamma1[i]) / (1.0 - self.rho0 * self.rho0).sqrt();
        (p, q)
    }

    /// Entries of the 2x2 Gram matrix of the stacked in-plane coefficient
    /// vectors.
    fn plane_gram(&self) -> (f64, f64, f64) {
        let mut pp = 0.0;
        let mut pq = 0.0;
        let mut qq = 0.0;
        for i in 0..self.gamma1.len() {
            let (p, q) = self.plane_coefficients(i);
            pp += p * p;
            pq += p * q;
            qq += q * q;
        }
        (pp, pq, qq)
    }
}

/// The limiting capability-mediated angle
/// `arccos((rho0 - sum(g1 g2)) / sqrt((1 - tau01)(1 - tau02)))`.
pub fn irreducible_angle(rho0: f64, gamma1: &[f64], gamma2: &[f64]) -> Result<f64> {
    if gamma1.len() != gamma2.len() {
        return Err(Error::DimensionMismatch {
            expected: gamma1.len(),
            got: gamma2.len(),
        });
    }
    let tau01 = sum_of_squares(gamma1);
    let tau02 = sum_of_squares(gamma2);
    for tau in [tau01, tau02] {
        if 1.0 - tau <= 1e-12 {
            return Err(Error::DegenerateProjection {
                remaining: 1.0 - tau,
            });
        }
    }
    let cross: f64 = gamma1.iter().zip(gamma2).map(|(a, b)| a * b).sum();
    let cos_theta = ((rho0 - cross) / ((1.0 - tau01) * (1.0 - tau02)).sqrt()).clamp(-1.0, 1.0);
    Ok(cos_theta.acos())
}

fn build_conflict_packing(
    spec: &ConflictPackingSpec,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(SafetyPair, CapabilitySet)> {
    let k = spec.intrinsic_count();
    if d < 2 || d < k + 2 {
        return Err(Error::SpecInfeasible(format!(
            "dimension {d} too small for {k} intrinsic capabilities and two safety directions"
        )));
    }

    let v1 = sample_uniform_direction(d, rng);
    let plane_w = sample_complement_direction(&[v1.coords()], d, rng);
    let rho0 = spec.rho0();
    let v2 = Direction::from_vector(v1.coords() * rho0 + &plane_w * (1.0 - rho0 * rho0).sqrt())?;

    let mut members = Vec::with_capacity(k + spec.m_prime());
    if k > 0 {
        // Residual Gram target: capabilities must come out orthonormal, so
        // the out-of-plane parts carry I - S where S is the in-plane Gram.
        let mut s = nalgebra::DMatrix::zeros(k, k);
        let coeffs: Vec<(f64, f64)> = (0..k).map(|i| spec.plane_coefficients(i)).collect();
        for i in 0..k {
            for j in 0..k {
                s[(i, j)] = coeffs[i].0 * coeffs[j].0 + coeffs[i].1 * coeffs[j].1;
            }
        }
        let residual_gram = nalgebra::DMatrix::identity(k, k) - s;
        let eigen = residual_gram.symmetric_eigen();
        let factor = &eigen.eigenvectors
            * nalgebra::DMatrix::from_diagonal(&eigen.eigenvalues.map(|x| x.max(0.0).sqrt()));

        // Orthonormal frame of the out-of-plane complement, one axis per
        // intrinsic capability.
        let mut frame: Vec<DVector<f64>> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut bases: Vec<&DVector<f64>> = vec![v1.coords(), &plane_w];
            bases.extend(frame.iter());
            frame.push(sample_complement_direction(&bases, d, rng));
        }

        for i in 0..k {
            let (p, q) = coeffs[i];
            let mut coords = v1.coords() * p + &plane_w * q;
            for (j, w) in frame.iter().enumerate() {
                coords += w * factor[(i, j)];
            }
            members.push(Direction::from_vector(coords)?);
        }
    }
    for _ in 0..spec.m_prime() {
        members.push(sample_uniform_direction(d, rng));
    }
    if members.is_empty() {
        return Err(Error::EmptyInput("capabilities"));
    }

    let capabilities = CapabilitySet::from_directions(members, DEFAULT_RANK_TOLERANCE)?;
    Ok((SafetyPair::new(v1, v2)?, capabilities))
}

/// Mean capability-mediated angles across dimensions, with the limiting
/// angle `theta0` from the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSeries {
    pub theta0: f64,
    /// `(d, mean theta(d))` per requested dimension.
    pub points: Vec<(usize, f64)>,
}

/// Monte Carlo estimate of the capability-mediated angle at each
/// dimension. Deterministic given `(spec, d_values, trials, seed)`.
pub fn angle_convergence(
    spec: &ConflictPackingSpec,
    d_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<AngleSeries> {
    if trials == 0 {
        return Err(Error::EmptyInput("trials"));
    }
    if d_values.is_empty() {
        return Err(Error::EmptyInput("dimension values"));
    }
    let theta0 = irreducible_angle(spec.rho0(), spec.gamma1(), spec.gamma2())?;
    let mut points = Vec::with_capacity(d_values.len());
    for &d in d_values {
        if spec.intrinsic_count() + spec.m_prime() == 0 {
            // Nothing to project out; the angle is the raw one.
            points.push((d, spec.rho0().clamp(-1.0, 1.0).acos()));
            continue;
        }
        let seed_d = per_dimension_seed(seed, d);
        let thetas = map_trials(trials, |t| -> Result<f64> {
            let mut rng = stream_rng(seed_d, t);
            let (pair, set) = build_conflict_packing(spec, d, &mut rng)?;
            Ok(effective_angle_multi(&pair, &set)?.theta)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        let (mean, _) = mean_and_stderr(&thetas);
        points.push((d, mean));
    }
    Ok(AngleSeries { theta0, points })
}

/// Analytic and Monte Carlo values of `<c, P_U c>` for a uniformly random
/// rank-`r` subspace `U` and uniform `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomProjectionEstimate {
    /// `r / d`, the exact expectation.
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_std_error: f64,
}

/// Estimates the expected squared projection of a random direction onto a
/// random `r`-dimensional subspace; the analytic value is `r/d`.
pub fn expected_random_projection(
    r: usize,
    d: usize,
    trials: usize,
    seed: u64,
) -> Result<RandomProjectionEstimate> {
    if r == 0 || d == 0 || r > d {
        return Err(Error::SpecInfeasible(format!(
            "subspace rank {r} must satisfy 1 <= r <= d = {d}"
        )));
    }
    if trials == 0 {
        return Err(Error::EmptyInput("trials"));
    }
    let values = map_trials(trials, |t| {
        let mut rng = stream_rng(seed, t);
        let raw = nalgebra::DMatrix::from_fn(d, r, |_, _| rng.sample::<f64, _>(StandardNormal));
        let q = raw.qr().q();
        let c = sample_uniform_direction(d, &mut rng);
        (q.transpose() * c.coords()).norm_squared()
    });
    let (mc_mean, mc_std_error) = mean_and_stderr(&values);
    Ok(RandomProjectionEstimate {
        analytic: r as f64 / d as f64,
        mc_mean,
        mc_std_error,
    })
}
