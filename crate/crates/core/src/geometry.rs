//! Vector and subspace primitives: unit directions, capability subspaces,
//! orthogonal projections, principal angles, and tax rates.
//!
//! The central quantity is the tax rate `tau = ||P_C v||^2`, the squared
//! norm of the projection of a safety direction onto the capability
//! subspace. `tau = 0` means safety is orthogonal to every capability;
//! `tau = 1` means safety lies inside the capability subspace.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Norms at or below this are treated as zero when normalizing input
/// vectors.
pub const ZERO_NORM_TOLERANCE: f64 = 1e-12;

/// Default relative singular-value cutoff for the numerical rank of a
/// capability set. Inputs are noisy; exact-span arithmetic is not assumed.
pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;

/// A unit vector in activation space, holding a safety direction, a
/// normalized capability gradient, or a packed feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    coords: DVector<f64>,
}

impl Direction {
    /// Normalizes `coords` to unit length.
    ///
    /// Fails with [`Error::ZeroVector`] when the norm is at or below
    /// [`ZERO_NORM_TOLERANCE`], which signals a degenerate probe or
    /// gradient.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        Self::from_vector(DVector::from_vec(coords))
    }

    /// Same as [`Direction::new`] for an already-built `nalgebra` vector.
    pub fn from_vector(coords: DVector<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("direction coordinates"));
        }
        let norm = coords.norm();
        // NaN norms fail here too.
        if norm.is_nan() || norm <= ZERO_NORM_TOLERANCE {
            return Err(Error::ZeroVector {
                norm,
                tolerance: ZERO_NORM_TOLERANCE,
            });
        }
        Ok(Self {
            coords: coords / norm,
        })
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The unit coordinate vector.
    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Coordinates as a plain slice.
    pub fn as_slice(&self) -> &[f64] {
        self.coords.as_slice()
    }

    /// Inner product with another direction of the same dimension.
    pub fn dot(&self, other: &Direction) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.coords.dot(&other.coords))
    }

    /// The opposite direction. Negation preserves the unit norm exactly,
    /// so no renormalization happens.
    pub fn flipped(&self) -> Direction {
        Direction {
            coords: -self.coords.clone(),
        }
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Flips the sign of a column so its largest-magnitude entry is positive.
///
/// Capability sets canonicalize member signs before the basis factorization
/// so that sign flips of the inputs leave the computed basis bit-identical.
fn canonical_sign(column: &DVector<f64>) -> f64 {
    let mut lead = 0usize;
    let mut best = 0.0f64;
    for (i, &x) in column.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            lead = i;
        }
    }
    if column[lead] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// An ordered set of capability directions together with its Gram matrix
/// and a rank-revealing orthonormal basis of the spanned subspace.
#[derive(Debug, Clone)]
pub struct CapabilitySet {
    directions: Vec<Direction>,
    gram: DMatrix<f64>,
    basis: DMatrix<f64>,
    rank_tolerance: f64,
}

impl CapabilitySet {
    /// Builds a capability set from raw vectors, normalizing each member.
    ///
    /// `rank_tolerance` is the relative singular-value cutoff deciding the
    /// numerical rank of the spanned subspace.
    pub fn build(vectors: &[DVector<f64>], rank_tolerance: f64) -> Result<Self> {
        let directions = vectors
            .iter()
            .map(|v| Direction::from_vector(v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_directions(directions, rank_tolerance)
    }

    /// Builds a capability set from already-normalized directions.
    pub fn from_directions(directions: Vec<Direction>, rank_tolerance: f64) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::EmptyInput("capability directions"));
        }
        let dim = directions[0].dim();
        for c in &directions[1..] {
            check_dims(dim, c.dim())?;
        }

        let m = directions.len();
        let mut gram = DMatrix::zeros(m, m);
        for i in 0..m {
            gram[(i, i)] = 1.0;
            for j in (i + 1)..m {
                let g = directions[i].coords.dot(&directions[j].coords);
                gram[(i, j)] = g;
                gram[(j, i)] = g;
            }
        }

        // Columns are sign-canonicalized so the factorization, and hence the
        // joint tax, is bitwise invariant under sign flips of the inputs.
        let mut matrix = DMatrix::zeros(dim, m);
        for (j, c) in directions.iter().enumerate() {
            let sign = canonical_sign(c.coords());
            matrix.column_mut(j).copy_from(&(c.coords() * sign));
        }
        let svd = matrix.svd(true, false);
        let sigma_max = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > rank_tolerance * sigma_max)
            .count()
            .max(1);
        let u = svd.u.expect("SVD was computed with compute_u = true");
        let basis = u.columns(0, rank).into_owned();

        Ok(Self {
            directions,
            gram,
            basis,
            rank_tolerance,
        })
    }

    /// Number of member directions `m`.
    pub fn len(&self) -> usize {
        self.directions.len()
    }

    /// True when the set has no members (never constructible).
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Ambient dimension `d`.
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Numerical rank `r` of the spanned subspace.
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// The member directions, in input order.
    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    /// The m-by-m Gram matrix of the member directions.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// The d-by-r column-orthonormal basis of the spanned subspace.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// The relative singular-value cutoff used for the rank decision.
    pub fn rank_tolerance(&self) -> f64 {
        self.rank_tolerance
    }

    /// Orthogonal projection `P_C v` of a direction onto the subspace.
    pub fn project(&self, v: &Direction) -> Result<DVector<f64>> {
        self.project_vector(v.coords())
    }

    /// Orthogonal projection of an arbitrary vector onto the subspace.
    pub fn project_vector(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        check_dims(self.dim(), v.len())?;
        Ok(&self.basis * (self.basis.transpose() * v))
    }

    /// The component of `v` orthogonal to the subspace, `v - P_C v`.
    pub fn complement(&self, v: &Direction) -> Result<DVector<f64>> {
        Ok(v.coords() - self.project(v)?)
    }
}

/// Report of the alignment tax of a safety direction against a capability
/// set.
#[derive(Debug, Clone, PartialEq)]
pub struct TaxReport {
    /// Joint tax `||P_C v||^2` against the whole subspace, in `[0, 1]`.
    pub joint_tax: f64,
    /// Per-task rates `(i, <v, c_i>^2)` against each individual capability.
    pub per_task: Vec<(usize, f64)>,
    /// `sqrt(1 - joint_tax)`: the fraction of a perturbation budget that
    /// buys safety at zero capability cost.
    pub free_safety_fraction: f64,
}

/// Angle `arccos(<v, c>)` between two directions, in `[0, pi]`.
///
/// The inner product is clamped into `[-1, 1]` before `arccos`; round-off
/// can push it past 1 by about 1e-16.
pub fn principal_angle(v: &Direction, c: &Direction) -> Result<f64> {
    Ok(v.dot(c)?.clamp(-1.0, 1.0).acos())
}

/// Computes the joint and per-task tax rates of `v` against `set`.
///
/// The joint rate goes through the orthonormal basis rather than an
/// explicit Gram inverse, which is mathematically identical on the ranked
/// subspace and avoids amplification when the Gram matrix is
/// near-singular.
pub fn tax_rate(v: &Direction, set: &CapabilitySet) -> Result<TaxReport> {
    check_dims(set.dim(), v.dim())?;
    let projected = set.basis().transpose() * v.coords();
    let joint_tax = projected.norm_squared().clamp(0.0, 1.0);
    let per_task = set
        .directions()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let overlap = c.coords().dot(v.coords());
            (i, (overlap * overlap).clamp(0.0, 1.0))
        })
        .collect();
    Ok(TaxReport {
        joint_tax,
        per_task,
        free_safety_fraction: (1.0 - joint_tax).max(0.0).sqrt(),
    })
}
