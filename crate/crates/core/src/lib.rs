//! Geometry of safety-capability tradeoffs in representation space.
//!
//! Safety and capability objectives are modeled as unit directions in the
//! activation space of a model. Given a safety direction, a set of
//! capability directions, and a norm budget on representation shifts, this
//! crate computes:
//!
//! - tax rates (joint and per-task) from the subspace geometry
//!   ([`geometry`]),
//! - exact safety-capability Pareto frontiers, optimal perturbations, and
//!   anisotropic budget whitening ([`frontier`]),
//! - safety-safety tradeoffs under capability preservation, driven by
//!   partial correlations ([`conflict`]),
//! - a Monte Carlo laboratory for how the tax scales with dimension under
//!   a feature-packing model ([`scaling`]),
//! - brute-force oracles that independently verify every closed form
//!   ([`oracle`]).
//!
//! All operations are pure functions on immutable values and are safe to
//! call concurrently. Stochastic operations take an explicit 64-bit seed
//! and are bit-for-bit reproducible, independent of thread count.
//!
//! ```
//! use paretax::frontier::{frontier_safety, optimal_delta_single};
//! use paretax::geometry::{principal_angle, tax_rate, CapabilitySet, Direction};
//!
//! # fn main() -> paretax::Result<()> {
//! let safety = Direction::new(vec![1.0, 0.0, 0.0])?;
//! let math = Direction::new(vec![0.0, 1.0, 0.0])?;
//! let set = CapabilitySet::from_directions(vec![math.clone()], 1e-10)?;
//!
//! // Orthogonal capability: no tax, and the frontier is a quarter circle.
//! assert!(tax_rate(&safety, &set)?.joint_tax < 1e-12);
//! let alpha = principal_angle(&safety, &math)?;
//! let best = frontier_safety(alpha, 1.0, 0.6)?;
//! assert!((best - 0.8).abs() < 1e-12);
//!
//! // A unit-norm perturbation attains it.
//! let delta = optimal_delta_single(&safety, &math, 1.0, 0.6)?;
//! assert!((delta.norm() - 1.0).abs() < 1e-10);
//! assert!((safety.coords().dot(delta.delta()) - best).abs() < 1e-10);
//! # Ok(())
//! # }
//! ```

pub mod conflict;
pub mod error;
pub mod frontier;
pub mod geometry;
pub mod oracle;
pub mod scaling;

pub use error::{Error, Result};
pub use geometry::{CapabilitySet, Direction, TaxReport};
