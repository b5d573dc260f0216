//! Numerics for short-geodesic statistics of Weil-Petersson random surfaces.
//!
//! The crate is organized around one exact data source and a stack of
//! numerical layers on top of it:
//!
//! * [`volume`] — exact Weil-Petersson volume polynomials, shipped as a
//!   validated JSON table and evaluated over `Q[pi^2]` so results are
//!   bit-for-bit reproducible.
//! * [`quad`] — a deterministic adaptive Gauss-Kronrod integrator used by
//!   every quadrature in the crate.
//! * [`integrals`] — the primitive-geodesic intensity `(cosh l - 1)/l`, its
//!   window mass, the exponential-growth integral and its inverse, and the
//!   critical length scale derived from them.
//! * [`estimator`] — expected counts of embedded systems of short geodesics,
//!   Bonferroni-style inclusion-exclusion for the systole distribution, and
//!   the large-genus regime classifier.
//! * [`splitting`] — enumeration of the ways a multicurve can split off a
//!   subsurface, the associated moduli-volume integral identities, and the
//!   explicit error budget for separating multicurves.
//! * [`poisson`] — a seeded Poisson point-process simulator for the limiting
//!   primitive length spectrum, with exact-inversion length sampling.

pub mod error;
pub mod estimator;
pub mod integrals;
pub mod poisson;
pub mod quad;
pub mod splitting;
pub mod volume;

pub use error::{Error, Result};
