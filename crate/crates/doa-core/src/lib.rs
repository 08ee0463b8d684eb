//! Unambiguous direction-of-arrival estimation for planar microphone arrays.
//!
//! A pair of closely spaced microphones measures a time delay that pins the
//! source direction only up to a mirror image across the pair axis. This
//! crate resolves that ambiguity for a whole non-linear planar array: every
//! pair contributes its two candidates, all 2^N candidate selections are
//! scored against the mode of their circular kernel density, and the most
//! self-consistent selection yields the array's DOA.
//!
//! The crate also provides the front and back ends around that core: frame
//! splitting and cross-correlation delay estimation for multichannel audio,
//! least-squares triangulation of unambiguous bearings from several arrays,
//! and a Monte-Carlo harness measuring noise robustness end to end.

pub mod angle;
pub mod geometry;
pub mod kde;
pub mod resolver;

pub use geometry::{AmbiguousBearing, ArrayGeometry, GeometryError, MicPair, Position};
pub use kde::{AngleSet, KdeEngine, KdeError, KdeParams};
pub use resolver::{DoaEstimate, Interpretation, ResolveError};
