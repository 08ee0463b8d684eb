//! Planar array model: microphone pairs, pair-frame DOAs, and the mapping
//! from a pair-frame DOA to its two mirror-image polar candidates.
//!
//! Conventions used throughout the crate:
//! * polar angles are measured counterclockwise from the +x axis, in `[0, 2π)`;
//! * a pair's `axis_angle` names the line through its two microphones and is
//!   stored in `[0, π)`;
//! * the pair-frame DOA `alpha` is measured from the pair's broadside, so a
//!   source on the broadside has `alpha = 0` and an endfire source has
//!   `alpha = ±π/2`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use thiserror::Error;

use crate::angle::{wrap_pi, wrap_tau};

/// Relative slack allowed when `|τv/d|` exceeds 1 before a delay is rejected.
pub const DEFAULT_CLAMP_TOLERANCE: f64 = 1e-9;

/// Arrays whose largest microphone triangle is smaller than this are rejected
/// as collinear (square meters).
pub const DEFAULT_COLLINEARITY_AREA: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("array needs at least 3 microphones, got {0}")]
    TooFewMics(usize),
    #[error("microphones {0} and {1} share the same position")]
    DuplicateMics(usize, usize),
    #[error("microphones are collinear (max triangle area {area:.3e} m^2 below {tolerance:.3e})")]
    CollinearArray { area: f64, tolerance: f64 },
    #[error("speed of sound must be positive, got {0}")]
    NonPositiveSpeed(f64),
    #[error("delay out of range: |tau*v/d| = {0} exceeds 1")]
    OutOfRange(f64),
    #[error("degenerate geometry: the two points coincide")]
    DegenerateGeometry,
}

/// A point in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Position {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Planar microphone array plus the speed of sound it operates in.
#[derive(Debug, Clone)]
pub struct ArrayGeometry {
    mics: Vec<Position>,
    speed_of_sound: f64,
}

impl ArrayGeometry {
    /// Validates and builds an array with the default collinearity tolerance.
    pub fn new(mics: Vec<Position>, speed_of_sound: f64) -> Result<Self, GeometryError> {
        Self::with_collinearity_tolerance(mics, speed_of_sound, DEFAULT_COLLINEARITY_AREA)
    }

    pub fn with_collinearity_tolerance(
        mics: Vec<Position>,
        speed_of_sound: f64,
        area_tolerance: f64,
    ) -> Result<Self, GeometryError> {
        if mics.len() < 3 {
            return Err(GeometryError::TooFewMics(mics.len()));
        }
        if speed_of_sound <= 0.0 || !speed_of_sound.is_finite() {
            return Err(GeometryError::NonPositiveSpeed(speed_of_sound));
        }
        for i in 0..mics.len() {
            for j in (i + 1)..mics.len() {
                if mics[i] == mics[j] {
                    return Err(GeometryError::DuplicateMics(i, j));
                }
            }
        }
        let area = max_triangle_area(&mics);
        if area < area_tolerance {
            return Err(GeometryError::CollinearArray {
                area,
                tolerance: area_tolerance,
            });
        }
        Ok(Self {
            mics,
            speed_of_sound,
        })
    }

    /// The reference array used throughout: `count` microphones evenly spaced
    /// on a circle of the given radius, the first at angle 0.
    pub fn circular(count: usize, radius: f64, speed_of_sound: f64) -> Result<Self, GeometryError> {
        let mics = (0..count)
            .map(|k| {
                let theta = TAU * k as f64 / count as f64;
                Position::new(radius * theta.cos(), radius * theta.sin())
            })
            .collect();
        Self::new(mics, speed_of_sound)
    }

    pub fn mics(&self) -> &[Position] {
        &self.mics
    }

    pub fn mic_count(&self) -> usize {
        self.mics.len()
    }

    pub fn speed_of_sound(&self) -> f64 {
        self.speed_of_sound
    }

    /// Mean of the microphone positions; the array's nominal phase center.
    pub fn centroid(&self) -> Position {
        let n = self.mics.len() as f64;
        let (sx, sy) = self
            .mics
            .iter()
            .fold((0.0, 0.0), |(sx, sy), m| (sx + m.x, sy + m.y));
        Position::new(sx / n, sy / n)
    }

    pub fn pairs(&self) -> Vec<MicPair> {
        enumerate_pairs(self)
    }
}

/// One microphone pair treated as a two-element linear array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicPair {
    pub index_a: usize,
    pub index_b: usize,
    pub midpoint: Position,
    /// Distance between the two microphones, meters.
    pub baseline: f64,
    /// Direction of the line through the pair, in `[0, π)`.
    pub axis_angle: f64,
    /// True when the vector from mic `index_a` to mic `index_b` pointed into
    /// `[π, 2π)` before reduction, i.e. the stored axis runs from b to a.
    reversed: bool,
}

impl MicPair {
    fn new(index_a: usize, index_b: usize, a: Position, b: Position) -> Self {
        let raw = (b.y - a.y).atan2(b.x - a.x);
        let raw = wrap_tau(raw);
        Self {
            index_a,
            index_b,
            midpoint: Position::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0),
            baseline: a.distance(b),
            axis_angle: wrap_pi(raw),
            reversed: raw >= PI,
        }
    }

    /// Converts a measured delay (arrival at mic `index_b` minus arrival at
    /// mic `index_a`) into the delay measured along the stored axis direction,
    /// which is what [`pair_doa_from_tde`] and [`to_polar_candidates`] expect.
    pub fn axis_aligned_tau(&self, tau: f64) -> f64 {
        if self.reversed {
            tau
        } else {
            -tau
        }
    }

    /// Full pipeline step: measured delay to the pair's two polar candidates.
    pub fn candidates_from_delay(
        &self,
        tau: f64,
        speed_of_sound: f64,
    ) -> Result<AmbiguousBearing, GeometryError> {
        let alpha = pair_doa_from_tde(self.axis_aligned_tau(tau), self.baseline, speed_of_sound)?;
        Ok(to_polar_candidates(alpha, self))
    }
}

/// A pair's two mirror-image polar DOA candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguousBearing {
    pub pair: MicPair,
    pub phi_prime: f64,
    pub phi_double_prime: f64,
}

impl AmbiguousBearing {
    /// Builds the candidate set from one known polar angle: the angle itself
    /// plus its reflection across the pair axis.
    pub fn from_candidate(pair: MicPair, phi: f64) -> Self {
        let phi_prime = wrap_tau(phi);
        Self {
            pair,
            phi_prime,
            phi_double_prime: wrap_tau(2.0 * pair.axis_angle - phi_prime),
        }
    }
}

/// All microphone pairs of the array, ordered by `(index_a, index_b)` with
/// `index_a < index_b`. An `M`-microphone array yields `M(M-1)/2` pairs.
pub fn enumerate_pairs(geometry: &ArrayGeometry) -> Vec<MicPair> {
    let mics = geometry.mics();
    let mut pairs = Vec::with_capacity(mics.len() * (mics.len() - 1) / 2);
    for a in 0..mics.len() {
        for b in (a + 1)..mics.len() {
            pairs.push(MicPair::new(a, b, mics[a], mics[b]));
        }
    }
    pairs
}

/// Pair-frame DOA from a time delay: `alpha = arcsin(τ v / d)`, in
/// `[-π/2, π/2]`.
///
/// Delays slightly past the physical maximum (|τv/d| within the relative
/// clamp tolerance of 1) are clamped to ±1; anything further out is rejected.
pub fn pair_doa_from_tde(tau: f64, d: f64, v: f64) -> Result<f64, GeometryError> {
    pair_doa_from_tde_with_tolerance(tau, d, v, DEFAULT_CLAMP_TOLERANCE)
}

pub fn pair_doa_from_tde_with_tolerance(
    tau: f64,
    d: f64,
    v: f64,
    clamp_tolerance: f64,
) -> Result<f64, GeometryError> {
    debug_assert!(d > 0.0 && v > 0.0);
    let x = tau * v / d;
    if x.abs() > 1.0 + clamp_tolerance {
        return Err(GeometryError::OutOfRange(x));
    }
    Ok(x.clamp(-1.0, 1.0).asin())
}

/// Maps a pair-frame DOA to its two polar candidates:
/// `φ' = axis + π/2 - α` and its reflection across the pair axis.
pub fn to_polar_candidates(alpha: f64, pair: &MicPair) -> AmbiguousBearing {
    debug_assert!((-FRAC_PI_2..=FRAC_PI_2).contains(&alpha));
    AmbiguousBearing::from_candidate(*pair, pair.axis_angle + FRAC_PI_2 - alpha)
}

/// Four-quadrant angle of the vector `from -> to`, wrapped to `[0, 2π)`.
pub fn true_doa(from: Position, to: Position) -> Result<f64, GeometryError> {
    let dx = to.x - from.x;
    let dy = to.y - from.y;
    let scale = 1.0 + from.x.abs() + from.y.abs() + to.x.abs() + to.y.abs();
    if dx.abs() <= f64::EPSILON * scale && dy.abs() <= f64::EPSILON * scale {
        return Err(GeometryError::DegenerateGeometry);
    }
    Ok(wrap_tau(dy.atan2(dx)))
}

fn max_triangle_area(mics: &[Position]) -> f64 {
    let mut max = 0.0f64;
    for i in 0..mics.len() {
        for j in (i + 1)..mics.len() {
            for k in (j + 1)..mics.len() {
                let (a, b, c) = (mics[i], mics[j], mics[k]);
                let cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
                max = max.max(cross.abs() / 2.0);
            }
        }
    }
    max
}
