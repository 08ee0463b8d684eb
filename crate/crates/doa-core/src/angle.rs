//! Angle arithmetic on the circle.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `[0, 2π)`.
#[inline]
pub fn wrap_tau(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    // rem_euclid can return exactly TAU when the input is a tiny negative number.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `[0, π)`, identifying a direction with its opposite.
#[inline]
pub fn wrap_pi(angle: f64) -> f64 {
    let w = angle.rem_euclid(PI);
    if w >= PI {
        0.0
    } else {
        w
    }
}

/// Magnitude of the smallest rotation between two angles, in `[0, π]`.
#[inline]
pub fn wrapped_abs_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
