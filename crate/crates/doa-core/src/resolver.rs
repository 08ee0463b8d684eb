//! Resolution of pairwise DOA ambiguities.
//!
//! Each of the N microphone pairs contributes two mirror-image candidates,
//! giving 2^N ways to interpret the set. Every interpretation is scored by
//! the sum of wrapped absolute deviations between its chosen angles and the
//! mode of their kernel density; the interpretation with the smallest score
//! wins and its mode is the array's DOA estimate.
//!
//! The scan walks interpretations in Gray-code order so each step updates
//! the smoothed histogram by one kernel row in and one out, instead of
//! rebuilding it. Work is split into chunks whose boundaries depend only on
//! N, so the winner is bit-identical no matter how the chunks are scheduled
//! across threads.

use rayon::prelude::*;
use thiserror::Error;

use crate::angle::wrapped_abs_diff;
use crate::geometry::AmbiguousBearing;
use crate::kde::{refine_mode, AngleSet, KdeEngine, KdeParams};

/// Default cap on the number of pairs; 2^N interpretations are enumerated.
pub const DEFAULT_MAX_PAIRS: usize = 24;

/// Hard cap imposed by the u64 selection mask.
const ABSOLUTE_MAX_PAIRS: usize = 63;

#[derive(Debug, Error, PartialEq)]
pub enum ResolveError {
    #[error("no ambiguous bearings provided")]
    Empty,
    #[error("a single pair is irreducibly ambiguous; at least two are required")]
    SinglePair,
    #[error("{n} pairs would enumerate 2^{n} interpretations, above the guard of {max}")]
    TooManyPairs { n: usize, max: usize },
}

/// One of the 2^N candidate selections. Bit `n` of the mask chooses
/// `phi_double_prime` of pair `n`; a clear bit chooses `phi_prime`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpretation {
    pub index: u64,
    pub selection: u64,
    pub angles: AngleSet,
}

/// Lazy iterator over all interpretations in ascending mask order.
#[derive(Debug)]
pub struct Interpretations<'a> {
    bearings: &'a [AmbiguousBearing],
    next: u64,
    total: u64,
}

impl Iterator for Interpretations<'_> {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        if self.next >= self.total {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let angles: Vec<f64> = self
            .bearings
            .iter()
            .enumerate()
            .map(|(n, b)| {
                if mask >> n & 1 == 0 {
                    b.phi_prime
                } else {
                    b.phi_double_prime
                }
            })
            .collect();
        Some(Interpretation {
            index: mask,
            selection: mask,
            angles: AngleSet::new(angles).expect("bearing list is non-empty"),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let remaining = (self.total - self.next) as usize;
        (remaining, Some(remaining))
    }
}

impl ExactSizeIterator for Interpretations<'_> {}

/// All 2^N interpretations of the bearing list, lazily.
pub fn enumerate_interpretations(
    bearings: &[AmbiguousBearing],
) -> Result<Interpretations<'_>, ResolveError> {
    enumerate_interpretations_bounded(bearings, DEFAULT_MAX_PAIRS)
}

pub fn enumerate_interpretations_bounded(
    bearings: &[AmbiguousBearing],
    max_pairs: usize,
) -> Result<Interpretations<'_>, ResolveError> {
    let n = bearings.len();
    if n == 0 {
        return Err(ResolveError::Empty);
    }
    let max = max_pairs.min(ABSOLUTE_MAX_PAIRS);
    if n > max {
        return Err(ResolveError::TooManyPairs { n, max });
    }
    Ok(Interpretations {
        bearings,
        next: 0,
        total: 1u64 << n,
    })
}

/// Sum over the set of the smallest wrapped angular distance to `phi_hat`.
/// Each term lies in `[0, π]`.
pub fn interpretation_error(angles: &AngleSet, phi_hat: f64) -> f64 {
    angles
        .angles()
        .iter()
        .map(|&a| wrapped_abs_diff(a, phi_hat))
        .sum()
}

/// Final unambiguous DOA for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    /// Consensus mode of the winning interpretation, in `[0, 2π)`.
    pub phi_hat: f64,
    /// Winning interpretation's error score, radians.
    pub error: f64,
    /// Index (= selection mask) of the winning interpretation.
    pub winner: u64,
    /// Wrapped deviation of each pair's chosen angle from `phi_hat`.
    pub per_pair_residuals: Vec<f64>,
    /// Interpretations whose mode refinement hit the iteration cap; their
    /// best iterates were scored as-is.
    pub non_converged_interpretations: u64,
}

/// Scores every interpretation and returns the argmin by `(error, index)`.
pub fn resolve(
    bearings: &[AmbiguousBearing],
    params: &KdeParams,
) -> Result<DoaEstimate, ResolveError> {
    resolve_bounded(bearings, params, DEFAULT_MAX_PAIRS)
}

pub fn resolve_bounded(
    bearings: &[AmbiguousBearing],
    params: &KdeParams,
    max_pairs: usize,
) -> Result<DoaEstimate, ResolveError> {
    let n = bearings.len();
    if n == 0 {
        return Err(ResolveError::Empty);
    }
    if n == 1 {
        return Err(ResolveError::SinglePair);
    }
    let max = max_pairs.min(ABSOLUTE_MAX_PAIRS);
    if n > max {
        return Err(ResolveError::TooManyPairs { n, max });
    }

    let engine = KdeEngine::new(*params);
    let candidates: Vec<PairCandidates> =
        bearings.iter().map(|b| PairCandidates::new(b, &engine)).collect();

    let total = 1u64 << n;
    // Chunk boundaries depend only on N, never on the thread count.
    let chunk_len = (total / 128).max(64);
    let starts: Vec<u64> = (0..total).step_by(chunk_len as usize).collect();

    let chunk_results: Vec<ChunkResult> = starts
        .par_iter()
        .map(|&t0| scan_chunk(t0, (t0 + chunk_len).min(total), &candidates, &engine))
        .collect();

    let mut best = chunk_results[0].best;
    let mut non_converged = 0;
    for r in &chunk_results {
        non_converged += r.non_converged;
        if (r.best.error, r.best.mask) < (best.error, best.mask) {
            best = r.best;
        }
    }

    let per_pair_residuals: Vec<f64> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| wrapped_abs_diff(c.angle[(best.mask >> i & 1) as usize], best.phi_hat))
        .collect();
    let error = per_pair_residuals.iter().sum();

    Ok(DoaEstimate {
        phi_hat: best.phi_hat,
        error,
        winner: best.mask,
        per_pair_residuals,
        non_converged_interpretations: non_converged,
    })
}

struct PairCandidates {
    /// `[phi_prime, phi_double_prime]` and their trig tables and bins.
    angle: [f64; 2],
    sin: [f64; 2],
    cos: [f64; 2],
    bin: [usize; 2],
}

impl PairCandidates {
    fn new(bearing: &AmbiguousBearing, engine: &KdeEngine) -> Self {
        let angle = [bearing.phi_prime, bearing.phi_double_prime];
        Self {
            angle,
            sin: [angle[0].sin(), angle[1].sin()],
            cos: [angle[0].cos(), angle[1].cos()],
            bin: [engine.bin_of(angle[0]), engine.bin_of(angle[1])],
        }
    }
}

#[derive(Clone, Copy)]
struct BestInterpretation {
    error: f64,
    mask: u64,
    phi_hat: f64,
}

struct ChunkResult {
    best: BestInterpretation,
    non_converged: u64,
}

#[inline]
fn gray(t: u64) -> u64 {
    t ^ (t >> 1)
}

/// Walks masks `gray(t)` for `t` in `[t0, t1)`, maintaining the smoothed
/// histogram and the selected-candidate tables incrementally.
fn scan_chunk(
    t0: u64,
    t1: u64,
    candidates: &[PairCandidates],
    engine: &KdeEngine,
) -> ChunkResult {
    let params = *engine.params();
    let n = candidates.len();
    let bins = params.bins();

    let mut mask = gray(t0);
    let mut smoothed = vec![0.0f64; bins];
    let mut group_max = vec![f64::NEG_INFINITY; bins / GROUP];
    let mut sel_angle = vec![0.0f64; n];
    let mut sel_sin = vec![0.0f64; n];
    let mut sel_cos = vec![0.0f64; n];
    for (i, c) in candidates.iter().enumerate() {
        let pick = (mask >> i & 1) as usize;
        add_row(&mut smoothed, engine.kernel_row(c.bin[pick]));
        sel_angle[i] = c.angle[pick];
        sel_sin[i] = c.sin[pick];
        sel_cos[i] = c.cos[pick];
    }
    rebuild_group_max(&smoothed, &mut group_max);

    let mut best = BestInterpretation {
        error: f64::INFINITY,
        mask: u64::MAX,
        phi_hat: 0.0,
    };
    let mut non_converged = 0u64;

    for t in t0..t1 {
        let phi0 = engine.bin_center(argmax_grouped(&smoothed, &group_max));
        let outcome = refine_mode(
            phi0,
            &sel_sin,
            &sel_cos,
            params.kappa(),
            params.ncg_tolerance(),
            params.max_iterations(),
        );
        if !outcome.converged {
            non_converged += 1;
        }
        let error: f64 = sel_angle
            .iter()
            .map(|&a| wrapped_abs_diff(a, outcome.mode))
            .sum();
        if (error, mask) < (best.error, best.mask) {
            best = BestInterpretation {
                error,
                mask,
                phi_hat: outcome.mode,
            };
        }

        if t + 1 == t1 {
            break;
        }
        let flip = (t + 1).trailing_zeros() as usize;
        let was = (mask >> flip & 1) as usize;
        let c = &candidates[flip];
        swap_row(
            &mut smoothed,
            engine.kernel_row(c.bin[was ^ 1]),
            engine.kernel_row(c.bin[was]),
            &mut group_max,
        );
        mask ^= 1 << flip;
        sel_angle[flip] = c.angle[was ^ 1];
        sel_sin[flip] = c.sin[was ^ 1];
        sel_cos[flip] = c.cos[was ^ 1];
    }

    ChunkResult {
        best,
        non_converged,
    }
}

/// Bins per max-tracking group. The update pass folds each group's max as it
/// goes, so the argmax only scans `bins / GROUP` entries plus one group.
const GROUP: usize = 8;

#[inline]
fn max8(d: &[f64]) -> f64 {
    let m0 = d[0].max(d[1]);
    let m1 = d[2].max(d[3]);
    let m2 = d[4].max(d[5]);
    let m3 = d[6].max(d[7]);
    m0.max(m1).max(m2.max(m3))
}

#[inline]
fn add_row(dst: &mut [f64], row: &[f64]) {
    for (d, r) in dst.iter_mut().zip(row) {
        *d += r;
    }
}

#[inline]
fn rebuild_group_max(values: &[f64], group_max: &mut [f64]) {
    for (g, chunk) in values.chunks_exact(GROUP).enumerate() {
        group_max[g] = max8(chunk);
    }
}

#[inline]
fn swap_row(dst: &mut [f64], add: &[f64], sub: &[f64], group_max: &mut [f64]) {
    for (g, ((d, a), s)) in dst
        .chunks_exact_mut(GROUP)
        .zip(add.chunks_exact(GROUP))
        .zip(sub.chunks_exact(GROUP))
        .enumerate()
    {
        for j in 0..GROUP {
            d[j] += a[j] - s[j];
        }
        group_max[g] = max8(d);
    }
}

/// Index of the first occurrence of the global maximum; equivalent to a
/// plain left-to-right scan of `values`.
#[inline]
fn argmax_grouped(values: &[f64], group_max: &[f64]) -> usize {
    let mut g_best = 0;
    let mut v_best = group_max[0];
    for (g, &v) in group_max.iter().enumerate().skip(1) {
        if v > v_best {
            v_best = v;
            g_best = g;
        }
    }
    let base = g_best * GROUP;
    for j in 0..GROUP {
        if values[base + j] == v_best {
            return base + j;
        }
    }
    base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angle::wrap_tau;
    use crate::geometry::{true_doa, ArrayGeometry, Position};
    use crate::kde::{find_mode, KdeError};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn circle6() -> ArrayGeometry {
        ArrayGeometry::circular(6, 0.2, 343.0).unwrap()
    }

    /// Candidates a real source would produce: the true per-pair DOA from the
    /// pair midpoint plus its mirror, each optionally perturbed.
    fn bearings_for_source(
        geom: &ArrayGeometry,
        source: Position,
        noise: impl FnMut(usize) -> f64,
    ) -> Vec<AmbiguousBearing> {
        let mut noise = noise;
        geom.pairs()
            .iter()
            .enumerate()
            .map(|(i, pair)| {
                let phi = true_doa(pair.midpoint, source).unwrap() + noise(i);
                AmbiguousBearing::from_candidate(*pair, phi)
            })
            .collect()
    }

    #[test]
    fn enumerate_counts() {
        let geom = circle6();
        let bearings = bearings_for_source(&geom, Position::new(0.0, 500.0), |_| 0.0);
        assert_eq!(enumerate_interpretations(&bearings).unwrap().len(), 32768);

        let one = &bearings[..1];
        let masks: Vec<u64> = enumerate_interpretations(one).unwrap().map(|i| i.index).collect();
        assert_eq!(masks, vec![0, 1]);

        let three = &bearings[..3];
        let masks: Vec<u64> = enumerate_interpretations(three)
            .unwrap()
            .map(|i| i.index)
            .collect();
        assert_eq!(masks, (0..8).collect::<Vec<u64>>());

        assert_eq!(enumerate_interpretations(&[]).unwrap_err(), ResolveError::Empty);
    }

    #[test]
    fn enumerate_guards_blowup() {
        let geom = ArrayGeometry::circular(8, 0.2, 343.0).unwrap();
        let bearings = bearings_for_source(&geom, Position::new(10.0, 10.0), |_| 0.0);
        assert_eq!(bearings.len(), 28);
        assert_eq!(
            enumerate_interpretations(&bearings).unwrap_err(),
            ResolveError::TooManyPairs { n: 28, max: 24 }
        );
        assert!(enumerate_interpretations_bounded(&bearings, 28).is_ok());
    }

    #[test]
    fn interpretation_selects_by_mask() {
        let geom = circle6();
        let bearings = bearings_for_source(&geom, Position::new(3.0, 40.0), |_| 0.0);
        let three = &bearings[..3];
        let interp = enumerate_interpretations(three).unwrap().nth(0b101).unwrap();
        let angles = interp.angles.angles();
        assert_eq!(angles[0], three[0].phi_double_prime);
        assert_eq!(angles[1], three[1].phi_prime);
        assert_eq!(angles[2], three[2].phi_double_prime);
    }

    #[test]
    fn error_examples() {
        let set = AngleSet::new(vec![0.7, 0.7, 0.7]).unwrap();
        assert!(interpretation_error(&set, 0.7) < 1e-12);

        let set = AngleSet::new(vec![0.0, 90f64.to_radians()]).unwrap();
        let err = interpretation_error(&set, 45f64.to_radians());
        assert!((err - 90f64.to_radians()).abs() < 1e-12);

        let set = AngleSet::new(vec![350f64.to_radians(), 10f64.to_radians()]).unwrap();
        let err = interpretation_error(&set, 0.0);
        assert!((err - 20f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn resolve_rejects_degenerate_inputs() {
        let geom = circle6();
        let bearings = bearings_for_source(&geom, Position::new(0.0, 500.0), |_| 0.0);
        let params = KdeParams::default();
        assert_eq!(resolve(&[], &params).unwrap_err(), ResolveError::Empty);
        assert_eq!(
            resolve(&bearings[..1], &params).unwrap_err(),
            ResolveError::SinglePair
        );
    }

    #[test]
    fn resolve_noise_free_circle() {
        let geom = circle6();
        let source = Position::new(0.0, 500.0);
        let bearings = bearings_for_source(&geom, source, |_| 0.0);
        let estimate = resolve(&bearings, &KdeParams::default()).unwrap();

        assert!(
            wrapped_abs_diff(estimate.phi_hat, 90f64.to_radians()) < 0.01f64.to_radians(),
            "phi_hat {}",
            estimate.phi_hat.to_degrees()
        );
        // Pair midpoints sit up to ~0.17 m from the array center, so each
        // true per-pair DOA carries ~3e-4 rad of parallax at 500 m.
        assert!(estimate.error < 0.01);
        assert_eq!(estimate.per_pair_residuals.len(), 15);

        // Winner picks the true-side candidate of every pair. A wrong-side
        // pick on a non-degenerate pair is off by many degrees; the pair
        // whose axis points at the source has both candidates within the
        // parallax scale (aperture / distance ~ 8e-4 rad) of the truth, and
        // either pick is correct there.
        for (i, b) in bearings.iter().enumerate() {
            let truth = true_doa(b.pair.midpoint, source).unwrap();
            let picked = if estimate.winner >> i & 1 == 0 {
                b.phi_prime
            } else {
                b.phi_double_prime
            };
            assert!(
                wrapped_abs_diff(picked, truth) < 1e-3,
                "pair {i}: picked {picked} truth {truth}"
            );
        }
    }

    /// Independent rescoring: dense-grid modes, full enumeration, no reuse of
    /// the resolver's scan machinery.
    fn oracle_winner(bearings: &[AmbiguousBearing], kappa: f64) -> (u64, f64) {
        let n = bearings.len();
        let mut best = (u64::MAX, f64::INFINITY, 0.0);
        for mask in 0..(1u64 << n) {
            let angles: Vec<f64> = bearings
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if mask >> i & 1 == 0 {
                        b.phi_prime
                    } else {
                        b.phi_double_prime
                    }
                })
                .collect();
            let set = AngleSet::new(angles).unwrap();
            let coarse = {
                let step = 0.01f64.to_radians();
                let mut best_phi = 0.0;
                let mut best_v = f64::NEG_INFINITY;
                let mut phi = 0.0;
                while phi < TAU {
                    let v = crate::kde::kde_value(phi, &set, kappa);
                    if v > best_v {
                        best_v = v;
                        best_phi = phi;
                    }
                    phi += step;
                }
                best_phi
            };
            let mode = {
                let step = 0.001f64.to_radians();
                let mut best_phi = coarse;
                let mut best_v = f64::NEG_INFINITY;
                let mut phi = coarse - 0.02f64.to_radians();
                while phi < coarse + 0.02f64.to_radians() {
                    let v = crate::kde::kde_value(phi, &set, kappa);
                    if v > best_v {
                        best_v = v;
                        best_phi = phi;
                    }
                    phi += step;
                }
                wrap_tau(best_phi)
            };
            let err = interpretation_error(&set, mode);
            if err < best.1 {
                best = (mask, err, mode);
            }
        }
        (best.0, best.2)
    }

    #[test]
    fn resolve_matches_small_oracle() {
        // Three pairs, one candidate deliberately mirrored, moderate noise.
        let geom = ArrayGeometry::new(
            vec![
                Position::new(-0.1, 0.0),
                Position::new(0.1, 0.0),
                Position::new(0.0, 0.15),
            ],
            343.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let phi = rng.gen::<f64>() * TAU;
            let source = Position::new(200.0 * phi.cos(), 200.0 * phi.sin());
            let sigma = 5f64.to_radians();
            let bearings = bearings_for_source(&geom, source, |_| sigma * rng.sample::<f64, _>(rand_distr::StandardNormal));
            let params = KdeParams::default();
            let estimate = resolve(&bearings, &params).unwrap();
            let (oracle_mask, oracle_mode) = oracle_winner(&bearings, params.kappa());
            assert_eq!(estimate.winner, oracle_mask);
            assert!(wrapped_abs_diff(estimate.phi_hat, oracle_mode) < 0.01f64.to_radians());
        }
    }

    #[test]
    fn winner_beats_all_zeros_mask() {
        let geom = circle6();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let phi = rng.gen::<f64>() * TAU;
            let source = Position::new(100.0 * phi.cos(), 100.0 * phi.sin());
            let sigma = 15f64.to_radians();
            let bearings: Vec<AmbiguousBearing> =
                bearings_for_source(&geom, source, |_| sigma * rng.sample::<f64, _>(rand_distr::StandardNormal))
                    .into_iter()
                    .take(8)
                    .collect();
            let params = KdeParams::default();
            let estimate = resolve(&bearings, &params).unwrap();

            let zero = enumerate_interpretations(&bearings).unwrap().next().unwrap();
            let mode = match find_mode(&zero.angles, params) {
                Ok(m) => m,
                Err(KdeError::NoConvergence { best, .. }) => best,
                Err(e) => panic!("{e}"),
            };
            let zero_err = interpretation_error(&zero.angles, mode);
            assert!(estimate.error <= zero_err + 1e-9);
        }
    }

    #[test]
    fn resolve_is_deterministic() {
        let geom = circle6();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let sigma = 20f64.to_radians();
        let bearings = bearings_for_source(&geom, Position::new(40.0, -70.0), |_| {
            sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)
        });
        let params = KdeParams::default();
        let a = resolve(&bearings, &params).unwrap();
        let b = resolve(&bearings, &params).unwrap();
        assert_eq!(a.winner, b.winner);
        assert_eq!(a.phi_hat.to_bits(), b.phi_hat.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        /// Relabeling which candidate is prime vs double-prime permutes
        /// interpretation indices but not the winning estimate.
        #[test]
        fn mirror_relabeling_invariance(seed in 0u64..500, swap_mask in 0u64..64) {
            let geom = ArrayGeometry::new(
                vec![
                    Position::new(-0.1, 0.0),
                    Position::new(0.1, 0.0),
                    Position::new(0.05, 0.15),
                    Position::new(-0.07, 0.12),
                ],
                343.0,
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = rng.gen::<f64>() * TAU;
            let source = Position::new(300.0 * phi.cos(), 300.0 * phi.sin());
            let sigma = 10f64.to_radians();
            let bearings = bearings_for_source(&geom, source, |_| {
                sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
            let swapped: Vec<AmbiguousBearing> = bearings
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if swap_mask >> i & 1 == 1 {
                        AmbiguousBearing {
                            pair: b.pair,
                            phi_prime: b.phi_double_prime,
                            phi_double_prime: b.phi_prime,
                        }
                    } else {
                        *b
                    }
                })
                .collect();

            let params = KdeParams::default();
            let a = resolve(&bearings, &params).unwrap();
            let b = resolve(&swapped, &params).unwrap();
            prop_assert_eq!(a.winner ^ swap_mask & ((1 << bearings.len()) - 1), b.winner);
            prop_assert!(wrapped_abs_diff(a.phi_hat, b.phi_hat) < 1e-9);
            prop_assert!((a.error - b.error).abs() < 1e-9);
        }

        /// Rotating every candidate rotates the estimate and keeps its error,
        /// provided the winner is not in a near-tie.
        #[test]
        fn rotation_equivariance(seed in 0u64..500, theta in 0.0..TAU) {
            let geom = ArrayGeometry::new(
                vec![
                    Position::new(-0.1, 0.0),
                    Position::new(0.1, 0.0),
                    Position::new(0.0, 0.15),
                ],
                343.0,
            )
            .unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let phi = rng.gen::<f64>() * TAU;
            let source = Position::new(150.0 * phi.cos(), 150.0 * phi.sin());
            let sigma = 8f64.to_radians();
            let bearings = bearings_for_source(&geom, source, |_| {
                sigma * rng.sample::<f64, _>(rand_distr::StandardNormal)
            });
            let params = KdeParams::default();

            // Margin between best and second-best interpretation, via the
            // public enumeration path.
            let mut errors: Vec<f64> = enumerate_interpretations(&bearings)
                .unwrap()
                .map(|i| {
                    let mode = match find_mode(&i.angles, params) {
                        Ok(m) => m,
                        Err(KdeError::NoConvergence { best, .. }) => best,
                        Err(e) => panic!("{e}"),
                    };
                    interpretation_error(&i.angles, mode)
                })
                .collect();
            errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
            prop_assume!(errors[1] - errors[0] > 1e-3);

            let rotated: Vec<AmbiguousBearing> = bearings
                .iter()
                .map(|b| AmbiguousBearing {
                    pair: b.pair,
                    phi_prime: wrap_tau(b.phi_prime + theta),
                    phi_double_prime: wrap_tau(b.phi_double_prime + theta),
                })
                .collect();

            let a = resolve(&bearings, &params).unwrap();
            let b = resolve(&rotated, &params).unwrap();
            prop_assert!(wrapped_abs_diff(b.phi_hat, wrap_tau(a.phi_hat + theta)) < 1e-4);
            prop_assert!((a.error - b.error).abs() < 1e-4);
        }
    }
}
