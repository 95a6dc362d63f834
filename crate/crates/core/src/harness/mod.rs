//! Experiment generators, sampling, Monte-Carlo estimation and distance
//! search.

mod distance;
mod experiments;
mod sample;
mod stats;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

pub use distance::{brute_force_distance, DistanceMode, DistanceResult};
pub use experiments::{
    default_requests, gen_repeated_gate, named_experiment, padded_repeated_gate_text,
    parse_repeated_name, repeated_gate_text, window_padding, Experiment, RepeatedGate, BELL_PAIR, T_INJECTIONS,
    RESET_H_CNOT,
};
pub use sample::{sample_shot, Sampler, Shot};
pub use stats::{loglog_slope, wilson_interval, Z95};

use crate::circuit::ObservableSpec;
use crate::error::Result;
use crate::lom::{product_flip, LomPlan, SplittingDecoder};

/// Predicts the flips of a fixed list of requested products.
pub trait ShotDecoder: Sync {
    fn predict(&self, defects: &[u32], shot_seed: u64) -> Result<Vec<bool>>;
}

impl ShotDecoder for LomPlan {
    fn predict(&self, defects: &[u32], shot_seed: u64) -> Result<Vec<bool>> {
        self.decode_requested(defects, shot_seed)
    }
}

/// Splitting baseline scored on products of its per-observable flips.
pub struct SplittingShots {
    pub decoder: SplittingDecoder,
    pub requests: Vec<ObservableSpec>,
}

impl ShotDecoder for SplittingShots {
    fn predict(&self, defects: &[u32], _: u64) -> Result<Vec<bool>> {
        let f = self.decoder.decode(defects)?;
        Ok(self.requests.iter().map(|o| product_flip(&f, o)).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub max_shots: u64,
    pub max_failures: u64,
    pub seed: u64,
    /// Shots per parallel batch; only affects scheduling.
    pub batch: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            max_shots: 10_000_000,
            max_failures: 1000,
            seed: 0,
            batch: 4096,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McResult {
    pub shots: u64,
    pub failures: u64,
    pub p_log: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seconds: f64,
}

/// Failure indicator per shot in index order. A shot fails when any
/// requested product is mispredicted.
fn failure_of(
    exp: &Experiment,
    sampler: &Sampler,
    dec: &dyn ShotDecoder,
    seed: u64,
    i: u64,
) -> Result<bool> {
    let shot = sampler.shot(&exp.dem, seed, i);
    if shot.flipped.is_empty() {
        return Ok(false);
    }
    let pred = dec.predict(&shot.defects, seed ^ i.rotate_left(32))?;
    let truth_of = |o: &ObservableSpec| {
        o.ids()
            .iter()
            .fold(false, |a, &id| a ^ shot.truth[id as usize - 1])
    };
    Ok(exp
        .requests
        .iter()
        .zip(&pred)
        .any(|(o, &p)| p != truth_of(o)))
}

/// Estimates the logical failure rate. Shots are processed in fixed batches
/// and counted in index order up to the shot that reaches the failure cap,
/// so the result does not depend on the thread count.
pub fn monte_carlo(exp: &Experiment, dec: &dyn ShotDecoder, cfg: &McConfig) -> Result<McResult> {
    let start = Instant::now();
    let sampler = Sampler::new(&exp.dem);
    let mut shots = 0u64;
    let mut failures = 0u64;
    'outer: while shots < cfg.max_shots {
        let n = cfg.batch.max(1).min(cfg.max_shots - shots);
        let batch: Vec<bool> = (shots..shots + n)
            .into_par_iter()
            .map(|i| failure_of(exp, &sampler, dec, cfg.seed, i))
            .collect::<Result<_>>()?;
        for f in batch {
            shots += 1;
            failures += f as u64;
            if failures >= cfg.max_failures {
                break 'outer;
            }
        }
    }
    let (ci_lo, ci_hi) = wilson_interval(failures, shots.max(1), Z95);
    Ok(McResult {
        shots,
        failures,
        p_log: failures as f64 / shots.max(1) as f64,
        ci_lo,
        ci_hi,
        seconds: start.elapsed().as_secs_f64(),
    })
}
