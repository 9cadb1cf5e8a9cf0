//! Event-driven growing-disk compaction: disks move ballistically in the
//! unit square, collide elastically, and their common diameter grows at a
//! fixed rate until no further growth is possible.
//!
//! The simulation frame is the fixed unit square; the centers-square value
//! `m` is recovered afterwards by normalization (`m = d / (1 - d)` once the
//! jammed structure braces against all four walls).

mod engine;
mod polish;

pub use engine::{CommittedEvent, CommittedKind, DiskState, Engine, PredictedEvent, PredictedKind};
pub use polish::{polish, PolishError};

use rayon::prelude::*;
use thiserror::Error;

use crate::core::{Configuration, CoreError, Packing};

/// Collision count between velocity re-randomizations; escapes slow
/// quasi-jammed states while keeping runs a pure function of the seed.
pub(crate) const VELOCITY_RESET_INTERVAL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimParams {
    /// Diameter growth per unit time.
    pub growth_rate: f64,
    /// Scale of the initial random velocity components.
    pub initial_speed_scale: f64,
    /// Relative diameter change per event window below which the run is
    /// considered jammed (together with the free-path criterion).
    pub jam_rel_growth_tol: f64,
    /// Number of collision events per jam-check window.
    pub event_window: u64,
    /// Safety cap on collision events.
    pub max_events: u64,
    /// Cell width as a multiple of the current diameter.
    pub neighbor_cell_size_factor: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            growth_rate: 5e-4,
            initial_speed_scale: 1.0,
            jam_rel_growth_tol: 1e-13,
            event_window: 10_000,
            max_events: 60_000_000,
            neighbor_cell_size_factor: 1.2,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.growth_rate > 0.0
            && self.growth_rate.is_finite()
            && self.initial_speed_scale >= 0.0
            && self.jam_rel_growth_tol > 0.0
            && self.jam_rel_growth_tol < 1e-6
            && self.event_window > 0
            && self.max_events > 0
            && self.neighbor_cell_size_factor >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(SimError::BadParams(format!("{self:?}")))
        }
    }

    /// Canonical one-line form, recorded in provenance so results are
    /// reproducible from their own artifacts.
    pub fn digest(&self) -> String {
        format!(
            "g={};v0={};jam={};win={};max={};cell={}",
            self.growth_rate,
            self.initial_speed_scale,
            self.jam_rel_growth_tol,
            self.event_window,
            self.max_events,
            self.neighbor_cell_size_factor
        )
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    BadParams(String),
    #[error("starting configuration overlaps: disks {i} and {j} at distance {dist} for diameter {diameter}")]
    InvalidStart { i: usize, j: usize, dist: f64, diameter: f64 },
    #[error("no seed reached a jammed state within the event budget")]
    NoConvergence,
    #[error("event is stale: a participant collided after it was predicted")]
    StaleEvent,
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Outcome of one compaction run.
#[derive(Debug, Clone)]
pub struct PackResult {
    pub packing: Packing,
    pub jammed: bool,
    pub events_processed: u64,
    /// Sampled (time, m) growth curve, one point per event window.
    pub m_trace: Vec<(f64, f64)>,
}

/// Grows `n` disks from zero diameter at uniformly random positions until
/// jamming. Deterministic function of `(n, params, seed)`.
pub fn pack_random(n: usize, params: &SimParams, seed: u64) -> Result<PackResult, SimError> {
    params.validate()?;
    if n < 2 {
        return Err(SimError::Core(CoreError::DegenerateInput));
    }
    let mut engine = Engine::new_random(n, params, seed);
    Ok(engine.run_to_jam(seed))
}

/// Tightens a given configuration: same engine as [`pack_random`], but the
/// disks start from the configuration's positions and diameter, with
/// velocities drawn from the seed.
pub fn tighten(config: &Configuration, params: &SimParams, seed: u64) -> Result<PackResult, SimError> {
    params.validate()?;
    if config.n() < 2 {
        return Err(SimError::Core(CoreError::DegenerateInput));
    }
    if config.diameter > 0.0 {
        if let Some((i, j, dist)) = config.worst_pair() {
            if dist < config.diameter * (1.0 - 1e-9) {
                return Err(SimError::InvalidStart { i, j, dist, diameter: config.diameter });
            }
        }
    }
    let mut engine = Engine::new_from_config(config, params, seed);
    Ok(engine.run_to_jam(seed))
}

/// Result of a multi-seed run: the best packing and the per-seed outcomes.
#[derive(Debug, Clone)]
pub struct BestOf {
    pub best: PackResult,
    pub best_seed: u64,
    /// `(seed, final m, jammed)` for every seed, ordered by seed.
    pub per_seed: Vec<(u64, f64, bool)>,
}

/// Runs [`pack_random`] for every seed (in parallel; runs share nothing)
/// and returns the maximum-`m` jammed result, ties broken by the smallest
/// seed. Fails with `NoConvergence` only if every seed fails to jam.
pub fn best_of(n: usize, params: &SimParams, seeds: &[u64]) -> Result<BestOf, SimError> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(SimError::BadParams("empty seed list".into()));
    }
    let mut runs: Vec<(u64, PackResult)> = seeds
        .par_iter()
        .map(|&seed| pack_random(n, params, seed).map(|r| (seed, r)))
        .collect::<Result<_, _>>()?;
    runs.sort_by_key(|(seed, _)| *seed);
    let per_seed: Vec<(u64, f64, bool)> =
        runs.iter().map(|(s, r)| (*s, r.packing.m(), r.jammed)).collect();
    let best = runs
        .iter()
        .filter(|(_, r)| r.jammed)
        .max_by(|(sa, ra), (sb, rb)| {
            ra.packing
                .m()
                .partial_cmp(&rb.packing.m())
                .unwrap()
                .then(sb.cmp(sa))
        })
        .ok_or(SimError::NoConvergence)?;
    Ok(BestOf { best: best.1.clone(), best_seed: best.0, per_seed })
}
