//! The event-driven engine: per-disk lazy trajectories, a single priority
//! queue with per-disk event epochs, and a uniform cell grid for neighbor
//! search.
//!
//! Positions are stored at each disk's own last-event time and extrapolated
//! ballistically. Predictions are evaluated at canonical reference times
//! (the participants' own times), so a prediction is a pure function of the
//! stored state no matter when it is computed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::core::{normalize_points, Configuration, Packing, Point, Provenance, Wall};

use super::{PackResult, SimParams, SimError, VELOCITY_RESET_INTERVAL};

/// Raw trajectory of one disk: position valid at time `t`, constant
/// velocity afterwards.
#[derive(Debug, Clone, Copy)]
pub struct DiskState {
    pub pos: Point,
    pub vel: Point,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PredictedKind {
    Pair { other: usize },
    Wall { wall: Wall },
    /// Nothing ahead of this disk before the current neighborhood horizon.
    None,
}

/// Earliest upcoming collision of one disk, as seen through the cell grid.
#[derive(Debug, Clone, Copy)]
pub struct PredictedEvent {
    pub disk: usize,
    pub time: f64,
    pub kind: PredictedKind,
    pub(crate) epoch: u32,
    pub(crate) other_epoch: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CommittedKind {
    Pair { i: usize, j: usize },
    Wall { disk: usize, wall: Wall },
}

#[derive(Debug, Clone, Copy)]
pub struct CommittedEvent {
    pub time: f64,
    pub kind: CommittedKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum QKind {
    Pair { b: u32, eb: u32 },
    Wall { wall: Wall },
    Transfer { axis: u8, step: i8, gepoch: u32 },
    Rebuild,
}

#[derive(Debug, Clone, Copy)]
struct QEntry {
    time: f64,
    seq: u64,
    disk: u32,
    epoch: u32,
    kind: QKind,
}

impl PartialEq for QEntry {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}
impl Eq for QEntry {}

impl PartialOrd for QEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed: BinaryHeap is a max-heap, we want the earliest event on top.
impl Ord for QEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Grid {
    dim: usize,
    width: f64,
    cells: Vec<Vec<u32>>,
    epoch: u32,
    max_dim: usize,
}

impl Grid {
    fn cell_of(&self, p: Point) -> (i32, i32) {
        let clamp = |v: f64| -> i32 {
            let c = (v / self.width).floor() as i32;
            c.clamp(0, self.dim as i32 - 1)
        };
        (clamp(p.x), clamp(p.y))
    }

    fn idx(&self, c: (i32, i32)) -> usize {
        c.1 as usize * self.dim + c.0 as usize
    }
}

pub struct Engine {
    g: f64,
    d0: f64,
    pos: Vec<Point>,
    vel: Vec<Point>,
    t_loc: Vec<f64>,
    epoch: Vec<u32>,
    cell: Vec<(i32, i32)>,
    grid: Grid,
    queue: BinaryHeap<QEntry>,
    seq: u64,
    time: f64,
    collisions: u64,
    rng: ChaCha8Rng,
    params: SimParams,
    // window bookkeeping
    window_start_t: f64,
    window_start_d: f64,
    worst_overlap: f64,
    m_trace: Vec<(f64, f64)>,
}

impl Engine {
    /// Fresh engine with uniformly random non-coincident positions in the
    /// unit square and zero initial diameter.
    pub fn new_random(n: usize, params: &SimParams, seed: u64) -> Engine {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pos: Vec<Point> = Vec::with_capacity(n);
        while pos.len() < n {
            let cand = Point::new(rng.random::<f64>(), rng.random::<f64>());
            if pos.iter().all(|p| p.dist(cand) > 1e-9) {
                pos.push(cand);
            }
        }
        Engine::with_state(pos, 0.0, params, rng)
    }

    /// Engine starting from a configuration, rescaled to fill the unit
    /// square, with velocities drawn from the seed.
    pub fn new_from_config(config: &Configuration, params: &SimParams, seed: u64) -> Engine {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        let r = config.diameter * 0.5;
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in &config.centers {
            min.x = min.x.min(c.x - r);
            min.y = min.y.min(c.y - r);
            max.x = max.x.max(c.x + r);
            max.y = max.y.max(c.y + r);
        }
        let side = (max.x - min.x).max(max.y - min.y);
        // Center the slack of the shorter axis, as normalization would.
        let off = Point::new(
            min.x - 0.5 * (side - (max.x - min.x)),
            min.y - 0.5 * (side - (max.y - min.y)),
        );
        let scale = 1.0 / side;
        let pos: Vec<Point> = config.centers.iter().map(|&c| (c - off) * scale).collect();
        let d = config.diameter * scale;
        Engine::with_state(pos, d, params, rng)
    }

    fn with_state(pos: Vec<Point>, d0: f64, params: &SimParams, mut rng: ChaCha8Rng) -> Engine {
        let n = pos.len();
        let s = params.initial_speed_scale;
        let mut vel = Vec::with_capacity(n);
        for _ in 0..n {
            let vx = if s > 0.0 { rng.random_range(-s..s) } else { 0.0 };
            let vy = if s > 0.0 { rng.random_range(-s..s) } else { 0.0 };
            vel.push(Point::new(vx, vy));
        }
        let max_dim = ((n as f64).sqrt().ceil() as usize + 2).max(2);
        let mut engine = Engine {
            g: params.growth_rate,
            d0,
            pos,
            vel,
            t_loc: vec![0.0; n],
            epoch: vec![0; n],
            cell: vec![(0, 0); n],
            grid: Grid { dim: 1, width: 1.0, cells: Vec::new(), epoch: 0, max_dim },
            queue: BinaryHeap::new(),
            seq: 0,
            time: 0.0,
            collisions: 0,
            rng,
            params: params.clone(),
            window_start_t: 0.0,
            window_start_d: d0,
            worst_overlap: 0.0,
            m_trace: Vec::new(),
        };
        engine.rebuild_grid();
        engine
    }

    pub fn n(&self) -> usize {
        self.pos.len()
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn growth_rate(&self) -> f64 {
        self.g
    }

    pub fn initial_diameter(&self) -> f64 {
        self.d0
    }

    /// Diameter at absolute time `t` (`d0 + g * t`).
    pub fn diameter_at(&self, t: f64) -> f64 {
        self.d0 + self.g * t
    }

    pub fn diameter(&self) -> f64 {
        self.diameter_at(self.time)
    }

    pub fn collisions(&self) -> u64 {
        self.collisions
    }

    pub fn disk_states(&self) -> Vec<DiskState> {
        (0..self.n())
            .map(|i| DiskState { pos: self.pos[i], vel: self.vel[i], t: self.t_loc[i] })
            .collect()
    }

    /// Position of disk `i` extrapolated to time `t`.
    pub fn position_at(&self, i: usize, t: f64) -> Point {
        self.pos[i] + self.vel[i] * (t - self.t_loc[i])
    }

    fn grid_dim_for(&self, d: f64) -> usize {
        if d <= 0.0 {
            return self.grid.max_dim;
        }
        let w = self.params.neighbor_cell_size_factor * d;
        ((1.0 / w).floor() as usize).clamp(1, self.grid.max_dim)
    }

    fn rebuild_grid(&mut self) {
        let d = self.diameter();
        let dim = self.grid_dim_for(d);
        self.grid.dim = dim;
        self.grid.width = 1.0 / dim as f64;
        self.grid.epoch = self.grid.epoch.wrapping_add(1);
        self.grid.cells = vec![Vec::new(); dim * dim];
        for i in 0..self.n() {
            let p = self.position_at(i, self.time);
            let c = self.grid.cell_of(p);
            self.cell[i] = c;
            let idx = self.grid.idx(c);
            self.grid.cells[idx].push(i as u32);
        }
        // Next rebuild slightly before the diameter outgrows the cells.
        if self.grid.dim > 1 {
            let d_limit = self.grid.width * 0.999;
            if d < d_limit {
                let t_reb = (d_limit - self.d0) / self.g;
                self.push(QEntry {
                    time: t_reb,
                    seq: 0,
                    disk: 0,
                    epoch: 0,
                    kind: QKind::Rebuild,
                });
            }
        }
        for i in 0..self.n() {
            self.schedule_disk(i);
        }
    }

    fn push(&mut self, mut entry: QEntry) {
        self.seq += 1;
        entry.seq = self.seq;
        self.queue.push(entry);
    }

    /// Earliest pair event of disks `i` and `j`, as an absolute time.
    ///
    /// Evaluated at the canonical reference time `max(t_i, t_j)`, so the
    /// result does not depend on when the prediction is made.
    fn pair_time(&self, i: usize, j: usize) -> Option<f64> {
        let t_ref = self.t_loc[i].max(self.t_loc[j]);
        let pi = self.position_at(i, t_ref);
        let pj = self.position_at(j, t_ref);
        let delta = pj - pi;
        let dv = self.vel[j] - self.vel[i];
        let d_now = self.d0 + self.g * t_ref;
        let a = dv.norm2() - self.g * self.g;
        let b = 2.0 * (delta.dot(dv) - d_now * self.g);
        let c = delta.norm2() - d_now * d_now;
        if c < 0.0 {
            // Marginal overlap from finite precision: collide immediately
            // only if still approaching.
            return if b < 0.0 { Some(t_ref) } else { None };
        }
        let tau = if a.abs() < 1e-300 {
            if b < 0.0 {
                Some(-c / b)
            } else {
                None
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if a > 0.0 {
                if disc < 0.0 || b >= 0.0 {
                    None
                } else {
                    // Stable smaller root for b < 0.
                    Some(2.0 * c / (-b + disc.sqrt()))
                }
            } else {
                // Growth outruns the relative motion: the disks always meet.
                Some((-b + disc.sqrt()) / (2.0 * a))
            }
        };
        tau.filter(|t| *t >= 0.0).map(|t| t_ref + t)
    }

    /// Earliest wall event of disk `i` (absolute time and wall).
    fn wall_time(&self, i: usize) -> Option<(f64, Wall)> {
        let t_ref = self.t_loc[i];
        let p = self.pos[i];
        let v = self.vel[i];
        let r = 0.5 * (self.d0 + self.g * t_ref);
        let half_g = 0.5 * self.g;
        let mut best: Option<(f64, Wall)> = None;
        let mut consider = |gap: f64, closing: f64, wall: Wall| {
            if closing > 0.0 {
                let tau = (gap / closing).max(0.0);
                let t = t_ref + tau;
                if best.map_or(true, |(bt, _)| t < bt) {
                    best = Some((t, wall));
                }
            }
        };
        consider(p.x - r, half_g - v.x, Wall::Left);
        consider(1.0 - p.x - r, v.x + half_g, Wall::Right);
        consider(p.y - r, half_g - v.y, Wall::Bottom);
        consider(1.0 - p.y - r, v.y + half_g, Wall::Top);
        best
    }

    /// Next cell-boundary crossing of disk `i` under the current grid.
    fn transfer_time(&self, i: usize) -> Option<(f64, u8, i8)> {
        if self.grid.dim <= 1 {
            return None;
        }
        let (cx, cy) = self.cell[i];
        let w = self.grid.width;
        let p = self.pos[i];
        let v = self.vel[i];
        let t_ref = self.t_loc[i];
        let mut best: Option<(f64, u8, i8)> = None;
        let mut consider = |coord: f64, vel: f64, cell: i32, axis: u8| {
            if vel > 0.0 && cell < self.grid.dim as i32 - 1 {
                let boundary = (cell + 1) as f64 * w;
                let t = t_ref + ((boundary - coord) / vel).max(0.0);
                if best.map_or(true, |(bt, _, _)| t < bt) {
                    best = Some((t, axis, 1));
                }
            } else if vel < 0.0 && cell > 0 {
                let boundary = cell as f64 * w;
                let t = t_ref + ((boundary - coord) / vel).max(0.0);
                if best.map_or(true, |(bt, _, _)| t < bt) {
                    best = Some((t, axis, -1));
                }
            }
        };
        consider(p.x, v.x, cx, 0);
        consider(p.y, v.y, cy, 1);
        best
    }

    fn neighbors_of(&self, i: usize, mut f: impl FnMut(usize)) {
        let (cx, cy) = self.cell[i];
        let dim = self.grid.dim as i32;
        for dy in -1..=1 {
            for dx in -1..=1 {
                let (nx, ny) = (cx + dx, cy + dy);
                if nx < 0 || ny < 0 || nx >= dim || ny >= dim {
                    continue;
                }
                for &j in &self.grid.cells[self.grid.idx((nx, ny))] {
                    if j as usize != i {
                        f(j as usize);
                    }
                }
            }
        }
    }

    /// The earliest upcoming collision of `disk`, searching only its grid
    /// neighborhood. `PredictedKind::None` means nothing is scheduled before
    /// the disk leaves its neighborhood (a transfer will rescan).
    pub fn predict_event(&self, disk: usize) -> PredictedEvent {
        let mut best_t = f64::INFINITY;
        let mut kind = PredictedKind::None;
        let mut other_epoch = 0;
        if let Some((t, wall)) = self.wall_time(disk) {
            best_t = t;
            kind = PredictedKind::Wall { wall };
        }
        self.neighbors_of(disk, |j| {
            if let Some(t) = self.pair_time(disk, j) {
                if t < best_t {
                    best_t = t;
                    kind = PredictedKind::Pair { other: j };
                    other_epoch = self.epoch[j];
                }
            }
        });
        PredictedEvent {
            disk,
            time: best_t,
            kind,
            epoch: self.epoch[disk],
            other_epoch,
        }
    }

    /// Queues the earliest of the disk's collision and transfer events.
    fn schedule_disk(&mut self, i: usize) {
        let predicted = self.predict_event(i);
        let transfer = self.transfer_time(i);
        let take_transfer = match (&predicted.kind, &transfer) {
            (_, None) => false,
            (PredictedKind::None, Some(_)) => true,
            (_, Some((tt, _, _))) => *tt < predicted.time,
        };
        if take_transfer {
            let (t, axis, step) = transfer.unwrap();
            self.push(QEntry {
                time: t,
                seq: 0,
                disk: i as u32,
                epoch: self.epoch[i],
                kind: QKind::Transfer { axis, step, gepoch: self.grid.epoch },
            });
            return;
        }
        match predicted.kind {
            PredictedKind::None => {}
            PredictedKind::Wall { wall } => self.push(QEntry {
                time: predicted.time,
                seq: 0,
                disk: i as u32,
                epoch: predicted.epoch,
                kind: QKind::Wall { wall },
            }),
            PredictedKind::Pair { other } => self.push(QEntry {
                time: predicted.time,
                seq: 0,
                disk: i as u32,
                epoch: predicted.epoch,
                kind: QKind::Pair { b: other as u32, eb: predicted.other_epoch },
            }),
        }
    }

    /// Validates and applies a predicted collision: advances the
    /// participants to the event time and updates their velocities.
    ///
    /// Fails with `StaleEvent` when a participant has collided since the
    /// prediction was made.
    pub fn resolve_collision(&mut self, ev: &PredictedEvent) -> Result<(), SimError> {
        if self.epoch[ev.disk] != ev.epoch {
            return Err(SimError::StaleEvent);
        }
        match ev.kind {
            PredictedKind::None => Ok(()),
            PredictedKind::Wall { wall } => {
                self.apply_wall(ev.disk, wall, ev.time);
                Ok(())
            }
            PredictedKind::Pair { other } => {
                if self.epoch[other] != ev.other_epoch {
                    return Err(SimError::StaleEvent);
                }
                self.apply_pair(ev.disk, other, ev.time);
                Ok(())
            }
        }
    }

    fn advance(&mut self, i: usize, t: f64) {
        self.pos[i] = self.position_at(i, t);
        self.t_loc[i] = t;
    }

    fn apply_wall(&mut self, i: usize, wall: Wall, t: f64) {
        self.advance(i, t);
        // Reflect the normal component; boost by one growth rate so the
        // growing surface separates from the wall.
        match wall {
            Wall::Left => self.vel[i].x = -self.vel[i].x + self.g,
            Wall::Right => self.vel[i].x = -self.vel[i].x - self.g,
            Wall::Bottom => self.vel[i].y = -self.vel[i].y + self.g,
            Wall::Top => self.vel[i].y = -self.vel[i].y - self.g,
        }
        self.epoch[i] = self.epoch[i].wrapping_add(1);
    }

    fn apply_pair(&mut self, i: usize, j: usize, t: f64) {
        self.advance(i, t);
        self.advance(j, t);
        let delta = self.pos[j] - self.pos[i];
        let dist = delta.norm();
        let nhat = delta * (1.0 / dist);
        let s = (self.vel[j] - self.vel[i]).dot(nhat);
        // Equal-mass exchange of the normal components, plus one growth
        // rate of separation per growing surface: the relative normal
        // speed goes from s to -s + 2g.
        let impulse = s - self.g;
        self.vel[i] = self.vel[i] + nhat * impulse;
        self.vel[j] = self.vel[j] - nhat * impulse;
        self.epoch[i] = self.epoch[i].wrapping_add(1);
        self.epoch[j] = self.epoch[j].wrapping_add(1);
    }

    fn apply_transfer(&mut self, i: usize, axis: u8, step: i8, t: f64) {
        // Re-bin only; the trajectory (pos at t_loc, vel) is untouched so
        // earlier predictions stay exact.
        let old = self.cell[i];
        let mut new = old;
        if axis == 0 {
            new.0 += step as i32;
        } else {
            new.1 += step as i32;
        }
        let dim = self.grid.dim as i32;
        new.0 = new.0.clamp(0, dim - 1);
        new.1 = new.1.clamp(0, dim - 1);
        if new != old {
            let oi = self.grid.idx(old);
            if let Some(k) = self.grid.cells[oi].iter().position(|&d| d == i as u32) {
                self.grid.cells[oi].swap_remove(k);
            }
            let ni = self.grid.idx(new);
            self.grid.cells[ni].push(i as u32);
            self.cell[i] = new;
        }
        let _ = t;
    }

    /// Advances the simulation to the next collision and commits it.
    /// Returns `None` when the queue runs dry (cannot happen while growth
    /// continues).
    pub fn step_collision(&mut self) -> Option<CommittedEvent> {
        while let Some(entry) = self.queue.pop() {
            match entry.kind {
                QKind::Rebuild => {
                    self.time = entry.time.max(self.time);
                    self.rebuild_grid();
                }
                QKind::Transfer { axis, step, gepoch } => {
                    if gepoch != self.grid.epoch || self.epoch[entry.disk as usize] != entry.epoch {
                        // Trajectory or grid changed; the owner was or will
                        // be rescheduled by whoever changed it.
                        continue;
                    }
                    self.time = entry.time.max(self.time);
                    self.apply_transfer(entry.disk as usize, axis, step, entry.time);
                    self.schedule_disk(entry.disk as usize);
                }
                QKind::Wall { wall } => {
                    let i = entry.disk as usize;
                    if self.epoch[i] != entry.epoch {
                        self.schedule_disk(i);
                        continue;
                    }
                    self.time = entry.time.max(self.time);
                    self.apply_wall(i, wall, self.time);
                    self.collisions += 1;
                    self.schedule_disk(i);
                    return Some(CommittedEvent {
                        time: self.time,
                        kind: CommittedKind::Wall { disk: i, wall },
                    });
                }
                QKind::Pair { b, eb } => {
                    let i = entry.disk as usize;
                    let j = b as usize;
                    if self.epoch[i] != entry.epoch {
                        self.schedule_disk(i);
                        continue;
                    }
                    if self.epoch[j] != eb {
                        // Partner moved on: recompute the owner's slate.
                        self.schedule_disk(i);
                        continue;
                    }
                    self.time = entry.time.max(self.time);
                    self.apply_pair(i, j, self.time);
                    self.collisions += 1;
                    self.schedule_disk(i);
                    self.schedule_disk(j);
                    return Some(CommittedEvent {
                        time: self.time,
                        kind: CommittedKind::Pair { i, j },
                    });
                }
            }
        }
        None
    }

    /// Smallest pairwise distance right now (O(n²); used by the
    /// per-window overlap spot check).
    pub fn min_pair_distance(&self) -> f64 {
        let t = self.time;
        let mut min = f64::INFINITY;
        for i in 0..self.n() {
            let pi = self.position_at(i, t);
            for j in (i + 1)..self.n() {
                let d = pi.dist(self.position_at(j, t));
                min = min.min(d);
            }
        }
        min
    }

    fn mean_speed(&self) -> f64 {
        self.vel.iter().map(|v| v.norm()).sum::<f64>() / self.n() as f64
    }

    fn reset_velocities(&mut self) {
        let s = if self.params.initial_speed_scale > 0.0 {
            self.params.initial_speed_scale
        } else {
            1.0
        };
        let t = self.time;
        for i in 0..self.n() {
            self.advance(i, t);
            self.vel[i] = Point::new(self.rng.random_range(-s..s), self.rng.random_range(-s..s));
            self.epoch[i] = self.epoch[i].wrapping_add(1);
        }
        for i in 0..self.n() {
            self.schedule_disk(i);
        }
    }

    fn current_m(&self) -> f64 {
        let d = self.diameter();
        d / (1.0 - d)
    }

    /// Runs until the jamming criterion holds or the event budget is
    /// exhausted, then normalizes the final state into a packing.
    pub fn run_to_jam(&mut self, seed: u64) -> PackResult {
        let window = self.params.event_window;
        let tol = self.params.jam_rel_growth_tol;
        let mut jammed = false;
        let mut next_window = self.collisions + window;
        let mut next_reset = VELOCITY_RESET_INTERVAL;
        self.window_start_t = self.time;
        self.window_start_d = self.diameter();
        while self.collisions < self.params.max_events {
            if self.step_collision().is_none() {
                break;
            }
            if self.collisions >= next_window {
                next_window = self.collisions + window;
                let d = self.diameter();
                let rel_growth = (d - self.window_start_d) / d;
                let dt = self.time - self.window_start_t;
                let mean_free_path =
                    self.mean_speed() * dt * self.n() as f64 / (2.0 * window as f64);
                self.m_trace.push((self.time, self.current_m()));
                let min_dist = self.min_pair_distance();
                let overlap = (d - min_dist) / d;
                if overlap > self.worst_overlap {
                    self.worst_overlap = overlap;
                }
                debug_assert!(
                    min_dist >= d * (1.0 - 1e-9),
                    "overlap beyond tolerance: min distance {min_dist} at diameter {d}"
                );
                if rel_growth < tol && mean_free_path < 1e-9 * d {
                    jammed = true;
                    break;
                }
                self.window_start_t = self.time;
                self.window_start_d = d;
                if self.collisions >= next_reset {
                    next_reset = self.collisions + VELOCITY_RESET_INTERVAL;
                    self.reset_velocities();
                }
            }
        }
        let t = self.time;
        let centers: Vec<Point> = (0..self.n()).map(|i| self.position_at(i, t)).collect();
        let (normed, frame) = normalize_points(&centers).expect("n >= 2 distinct centers");
        let m = frame.apply_len(self.diameter());
        let packing = Packing::new(
            m,
            normed,
            Provenance::Simulated { seed, params_digest: self.params.digest() },
        )
        .expect("jammed state violates packing invariants");
        PackResult {
            packing,
            jammed,
            events_processed: self.collisions,
            m_trace: std::mem::take(&mut self.m_trace),
        }
    }
}
