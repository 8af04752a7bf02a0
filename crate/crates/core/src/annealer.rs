//! Simulated annealing over permutations for small-discrepancy boards.
//!
//! A move swaps the values of two cells. Only the at most `2*k*l` regions
//! touching either cell change, so each move is evaluated by updating those
//! sums. Acceptance follows the Metropolis rule: improving or neutral moves
//! are always taken, a worsening move of size `d` is taken with probability
//! `exp(-d / T)`. The probability is evaluated in fixed-point integer
//! arithmetic so runs are bit-identical on every platform.
//!
//! Randomness comes from ChaCha8. Restart `i` uses the stream seeded with
//! `splitmix64(seed ^ i)`, which makes restarts independent of the order or
//! thread they run on. The overall winner is the lowest objective, ties going
//! to the lexicographically smallest board.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builder::build_direct;
use crate::feasibility::{classify, reduce};
use crate::grid::{discrepancy_report, Board, Dims, DiscrepancyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnealObjective {
    /// `max |2S - target_x2|`
    MaxAbsDevX2,
    /// `sum (2S - target_x2)^2`
    L2DevX4,
}

impl AnnealObjective {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnnealObjective::MaxAbsDevX2 => "max",
            AnnealObjective::L2DevX4 => "l2",
        }
    }
}

pub fn objective_value(report: &DiscrepancyReport, kind: AnnealObjective) -> u128 {
    match kind {
        AnnealObjective::MaxAbsDevX2 => report.max_abs_dev_x2 as u128,
        AnnealObjective::L2DevX4 => report.l2_dev_x4,
    }
}

/// Tunables. Temperatures are in objective units and given as fractions;
/// the run is split into `temperature_levels` equal stretches and the
/// temperature is multiplied by the cooling factor between stretches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnealParams {
    pub seed: u64,
    /// Swap proposals per restart.
    pub iterations: u64,
    pub restarts: u32,
    /// `(numerator, denominator)`
    pub initial_temperature: (u64, u64),
    /// `(numerator, denominator)`, strictly between 0 and 1.
    pub cooling: (u64, u64),
    pub temperature_levels: u32,
    pub objective: AnnealObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamsError {
    ZeroIterations,
    ZeroRestarts,
    ZeroLevels,
    CoolingOutOfRange,
    ZeroDenominator,
}

impl core::fmt::Display for ParamsError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            ParamsError::ZeroIterations => "iterations must be at least 1",
            ParamsError::ZeroRestarts => "restarts must be at least 1",
            ParamsError::ZeroLevels => "temperature levels must be at least 1",
            ParamsError::CoolingOutOfRange => "cooling factor must lie strictly between 0 and 1",
            ParamsError::ZeroDenominator => "temperature denominator must be nonzero",
        };
        f.write_str(msg)
    }
}

impl core::error::Error for ParamsError {}

impl AnnealParams {
    /// Defaults scaled to the board: the starting temperature is roughly the
    /// cost of one mildly bad swap under the chosen objective.
    pub fn for_dims(dims: &Dims, objective: AnnealObjective, seed: u64, iterations: u64) -> Self {
        let mn = dims.cells() as u64;
        let area = dims.region_area() as u64;
        let initial_temperature = match objective {
            AnnealObjective::MaxAbsDevX2 => (4, 1),
            AnnealObjective::L2DevX4 => (8 * area * mn.max(2), 1),
        };
        AnnealParams {
            seed,
            iterations,
            restarts: 1,
            initial_temperature,
            cooling: (95, 100),
            temperature_levels: 200,
            objective,
        }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.iterations == 0 {
            return Err(ParamsError::ZeroIterations);
        }
        if self.restarts == 0 {
            return Err(ParamsError::ZeroRestarts);
        }
        if self.temperature_levels == 0 {
            return Err(ParamsError::ZeroLevels);
        }
        if self.initial_temperature.1 == 0 || self.cooling.1 == 0 {
            return Err(ParamsError::ZeroDenominator);
        }
        if self.cooling.0 == 0 || self.cooling.0 >= self.cooling.1 {
            return Err(ParamsError::CoolingOutOfRange);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnealOutcome {
    pub best_board: Board,
    pub best_report: DiscrepancyReport,
    /// Objective of the starting board.
    pub initial_objective: u128,
    pub accepted_moves: u64,
    pub evaluations: u64,
}

impl AnnealOutcome {
    pub fn objective(&self, kind: AnnealObjective) -> u128 {
        objective_value(&self.best_report, kind)
    }
}

/// Runs every restart in sequence and keeps the best.
pub fn anneal(dims: &Dims, params: &AnnealParams) -> Result<AnnealOutcome, ParamsError> {
    params.validate()?;
    let start = initial_board(dims);
    let runs = (0..params.restarts).map(|r| anneal_restart(dims, params, &start, r));
    Ok(combine(runs, params.objective).expect("at least one restart"))
}

/// Deterministic reduction of per-restart results: lowest objective, then
/// lexicographically smallest board. Move counters are summed.
pub fn combine(
    runs: impl IntoIterator<Item = AnnealOutcome>,
    objective: AnnealObjective,
) -> Option<AnnealOutcome> {
    let mut best: Option<AnnealOutcome> = None;
    let mut accepted = 0u64;
    let mut evaluations = 0u64;
    for run in runs {
        accepted += run.accepted_moves;
        evaluations += run.evaluations;
        let better = match &best {
            None => true,
            Some(b) => {
                let (cur, new) = (b.objective(objective), run.objective(objective));
                new < cur || (new == cur && run.best_board < b.best_board)
            }
        };
        if better {
            best = Some(run);
        }
    }
    best.map(|mut b| {
        b.accepted_moves = accepted;
        b.evaluations = evaluations;
        b
    })
}

/// Warm start: a verified board for the nearest feasible region shape.
///
/// Tries the requested region, then every `k' | m`, `l' | n` ordered by
/// distance from the reduced shape `(g, h)`. A full-board region is always
/// among the candidates, so this falls back to row-major at worst.
pub fn initial_board(dims: &Dims) -> Board {
    if classify(dims).is_feasible() {
        if let Ok((_, b)) = build_direct(dims) {
            return b;
        }
    }
    let (m, n) = (dims.m(), dims.n());
    let r = reduce(dims);
    let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
    for k in (1..=m).filter(|k| m % k == 0) {
        for l in (1..=n).filter(|l| n % l == 0) {
            candidates.push((k.abs_diff(r.g) + l.abs_diff(r.h), k, l));
        }
    }
    candidates.sort_unstable();
    for (_, k, l) in candidates {
        let Ok(near) = dims.with_region(k, l) else { continue };
        if !classify(&near).is_feasible() {
            continue;
        }
        if let Ok((_, b)) = build_direct(&near) {
            return b;
        }
    }
    Board::row_major(m, n).expect("valid dims")
}

/// `splitmix64` finaliser; maps `seed ^ restart` to a stream seed.
pub fn stream_seed(seed: u64, restart: u32) -> u64 {
    let mut z = (seed ^ restart as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A single annealing run from `start` using stream `restart`.
pub fn anneal_restart(dims: &Dims, params: &AnnealParams, start: &Board, restart: u32) -> AnnealOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(params.seed, restart));
    let mut state = SwapState::new(dims, start.cells().to_vec(), params.objective);
    let initial_objective = state.objective();
    let mut best_cells = state.cells.clone();
    let mut best_value = initial_objective;
    let mut accepted = 0u64;
    let mut evaluations = 0u64;
    let cells = dims.cells();

    if cells > 1 {
        let mut schedule = Schedule::new(params);
        for t in 0..params.iterations {
            let level = (t as u128 * params.temperature_levels as u128 / params.iterations as u128) as u32;
            schedule.advance_to(level);
            let a = rng.random_range(0..cells);
            let mut b = rng.random_range(0..cells - 1);
            if b >= a {
                b += 1;
            }
            evaluations += 1;
            let current = state.objective();
            let proposed = state.propose(a, b);
            let take = if proposed <= current {
                true
            } else {
                let threshold = schedule.threshold(proposed - current);
                threshold > 0 && (rng.random::<u32>() as u64) < threshold
            };
            if take {
                state.commit();
                accepted += 1;
                if proposed < best_value {
                    best_value = proposed;
                    best_cells.copy_from_slice(&state.cells);
                }
            } else {
                state.reject();
            }
        }
    }

    let best_board = Board::new(dims.m(), dims.n(), best_cells).expect("swaps preserve the permutation");
    let best_report = discrepancy_report(&best_board, dims.k(), dims.l()).expect("valid dims");
    debug_assert_eq!(objective_value(&best_report, params.objective), best_value);
    AnnealOutcome {
        best_board,
        best_report,
        initial_objective,
        accepted_moves: accepted,
        evaluations,
    }
}

/// Cells, region sums and the objective, updated in place under swaps.
///
/// `propose` applies a swap tentatively and returns the new objective;
/// it must be followed by exactly one `commit` or `reject`.
pub struct SwapState {
    dims: Dims,
    objective: AnnealObjective,
    target_x2: i64,
    cells: Vec<u32>,
    sums: Vec<i64>,
    cell_windows: Vec<Vec<u32>>,
    scratch: Vec<i64>,
    marked: Vec<bool>,
    touched: Vec<u32>,
    // |2S - target| histogram for the max objective
    dev_count: Vec<u32>,
    max_dev: usize,
    l2: u128,
    pending: Option<Pending>,
}

struct Pending {
    a: usize,
    b: usize,
    prev_max: usize,
    prev_l2: u128,
}

impl SwapState {
    pub fn new(dims: &Dims, cells: Vec<u32>, objective: AnnealObjective) -> Self {
        let (m, n, k, l) = (dims.m(), dims.n(), dims.k(), dims.l());
        let count = dims.cells();
        let mut cell_windows = vec![Vec::with_capacity(k * l); count];
        for i in 0..m {
            for j in 0..n {
                for a in 0..k {
                    for b in 0..l {
                        cell_windows[((i + a) % m) * n + (j + b) % n].push((i * n + j) as u32);
                    }
                }
            }
        }
        let board = Board::new(m, n, cells).expect("state must start from a permutation");
        let sums = board.region_sums(k, l).expect("valid dims").as_slice().to_vec();
        let target_x2 = dims.target_sum_x2();
        let span = 2 * (k * l) * count + 1;
        let mut dev_count = if objective == AnnealObjective::MaxAbsDevX2 { vec![0u32; span] } else { Vec::new() };
        let mut max_dev = 0usize;
        let mut l2 = 0u128;
        for &s in &sums {
            let d = (2 * s - target_x2).unsigned_abs();
            l2 += d as u128 * d as u128;
            max_dev = max_dev.max(d as usize);
            if let Some(c) = dev_count.get_mut(d as usize) {
                *c += 1;
            }
        }
        SwapState {
            dims: *dims,
            objective,
            target_x2,
            cells: board.into_cells(),
            sums,
            cell_windows,
            scratch: vec![0; count],
            marked: vec![false; count],
            touched: Vec::with_capacity(2 * k * l),
            dev_count,
            max_dev,
            l2,
            pending: None,
        }
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn objective(&self) -> u128 {
        match self.objective {
            AnnealObjective::MaxAbsDevX2 => self.max_dev as u128,
            AnnealObjective::L2DevX4 => self.l2,
        }
    }

    fn dev(&self, s: i64) -> u64 {
        (2 * s - self.target_x2).unsigned_abs()
    }

    pub fn propose(&mut self, a: usize, b: usize) -> u128 {
        debug_assert!(self.pending.is_none());
        let (va, vb) = (self.cells[a] as i64, self.cells[b] as i64);
        self.touched.clear();
        for (cell, delta) in [(a, vb - va), (b, va - vb)] {
            for &w in &self.cell_windows[cell] {
                if !self.marked[w as usize] {
                    self.marked[w as usize] = true;
                    self.touched.push(w);
                }
                self.scratch[w as usize] += delta;
            }
        }
        self.pending = Some(Pending { a, b, prev_max: self.max_dev, prev_l2: self.l2 });
        self.apply(1);
        self.cells.swap(a, b);
        self.objective()
    }

    pub fn commit(&mut self) {
        self.pending.take().expect("commit without proposal");
        for &w in &self.touched {
            self.scratch[w as usize] = 0;
            self.marked[w as usize] = false;
        }
    }

    pub fn reject(&mut self) {
        let p = self.pending.take().expect("reject without proposal");
        self.cells.swap(p.a, p.b);
        self.apply(-1);
        self.max_dev = p.prev_max;
        self.l2 = p.prev_l2;
        for &w in &self.touched {
            self.scratch[w as usize] = 0;
            self.marked[w as usize] = false;
        }
    }

    // Adds `sign * scratch` to every touched region sum, keeping the
    // histogram and the squared total in step.
    fn apply(&mut self, sign: i64) {
        let track_max = self.objective == AnnealObjective::MaxAbsDevX2;
        let mut raised = 0usize;
        let mut l2 = self.l2 as i128;
        for idx in 0..self.touched.len() {
            let w = self.touched[idx] as usize;
            let delta = self.scratch[w] * sign;
            if delta == 0 {
                continue;
            }
            let old = self.dev(self.sums[w]);
            self.sums[w] += delta;
            let new = self.dev(self.sums[w]);
            l2 += new as i128 * new as i128 - old as i128 * old as i128;
            if track_max {
                self.dev_count[old as usize] -= 1;
                self.dev_count[new as usize] += 1;
                raised = raised.max(new as usize);
            }
        }
        self.l2 = l2 as u128;
        if track_max {
            let mut top = self.max_dev.max(raised);
            while top > 0 && self.dev_count[top] == 0 {
                top -= 1;
            }
            self.max_dev = top;
        }
    }

    /// Board dimensions the state was built for.
    pub fn dims(&self) -> Dims {
        self.dims
    }
}

const FRAC_BITS: u32 = 62;
const ONE: i128 = 1 << FRAC_BITS;
const TABLE_LEN: usize = 1024;

/// Geometric temperature schedule with per-level acceptance thresholds.
///
/// Temperatures are Q32.32 fixed point. `threshold(d)` is
/// `floor(2^32 * exp(-d / T))`, compared against a uniform `u32`.
struct Schedule {
    level: u32,
    temperature: u128,
    cooling: (u64, u64),
    table: Vec<u64>,
}

const UNSET: u64 = u64::MAX;

impl Schedule {
    fn new(params: &AnnealParams) -> Self {
        let (num, den) = params.initial_temperature;
        let temperature = ((num as u128) << 32) / den as u128;
        Schedule { level: 0, temperature, cooling: params.cooling, table: vec![UNSET; TABLE_LEN] }
    }

    fn advance_to(&mut self, level: u32) {
        while self.level < level {
            self.temperature = self.temperature * self.cooling.0 as u128 / self.cooling.1 as u128;
            self.level += 1;
            self.table.fill(UNSET);
        }
    }

    fn threshold(&mut self, delta: u128) -> u64 {
        if (delta as usize) < TABLE_LEN && delta <= usize::MAX as u128 {
            let slot = &mut self.table[delta as usize];
            if *slot == UNSET {
                *slot = acceptance_threshold(delta, self.temperature);
            }
            *slot
        } else {
            acceptance_threshold(delta, self.temperature)
        }
    }
}

/// `floor(2^32 * exp(-delta / T))` with `T` in Q32.32, using only integer
/// arithmetic.
pub(crate) fn acceptance_threshold(delta: u128, temperature_q32: u128) -> u64 {
    if delta == 0 {
        return 1 << 32;
    }
    if temperature_q32 == 0 {
        return 0;
    }
    // x = delta / T in Q32.32; exp(-x) < 2^-32 once x > 22.2
    let Some(scaled) = delta.checked_mul(1u128 << 64) else { return 0 };
    let x_q32 = scaled / temperature_q32;
    if x_q32 >= 23u128 << 32 {
        return 0;
    }
    // exp(-x) = exp(-x / 32)^32 with x / 32 < 1
    let y = ((x_q32 << (FRAC_BITS - 32)) >> 5) as i128;
    let mut term = ONE;
    let mut sum = ONE;
    for i in 1..=30i128 {
        term = term * y / ONE / i;
        if term == 0 {
            break;
        }
        if i % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    let mut r = sum.max(0) as u128;
    for _ in 0..5 {
        r = (r * r) >> FRAC_BITS;
    }
    (r >> (FRAC_BITS - 32)) as u64
}
