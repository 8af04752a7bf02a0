//! Depth-first assignment of values to cells with region-sum bounds.
//!
//! Cells are filled in row-major order and values are tried in ascending
//! order, so leaves are visited in lexicographic board order. Every region
//! keeps its partial sum; after each assignment each region's final sum is
//! bracketed between `partial + (r smallest unused values)` and
//! `partial + (r largest unused values)` where `r` is its number of empty
//! cells. Shared by the oracle and the backtracking builder.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::Dims;

/// What the search does at the leaves and how it prunes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    /// Stop at the first zero-discrepancy board.
    First,
    /// Count every zero-discrepancy board.
    Count,
    /// Branch and bound on the spread of region sums.
    MinSpread,
    /// Branch and bound on `max |2S - target_x2|`.
    MinMaxAbsDevX2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Outcome {
    /// First witness for `First`, best board for the minimisation goals.
    pub best: Option<Vec<u32>>,
    /// Best objective value for the minimisation goals.
    pub best_value: Option<u64>,
    pub count: u64,
    pub nodes: u64,
    /// True when the budget cut the search short.
    pub exhausted_budget: bool,
}

pub(crate) struct Search {
    dims: Dims,
    goal: Goal,
    budget: u64,
    fix_origin: bool,
    target_x2: i64,
    cell_windows: Vec<Vec<u32>>,
    window_sum: Vec<i64>,
    window_filled: Vec<u32>,
    used: Vec<bool>,
    assignment: Vec<u32>,
    prefix: Vec<i64>,
    outcome: Outcome,
}

enum Flow {
    Continue,
    Stop,
}

impl Search {
    pub(crate) fn new(dims: Dims, goal: Goal, budget: u64, fix_origin: bool) -> Self {
        let (m, n, k, l) = (dims.m(), dims.n(), dims.k(), dims.l());
        let cells = dims.cells();
        let mut cell_windows = vec![Vec::with_capacity(k * l); cells];
        for i in 0..m {
            for j in 0..n {
                let w = (i * n + j) as u32;
                for a in 0..k {
                    for b in 0..l {
                        cell_windows[((i + a) % m) * n + (j + b) % n].push(w);
                    }
                }
            }
        }
        Search {
            dims,
            goal,
            budget,
            fix_origin,
            target_x2: dims.target_sum_x2(),
            cell_windows,
            window_sum: vec![0; cells],
            window_filled: vec![0; cells],
            used: vec![false; cells],
            assignment: vec![0; cells],
            prefix: vec![0; cells + 1],
            outcome: Outcome {
                best: None,
                best_value: None,
                count: 0,
                nodes: 0,
                exhausted_budget: false,
            },
        }
    }

    pub(crate) fn run(mut self) -> Outcome {
        let exact = matches!(self.goal, Goal::First | Goal::Count);
        // Integral region sums can never hit a half-integral target.
        if exact && self.target_x2 % 2 != 0 {
            return self.outcome;
        }
        self.descend(0);
        self.outcome
    }

    fn descend(&mut self, pos: usize) -> Flow {
        let cells = self.dims.cells();
        if pos == cells {
            return self.leaf();
        }
        let values: core::ops::Range<usize> = if pos == 0 && self.fix_origin { 0..1 } else { 0..cells };
        for v in values {
            if self.used[v] {
                continue;
            }
            if self.outcome.nodes >= self.budget {
                self.outcome.exhausted_budget = true;
                return Flow::Stop;
            }
            self.outcome.nodes += 1;
            self.place(pos, v as u32);
            let flow = if self.feasible_bounds() { self.descend(pos + 1) } else { Flow::Continue };
            self.unplace(pos, v as u32);
            if let Flow::Stop = flow {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }

    fn place(&mut self, pos: usize, v: u32) {
        self.used[v as usize] = true;
        self.assignment[pos] = v;
        for &w in &self.cell_windows[pos] {
            self.window_sum[w as usize] += v as i64;
            self.window_filled[w as usize] += 1;
        }
    }

    fn unplace(&mut self, pos: usize, v: u32) {
        self.used[v as usize] = false;
        for &w in &self.cell_windows[pos] {
            self.window_sum[w as usize] -= v as i64;
            self.window_filled[w as usize] -= 1;
        }
    }

    /// Refreshes the prefix sums of unused values (ascending) and returns
    /// whether the current partial assignment can still reach the goal.
    fn feasible_bounds(&mut self) -> bool {
        let mut acc = 0i64;
        let mut r = 0usize;
        self.prefix[0] = 0;
        for (v, &u) in self.used.iter().enumerate() {
            if !u {
                acc += v as i64;
                r += 1;
                self.prefix[r] = acc;
            }
        }
        let remaining = r;
        let total = acc;
        let area = self.dims.region_area() as u32;

        let mut max_lo = i64::MIN;
        let mut min_hi = i64::MAX;
        let mut worst_dev = 0u64;
        for (w, &filled) in self.window_filled.iter().enumerate() {
            let empty = (area - filled) as usize;
            let lo = self.window_sum[w] + self.prefix[empty];
            let hi = self.window_sum[w] + total - self.prefix[remaining - empty];
            match self.goal {
                Goal::First | Goal::Count => {
                    if 2 * lo > self.target_x2 || 2 * hi < self.target_x2 {
                        return false;
                    }
                }
                Goal::MinSpread => {
                    max_lo = max_lo.max(lo);
                    min_hi = min_hi.min(hi);
                }
                Goal::MinMaxAbsDevX2 => {
                    let dev = if 2 * lo > self.target_x2 {
                        (2 * lo - self.target_x2) as u64
                    } else if 2 * hi < self.target_x2 {
                        (self.target_x2 - 2 * hi) as u64
                    } else {
                        0
                    };
                    worst_dev = worst_dev.max(dev);
                }
            }
        }
        let bound = match self.goal {
            Goal::First | Goal::Count => return true,
            Goal::MinSpread => (max_lo - min_hi).max(0) as u64,
            Goal::MinMaxAbsDevX2 => worst_dev,
        };
        // ties keep the earlier (lexicographically smaller) board
        self.outcome.best_value.is_none_or(|best| bound < best)
    }

    fn leaf(&mut self) -> Flow {
        match self.goal {
            Goal::First => {
                self.outcome.count += 1;
                self.outcome.best = Some(self.assignment.clone());
                Flow::Stop
            }
            Goal::Count => {
                self.outcome.count += 1;
                Flow::Continue
            }
            Goal::MinSpread | Goal::MinMaxAbsDevX2 => {
                let value = match self.goal {
                    Goal::MinSpread => {
                        let max = self.window_sum.iter().max().copied().unwrap_or(0);
                        let min = self.window_sum.iter().min().copied().unwrap_or(0);
                        (max - min) as u64
                    }
                    _ => self
                        .window_sum
                        .iter()
                        .map(|&s| (2 * s - self.target_x2).unsigned_abs())
                        .max()
                        .unwrap_or(0),
                };
                if self.outcome.best_value.is_none_or(|best| value < best) {
                    self.outcome.best_value = Some(value);
                    self.outcome.best = Some(self.assignment.clone());
                }
                Flow::Continue
            }
        }
    }
}
