//! Exhaustive ground truth for small boards.
//!
//! Everything here enumerates boards directly against the region-sum
//! definition and never consults the closed-form decision rule, so it can
//! be used to check that rule, the builder and the annealer.
//!
//! Value 0 is pinned to cell `(0, 0)` by default. Cyclic row and column
//! shifts preserve the multiset of region sums, so every board has a
//! shifted copy with 0 at the origin and nothing is lost.

use core::fmt;

use crate::grid::{Board, Dims};
use crate::search::{Goal, Search};

/// Node budget used when the caller does not pick one.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Feasible,
    /// The reduced search space was exhausted without a witness.
    Infeasible,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub status: OracleStatus,
    pub witness: Option<Board>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    BudgetExceeded { nodes: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BudgetExceeded { nodes } => {
                write!(f, "search budget exceeded after {nodes} nodes")
            }
        }
    }
}

impl core::error::Error for OracleError {}

/// Objectives the exact minimiser understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinObjective {
    /// `max_sum - min_sum`.
    Spread,
    /// `max |2S - target_x2|`.
    MaxAbsDevX2,
}

/// Search knobs. `fix_origin` pins value 0 at `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    pub budget: u64,
    pub fix_origin: bool,
}

impl OracleOptions {
    pub fn with_budget(budget: u64) -> Self {
        OracleOptions { budget, fix_origin: true }
    }
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions::with_budget(DEFAULT_BUDGET)
    }
}

/// Decides feasibility by exhaustive search; the witness is the
/// lexicographically smallest zero-discrepancy board with 0 at the origin.
pub fn oracle_decide(dims: &Dims, budget: u64) -> OracleResult {
    oracle_decide_with(dims, OracleOptions::with_budget(budget))
}

pub fn oracle_decide_with(dims: &Dims, opts: OracleOptions) -> OracleResult {
    let out = Search::new(*dims, Goal::First, opts.budget, opts.fix_origin).run();
    let witness = out
        .best
        .map(|cells| Board::from_cells_unchecked(dims.m(), dims.n(), cells));
    let status = if witness.is_some() {
        OracleStatus::Feasible
    } else if out.exhausted_budget {
        OracleStatus::BudgetExceeded
    } else {
        OracleStatus::Infeasible
    };
    OracleResult { status, witness, nodes_explored: out.nodes }
}

/// Number of zero-discrepancy boards with 0 at the origin.
pub fn count_witnesses(dims: &Dims, budget: u64) -> Result<u64, OracleError> {
    let out = Search::new(*dims, Goal::Count, budget, true).run();
    if out.exhausted_budget {
        return Err(OracleError::BudgetExceeded { nodes: out.nodes });
    }
    Ok(out.count)
}

/// Exact minimum of `objective` over all boards, with the lexicographically
/// smallest board attaining it.
///
/// Branch and bound over the same enumeration as [`oracle_decide`]; for
/// `m*n <= 9` it finishes quickly, above that it depends on the budget.
pub fn oracle_min_discrepancy(
    dims: &Dims,
    objective: MinObjective,
    budget: u64,
) -> Result<(u64, Board), OracleError> {
    let goal = match objective {
        MinObjective::Spread => Goal::MinSpread,
        MinObjective::MaxAbsDevX2 => Goal::MinMaxAbsDevX2,
    };
    let out = Search::new(*dims, goal, budget, true).run();
    if out.exhausted_budget {
        return Err(OracleError::BudgetExceeded { nodes: out.nodes });
    }
    let cells = out.best.expect("an unbounded minimisation always reaches a leaf");
    let value = out.best_value.expect("best value recorded with best board");
    Ok((value, Board::from_cells_unchecked(dims.m(), dims.n(), cells)))
}
