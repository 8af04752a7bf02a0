//! Constructions of zero-discrepancy boards.
//!
//! Strategies are tried cheapest first. Every board is checked with the
//! region-sum verifier before it is returned; a construction that fails the
//! check is treated as not applicable and the next strategy runs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::feasibility::{classify, reduce, Reason, ReducedDims};
use crate::grid::{Board, Dims};
use crate::search::{Goal, Search};

/// Node budget for the backtracking fallback inside [`build`].
pub const DEFAULT_BACKTRACK_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// `k = m` and `l = n`: one region covers the board.
    SingleRegion,
    /// `g = 1`, `h = n`: region sums are equal iff row sums are equal.
    EqualRowSums,
    /// `h = 1`, `g = m`: the transpose of `EqualRowSums`.
    EqualColSums,
    /// `g, h >= 2`: mixed-radix digits spread through the structured form.
    TwoPhaseDigits,
    /// Exhaustive search with region-sum pruning.
    BacktrackFallback,
}

impl Strategy {
    pub const ORDER: [Strategy; 5] = [
        Strategy::SingleRegion,
        Strategy::EqualRowSums,
        Strategy::EqualColSums,
        Strategy::TwoPhaseDigits,
        Strategy::BacktrackFallback,
    ];

    pub fn applies(&self, dims: &Dims, r: &ReducedDims) -> bool {
        let (m, n) = (dims.m(), dims.n());
        match self {
            Strategy::SingleRegion => r.g == m && r.h == n,
            Strategy::EqualRowSums => r.g == 1 && r.h == n,
            Strategy::EqualColSums => r.h == 1 && r.g == m,
            Strategy::TwoPhaseDigits => r.g >= 2 && r.h >= 2,
            Strategy::BacktrackFallback => true,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::SingleRegion => "single-region",
            Strategy::EqualRowSums => "equal-row-sums",
            Strategy::EqualColSums => "equal-col-sums",
            Strategy::TwoPhaseDigits => "two-phase-digits",
            Strategy::BacktrackFallback => "backtrack",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildError {
    /// The decision rule says no board exists.
    Infeasible(Reason),
    /// No strategy succeeded within the configured budget.
    SizeLimit,
    /// `n*(m*n - 1)` is odd, so equal row sums are impossible.
    ParityObstruction,
    /// The construction does not apply or failed verification.
    StrategyFailed,
    BudgetExceeded { nodes: u64 },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Infeasible(r) => write!(f, "infeasible ({r})"),
            BuildError::SizeLimit => write!(f, "no strategy succeeded within the budget"),
            BuildError::ParityObstruction => write!(f, "row sums cannot be equal (parity)"),
            BuildError::StrategyFailed => write!(f, "construction failed verification"),
            BuildError::BudgetExceeded { nodes } => {
                write!(f, "backtracking budget exceeded after {nodes} nodes")
            }
        }
    }
}

impl core::error::Error for BuildError {}

/// A verified board for `dims`, or why there is none.
pub fn build(dims: &Dims) -> Result<Board, BuildError> {
    build_with_budget(dims, DEFAULT_BACKTRACK_BUDGET).map(|(_, b)| b)
}

/// Like [`build`], also reporting which strategy produced the board.
pub fn build_with_budget(dims: &Dims, budget: u64) -> Result<(Strategy, Board), BuildError> {
    let reason = classify(dims);
    if !reason.is_feasible() {
        return Err(BuildError::Infeasible(reason));
    }
    if let Ok(found) = build_direct(dims) {
        return Ok(found);
    }
    match build_backtrack(dims, budget) {
        Ok(board) => Ok((Strategy::BacktrackFallback, board)),
        Err(_) => Err(BuildError::SizeLimit),
    }
}

/// Tries every strategy except the backtracking fallback.
pub(crate) fn build_direct(dims: &Dims) -> Result<(Strategy, Board), BuildError> {
    let r = reduce(dims);
    for strategy in Strategy::ORDER {
        if strategy == Strategy::BacktrackFallback || !strategy.applies(dims, &r) {
            continue;
        }
        let attempt = match strategy {
            Strategy::SingleRegion => Board::row_major(dims.m(), dims.n()).map_err(|_| BuildError::StrategyFailed),
            Strategy::EqualRowSums => build_equal_row_sums(dims.m(), dims.n()),
            Strategy::EqualColSums => build_equal_row_sums(dims.n(), dims.m()).map(|b| b.transpose()),
            Strategy::TwoPhaseDigits => build_two_phase(dims),
            Strategy::BacktrackFallback => unreachable!(),
        };
        if let Ok(board) = attempt {
            if verified(&board, dims) {
                return Ok((strategy, board));
            }
        }
    }
    Err(BuildError::StrategyFailed)
}

fn verified(board: &Board, dims: &Dims) -> bool {
    board.is_zero_discrepancy(dims.k(), dims.l()).unwrap_or(false)
}

/// An `m x n` board whose row sums all equal `n*(m*n - 1)/2`.
///
/// For even `n`, each row holds `n/2` complementary pairs `(v, m*n-1-v)`.
/// For odd `n` (so `m` is odd too), the first three columns hold an
/// equal-sum partition of `0..3m` into triples and the remaining columns
/// hold complementary pairs of `3m..m*n`. Triple `i` is
/// `(a_i, b_i, c_i)` with `c_i = 3m-1-i`, `b_i = m + ((m-1)/2 - i) mod m`
/// and `a_i` the value completing the sum `3(3m-1)/2`.
pub fn build_equal_row_sums(m: usize, n: usize) -> Result<Board, BuildError> {
    if m == 0 || n == 0 {
        return Err(BuildError::StrategyFailed);
    }
    let mn = m * n;
    if (n * (mn - 1)) % 2 == 1 {
        return Err(BuildError::ParityObstruction);
    }
    if n == 1 {
        // one-cell rows would all have to hold the same value
        return if m == 1 { Ok(Board::from_cells_unchecked(1, 1, vec![0])) } else { Err(BuildError::StrategyFailed) };
    }
    let mut cells = Vec::with_capacity(mn);
    let (lead, low) = if n.is_multiple_of(2) { (0, 0) } else { (3, 3 * m) };
    let pairs_per_row = (n - lead) / 2;
    // complementary pairs of low..mn
    let top = (low + mn - 1) as u32;
    for i in 0..m {
        if lead == 3 {
            let half = (m - 1) / 2;
            let c = 3 * m - 1 - i;
            let b = m + (half + m - i % m) % m;
            let a = (9 * m - 3) / 2 - b - c;
            cells.extend([a as u32, b as u32, c as u32]);
        }
        for t in 0..pairs_per_row {
            let v = (low + i * pairs_per_row + t) as u32;
            cells.extend([v, top - v]);
        }
    }
    Board::new(m, n, cells).map_err(|_| BuildError::StrategyFailed)
}

/// `rows` permutations of `0..len` whose column sums are all equal, or
/// `None` when that is impossible (odd `rows > 1` with even `len`, or a
/// single row of length above one).
///
/// Even row counts use identity/reversal pairs. Odd counts use three rows
/// taken from the equal-sum triple partition and pairs for the rest.
pub fn balanced_rows(rows: usize, len: usize) -> Option<Vec<Vec<u32>>> {
    if rows == 0 || len == 0 {
        return None;
    }
    if rows == 1 {
        return (len == 1).then(|| vec![vec![0]]);
    }
    let mut out = Vec::with_capacity(rows);
    let mut paired = rows;
    if rows % 2 == 1 {
        if len.is_multiple_of(2) {
            return None;
        }
        let half = (len - 1) / 2;
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        let mut c = Vec::with_capacity(len);
        for i in 0..len {
            let ci = 3 * len - 1 - i;
            let bi = len + (half + len - i) % len;
            let ai = (9 * len - 3) / 2 - bi - ci;
            a.push(ai as u32);
            b.push((bi - len) as u32);
            c.push((ci - 2 * len) as u32);
        }
        out.extend([a, b, c]);
        paired -= 3;
    }
    for r in 0..paired {
        let row: Vec<u32> = if r % 2 == 0 {
            (0..len as u32).collect()
        } else {
            (0..len as u32).rev().collect()
        };
        out.push(row);
    }
    Some(out)
}

/// Structured construction for `g, h >= 2`.
///
/// With `x = g*X + x0` and `y = h*Y + y0` the value at `(x, y)` is
///
/// ```text
/// x0 + g*y0 + g*h*R[y0][X] + g*h*p*C[x0][Y]
/// ```
///
/// where `R` (`h` rows over `0..p`) and `C` (`g` rows over `0..q`) come from
/// [`balanced_rows`]. The terms in `x0` and `C` depend only on
/// `(x mod g, y)` and sum to a constant over `x0`; the terms in `y0` and `R`
/// depend only on `(x, y mod h)` and sum to a constant over `y0`, which is
/// the structured form of a zero-discrepancy matrix. The digits decode
/// uniquely, so the board is a permutation.
///
/// When `g` is odd and `q` even there is no such `C`, but then `h` is even
/// and the value becomes `G[y0*q + Y][x0] + g*h*q*R[y0][X]`, with `G` from
/// [`near_balanced_groups`]. The sum over `x0` then depends on `y0` alone,
/// which is all that `h`-wide windows need. The case `h` odd, `p` even is
/// the transpose.
pub fn build_two_phase(dims: &Dims) -> Result<Board, BuildError> {
    let reason = classify(dims);
    if !reason.is_feasible() {
        return Err(BuildError::Infeasible(reason));
    }
    let ReducedDims { g, h, p, q } = reduce(dims);
    if g < 2 || h < 2 {
        return Err(BuildError::StrategyFailed);
    }
    let (m, n) = (dims.m(), dims.n());
    let board = match (balanced_rows(h, p), balanced_rows(g, q)) {
        (Some(row_digits), Some(col_digits)) => {
            let mut cells = Vec::with_capacity(m * n);
            for x in 0..m {
                let (x0, big_x) = (x % g, x / g);
                for y in 0..n {
                    let (y0, big_y) = (y % h, y / h);
                    let v = x0
                        + g * y0
                        + g * h * row_digits[y0][big_x] as usize
                        + g * h * p * col_digits[x0][big_y] as usize;
                    cells.push(v as u32);
                }
            }
            Board::new(m, n, cells).map_err(|_| BuildError::StrategyFailed)?
        }
        (Some(row_digits), None) => {
            let groups = near_balanced_groups(h * q, g).ok_or(BuildError::StrategyFailed)?;
            let mut cells = Vec::with_capacity(m * n);
            for x in 0..m {
                let (x0, big_x) = (x % g, x / g);
                for y in 0..n {
                    let (y0, big_y) = (y % h, y / h);
                    let v = groups[y0 * q + big_y][x0] as usize + g * h * q * row_digits[y0][big_x] as usize;
                    cells.push(v as u32);
                }
            }
            Board::new(m, n, cells).map_err(|_| BuildError::StrategyFailed)?
        }
        (None, _) => build_two_phase(&dims.transpose())?.transpose(),
    };
    if verified(&board, dims) {
        Ok(board)
    } else {
        Err(BuildError::StrategyFailed)
    }
}

/// Partition of `0..count*size` into `count` groups of `size` values where
/// the first `count/2` groups sum to `s` and the rest to `s + 1`.
///
/// Needs an even `count` and an odd `size >= 3`. Each group is a triple
/// from `0..3*count` plus complementary pairs from the rest. With
/// `L = count/2`, triple `i < L` is `(2i, count + L-1-i, 3*count-1-i)` and
/// triple `L + j` is `(2j+1, count + 2L-1-j, 3*count-1-L-j)`.
pub fn near_balanced_groups(count: usize, size: usize) -> Option<Vec<Vec<u32>>> {
    if count == 0 || count % 2 == 1 || size < 3 || size.is_multiple_of(2) {
        return None;
    }
    let half = count / 2;
    let pairs = (size - 3) / 2;
    let top = count * size - 1 + 3 * count;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let (a, b) = if i < half { (2 * i, half - 1 - i) } else { (2 * (i - half) + 1, count - 1 - (i - half)) };
        let mut group = vec![a as u32, (count + b) as u32, (3 * count - 1 - i) as u32];
        for t in 0..pairs {
            let v = 3 * count + i * pairs + t;
            group.extend([v as u32, (top - v) as u32]);
        }
        out.push(group);
    }
    Some(out)
}

/// Depth-first search for the lexicographically smallest zero-discrepancy
/// board with 0 at the origin.
///
/// The search runs on the reduced `g x h` regions, which have exactly the
/// same zero-discrepancy boards and close earlier in row-major order.
pub fn build_backtrack(dims: &Dims, budget: u64) -> Result<Board, BuildError> {
    let reason = classify(dims);
    if !reason.is_feasible() {
        return Err(BuildError::Infeasible(reason));
    }
    let r = reduce(dims);
    let search_dims = dims.with_region(r.g, r.h).map_err(|_| BuildError::StrategyFailed)?;
    let out = Search::new(search_dims, Goal::First, budget, true).run();
    match out.best {
        Some(cells) => {
            let board = Board::from_cells_unchecked(dims.m(), dims.n(), cells);
            if verified(&board, dims) {
                Ok(board)
            } else {
                Err(BuildError::StrategyFailed)
            }
        }
        None if out.exhausted_budget => Err(BuildError::BudgetExceeded { nodes: out.nodes }),
        None => Err(BuildError::StrategyFailed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: usize, n: usize, k: usize, l: usize) -> Dims {
        Dims::new(m, n, k, l).unwrap()
    }

    #[test]
    fn single_region_is_row_major() {
        let (s, b) = build_with_budget(&dims(3, 4, 3, 4), 0).unwrap();
        assert_eq!(s, Strategy::SingleRegion);
        assert_eq!(b, Board::row_major(3, 4).unwrap());
    }

    #[test]
    fn equal_row_sums_examples() {
        let b = build_equal_row_sums(2, 2).unwrap();
        assert_eq!(b, Board::from_rows(&[[0, 3], [1, 2]]).unwrap());

        let b = build_equal_row_sums(3, 3).unwrap();
        assert_eq!(b, Board::from_rows(&[[0, 4, 8], [2, 3, 7], [1, 5, 6]]).unwrap());
        assert!(b.is_zero_discrepancy(2, 3).unwrap());
        let t = b.region_sums(2, 3).unwrap();
        assert!(t.as_slice().iter().all(|&s| s == 24));

        assert_eq!(build_equal_row_sums(2, 3), Err(BuildError::ParityObstruction));
    }

    #[test]
    fn equal_row_sums_many_shapes() {
        for m in 1..=9 {
            for n in 1..=9 {
                match build_equal_row_sums(m, n) {
                    Ok(b) => {
                        let sums = b.row_sums();
                        assert!(sums.iter().all(|&s| s == sums[0]), "{m}x{n}");
                    }
                    Err(BuildError::ParityObstruction) => assert_eq!((n * (m * n - 1)) % 2, 1),
                    Err(e) => {
                        assert_eq!(e, BuildError::StrategyFailed);
                        assert!(n == 1 && m > 1);
                    }
                }
            }
        }
    }

    #[test]
    fn balanced_rows_have_equal_columns() {
        for rows in 1..=7 {
            for len in 1..=9 {
                let Some(arr) = balanced_rows(rows, len) else {
                    assert!((rows % 2 == 1 && len % 2 == 0) || (rows == 1 && len > 1));
                    continue;
                };
                assert_eq!(arr.len(), rows);
                for row in &arr {
                    let mut sorted = row.clone();
                    sorted.sort_unstable();
                    assert_eq!(sorted, (0..len as u32).collect::<Vec<_>>());
                }
                let col = |j: usize| arr.iter().map(|r| r[j]).sum::<u32>();
                assert!((0..len).all(|j| col(j) == col(0)));
            }
        }
    }

    #[test]
    fn two_phase_examples() {
        let b = build_two_phase(&dims(2, 4, 2, 2)).unwrap();
        assert!(b.region_sums(2, 2).unwrap().as_slice().iter().all(|&s| s == 14));

        let b = build_two_phase(&dims(6, 6, 2, 2)).unwrap();
        assert!(b.region_sums(2, 2).unwrap().as_slice().iter().all(|&s| s == 70));

        assert_eq!(
            build_two_phase(&dims(6, 6, 3, 3)),
            Err(BuildError::Infeasible(Reason::Parity))
        );
    }

    #[test]
    fn backtrack_examples() {
        let b = build_backtrack(&dims(2, 2, 2, 2), 1000).unwrap();
        assert_eq!(b, Board::from_rows(&[[0, 1], [2, 3]]).unwrap());
        assert!(build_backtrack(&dims(2, 4, 2, 2), 1_000_000).unwrap().is_zero_discrepancy(2, 2).unwrap());
        assert!(build_backtrack(&dims(4, 4, 2, 2), 10_000_000).unwrap().is_zero_discrepancy(2, 2).unwrap());
        assert!(matches!(build_backtrack(&dims(4, 4, 2, 2), 3), Err(BuildError::BudgetExceeded { .. })));
    }

    #[test]
    fn infeasible_is_reported() {
        assert_eq!(build(&dims(3, 3, 2, 2)), Err(BuildError::Infeasible(Reason::CapacityRow)));
        assert_eq!(build(&dims(6, 6, 3, 3)), Err(BuildError::Infeasible(Reason::Parity)));
    }

    #[test]
    fn odd_rows_with_even_length_use_groups() {
        // g = 3 with q = 2 has no balanced 3-row digit array
        for (m, n, k, l) in [(3, 4, 3, 2), (4, 3, 2, 3), (3, 8, 3, 2), (10, 16, 5, 4), (9, 12, 3, 6), (12, 15, 6, 5)] {
            let d = dims(m, n, k, l);
            let (s, b) = build_with_budget(&d, 0).unwrap();
            assert_eq!(s, Strategy::TwoPhaseDigits, "{d}");
            assert!(b.is_zero_discrepancy(k, l).unwrap(), "{d}");
        }
    }

    #[test]
    fn near_balanced_group_sums() {
        for count in (2..=12).step_by(2) {
            for size in (3..=9).step_by(2) {
                let groups = near_balanced_groups(count, size).unwrap();
                let mut all: Vec<u32> = groups.iter().flatten().copied().collect();
                all.sort_unstable();
                assert_eq!(all, (0..(count * size) as u32).collect::<Vec<_>>());
                let sums: Vec<u32> = groups.iter().map(|g| g.iter().sum()).collect();
                let half = count / 2;
                assert!(sums[..half].iter().all(|&s| s == sums[0]));
                assert!(sums[half..].iter().all(|&s| s == sums[0] + 1));
            }
        }
        assert_eq!(near_balanced_groups(3, 3), None);
        assert_eq!(near_balanced_groups(2, 4), None);
    }
}
