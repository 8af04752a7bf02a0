//! Deciding whether a zero-discrepancy board exists.
//!
//! Write `g = gcd(k, m)` and `h = gcd(l, n)`. On the torus the `k x l` box
//! filter has a vanishing Fourier coefficient at frequency `(u, v)` exactly
//! when `m | u*k` with `u != 0`, or `n | v*l` with `v != 0`. A real matrix
//! has all region sums equal iff its spectrum lives on those frequencies
//! plus the origin, i.e. iff it has the form
//!
//! ```text
//! A(x, y) = c + G(x mod g, y) + H(x, y mod h)
//! ```
//!
//! with `G` summing to zero over its first argument and `H` over its second.
//! This depends on `(k, l)` only through `(g, h)` and gives the dimension
//! returned by [`solution_space_dimension`]. For entries `0..m*n`:
//!
//! * `g = 1, h < n`: every row is `h`-periodic, so values repeat.
//! * `h = 1, g < m`: every column is `g`-periodic, same collision.
//! * a `g x h` region has integer sum `g*h*(m*n - 1)/2`, so that product
//!   must be even.
//!
//! Everything else is feasible; the builder produces witnesses. The rule is
//! checked against the exhaustive oracle in the test suite.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::builder;
use crate::grid::{Board, Dims};

pub(crate) fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// The parameters feasibility actually depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedDims {
    /// `gcd(k, m)`
    pub g: usize,
    /// `gcd(l, n)`
    pub h: usize,
    /// `m / g`
    pub p: usize,
    /// `n / h`
    pub q: usize,
}

pub fn reduce(dims: &Dims) -> ReducedDims {
    let g = gcd(dims.k(), dims.m());
    let h = gcd(dims.l(), dims.n());
    ReducedDims { g, h, p: dims.m() / g, q: dims.n() / h }
}

/// Why a tuple is or is not feasible. Listed in reporting priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    /// A `1 x 1` board.
    Trivial,
    /// `g = 1` and `h < n`: rows would repeat values.
    CapacityRow,
    /// `h = 1` and `g < m`: columns would repeat values.
    CapacityCol,
    /// `g*h*(m*n - 1)` is odd.
    Parity,
    /// Feasible; a construction exists.
    Constructed,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::Trivial => "trivial",
            Reason::CapacityRow => "capacity-row",
            Reason::CapacityCol => "capacity-col",
            Reason::Parity => "parity",
            Reason::Constructed => "constructed",
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Reason::Trivial | Reason::Constructed)
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub feasible: bool,
    pub reason: Reason,
    /// A verified board, attached when a direct construction applies.
    pub witness: Option<Board>,
}

/// Applies the decision rule without building anything.
pub fn classify(dims: &Dims) -> Reason {
    let (m, n) = (dims.m(), dims.n());
    let ReducedDims { g, h, .. } = reduce(dims);
    if m * n == 1 {
        Reason::Trivial
    } else if g == 1 && h < n {
        Reason::CapacityRow
    } else if h == 1 && g < m {
        Reason::CapacityCol
    } else if (g * h) % 2 == 1 && (m * n - 1) % 2 == 1 {
        Reason::Parity
    } else {
        Reason::Constructed
    }
}

/// Decision rule plus, when a direct construction applies, a verified
/// witness. The backtracking fallback is never run from here.
pub fn decide(dims: &Dims) -> Verdict {
    let reason = classify(dims);
    let witness = if reason.is_feasible() {
        builder::build_direct(dims).ok().map(|(_, b)| b)
    } else {
        None
    };
    Verdict { feasible: reason.is_feasible(), reason, witness }
}

/// Dimension of the affine space of real matrices whose region sums are
/// all equal.
pub fn solution_space_dimension(dims: &Dims) -> usize {
    let ReducedDims { g, h, .. } = reduce(dims);
    let (m, n) = (dims.m(), dims.n());
    1 + (g - 1) * n + m * (h - 1) - (g - 1) * (h - 1)
}

/// Default cap on the number of cell variables for [`constraint_rank`].
pub const DEFAULT_RANK_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankError {
    CapExceeded { cells: usize, cap: usize },
    /// An intermediate entry left the `i128` range.
    Overflow,
}

impl fmt::Display for RankError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankError::CapExceeded { cells, cap } => {
                write!(f, "{cells} cell variables exceed the cap of {cap}")
            }
            RankError::Overflow => write!(f, "integer overflow during elimination"),
        }
    }
}

impl core::error::Error for RankError {}

/// Rank of the system `S(i, j) - S(0, 0) = 0` over the cell variables,
/// using the default cap.
pub fn constraint_rank(dims: &Dims) -> Result<usize, RankError> {
    constraint_rank_capped(dims, DEFAULT_RANK_CAP)
}

pub fn constraint_rank_capped(dims: &Dims, cap: usize) -> Result<usize, RankError> {
    let cells = dims.cells();
    if cells > cap {
        return Err(RankError::CapExceeded { cells, cap });
    }
    let (m, n, k, l) = (dims.m(), dims.n(), dims.k(), dims.l());
    let indicator = |i: usize, j: usize| {
        let mut row = vec![0i128; cells];
        for a in 0..k {
            for b in 0..l {
                row[((i + a) % m) * n + (j + b) % n] += 1;
            }
        }
        row
    };
    let base = indicator(0, 0);
    let mut rows: Vec<Vec<i128>> = (1..cells)
        .map(|w| {
            let mut r = indicator(w / n, w % n);
            for (x, b) in r.iter_mut().zip(&base) {
                *x -= b;
            }
            r
        })
        .collect();
    integer_rank(&mut rows, cells)
}

/// Fraction-free row reduction: `row_j <- p*row_j - a_j*row_i`, then each
/// row is divided by the gcd of its entries to keep them small.
pub fn integer_rank(rows: &mut [Vec<i128>], cols: usize) -> Result<usize, RankError> {
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (done, rest) = rows.split_at_mut(rank + 1);
        let prow = &done[rank];
        let p = prow[col];
        for row in rest.iter_mut() {
            let a = row[col];
            if a == 0 {
                continue;
            }
            for c in col..cols {
                let lhs = p.checked_mul(row[c]).ok_or(RankError::Overflow)?;
                let rhs = a.checked_mul(prow[c]).ok_or(RankError::Overflow)?;
                row[c] = lhs.checked_sub(rhs).ok_or(RankError::Overflow)?;
            }
            normalize(row);
        }
        rank += 1;
    }
    Ok(rank)
}

fn normalize(row: &mut [i128]) {
    let mut d: u128 = 0;
    for &x in row.iter() {
        let mut a = d;
        let mut b = x.unsigned_abs();
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        d = a;
    }
    if d > 1 {
        for x in row.iter_mut() {
            *x /= d as i128;
        }
    }
}
