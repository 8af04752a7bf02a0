//! Boards, toroidal region sums and discrepancy statistics.
//!
//! A board is an `m x n` arrangement of `0..m*n`. A region is a `k x l`
//! window whose row and column indices wrap modulo `m` and `n`, so there are
//! exactly `m*n` regions, one per top-left cell. Averaging over all regions
//! forces the common sum of a zero-discrepancy board to be
//! `k*l*(m*n - 1) / 2`; every statistic here is kept in doubled form so the
//! half-integral case stays in integers.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Errors raised while validating dimensions or constructing boards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridError {
    /// A board or region dimension was zero.
    ZeroSize,
    /// `k > m` or `l > n`.
    RegionTooLarge { m: usize, n: usize, k: usize, l: usize },
    /// The dimensions are too large for exact 64-bit region sums.
    Overflow,
    /// The value list does not have `m * n` entries.
    LengthMismatch { expected: usize, found: usize },
    /// The values are not a permutation of `0..m*n`.
    NotAPermutation { index: usize, value: u64, reason: PermutationDefect },
}

/// Why a value list failed the permutation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermutationDefect {
    Duplicate,
    OutOfRange,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::ZeroSize => write!(f, "dimensions must be at least 1"),
            GridError::RegionTooLarge { m, n, k, l } => {
                write!(f, "region {k}x{l} does not fit on a {m}x{n} board")
            }
            GridError::Overflow => write!(f, "dimensions too large for exact region sums"),
            GridError::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} values, found {found}")
            }
            GridError::NotAPermutation { index, value, reason } => match reason {
                PermutationDefect::Duplicate => {
                    write!(f, "value {value} at position {index} is a duplicate")
                }
                PermutationDefect::OutOfRange => {
                    write!(f, "value {value} at position {index} is out of range")
                }
            },
        }
    }
}

impl core::error::Error for GridError {}

/// Board size `m x n` together with region size `k x l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    m: usize,
    n: usize,
    k: usize,
    l: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize, k: usize, l: usize) -> Result<Self, GridError> {
        if m == 0 || n == 0 || k == 0 || l == 0 {
            return Err(GridError::ZeroSize);
        }
        if k > m || l > n {
            return Err(GridError::RegionTooLarge { m, n, k, l });
        }
        check_capacity(m, n, k, l)?;
        Ok(Dims { m, n, k, l })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Number of cells (and of regions).
    pub fn cells(&self) -> usize {
        self.m * self.n
    }

    /// Cells per region.
    pub fn region_area(&self) -> usize {
        self.k * self.l
    }

    /// Swap the roles of rows and columns.
    pub fn transpose(&self) -> Dims {
        Dims { m: self.n, n: self.m, k: self.l, l: self.k }
    }

    /// Same board, different region.
    pub fn with_region(&self, k: usize, l: usize) -> Result<Dims, GridError> {
        Dims::new(self.m, self.n, k, l)
    }

    /// Twice the common region sum: `k*l*(m*n - 1)`.
    pub fn target_sum_x2(&self) -> i64 {
        (self.k * self.l) as i64 * (self.cells() as i64 - 1)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.m, self.n, self.k, self.l)
    }
}

/// Twice the common sum forced on a zero-discrepancy board.
pub fn target_sum_x2(dims: &Dims) -> i64 {
    dims.target_sum_x2()
}

// Values must fit u32, doubled region sums must fit i64 and the squared
// deviation total must fit u128.
fn check_capacity(m: usize, n: usize, k: usize, l: usize) -> Result<(), GridError> {
    let mn = (m as u128).checked_mul(n as u128).ok_or(GridError::Overflow)?;
    if mn > u32::MAX as u128 + 1 {
        return Err(GridError::Overflow);
    }
    let dev = (k as u128 * l as u128)
        .checked_mul(mn)
        .and_then(|v| v.checked_mul(2))
        .ok_or(GridError::Overflow)?;
    if dev > i64::MAX as u128 {
        return Err(GridError::Overflow);
    }
    dev.checked_mul(dev)
        .and_then(|sq| sq.checked_mul(mn))
        .ok_or(GridError::Overflow)?;
    Ok(())
}

/// An `m x n` board holding each of `0..m*n` exactly once, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Board {
    rows: usize,
    cols: usize,
    cells: Vec<u32>,
}

impl Board {
    pub fn new(rows: usize, cols: usize, values: Vec<u32>) -> Result<Self, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::ZeroSize);
        }
        let expected = rows.checked_mul(cols).ok_or(GridError::Overflow)?;
        if expected as u64 > u32::MAX as u64 + 1 {
            return Err(GridError::Overflow);
        }
        if values.len() != expected {
            return Err(GridError::LengthMismatch { expected, found: values.len() });
        }
        check_permutation(&values)?;
        Ok(Board { rows, cols, cells: values })
    }

    /// Builds from a list of rows; all rows must have the same length.
    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self, GridError> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        let mut cells = Vec::with_capacity(m * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(GridError::LengthMismatch { expected: n, found: r.len() });
            }
            cells.extend_from_slice(r);
        }
        Board::new(m, n, cells)
    }

    /// `0, 1, ..., m*n - 1` laid out row by row.
    pub fn row_major(rows: usize, cols: usize) -> Result<Self, GridError> {
        let cells = (0..(rows * cols) as u32).collect();
        Board::new(rows, cols, cells)
    }

    pub(crate) fn from_cells_unchecked(rows: usize, cols: usize, cells: Vec<u32>) -> Self {
        debug_assert_eq!(check_permutation(&cells), Ok(()));
        debug_assert_eq!(cells.len(), rows * cols);
        Board { rows, cols, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<u32> {
        self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.cells[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.cells[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|&v| v as u64).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for row in self.cells.chunks(self.cols) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v as u64;
            }
        }
        sums
    }

    pub fn transpose(&self) -> Board {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                cells.push(self.get(i, j));
            }
        }
        Board { rows: self.cols, cols: self.rows, cells }
    }

    /// Cyclic shift: row `i` of the result is row `i + by` of `self`.
    pub fn shift_rows(&self, by: usize) -> Board {
        self.remap(|i, j| ((i + by) % self.rows, j))
    }

    /// Cyclic shift: column `j` of the result is column `j + by` of `self`.
    pub fn shift_cols(&self, by: usize) -> Board {
        self.remap(|i, j| (i, (j + by) % self.cols))
    }

    /// Reverses the order of the rows.
    pub fn reflect_rows(&self) -> Board {
        self.remap(|i, j| (self.rows - 1 - i, j))
    }

    /// Reverses the order of the columns.
    pub fn reflect_cols(&self) -> Board {
        self.remap(|i, j| (i, self.cols - 1 - j))
    }

    /// Replaces every value `v` with `m*n - 1 - v`.
    pub fn complement(&self) -> Board {
        let top = (self.cells.len() - 1) as u32;
        let cells = self.cells.iter().map(|&v| top - v).collect();
        Board { rows: self.rows, cols: self.cols, cells }
    }

    fn remap(&self, source: impl Fn(usize, usize) -> (usize, usize)) -> Board {
        let mut cells = Vec::with_capacity(self.cells.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (si, sj) = source(i, j);
                cells.push(self.get(si, sj));
            }
        }
        Board { rows: self.rows, cols: self.cols, cells }
    }

    /// Dimensions of this board paired with a `k x l` region.
    pub fn dims(&self, k: usize, l: usize) -> Result<Dims, GridError> {
        Dims::new(self.rows, self.cols, k, l)
    }

    pub fn region_sums(&self, k: usize, l: usize) -> Result<RegionSumTable, GridError> {
        region_sum_table(self, k, l)
    }

    pub fn discrepancy(&self, k: usize, l: usize) -> Result<DiscrepancyReport, GridError> {
        discrepancy_report(self, k, l)
    }

    pub fn is_zero_discrepancy(&self, k: usize, l: usize) -> Result<bool, GridError> {
        is_zero_discrepancy(self, k, l)
    }
}

fn check_permutation(values: &[u32]) -> Result<(), GridError> {
    let len = values.len();
    let mut seen = vec![false; len];
    for (index, &v) in values.iter().enumerate() {
        let slot = v as usize;
        if slot >= len {
            return Err(GridError::NotAPermutation {
                index,
                value: v as u64,
                reason: PermutationDefect::OutOfRange,
            });
        }
        if seen[slot] {
            return Err(GridError::NotAPermutation {
                index,
                value: v as u64,
                reason: PermutationDefect::Duplicate,
            });
        }
        seen[slot] = true;
    }
    Ok(())
}

/// All `m*n` toroidal `k x l` region sums; `get(i, j)` is the region whose
/// top-left cell is `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSumTable {
    dims: Dims,
    sums: Vec<i64>,
}

impl RegionSumTable {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.sums[i * self.dims.n + j]
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.sums
    }

    pub fn total(&self) -> i128 {
        self.sums.iter().map(|&s| s as i128).sum()
    }

    #[allow(dead_code)]
    pub(crate) fn from_sums(dims: Dims, sums: Vec<i64>) -> Self {
        RegionSumTable { dims, sums }
    }
}

/// Computes every region sum in `O(m*n)` time regardless of `k` and `l`.
///
/// Vertical strips of height `k` are slid down each column first, then
/// horizontal windows of width `l` are slid along each row of strip sums.
pub fn region_sum_table(board: &Board, k: usize, l: usize) -> Result<RegionSumTable, GridError> {
    let dims = board.dims(k, l)?;
    let (m, n) = (dims.m, dims.n);

    let mut strips = vec![0i64; m * n];
    for j in 0..n {
        let mut acc: i64 = (0..k).map(|r| board.get(r, j) as i64).sum();
        for i in 0..m {
            strips[i * n + j] = acc;
            acc += board.get((i + k) % m, j) as i64 - board.get(i, j) as i64;
        }
    }

    let mut sums = vec![0i64; m * n];
    for i in 0..m {
        let row = &strips[i * n..(i + 1) * n];
        let mut acc: i64 = row[..l].iter().sum();
        for j in 0..n {
            sums[i * n + j] = acc;
            acc += row[(j + l) % n] - row[j];
        }
    }
    Ok(RegionSumTable { dims, sums })
}

/// Exact deviation statistics of a region-sum table from the forced average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscrepancyReport {
    /// `k*l*(m*n - 1)`, twice the common sum.
    pub target_x2: i64,
    pub min_sum: i64,
    pub max_sum: i64,
    /// `max_sum - min_sum`.
    pub spread: i64,
    /// `max |2*S - target_x2|` over all regions.
    pub max_abs_dev_x2: u64,
    /// `sum (2*S - target_x2)^2` over all regions.
    pub l2_dev_x4: u128,
}

impl DiscrepancyReport {
    pub fn from_table(table: &RegionSumTable) -> Self {
        let target_x2 = table.dims.target_sum_x2();
        let mut min_sum = i64::MAX;
        let mut max_sum = i64::MIN;
        let mut max_abs_dev_x2 = 0u64;
        let mut l2_dev_x4 = 0u128;
        for &s in &table.sums {
            min_sum = min_sum.min(s);
            max_sum = max_sum.max(s);
            let dev = (2 * s - target_x2).unsigned_abs();
            max_abs_dev_x2 = max_abs_dev_x2.max(dev);
            l2_dev_x4 += dev as u128 * dev as u128;
        }
        DiscrepancyReport {
            target_x2,
            min_sum,
            max_sum,
            spread: max_sum - min_sum,
            max_abs_dev_x2,
            l2_dev_x4,
        }
    }

    /// All region sums equal.
    pub fn is_zero(&self) -> bool {
        self.spread == 0
    }
}

pub fn discrepancy_report(board: &Board, k: usize, l: usize) -> Result<DiscrepancyReport, GridError> {
    Ok(DiscrepancyReport::from_table(&region_sum_table(board, k, l)?))
}

pub fn is_zero_discrepancy(board: &Board, k: usize, l: usize) -> Result<bool, GridError> {
    Ok(discrepancy_report(board, k, l)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_sums(board: &Board, k: usize, l: usize) -> Vec<i64> {
        let (m, n) = (board.rows(), board.cols());
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..n {
                let mut s = 0i64;
                for a in 0..k {
                    for b in 0..l {
                        s += board.get((i + a) % m, (j + b) % n) as i64;
                    }
                }
                out.push(s);
            }
        }
        out
    }

    #[test]
    fn new_board_examples() {
        let b = Board::new(1, 1, vec![0]).unwrap();
        assert_eq!(b.cells(), &[0]);
        assert!(Board::new(2, 4, vec![5, 4, 7, 6, 3, 2, 1, 0]).is_ok());
        assert_eq!(
            Board::new(2, 2, vec![0, 1, 2, 2]),
            Err(GridError::NotAPermutation { index: 3, value: 2, reason: PermutationDefect::Duplicate })
        );
        assert_eq!(
            Board::new(2, 2, vec![0, 1, 2, 4]),
            Err(GridError::NotAPermutation { index: 3, value: 4, reason: PermutationDefect::OutOfRange })
        );
        assert_eq!(
            Board::new(2, 2, vec![0, 1, 2]),
            Err(GridError::LengthMismatch { expected: 4, found: 3 })
        );
        assert_eq!(Board::new(0, 2, vec![]), Err(GridError::ZeroSize));
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(3, 3, 4, 1).is_err());
        assert!(Dims::new(3, 3, 1, 0).is_err());
        assert!(matches!(Dims::new(1 << 20, 1 << 20, 1, 1), Err(GridError::Overflow)));
        assert!(Dims::new(3, 3, 3, 3).is_ok());
    }

    #[test]
    fn target_sum_examples() {
        assert_eq!(target_sum_x2(&Dims::new(4, 4, 2, 2).unwrap()), 60);
        assert_eq!(target_sum_x2(&Dims::new(1, 1, 1, 1).unwrap()), 0);
        assert_eq!(target_sum_x2(&Dims::new(6, 6, 3, 3).unwrap()), 315);
    }

    #[test]
    fn region_sum_examples() {
        let b = Board::from_rows(&[[5, 4, 7, 6], [3, 2, 1, 0]]).unwrap();
        let t = region_sum_table(&b, 2, 2).unwrap();
        assert!(t.as_slice().iter().all(|&s| s == 14));

        let b = Board::from_rows(&[[0, 1, 2], [3, 4, 5], [6, 7, 8]]).unwrap();
        let t = region_sum_table(&b, 2, 2).unwrap();
        assert_eq!(t.as_slice(), &[8, 12, 10, 20, 24, 22, 14, 18, 16]);
        assert_eq!(t.as_slice(), naive_sums(&b, 2, 2).as_slice());

        let t = region_sum_table(&b, 1, 1).unwrap();
        assert_eq!(t.as_slice(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);

        assert!(matches!(region_sum_table(&b, 4, 1), Err(GridError::RegionTooLarge { .. })));
    }

    #[test]
    fn discrepancy_examples() {
        let b = Board::from_rows(&[[5, 4, 7, 6], [3, 2, 1, 0]]).unwrap();
        let r = discrepancy_report(&b, 2, 2).unwrap();
        assert_eq!((r.spread, r.max_abs_dev_x2, r.l2_dev_x4), (0, 0, 0));
        assert!(is_zero_discrepancy(&b, 2, 2).unwrap());

        let b = Board::from_rows(&[[0, 1, 2], [3, 4, 5], [6, 7, 8]]).unwrap();
        let r = discrepancy_report(&b, 2, 2).unwrap();
        assert_eq!(r.target_x2, 32);
        assert_eq!((r.min_sum, r.max_sum, r.spread), (8, 24, 16));
        assert_eq!(r.max_abs_dev_x2, 16);
        // deviations 2S-32 over the table above
        let l2: u128 = [8i64, 12, 10, 20, 24, 22, 14, 18, 16]
            .iter()
            .map(|&s| ((2 * s - 32) * (2 * s - 32)) as u128)
            .sum();
        assert_eq!(r.l2_dev_x4, l2);
        assert!(!is_zero_discrepancy(&b, 2, 2).unwrap());

        let one = Board::row_major(1, 1).unwrap();
        assert_eq!(discrepancy_report(&one, 1, 1).unwrap().spread, 0);
        assert!(Board::row_major(3, 5).unwrap().is_zero_discrepancy(3, 5).unwrap());
    }

    #[test]
    fn half_integral_target_never_zero_dev() {
        let b = Board::row_major(6, 6).unwrap();
        let r = discrepancy_report(&b, 3, 3).unwrap();
        assert_eq!(r.target_x2, 315);
        assert!(r.max_abs_dev_x2 >= 1);
    }

    #[test]
    fn symmetry_helpers() {
        let b = Board::from_rows(&[[0, 1, 2], [3, 4, 5]]).unwrap();
        assert_eq!(b.transpose(), Board::from_rows(&[[0, 3], [1, 4], [2, 5]]).unwrap());
        assert_eq!(b.shift_rows(1), Board::from_rows(&[[3, 4, 5], [0, 1, 2]]).unwrap());
        assert_eq!(b.shift_cols(1), Board::from_rows(&[[1, 2, 0], [4, 5, 3]]).unwrap());
        assert_eq!(b.reflect_cols(), Board::from_rows(&[[2, 1, 0], [5, 4, 3]]).unwrap());
        assert_eq!(b.complement(), Board::from_rows(&[[5, 4, 3], [2, 1, 0]]).unwrap());
        assert_eq!(b.row_sums(), vec![3, 12]);
        assert_eq!(b.col_sums(), vec![3, 5, 7]);
    }
}
