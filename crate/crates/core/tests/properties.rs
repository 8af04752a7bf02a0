use proptest::prelude::*;
use zerodisc_core::annealer::{objective_value, AnnealObjective, SwapState};
use zerodisc_core::builder::build_equal_row_sums;
use zerodisc_core::feasibility::reduce;
use zerodisc_core::grid::{discrepancy_report, region_sum_table, Board, Dims};
use zerodisc_core::halftone::{dither, GrayImage};

/// A board with `m*n <= 36`, a region shape and the board itself.
fn board_and_region() -> impl Strategy<Value = (Board, usize, usize)> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(m, n)| {
            let perm = Just((0..(m * n) as u32).collect::<Vec<_>>()).prop_shuffle();
            (Just(m), Just(n), 1..=m, 1..=n, perm)
        })
        .prop_map(|(m, n, k, l, cells)| (Board::new(m, n, cells).unwrap(), k, l))
}

fn naive_sums(b: &Board, k: usize, l: usize) -> Vec<i64> {
    let (m, n) = (b.rows(), b.cols());
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut s = 0i64;
            for a in 0..k {
                for c in 0..l {
                    s += b.get((i + a) % m, (j + c) % n) as i64;
                }
            }
            out.push(s);
        }
    }
    out
}

proptest! {
    #[test]
    fn sliding_sums_match_naive((b, k, l) in board_and_region()) {
        let table = region_sum_table(&b, k, l).unwrap();
        let naive = naive_sums(&b, k, l);
        prop_assert_eq!(table.as_slice(), naive.as_slice());
    }

    #[test]
    fn region_sums_conserve_total((b, k, l) in board_and_region()) {
        let table = region_sum_table(&b, k, l).unwrap();
        let mn = (b.rows() * b.cols()) as i128;
        prop_assert_eq!(table.total(), (k * l) as i128 * mn * (mn - 1) / 2);
    }

    #[test]
    fn zero_discrepancy_is_invariant((b, k, l) in board_and_region(), s in 0usize..6, t in 0usize..6) {
        let z = b.is_zero_discrepancy(k, l).unwrap();
        prop_assert_eq!(b.shift_rows(s).is_zero_discrepancy(k, l).unwrap(), z);
        prop_assert_eq!(b.shift_cols(t).is_zero_discrepancy(k, l).unwrap(), z);
        prop_assert_eq!(b.transpose().is_zero_discrepancy(l, k).unwrap(), z);
        prop_assert_eq!(b.complement().is_zero_discrepancy(k, l).unwrap(), z);
        prop_assert_eq!(b.reflect_rows().is_zero_discrepancy(k, l).unwrap(), z);
        prop_assert_eq!(b.reflect_cols().is_zero_discrepancy(k, l).unwrap(), z);
        let r = reduce(&b.dims(k, l).unwrap());
        prop_assert_eq!(b.is_zero_discrepancy(r.g, r.h).unwrap(), z);
    }

    #[test]
    fn reports_agree_with_transposed_board((b, k, l) in board_and_region()) {
        let a = discrepancy_report(&b, k, l).unwrap();
        let t = discrepancy_report(&b.transpose(), l, k).unwrap();
        prop_assert_eq!(a, t);
    }

    #[test]
    fn equal_row_sums_give_full_width_zero_discrepancy(m in 1usize..=8, n in 2usize..=8) {
        if let Ok(b) = build_equal_row_sums(m, n) {
            for k in 1..=m {
                if reduce(&Dims::new(m, n, k, n).unwrap()).g == 1 {
                    prop_assert!(b.is_zero_discrepancy(k, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn incremental_sums_track_swaps(
        (b, k, l) in board_and_region(),
        swaps in prop::collection::vec((0usize..36, 0usize..36, any::<bool>()), 1..60),
        l2 in any::<bool>(),
    ) {
        let d = b.dims(k, l).unwrap();
        let mn = d.cells();
        prop_assume!(mn >= 2);
        let objective = if l2 { AnnealObjective::L2DevX4 } else { AnnealObjective::MaxAbsDevX2 };
        let mut st = SwapState::new(&d, b.cells().to_vec(), objective);
        for (a, c, keep) in swaps {
            let (a, c) = (a % mn, c % mn);
            if a == c {
                continue;
            }
            let proposed = st.propose(a, c);
            if keep { st.commit() } else { st.reject() }
            let now = Board::new(d.m(), d.n(), st.cells().to_vec()).unwrap();
            let table = region_sum_table(&now, k, l).unwrap();
            prop_assert_eq!(st.sums(), table.as_slice());
            let rep = discrepancy_report(&now, k, l).unwrap();
            prop_assert_eq!(st.objective(), objective_value(&rep, objective));
            if keep {
                prop_assert_eq!(proposed, st.objective());
            }
        }
    }

    #[test]
    fn darker_pixels_never_lose_ink(
        (b, _, _) in board_and_region(),
        maxval in 1u32..=1000,
        seed_levels in prop::collection::vec(any::<u16>(), 64),
        at in 0usize..64,
        by in 1u16..=1000,
    ) {
        let (w, h) = (8usize, 8usize);
        let levels: Vec<u16> = seed_levels.iter().map(|v| (*v as u32 % (maxval + 1)) as u16).collect();
        let base = GrayImage::new(w, h, maxval, levels.clone()).unwrap();
        let mut darker = levels;
        darker[at] = darker[at].saturating_sub(by);
        let dark = GrayImage::new(w, h, maxval, darker).unwrap();
        let (x, y) = (dither(&base, &b), dither(&dark, &b));
        for i in 0..w * h {
            prop_assert!(!x.bits()[i] || y.bits()[i]);
        }
    }
}
