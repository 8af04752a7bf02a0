use zerodisc_core::builder::{build, build_equal_row_sums, build_with_budget, BuildError, Strategy, DEFAULT_BACKTRACK_BUDGET};
use zerodisc_core::feasibility::{classify, decide, reduce};
use zerodisc_core::grid::Dims;

#[test]
fn every_feasible_tuple_up_to_twelve_cells_is_built() {
    for m in 1..=12 {
        for n in 1..=12 / m {
            for k in 1..=m {
                for l in 1..=n {
                    let d = Dims::new(m, n, k, l).unwrap();
                    match build(&d) {
                        Ok(b) => {
                            assert!(classify(&d).is_feasible(), "{d}");
                            assert_eq!(b.discrepancy(k, l).unwrap().spread, 0, "{d}");
                        }
                        Err(BuildError::Infeasible(r)) => {
                            assert!(!classify(&d).is_feasible(), "{d}");
                            assert_eq!(r, classify(&d));
                        }
                        Err(e) => panic!("{d}: {e}"),
                    }
                }
            }
        }
    }
}

#[test]
fn explicit_sums() {
    for (m, n, k, l, sum) in [(2, 4, 2, 2, 14), (4, 4, 2, 2, 30), (6, 6, 2, 2, 70)] {
        let d = Dims::new(m, n, k, l).unwrap();
        let b = build(&d).unwrap();
        let table = b.region_sums(k, l).unwrap();
        assert!(table.as_slice().iter().all(|&s| s == sum), "{d}");
        assert_eq!(table.as_slice().len(), m * n);
    }
}

#[test]
fn witnesses_from_decide_verify() {
    for m in 1..=8 {
        for n in 1..=8 {
            for k in 1..=m {
                for l in 1..=n {
                    let d = Dims::new(m, n, k, l).unwrap();
                    let v = decide(&d);
                    assert_eq!(v.feasible, classify(&d).is_feasible());
                    if let Some(w) = v.witness {
                        assert!(w.is_zero_discrepancy(k, l).unwrap(), "{d}");
                    }
                }
            }
        }
    }
}

#[test]
fn larger_instances() {
    for (m, n, k, l) in [(8, 8, 4, 4), (12, 10, 4, 5), (9, 6, 3, 2), (16, 16, 2, 8), (10, 16, 5, 4), (32, 32, 8, 8)] {
        let d = Dims::new(m, n, k, l).unwrap();
        assert!(classify(&d).is_feasible(), "{d}");
        let (strategy, b) = build_with_budget(&d, DEFAULT_BACKTRACK_BUDGET).unwrap();
        assert!(b.is_zero_discrepancy(k, l).unwrap(), "{d} via {}", strategy.as_str());
    }
}

#[test]
fn strategy_selection() {
    let pick = |m, n, k, l| build_with_budget(&Dims::new(m, n, k, l).unwrap(), DEFAULT_BACKTRACK_BUDGET).unwrap().0;
    assert_eq!(pick(3, 4, 3, 4), Strategy::SingleRegion);
    assert_eq!(pick(4, 4, 3, 4), Strategy::EqualRowSums);
    assert_eq!(pick(4, 4, 4, 3), Strategy::EqualColSums);
    assert_eq!(pick(4, 4, 2, 2), Strategy::TwoPhaseDigits);
    assert_eq!(pick(3, 4, 3, 2), Strategy::TwoPhaseDigits);
    let d = Dims::new(4, 4, 2, 2).unwrap();
    assert_eq!(reduce(&d).g, 2);
}

#[test]
fn equal_row_sums_serve_full_width_regions() {
    for m in 1..=7 {
        for n in 2..=7 {
            let Ok(b) = build_equal_row_sums(m, n) else { continue };
            let sums = b.row_sums();
            assert!(sums.iter().all(|&s| s == sums[0]));
            for k in 1..=m {
                let d = Dims::new(m, n, k, n).unwrap();
                if reduce(&d).g == 1 {
                    assert!(b.is_zero_discrepancy(k, n).unwrap(), "{d}");
                }
            }
        }
    }
}

#[test]
fn direct_strategies_cover_every_feasible_tuple_up_to_sixteen() {
    for m in 1..=16 {
        for n in 1..=16 {
            for k in 1..=m {
                for l in 1..=n {
                    let d = Dims::new(m, n, k, l).unwrap();
                    if classify(&d).is_feasible() {
                        let (s, b) = build_with_budget(&d, 0).unwrap_or_else(|e| panic!("{d}: {e}"));
                        assert_ne!(s, Strategy::BacktrackFallback, "{d}");
                        assert!(b.is_zero_discrepancy(k, l).unwrap(), "{d}");
                    }
                }
            }
        }
    }
}
