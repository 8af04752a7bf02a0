//! Thread-parallel drivers with results independent of the thread count.

use rayon::prelude::*;
use zerodisc_core::annealer::{anneal_restart, combine, initial_board, AnnealOutcome, AnnealParams, ParamsError};
use zerodisc_core::grid::Dims;

/// Runs restarts across a rayon pool of `threads` workers (`None` uses the
/// global pool). The result equals [`zerodisc_core::annealer::anneal`].
pub fn anneal_parallel(
    dims: &Dims,
    params: &AnnealParams,
    threads: Option<usize>,
) -> Result<AnnealOutcome, ParamsError> {
    params.validate()?;
    let start = initial_board(dims);
    let run = || -> Vec<AnnealOutcome> {
        (0..params.restarts)
            .into_par_iter()
            .map(|r| anneal_restart(dims, params, &start, r))
            .collect()
    };
    let runs = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    };
    Ok(combine(runs, params.objective).expect("at least one restart"))
}

/// Maps `f` over `items` in parallel, preserving input order.
pub fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.par_iter().map(f).collect()
}
