//! Parallel evaluation of scan plans.
//!
//! Every cell is a pure function of the plan and its index, and results
//! are collected in index order, so the output does not depend on the
//! number of threads.

use mprk_core::experiments::{ScanPlan, ScanResult};
use mprk_core::StepWorkspace;
use rayon::prelude::*;

pub const THREADS_ENV: &str = "MPRK_THREADS";

pub fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Thread count: `MPRK_THREADS` if set, else `flag`, else the available
/// parallelism.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize, String> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count"))?,
        Err(_) => flag.unwrap_or_else(default_threads),
    };
    if n == 0 {
        return Err("thread count must be at least 1".into());
    }
    Ok(n)
}

pub fn run_scan(plan: ScanPlan, threads: usize) -> mprk_core::Result<ScanResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool");
    let cells = pool.install(|| {
        (0..plan.n_cells())
            .into_par_iter()
            .map_init(|| StepWorkspace::new(2), |ws, i| plan.run_cell(i, ws))
            .collect()
    });
    plan.collect(cells)
}
