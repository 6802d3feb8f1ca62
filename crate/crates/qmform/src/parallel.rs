use qmform_core::extract::{
    check_representatives, estimate_pair, upper_pairs, ExtractError, Extraction, KSchedule, Limits,
    PairReport,
};
use qmform_core::qm::QmSpec;
use qmform_core::words::Word;
use rayon::prelude::*;

/// Environment variable holding the worker count; unset or 0 means one per core.
pub const WORKERS_ENV: &str = "QMFORM_WORKERS";

pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

/// Same result as [`qmform_core::extract_matrix`], with pairs spread over a
/// thread pool. Output order does not depend on scheduling.
pub fn extract_matrix_parallel(
    spec: &QmSpec,
    reps: &[Word],
    schedule: &KSchedule,
    limits: &Limits,
    workers: usize,
) -> Result<(Extraction, usize), ExtractError> {
    check_representatives(spec.rank(), reps)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let pairs: Vec<(usize, usize)> = upper_pairs(reps.len()).collect();
    let reports = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, j)| {
                estimate_pair(spec, &reps[i], &reps[j], schedule, limits)
                    .map(|report| PairReport { i, j, report })
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok((Extraction::assemble(reps.len(), reports), pool.current_num_threads()))
}
