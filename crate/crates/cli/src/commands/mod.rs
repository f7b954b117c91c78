pub mod collapse;
pub mod fixed_point;
pub mod geometry;
pub mod scan;
pub mod switch;
pub mod trajectory;

use crate::error::CliError;

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Validation(format!("workers: {e}")))
}
