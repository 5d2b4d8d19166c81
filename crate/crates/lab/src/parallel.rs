//! Chunk-parallel Monte Carlo on a rayon pool.
//!
//! Every word reads its own fixed position of the seeded stream, so the
//! tally is the same for any chunk count, thread count or scheduling order.

use mtee_core::channel::InnerChannelModel;
use mtee_core::dcf::DecoderModel;
use mtee_core::sim::{SimPlan, SimReport, SimTally};
use mtee_core::thresholds::ThresholdSet;
use rayon::prelude::*;

use crate::LabError;

/// Parallel counterpart of [`mtee_core::sim::estimate_pe`]. `threads = None`
/// uses the global rayon pool.
pub fn estimate_pe_parallel(
    model: &InnerChannelModel,
    decoder: &DecoderModel,
    ts: &ThresholdSet,
    num_words: u64,
    seed: u64,
    chunks: usize,
    threads: Option<usize>,
) -> Result<SimReport, LabError> {
    if chunks < 1 {
        return Err(LabError::Usage("chunks must be >= 1".into()));
    }
    if num_words < 1 {
        return Err(LabError::Usage("number of words must be >= 1".into()));
    }
    let plan = SimPlan::new(*model, *decoder, ts.clone(), num_words, seed)?;
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|i| plan.run_chunk(i, chunks))
            .collect::<Vec<_>>()
    };
    let tallies = match threads {
        Some(0) => return Err(LabError::Usage("threads must be >= 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(run),
        None => run(),
    };
    let total = tallies
        .iter()
        .fold(SimTally::empty(ts.z()), |acc, t| acc.merge(t));
    Ok(plan.report(&total))
}
