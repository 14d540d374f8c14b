//! Experiment drivers. Each returns an [`ExperimentResult`] whose rows carry
//! their own verdicts.

mod bounds;
mod cluster;
mod result;
mod slln;
mod three_series;
mod weak_lln;

pub use bounds::{run_choquet_series, run_inequality_grid, InequalityGridParams};
pub use cluster::{directed_hausdorff, run_cluster_set, ClusterParams};
pub use result::{ExperimentResult, StatRow, Verdict};
pub use slln::{
    average_summary, run_divergence, run_marcinkiewicz, run_slln, AverageSummary, MarcinkiewiczParams, SllnParams,
};
pub use three_series::{run_three_series, ScaledSequence, ThreeSeriesParams};
pub use weak_lln::{run_weak_lln, run_weak_lln_mc, WeakLlnMcParams, WeakLlnParams, MONOTONE_TOL};
