//! Shared inputs for the criterion benchmarks.

use gcnet_core::simdata::{gen_dataset, SimConfig};
use gcnet_core::{Dataset, OutcomeKind};

/// A simulated dataset with the default generator settings.
pub fn dataset(n: usize, d: usize, outcome: OutcomeKind) -> Dataset {
    gen_dataset(&SimConfig::new(n, d, outcome, 42))
        .expect("valid simulation config")
        .0
}
