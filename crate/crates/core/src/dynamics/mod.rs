//! Benchmark generators and the enumeration of dependency topologies.

mod ctml;
mod lorenz;
mod topology;

pub use ctml::{ctml_generate, tent_map, tent_map_with_slope, CtmlConfig, DEFAULT_TENT_SLOPE};
pub use lorenz::{lorenz_generate, lorenz_set_count, lorenz_sets, LorenzParams, LORENZ_TARGET_SAMPLES};
pub use topology::{enumerate_topologies, DependencyGraph, TopologyClass};
