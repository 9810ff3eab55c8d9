//! Probability tables and elementary information measures.

mod measures;
mod table;

pub use measures::{
    combinations, conditional_entropy, conditional_mutual_information, entropy, joint_entropy, kl_divergence,
    multivariate_conditional_mi, multivariate_mutual_information, mutual_information, total_correlation,
};
pub use table::{AxisLabel, AxisSet, JointTable, DENSE_CELL_LIMIT, NORMALIZATION_TOLERANCE};
pub(crate) use table::tuple_space;
