//! Exact computations on finite balls of the Cayley tree, used to check the
//! analytic results independently.

pub mod ball;
pub mod exact;
pub mod sampler;

pub use ball::{Configuration, FiniteBall, RootDegree};
pub use exact::{
    conditional_child_distribution, conditional_descendant_distribution, consistency_check,
    count_admissible, count_admissible_dp, count_admissible_enumerated, for_each_admissible,
    log_partition_function, parity_assignment, partition_function, partition_function_enumerated,
    propagate_assignment, root_marginal, uniform_assignment, ENUMERATION_CAP,
};
pub use sampler::{free_parent_child_counts, sample_tree_chain, TreeSamples, GENERATOR};
