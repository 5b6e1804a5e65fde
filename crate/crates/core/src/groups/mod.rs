//! Group inference with penalized-likelihood model selection, and labeling
//! of inferred groups from seed accounts.

mod label;
mod objective;
mod partition;
mod search;
mod select;

pub use label::{
    label_groups, label_groups_by, label_institutional, parse_seeds, write_seeds, Bloc, LabelOutcome, SeedAccount,
};
pub use objective::{fit_value, ln_choose, penalty, Objective};
pub use partition::{read_partition, write_partition, Partition, NONPARTISAN};
pub use search::{infer_partition, InferenceOptions};
pub use select::{fit_reference_partitions, select_model, ModelSelectionResult};
