//! Polarization and sorting metrics: AEI per group pair, reduced mutual
//! information between partitions, and cross-topic alignment matrices.

mod aei;
mod alignment;
mod omega;
mod rmi;

pub use aei::{aei, aei_from_counts, all_pairs_aei, PairAei};
pub use alignment::{alignment_matrix, AlignmentCell, AlignmentEntry, DEFAULT_MIN_OVERLAP};
pub use omega::{log_omega, log_omega_with, LogOmega, OmegaConfig, OmegaMethod};
pub use rmi::{partisan_sorting_series, rmi, rmi_with, Rmi};
