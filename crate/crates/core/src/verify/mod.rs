//! Randomized oracles for the relations and probes of their tightness.

pub mod audit;
pub mod probes;
pub mod random;

pub use audit::{audit_relation, trial_slack, AuditRelation, AuditReport, SLACK_TOL};
pub use probes::{
    conserved_distribution_gap, duality_check, fourier_probe, petz_probe, random_blocked_state, tightness_gap,
    tightness_scan, TightnessScan,
};
pub use random::{random_density, random_povm, random_separable, random_unitary};
