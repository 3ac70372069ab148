//! Executable certificates: each one rebuilds the intermediate objects of
//! an argument on the grid and records every inequality it can check.

pub mod corpus;
pub mod demo;
pub mod explore;
pub mod families;
pub mod inclusion;
pub mod invariants;
pub mod mt;
pub mod perturbation;
pub mod report;
pub mod skoda;
pub mod subentropy;

pub use demo::{atomic_entropy_demo, weight_construct_certificate};
pub use explore::{explore_stability, EXPLORATORY};
pub use inclusion::{inclusion_check, stability_scan};
pub use mt::{mass_profile_bound, mt_certificate};
pub use perturbation::{perturbation_scan, Nodewise};
pub use report::{Assertion, CertificateReport, Digest, Empirical};
pub use skoda::{skoda_surrogate, SkodaSurrogate};
pub use subentropy::subentropy_check;
