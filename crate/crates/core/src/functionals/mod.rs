//! Weights, energies, entropies and the constructive weight.

mod conj;
mod construct;
mod energy;
mod entropy;
mod extended;
mod weight;

pub use conj::{conj_inequality_check, conj_pair, entropy_weight};
pub use construct::{construct_weight, ConstructedWeight};
pub use energy::{check_membership, energy_chi, energy_chi_with, energy_p};
pub use entropy::{
    entropy, entropy_from_weights, entropy_of_measure, entropy_raw, rel_entropy, EntropyValue,
};
pub use extended::Extended;
pub use weight::{tau2_at_one, tau2_power, Weight, WeightSpec};
