//! Weyl dynamical maps on d-level systems: discrete phase-space subgroup
//! algebra, map spectra, decay rates, and Markovianity classification.

pub mod classify;
pub mod dynamics;
pub mod mixtures;
pub mod phase_space;
pub mod suite;
pub mod weyl;
