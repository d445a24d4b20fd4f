//! Shared fixtures for the benchmarks under `benches/`.

use fdesc_core::states::random_pure_vector;
use fdesc_core::{evolve_descriptors, random_ps_unitary, DescriptorSet, FockSpace, ModeSet};

/// Full descriptor set of a random unitary with a random Heisenberg state.
pub fn random_full_descriptors(n_modes: usize, seed: u64) -> DescriptorSet {
    let space = FockSpace::new(n_modes).expect("mode count within cap");
    let u = random_ps_unitary(&space, seed);
    evolve_descriptors(&u, &space.modes(), &random_pure_vector(&space, seed)).expect("valid inputs")
}

/// First half of the modes, at least one.
pub fn left_half(n_modes: usize) -> ModeSet {
    ModeSet::new(0..(n_modes / 2).max(1), n_modes).expect("non-empty")
}
