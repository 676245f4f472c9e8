//! Shared fixtures for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qgarnier::specialization::sample_exact_cparams;
use qgarnier::weyl::sample_state;
use qgarnier::{CParams, PhiState};

pub fn fixture_state(n: usize) -> PhiState {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    sample_state(n, &mut rng).unwrap()
}

pub fn fixture_cparams(n: usize) -> CParams {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    sample_exact_cparams(n, &mut rng).unwrap()
}
