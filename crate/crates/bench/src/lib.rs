//! Synthetic inputs shared by the benchmarks: deterministic corpora with a
//! Zipf-like skew so index and profile timings reflect realistic type/token
//! ratios.

use std::fmt::Write as _;

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n_docs` documents of `tokens_per_doc` words drawn from a `vocab`-sized
/// vocabulary with quadratic rank skew. Deterministic in `seed`.
pub fn synthetic_docs(
    n_docs: usize,
    tokens_per_doc: usize,
    vocab: usize,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|_| {
            let mut doc = String::with_capacity(tokens_per_doc * 6);
            for _ in 0..tokens_per_doc {
                let u = uniform(&mut rng);
                let idx = ((u * u) * vocab as f64) as usize % vocab;
                let _ = write!(doc, "w{idx} ");
            }
            doc
        })
        .collect()
}
