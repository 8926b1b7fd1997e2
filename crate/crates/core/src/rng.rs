use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent, reproducible stream for task `task` of a run seeded with `seed`.
pub(crate) fn task_rng(seed: u64, task: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
