use sha2::{Digest, Sha256};

use crate::tasks::{Difficulty, TaskId};

/// Evaluation seeds per (task, difficulty).
pub const EVAL_SEEDS: usize = 25;
/// Default size of the training pool used by dataset export and open-ended sessions.
pub const TRAIN_SEEDS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeedPool {
    Eval,
    Train,
    RandomCal,
}

impl SeedPool {
    pub fn name(self) -> &'static str {
        match self {
            SeedPool::Eval => "eval",
            SeedPool::Train => "train",
            SeedPool::RandomCal => "random_cal",
        }
    }
}

/// Seed `index` of a pool: the first eight bytes, big-endian, of
/// SHA-256 over `"{task}::{difficulty}::{pool}::{index}"`.
pub fn derive_seed(task: TaskId, difficulty: Difficulty, pool: SeedPool, index: usize) -> u64 {
    let text = format!("{}::{}::{}::{}", task.name(), difficulty.name(), pool.name(), index);
    let digest = Sha256::digest(text.as_bytes());
    let mut head = [0u8; 8];
    head.copy_from_slice(&digest[..8]);
    u64::from_be_bytes(head)
}

pub fn derive_seeds(task: TaskId, difficulty: Difficulty, pool: SeedPool, n: usize) -> Vec<u64> {
    (0..n).map(|i| derive_seed(task, difficulty, pool, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_are_disjoint_on_their_first_indices() {
        for task in TaskId::ALL {
            for d in Difficulty::ALL {
                let eval: std::collections::HashSet<u64> =
                    derive_seeds(task, d, SeedPool::Eval, 2025).into_iter().collect();
                assert_eq!(eval.len(), 2025);
                assert!(derive_seeds(task, d, SeedPool::Train, 2025).iter().all(|s| !eval.contains(s)));
            }
        }
    }

    #[test]
    fn seed_prefix_is_stable() {
        let a = derive_seeds(TaskId::GoToGoal, Difficulty::Easy, SeedPool::Eval, 5);
        let b = derive_seeds(TaskId::GoToGoal, Difficulty::Easy, SeedPool::Eval, 25);
        assert_eq!(a[..], b[..5]);
    }
}
