//! Seeded random instances for the property suites.
//!
//! Each trial gets its own ChaCha stream, so results do not depend on how
//! trials are scheduled across threads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::space::{Filtration, Partition, ProbabilitySpace, RandomVariable};

/// Range of instance sizes and values drawn by [`InstanceGenerator`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceGenerator {
    pub min_outcomes: usize,
    pub max_outcomes: usize,
    /// Number of partitions in a random filtration, including `{Ω}` and the singletons.
    pub stages: usize,
    /// Values are drawn uniformly from `[-value_bound, value_bound]`.
    pub value_bound: f64,
}

impl Default for InstanceGenerator {
    fn default() -> Self {
        Self { min_outcomes: 2, max_outcomes: 8, stages: 3, value_bound: 5.0 }
    }
}

/// The RNG for trial `trial` of a suite seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

impl InstanceGenerator {
    pub fn outcomes(&self, rng: &mut impl Rng) -> usize {
        rng.gen_range(self.min_outcomes..=self.max_outcomes)
    }

    /// Positive uniform draws, normalized.
    pub fn space(&self, rng: &mut impl Rng, n: usize) -> ProbabilitySpace {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|p| p / total).collect();
        // Put the rounding residue on the largest entry.
        let residue = 1.0 - probs.iter().sum::<f64>();
        let k = (0..n).max_by(|&a, &b| probs[a].total_cmp(&probs[b])).unwrap();
        probs[k] += residue;
        ProbabilitySpace::new(probs).expect("generated probabilities are valid")
    }

    /// Uniform values; about a third of the draws are rounded to integers so
    /// that ties and repeated atoms occur.
    pub fn variable(&self, rng: &mut impl Rng, n: usize) -> RandomVariable {
        let round = rng.gen_bool(0.3);
        let b = self.value_bound;
        let values = (0..n)
            .map(|_| {
                let v = rng.gen_range(-b..=b);
                if round {
                    v.round()
                } else {
                    v
                }
            })
            .collect();
        RandomVariable::new(values).expect("finite draws")
    }

    /// Uniform draws in `[0, upper]`, one per outcome.
    pub fn nonnegative(&self, rng: &mut impl Rng, n: usize, upper: f64) -> RandomVariable {
        RandomVariable::new((0..n).map(|_| rng.gen_range(0.0..=upper)).collect()).expect("finite draws")
    }

    /// Random labels in `0..k` with `k` uniform in `1..=n`.
    pub fn partition(&self, rng: &mut impl Rng, n: usize) -> Partition {
        let k = rng.gen_range(1..=n);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        Partition::from_labels(&labels).expect("labels cover every outcome")
    }

    /// Per-atom constants drawn from `[lo, hi]`.
    pub fn measurable(&self, rng: &mut impl Rng, g: &Partition, lo: f64, hi: f64) -> RandomVariable {
        let per_atom: Vec<f64> = (0..g.num_atoms()).map(|_| rng.gen_range(lo..=hi)).collect();
        g.broadcast(&per_atom).expect("one value per atom")
    }

    /// Built from the singletons by repeatedly merging atoms at random.
    pub fn filtration(&self, rng: &mut impl Rng, n: usize) -> Filtration {
        let stages = self.stages.max(2);
        let mut labels: Vec<usize> = (0..n).collect();
        let mut parts = vec![Partition::discrete(n)];
        for _ in 1..stages - 1 {
            let atoms = labels.iter().max().map_or(1, |m| m + 1);
            let k = rng.gen_range(1..=atoms);
            let mut groups: Vec<usize> = (0..atoms).map(|a| a % k).collect();
            groups.shuffle(rng);
            for l in labels.iter_mut() {
                *l = groups[*l];
            }
            parts.push(Partition::from_labels(&labels).expect("labels cover every outcome"));
            // Relabel densely for the next merge.
            labels = (0..n).map(|i| parts.last().unwrap().atom_of(i)).collect();
        }
        parts.push(Partition::trivial(n));
        parts.reverse();
        Filtration::new(parts).expect("merging yields a refining sequence")
    }
}
