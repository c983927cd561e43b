//! Impartial-culture sampling and the seeding discipline.
//!
//! All randomness flows through ChaCha8 streams derived from one 64-bit master
//! seed: work item `i` (a Monte Carlo trial, usually) reads stream `i`, so
//! results do not depend on how work is scheduled across threads. Stream
//! `u64::MAX` is reserved for bootstrap resampling.

use crate::distribution::ValueDistribution;
use crate::election::{Electorate, Profile, Ranking, ValuationMatrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream reserved for bootstrap confidence intervals.
pub const BOOTSTRAP_STREAM: u64 = u64::MAX;

/// Master seed; hand out one independent stream per work item.
#[derive(Debug, Clone, Copy)]
pub struct SeededRng {
    seed: u64,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent generator for work item `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Draws an `n x m` electorate: i.i.d. values from `dist`, and for each agent
/// a ranking uniform among the orders consistent with her values (a uniform
/// random permutation stably re-sorted by value, so ties stay uniformly
/// shuffled).
pub fn sample_electorate(
    dist: &ValueDistribution,
    n: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
) -> Electorate {
    assert!(n >= 1 && m >= 1, "need at least one agent and one alternative");
    let sampler = dist.sampler();
    let mut values = Vec::with_capacity(n * m);
    let mut rankings = Vec::with_capacity(n);
    for i in 0..n {
        for _ in 0..m {
            values.push(sampler.draw(rng));
        }
        let row = &values[i * m..(i + 1) * m];
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(rng);
        // stable sort keeps the shuffled order among equal values
        order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).unwrap());
        rankings.push(Ranking::from_order(order));
    }
    Electorate {
        profile: Profile::new(rankings),
        valuations: ValuationMatrix::new(n, m, values),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::ValueDistribution::*;
    use std::collections::HashMap;

    #[test]
    fn same_seed_and_stream_reproduce_the_electorate() {
        let seeds = SeededRng::new(99);
        let a = sample_electorate(&Exponential { rate: 1.0 }, 4, 5, &mut seeds.stream(3));
        let b = sample_electorate(&Exponential { rate: 1.0 }, 4, 5, &mut seeds.stream(3));
        assert_eq!(a.valuations, b.valuations);
        assert_eq!(a.profile, b.profile);
        let c = sample_electorate(&Exponential { rate: 1.0 }, 4, 5, &mut seeds.stream(4));
        assert_ne!(a.valuations, c.valuations, "distinct streams should differ");
    }

    #[test]
    fn sampled_electorates_are_consistent() {
        let seeds = SeededRng::new(2024);
        let dists = [
            Binary { p: 0.5 },
            Binary { p: 0.02 },
            Exponential { rate: 1.0 },
            ChiSquared { k: 3 },
            Erlang { k: 2, rate: 3.0 },
            Uniform { lo: 0.0, hi: 1.0 },
            PointMass { c: 1.0 },
        ];
        let mut stream = 0;
        for trial in 0..1000 {
            let d = &dists[trial % dists.len()];
            let n = 1 + trial % 7;
            let m = 1 + (trial / 7) % 9;
            let e = sample_electorate(d, n, m, &mut seeds.stream(stream));
            stream += 1;
            assert!(e.is_consistent(), "inconsistent electorate for {d} n={n} m={m}");
            assert_eq!(e.profile.n(), n);
            assert_eq!(e.valuations.m(), m);
        }
    }

    #[test]
    fn tied_values_give_uniform_rankings() {
        // all values equal, m = 3: each of the 6 orders should appear ~1/6 of the time
        let seeds = SeededRng::new(5);
        let mut counts: HashMap<Vec<usize>, u32> = HashMap::new();
        let trials = 12_000;
        for t in 0..trials {
            let e = sample_electorate(&PointMass { c: 2.0 }, 1, 3, &mut seeds.stream(t));
            *counts.entry(e.profile.ranking(0).order().to_vec()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for (order, c) in counts {
            let freq = c as f64 / trials as f64;
            assert!(
                (freq - 1.0 / 6.0).abs() < 0.02,
                "order {order:?} frequency {freq} too far from 1/6"
            );
        }
    }

    #[test]
    fn binary_ties_stay_uniform_within_blocks() {
        // p = 0.5, m = 2: conditioned on equal values the two orders are equally likely
        let seeds = SeededRng::new(6);
        let mut tied_01 = 0u32;
        let mut tied = 0u32;
        for t in 0..20_000 {
            let e = sample_electorate(&Binary { p: 0.5 }, 1, 2, &mut seeds.stream(t));
            let v = &e.valuations;
            if v.value(0, 0) == v.value(0, 1) {
                tied += 1;
                if e.profile.ranking(0).top() == 0 {
                    tied_01 += 1;
                }
            }
        }
        let frac = tied_01 as f64 / tied as f64;
        assert!((frac - 0.5).abs() < 0.02, "tie ordering biased: {frac}");
    }
}
