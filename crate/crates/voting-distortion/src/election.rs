//! Domain types: alternatives, rankings, profiles, valuation matrices.
//!
//! Alternatives are 0-indexed. Ranking positions are 1-indexed: position 1 is
//! the agent's top alternative. Every argmax in the crate breaks ties toward
//! the lowest alternative index.

use serde::{Deserialize, Serialize};

/// Candidate id, `0..m`.
pub type Alternative = usize;

/// One agent's strict total order over the alternatives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    order: Vec<Alternative>,
}

impl Ranking {
    /// Builds a ranking from `order[0]` (top) down to `order[m-1]` (bottom).
    ///
    /// Panics unless `order` is a permutation of `0..m`.
    pub fn from_order(order: Vec<Alternative>) -> Self {
        let m = order.len();
        let mut seen = vec![false; m];
        for &a in &order {
            assert!(a < m && !seen[a], "ranking must be a permutation of 0..m");
            seen[a] = true;
        }
        Ranking { order }
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    /// Alternative at 1-indexed position `j`.
    pub fn alternative_at(&self, j: usize) -> Alternative {
        assert!((1..=self.m()).contains(&j), "position out of range");
        self.order[j - 1]
    }

    /// 1-indexed position of alternative `a`.
    pub fn position_of(&self, a: Alternative) -> usize {
        1 + self
            .order
            .iter()
            .position(|&x| x == a)
            .expect("alternative out of range")
    }

    pub fn top(&self) -> Alternative {
        self.order[0]
    }

    /// Top-to-bottom iteration.
    pub fn order(&self) -> &[Alternative] {
        &self.order
    }
}

/// A preference profile: one ranking per agent, all over the same `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    rankings: Vec<Ranking>,
}

impl Profile {
    pub fn new(rankings: Vec<Ranking>) -> Self {
        assert!(!rankings.is_empty(), "profile needs at least one agent");
        let m = rankings[0].m();
        assert!(
            rankings.iter().all(|r| r.m() == m),
            "all rankings must cover the same alternatives"
        );
        Profile { rankings }
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn m(&self) -> usize {
        self.rankings[0].m()
    }

    pub fn ranking(&self, agent: usize) -> &Ranking {
        &self.rankings[agent]
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }
}

/// Non-negative cardinal values, one row per agent, one column per alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationMatrix {
    n: usize,
    m: usize,
    values: Vec<f64>,
}

impl ValuationMatrix {
    pub fn new(n: usize, m: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), n * m);
        assert!(
            values.iter().all(|v| v.is_finite() && *v >= 0.0),
            "values must be finite and non-negative"
        );
        ValuationMatrix { n, m, values }
    }

    pub fn zero(n: usize, m: usize) -> Self {
        ValuationMatrix { n, m, values: vec![0.0; n * m] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, agent: usize, a: Alternative) -> f64 {
        self.values[agent * self.m + a]
    }

    pub fn set(&mut self, agent: usize, a: Alternative, v: f64) {
        self.values[agent * self.m + a] = v;
    }

    pub fn row(&self, agent: usize) -> &[f64] {
        &self.values[agent * self.m..(agent + 1) * self.m]
    }
}

/// A sampled instance: profile plus the matrix it was induced from.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Electorate {
    pub profile: Profile,
    pub valuations: ValuationMatrix,
}

impl Electorate {
    /// True iff every ranking lists its agent's values in non-increasing order.
    pub fn is_consistent(&self) -> bool {
        self.profile.rankings().iter().enumerate().all(|(i, r)| {
            r.order()
                .windows(2)
                .all(|w| self.valuations.value(i, w[0]) >= self.valuations.value(i, w[1]))
        })
    }
}

/// Sum of column `a` of the matrix.
pub fn social_welfare(a: Alternative, v: &ValuationMatrix) -> f64 {
    (0..v.n()).map(|i| v.value(i, a)).sum()
}

/// Welfare-maximizing alternative (lowest index on ties) and its welfare.
pub fn max_social_welfare(v: &ValuationMatrix) -> (Alternative, f64) {
    let mut best = 0;
    let mut best_sw = social_welfare(0, v);
    for a in 1..v.m() {
        let sw = social_welfare(a, v);
        if sw > best_sw {
            best = a;
            best_sw = sw;
        }
    }
    (best, best_sw)
}
