//! The metered value oracle mechanisms query instead of reading valuations.
//!
//! Mechanisms never see a `ValuationMatrix`; they hold a `QueryOracle`, which
//! serves position queries from either a fixed matrix or an adaptive
//! adversary, enforces the per-agent budget, de-duplicates repeats, keeps a
//! transcript, and aborts if revealed values ever violate the ranking order.

use crate::election::{Alternative, Profile, ValuationMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("agent {agent} exceeded the per-agent query budget of {budget}")]
    BudgetExceeded { agent: usize, budget: u32 },
    #[error("reveal for agent {agent} at position {position} breaks value monotonicity")]
    InconsistentReveal { agent: usize, position: usize },
}

/// Adaptive backing: decides each revealed value when first queried.
pub trait AdversaryPolicy {
    fn reveal(&mut self, agent: usize, position: usize, alternative: Alternative) -> f64;
}

enum Source<'a> {
    Fixed(&'a ValuationMatrix),
    Policy(&'a mut dyn AdversaryPolicy),
}

/// One first-time reveal: `value` of the alternative at `position` (1-indexed)
/// in `agent`'s ranking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reveal {
    pub agent: usize,
    pub position: usize,
    pub value: f64,
}

/// Per-agent query counts after a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub per_agent: Vec<u32>,
    pub max: u32,
    pub total: u64,
}

pub struct QueryOracle<'a> {
    profile: &'a Profile,
    source: Source<'a>,
    budget: Option<u32>,
    counts: Vec<u32>,
    revealed: Vec<BTreeMap<usize, f64>>,
    transcript: Vec<Reveal>,
}

impl<'a> QueryOracle<'a> {
    /// Oracle over a concrete matrix (the Monte Carlo path).
    pub fn fixed(profile: &'a Profile, valuations: &'a ValuationMatrix, budget: Option<u32>) -> Self {
        assert_eq!(profile.n(), valuations.n());
        assert_eq!(profile.m(), valuations.m());
        Self::with_source(profile, Source::Fixed(valuations), budget)
    }

    /// Oracle whose answers an adversary invents on the fly.
    pub fn adversarial(
        profile: &'a Profile,
        policy: &'a mut dyn AdversaryPolicy,
        budget: Option<u32>,
    ) -> Self {
        Self::with_source(profile, Source::Policy(policy), budget)
    }

    fn with_source(profile: &'a Profile, source: Source<'a>, budget: Option<u32>) -> Self {
        let n = profile.n();
        QueryOracle {
            profile,
            source,
            budget,
            counts: vec![0; n],
            revealed: vec![BTreeMap::new(); n],
            transcript: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    pub fn m(&self) -> usize {
        self.profile.m()
    }

    pub fn profile(&self) -> &Profile {
        self.profile
    }

    /// Value of the alternative `agent` ranks at 1-indexed `position`.
    ///
    /// Repeats of an already-revealed (agent, position) pair return the cached
    /// value and do not count against the budget.
    pub fn query_position(&mut self, agent: usize, position: usize) -> Result<f64, QueryError> {
        assert!(agent < self.n(), "agent out of range");
        assert!((1..=self.m()).contains(&position), "position out of range");
        if let Some(&v) = self.revealed[agent].get(&position) {
            return Ok(v);
        }
        if let Some(b) = self.budget {
            if self.counts[agent] >= b {
                return Err(QueryError::BudgetExceeded { agent, budget: b });
            }
        }
        let alternative = self.profile.ranking(agent).alternative_at(position);
        let value = match &mut self.source {
            Source::Fixed(v) => v.value(agent, alternative),
            Source::Policy(p) => p.reveal(agent, position, alternative),
        };
        // a reveal must sit between its revealed neighbors in ranking order
        let below = self.revealed[agent].range(..position).next_back().map(|(_, v)| *v);
        let above = self.revealed[agent].range(position + 1..).next().map(|(_, v)| *v);
        if below.is_some_and(|b| b < value) || above.is_some_and(|a| a > value) {
            return Err(QueryError::InconsistentReveal { agent, position });
        }
        self.counts[agent] += 1;
        self.revealed[agent].insert(position, value);
        self.transcript.push(Reveal { agent, position, value });
        Ok(value)
    }

    /// Value of alternative `a` for `agent` (sugar over `query_position`).
    pub fn query_alternative(&mut self, agent: usize, a: Alternative) -> Result<f64, QueryError> {
        let position = self.profile.ranking(agent).position_of(a);
        self.query_position(agent, position)
    }

    pub fn transcript(&self) -> &[Reveal] {
        &self.transcript
    }

    pub fn stats(&self) -> QueryStats {
        QueryStats {
            per_agent: self.counts.clone(),
            max: self.counts.iter().copied().max().unwrap_or(0),
            total: self.counts.iter().map(|&c| c as u64).sum(),
        }
    }
}
