//! Query-limited winner-selection mechanisms and positional voting rules.
//!
//! Threshold mechanisms ask each agent for the value at one ranking position
//! and score alternatives by the welfare those binary answers imply. The
//! search mechanism spends `1 + ceil(log2 m)` queries per agent to bracket
//! each agent's values geometrically. Plain positional rules use no queries.
//! Every argmax breaks ties toward the lowest alternative index unless a
//! custom tie-break hook is supplied.

use crate::distribution::ValueDistribution;
use crate::election::{Alternative, Profile, ValuationMatrix};
use crate::query::{QueryError, QueryOracle};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("value distribution has zero mean; no threshold ladder exists")]
    DegenerateDistribution,
}

/// Smallest `k` with `2^k >= x`; `x >= 1`.
pub fn ceil_log2(x: usize) -> u32 {
    assert!(x >= 1);
    x.next_power_of_two().trailing_zeros()
}

/// Index of the maximal score, lowest index on ties.
fn argmax(scores: &[f64]) -> Alternative {
    let mut best = 0;
    for (a, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = a;
        }
    }
    best
}

/// The single position a threshold mechanism queries: `max(1, floor(p * m))`.
pub fn mean_position(p: f64, m: usize) -> usize {
    ((p * m as f64).floor() as usize).max(1)
}

/// Welfare of `a` implied by binary `answers` to position-`k` queries: the
/// number of approving agents that rank `a` within their top `k`.
pub fn implied_social_welfare(a: Alternative, profile: &Profile, answers: &[bool], k: usize) -> usize {
    assert_eq!(answers.len(), profile.n());
    profile
        .rankings()
        .iter()
        .zip(answers)
        .filter(|(r, &ans)| ans && r.position_of(a) <= k)
        .count()
}

fn implied_scores(profile: &Profile, answers: &[bool], k: usize) -> Vec<f64> {
    let mut scores = vec![0.0; profile.m()];
    for (r, &ans) in profile.rankings().iter().zip(answers) {
        if ans {
            for j in 1..=k {
                scores[r.alternative_at(j)] += 1.0;
            }
        }
    }
    scores
}

/// Queries every agent at position `max(1, floor(p*m))` and returns the
/// alternative with the highest implied welfare. Answers are meant to be
/// binary; any positive answer counts as an approval.
pub fn run_mean(profile: &Profile, oracle: &mut QueryOracle, p: f64) -> Result<Alternative, QueryError> {
    let tau = mean_position(p, profile.m());
    let answers = query_all_at(profile, oracle, tau, |v| v > 0.0)?;
    Ok(argmax(&implied_scores(profile, &answers, tau)))
}

/// `run_mean` pinned to position 1 (each agent's top alternative).
pub fn run_mean_top(profile: &Profile, oracle: &mut QueryOracle) -> Result<Alternative, QueryError> {
    run_mean_top_with(profile, oracle, |tied| tied[0])
}

/// Top-query variant with a pluggable tie-break over the tied argmax set
/// (ascending index order). Exists to experiment with tie-break sensitivity.
pub fn run_mean_top_with(
    profile: &Profile,
    oracle: &mut QueryOracle,
    tie_break: impl FnOnce(&[Alternative]) -> Alternative,
) -> Result<Alternative, QueryError> {
    let answers = query_all_at(profile, oracle, 1, |v| v > 0.0)?;
    let scores = implied_scores(profile, &answers, 1);
    let best = scores.iter().cloned().fold(0.0, f64::max);
    let tied: Vec<Alternative> =
        (0..profile.m()).filter(|&a| scores[a] == best).collect();
    Ok(tie_break(&tied))
}

fn query_all_at(
    profile: &Profile,
    oracle: &mut QueryOracle,
    position: usize,
    approve: impl Fn(f64) -> bool,
) -> Result<Vec<bool>, QueryError> {
    (0..profile.n())
        .map(|i| oracle.query_position(i, position).map(&approve))
        .collect()
}

/// Geometric threshold ladder for a distribution with mean `mu` and variance
/// `sigma2` on `m` alternatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    levels: Vec<f64>,
}

impl Thresholds {
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    /// Threshold `t` (1-indexed).
    pub fn level(&self, t: usize) -> f64 {
        self.levels[t - 1]
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Builds the ladder `L, 2L, 4L, ..., U` with `L = mu/(4m)`,
/// `U = mu + 4m*sigma2/mu` and `k = ceil(log2(U/L))` rungs.
pub fn build_thresholds(mu: f64, sigma2: f64, m: usize) -> Result<Thresholds, MechanismError> {
    assert!(m >= 1 && mu >= 0.0 && sigma2 >= 0.0);
    if mu == 0.0 {
        return Err(MechanismError::DegenerateDistribution);
    }
    let lo = mu / (4.0 * m as f64);
    let hi = mu + 4.0 * m as f64 * sigma2 / mu;
    let k = (hi / lo).log2().ceil() as usize;
    let mut levels: Vec<f64> = (0..k - 1).map(|i| lo * 2f64.powi(i as i32)).collect();
    levels.push(hi);
    debug_assert!(levels.windows(2).all(|w| w[0] < w[1]));
    Ok(Thresholds { levels })
}

/// Randomized-threshold mean mechanism: picks a ladder rung uniformly, turns
/// values into binary answers by thresholding, then runs the mean mechanism's
/// query plan with the threshold's survival probability.
pub fn run_rtmean(
    profile: &Profile,
    oracle: &mut QueryOracle,
    dist: &ValueDistribution,
    rng: &mut ChaCha8Rng,
) -> Result<Alternative, MechanismError> {
    let th = build_thresholds(dist.mean(), dist.variance(), profile.m())?;
    let t = rng.random_range(1..=th.k());
    Ok(run_rtmean_at_level(profile, oracle, dist, &th, t)?)
}

/// One support point of the randomized-threshold mechanism (rung `t`).
pub fn run_rtmean_at_level(
    profile: &Profile,
    oracle: &mut QueryOracle,
    dist: &ValueDistribution,
    thresholds: &Thresholds,
    t: usize,
) -> Result<Alternative, QueryError> {
    let level = thresholds.level(t);
    let p = dist.survival(level);
    let tau = mean_position(p, profile.m());
    let answers = query_all_at(profile, oracle, tau, |v| v >= level)?;
    Ok(argmax(&implied_scores(profile, &answers, tau)))
}

/// Number of bracketing radii the search mechanism draws from: `ceil(log2(2m))`.
pub fn rtsearch_support(m: usize) -> u32 {
    ceil_log2(2 * m)
}

/// Randomized geometric search: draws a radius uniformly and delegates.
pub fn run_rtsearch(
    profile: &Profile,
    oracle: &mut QueryOracle,
    rng: &mut ChaCha8Rng,
) -> Result<Alternative, QueryError> {
    let r = rng.random_range(1..=rtsearch_support(profile.m()));
    run_rtsearch_with_radius(profile, oracle, r)
}

/// Per-agent prefix for radius `r`: the largest `q` such that the value at
/// position `q` is strictly above `top_value / 2^r` (0 if the top value is 0).
/// Uses at most `ceil(log2 m)` queries beyond the top query.
pub fn rtsearch_prefix_len(
    oracle: &mut QueryOracle,
    agent: usize,
    r: u32,
) -> Result<usize, QueryError> {
    let nu = oracle.query_position(agent, 1)?;
    if nu <= 0.0 {
        return Ok(0);
    }
    let theta = nu / 2f64.powi(r as i32);
    let (mut lo, mut hi) = (1, oracle.m());
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        if oracle.query_position(agent, mid)? > theta {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Deterministic search round: every agent's top value is spread over her
/// radius-`r` prefix; highest total wins.
pub fn run_rtsearch_with_radius(
    profile: &Profile,
    oracle: &mut QueryOracle,
    r: u32,
) -> Result<Alternative, QueryError> {
    let mut scores = vec![0.0; profile.m()];
    for i in 0..profile.n() {
        let q = rtsearch_prefix_len(oracle, i, r)?;
        if q == 0 {
            continue;
        }
        let nu = oracle.query_position(i, 1)?;
        let ranking = profile.ranking(i);
        for j in 1..=q {
            scores[ranking.alternative_at(j)] += nu;
        }
    }
    Ok(argmax(&scores))
}

/// Welfare proxy reconstructible from search-mechanism answers: each agent
/// contributes `nu / 2^(r*-1)` for the bracket `(nu/2^r*, nu/2^(r*-1)]`
/// containing her value of `a` (0 when either value is 0). Sandwiched between
/// the true welfare and twice the true welfare.
pub fn artificial_social_welfare(a: Alternative, v: &ValuationMatrix, profile: &Profile) -> f64 {
    let mut total = 0.0;
    for i in 0..v.n() {
        let nu = v.value(i, profile.ranking(i).top());
        let val = v.value(i, a);
        if nu <= 0.0 || val <= 0.0 {
            continue;
        }
        debug_assert!(val <= nu, "electorate must be consistent");
        let mut half = 0.5 * nu;
        while val <= half {
            half *= 0.5;
        }
        total += 2.0 * half;
    }
    total
}

/// Positional score of every alternative under non-increasing, non-negative
/// `weights` (`weights[j-1]` is earned at position `j`).
pub fn positional_scores(profile: &Profile, weights: &[f64]) -> Vec<f64> {
    assert_eq!(weights.len(), profile.m(), "need one weight per position");
    assert!(
        weights.windows(2).all(|w| w[0] >= w[1]) && weights.iter().all(|&w| w >= 0.0),
        "weights must be non-increasing and non-negative"
    );
    let mut scores = vec![0.0; profile.m()];
    for r in profile.rankings() {
        for (idx, &a) in r.order().iter().enumerate() {
            scores[a] += weights[idx];
        }
    }
    scores
}

pub fn run_positional(profile: &Profile, weights: &[f64]) -> Alternative {
    argmax(&positional_scores(profile, weights))
}

pub fn plurality_weights(m: usize) -> Vec<f64> {
    let mut w = vec![0.0; m];
    w[0] = 1.0;
    w
}

/// Scoring weights tuned for i.i.d. `Binary { p }` values: weight `alpha_j` is
/// the binomial tail `Pr[Bin(m, p) >= j]`, the expected value of the
/// alternative an agent ranks at position `j`. The weights sum to `m * p`.
pub fn avg_optimal_scores(p: f64, m: usize) -> Vec<f64> {
    assert!((0.0..=1.0).contains(&p) && m >= 1);
    if p == 0.0 {
        return vec![0.0; m];
    }
    if p == 1.0 {
        return vec![1.0; m];
    }
    let mut pmf = vec![0.0; m + 1];
    pmf[0] = (1.0 - p).powi(m as i32);
    for k in 0..m {
        pmf[k + 1] = pmf[k] * ((m - k) as f64 / (k + 1) as f64) * (p / (1.0 - p));
    }
    // tail sums accumulated smallest-first for accuracy
    let mut alpha = vec![0.0; m];
    let mut tail = 0.0;
    for j in (1..=m).rev() {
        tail += pmf[j];
        alpha[j - 1] = tail;
    }
    alpha
}

/// A runnable mechanism configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MechanismSpec {
    Mean { p: f64 },
    MeanTop,
    RtMean { dist: ValueDistribution },
    RtSearch,
    Plurality,
    Positional { weights: Vec<f64> },
    AvgOptimal { p: f64 },
    Fixed { alternative: Alternative },
    UniformRandom,
}

impl MechanismSpec {
    /// Per-agent query budget the mechanism is entitled to on `m` alternatives.
    pub fn budget(&self, m: usize) -> u32 {
        match self {
            MechanismSpec::Mean { .. } | MechanismSpec::MeanTop | MechanismSpec::RtMean { .. } => 1,
            MechanismSpec::RtSearch => 1 + ceil_log2(m),
            _ => 0,
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(
            self,
            MechanismSpec::RtMean { .. } | MechanismSpec::RtSearch | MechanismSpec::UniformRandom
        )
    }

    pub fn label(&self) -> String {
        match self {
            MechanismSpec::Mean { p } => format!("mean:{p}"),
            MechanismSpec::MeanTop => "mean-top".into(),
            MechanismSpec::RtMean { .. } => "rt-mean".into(),
            MechanismSpec::RtSearch => "rt-search".into(),
            MechanismSpec::Plurality => "plurality".into(),
            MechanismSpec::Positional { weights } => format!(
                "positional:{}",
                weights.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
            ),
            MechanismSpec::AvgOptimal { p } => format!("avg-optimal:{p}"),
            MechanismSpec::Fixed { alternative } => format!("fixed:{alternative}"),
            MechanismSpec::UniformRandom => "uniform-random".into(),
        }
    }

    /// Runs the mechanism. `rng` is consumed only by randomized mechanisms.
    pub fn run(
        &self,
        profile: &Profile,
        oracle: &mut QueryOracle,
        rng: &mut ChaCha8Rng,
    ) -> Result<Alternative, MechanismError> {
        match self {
            MechanismSpec::Mean { p } => Ok(run_mean(profile, oracle, *p)?),
            MechanismSpec::MeanTop => Ok(run_mean_top(profile, oracle)?),
            MechanismSpec::RtMean { dist } => run_rtmean(profile, oracle, dist, rng),
            MechanismSpec::RtSearch => Ok(run_rtsearch(profile, oracle, rng)?),
            MechanismSpec::Plurality => Ok(run_positional(profile, &plurality_weights(profile.m()))),
            MechanismSpec::Positional { weights } => Ok(run_positional(profile, weights)),
            MechanismSpec::AvgOptimal { p } => {
                Ok(run_positional(profile, &avg_optimal_scores(*p, profile.m())))
            }
            MechanismSpec::Fixed { alternative } => {
                assert!(*alternative < profile.m(), "fixed alternative out of range");
                Ok(*alternative)
            }
            MechanismSpec::UniformRandom => Ok(rng.random_range(0..profile.m())),
        }
    }
}
