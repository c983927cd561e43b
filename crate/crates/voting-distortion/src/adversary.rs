//! Adversarial electorates that answer queries on the fly and are completed,
//! after the mechanism commits to a winner, into a consistent valuation
//! matrix on which that winner looks as bad as possible.
//!
//! Both constructions use a cyclic profile over a block structure, answer
//! low values where the mechanism looks and hide high values where it does
//! not, and certify a concrete lower bound on the distortion of the run.

use crate::distortion::welfare_ratio;
use crate::election::{max_social_welfare, social_welfare, Alternative, Electorate, Profile, Ranking, ValuationMatrix};
use crate::mechanism::MechanismError;
use crate::query::{AdversaryPolicy, QueryOracle, QueryStats};
use serde::Serialize;

/// Full electorate when small enough to archive, otherwise a digest.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "repr", rename_all = "snake_case")]
pub enum ElectorateRecord {
    Full { electorate: Electorate },
    Digest { n: usize, m: usize, column_sums: Vec<f64> },
}

impl ElectorateRecord {
    fn capture(e: &Electorate) -> Self {
        let (n, m) = (e.profile.n(), e.profile.m());
        if n * m <= 25_000 {
            ElectorateRecord::Full { electorate: e.clone() }
        } else {
            let column_sums =
                (0..m).map(|a| social_welfare(a, &e.valuations)).collect();
            ElectorateRecord::Digest { n, m, column_sums }
        }
    }
}

/// Cyclic profile on `n = m` agents: agent `i` ranks `i, i+1, ..., i-1`.
fn cyclic_profile(m: usize) -> Profile {
    Profile::new(
        (0..m)
            .map(|i| Ranking::from_order((i..m).chain(0..i).collect()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// geometric-bucket construction
// ---------------------------------------------------------------------------

/// Geometric bucket layout: `2*lambda` bands of ranking positions with
/// exponentially growing sizes and exponentially shrinking values; everything
/// below the last band is worth nothing.
#[derive(Debug, Clone)]
pub struct BucketLadder {
    pub m: usize,
    pub lambda: u32,
    /// number of positions in each bucket
    pub sizes: Vec<usize>,
    /// value revealed (and committed) for a queried bucket
    pub lows: Vec<f64>,
    /// value granted to an untouched bucket that avoids the winner
    pub highs: Vec<f64>,
}

impl BucketLadder {
    pub fn new(m: usize, lambda: u32) -> Self {
        assert!(m >= 154, "bucket construction needs m >= 154, got {m}");
        assert!(lambda >= 2, "bucket construction needs lambda >= 2");
        assert!(
            (1usize << lambda) <= m,
            "bucket construction needs 2^lambda <= m, got lambda={lambda}, m={m}"
        );
        let mf = m as f64;
        let e = 3.0 * lambda as f64;
        let sizes: Vec<usize> =
            (1..=2 * lambda).map(|j| mf.powf(j as f64 / e).ceil() as usize).collect();
        assert!(sizes.iter().sum::<usize>() <= m, "buckets must fit above the tail");
        let lows: Vec<f64> =
            (1..=2 * lambda).map(|j| mf.powf((2 * lambda - j) as f64 / e)).collect();
        let highs: Vec<f64> =
            (1..=2 * lambda).map(|j| mf.powf((2 * lambda - j + 1) as f64 / e)).collect();
        BucketLadder { m, lambda, sizes, lows, highs }
    }

    /// Bucket index (0-based) containing this 1-indexed ranking position,
    /// or `None` for the worthless tail.
    pub fn bucket_of(&self, position: usize) -> Option<usize> {
        let mut end = 0;
        for (j, &s) in self.sizes.iter().enumerate() {
            end += s;
            if position <= end {
                return Some(j);
            }
        }
        None
    }
}

struct BucketPolicy<'a> {
    ladder: &'a BucketLadder,
    /// (agent, bucket) pairs pinned to the low value by some query
    committed: Vec<Vec<bool>>,
}

impl AdversaryPolicy for BucketPolicy<'_> {
    fn reveal(&mut self, agent: usize, position: usize, _alternative: Alternative) -> f64 {
        match self.ladder.bucket_of(position) {
            Some(j) => {
                self.committed[agent][j] = true;
                self.ladder.lows[j]
            }
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BucketReport {
    pub m: usize,
    pub lambda: u32,
    pub winner: Alternative,
    pub winner_sw: f64,
    pub opt_sw: f64,
    #[serde(serialize_with = "crate::cli::ser_maybe_inf")]
    pub ratio: f64,
    /// certified ceiling on the winner's welfare: `4 * lambda * m^(2/3)`
    pub winner_sw_bound: f64,
    /// certified floor on the optimum: `(lambda-1) * m^((2*lambda+1)/(3*lambda))`
    pub opt_sw_floor: f64,
    /// certified distortion floor: `m^(1/(3*lambda)) / 8`
    pub ratio_floor: f64,
    pub stats: QueryStats,
    pub record: ElectorateRecord,
}

/// Plays the bucket adversary against one mechanism run and certifies the
/// resulting distortion bounds. The mechanism sees `n = m` agents with the
/// cyclic profile; every query inside a bucket commits that whole
/// (agent, bucket) band to its low value, tail queries return 0, and
/// unqueried bands finish low exactly when they contain the winner.
///
/// The three bound asserts hold for any query pattern at these problem
/// sizes; the certified floors only become non-trivial statements about
/// query-limited mechanisms as `m` grows.
pub fn run_bucket_adversary<F>(
    mech: F,
    m: usize,
    lambda: u32,
) -> Result<BucketReport, MechanismError>
where
    F: FnOnce(&Profile, &mut QueryOracle) -> Result<Alternative, MechanismError>,
{
    let ladder = BucketLadder::new(m, lambda);
    let profile = cyclic_profile(m);
    let mut policy =
        BucketPolicy { ladder: &ladder, committed: vec![vec![false; 2 * lambda as usize]; m] };
    let mut oracle = QueryOracle::adversarial(&profile, &mut policy, None);
    let winner = mech(&profile, &mut oracle)?;
    let stats = oracle.stats();
    let transcript = oracle.transcript().to_vec();
    let committed = policy.committed;

    let mut valuations = ValuationMatrix::zero(m, m);
    for agent in 0..m {
        let ranking = profile.ranking(agent);
        // the band holding the winner finishes low for this agent, exactly
        // as if it had been queried
        let winner_bucket = ladder.bucket_of(ranking.position_of(winner));
        for position in 1..=m {
            if let Some(j) = ladder.bucket_of(position) {
                let value = if committed[agent][j] || winner_bucket == Some(j) {
                    ladder.lows[j]
                } else {
                    ladder.highs[j]
                };
                valuations.set(agent, ranking.alternative_at(position), value);
            } else {
                break; // positions are scanned in order; the tail stays zero
            }
        }
    }

    for r in &transcript {
        let a = profile.ranking(r.agent).alternative_at(r.position);
        assert_eq!(
            valuations.value(r.agent, a),
            r.value,
            "finalized matrix must reproduce every revealed answer"
        );
    }
    let electorate = Electorate { profile, valuations };
    assert!(electorate.is_consistent());

    let winner_sw = social_welfare(winner, &electorate.valuations);
    let (_, opt_sw) = max_social_welfare(&electorate.valuations);
    let ratio = welfare_ratio(opt_sw, winner_sw);

    let mf = m as f64;
    let lf = lambda as f64;
    // the cyclic structure puts the winner in bucket j for exactly sizes[j]
    // agents, each pinned low
    let expected_winner_sw: f64 =
        ladder.sizes.iter().zip(&ladder.lows).map(|(&b, &lo)| b as f64 * lo).sum();
    assert!(
        (winner_sw - expected_winner_sw).abs() <= 1e-9 * expected_winner_sw.max(1.0),
        "winner welfare {winner_sw} != sum of band sizes times lows {expected_winner_sw}"
    );
    let winner_sw_bound = 4.0 * lf * mf.powf(2.0 / 3.0);
    let opt_sw_floor = (lf - 1.0) * mf.powf((2.0 * lf + 1.0) / (3.0 * lf));
    let ratio_floor = mf.powf(1.0 / (3.0 * lf)) / 8.0;
    assert!(winner_sw <= winner_sw_bound);
    assert!(opt_sw >= opt_sw_floor);
    assert!(ratio >= ratio_floor);

    Ok(BucketReport {
        m,
        lambda,
        winner,
        winner_sw,
        opt_sw,
        ratio,
        winner_sw_bound,
        opt_sw_floor,
        ratio_floor,
        stats,
        record: ElectorateRecord::capture(&electorate),
    })
}

// ---------------------------------------------------------------------------
// cohort construction
// ---------------------------------------------------------------------------

/// Which completion the cohort adversary used after seeing the winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdversaryCase {
    /// winner outside the cyclic block: it can be zeroed everywhere
    TailWinner,
    /// some cohort was never queried and does not own the winner
    UntouchedCohortOutsideWinner,
    /// untouched cohort owns the winner near the front of its block
    UntouchedCohortUpperHalf,
    /// untouched cohort owns the winner near the back of its block
    UntouchedCohortLowerHalf,
    /// every cohort was queried at least once
    AllCohortsTouched,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohortReport {
    pub m: usize,
    pub t: usize,
    pub n: usize,
    pub winner: Alternative,
    pub case: AdversaryCase,
    /// the alternative the completion props up, when one is singled out
    pub rival: Option<Alternative>,
    pub winner_sw: f64,
    pub opt_sw: f64,
    #[serde(serialize_with = "crate::cli::ser_maybe_inf")]
    pub ratio: f64,
    /// certified distortion floor: `t/2 - 1` (an infinite ratio satisfies it)
    pub ratio_floor: f64,
    pub stats: QueryStats,
    pub record: ElectorateRecord,
}

/// Largest even `t` with `t * t <= m`.
pub fn cohort_side(m: usize) -> usize {
    let mut t = (m as f64).sqrt().floor() as usize;
    while (t + 1) * (t + 1) <= m {
        t += 1; // guard against sqrt rounding just below an exact square
    }
    if t % 2 == 1 {
        t -= 1;
    }
    t
}

struct CohortPolicy {
    t: usize,
    /// (agent, position) of the first query each cohort ever received
    first_query: Vec<Option<(usize, usize)>>,
    /// (agent, position) of the single revealed 1 in each cohort, if any
    revealed_one: Vec<Option<(usize, usize)>>,
}

impl AdversaryPolicy for CohortPolicy {
    fn reveal(&mut self, agent: usize, position: usize, _alternative: Alternative) -> f64 {
        let k = agent / self.t;
        if self.first_query[k].is_none() {
            self.first_query[k] = Some((agent, position));
            if position <= self.t {
                self.revealed_one[k] = Some((agent, position));
                return 1.0;
            }
        }
        0.0
    }
}

/// Plays the cohort adversary against one run of a 1-query-per-agent
/// mechanism and certifies a `t/2 - 1` distortion floor for it.
///
/// The electorate has `n = t^2` agents cycling over the first `t^2`
/// alternatives (any extras sit in a fixed worthless tail), partitioned into
/// `t` cohorts of `t` consecutive agents; cohort `k` jointly owns the
/// alternative block `k*t .. k*t+t-1`. Only the first query a cohort receives
/// can come back positive, and only when it lands in the querying agent's
/// top `t` positions. After the winner is known the matrix is completed so
/// that every revealed answer is reproduced verbatim: positive answers force
/// a minimal prefix of ones, and one case-dependent rival alternative is
/// propped up by consistent prefixes that always stop just short of the
/// winner.
pub fn run_cohort_adversary<F>(mech: F, m: usize) -> Result<CohortReport, MechanismError>
where
    F: FnOnce(&Profile, &mut QueryOracle) -> Result<Alternative, MechanismError>,
{
    assert!(m >= 16, "cohort construction needs m >= 16, got {m}");
    let t = cohort_side(m);
    let n = t * t;
    // agent i: alternatives i, i+1, ..., i-1 over the block part, then the tail
    let profile = Profile::new(
        (0..n)
            .map(|i| {
                let mut order: Vec<Alternative> = (i..n).chain(0..i).collect();
                order.extend(n..m);
                Ranking::from_order(order)
            })
            .collect(),
    );
    let pos_of = |agent: usize, a: Alternative| -> usize {
        if a < n {
            (a + n - agent) % n + 1
        } else {
            a + 1
        }
    };

    let mut policy =
        CohortPolicy { t, first_query: vec![None; t], revealed_one: vec![None; t] };
    let mut oracle = QueryOracle::adversarial(&profile, &mut policy, Some(1));
    let winner = mech(&profile, &mut oracle)?;
    let stats = oracle.stats();
    let transcript = oracle.transcript().to_vec();
    let CohortPolicy { first_query, revealed_one, .. } = policy;

    let mut valuations = ValuationMatrix::zero(n, m);
    let set_prefix = |vals: &mut ValuationMatrix, agent: usize, len: usize| {
        for position in 1..=len {
            vals.set(agent, profile.ranking(agent).alternative_at(position), 1.0);
        }
    };
    // positive answers force ones at every earlier position of that agent
    for one in revealed_one.iter().flatten() {
        set_prefix(&mut valuations, one.0, one.1);
    }

    let mut rival = None;
    let case = if winner >= n {
        if revealed_one.iter().all(Option::is_none) {
            // nothing forces any value; wake one ungagged agent so the
            // worthless winner still loses by an infinite margin
            let k0 = (0..t).position(|k| first_query[k].is_none()).unwrap_or(0);
            let agent = first_query[k0].map_or(k0 * t, |(a, _)| a);
            // her only possible reveal is a 0 strictly below position 1
            set_prefix(&mut valuations, agent, 1);
        }
        AdversaryCase::TailWinner
    } else {
        let k_w = winner / t;
        if let Some(k0) = (0..t).position(|k| first_query[k].is_none()) {
            if k_w != k0 {
                // the whole untouched cohort props up the last alternative
                // of its own block, each member ranking it within the top t
                let a = k0 * t + t - 1;
                rival = Some(a);
                for r in 0..t {
                    set_prefix(&mut valuations, k0 * t + r, t - r);
                }
                AdversaryCase::UntouchedCohortOutsideWinner
            } else {
                let local = winner - k0 * t; // 0-based index inside the block
                if local < t / 2 {
                    // members behind the winner prop up the block's last
                    // alternative; their prefixes start past the winner
                    let a = k0 * t + t - 1;
                    rival = Some(a);
                    for r in local + 1..t {
                        set_prefix(&mut valuations, k0 * t + r, t - r);
                    }
                    AdversaryCase::UntouchedCohortUpperHalf
                } else {
                    // members ahead of the winner prop up its predecessor;
                    // their prefixes stop one position short of the winner
                    let a = winner - 1;
                    rival = Some(a);
                    for r in 0..local {
                        set_prefix(&mut valuations, k0 * t + r, local - r);
                    }
                    AdversaryCase::UntouchedCohortLowerHalf
                }
            }
        } else {
            // every cohort answered; prop up the winner's cyclic predecessor
            // from every cohort that cannot collide with it
            let a = (winner + n - 1) % n;
            rival = Some(a);
            // an agent can hold ones up to this position without contradicting
            // her single revealed answer (1-answers extend freely)
            let mut reach = vec![usize::MAX; n];
            for r in &transcript {
                if r.value == 0.0 {
                    reach[r.agent] = r.position - 1;
                }
            }
            let mut boosts = 0;
            for k in 0..t {
                if k == k_w || k == (k_w + t - 1) % t {
                    continue;
                }
                // prefer the agent whose positive answer already anchors a
                // prefix; otherwise any member whose answer, if any, sits
                // past the rival
                let booster = revealed_one[k].map(|(agent, _)| agent).or_else(|| {
                    (k * t..k * t + t).find(|&agent| pos_of(agent, a) <= reach[agent])
                });
                if let Some(agent) = booster {
                    set_prefix(&mut valuations, agent, pos_of(agent, a));
                    boosts += 1;
                }
            }
            if boosts == 0 && revealed_one.iter().all(Option::is_none) {
                // nothing forces any welfare; wake one agent whose top is not
                // the winner so the winner still loses by an infinite margin
                let agent = (0..n)
                    .find(|&i| profile.ranking(i).top() != winner && reach[i] >= 1)
                    .expect("every cohort's first answer lies past position 1");
                set_prefix(&mut valuations, agent, 1);
            }
            AdversaryCase::AllCohortsTouched
        }
    };

    for r in &transcript {
        let alt = profile.ranking(r.agent).alternative_at(r.position);
        assert_eq!(
            valuations.value(r.agent, alt),
            r.value,
            "finalized matrix must reproduce every revealed answer"
        );
    }
    let electorate = Electorate { profile, valuations };
    assert!(electorate.is_consistent());

    let winner_sw = social_welfare(winner, &electorate.valuations);
    let (_, opt_sw) = max_social_welfare(&electorate.valuations);
    let ratio = welfare_ratio(opt_sw, winner_sw);
    let ratio_floor = t as f64 / 2.0 - 1.0;
    if case == AdversaryCase::TailWinner {
        assert!(ratio.is_infinite(), "a worthless winner must lose by an infinite margin");
    }
    assert!(ratio >= ratio_floor, "certified floor violated: {ratio} < {ratio_floor}");

    Ok(CohortReport {
        m,
        t,
        n,
        winner,
        case,
        rival,
        winner_sw,
        opt_sw,
        ratio,
        ratio_floor,
        stats,
        record: ElectorateRecord::capture(&electorate),
    })
}

// ---------------------------------------------------------------------------
// sparse approval family
// ---------------------------------------------------------------------------

/// The electorate family witnessing that sub-logarithmic approval
/// probabilities doom single-query mechanisms: `n = ceil(6 m ln m)` agents
/// and per-value approval probability `p = 1 / (n m)`.
pub fn sparse_approval_family(m: usize) -> (usize, f64) {
    assert!(m >= 2);
    let n = (6.0 * m as f64 * (m as f64).ln()).ceil() as usize;
    (n, 1.0 / (n as f64 * m as f64))
}
