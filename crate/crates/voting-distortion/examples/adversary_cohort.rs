//! The cohort adversary certifies a t/2 - 1 distortion floor against
//! single-query mechanisms; which completion it plays depends on where the
//! queries landed and who won.

use voting_distortion::election::Profile;
use voting_distortion::mechanism::{plurality_weights, run_mean, run_mean_top, run_positional};
use voting_distortion::run_cohort_adversary;
use voting_distortion::QueryOracle;

fn main() {
    let m = 36; // t = 6 cohorts of 6 agents over 36 block alternatives

    let greedy = |p: &Profile, o: &mut QueryOracle| {
        // take the first agent whose top is worth anything
        for agent in 0..p.n() {
            if o.query_position(agent, 1)? > 0.0 {
                return Ok(p.ranking(agent).top());
            }
        }
        Ok(0)
    };

    let runs = [
        ("mean-top", run_cohort_adversary(|p, o| Ok(run_mean_top(p, o)?), m)),
        ("mean:0.5", run_cohort_adversary(|p, o| Ok(run_mean(p, o, 0.5)?), m)),
        ("greedy", run_cohort_adversary(greedy, m)),
        ("plurality", run_cohort_adversary(|p, _| Ok(run_positional(p, &plurality_weights(p.m()))), m)),
    ];
    for (name, run) in runs {
        let r = run.unwrap();
        println!(
            "{name:<10} winner {:>2}  case {:<28?} sw {:>2}  opt {:>2}  ratio {:>5} (certified >= {})",
            r.winner,
            r.case,
            r.winner_sw,
            r.opt_sw,
            if r.ratio.is_finite() { format!("{:.1}", r.ratio) } else { "inf".into() },
            r.ratio_floor,
        );
    }
}
