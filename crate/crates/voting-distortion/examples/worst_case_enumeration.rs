//! Exact answers on tiny instances: exhaustive worst-case search over all
//! consistent 0/1 electorates, and exact conditional expectations of the
//! best column sum (rational arithmetic, no sampling).

use voting_distortion::distortion::{brute_force_conditional_max_sw, RowCondition};
use voting_distortion::election::Profile;
use voting_distortion::exhaustive_worst_case;
use voting_distortion::mechanism::run_mean;
use voting_distortion::QueryOracle;

fn main() {
    // the 1-position mean rule on 2 agents x 2 alternatives: a tie broken
    // toward the wrong alternative costs exactly a factor 2
    let r = exhaustive_worst_case(
        |p: &Profile, o: &mut QueryOracle| Ok(run_mean(p, o, 0.5)?),
        2,
        2,
        Some(1),
    )
    .unwrap();
    println!("mean:0.5 on 2x2 binary instances: worst ratio {}", r.ratio);
    println!("  worst profile: {:?}", r.electorate.profile.rankings());
    println!("  winner {} (welfare {}), optimum welfare {}", r.winner, r.winner_sw, r.opt_sw);

    // returning an agent's bottom alternative can be infinitely bad
    let bottom = |p: &Profile, _: &mut QueryOracle| Ok(p.ranking(0).alternative_at(p.m()));
    let r = exhaustive_worst_case(bottom, 1, 3, Some(0)).unwrap();
    println!("bottom-picker on 1x3: worst ratio {}", r.ratio);

    println!();
    println!("E[max column sum | s ones in a 3x3 matrix]:");
    println!("{:>2}  {:>10}  {:>10}", "s", "any rows", "balanced");
    for s in 0..=9 {
        let total = brute_force_conditional_max_sw(3, 3, s, RowCondition::TotalSum).unwrap();
        let balanced = brute_force_conditional_max_sw(3, 3, s, RowCondition::BalancedRows).unwrap();
        println!("{s:>2}  {total:>10}  {balanced:>10}");
    }
    println!("balancing the rows never lowers the expected best column");
}
