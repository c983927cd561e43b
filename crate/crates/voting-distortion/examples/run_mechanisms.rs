//! Run every mechanism on one sampled electorate and compare winners,
//! welfare, and how many value queries each one spent.

use voting_distortion::election::{max_social_welfare, social_welfare};
use voting_distortion::{
    sample_electorate, MechanismSpec, QueryOracle, SeededRng, ValueDistribution,
};

fn main() {
    let dist = ValueDistribution::Binary { p: 0.3 };
    let seeds = SeededRng::new(7);
    let e = sample_electorate(&dist, 8, 6, &mut seeds.stream(0));
    let (opt, opt_sw) = max_social_welfare(&e.valuations);
    println!("optimum: alternative {opt} with welfare {opt_sw}");

    let specs = vec![
        MechanismSpec::Mean { p: 0.3 },
        MechanismSpec::MeanTop,
        MechanismSpec::RtMean { dist: dist.clone() },
        MechanismSpec::RtSearch,
        MechanismSpec::Plurality,
        MechanismSpec::AvgOptimal { p: 0.3 },
        MechanismSpec::UniformRandom,
    ];
    for spec in specs {
        // every mechanism stays within its declared budget; enforce it
        let budget = spec.budget(e.profile.m());
        let mut oracle = QueryOracle::fixed(&e.profile, &e.valuations, Some(budget));
        let mut rng = seeds.stream(1);
        let winner = spec.run(&e.profile, &mut oracle, &mut rng).unwrap();
        let stats = oracle.stats();
        println!(
            "{:<14} winner {winner}  welfare {:>4}  queries/agent <= {} (budget {budget})",
            spec.label(),
            social_welfare(winner, &e.valuations),
            stats.max,
        );
    }
}
