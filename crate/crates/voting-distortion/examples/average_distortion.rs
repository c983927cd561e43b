//! Monte Carlo average distortion: the ratio of expected optimal welfare to
//! expected winner welfare, with a bootstrap confidence interval.

use voting_distortion::{estimate_average_distortion, MechanismSpec, ValueDistribution};

fn main() {
    let dist = ValueDistribution::Binary { p: 0.05 };
    let (n, m, trials, seed) = (20, 10, 20_000, 1234);

    println!("binary:0.05 electorates, n={n}, m={m}, {trials} trials, seed {seed}");
    for mech in [
        MechanismSpec::Mean { p: 0.05 },
        MechanismSpec::MeanTop,
        MechanismSpec::RtSearch,
        MechanismSpec::UniformRandom,
    ] {
        let est = estimate_average_distortion(&mech, &dist, n, m, trials, seed).unwrap();
        println!(
            "{:<15} E[opt] {:.4}  E[winner] {:.4}  distortion {:.3}  95% CI [{:.3}, {:.3}]",
            mech.label(),
            est.num_mean,
            est.den_mean,
            est.ratio,
            est.ci_low,
            est.ci_high,
        );
    }

    // an intentionally terrible rule: always pick alternative 0
    let fixed = MechanismSpec::Fixed { alternative: 0 };
    let est = estimate_average_distortion(&fixed, &dist, n, m, trials, seed).unwrap();
    println!("{:<15} distortion {:.3} (no queries, no ranking information)", fixed.label(), est.ratio);
}
