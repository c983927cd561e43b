//! Sweep the approval probability across electorate sizes and watch the
//! density regime flip: once p drops below the per-agent and then the
//! per-electorate thresholds, single-query rules start to struggle.

use voting_distortion::{scan_average_distortion, MechanismSpec, ValueDistribution};

fn main() {
    let dists: Vec<ValueDistribution> = [0.5, 0.2, 0.05, 0.01, 0.001]
        .into_iter()
        .map(|p| ValueDistribution::Binary { p })
        .collect();
    let sizes = [(5, 10), (20, 50)];
    // the template takes its approval probability from each cell
    let mech = MechanismSpec::Mean { p: f64::NAN };

    let cells = scan_average_distortion(&mech, &dists, &sizes, 4_000, 99).unwrap();
    println!("{:<10} {:>3} {:>3}  {:<15} {:>10}", "p", "n", "m", "regime", "distortion");
    for c in cells {
        let regime = c.regime.map(|r| r.label()).unwrap_or("");
        println!(
            "{:<10} {:>3} {:>3}  {:<15} {:>10.3}",
            c.dist.params_label(),
            c.n,
            c.m,
            regime,
            c.estimate.ratio,
        );
    }
}
