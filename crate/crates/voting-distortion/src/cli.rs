//! Command-line front end: `simulate` and `scan` estimate average
//! distortion and emit flat result rows, `adversary` plays one of the
//! lower-bound constructions against a mechanism, `verify` runs the
//! self-check suites.
//!
//! Exit codes: 0 on success, 2 on invalid arguments or configuration,
//! 3 when a verify suite fails.
//!
//! Output is byte-reproducible for a fixed seed and thread count aside from
//! the `wall_ms` field, which reports elapsed time and must be ignored when
//! comparing runs.

use crate::adversary::{run_bucket_adversary, run_cohort_adversary};
use crate::distortion::{
    binary_regime, brute_force_conditional_max_sw, estimate_average_distortion, DistortionEstimate,
    Regime, RowCondition,
};
use crate::distribution::ValueDistribution;
use crate::election::{max_social_welfare, social_welfare};
use crate::mechanism::{
    artificial_social_welfare, ceil_log2, run_rtsearch_with_radius, rtsearch_support,
    MechanismSpec,
};
use crate::query::QueryOracle;
use crate::sampling::{sample_electorate, SeededRng};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize, Serializer};
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "vdist", version, about = "query-limited voting mechanisms and their distortion")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the average distortion of one mechanism on one electorate model
    Simulate(SimulateArgs),
    /// Estimate a whole grid of distributions and electorate sizes
    Scan(ScanArgs),
    /// Play an adversarial construction against a mechanism and report the certified bounds
    Adversary(AdversaryArgs),
    /// Run self-check suites; exits 3 if any check fails
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// master seed; identical seeds give identical output bytes (modulo wall_ms)
    #[arg(long)]
    seed: u64,
    /// rayon worker threads
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// write here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// mechanism, e.g. mean:0.2, mean-top, rt-mean, rt-search, plurality,
    /// positional:1,0.5, avg-optimal, fixed:0, uniform-random
    #[arg(long)]
    mech: Option<String>,
    /// value distribution, e.g. binary:0.2, exponential:1, chi-squared:3,
    /// erlang:2:3, uniform:0:1, point-mass:1
    #[arg(long)]
    dist: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    /// JSON file holding {"mech", "dist", "n", "m", "trials"} instead of flags
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    mech: String,
    /// comma-separated distributions, e.g. binary:0.01,binary:0.2,exponential:1
    #[arg(long)]
    dists: String,
    /// comma-separated sizes as NxM, e.g. 5x10,20x50
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    trials: u64,
}

#[derive(Args)]
struct AdversaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// bucket or cohort
    #[arg(long)]
    construction: String,
    #[arg(long)]
    m: usize,
    /// bucket construction only: number of value scales (2 <= lambda, 2^lambda <= m)
    #[arg(long)]
    lambda: Option<u32>,
    /// probe mechanism to play against
    #[arg(long, default_value = "mean:0.5")]
    mech: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// balanced-rows, consistency, survival-monotone, regime-partition,
    /// sandwich, rtsearch-guarantee, query-budgets, or all
    #[arg(long, default_value = "all")]
    suite: String,
}

#[derive(Deserialize)]
struct SimulateConfig {
    mech: String,
    dist: String,
    n: usize,
    m: usize,
    trials: u64,
}

/// One flat output row shared by `simulate` and `scan`.
#[derive(Debug, Clone, Serialize)]
pub struct ResultRow {
    pub command: String,
    pub mech: String,
    pub dist: String,
    pub n: usize,
    pub m: usize,
    /// distribution parameters, e.g. "0.2" for binary:0.2
    pub p_or_params: String,
    /// density regime for binary distributions, empty otherwise
    pub regime: String,
    pub trials: u64,
    pub num_mean: f64,
    pub den_mean: f64,
    #[serde(serialize_with = "ser_maybe_inf")]
    pub ratio: f64,
    #[serde(serialize_with = "ser_maybe_inf")]
    pub ci_low: f64,
    #[serde(serialize_with = "ser_maybe_inf")]
    pub ci_high: f64,
    pub seed: u64,
    /// elapsed wall-clock time; the one field excluded from reproducibility
    pub wall_ms: u64,
}

pub const RESULT_ROW_HEADER: [&str; 15] = [
    "command", "mech", "dist", "n", "m", "p_or_params", "regime", "trials", "num_mean",
    "den_mean", "ratio", "ci_low", "ci_high", "seed", "wall_ms",
];

/// JSON cannot hold IEEE infinities: finite values serialize as numbers,
/// infinite ones as the string "inf". Shared with the adversary reports so
/// every emitted ratio follows the same convention.
pub(crate) fn ser_maybe_inf<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("inf")
    }
}

/// Renders with 6 significant digits, switching to scientific notation for
/// extreme magnitudes and trimming trailing zeros.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let s = trim_zeros(format!("{:.*}", (5 - exp).max(0) as usize, x));
        // rounding may carry into a 7th digit (999999.7 -> 1000000)
        if s.trim_start_matches('-').split('.').next().unwrap().len() <= 6 {
            return s;
        }
    }
    let s = format!("{x:.5e}");
    let (mantissa, exponent) = s.split_once('e').unwrap();
    format!("{}e{}", trim_zeros(mantissa.to_string()), exponent)
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn csv_number(x: f64) -> String {
    sig6(x)
}

fn rows_to_csv(rows: &[ResultRow]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULT_ROW_HEADER).unwrap();
    for r in rows {
        w.write_record([
            r.command.clone(),
            r.mech.clone(),
            r.dist.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.p_or_params.clone(),
            r.regime.clone(),
            r.trials.to_string(),
            csv_number(r.num_mean),
            csv_number(r.den_mean),
            csv_number(r.ratio),
            csv_number(r.ci_low),
            csv_number(r.ci_high),
            r.seed.to_string(),
            r.wall_ms.to_string(),
        ])
        .unwrap();
    }
    w.into_inner().unwrap()
}

fn emit(common: &CommonArgs, bytes: &[u8]) -> Result<(), String> {
    match &common.output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            std::io::stdout().write_all(bytes).map_err(|e| format!("cannot write stdout: {e}"))
        }
    }
}

/// Parses a mechanism string. `mean`, `avg-optimal` and `rt-mean` may leave
/// their distribution-derived parameters open; they are filled in from the
/// value distribution before running.
pub fn parse_mechanism(s: &str) -> Result<MechanismSpec, String> {
    let (kind, rest) = match s.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (s, None),
    };
    let no_args = |spec: MechanismSpec| match rest {
        None => Ok(spec),
        Some(_) => Err(format!("{kind} takes no parameters")),
    };
    match kind {
        "mean" => match rest {
            None => Ok(MechanismSpec::Mean { p: f64::NAN }),
            Some(r) => {
                let p: f64 = r.parse().map_err(|_| format!("bad probability {r:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
                Ok(MechanismSpec::Mean { p })
            }
        },
        "avg-optimal" => match rest {
            None => Ok(MechanismSpec::AvgOptimal { p: f64::NAN }),
            Some(r) => {
                let p: f64 = r.parse().map_err(|_| format!("bad probability {r:?}"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("probability {p} outside [0, 1]"));
                }
                Ok(MechanismSpec::AvgOptimal { p })
            }
        },
        "mean-top" => no_args(MechanismSpec::MeanTop),
        "rt-mean" => match rest {
            None => Ok(MechanismSpec::RtMean {
                // placeholder until bound to the run's distribution
                dist: ValueDistribution::PointMass { c: f64::NAN },
            }),
            Some(r) => Ok(MechanismSpec::RtMean { dist: r.parse()? }),
        },
        "rt-search" => no_args(MechanismSpec::RtSearch),
        "plurality" => no_args(MechanismSpec::Plurality),
        "uniform-random" => no_args(MechanismSpec::UniformRandom),
        "fixed" => {
            let r = rest.ok_or("fixed needs an alternative index, e.g. fixed:0")?;
            Ok(MechanismSpec::Fixed {
                alternative: r.parse().map_err(|_| format!("bad alternative {r:?}"))?,
            })
        }
        "positional" => {
            let r = rest.ok_or("positional needs weights, e.g. positional:1,0.5,0")?;
            let weights: Vec<f64> = r
                .split(',')
                .map(|w| w.parse().map_err(|_| format!("bad weight {w:?}")))
                .collect::<Result<_, String>>()?;
            Ok(MechanismSpec::Positional { weights })
        }
        other => Err(format!("unknown mechanism {other:?}")),
    }
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize)>, String> {
    s.split(',')
        .map(|part| {
            let (n, m) = part.split_once('x').ok_or(format!("size {part:?} is not NxM"))?;
            let n = n.trim().parse().map_err(|_| format!("bad n in {part:?}"))?;
            let m = m.trim().parse().map_err(|_| format!("bad m in {part:?}"))?;
            if n == 0 || m == 0 {
                return Err(format!("size {part:?} must be positive"));
            }
            Ok((n, m))
        })
        .collect()
}

fn estimate_row(
    command: &str,
    mech_str: &str,
    dist: &ValueDistribution,
    n: usize,
    m: usize,
    trials: u64,
    seed: u64,
) -> Result<ResultRow, String> {
    let template = parse_mechanism(mech_str)?;
    let mech = template.bound_to(dist)?;
    let start = Instant::now();
    let estimate: DistortionEstimate =
        estimate_average_distortion(&mech, dist, n, m, trials, seed).map_err(|e| e.to_string())?;
    let regime = match dist {
        ValueDistribution::Binary { p } => binary_regime(*p, n, m).label().to_string(),
        _ => String::new(),
    };
    Ok(ResultRow {
        command: command.to_string(),
        mech: mech.label(),
        dist: dist.kind_label().to_string(),
        n,
        m,
        p_or_params: dist.params_label(),
        regime,
        trials,
        num_mean: estimate.num_mean,
        den_mean: estimate.den_mean,
        ratio: estimate.ratio,
        ci_low: estimate.ci_low,
        ci_high: estimate.ci_high,
        seed,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

fn emit_rows(common: &CommonArgs, rows: &[ResultRow]) -> Result<(), String> {
    let bytes = match common.format {
        Format::Csv => rows_to_csv(rows),
        Format::Json => {
            let mut v = serde_json::to_vec(rows).expect("rows always serialize");
            v.push(b'\n');
            v
        }
    };
    emit(common, &bytes)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, String> {
    let cfg = match (&args.config, &args.mech) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str::<SimulateConfig>(&text)
                .map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        (None, Some(_)) => {
            let missing = |flag: &str| format!("--{flag} is required without --config");
            SimulateConfig {
                mech: args.mech.clone().unwrap(),
                dist: args.dist.clone().ok_or_else(|| missing("dist"))?,
                n: args.n.ok_or_else(|| missing("n"))?,
                m: args.m.ok_or_else(|| missing("m"))?,
                trials: args.trials.ok_or_else(|| missing("trials"))?,
            }
        }
        (Some(_), Some(_)) => return Err("--config and --mech are mutually exclusive".into()),
        (None, None) => return Err("either --config or --mech/--dist/--n/--m/--trials".into()),
    };
    if cfg.trials == 0 {
        return Err("--trials must be positive".into());
    }
    let dist: ValueDistribution = cfg.dist.parse()?;
    let row =
        estimate_row("simulate", &cfg.mech, &dist, cfg.n, cfg.m, cfg.trials, args.common.seed)?;
    emit_rows(&args.common, &[row])?;
    Ok(0)
}

fn cmd_scan(args: &ScanArgs) -> Result<i32, String> {
    if args.trials == 0 {
        return Err("--trials must be positive".into());
    }
    let dists: Vec<ValueDistribution> =
        args.dists.split(',').map(str::parse).collect::<Result<_, _>>()?;
    let sizes = parse_sizes(&args.sizes)?;
    // validate the template eagerly so misconfiguration exits before any work
    for d in &dists {
        parse_mechanism(&args.mech)?.bound_to(d)?;
    }
    let mut rows = Vec::new();
    for dist in &dists {
        for &(n, m) in &sizes {
            rows.push(estimate_row("scan", &args.mech, dist, n, m, args.trials, args.common.seed)?);
        }
    }
    emit_rows(&args.common, &rows)?;
    Ok(0)
}

fn cmd_adversary(args: &AdversaryArgs) -> Result<i32, String> {
    let spec = parse_mechanism(&args.mech)?;
    if matches!(spec, MechanismSpec::Mean { p } | MechanismSpec::AvgOptimal { p } if p.is_nan())
        || matches!(&spec, MechanismSpec::RtMean { dist } if dist.validate().is_err())
    {
        return Err(format!("adversary runs need fully specified mechanisms, got {}", args.mech));
    }
    let mut rng = SeededRng::new(args.common.seed).stream(0);
    let mech = |p: &crate::election::Profile, o: &mut QueryOracle| spec.run(p, o, &mut rng);
    let report_json = match args.construction.as_str() {
        "bucket" => {
            let lambda = args.lambda.ok_or("bucket construction needs --lambda")?;
            let report = run_bucket_adversary(mech, args.m, lambda).map_err(|e| e.to_string())?;
            serde_json::to_vec_pretty(&report).expect("report serializes")
        }
        "cohort" => {
            if args.lambda.is_some() {
                return Err("--lambda only applies to the bucket construction".into());
            }
            let report = run_cohort_adversary(mech, args.m).map_err(|e| e.to_string())?;
            serde_json::to_vec_pretty(&report).expect("report serializes")
        }
        other => return Err(format!("unknown construction {other:?} (bucket or cohort)")),
    };
    if args.common.format == Format::Csv {
        return Err("adversary reports are structured; use --format json".into());
    }
    let mut bytes = report_json;
    bytes.push(b'\n');
    emit(&args.common, &bytes)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify suites
// ---------------------------------------------------------------------------

struct Check {
    name: &'static str,
    failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Check { name, failures: Vec::new() }
    }

    fn require(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            return;
        }
        match self.failures.len() {
            0..=4 => self.failures.push(detail()),
            5 => self.failures.push("... further failures suppressed".into()),
            _ => {}
        }
    }
}

fn suite_balanced_rows() -> Check {
    let mut c = Check::new("balanced-rows");
    for n in 1..=3 {
        for m in 1..=3 {
            for s in 0..=n * m {
                let total = brute_force_conditional_max_sw(n, m, s, RowCondition::TotalSum).unwrap();
                let balanced =
                    brute_force_conditional_max_sw(n, m, s, RowCondition::BalancedRows).unwrap();
                c.require(total <= balanced, || {
                    format!("n={n} m={m} s={s}: total {total} > balanced {balanced}")
                });
            }
        }
    }
    c
}

fn verification_distributions() -> Vec<ValueDistribution> {
    vec![
        ValueDistribution::Binary { p: 0.25 },
        ValueDistribution::Exponential { rate: 1.0 },
        ValueDistribution::ChiSquared { k: 3 },
        ValueDistribution::Erlang { k: 2, rate: 3.0 },
        ValueDistribution::Uniform { lo: 0.0, hi: 2.0 },
        ValueDistribution::PointMass { c: 1.5 },
    ]
}

fn suite_consistency(seed: u64) -> Check {
    let mut c = Check::new("consistency");
    let seeds = SeededRng::new(seed);
    let dists = verification_distributions();
    for i in 0..200u64 {
        let mut rng = seeds.stream(i);
        let dist = &dists[(i % dists.len() as u64) as usize];
        let e = sample_electorate(dist, 4 + (i % 5) as usize, 3 + (i % 7) as usize, &mut rng);
        c.require(e.is_consistent(), || format!("sample {i} from {dist} is inconsistent"));
    }
    c
}

fn suite_survival_monotone() -> Check {
    let mut c = Check::new("survival-monotone");
    for dist in verification_distributions() {
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let x = i as f64 * 0.01;
            let s = dist.survival(x);
            c.require((0.0..=1.0).contains(&s), || format!("{dist}: survival({x}) = {s}"));
            c.require(s <= prev, || format!("{dist}: survival rises at {x}"));
            prev = s;
        }
    }
    c
}

fn suite_regime_partition() -> Check {
    let mut c = Check::new("regime-partition");
    for &(n, m) in &[(3usize, 3usize), (10, 7), (50, 20)] {
        let cut_low = 1.0 - (1.0 - 1.0 / n as f64).powf(1.0 / m as f64);
        let cut_high = 1.0 / m as f64;
        for i in 0..2000 {
            let p = i as f64 / 2000.0;
            let got = binary_regime(p, n, m);
            let want = if p >= cut_high {
                Regime::PerAgent
            } else if p >= cut_low {
                Regime::PerElectorate
            } else {
                Regime::Subcritical
            };
            c.require(got == want, || format!("p={p} n={n} m={m}: {got:?} != {want:?}"));
        }
    }
    c
}

fn suite_sandwich(seed: u64) -> Check {
    let mut c = Check::new("sandwich");
    let seeds = SeededRng::new(seed);
    let dists = verification_distributions();
    for i in 0..100u64 {
        let mut rng = seeds.stream(i);
        let dist = &dists[(i % dists.len() as u64) as usize];
        let e = sample_electorate(dist, 5, 6, &mut rng);
        for a in 0..6 {
            let sw = social_welfare(a, &e.valuations);
            let art = artificial_social_welfare(a, &e.valuations, &e.profile);
            let slack = 1e-12 * sw.max(1.0);
            c.require(sw <= art + slack && art <= 2.0 * sw + slack, || {
                format!("sample {i} alt {a}: sw={sw} art={art}")
            });
        }
    }
    c
}

fn suite_rtsearch_guarantee(seed: u64) -> Check {
    let mut c = Check::new("rtsearch-guarantee");
    let seeds = SeededRng::new(seed);
    let dists = verification_distributions();
    let mut trial = 0u64;
    for &m in &[4usize, 8, 16, 32] {
        let budget = 1 + ceil_log2(m);
        let radii = rtsearch_support(m);
        for _ in 0..12 {
            trial += 1;
            let mut rng = seeds.stream(trial);
            let dist = &dists[(trial % dists.len() as u64) as usize];
            let e = sample_electorate(dist, 6, m, &mut rng);
            let mut total = 0.0;
            for r in 1..=radii {
                let mut oracle = QueryOracle::fixed(&e.profile, &e.valuations, Some(budget));
                let w = run_rtsearch_with_radius(&e.profile, &mut oracle, r).unwrap();
                c.require(oracle.stats().max <= budget, || {
                    format!("trial {trial} r={r}: {} queries", oracle.stats().max)
                });
                total += social_welfare(w, &e.valuations);
            }
            let avg = total / radii as f64;
            let (_, opt) = max_social_welfare(&e.valuations);
            c.require(avg >= opt / (4.0 * radii as f64), || {
                format!("trial {trial}: avg {avg} < opt {opt} / (4 * {radii})")
            });
        }
    }
    c
}

fn suite_query_budgets(seed: u64) -> Check {
    let mut c = Check::new("query-budgets");
    let seeds = SeededRng::new(seed);
    let m = 8;
    let specs = vec![
        MechanismSpec::Mean { p: 0.3 },
        MechanismSpec::MeanTop,
        MechanismSpec::RtMean { dist: ValueDistribution::Exponential { rate: 1.0 } },
        MechanismSpec::RtSearch,
        MechanismSpec::Plurality,
        MechanismSpec::AvgOptimal { p: 0.3 },
        MechanismSpec::UniformRandom,
        MechanismSpec::Fixed { alternative: 0 },
    ];
    for i in 0..20u64 {
        let mut rng = seeds.stream(i);
        let e = sample_electorate(&ValueDistribution::Exponential { rate: 1.0 }, 4, m, &mut rng);
        for spec in &specs {
            let budget = spec.budget(m);
            let mut oracle = QueryOracle::fixed(&e.profile, &e.valuations, Some(budget));
            let run = spec.run(&e.profile, &mut oracle, &mut rng);
            c.require(run.is_ok(), || format!("{} exceeded its budget {budget}", spec.label()));
            c.require(oracle.stats().max <= budget, || {
                format!("{}: {} > {budget} queries", spec.label(), oracle.stats().max)
            });
        }
    }
    c
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, String> {
    let seed = args.common.seed;
    let canonical = match args.suite.as_str() {
        "lemma-b1" => "balanced-rows", // accepted alias
        other => other,
    };
    let all = [
        "balanced-rows",
        "consistency",
        "survival-monotone",
        "regime-partition",
        "sandwich",
        "rtsearch-guarantee",
        "query-budgets",
    ];
    let selected: Vec<&str> = if canonical == "all" {
        all.to_vec()
    } else if all.contains(&canonical) {
        vec![canonical]
    } else {
        return Err(format!("unknown suite {:?}; one of {all:?} or all", args.suite));
    };

    let mut report = String::new();
    let mut failed = false;
    for name in selected {
        let check = match name {
            "balanced-rows" => suite_balanced_rows(),
            "consistency" => suite_consistency(seed),
            "survival-monotone" => suite_survival_monotone(),
            "regime-partition" => suite_regime_partition(),
            "sandwich" => suite_sandwich(seed),
            "rtsearch-guarantee" => suite_rtsearch_guarantee(seed),
            "query-budgets" => suite_query_budgets(seed),
            _ => unreachable!(),
        };
        if check.failures.is_empty() {
            writeln!(report, "verify {}: ok", check.name).unwrap();
        } else {
            failed = true;
            writeln!(report, "verify {}: FAIL", check.name).unwrap();
            for f in &check.failures {
                writeln!(report, "  {f}").unwrap();
            }
        }
    }
    emit(&args.common, report.as_bytes())?;
    Ok(if failed { 3 } else { 0 })
}

/// Parses `std::env::args`, runs the command, and returns the process exit
/// code (0 ok, 2 usage/config error, 3 failed verification).
pub fn run() -> i32 {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Simulate(a) => &a.common,
        Command::Scan(a) => &a.common,
        Command::Adversary(a) => &a.common,
        Command::Verify(a) => &a.common,
    };
    if common.threads == 0 {
        eprintln!("error: --threads must be positive");
        return 2;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(common.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            return 2;
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Adversary(a) => cmd_adversary(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match outcome {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}
