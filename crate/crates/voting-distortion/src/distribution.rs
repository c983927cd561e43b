//! Value distributions agents draw their cardinal values from.
//!
//! Every variant has non-negative support and closed-form mean, variance and
//! survival function; the survival function is what threshold mechanisms
//! consume. `Binary { p }` is the two-point distribution on {0, 1}.

use rand::Rng;
use rand_distr::{ChiSquared as ChiSquaredSampler, Distribution as _, Exp, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_ur;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueDistribution {
    Binary { p: f64 },
    Exponential { rate: f64 },
    ChiSquared { k: u32 },
    Erlang { k: u32, rate: f64 },
    Uniform { lo: f64, hi: f64 },
    /// Degenerate distribution concentrated on `c`; mostly for tests.
    PointMass { c: f64 },
}

use ValueDistribution::*;

impl ValueDistribution {
    pub fn validate(&self) -> Result<(), String> {
        match *self {
            Binary { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(format!("binary p must lie in [0,1], got {p}"));
                }
            }
            Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return Err(format!("exponential rate must be positive, got {rate}"));
                }
            }
            ChiSquared { k } => {
                if k == 0 {
                    return Err("chisq needs k >= 1".into());
                }
            }
            Erlang { k, rate } => {
                if k == 0 || !(rate > 0.0 && rate.is_finite()) {
                    return Err(format!("erlang needs k >= 1 and positive rate, got k={k} rate={rate}"));
                }
            }
            Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                    return Err(format!("uniform needs 0 <= lo <= hi, got [{lo}, {hi}]"));
                }
            }
            PointMass { c } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(format!("point mass must be non-negative, got {c}"));
                }
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Binary { p } => p,
            Exponential { rate } => 1.0 / rate,
            ChiSquared { k } => k as f64,
            Erlang { k, rate } => k as f64 / rate,
            Uniform { lo, hi } => 0.5 * (lo + hi),
            PointMass { c } => c,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Binary { p } => p * (1.0 - p),
            Exponential { rate } => 1.0 / (rate * rate),
            ChiSquared { k } => 2.0 * k as f64,
            Erlang { k, rate } => k as f64 / (rate * rate),
            Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            PointMass { .. } => 0.0,
        }
    }

    /// `Pr[Z >= x]`. Non-increasing in `x`; equals 1 for every `x <= 0`.
    pub fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            Binary { p } => {
                if x <= 1.0 {
                    p
                } else {
                    0.0
                }
            }
            Exponential { rate } => (-rate * x).exp(),
            ChiSquared { k } => gamma_ur(k as f64 / 2.0, x / 2.0),
            Erlang { k, rate } => gamma_ur(k as f64, rate * x),
            Uniform { lo, hi } => {
                if lo == hi {
                    if x <= lo { 1.0 } else { 0.0 }
                } else {
                    ((hi - x) / (hi - lo)).clamp(0.0, 1.0)
                }
            }
            PointMass { c } => {
                if x <= c {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Prepares a reusable sampler (resolves the rand_distr object once).
    pub fn sampler(&self) -> Sampler {
        match *self {
            Binary { p } => Sampler::Binary(p),
            Exponential { rate } => Sampler::Exp(Exp::new(rate).expect("validated rate")),
            ChiSquared { k } => Sampler::Chi(ChiSquaredSampler::new(k as f64).expect("validated k")),
            Erlang { k, rate } => {
                Sampler::Gamma(Gamma::new(k as f64, 1.0 / rate).expect("validated shape/scale"))
            }
            Uniform { lo, hi } => Sampler::Uniform { lo, span: hi - lo },
            PointMass { c } => Sampler::Point(c),
        }
    }

    /// Compact `kind:params` form, e.g. `binary:0.2` or `erlang:2:3`.
    pub fn label(&self) -> String {
        format!("{self}")
    }

    /// The parameter part of the label (CSV `p_or_params` column).
    pub fn params_label(&self) -> String {
        let l = self.label();
        l.split_once(':').map(|(_, p)| p.to_string()).unwrap_or_default()
    }

    pub fn kind_label(&self) -> &'static str {
        match self {
            Binary { .. } => "binary",
            Exponential { .. } => "exponential",
            ChiSquared { .. } => "chisq",
            Erlang { .. } => "erlang",
            Uniform { .. } => "uniform",
            PointMass { .. } => "pointmass",
        }
    }
}

impl fmt::Display for ValueDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Binary { p } => write!(f, "binary:{p}"),
            Exponential { rate } => write!(f, "exponential:{rate}"),
            ChiSquared { k } => write!(f, "chisq:{k}"),
            Erlang { k, rate } => write!(f, "erlang:{k}:{rate}"),
            Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            PointMass { c } => write!(f, "pointmass:{c}"),
        }
    }
}

impl FromStr for ValueDistribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut parts = s.split(':');
        let kind = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let want = |n: usize| -> Result<(), String> {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("{kind} takes {n} parameter(s), got {}", args.len()))
            }
        };
        let num = |i: usize| -> Result<f64, String> {
            args[i].parse::<f64>().map_err(|e| format!("bad number {:?}: {e}", args[i]))
        };
        let int = |i: usize| -> Result<u32, String> {
            args[i].parse::<u32>().map_err(|e| format!("bad integer {:?}: {e}", args[i]))
        };
        let dist = match kind {
            "binary" => {
                want(1)?;
                Binary { p: num(0)? }
            }
            "exponential" | "exp" => {
                want(1)?;
                Exponential { rate: num(0)? }
            }
            "chisq" => {
                want(1)?;
                ChiSquared { k: int(0)? }
            }
            "erlang" => {
                want(2)?;
                Erlang { k: int(0)?, rate: num(1)? }
            }
            "uniform" => {
                want(2)?;
                Uniform { lo: num(0)?, hi: num(1)? }
            }
            "pointmass" => {
                want(1)?;
                PointMass { c: num(0)? }
            }
            other => return Err(format!(
                "unknown distribution {other:?} (expected binary|exponential|chisq|erlang|uniform|pointmass)"
            )),
        };
        dist.validate()?;
        Ok(dist)
    }
}

/// Resolved sampler for one distribution; cheap to call per draw.
#[derive(Debug, Clone)]
pub enum Sampler {
    Binary(f64),
    Exp(Exp<f64>),
    Chi(ChiSquaredSampler<f64>),
    Gamma(Gamma<f64>),
    Uniform { lo: f64, span: f64 },
    Point(f64),
}

impl Sampler {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Binary(p) => {
                if rng.random::<f64>() < *p {
                    1.0
                } else {
                    0.0
                }
            }
            Sampler::Exp(d) => d.sample(rng),
            Sampler::Chi(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::Uniform { lo, span } => lo + span * rng.random::<f64>(),
            Sampler::Point(c) => *c,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn survival_closed_forms_match_reference_values() {
        // reference values computed with an independent statistics library
        let cases: &[(ValueDistribution, f64, f64)] = &[
            (Exponential { rate: 2.0 }, 0.7, 0.2465969639416065),
            (Erlang { k: 2, rate: 3.0 }, 0.5, 0.5578254003710747),
            (ChiSquared { k: 3 }, 1.2, 0.753004311656458),
            (ChiSquared { k: 2 }, 1.2, 0.5488116360940264),
        ];
        for (d, x, want) in cases {
            assert_relative_eq!(d.survival(*x), *want, max_relative = 1e-12);
        }
    }

    #[test]
    fn binary_survival_is_a_step_function() {
        let d = Binary { p: 0.3 };
        assert_eq!(d.survival(-1.0), 1.0);
        assert_eq!(d.survival(0.0), 1.0);
        assert_eq!(d.survival(0.5), 0.3);
        assert_eq!(d.survival(1.0), 0.3);
        assert_eq!(d.survival(1.0001), 0.0);
    }

    #[test]
    fn uniform_and_point_mass_survival() {
        let u = Uniform { lo: 1.0, hi: 3.0 };
        assert_eq!(u.survival(0.5), 1.0);
        assert_eq!(u.survival(2.0), 0.5);
        assert_eq!(u.survival(3.5), 0.0);
        let p = PointMass { c: 2.0 };
        assert_eq!(p.survival(2.0), 1.0);
        assert_eq!(p.survival(2.0000001), 0.0);
    }

    #[test]
    fn moments_match_closed_forms() {
        let cases = [
            (Binary { p: 0.25 }, 0.25, 0.1875),
            (Exponential { rate: 4.0 }, 0.25, 0.0625),
            (ChiSquared { k: 5 }, 5.0, 10.0),
            (Erlang { k: 3, rate: 2.0 }, 1.5, 0.75),
            (Uniform { lo: 0.0, hi: 6.0 }, 3.0, 3.0),
            (PointMass { c: 7.0 }, 7.0, 0.0),
        ];
        for (d, mean, var) in cases {
            assert_relative_eq!(d.mean(), mean, max_relative = 1e-14);
            assert_relative_eq!(d.variance(), var, max_relative = 1e-14);
        }
    }

    #[test]
    fn sample_moments_agree_with_closed_forms() {
        let dists = [
            Binary { p: 0.3 },
            Exponential { rate: 1.5 },
            ChiSquared { k: 4 },
            Erlang { k: 2, rate: 3.0 },
            Uniform { lo: 0.5, hi: 2.5 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in dists {
            let s = d.sampler();
            let n = 200_000;
            let draws: Vec<f64> = (0..n).map(|_| s.draw(&mut rng)).collect();
            assert!(draws.iter().all(|v| *v >= 0.0));
            let mean = draws.iter().sum::<f64>() / n as f64;
            let var = draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let tol = 6.0 * (d.variance() / n as f64).sqrt().max(1e-4);
            assert!((mean - d.mean()).abs() < tol, "{d}: sample mean {mean} vs {}", d.mean());
            assert!(
                (var - d.variance()).abs() < 30.0 * tol,
                "{d}: sample variance {var} vs {}",
                d.variance()
            );
        }
    }

    #[test]
    fn parse_round_trips() {
        for s in ["binary:0.2", "exponential:1", "chisq:3", "erlang:2:3", "uniform:0:1", "pointmass:2.5"] {
            let d: ValueDistribution = s.parse().unwrap();
            let back: ValueDistribution = d.label().parse().unwrap();
            assert_eq!(d, back);
        }
        assert!("binary:1.5".parse::<ValueDistribution>().is_err());
        assert!("erlang:0:1".parse::<ValueDistribution>().is_err());
        assert!("uniform:3:1".parse::<ValueDistribution>().is_err());
        assert!("cauchy:1".parse::<ValueDistribution>().is_err());
    }

    #[test]
    fn survival_is_monotone_on_a_grid() {
        let dists = [
            Binary { p: 0.6 },
            Exponential { rate: 0.7 },
            ChiSquared { k: 3 },
            Erlang { k: 4, rate: 0.5 },
            Uniform { lo: 0.0, hi: 2.0 },
            PointMass { c: 1.0 },
        ];
        for d in dists {
            assert_eq!(d.survival(0.0), 1.0);
            let mut prev = 1.0;
            for i in 0..400 {
                let x = i as f64 * 0.05;
                let s = d.survival(x);
                assert!((0.0..=1.0).contains(&s));
                assert!(s <= prev + 1e-15, "{d}: survival increased at {x}");
                prev = s;
            }
        }
    }
}
