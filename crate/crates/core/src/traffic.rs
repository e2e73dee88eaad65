//! Traffic models: content popularity laws, ON-OFF request processes and
//! their renewal representation.
//!
//! A content alternates between an exponential ON phase (mean `t_on`), during
//! which requests arrive as a Poisson process of rate `lambda`, and an
//! exponential OFF phase (mean `t_off`) with no requests. The resulting
//! request sequence is a renewal process whose inter-request times mix a
//! *short* law (both requests inside one ON period) and a *long* law
//! (crossing at least one OFF period), the latter reduced to an exponential
//! matched on its first moment.

use rand::RngCore;

use crate::error::{Error, Result};
use crate::quad;

/// Draw from Exp(rate) by inverse transform.
fn sample_exp(rate: f64, rng: &mut dyn RngCore) -> f64 {
    let u: f64 = rand::Rng::gen(rng);
    -(1.0 - u).ln() / rate
}

/// Truncated first moment of Exp(rate): ∫₀ᵗ u·rate·e^(-rate·u) du.
fn exp_pm1(rate: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    1.0 / rate - (-rate * t).exp() * (t + 1.0 / rate)
}

/// Truncated second moment of Exp(rate): ∫₀ᵗ u²·rate·e^(-rate·u) du.
fn exp_pm2(rate: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    2.0 / (rate * rate) - (-rate * t).exp() * (t * t + 2.0 * t / rate + 2.0 / (rate * rate))
}

/// Statistics of a nonnegative inter-arrival distribution, all in closed form.
///
/// `age_cdf` is the equilibrium (stationary age) distribution
/// `F̂(t) = (1/mean)·∫₀ᵗ S(u) du`; it equals `cdf` exactly for memoryless
/// laws. The moment generating function is only defined here for `s < 0`,
/// which is the half-line cache formulas evaluate it on.
pub trait ArrivalLaw {
    fn mean(&self) -> f64;
    fn second_moment(&self) -> f64;
    fn cdf(&self, t: f64) -> f64;
    fn survival(&self, t: f64) -> f64 {
        1.0 - self.cdf(t)
    }
    /// ∫₀ᵗ survival(u) du.
    fn integrated_survival(&self, t: f64) -> f64;
    fn age_cdf(&self, t: f64) -> f64 {
        (self.integrated_survival(t) / self.mean()).min(1.0)
    }
    /// E[e^(sX)] for s < 0.
    fn mgf(&self, s: f64) -> Result<f64>;
    /// E[X·e^(sX)] for s < 0.
    fn mgf_deriv(&self, s: f64) -> Result<f64>;
    /// ∫₀ᵗ u dF(u).
    fn partial_moment1(&self, t: f64) -> f64;
    /// ∫₀ᵗ u² dF(u).
    fn partial_moment2(&self, t: f64) -> f64;
    fn sample(&self, rng: &mut dyn RngCore) -> f64;
}

fn check_mgf_domain(s: f64) -> Result<()> {
    if s >= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "mgf is only evaluated for s < 0, got s = {s}"
        )));
    }
    Ok(())
}

/// Families used for short (within-ON) inter-arrival times.
///
/// `Class1` is a shifted exponential: survival 1 on [0, shift] and
/// `e^(-gamma·(t-shift))` beyond. `Class2` mixes Exp(lambda) (weight `q`)
/// with a shifted exponential (weight `1-q`).
#[derive(Debug, Clone, PartialEq)]
pub enum ShortDist {
    Exponential {
        rate: f64,
    },
    Class1 {
        gamma: f64,
        shift: f64,
    },
    Class2 {
        q: f64,
        lambda: f64,
        gamma: f64,
        shift: f64,
    },
}

impl ShortDist {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            ShortDist::Exponential { rate } => {
                if !(rate > 0.0 && rate.is_finite()) {
                    return bad(format!("exponential rate must be positive, got {rate}"));
                }
            }
            ShortDist::Class1 { gamma, shift } => {
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return bad(format!("class1 gamma must be positive, got {gamma}"));
                }
                if !(shift >= 0.0 && shift.is_finite()) {
                    return bad(format!("class1 shift must be nonnegative, got {shift}"));
                }
            }
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                if !(0.0..=1.0).contains(&q) {
                    return bad(format!("class2 q must be in [0,1], got {q}"));
                }
                if !(lambda > 0.0 && gamma > 0.0 && shift >= 0.0) {
                    return bad(format!(
                        "class2 rates must be positive and shift nonnegative: \
                         lambda={lambda} gamma={gamma} shift={shift}"
                    ));
                }
            }
        }
        Ok(())
    }
}

impl ArrivalLaw for ShortDist {
    fn mean(&self) -> f64 {
        match *self {
            ShortDist::Exponential { rate } => 1.0 / rate,
            ShortDist::Class1 { gamma, shift } => shift + 1.0 / gamma,
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => q / lambda + (1.0 - q) * (shift + 1.0 / gamma),
        }
    }

    fn second_moment(&self) -> f64 {
        match *self {
            ShortDist::Exponential { rate } => 2.0 / (rate * rate),
            ShortDist::Class1 { gamma, shift } => {
                shift * shift + 2.0 * shift / gamma + 2.0 / (gamma * gamma)
            }
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                q * 2.0 / (lambda * lambda)
                    + (1.0 - q) * (shift * shift + 2.0 * shift / gamma + 2.0 / (gamma * gamma))
            }
        }
    }

    fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            ShortDist::Exponential { rate } => -(-rate * t).exp_m1(),
            ShortDist::Class1 { gamma, shift } => {
                if t <= shift {
                    0.0
                } else {
                    -(-gamma * (t - shift)).exp_m1()
                }
            }
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                let exp_part = -(-lambda * t).exp_m1();
                let shifted = if t <= shift {
                    0.0
                } else {
                    -(-gamma * (t - shift)).exp_m1()
                };
                q * exp_part + (1.0 - q) * shifted
            }
        }
    }

    fn integrated_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            ShortDist::Exponential { rate } => (1.0 - (-rate * t).exp()) / rate,
            ShortDist::Class1 { gamma, shift } => {
                if t <= shift {
                    t
                } else {
                    shift + (1.0 - (-gamma * (t - shift)).exp()) / gamma
                }
            }
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                let exp_part = (1.0 - (-lambda * t).exp()) / lambda;
                let shifted = if t <= shift {
                    t
                } else {
                    shift + (1.0 - (-gamma * (t - shift)).exp()) / gamma
                };
                q * exp_part + (1.0 - q) * shifted
            }
        }
    }

    fn mgf(&self, s: f64) -> Result<f64> {
        check_mgf_domain(s)?;
        Ok(match *self {
            ShortDist::Exponential { rate } => rate / (rate - s),
            ShortDist::Class1 { gamma, shift } => (s * shift).exp() * gamma / (gamma - s),
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                q * lambda / (lambda - s) + (1.0 - q) * (s * shift).exp() * gamma / (gamma - s)
            }
        })
    }

    fn mgf_deriv(&self, s: f64) -> Result<f64> {
        check_mgf_domain(s)?;
        fn exp_d(rate: f64, s: f64) -> f64 {
            rate / ((rate - s) * (rate - s))
        }
        fn class1_d(gamma: f64, shift: f64, s: f64) -> f64 {
            (s * shift).exp() * (shift * gamma / (gamma - s) + gamma / ((gamma - s) * (gamma - s)))
        }
        Ok(match *self {
            ShortDist::Exponential { rate } => exp_d(rate, s),
            ShortDist::Class1 { gamma, shift } => class1_d(gamma, shift, s),
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => q * exp_d(lambda, s) + (1.0 - q) * class1_d(gamma, shift, s),
        })
    }

    fn partial_moment1(&self, t: f64) -> f64 {
        match *self {
            ShortDist::Exponential { rate } => exp_pm1(rate, t),
            ShortDist::Class1 { gamma, shift } => {
                if t <= shift {
                    0.0
                } else {
                    let tau = t - shift;
                    exp_pm1(gamma, tau) + shift * (1.0 - (-gamma * tau).exp())
                }
            }
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                let shifted = if t <= shift {
                    0.0
                } else {
                    let tau = t - shift;
                    exp_pm1(gamma, tau) + shift * (1.0 - (-gamma * tau).exp())
                };
                q * exp_pm1(lambda, t) + (1.0 - q) * shifted
            }
        }
    }

    fn partial_moment2(&self, t: f64) -> f64 {
        // For the shifted component, ∫ (w+shift)² dF_exp(w) expands into
        // the exponential partial moments.
        fn class1_pm2(gamma: f64, shift: f64, t: f64) -> f64 {
            if t <= shift {
                return 0.0;
            }
            let tau = t - shift;
            exp_pm2(gamma, tau)
                + 2.0 * shift * exp_pm1(gamma, tau)
                + shift * shift * (1.0 - (-gamma * tau).exp())
        }
        match *self {
            ShortDist::Exponential { rate } => exp_pm2(rate, t),
            ShortDist::Class1 { gamma, shift } => class1_pm2(gamma, shift, t),
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => q * exp_pm2(lambda, t) + (1.0 - q) * class1_pm2(gamma, shift, t),
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        match *self {
            ShortDist::Exponential { rate } => sample_exp(rate, rng),
            ShortDist::Class1 { gamma, shift } => shift + sample_exp(gamma, rng),
            ShortDist::Class2 {
                q,
                lambda,
                gamma,
                shift,
            } => {
                let u: f64 = rand::Rng::gen(rng);
                if u < q {
                    sample_exp(lambda, rng)
                } else {
                    shift + sample_exp(gamma, rng)
                }
            }
        }
    }
}

/// Per-content inter-request law: with probability `p_short` the interval
/// stays inside one ON period (law `short`), otherwise it spans at least one
/// OFF period (exponential with mean `long_mean`).
///
/// `p_short == 1` denotes the single-phase (plain renewal) special case; a
/// Poisson content stream is `TwoPhaseRenewal::single_phase(Exponential)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseRenewal {
    p_short: f64,
    short: ShortDist,
    long_mean: f64,
}

impl TwoPhaseRenewal {
    pub fn new(p_short: f64, short: ShortDist, long_mean: f64) -> Result<Self> {
        short.validate()?;
        if !(0.0..1.0).contains(&p_short) {
            return Err(Error::InvalidParameter(format!(
                "p_short must be in [0,1), got {p_short}"
            )));
        }
        if !(long_mean > short.mean()) {
            return Err(Error::InvalidParameter(format!(
                "long_mean ({long_mean}) must exceed the short mean ({})",
                short.mean()
            )));
        }
        Ok(Self {
            p_short,
            short,
            long_mean,
        })
    }

    /// Plain renewal process, no OFF phase.
    pub fn single_phase(short: ShortDist) -> Result<Self> {
        short.validate()?;
        Ok(Self {
            p_short: 1.0,
            short,
            long_mean: f64::INFINITY,
        })
    }

    pub fn p_short(&self) -> f64 {
        self.p_short
    }

    pub fn short(&self) -> &ShortDist {
        &self.short
    }

    pub fn long_mean(&self) -> f64 {
        self.long_mean
    }

    /// Long-run arrival rate, 1/mean.
    pub fn rate(&self) -> f64 {
        1.0 / self.mean()
    }

    fn long_weight(&self) -> f64 {
        1.0 - self.p_short
    }
}

impl ArrivalLaw for TwoPhaseRenewal {
    fn mean(&self) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.mean()
        } else {
            self.p_short * self.short.mean() + w * self.long_mean
        }
    }

    fn second_moment(&self) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.second_moment()
        } else {
            self.p_short * self.short.second_moment()
                + w * 2.0 * self.long_mean * self.long_mean
        }
    }

    fn cdf(&self, t: f64) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.cdf(t)
        } else {
            let long = if t <= 0.0 {
                0.0
            } else {
                -(-t / self.long_mean).exp_m1()
            };
            self.p_short * self.short.cdf(t) + w * long
        }
    }

    fn integrated_survival(&self, t: f64) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.integrated_survival(t)
        } else {
            let long = if t <= 0.0 {
                0.0
            } else {
                self.long_mean * (1.0 - (-t / self.long_mean).exp())
            };
            self.p_short * self.short.integrated_survival(t) + w * long
        }
    }

    fn mgf(&self, s: f64) -> Result<f64> {
        check_mgf_domain(s)?;
        let w = self.long_weight();
        let short = self.short.mgf(s)?;
        if w == 0.0 {
            Ok(short)
        } else {
            Ok(self.p_short * short + w / (1.0 - s * self.long_mean))
        }
    }

    fn mgf_deriv(&self, s: f64) -> Result<f64> {
        check_mgf_domain(s)?;
        let w = self.long_weight();
        let short = self.short.mgf_deriv(s)?;
        if w == 0.0 {
            Ok(short)
        } else {
            let d = 1.0 - s * self.long_mean;
            Ok(self.p_short * short + w * self.long_mean / (d * d))
        }
    }

    fn partial_moment1(&self, t: f64) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.partial_moment1(t)
        } else {
            self.p_short * self.short.partial_moment1(t) + w * exp_pm1(1.0 / self.long_mean, t)
        }
    }

    fn partial_moment2(&self, t: f64) -> f64 {
        let w = self.long_weight();
        if w == 0.0 {
            self.short.partial_moment2(t)
        } else {
            self.p_short * self.short.partial_moment2(t) + w * exp_pm2(1.0 / self.long_mean, t)
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u: f64 = rand::Rng::gen(rng);
        if u < self.p_short {
            self.short.sample(rng)
        } else {
            sample_exp(1.0 / self.long_mean, rng)
        }
    }
}

/// Renewal representation of an ON-OFF modulated Poisson content stream.
///
/// The short phase is Exp(lambda + 1/t_on): inside an ON period the next
/// event is either a request or the end of the period, whichever fires
/// first. Each request is followed by another request in the same ON period
/// with probability `lambda/(lambda + 1/t_on)` (the per-ON request count is
/// geometric). The long mean follows from renewal-reward: the weighted phase
/// means must reproduce the long-run rate `lambda·t_on/(t_on + t_off)`.
pub fn onoff_to_renewal(lambda: f64, t_on: f64, t_off: f64) -> Result<TwoPhaseRenewal> {
    if !(lambda > 0.0 && t_on > 0.0 && t_off > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "onoff_to_renewal requires positive arguments, got \
             lambda={lambda} t_on={t_on} t_off={t_off}"
        )));
    }
    let p_short = lambda * t_on / (lambda * t_on + 1.0);
    let short = ShortDist::Exponential {
        rate: lambda + 1.0 / t_on,
    };
    let mean_inter = (t_on + t_off) / (lambda * t_on);
    let long_mean = (mean_inter - p_short * short.mean()) / (1.0 - p_short);
    TwoPhaseRenewal::new(p_short, short, long_mean)
}

/// Content popularity law for the per-content request volume `V` (mean
/// requests per ON period), or, for `Zipf`, directly for the per-content
/// Poisson rates of a stationary (IRM-style) class.
#[derive(Debug, Clone, PartialEq)]
pub enum PopularityLaw {
    /// Density beta·v_min^beta / v^(1+beta) on [v_min, v_max].
    Pareto {
        beta: f64,
        v_min: f64,
        v_max: Option<f64>,
    },
    /// Rank-m rate: total_rate · m^(-alpha) / H, H the generalized harmonic
    /// number over the catalogue. Classes using this law are stationary
    /// Poisson; their `t_on`/`t_off` are ignored.
    Zipf {
        alpha: f64,
        catalogue: u64,
        total_rate: f64,
    },
    Degenerate {
        v: f64,
    },
}

impl PopularityLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PopularityLaw::Pareto { beta, v_min, v_max } => {
                if !(beta > 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "pareto beta must exceed 1 for a finite mean, got {beta}"
                    )));
                }
                if !(v_min > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "pareto v_min must be positive, got {v_min}"
                    )));
                }
                if let Some(vm) = v_max {
                    if !(vm > v_min) {
                        return Err(Error::InvalidParameter(format!(
                            "pareto v_max ({vm}) must exceed v_min ({v_min})"
                        )));
                    }
                }
            }
            PopularityLaw::Zipf {
                alpha, catalogue, ..
            } => {
                if !(alpha >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "zipf alpha must be nonnegative, got {alpha}"
                    )));
                }
                if catalogue < 1 {
                    return Err(Error::InvalidParameter(
                        "zipf catalogue must be at least 1".into(),
                    ));
                }
            }
            PopularityLaw::Degenerate { v } => {
                if !(v > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "degenerate volume must be positive, got {v}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// E[V] (or the mean per-content rate, for Zipf).
    pub fn mean(&self) -> f64 {
        match *self {
            PopularityLaw::Pareto { beta, v_min, v_max } => match v_max {
                None => v_min * beta / (beta - 1.0),
                Some(vm) => truncated_pareto_mean(beta, v_min, vm),
            },
            PopularityLaw::Zipf {
                catalogue,
                total_rate,
                ..
            } => total_rate / catalogue as f64,
            PopularityLaw::Degenerate { v } => v,
        }
    }

    /// E[g(V)] over the law, to 1e-8 relative for the continuous variants.
    ///
    /// The Pareto integral is evaluated after the substitution
    /// u = (v_min/v)^beta, which maps the tail onto a bounded interval where
    /// the integrand is smooth; Gauss-Legendre nodes are doubled from 64
    /// until successive estimates agree.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut g: F) -> Result<f64> {
        match *self {
            PopularityLaw::Degenerate { v } => Ok(g(v)),
            PopularityLaw::Pareto { beta, v_min, v_max } => {
                let u_lo = match v_max {
                    None => 0.0,
                    Some(vm) => (v_min / vm).powf(beta),
                };
                let integral =
                    quad::adaptive(|u| g(v_min * u.powf(-1.0 / beta)), u_lo, 1.0, 1e-8)?;
                Ok(integral / (1.0 - u_lo))
            }
            PopularityLaw::Zipf {
                alpha,
                catalogue,
                total_rate,
            } => {
                let h: f64 = (1..=catalogue).map(|m| (m as f64).powf(-alpha)).sum();
                let sum: f64 = (1..=catalogue)
                    .map(|m| g(total_rate * (m as f64).powf(-alpha) / h))
                    .sum();
                Ok(sum / catalogue as f64)
            }
        }
    }

    /// Volume (or rate) assigned to the `idx`-th content of a class.
    /// Continuous laws sample; Zipf assigns by rank.
    pub fn volume_for_content(&self, idx: u64, rng: &mut dyn RngCore) -> f64 {
        match *self {
            PopularityLaw::Pareto { beta, v_min, v_max } => {
                let u_lo = match v_max {
                    None => 0.0,
                    Some(vm) => (v_min / vm).powf(beta),
                };
                // Survival (v_min/v)^beta is uniform; condition on [u_lo, 1].
                let u: f64 = rand::Rng::gen(rng);
                let u = u_lo + (1.0 - u_lo) * (1.0 - u).max(f64::MIN_POSITIVE);
                v_min * u.powf(-1.0 / beta)
            }
            PopularityLaw::Zipf {
                alpha,
                catalogue,
                total_rate,
            } => {
                let h: f64 = (1..=catalogue).map(|m| (m as f64).powf(-alpha)).sum();
                let rank = (idx % catalogue) + 1;
                total_rate * (rank as f64).powf(-alpha) / h
            }
            PopularityLaw::Degenerate { v } => v,
        }
    }

    pub fn is_stationary_poisson(&self) -> bool {
        matches!(self, PopularityLaw::Zipf { .. })
    }
}

fn truncated_pareto_mean(beta: f64, v_min: f64, v_max: f64) -> f64 {
    let z = 1.0 - (v_min / v_max).powf(beta);
    (beta / (beta - 1.0)) * (v_min - v_min.powf(beta) * v_max.powf(1.0 - beta)) / z
}

/// Build a Pareto law with the requested mean.
///
/// Without truncation `v_min = mean·(beta-1)/beta` in closed form. With a
/// truncation point the mean equation is inverted by bisection on `v_min`
/// (the truncated mean grows monotonically from 0 to `v_max` as `v_min`
/// sweeps (0, v_max)).
pub fn pareto_with_mean(mean: f64, beta: f64, v_max: Option<f64>) -> Result<PopularityLaw> {
    if !(beta > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "pareto beta must exceed 1, got {beta}"
        )));
    }
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pareto mean must be positive, got {mean}"
        )));
    }
    let law = match v_max {
        None => PopularityLaw::Pareto {
            beta,
            v_min: mean * (beta - 1.0) / beta,
            v_max: None,
        },
        Some(vm) => {
            if mean >= vm {
                return Err(Error::NoSolution(format!(
                    "no v_min < v_max achieves mean {mean} with truncation at {vm}"
                )));
            }
            let mut lo = mean * 1e-12;
            let mut hi = vm * (1.0 - 1e-12);
            if truncated_pareto_mean(beta, lo, vm) > mean {
                return Err(Error::NoSolution(format!(
                    "requested mean {mean} is below the attainable range"
                )));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let m = truncated_pareto_mean(beta, mid, vm);
                if m < mean {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (m - mean).abs() <= 1e-12 * mean && (hi - lo) <= 1e-12 * mid {
                    break;
                }
            }
            PopularityLaw::Pareto {
                beta,
                v_min: 0.5 * (lo + hi),
                v_max: Some(vm),
            }
        }
    };
    law.validate()?;
    Ok(law)
}

/// Catalogue size making a stationary ON-OFF population carry the same mean
/// number of active contents as a shot-noise stream of rate `gamma_rate`
/// with rectangular shots of duration `life_span`:
/// gamma·L = M·T_ON/(T_ON + T_OFF) with T_ON = L.
pub fn snm_equivalent_catalogue(gamma_rate: f64, life_span: f64, t_off: f64) -> Result<u64> {
    if !(gamma_rate > 0.0 && life_span > 0.0 && t_off > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "snm_equivalent_catalogue requires positive arguments, got \
             gamma_rate={gamma_rate} life_span={life_span} t_off={t_off}"
        )));
    }
    let m = gamma_rate * life_span * (life_span + t_off) / life_span;
    if !(m.is_finite() && m < 2f64.powi(63)) {
        return Err(Error::InvalidParameter(format!(
            "equivalent catalogue {m:.3e} is not representable"
        )));
    }
    Ok(m.round() as u64)
}

/// A catalogue segment with homogeneous dynamics.
#[derive(Debug, Clone)]
pub struct ContentClass {
    pub label: String,
    /// Mean ON duration; equals the content life-span.
    pub t_on: f64,
    pub t_off: f64,
    pub popularity: PopularityLaw,
    pub class_catalogue: u64,
    /// Admission filter: non-cacheable classes always miss and occupy nothing.
    pub cacheable: bool,
}

impl ContentClass {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_on > 0.0 && self.t_off > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "class `{}`: t_on and t_off must be positive",
                self.label
            )));
        }
        self.popularity.validate()
    }

    /// Inter-request law of a content with volume (or rate) `v` at one
    /// ingress point.
    pub fn content_law(&self, v: f64) -> Result<TwoPhaseRenewal> {
        if self.popularity.is_stationary_poisson() {
            TwoPhaseRenewal::single_phase(ShortDist::Exponential { rate: v })
        } else {
            onoff_to_renewal(v / self.t_on, self.t_on, self.t_off)
        }
    }

    /// Long-run request rate of a content with volume (or rate) `v`.
    pub fn long_run_rate(&self, v: f64) -> f64 {
        if self.popularity.is_stationary_poisson() {
            v
        } else {
            v / (self.t_on + self.t_off)
        }
    }

    /// ON-phase request intensity of a content with volume (or rate) `v`.
    pub fn on_rate(&self, v: f64) -> f64 {
        if self.popularity.is_stationary_poisson() {
            v
        } else {
            v / self.t_on
        }
    }
}

/// The full workload: classes plus the number of ingress (leaf) caches.
#[derive(Debug, Clone)]
pub struct TrafficMix {
    pub classes: Vec<ContentClass>,
    pub ingress_count: u64,
}

impl TrafficMix {
    pub fn validate(&self) -> Result<()> {
        for c in &self.classes {
            c.validate()?;
        }
        if self.total_catalogue() == 0 {
            return Err(Error::InvalidParameter(
                "traffic mix must have a positive total catalogue".into(),
            ));
        }
        if self.ingress_count == 0 {
            return Err(Error::InvalidParameter(
                "traffic mix needs at least one ingress point".into(),
            ));
        }
        Ok(())
    }

    pub fn total_catalogue(&self) -> u64 {
        self.classes.iter().map(|c| c.class_catalogue).sum()
    }

    pub fn cacheable_catalogue(&self) -> u64 {
        self.classes
            .iter()
            .filter(|c| c.cacheable)
            .map(|c| c.class_catalogue)
            .sum()
    }

    /// The ON-OFF reduction needs OFF periods well above the cache eviction
    /// time. Returns one warning per class violating the 10x margin.
    pub fn check_off_separation(&self, eviction_estimate: f64) -> Vec<String> {
        self.classes
            .iter()
            .filter(|c| !c.popularity.is_stationary_poisson())
            .filter(|c| c.t_off < 10.0 * eviction_estimate)
            .map(|c| {
                format!(
                    "class `{}`: t_off = {} is below 10x the eviction time estimate {:.4}; \
                     the renewal reduction degrades in this regime",
                    c.label, c.t_off, eviction_estimate
                )
            })
            .collect()
    }
}
