//! Single-cache analytical engine.
//!
//! The eviction time `T_C` is treated as a content-independent constant
//! (random with exponential law for RANDOM), which decouples contents: each
//! content becomes an independent renewal-input single-server problem. The
//! capacity constraint `C = Σ_m p_in(m)` then pins `T_C` by bisection, since
//! expected occupancy grows monotonically with the eviction parameter.

use crate::error::{Error, Result};
use crate::traffic::{ArrivalLaw, PopularityLaw, TrafficMix};

/// Replacement/insertion policy of one cache.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    Lru,
    /// LRU eviction, insertion on miss only with probability `q`.
    QLru { q: f64 },
    Random,
    /// Physical LRU cache guarded by an ID-only virtual LRU cache of the
    /// same capacity that gates insertion.
    TwoLru,
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        if let Policy::QLru { q } = *self {
            if !(q > 0.0 && q <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "q-LRU insertion probability must be in (0,1], got {q}"
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            Policy::Lru => "lru".into(),
            Policy::QLru { q } => format!("qlru({q})"),
            Policy::Random => "random".into(),
            Policy::TwoLru => "2lru".into(),
        }
    }
}

/// Solved eviction characteristics of one cache.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvictionParams {
    /// LRU and q-LRU: fixed eviction time.
    Deterministic { t_c: f64 },
    /// 2-LRU: virtual-cache and physical-cache eviction times.
    DeterministicPair { t_c1: f64, t_c2: f64 },
    /// RANDOM: the sojourn is exponential with this mean.
    ExponentialMean { mean_t_c: f64 },
}

impl EvictionParams {
    /// Representative time scale, used for validity warnings.
    pub fn time_scale(&self) -> f64 {
        match *self {
            EvictionParams::Deterministic { t_c } => t_c,
            EvictionParams::DeterministicPair { t_c1, t_c2 } => t_c1.max(t_c2),
            EvictionParams::ExponentialMean { mean_t_c } => mean_t_c,
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.time_scale().is_infinite()
    }
}

/// Hit probability seen by arriving requests and time-average occupancy
/// probability of one content.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HitStats {
    pub p_hit: f64,
    pub p_in: f64,
}

/// LRU: a request hits iff the previous one arrived within `t_c`; the
/// time-average presence uses the age distribution instead.
pub fn hit_lru(law: &dyn ArrivalLaw, t_c: f64) -> HitStats {
    HitStats {
        p_hit: law.cdf(t_c),
        p_in: law.age_cdf(t_c),
    }
}

/// q-LRU: the implicit equation p_hit = F·[p_hit + q(1-p_hit)] solved in
/// closed form. The denominator is positive whenever F < 1 or q > 0.
pub fn hit_qlru(law: &dyn ArrivalLaw, t_c: f64, q: f64) -> HitStats {
    let f = law.cdf(t_c);
    let p_hit = q * f / (1.0 - f * (1.0 - q));
    let p_in = law.age_cdf(t_c) * (p_hit + q * (1.0 - p_hit));
    HitStats { p_hit, p_in }
}

/// RANDOM: content sojourn is Exp(1/mean_t_c); the hit probability is the
/// loss probability of the corresponding G/M/1/0 queue, `M(-1/E[T_C])`, and
/// occupancy follows from cycle analysis of the regenerative process.
pub fn hit_random(law: &dyn ArrivalLaw, mean_t_c: f64) -> HitStats {
    let p_hit = law
        .mgf(-1.0 / mean_t_c)
        .expect("mean_t_c > 0 keeps the mgf argument negative");
    let p_in = mean_t_c / law.mean() * (1.0 - p_hit);
    HitStats { p_hit, p_in }
}

/// 2-LRU: assuming virtual and physical cache states independent,
/// p_hit = F₂·[p_hit + F₁(1-p_hit)] solved in closed form.
pub fn hit_2lru(law: &dyn ArrivalLaw, t_c1: f64, t_c2: f64) -> HitStats {
    let f1 = law.cdf(t_c1);
    let f2 = law.cdf(t_c2);
    let p_hit = f2 * f1 / (1.0 - f2 * (1.0 - f1));
    let p_in = law.age_cdf(t_c2) * (p_hit + f1 * (1.0 - p_hit));
    HitStats { p_hit, p_in }
}

/// Dispatch the per-policy formula; the eviction variant must match the
/// policy.
pub fn policy_hit(policy: &Policy, law: &dyn ArrivalLaw, ev: &EvictionParams) -> Result<HitStats> {
    match (policy, ev) {
        (Policy::Lru, EvictionParams::Deterministic { t_c }) => Ok(hit_lru(law, *t_c)),
        (Policy::QLru { q }, EvictionParams::Deterministic { t_c }) => {
            Ok(hit_qlru(law, *t_c, *q))
        }
        (Policy::Random, EvictionParams::ExponentialMean { mean_t_c }) => {
            Ok(hit_random(law, *mean_t_c))
        }
        (Policy::TwoLru, EvictionParams::DeterministicPair { t_c1, t_c2 }) => {
            Ok(hit_2lru(law, *t_c1, *t_c2))
        }
        _ => Err(Error::InvalidParameter(format!(
            "eviction parameters {ev:?} do not match policy {policy:?}"
        ))),
    }
}

/// Expectation over a popularity law of a fallible integrand.
pub(crate) fn try_expect<F>(law: &PopularityLaw, mut g: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut first_err: Option<Error> = None;
    let out = law.expect(|v| match g(v) {
        Ok(x) => x,
        Err(e) => {
            if first_err.is_none() {
                first_err = Some(e);
            }
            0.0
        }
    });
    if let Some(e) = first_err {
        return Err(e);
    }
    out
}

/// Expected number of cached objects under the given eviction parameters:
/// Σ over classes of catalogue · E_V[p_in(V)]. Non-cacheable classes
/// occupy nothing.
pub fn expected_occupancy(policy: &Policy, mix: &TrafficMix, ev: &EvictionParams) -> Result<f64> {
    let mut total = 0.0;
    for class in &mix.classes {
        if !class.cacheable || class.class_catalogue == 0 {
            continue;
        }
        let mean_in = try_expect(&class.popularity, |v| {
            let law = class.content_law(v)?;
            Ok(policy_hit(policy, &law, ev)?.p_in)
        })?;
        total += class.class_catalogue as f64 * mean_in;
    }
    Ok(total)
}

/// Solve `occ(x) = target` for a nondecreasing map. The upper bracket starts
/// at `hint` and doubles until occupancy exceeds the target.
pub(crate) fn solve_monotone<F>(mut occ: F, target: f64, hint: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let mut hi = hint.max(1e-12);
    let mut grow = 0;
    while occ(hi)? < target {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::Numerical(format!(
                "bracket expansion failed: occupancy stalled below target {target}"
            )));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let o = occ(mid)?;
        if (o - target).abs() <= 1e-6 * target {
            return Ok(mid);
        }
        if o < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let residual = (occ(mid)? - target).abs() / target;
    Err(Error::Numerical(format!(
        "eviction fixed point did not converge: relative residual {residual:.3e}"
    )))
}

/// Solved single-cache result.
#[derive(Debug, Clone)]
pub struct CacheSolveResult {
    pub eviction: EvictionParams,
    /// Fraction of requests served from the cache (request-weighted).
    pub phit_overall: f64,
    /// Plain per-content average of p_hit, exposed as a secondary view.
    pub phit_unweighted: f64,
    /// Request-weighted hit probability per class, in mix order.
    pub phit_by_class: Vec<f64>,
    /// |achieved occupancy - capacity| / capacity at the returned parameters.
    pub occupancy_residual: f64,
    pub warnings: Vec<String>,
}

impl CacheSolveResult {
    pub fn is_saturated(&self) -> bool {
        self.eviction.is_saturated()
    }
}

fn bracket_hint(mix: &TrafficMix) -> f64 {
    // Mean inter-request time of an average content of the fastest class.
    mix.classes
        .iter()
        .filter(|c| c.cacheable && c.class_catalogue > 0)
        .map(|c| 1.0 / c.on_rate(c.popularity.mean()))
        .fold(f64::INFINITY, f64::min)
        .min(1e12)
        .max(1e-12)
}

/// Solve the capacity fixed point for one cache fed directly by the mix.
///
/// Saturated instances (capacity at or above the cacheable catalogue) return
/// the +infinity eviction sentinel with every cacheable content resident.
pub fn solve_eviction_time(
    policy: &Policy,
    mix: &TrafficMix,
    capacity: u64,
) -> Result<CacheSolveResult> {
    policy.validate()?;
    mix.validate()?;
    if capacity == 0 {
        return Err(Error::InvalidParameter(
            "capacity must be positive; zero-capacity nodes are handled by the network layer"
                .into(),
        ));
    }
    let cacheable = mix.cacheable_catalogue();
    if capacity >= cacheable {
        let eviction = match policy {
            Policy::Random => EvictionParams::ExponentialMean {
                mean_t_c: f64::INFINITY,
            },
            Policy::TwoLru => EvictionParams::DeterministicPair {
                t_c1: f64::INFINITY,
                t_c2: f64::INFINITY,
            },
            _ => EvictionParams::Deterministic { t_c: f64::INFINITY },
        };
        let mut result = summarize(policy, mix, &eviction, capacity as f64, true)?;
        result
            .warnings
            .push("capacity covers the whole cacheable catalogue; cache is saturated".into());
        return Ok(result);
    }

    let target = capacity as f64;
    let hint = bracket_hint(mix);
    let eviction = match policy {
        Policy::Lru | Policy::QLru { .. } => {
            let t_c = solve_monotone(
                |t| expected_occupancy(policy, mix, &EvictionParams::Deterministic { t_c: t }),
                target,
                hint,
            )?;
            EvictionParams::Deterministic { t_c }
        }
        Policy::Random => {
            let mean_t_c = solve_monotone(
                |t| {
                    expected_occupancy(policy, mix, &EvictionParams::ExponentialMean {
                        mean_t_c: t,
                    })
                },
                target,
                hint,
            )?;
            EvictionParams::ExponentialMean { mean_t_c }
        }
        Policy::TwoLru => {
            // The virtual cache is a plain LRU over IDs fed by the raw
            // request stream; both caches share the capacity value.
            let t_c1 = solve_monotone(
                |t| {
                    expected_occupancy(&Policy::Lru, mix, &EvictionParams::Deterministic {
                        t_c: t,
                    })
                },
                target,
                hint,
            )?;
            let t_c2 = solve_monotone(
                |t| {
                    expected_occupancy(policy, mix, &EvictionParams::DeterministicPair {
                        t_c1,
                        t_c2: t,
                    })
                },
                target,
                hint,
            )?;
            EvictionParams::DeterministicPair { t_c1, t_c2 }
        }
    };
    summarize(policy, mix, &eviction, target, false)
}

fn summarize(
    policy: &Policy,
    mix: &TrafficMix,
    eviction: &EvictionParams,
    capacity: f64,
    saturated: bool,
) -> Result<CacheSolveResult> {
    let mut hit_rate = 0.0; // Σ M_c E[r(v) p_hit(v)]
    let mut req_rate = 0.0; // Σ M_c E[r(v)]
    let mut phit_sum = 0.0; // Σ M_c E[p_hit(v)]
    let mut contents = 0.0;
    let mut by_class = Vec::with_capacity(mix.classes.len());
    for class in &mix.classes {
        let den = try_expect(&class.popularity, |v| Ok(class.long_run_rate(v)))?;
        let m = class.class_catalogue as f64;
        if !class.cacheable || class.class_catalogue == 0 {
            by_class.push(0.0);
            req_rate += m * den;
            contents += m;
            continue;
        }
        let (num, mean_hit) = if saturated {
            (den, 1.0)
        } else {
            let num = try_expect(&class.popularity, |v| {
                let law = class.content_law(v)?;
                Ok(class.long_run_rate(v) * policy_hit(policy, &law, eviction)?.p_hit)
            })?;
            let mean_hit = try_expect(&class.popularity, |v| {
                let law = class.content_law(v)?;
                Ok(policy_hit(policy, &law, eviction)?.p_hit)
            })?;
            (num, mean_hit)
        };
        by_class.push(if den > 0.0 { num / den } else { 0.0 });
        hit_rate += m * num;
        req_rate += m * den;
        phit_sum += m * mean_hit;
        contents += m;
    }
    let residual = if saturated {
        0.0
    } else {
        (expected_occupancy(policy, mix, eviction)? - capacity).abs() / capacity
    };
    let warnings = mix.check_off_separation(eviction.time_scale());
    Ok(CacheSolveResult {
        eviction: *eviction,
        phit_overall: if req_rate > 0.0 { hit_rate / req_rate } else { 0.0 },
        phit_unweighted: if contents > 0.0 { phit_sum / contents } else { 0.0 },
        phit_by_class: by_class,
        occupancy_residual: residual,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traffic::{onoff_to_renewal, ContentClass, ShortDist, TwoPhaseRenewal};

    fn exp_law(rate: f64) -> TwoPhaseRenewal {
        TwoPhaseRenewal::single_phase(ShortDist::Exponential { rate }).unwrap()
    }

    fn one_class_mix(class: ContentClass) -> TrafficMix {
        TrafficMix {
            classes: vec![class],
            ingress_count: 1,
        }
    }

    #[test]
    fn lru_memoryless() {
        let law = exp_law(1.0);
        let h = hit_lru(&law, 2.0f64.ln());
        assert!((h.p_hit - 0.5).abs() < 1e-12);
        assert!((h.p_in - 0.5).abs() < 1e-12);
        // IRM reduction: p_hit = 1 - e^{-lambda T_C} exactly.
        for (rate, t) in [(0.3, 1.0), (2.0, 0.7), (1.0, 10.0)] {
            let law = exp_law(rate);
            let h = hit_lru(&law, t);
            assert!((h.p_hit - (1.0 - (-rate * t).exp())).abs() < 1e-12);
        }
        // cdf limit.
        let law = onoff_to_renewal(1.0, 7.0, 63.0).unwrap();
        assert!(hit_lru(&law, 1e9).p_hit > 1.0 - 1e-6);
    }

    #[test]
    fn qlru_closed_form() {
        let law = exp_law(1.0);
        let t = 2.0f64.ln(); // F = 0.5
        let h = hit_qlru(&law, t, 0.1);
        assert!((h.p_hit - 0.05 / 0.55).abs() < 1e-12);
        // Back-substitution into the implicit equation.
        let f = law.cdf(t);
        let resid = h.p_hit - f * (h.p_hit + 0.1 * (1.0 - h.p_hit));
        assert!(resid.abs() <= 1e-12);
        // q = 1 reduces to LRU.
        let h1 = hit_qlru(&law, t, 1.0);
        assert!((h1.p_hit - hit_lru(&law, t).p_hit).abs() < 1e-15);
        assert!((h1.p_in - hit_lru(&law, t).p_in).abs() < 1e-15);
    }

    #[test]
    fn qlru_implicit_equation_randomized() {
        // The closed form must satisfy the implicit equation for any law.
        let law = onoff_to_renewal(2.0, 3.0, 30.0).unwrap();
        for t in [0.1, 0.5, 2.0, 10.0] {
            for q in [0.05, 0.25, 0.9] {
                let h = hit_qlru(&law, t, q);
                let f = law.cdf(t);
                assert!((h.p_hit - f * (h.p_hit + q * (1.0 - h.p_hit))).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn random_g_m_1_0() {
        let law = exp_law(1.0);
        let h = hit_random(&law, 1.0);
        // M/M/1/0 loss = lambda / (lambda + mu).
        assert!((h.p_hit - 0.5).abs() < 1e-12);
        assert!((h.p_in - 0.5).abs() < 1e-12);
        // mgf(0-) -> 1.
        assert!(hit_random(&law, 1e12).p_hit > 1.0 - 1e-9);
    }

    #[test]
    fn two_lru_closed_form() {
        let law = exp_law(1.0);
        let t = 2.0f64.ln(); // F = 0.5 at both caches
        let h = hit_2lru(&law, t, t);
        assert!((h.p_hit - 1.0 / 3.0).abs() < 1e-12);
        let f1 = law.cdf(t);
        let f2 = f1;
        assert!((h.p_hit - f2 * (h.p_hit + f1 * (1.0 - h.p_hit))).abs() <= 1e-12);
        // F1 -> 1 reduces to LRU on the physical cache.
        let h = hit_2lru(&law, 1e9, t);
        assert!((h.p_hit - law.cdf(t)).abs() < 1e-9);
        // F2 = 0 kills every hit.
        let h = hit_2lru(&law, t, 0.0);
        assert_eq!(h.p_hit, 0.0);
    }

    #[test]
    fn occupancy_point_mass() {
        let class = ContentClass {
            label: "c".into(),
            t_on: 1.0,
            t_off: 9.0,
            popularity: PopularityLaw::Degenerate { v: 10.0 },
            class_catalogue: 1000,
            cacheable: true,
        };
        let mix = one_class_mix(class.clone());
        let ev = EvictionParams::Deterministic { t_c: 0.5 };
        let occ = expected_occupancy(&Policy::Lru, &mix, &ev).unwrap();
        let law = class.content_law(10.0).unwrap();
        assert!((occ - 1000.0 * law.age_cdf(0.5)).abs() < 1e-9);
        // Eviction time -> infinity fills the cacheable catalogue.
        let occ = expected_occupancy(&Policy::Lru, &mix, &EvictionParams::Deterministic {
            t_c: f64::INFINITY,
        })
        .unwrap();
        assert!((occ - 1000.0).abs() < 1e-6);
    }

    #[test]
    fn occupancy_monte_carlo_cross_check() {
        use rand::SeedableRng;
        let class = ContentClass {
            label: "c".into(),
            t_on: 1.0,
            t_off: 9.0,
            popularity: pareto_law(10.0, 2.0),
            class_catalogue: 100_000,
            cacheable: true,
        };
        let mix = one_class_mix(class.clone());
        let ev = EvictionParams::Deterministic { t_c: 0.05 };
        let occ = expected_occupancy(&Policy::Lru, &mix, &ev).unwrap();
        // Monte Carlo quadrature oracle over the popularity law.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let n = 100_000usize;
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for i in 0..n {
            let v = class.popularity.volume_for_content(i as u64, &mut rng);
            let p = hit_lru(&class.content_law(v).unwrap(), 0.05).p_in;
            acc += p;
            acc2 += p * p;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        let mc = 100_000.0 * mean;
        assert!(
            (occ - mc).abs() < 3.0 * 100_000.0 * se + 1e-3 * occ,
            "occupancy {occ} vs MC {mc}"
        );
    }

    fn pareto_law(mean: f64, beta: f64) -> PopularityLaw {
        crate::traffic::pareto_with_mean(mean, beta, None).unwrap()
    }

    #[test]
    fn solve_two_identical_contents() {
        // Two contents with Exp(1) requests, C = 1: occupancy
        // 2(1 - e^{-t}) = 1 gives t = ln 2.
        let class = ContentClass {
            label: "c".into(),
            t_on: 1.0,
            t_off: 1.0,
            popularity: PopularityLaw::Zipf {
                alpha: 0.0,
                catalogue: 2,
                total_rate: 2.0,
            },
            class_catalogue: 2,
            cacheable: true,
        };
        let mix = one_class_mix(class);
        let r = solve_eviction_time(&Policy::Lru, &mix, 1).unwrap();
        match r.eviction {
            EvictionParams::Deterministic { t_c } => {
                assert!((t_c - 2.0f64.ln()).abs() < 1e-5, "t_c = {t_c}");
            }
            _ => unreachable!(),
        }
        assert!(r.occupancy_residual <= 1e-6);
    }

    #[test]
    fn saturation_sentinel() {
        let class = ContentClass {
            label: "c".into(),
            t_on: 1.0,
            t_off: 9.0,
            popularity: PopularityLaw::Degenerate { v: 10.0 },
            class_catalogue: 100,
            cacheable: true,
        };
        let mix = one_class_mix(class);
        for policy in [Policy::Lru, Policy::QLru { q: 0.3 }, Policy::Random, Policy::TwoLru] {
            let r = solve_eviction_time(&policy, &mix, 100).unwrap();
            assert!(r.is_saturated());
            assert!((r.phit_overall - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_point_residual_and_q1_equals_lru() {
        let class = ContentClass {
            label: "c".into(),
            t_on: 1.0,
            t_off: 9.0,
            popularity: pareto_law(10.0, 2.0),
            class_catalogue: 5000,
            cacheable: true,
        };
        let mix = one_class_mix(class);
        let lru = solve_eviction_time(&Policy::Lru, &mix, 200).unwrap();
        let q1 = solve_eviction_time(&Policy::QLru { q: 1.0 }, &mix, 200).unwrap();
        assert!(lru.occupancy_residual <= 1e-6);
        assert!((lru.phit_overall - q1.phit_overall).abs() < 1e-9);
        // Request weighting pushes the overall hit probability above the
        // plain per-content average for volume-skewed popularity.
        assert!(lru.phit_overall > lru.phit_unweighted);
    }

    #[test]
    fn occupancy_monotone_in_eviction() {
        let class = ContentClass {
            label: "c".into(),
            t_on: 2.0,
            t_off: 40.0,
            popularity: pareto_law(8.0, 2.3),
            class_catalogue: 2000,
            cacheable: true,
        };
        let mix = one_class_mix(class);
        for policy in [Policy::Lru, Policy::QLru { q: 0.2 }, Policy::Random] {
            let ev = |t: f64| match policy {
                Policy::Random => EvictionParams::ExponentialMean { mean_t_c: t },
                _ => EvictionParams::Deterministic { t_c: t },
            };
            let mut prev = 0.0;
            for i in 1..30 {
                let t = 0.02 * 1.5f64.powi(i);
                let occ = expected_occupancy(&policy, &mix, &ev(t)).unwrap();
                assert!(occ + 1e-9 >= prev, "{policy:?} not monotone at {t}");
                prev = occ;
            }
        }
    }

    #[test]
    fn locality_monotonicity() {
        // Fixed capacity and fixed long-run rate: stretching the ON period
        // dilutes temporal locality and lowers the LRU hit probability.
        let cycle = 300.0;
        let mut prev = f64::INFINITY;
        for t_on in [1.0, 3.0, 10.0, 30.0] {
            let class = ContentClass {
                label: "c".into(),
                t_on,
                t_off: cycle - t_on,
                popularity: pareto_law(10.0, 2.0),
                class_catalogue: 20_000,
                cacheable: true,
            };
            let mix = one_class_mix(class);
            let r = solve_eviction_time(&Policy::Lru, &mix, 500).unwrap();
            assert!(
                r.phit_overall < prev,
                "p_hit must strictly decrease in t_on, got {} after {prev}",
                r.phit_overall
            );
            prev = r.phit_overall;
        }
    }
}
