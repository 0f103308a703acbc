//! Closed-form and brute-force oracles for the routed quantizer, the tether
//! bias and candidate-set coverage.

use rand::Rng as _;

use crate::error::{check_dim, Error, Result};
use crate::rng::Rng;

/// One-dimensional interval mixture `ρ = (1/M) Σ Unif([c_m − r, c_m + r])`
/// and a prototype budget.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantizerConfig {
    pub centers: Vec<f64>,
    pub radius: f64,
    pub prototypes: usize,
    /// Midpoint-rule nodes per interval.
    pub nodes: usize,
}

impl QuantizerConfig {
    /// `M` intervals spaced `gap` apart starting at zero.
    pub fn evenly_spaced(modes: usize, radius: f64, gap: f64, prototypes: usize) -> Result<Self> {
        let cfg = Self {
            centers: (0..modes).map(|m| m as f64 * gap).collect(),
            radius,
            prototypes,
            nodes: 20_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn modes(&self) -> usize {
        self.centers.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(Error::InvalidConfig("need at least one interval".into()));
        }
        if !(self.radius > 0.0) {
            return Err(Error::InvalidConfig("interval radius must be positive".into()));
        }
        if self.prototypes == 0 {
            return Err(Error::InvalidConfig("need at least one prototype".into()));
        }
        if self.nodes == 0 {
            return Err(Error::InvalidConfig("need at least one quadrature node".into()));
        }
        if self
            .centers
            .windows(2)
            .any(|w| !(w[1] - w[0] > 4.0 * self.radius))
        {
            return Err(Error::InvalidConfig(
                "centers must be increasing with gaps above 4r".into(),
            ));
        }
        Ok(())
    }

    /// Index of the interval containing `x`, if any.
    pub fn interval_of(&self, x: f64) -> Option<usize> {
        self.centers
            .iter()
            .position(|c| (x - c).abs() <= self.radius)
    }
}

fn min_sq(prototypes: &[f64], a: f64) -> f64 {
    prototypes
        .iter()
        .map(|p| (p - a) * (p - a))
        .fold(f64::INFINITY, f64::min)
}

fn distortion_with_nodes(prototypes: &[f64], cfg: &QuantizerConfig, nodes: usize) -> f64 {
    let r = cfg.radius;
    let h = 2.0 * r / nodes as f64;
    let per_interval: f64 = cfg
        .centers
        .iter()
        .map(|c| {
            let lo = c - r;
            let sum: f64 = (0..nodes)
                .map(|i| min_sq(prototypes, lo + (i as f64 + 0.5) * h))
                .sum();
            sum * h / (2.0 * r)
        })
        .sum();
    per_interval / cfg.modes() as f64
}

/// `J(â) = ∫ min_k |â_k − a|² ρ(da)` by the composite midpoint rule.
pub fn routed_distortion(prototypes: &[f64], cfg: &QuantizerConfig) -> Result<f64> {
    cfg.validate()?;
    if prototypes.is_empty() {
        return Err(Error::InvalidConfig("need at least one prototype".into()));
    }
    Ok(distortion_with_nodes(prototypes, cfg, cfg.nodes))
}

/// Quadrature at `nodes` and `2·nodes`, plus the Richardson-extrapolated
/// value (the midpoint rule is second order).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RichardsonCheck {
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
    /// `|fine − coarse| / |fine|`.
    pub relative_change: f64,
}

pub fn richardson_check(prototypes: &[f64], cfg: &QuantizerConfig) -> Result<RichardsonCheck> {
    let coarse = routed_distortion(prototypes, cfg)?;
    let fine = distortion_with_nodes(prototypes, cfg, 2 * cfg.nodes);
    Ok(RichardsonCheck {
        coarse,
        fine,
        extrapolated: fine + (fine - coarse) / 3.0,
        relative_change: (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE),
    })
}

/// Minimum distortion of one interval of radius `r` served by `q` prototypes
/// on its own: `r² / (3q²)`.
pub fn interval_distortion(radius: f64, q: usize) -> f64 {
    radius * radius / (3.0 * (q * q) as f64)
}

/// Expected squared distance from a prototype outside an interval to the
/// uniform mass on it is at least this.
pub fn empty_interval_floor(radius: f64) -> f64 {
    4.0 * radius * radius / 3.0
}

/// `q` prototypes at the midpoints of `q` equal cells of `[c − r, c + r]`.
pub fn interval_prototypes(center: f64, radius: f64, q: usize) -> Vec<f64> {
    (0..q)
        .map(|i| center - radius + (2 * i + 1) as f64 * radius / q as f64)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantizerOptimum {
    /// Prototypes per interval.
    pub allocation: Vec<usize>,
    pub prototypes: Vec<f64>,
    pub distortion: f64,
    /// Every allocation that leaves an interval empty was ruled out by the
    /// `4r²/3` lower bound.
    pub certified: bool,
    pub allocations_checked: u128,
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn for_each_composition(total: usize, parts: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(rest: usize, idx: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == cur.len() {
            cur[idx] = rest;
            f(cur);
            return;
        }
        for q in 0..=rest {
            cur[idx] = q;
            rec(rest - q, idx + 1, cur, f);
        }
    }
    let mut cur = vec![0; parts];
    rec(total, 0, &mut cur, f);
}

/// Global optimum of `J` by enumerating how the `K` prototypes split across
/// the intervals, pricing each full allocation with the closed form
/// `(1/M) Σ_m r²/(3 q_m²)`. Allocations with an empty interval are priced
/// from below with `4r²/3` per empty interval and must lose to the best full
/// allocation for the result to be certified.
pub fn optimal_quantizer_bruteforce(cfg: &QuantizerConfig, budget: u128) -> Result<QuantizerOptimum> {
    cfg.validate()?;
    let (m, k) = (cfg.modes(), cfg.prototypes);
    if k < m {
        return Err(Error::InvalidConfig(format!(
            "allocation oracle needs K >= M (K = {k}, M = {m})"
        )));
    }
    let count = binomial((k + m - 1) as u128, (m - 1) as u128);
    if count > budget {
        return Err(Error::BudgetExceeded { count, budget });
    }
    let r = cfg.radius;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut best_partial_bound = f64::INFINITY;
    for_each_composition(k, m, &mut |alloc| {
        let empty = alloc.iter().filter(|&&q| q == 0).count();
        let occupied: f64 = alloc
            .iter()
            .filter(|&&q| q > 0)
            .map(|&q| interval_distortion(r, q))
            .sum();
        if empty == 0 {
            let j = occupied / m as f64;
            if best.as_ref().is_none_or(|(b, _)| j < *b) {
                best = Some((j, alloc.to_vec()));
            }
        } else {
            let bound = (occupied + empty as f64 * empty_interval_floor(r)) / m as f64;
            best_partial_bound = best_partial_bound.min(bound);
        }
    });
    let (distortion, allocation) = best.expect("K >= M admits a full allocation");
    let prototypes = allocation
        .iter()
        .zip(&cfg.centers)
        .flat_map(|(&q, &c)| interval_prototypes(c, r, q))
        .collect();
    Ok(QuantizerOptimum {
        allocation,
        prototypes,
        distortion,
        certified: best_partial_bound > distortion,
        allocations_checked: count,
    })
}

/// Exact minimizer of `g(x) = ‖x − a‖² + α(m/2)‖x − x_Q‖²`, i.e. the
/// tethered objective under a quadratic critic:
/// `x_fix = (2a + αm·x_Q) / (2 + αm)`.
pub fn fixed_tether_minimizer(a: &[f64], x_q: &[f64], alpha: f64, m: f64) -> Result<Vec<f64>> {
    check_dim("tether peak", a.len(), x_q.len())?;
    if !(m > 0.0) || !(alpha >= 0.0) {
        return Err(Error::InvalidConfig("need m > 0 and alpha >= 0".into()));
    }
    let denom = 2.0 + alpha * m;
    Ok(a.iter()
        .zip(x_q)
        .map(|(ai, qi)| (2.0 * ai + alpha * m * qi) / denom)
        .collect())
}

/// `2 / (2 + αm)`.
pub fn tether_bias_ratio(alpha: f64, m: f64) -> f64 {
    2.0 / (2.0 + alpha * m)
}

fn check_probs(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidConfig("need at least one modal neighborhood".into()));
    }
    if let Some(bad) = p.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::InvalidConfig(format!("probability {bad} outside (0, 1]")));
    }
    Ok(())
}

/// `1 − Σ_m (1 − p_m)^K`.
pub fn coverage_bound(p: &[f64], k: usize) -> Result<f64> {
    check_probs(p)?;
    Ok(1.0 - p.iter().map(|pm| (1.0 - pm).powi(k as i32)).sum::<f64>())
}

/// `1 − M·exp(−K·p_min)`.
pub fn coverage_exponential_bound(p: &[f64], k: usize) -> Result<f64> {
    check_probs(p)?;
    let p_min = p.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(1.0 - p.len() as f64 * (-(k as f64) * p_min).exp())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageEstimate {
    /// Fraction of trials in which every neighborhood was hit.
    pub frequency: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Monte-Carlo estimate of `P(∀m ∃k: â_k ∈ U_m)`.
///
/// Each candidate is a uniform point on the unit circle and `U_m` is the arc
/// `[o_m, o_m + p_m)` with `o_m = Σ_{j<m} p_j (mod 1)`, so a single candidate
/// lands in `U_m` with probability exactly `p_m`. When `Σ p ≤ 1` the arcs are
/// disjoint and each draw is categorical-or-miss; otherwise they overlap.
pub fn coverage_montecarlo(p: &[f64], k: usize, trials: u64, rng: &mut Rng) -> Result<CoverageEstimate> {
    check_probs(p)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("need at least one trial".into()));
    }
    let mut offsets = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for pm in p {
        offsets.push(acc % 1.0);
        acc += pm;
    }
    let full: u64 = (1u64 << p.len()) - 1;
    let mut hits = 0u64;
    for _ in 0..trials {
        let mut seen = 0u64;
        for _ in 0..k {
            let u: f64 = rng.random();
            for (m, (&o, &pm)) in offsets.iter().zip(p).enumerate() {
                let rel = (u - o).rem_euclid(1.0);
                if rel < pm {
                    seen |= 1 << m;
                }
            }
            if seen == full {
                break;
            }
        }
        if seen == full {
            hits += 1;
        }
    }
    let f = hits as f64 / trials as f64;
    Ok(CoverageEstimate {
        frequency: f,
        std_error: (f * (1.0 - f) / trials as f64).sqrt(),
        trials,
    })
}

/// One row of the oracle tables exported by the CLI.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleRow {
    pub table: &'static str,
    pub key: String,
    pub value: f64,
}

/// Closed-form and brute-force values for the default oracle grid.
pub fn oracle_table(radius: f64) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for q in 1..=4 {
        rows.push(OracleRow {
            table: "interval_distortion",
            key: format!("q={q}"),
            value: interval_distortion(radius, q),
        });
    }
    for m in 2..=4 {
        let cfg = QuantizerConfig::evenly_spaced(m, radius, 5.0 * radius, m)?;
        let opt = optimal_quantizer_bruteforce(&cfg, 1_000_000)?;
        rows.push(OracleRow {
            table: "optimal_distortion",
            key: format!("M=K={m}"),
            value: opt.distortion,
        });
        rows.push(OracleRow {
            table: "collapse_gap_floor",
            key: format!("M={m}"),
            value: 3.0 * radius * radius / (4.0 * m as f64),
        });
    }
    for (alpha, m) in [(1.0, 2.0), (0.3, 1.0), (10.0, 0.5)] {
        rows.push(OracleRow {
            table: "tether_ratio",
            key: format!("alpha={alpha},m={m}"),
            value: tether_bias_ratio(alpha, m),
        });
    }
    for modes in [2, 3] {
        for pm in [0.2, 0.5] {
            for k in [1, 4, 16] {
                let p = vec![pm; modes];
                rows.push(OracleRow {
                    table: "coverage_union_bound",
                    key: format!("M={modes},p={pm},K={k}"),
                    value: coverage_bound(&p, k)?,
                });
                rows.push(OracleRow {
                    table: "coverage_exponential_bound",
                    key: format!("M={modes},p={pm},K={k}"),
                    value: coverage_exponential_bound(&p, k)?,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn cfg(m: usize, k: usize) -> QuantizerConfig {
        QuantizerConfig::evenly_spaced(m, 0.3, 1.5, k).unwrap()
    }

    #[test]
    fn single_prototype_at_center() {
        let j = routed_distortion(&[0.0], &cfg(1, 1)).unwrap();
        assert!((j - 0.03).abs() < 1e-9);
    }

    #[test]
    fn halved_interval() {
        let j = routed_distortion(&[-0.15, 0.15], &cfg(1, 2)).unwrap();
        assert!((j - 0.0075).abs() < 1e-9);
    }

    #[test]
    fn empty_interval_costs_at_least_the_floor() {
        let c = cfg(2, 1);
        // Prototype serving interval 0 only; interval 1 pays at least 4r²/3 / M.
        let j = routed_distortion(&[0.0], &c).unwrap();
        assert!(j >= (0.03 + empty_interval_floor(0.3)) / 2.0);
    }

    #[test]
    fn bruteforce_small_cases() {
        let one = optimal_quantizer_bruteforce(&cfg(1, 1), 10).unwrap();
        assert_eq!(one.prototypes, vec![0.0]);
        let three = optimal_quantizer_bruteforce(&cfg(3, 3), 100).unwrap();
        assert_eq!(three.allocation, vec![1, 1, 1]);
        assert!((three.distortion - 0.03).abs() < 1e-15);
        assert!(three.certified);
        let two_three = optimal_quantizer_bruteforce(&cfg(2, 3), 100).unwrap();
        assert_eq!(two_three.allocation.iter().sum::<usize>(), 3);
        let expected = (interval_distortion(0.3, 2) + interval_distortion(0.3, 1)) / 2.0;
        assert!((two_three.distortion - expected).abs() < 1e-15);
    }

    #[test]
    fn bruteforce_budget_and_regime_errors() {
        assert!(matches!(
            optimal_quantizer_bruteforce(&cfg(4, 40), 10),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(optimal_quantizer_bruteforce(&cfg(3, 2), 100).is_err());
    }

    #[test]
    fn separation_is_validated() {
        assert!(QuantizerConfig::evenly_spaced(2, 0.3, 1.2, 2).is_err());
    }

    #[test]
    fn tether_minimizer_cases() {
        assert_eq!(fixed_tether_minimizer(&[0.7], &[0.7], 3.0, 2.0).unwrap(), vec![0.7]);
        assert_eq!(fixed_tether_minimizer(&[0.2], &[5.0], 0.0, 2.0).unwrap(), vec![0.2]);
        assert_eq!(fixed_tether_minimizer(&[0.0], &[1.0], 1.0, 2.0).unwrap(), vec![0.5]);
        assert_eq!(tether_bias_ratio(1.0, 2.0), 0.5);
        assert!(fixed_tether_minimizer(&[0.0], &[1.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn tether_minimizer_is_stationary_and_saturates_bound() {
        let a = [0.3, -1.2, 2.0];
        let xq = [1.0, 0.5, -0.5];
        let (alpha, m) = (0.7, 1.3);
        let x = fixed_tether_minimizer(&a, &xq, alpha, m).unwrap();
        for i in 0..3 {
            let g = 2.0 * (x[i] - a[i]) + alpha * m * (x[i] - xq[i]);
            assert!(g.abs() < 1e-10);
        }
        let dist = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        let ratio = dist(&x, &xq) / dist(&a, &xq);
        assert!((ratio - tether_bias_ratio(alpha, m)).abs() < 1e-12);
    }

    #[test]
    fn coverage_trivial_and_substituted() {
        assert_eq!(coverage_bound(&[1.0], 3).unwrap(), 1.0);
        let mut r = rng::stream(0, 0);
        let est = coverage_montecarlo(&[1.0], 3, 1000, &mut r).unwrap();
        assert_eq!(est.frequency, 1.0);
        assert!((coverage_bound(&[0.5, 0.5], 4).unwrap() - 0.875).abs() < 1e-15);
        let e = coverage_exponential_bound(&[0.5, 0.5], 4).unwrap();
        assert!((e - (1.0 - 2.0 * (-2.0f64).exp())).abs() < 1e-15);
        assert!(e <= 0.875);
        assert!(coverage_bound(&[0.0], 3).is_err());
        assert!(coverage_bound(&[1.5], 3).is_err());
    }

    #[test]
    fn coverage_montecarlo_respects_union_bound() {
        let mut r = rng::stream(1, 0);
        let est = coverage_montecarlo(&[0.5, 0.5], 4, 200_000, &mut r).unwrap();
        // Disjoint halves: exact hit-all probability is 1 - 2·0.5^4 = 0.875.
        assert!((est.frequency - 0.875).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn oracle_table_has_expected_rows() {
        let rows = oracle_table(0.3).unwrap();
        assert!(rows.iter().any(|r| r.table == "optimal_distortion" && (r.value - 0.03).abs() < 1e-15));
        assert_eq!(rows.iter().filter(|r| r.table == "coverage_union_bound").count(), 12);
    }
}
