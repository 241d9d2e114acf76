//! Inequality checkers. Each quantitative bound in scope becomes a
//! `(lhs, rhs_core, ratio)` record, where `rhs_core` carries everything on
//! the right-hand side except the unknown absolute constant. Checkers never
//! invent a value for that constant: they report the ratio and the ensemble
//! harness tracks its empirical maximum.

mod ensemble;

pub use ensemble::{
    carbery_wright_default_measures, estimate_constant, main_bound_cells,
    run_carbery_wright_ensemble, CellRecord, ConstantEstimate, EnsembleSpec,
};

use crate::error::{Error, Result};
use crate::measure::{skorohod_tv, LogConcaveMeasure};
use crate::numeric::{self, nth_root};
use crate::poly::{Direction, Polynomial};
use crate::pushforward::{self, push, Pushforward1D};
use crate::rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Estimated sigma below this floor is treated as degenerate: the bound's
/// left side carries the weight sigma^(1/d), so the case is vacuous.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// Slack applied to the theorem-true density-variance lower bound 1/12.
pub const DENSITY_VARIANCE_TOL: f64 = 1e-9;

/// Everything needed to reproduce a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CheckConfig {
    pub measure: Option<LogConcaveMeasure>,
    pub polynomials: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub params: BTreeMap<String, serde_json::Value>,
}

/// One checker outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub lhs: f64,
    pub rhs_core: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub config: CheckConfig,
}

fn ratio_of(lhs: f64, rhs_core: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs_core
    }
}

/// Standard error of a statistic over 10 contiguous sample blocks.
fn block_stderr(n: usize, stat: impl Fn(std::ops::Range<usize>) -> f64) -> f64 {
    let blocks = 10.min(n);
    if blocks < 2 {
        return 0.0;
    }
    let vals: Vec<f64> = (0..blocks)
        .map(|b| stat(b * n / blocks..(b + 1) * n / blocks))
        .collect();
    let (_, var) = numeric::mean_var(&vals);
    (var / blocks as f64).sqrt()
}

/// Main bound: `sigma_g^(1/d) * TV(mu o f^-1, mu o g^-1)` against
/// `|f - g|_{L2(mu)}^(1/d)`, with `d = max(deg f, deg g) >= 2`.
pub fn check_main_bound(
    m: &LogConcaveMeasure,
    f: &Polynomial,
    g: &Polynomial,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let d = f.degree().max(g.degree());
    if d < 2 {
        return Err(Error::DegreeTooLow { required: 2, got: d });
    }
    let s = m.sample(n, seed)?;
    let pf_g = push(&s, g)?;
    let (_, var_g) = pushforward::mean_and_variance(&pf_g);
    let sigma_g = var_g.sqrt();
    if sigma_g < SIGMA_FLOOR {
        return Err(Error::DegenerateVariance { floor: SIGMA_FLOOR });
    }
    let pf_f = push(&s, f)?;
    let tv = pushforward::tv_histogram(&pf_f, &pf_g, None)?;
    let diff = f.subtract(g)?;
    let l2 = pushforward::moment_norm(&push(&s, &diff)?, 2.0)?;

    let weight = nth_root(sigma_g, d);
    let lhs = weight * tv.tv;
    let rhs_core = nth_root(l2, d);
    let stderr = if rhs_core > 0.0 { weight * tv.stderr / rhs_core } else { 0.0 };

    let mut config = CheckConfig {
        measure: Some(m.clone()),
        seed: Some(seed),
        n: Some(n),
        ..Default::default()
    };
    config.polynomials.insert("f".into(), f.format());
    config.polynomials.insert("g".into(), g.format());
    config.params.insert("d".into(), serde_json::json!(d));
    config.params.insert("bins".into(), serde_json::json!(tv.bins));

    Ok(CheckReport {
        name: "main-bound".into(),
        lhs,
        rhs_core,
        ratio: ratio_of(lhs, rhs_core),
        stderr,
        config,
    })
}

/// Carbery-Wright reports per threshold plus the fitted small-ball exponent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CarberyWrightReport {
    pub reports: Vec<CheckReport>,
    /// Slope of log mu(|f| <= t) against log t over the smallest decade of
    /// the grid with at least 100 hits.
    pub smallball_exponent: f64,
    pub exponent_window: (f64, f64),
}

/// Small-ball probabilities `mu(|f| <= t) (int |f| dmu)^(1/d)` against
/// `d t^(1/d)` on a grid of thresholds (default: 25 log-spaced points scaled
/// by the sample median of |f|).
pub fn check_carbery_wright(
    m: &LogConcaveMeasure,
    f: &Polynomial,
    t_grid: Option<&[f64]>,
    n: usize,
    seed: u64,
) -> Result<CarberyWrightReport> {
    let d = f.degree();
    if d < 1 {
        return Err(Error::DegreeTooLow { required: 1, got: d });
    }
    let s = m.sample(n, seed)?;
    let pf = push(&s, f)?;
    let mut abs: Vec<f64> = pf.values().iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let grid: Vec<f64> = match t_grid {
        Some(g) => {
            if g.is_empty() || g.iter().any(|&t| !(t > 0.0)) || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter("t grid must be positive and strictly increasing".into()));
            }
            g.to_vec()
        }
        None => {
            let scale = abs[abs.len() / 2].max(f64::MIN_POSITIVE);
            log_grid(scale * 1e-3, scale * 2.0, 25)
        }
    };

    let mean_abs = abs.iter().sum::<f64>() / abs.len() as f64;
    let factor = nth_root(mean_abs, d);

    let counts: Vec<usize> = grid.iter().map(|&t| abs.partition_point(|&v| v <= t)).collect();
    if *counts.last().unwrap() == 0 {
        return Err(Error::NoSmallBallHits);
    }

    let mut reports = Vec::with_capacity(grid.len());
    for (&t, &c) in grid.iter().zip(&counts) {
        let p_hat = c as f64 / n as f64;
        let lhs = p_hat * factor;
        let rhs_core = d as f64 * nth_root(t, d);
        let stderr = factor * (p_hat * (1.0 - p_hat) / n as f64).sqrt() / rhs_core;
        let mut config = CheckConfig {
            measure: Some(m.clone()),
            seed: Some(seed),
            n: Some(n),
            ..Default::default()
        };
        config.polynomials.insert("f".into(), f.format());
        config.params.insert("t".into(), serde_json::json!(t));
        config.params.insert("d".into(), serde_json::json!(d));
        reports.push(CheckReport {
            name: "carbery-wright".into(),
            lhs,
            rhs_core,
            ratio: ratio_of(lhs, rhs_core),
            stderr,
            config,
        });
    }

    // Smallest decade of the grid with at least 100 hits at its low end.
    let anchor = counts
        .iter()
        .position(|&c| c >= 100)
        .or_else(|| counts.iter().position(|&c| c >= 1))
        .expect("nonzero top count");
    let t_lo = grid[anchor];
    let mut window: Vec<usize> = (anchor..grid.len()).filter(|&j| grid[j] <= 10.0 * t_lo).collect();
    while window.len() < 2 {
        let next = anchor + window.len();
        if next >= grid.len() {
            break;
        }
        window.push(next);
    }
    if window.len() < 2 && anchor > 0 {
        window = vec![anchor - 1, anchor];
    }
    let ts: Vec<f64> = window.iter().map(|&j| grid[j]).collect();
    let ps: Vec<f64> = window.iter().map(|&j| counts[j] as f64 / n as f64).collect();
    let smallball_exponent = numeric::loglog_slope(&ts, &ps).ok_or(Error::NoSmallBallHits)?;
    let exponent_window = (ts[0], *ts.last().unwrap());

    Ok(CarberyWrightReport { reports, smallball_exponent, exponent_window })
}

/// Log-spaced grid, inclusive of both ends.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (lln, hln) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (lln + (hln - lln) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Moment equivalence: `|f|_q` against `(qd)^d |f|_0` and `(q)^d |f|_1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentEquivalenceReport {
    pub vs_zero: CheckReport,
    pub vs_one: CheckReport,
}

pub fn check_moment_equivalence(
    m: &LogConcaveMeasure,
    f: &Polynomial,
    q: f64,
    n: usize,
    seed: u64,
) -> Result<MomentEquivalenceReport> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!("q must be >= 1, got {q}")));
    }
    let d = f.degree();
    let s = m.sample(n, seed)?;
    let pf = push(&s, f)?;
    let norm_q = pushforward::moment_norm(&pf, q)?;
    let norm_0 = pushforward::moment_norm(&pf, 0.0)?;
    let norm_1 = pushforward::moment_norm(&pf, 1.0)?;
    if norm_0 == 0.0 || norm_1 == 0.0 {
        return Err(Error::DegenerateVariance { floor: 0.0 });
    }

    let base_config = |tag: &str| -> CheckConfig {
        let mut config = CheckConfig {
            measure: Some(m.clone()),
            seed: Some(seed),
            n: Some(n),
            ..Default::default()
        };
        config.polynomials.insert("f".into(), f.format());
        config.params.insert("q".into(), serde_json::json!(q));
        config.params.insert("d".into(), serde_json::json!(d));
        config.params.insert("compare".into(), serde_json::json!(tag));
        config
    };

    let pow_d = |base: f64| -> f64 {
        if d == 0 {
            1.0
        } else {
            base.powi(d as i32)
        }
    };

    let values = pf.values();
    let n_len = values.len();
    let lhs_zero = norm_q / norm_0;
    let stderr_zero = block_stderr(n_len, |range| {
        let block = &values[range];
        let nq = lp_norm(block, q);
        let n0 = geo_mean(block);
        if n0 == 0.0 {
            0.0
        } else {
            nq / n0
        }
    }) / pow_d(q * d as f64).max(f64::MIN_POSITIVE);
    let vs_zero = CheckReport {
        name: "moment-equivalence-q0".into(),
        lhs: lhs_zero,
        rhs_core: pow_d(q * d as f64),
        ratio: ratio_of(lhs_zero, pow_d(q * d as f64)),
        stderr: stderr_zero,
        config: base_config("norm0"),
    };

    let lhs_one = norm_q / norm_1;
    let stderr_one = block_stderr(n_len, |range| {
        let block = &values[range];
        lp_norm(block, q) / lp_norm(block, 1.0).max(f64::MIN_POSITIVE)
    }) / pow_d(q).max(f64::MIN_POSITIVE);
    let vs_one = CheckReport {
        name: "moment-equivalence-q1".into(),
        lhs: lhs_one,
        rhs_core: pow_d(q),
        ratio: ratio_of(lhs_one, pow_d(q)),
        stderr: stderr_one,
        config: base_config("norm1"),
    };

    Ok(MomentEquivalenceReport { vs_zero, vs_one })
}

fn lp_norm(values: &[f64], r: f64) -> f64 {
    let n = values.len() as f64;
    if r == 1.0 {
        return values.iter().map(|v| v.abs()).sum::<f64>() / n;
    }
    (values.iter().map(|v| v.abs().powf(r)).sum::<f64>() / n).powf(1.0 / r)
}

fn geo_mean(values: &[f64]) -> f64 {
    if values.iter().any(|&v| v == 0.0) {
        return 0.0;
    }
    (values.iter().map(|v| v.abs().ln()).sum::<f64>() / values.len() as f64).exp()
}

/// Density-variance lower bound for 1-D log-concave measures:
/// `(max density)^2 * variance >= 1/12`, by quadrature.
pub fn check_density_variance(m: &LogConcaveMeasure) -> Result<CheckReport> {
    if m.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: m.dim() });
    }
    if !m.is_normalized() {
        return Err(Error::UnnormalizedDensity);
    }
    m.validate()?;
    let (lo, hi) = m.projection_bounds(&[1.0]);
    let line = m.line_log_density(&[0.0], &[1.0])?;
    let bracket = m.line_bracket(&[0.0], &[1.0]).ok_or(Error::ZeroMassBracket)?;
    let (_, log_max) = numeric::golden_max(|t| line.eval(t), bracket.0.max(lo), bracket.1.min(hi), 1e-11);
    let max_density = log_max.exp();

    let density = |t: f64| m.density(&[t]).expect("dim checked");
    let mean = numeric::integrate(|t| t * density(t), lo, hi, 1e-12);
    let variance = numeric::integrate(|t| (t - mean) * (t - mean) * density(t), lo, hi, 1e-12);

    let lhs = max_density * max_density * variance;
    let rhs_core = 1.0 / 12.0;
    let mut config = CheckConfig { measure: Some(m.clone()), ..Default::default() };
    config.params.insert("max_density".into(), serde_json::json!(max_density));
    config.params.insert("variance".into(), serde_json::json!(variance));
    Ok(CheckReport {
        name: "density-variance".into(),
        lhs,
        rhs_core,
        ratio: ratio_of(lhs, rhs_core),
        stderr: 0.0,
        config,
    })
}

/// True when the theorem-true density-variance bound holds up to tolerance.
pub fn density_variance_pass(report: &CheckReport) -> bool {
    report.lhs >= 1.0 / 12.0 - DENSITY_VARIANCE_TOL
}

/// Reverse Poincare: `|d_e f|_2` against `|D_e mu|_TV * |f|_2`. Norms by
/// Monte Carlo, the Skorohod TV norm by quadrature.
pub fn check_reverse_poincare(
    m: &LogConcaveMeasure,
    f: &Polynomial,
    e: &Direction,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let sk = skorohod_tv(m, e)?;
    let s = m.sample(n, seed)?;
    let pf_f = push(&s, f)?;
    let norm_f = pushforward::moment_norm(&pf_f, 2.0)?;
    let df = f.directional_derivative(e)?;
    let lhs;
    let stderr;
    if df.is_zero() {
        lhs = 0.0;
        stderr = 0.0;
    } else {
        let pf_df = push(&s, &df)?;
        lhs = pushforward::moment_norm(&pf_df, 2.0)?;
        let vf = pf_f.values();
        let vd = pf_df.values();
        stderr = block_stderr(n, |range| {
            let nf = lp_norm(&vf[range.clone()], 2.0);
            let nd = lp_norm(&vd[range], 2.0);
            if nf == 0.0 {
                0.0
            } else {
                nd / (sk * nf)
            }
        });
    }
    let rhs_core = sk * norm_f;

    let mut config = CheckConfig {
        measure: Some(m.clone()),
        seed: Some(seed),
        n: Some(n),
        ..Default::default()
    };
    config.polynomials.insert("f".into(), f.format());
    config.params.insert("e".into(), serde_json::json!(e.components()));
    config.params.insert("skorohod_tv".into(), serde_json::json!(sk));
    Ok(CheckReport {
        name: "reverse-poincare".into(),
        lhs,
        rhs_core,
        ratio: ratio_of(lhs, rhs_core),
        stderr,
        config,
    })
}

/// Poincare: `var f` against `int |x - mean|^2 dmu * int |grad f|^2 dmu`.
pub fn check_poincare(m: &LogConcaveMeasure, f: &Polynomial, n: usize, seed: u64) -> Result<CheckReport> {
    let s = m.sample(n, seed)?;
    let pf = push(&s, f)?;
    let (_, var_f) = pushforward::mean_and_variance(&pf);

    let mean = s.mean();
    let dim = s.dim();
    let mut dist2 = 0.0;
    for p in s.iter_points() {
        dist2 += p.iter().zip(&mean).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    }
    dist2 /= s.len() as f64;

    let grad = f.gradient();
    let mut grad2 = 0.0;
    for p in s.iter_points() {
        let mut g2 = 0.0;
        for gi in &grad {
            let v = gi.eval(p)?;
            g2 += v * v;
        }
        grad2 += g2;
    }
    grad2 /= s.len() as f64;

    let lhs = var_f;
    let rhs_core = dist2 * grad2;
    // Constant f: zero gradient a.e., ratio 0 by convention.
    let ratio = if grad2 == 0.0 { 0.0 } else { ratio_of(lhs, rhs_core) };
    let values = pf.values().to_vec();
    let stderr = if grad2 == 0.0 {
        0.0
    } else {
        block_stderr(n, |range| {
            let (_, v) = numeric::mean_var(&values[range]);
            v / rhs_core
        })
    };

    let mut config = CheckConfig {
        measure: Some(m.clone()),
        seed: Some(seed),
        n: Some(n),
        ..Default::default()
    };
    config.polynomials.insert("f".into(), f.format());
    config.params.insert("dim".into(), serde_json::json!(dim));
    Ok(CheckReport { name: "poincare".into(), lhs, rhs_core, ratio, stderr, config })
}

/// Helper shared by tests and the CLI: empirical norm chain
/// `|f|_0 <= |f|_1 <= |f|_2` on a pushforward, exact on every empirical
/// measure up to floating-point slack.
pub fn norm_chain_holds(pf: &Pushforward1D) -> Result<bool> {
    let n0 = pushforward::moment_norm(pf, 0.0)?;
    let n1 = pushforward::moment_norm(pf, 1.0)?;
    let n2 = pushforward::moment_norm(pf, 2.0)?;
    let slack = 1e-12 * n2.max(1.0);
    Ok(n0 <= n1 + slack && n1 <= n2 + slack)
}

/// Derive a child seed for a named sub-experiment.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    use rand::Rng;
    rng::stream(seed, path).random()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    const N: usize = 100_000;

    #[test]
    fn main_bound_identical_polynomials() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let f = parse("x1^2 + x2", 2).unwrap();
        let r = check_main_bound(&m, &f, &f, 20_000, 1).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.ratio, 0.0);
        assert_eq!(r.rhs_core, 0.0);
    }

    #[test]
    fn main_bound_requires_degree_two() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let f = parse("x1", 1).unwrap();
        assert!(matches!(
            check_main_bound(&m, &f, &f, 100, 1),
            Err(Error::DegreeTooLow { required: 2, got: 1 })
        ));
    }

    #[test]
    fn main_bound_rejects_degenerate_g() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let f = parse("x1^2", 1).unwrap();
        let g = parse("3", 1).unwrap(); // constant: sigma = 0, d = max(2,0) = 2
        assert!(matches!(
            check_main_bound(&m, &f, &g, 1000, 1),
            Err(Error::DegenerateVariance { .. })
        ));
    }

    #[test]
    fn main_bound_shifted_square_tracks_oracle() {
        // g = x1^2, f = g + delta: TV oracle is 2 Phi(sqrt(delta)) - 1,
        // sigma_g = sqrt(2), |f - g|_2 = delta.
        let m = LogConcaveMeasure::standard_gaussian(1);
        let g = parse("x1^2", 1).unwrap();
        for (delta, seed) in [(0.05, 7u64), (0.2, 8u64)] {
            let f = g.add(&Polynomial::constant(1, delta)).unwrap();
            let r = check_main_bound(&m, &f, &g, N, seed).unwrap();
            let tv_exact = 2.0 * numeric::normal_cdf(delta.sqrt()) - 1.0;
            let expected = 2f64.sqrt().sqrt() * tv_exact / delta.sqrt();
            assert!(
                (r.ratio - expected).abs() < 0.12 * expected,
                "delta {delta}: ratio {} vs {expected}",
                r.ratio
            );
        }
    }

    #[test]
    fn main_bound_scale_invariance_is_bit_exact() {
        // lambda = 4 with d = 2 keeps every step in exact powers of two.
        let m = LogConcaveMeasure::standard_gaussian(2);
        let g = parse("x1^2 + x1*x2", 2).unwrap();
        let f = parse("x1^2 + x1*x2 + 0.125", 2).unwrap();
        let base = check_main_bound(&m, &f, &g, 20_000, 3).unwrap();
        let scaled = check_main_bound(&m, &f.scale(4.0), &g.scale(4.0), 20_000, 3).unwrap();
        assert_eq!(base.ratio, scaled.ratio);
    }

    #[test]
    fn main_bound_translation_invariance() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let g = parse("x1^2 - x2^2", 2).unwrap();
        let f = parse("x1^2 - x2^2 + 0.05", 2).unwrap();
        let c = Polynomial::constant(2, 1.0);
        let base = check_main_bound(&m, &f, &g, 20_000, 4).unwrap();
        let shifted = check_main_bound(&m, &f.add(&c).unwrap(), &g.add(&c).unwrap(), 20_000, 4).unwrap();
        assert!((base.ratio - shifted.ratio).abs() <= 1e-12 * base.ratio.max(1.0));
    }

    #[test]
    fn carbery_wright_uniform_linear_ratio_is_half() {
        // f = x1 on uniform [0,1]: mu(|f| <= t) = t, mean |f| = 1/2.
        let m = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        let f = parse("x1", 1).unwrap();
        let grid = [0.05, 0.1, 0.2, 0.4, 0.8];
        let r = check_carbery_wright(&m, &f, Some(&grid), N, 2).unwrap();
        for rep in &r.reports {
            assert!((rep.ratio - 0.5).abs() < 0.03, "ratio {}", rep.ratio);
        }
    }

    #[test]
    fn carbery_wright_gaussian_linear_small_t_limit() {
        // ratio -> 2 phi(0) sqrt(2/pi) = 2/pi as t -> 0.
        let m = LogConcaveMeasure::standard_gaussian(1);
        let f = parse("x1", 1).unwrap();
        let grid = [0.02, 0.05, 0.1];
        let r = check_carbery_wright(&m, &f, Some(&grid), 400_000, 3).unwrap();
        let expected = 2.0 / std::f64::consts::PI;
        assert!(
            (r.reports[0].ratio - expected).abs() < 0.05 * expected,
            "ratio {} vs {expected}",
            r.reports[0].ratio
        );
    }

    #[test]
    fn carbery_wright_square_exponent_near_half() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let f = parse("x1^2", 1).unwrap();
        let r = check_carbery_wright(&m, &f, None, N, 4).unwrap();
        assert!((r.smallball_exponent - 0.5).abs() < 0.08, "exponent {}", r.smallball_exponent);
    }

    #[test]
    fn carbery_wright_errors_without_hits() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        let f = parse("x1 + 10", 1).unwrap(); // |f| >= 10 on the support
        let grid = [0.1, 1.0];
        assert!(matches!(
            check_carbery_wright(&m, &f, Some(&grid), 1000, 5),
            Err(Error::NoSmallBallHits)
        ));
    }

    #[test]
    fn moment_equivalence_reference_ratios() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let s2 = check_moment_equivalence(&m, &parse("x1", 1).unwrap(), 2.0, N, 6).unwrap();
        // |x|_2 / |x|_1 = sqrt(pi/2) for standard normal.
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((s2.vs_one.lhs - expected).abs() < 0.02, "{}", s2.vs_one.lhs);
        assert_eq!(s2.vs_one.rhs_core, 2.0);

        let sq = check_moment_equivalence(&m, &parse("x1^2", 1).unwrap(), 2.0, N, 7).unwrap();
        assert!((sq.vs_one.lhs - 3f64.sqrt()).abs() < 0.03, "{}", sq.vs_one.lhs);
        assert_eq!(sq.vs_one.rhs_core, 4.0); // q^d
        assert_eq!(sq.vs_zero.rhs_core, 16.0); // (q d)^d
    }

    #[test]
    fn moment_equivalence_constant_is_unit_ratio() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let r = check_moment_equivalence(&m, &parse("2.5", 1).unwrap(), 3.0, 1000, 8).unwrap();
        assert!((r.vs_zero.lhs - 1.0).abs() < 1e-12);
        assert!((r.vs_one.lhs - 1.0).abs() < 1e-12);
        assert_eq!(r.vs_zero.rhs_core, 1.0);
        assert_eq!(r.vs_one.rhs_core, 1.0);
    }

    #[test]
    fn density_variance_uniform_equality_case() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        let r = check_density_variance(&m).unwrap();
        assert!((r.lhs - 1.0 / 12.0).abs() < 1e-9, "lhs {}", r.lhs);
        assert!(density_variance_pass(&r));
    }

    #[test]
    fn density_variance_gaussian_and_laplace() {
        let g = check_density_variance(&LogConcaveMeasure::standard_gaussian(1)).unwrap();
        assert!((g.lhs - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-9, "{}", g.lhs);
        assert!(g.lhs > 1.0 / 12.0);

        let l = check_density_variance(&LogConcaveMeasure::product_exponential(vec![1.0]).unwrap()).unwrap();
        assert!((l.lhs - 0.5).abs() < 1e-9, "{}", l.lhs);
        assert!(l.lhs > 1.0 / 12.0);
    }

    #[test]
    fn reverse_poincare_gaussian_linear_spot_value() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let f = parse("x1", 2).unwrap();
        let r = check_reverse_poincare(&m, &f, &Direction::axis(2, 0), N, 9).unwrap();
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((r.ratio - expected).abs() < 0.02, "ratio {}", r.ratio);
    }

    #[test]
    fn reverse_poincare_constant_is_zero() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let f = Polynomial::constant(2, 2.0);
        let r = check_reverse_poincare(&m, &f, &Direction::axis(2, 1), 1000, 10).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn reverse_poincare_powers_match_moment_recursion() {
        // f = x1^d: |f|_2^2 = E Z^{2d} = (2d-1)!!, |d_e f|_2^2 = d^2 (2d-3)!!.
        let m = LogConcaveMeasure::standard_gaussian(1);
        let e = Direction::axis(1, 0);
        for d in [2u32, 3] {
            let f = parse(&format!("x1^{d}"), 1).unwrap();
            let r = check_reverse_poincare(&m, &f, &e, 400_000, 11 + u64::from(d)).unwrap();
            let double_fact = |k: i64| -> f64 { (1..=k).rev().step_by(2).product::<i64>() as f64 };
            let norm_df = f64::from(d) * double_fact(2 * i64::from(d) - 3).sqrt();
            let norm_f = double_fact(2 * i64::from(d) - 1).sqrt();
            let expected = norm_df / (0.7978845608028654 * norm_f);
            assert!(
                (r.ratio - expected).abs() < 0.05 * expected,
                "d {d}: ratio {} vs {expected}",
                r.ratio
            );
        }
    }

    #[test]
    fn poincare_reference_ratios() {
        let m = LogConcaveMeasure::standard_gaussian(3);
        let f = parse("x1", 3).unwrap();
        let r = check_poincare(&m, &f, N, 12).unwrap();
        assert!((r.ratio - 1.0 / 3.0).abs() < 0.01, "ratio {}", r.ratio);

        let u = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        let r2 = check_poincare(&u, &parse("x1", 1).unwrap(), N, 13).unwrap();
        assert!((r2.ratio - 1.0).abs() < 0.02, "ratio {}", r2.ratio);

        let c = check_poincare(&m, &Polynomial::constant(3, 1.0), 1000, 14).unwrap();
        assert_eq!(c.ratio, 0.0);
    }

    #[test]
    fn report_serializes_with_fixed_keys() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        let r = check_density_variance(&m).unwrap();
        let js = serde_json::to_value(&r).unwrap();
        for key in ["name", "lhs", "rhs_core", "ratio", "stderr", "config"] {
            assert!(js.get(key).is_some(), "missing {key}");
        }
        let text = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&text).unwrap();
        assert_eq!(r, back);
    }
}
