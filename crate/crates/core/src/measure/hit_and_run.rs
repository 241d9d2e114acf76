//! Random-direction hit-and-run chain. Each step draws a uniform direction,
//! restricts the target density to the chord through the current point and
//! samples the restriction exactly (to quadrature tolerance) with the 1-D
//! log-concave line sampler.

use super::line;
use super::LogConcaveMeasure;
use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

// The line draw only needs to be accurate well below MCMC noise.
const LINE_TOL: f64 = 1e-6;

pub fn run_chain(
    measure: &LogConcaveMeasure,
    n: usize,
    burn_in: usize,
    thinning: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>> {
    let dim = measure.dim();
    let thinning = thinning.max(1);
    let mut x = initial_point(measure);
    debug_assert!(measure.log_density(&x)?.is_finite(), "chain must start inside the support");

    let mut e = vec![0.0; dim];
    let mut out = Vec::with_capacity(n * dim);
    let total = burn_in + n * thinning;
    for step in 0..total {
        draw_direction(&mut e, rng);
        let bracket = measure
            .line_bracket(&x, &e)
            .ok_or(Error::ZeroMassBracket)?;
        let target = measure.line_log_density(&x, &e)?;
        let t = line::sample_line_logconcave_with_tol(|s| target.eval(s), bracket, rng, LINE_TOL)?;
        for (xi, ei) in x.iter_mut().zip(&e) {
            *xi += t * ei;
        }
        if step >= burn_in && (step - burn_in) % thinning == thinning - 1 {
            out.extend_from_slice(&x);
        }
    }
    debug_assert_eq!(out.len(), n * dim);
    Ok(out)
}

fn initial_point(measure: &LogConcaveMeasure) -> Vec<f64> {
    match measure {
        LogConcaveMeasure::UniformBox { lower, upper, .. } => {
            lower.iter().zip(upper).map(|(lo, hi)| 0.5 * (lo + hi)).collect()
        }
        _ => vec![0.0; measure.dim()],
    }
}

fn draw_direction(e: &mut [f64], rng: &mut ChaCha8Rng) {
    loop {
        let mut norm2 = 0.0;
        for ei in e.iter_mut() {
            *ei = StandardNormal.sample(rng);
            norm2 += *ei * *ei;
        }
        if norm2 > 1e-300 {
            let inv = norm2.sqrt().recip();
            for ei in e.iter_mut() {
                *ei *= inv;
            }
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{SampleMethod, DEFAULT_BURN_IN};
    use crate::numeric::{ks_critical, ks_statistic};
    use crate::poly::parse;

    #[test]
    fn uniform_ball_radial_cdf_via_general_potential() {
        // V = 0 on |x| <= 1 is the uniform ball; radial CDF is r^dim.
        let zero = parse("0", 2).unwrap();
        let m = LogConcaveMeasure::general_potential(zero, 1.0, true).unwrap();
        let n = 10_000;
        let s = m.sample(n, 271828).unwrap();
        assert!(matches!(s.method(), SampleMethod::HitAndRun { burn_in: DEFAULT_BURN_IN, thinning: 20 }));
        let mut radii: Vec<f64> =
            s.iter_points().map(|p| p.iter().map(|t| t * t).sum::<f64>().sqrt()).collect();
        let d = ks_statistic(&mut radii, |r| (r * r).clamp(0.0, 1.0));
        let crit = ks_critical(n, 0.01);
        assert!(d < crit, "KS {d} >= {crit}");
    }

    #[test]
    fn hit_and_run_matches_exact_box_sampler_moments() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0, -2.0], vec![1.0, 0.0]).unwrap();
        let s = m
            .sample_with(4000, 17, SampleMethod::HitAndRun { burn_in: 200, thinning: 10 })
            .unwrap();
        let mean = s.mean();
        assert!((mean[0] - 0.5).abs() < 0.02, "mean {mean:?}");
        assert!((mean[1] + 1.0).abs() < 0.04, "mean {mean:?}");
        let cov = s.covariance();
        assert!((cov[0] - 1.0 / 12.0).abs() < 0.01);
        assert!((cov[3] - 1.0 / 3.0).abs() < 0.04);
    }

    #[test]
    fn truncated_quartic_chain_is_deterministic() {
        let v = parse("x1^4 + x2^2", 2).unwrap();
        let m = LogConcaveMeasure::general_potential(v, 5.0, true).unwrap();
        let a = m.sample(64, 3).unwrap();
        let b = m.sample(64, 3).unwrap();
        for i in 0..64 {
            assert_eq!(a.point(i), b.point(i));
        }
    }
}
