//! Exact-to-tolerance sampling from a 1-D log-concave density on an
//! interval, by numeric inverse CDF on an adaptively refined grid.
//!
//! Segment masses use the exponential-chord rule (exact for log-linear
//! pieces, a lower bound for concave log-densities); an interval is split
//! until its mass estimate settles within its share of the tolerance,
//! allotted proportionally to width. Everything is computed relative to the
//! max log-density, so tail underflow cannot poison the CDF.
//!
//! [`LineDistribution`] separates the grid build from the draws: hit-and-run
//! builds one grid per chord and draws once, while a caller wanting many
//! i.i.d. draws from a fixed line builds once and draws repeatedly.

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const DEFAULT_REL_TOL: f64 = 1e-10;
const TOP_INTERVALS: usize = 16;
const MAX_DEPTH: u32 = 48;

/// One draw from the normalized restriction of `exp(log_density)` to
/// `[bracket.0, bracket.1]`, at the default 1e-10 mass tolerance.
pub fn sample_line_logconcave(
    log_density: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    sample_line_logconcave_with_tol(log_density, bracket, rng, DEFAULT_REL_TOL)
}

/// Same as [`sample_line_logconcave`] with an explicit relative mass
/// tolerance (the hit-and-run inner loop runs at a looser one).
pub fn sample_line_logconcave_with_tol(
    log_density: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    rng: &mut ChaCha8Rng,
    rel_tol: f64,
) -> Result<f64> {
    let dist = LineDistribution::build(log_density, bracket, rel_tol)?;
    Ok(dist.draw(rng))
}

/// Inverse-CDF table for a 1-D log-concave density on an interval.
pub struct LineDistribution {
    segments: Vec<Segment>,
    /// Inclusive prefix sums of segment masses, for binary search.
    cumulative: Vec<f64>,
    total: f64,
    point: Option<f64>,
}

impl LineDistribution {
    pub fn build(
        log_density: impl Fn(f64) -> f64,
        bracket: (f64, f64),
        rel_tol: f64,
    ) -> Result<Self> {
        let (a, b) = bracket;
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidParameter("line bracket must be finite".into()));
        }
        if a == b {
            return Ok(LineDistribution {
                segments: Vec::new(),
                cumulative: Vec::new(),
                total: 0.0,
                point: Some(a),
            });
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };

        // Scan for the scale; every evaluation below is shifted by the max.
        let mut shift = f64::NEG_INFINITY;
        let mut knots = Vec::with_capacity(TOP_INTERVALS + 1);
        for i in 0..=TOP_INTERVALS {
            let x = a + (b - a) * i as f64 / TOP_INTERVALS as f64;
            let l = log_density(x);
            if l.is_nan() {
                return Err(Error::InvalidParameter("log-density returned NaN".into()));
            }
            shift = shift.max(l);
            knots.push((x, l));
        }
        if shift == f64::NEG_INFINITY {
            return Err(Error::ZeroMassBracket);
        }

        let logf = |x: f64| log_density(x) - shift;
        let mut rough_total = 0.0;
        for w in knots.windows(2) {
            rough_total += chord_mass(w[0].1 - shift, w[1].1 - shift, w[1].0 - w[0].0);
        }
        if !(rough_total > 0.0) {
            // Mass hides between scan points; fall back to a generic scale.
            rough_total = f64::MIN_POSITIVE.max((b - a) * 1e-6);
        }
        // Tolerance per unit width: total error <= rel_tol * rough_total,
        // and the chord rule underestimates, so rough_total is conservative.
        let per_width = rel_tol * rough_total / (b - a);

        let mut segments = Vec::with_capacity(4 * TOP_INTERVALS);
        for w in knots.windows(2) {
            refine(&logf, w[0].0, w[0].1 - shift, w[1].0, w[1].1 - shift, per_width, 0, &mut segments);
        }
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for s in &segments {
            acc += s.mass;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::ZeroMassBracket);
        }
        Ok(LineDistribution { segments, cumulative, total: acc, point: None })
    }

    /// Number of stored grid segments (0 for a degenerate bracket).
    pub fn segments(&self) -> usize {
        self.segments.len()
    }

    pub fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(x) = self.point {
            return x;
        }
        let u: f64 = rng.random();
        let target = u * self.total;
        let idx = self.cumulative.partition_point(|&c| c < target).min(self.segments.len() - 1);
        let before = if idx == 0 { 0.0 } else { self.cumulative[idx - 1] };
        self.segments[idx].invert((target - before).max(0.0))
    }
}

struct Segment {
    x1: f64,
    x2: f64,
    l1: f64,
    l2: f64,
    mass: f64,
}

impl Segment {
    /// Solve chord-CDF(x) = m for x, with m in [0, mass].
    fn invert(&self, m: f64) -> f64 {
        let h = self.x2 - self.x1;
        if self.mass <= 0.0 {
            return self.x1 + 0.5 * h;
        }
        let d = self.l2 - self.l1;
        if !d.is_finite() || d.abs() < 1e-9 {
            return self.x1 + h * (m / self.mass).clamp(0.0, 1.0);
        }
        // M(s) = h (e^{l1 + d s} - e^{l1}) / d on s in [0, 1]
        let arg = self.l1.exp() + m * d / h;
        if arg > 0.0 {
            let s = ((arg.ln() - self.l1) / d).clamp(0.0, 1.0);
            self.x1 + h * s
        } else {
            self.x1 + 0.5 * h
        }
    }
}

/// Integral of exp of the chord through (0, l1), (h, l2).
fn chord_mass(l1: f64, l2: f64, h: f64) -> f64 {
    if l1 == f64::NEG_INFINITY && l2 == f64::NEG_INFINITY {
        return 0.0;
    }
    let d = l2 - l1;
    if !d.is_finite() || d.abs() > 500.0 {
        // Support boundary inside the interval; trapezoid with a zero end.
        return 0.5 * h * (exp_or_zero(l1) + exp_or_zero(l2));
    }
    if d.abs() < 1e-9 {
        return h * (0.5 * (l1 + l2)).exp();
    }
    h * (l2.exp() - l1.exp()) / d
}

fn exp_or_zero(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        0.0
    } else {
        l.exp()
    }
}

fn refine(
    logf: &impl Fn(f64) -> f64,
    x1: f64,
    l1: f64,
    x2: f64,
    l2: f64,
    per_width: f64,
    depth: u32,
    out: &mut Vec<Segment>,
) {
    let parent = chord_mass(l1, l2, x2 - x1);
    let xm = 0.5 * (x1 + x2);
    let lm = logf(xm);
    let left = chord_mass(l1, lm, xm - x1);
    let right = chord_mass(lm, l2, x2 - xm);
    if depth >= MAX_DEPTH || (left + right - parent).abs() <= per_width * (x2 - x1) {
        out.push(Segment { x1, x2: xm, l1, l2: lm, mass: left });
        out.push(Segment { x1: xm, x2, l1: lm, l2, mass: right });
        return;
    }
    refine(logf, x1, l1, xm, lm, per_width, depth + 1, out);
    refine(logf, xm, lm, x2, l2, per_width, depth + 1, out);
}
