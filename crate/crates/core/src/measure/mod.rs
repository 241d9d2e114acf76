//! Log-concave measure families: densities, exact samplers, hit-and-run for
//! general potentials, whitening to isotropic position, and the Skorohod
//! derivative total variation norm.

mod hit_and_run;
mod isotropize;
mod line;
mod skorohod;

pub use isotropize::isotropize;
pub use line::{sample_line_logconcave, sample_line_logconcave_with_tol, LineDistribution};
pub use skorohod::skorohod_tv;

use crate::error::{Error, Result};
use crate::poly::{self, Polynomial};
use crate::rng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

/// Default hit-and-run burn-in.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Default hit-and-run thinning factor per dimension.
pub const DEFAULT_THINNING_PER_DIM: usize = 10;

/// A log-concave probability measure on R^dim, described by family and
/// parameters. Densities are normalized for every family except
/// `general_potential`, whose density is `e^{-V}` restricted to the ball of
/// radius `radius` and carried unnormalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LogConcaveMeasure {
    StandardGaussian {
        dim: usize,
    },
    /// Product of symmetric (two-sided) exponentials; `lambdas[i]` is the
    /// scale of coordinate i, density `e^{-|x_i|/lambda_i} / (2 lambda_i)`.
    ProductExponential {
        dim: usize,
        lambdas: Vec<f64>,
    },
    UniformBox {
        dim: usize,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    UniformBall {
        dim: usize,
        radius: f64,
    },
    /// Density proportional to `e^{-V(x)}` on `|x| <= radius`, with `V` a
    /// polynomial the caller attests to be convex on that ball.
    GeneralPotential {
        dim: usize,
        potential: Polynomial,
        radius: f64,
        convex_attested: bool,
    },
}

use LogConcaveMeasure::*;

impl LogConcaveMeasure {
    pub fn standard_gaussian(dim: usize) -> Self {
        assert!(dim >= 1);
        StandardGaussian { dim }
    }

    pub fn product_exponential(lambdas: Vec<f64>) -> Result<Self> {
        let m = ProductExponential { dim: lambdas.len(), lambdas };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform_box(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = UniformBox { dim: lower.len(), lower, upper };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform_ball(dim: usize, radius: f64) -> Result<Self> {
        let m = UniformBall { dim, radius };
        m.validate()?;
        Ok(m)
    }

    pub fn general_potential(potential: Polynomial, radius: f64, convex_attested: bool) -> Result<Self> {
        let m = GeneralPotential { dim: potential.dim(), potential, radius, convex_attested };
        m.validate()?;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        match self {
            StandardGaussian { dim }
            | ProductExponential { dim, .. }
            | UniformBox { dim, .. }
            | UniformBall { dim, .. }
            | GeneralPotential { dim, .. } => *dim,
        }
    }

    /// Structural validation; deserialized descriptors should pass through
    /// here before use.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.dim() == 0 {
            return bad("dimension must be positive".into());
        }
        match self {
            StandardGaussian { .. } => Ok(()),
            ProductExponential { dim, lambdas } => {
                if lambdas.len() != *dim {
                    return bad(format!("expected {dim} lambdas, got {}", lambdas.len()));
                }
                if lambdas.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                    return bad("exponential scales must be positive and finite".into());
                }
                Ok(())
            }
            UniformBox { dim, lower, upper } => {
                if lower.len() != *dim || upper.len() != *dim {
                    return bad("box bounds must have one entry per dimension".into());
                }
                for (lo, hi) in lower.iter().zip(upper) {
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return bad(format!("box needs lower < upper, got [{lo}, {hi}]"));
                    }
                }
                Ok(())
            }
            UniformBall { radius, .. } => {
                if !(radius > &0.0) || !radius.is_finite() {
                    return bad("ball radius must be positive and finite".into());
                }
                Ok(())
            }
            GeneralPotential { dim, potential, radius, convex_attested } => {
                if potential.dim() != *dim {
                    return Err(Error::DimensionMismatch { expected: *dim, got: potential.dim() });
                }
                if !(radius > &0.0) || !radius.is_finite() {
                    return bad("support radius must be positive and finite".into());
                }
                if !convex_attested {
                    return bad("general_potential requires convex_attested = true".into());
                }
                Ok(())
            }
        }
    }

    /// True when `density` returns a normalized probability density.
    pub fn is_normalized(&self) -> bool {
        !matches!(self, GeneralPotential { .. })
    }

    /// Log of the normalizing constant subtracted inside [`Self::log_density`];
    /// `None` for `general_potential`.
    pub fn log_normalization(&self) -> Option<f64> {
        match self {
            StandardGaussian { dim } => {
                Some(0.5 * *dim as f64 * (2.0 * std::f64::consts::PI).ln())
            }
            ProductExponential { lambdas, .. } => {
                Some(lambdas.iter().map(|l| (2.0 * l).ln()).sum())
            }
            UniformBox { lower, upper, .. } => {
                Some(lower.iter().zip(upper).map(|(lo, hi)| (hi - lo).ln()).sum())
            }
            UniformBall { dim, radius } => Some(ball_volume(*dim, *radius).ln()),
            GeneralPotential { .. } => None,
        }
    }

    /// Density at `x`: normalized when the family's normalization is known,
    /// otherwise `e^{-V(x)}` times the support indicator.
    pub fn density(&self, x: &[f64]) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    /// Natural log of [`Self::density`]; `-inf` outside the support.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let v = match self {
            StandardGaussian { .. } => {
                -0.5 * x.iter().map(|t| t * t).sum::<f64>() - self.log_normalization().unwrap()
            }
            ProductExponential { lambdas, .. } => {
                -x.iter().zip(lambdas).map(|(t, l)| t.abs() / l).sum::<f64>()
                    - self.log_normalization().unwrap()
            }
            UniformBox { lower, upper, .. } => {
                let inside = x.iter().zip(lower.iter().zip(upper)).all(|(t, (lo, hi))| t >= lo && t <= hi);
                if inside {
                    -self.log_normalization().unwrap()
                } else {
                    f64::NEG_INFINITY
                }
            }
            UniformBall { radius, .. } => {
                let r2: f64 = x.iter().map(|t| t * t).sum();
                if r2 <= radius * radius {
                    -self.log_normalization().unwrap()
                } else {
                    f64::NEG_INFINITY
                }
            }
            GeneralPotential { potential, radius, .. } => {
                let r2: f64 = x.iter().map(|t| t * t).sum();
                if r2 <= radius * radius {
                    -potential.eval(x)?
                } else {
                    f64::NEG_INFINITY
                }
            }
        };
        Ok(v)
    }

    /// The interval of `t` for which `x + t e` can carry mass, or `None`
    /// when the whole line misses the support. For unbounded families the
    /// interval is a conservative bracket far into the tails.
    pub fn line_bracket(&self, x: &[f64], e: &[f64]) -> Option<(f64, f64)> {
        match self {
            StandardGaussian { .. } => {
                let proj: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
                Some((-proj - 45.0, -proj + 45.0))
            }
            ProductExponential { lambdas, .. } => {
                let proj: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
                let lmax = lambdas.iter().cloned().fold(0.0, f64::max);
                let norm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
                let w = (1.0 + norm) * (lambdas.len() as f64).sqrt() + 800.0 * lmax;
                Some((-proj - w, -proj + w))
            }
            UniformBox { lower, upper, .. } => {
                let mut t_lo = f64::NEG_INFINITY;
                let mut t_hi = f64::INFINITY;
                for i in 0..x.len() {
                    if e[i] == 0.0 {
                        if x[i] < lower[i] || x[i] > upper[i] {
                            return None;
                        }
                        continue;
                    }
                    let a = (lower[i] - x[i]) / e[i];
                    let b = (upper[i] - x[i]) / e[i];
                    t_lo = t_lo.max(a.min(b));
                    t_hi = t_hi.min(a.max(b));
                }
                (t_lo <= t_hi).then_some((t_lo, t_hi))
            }
            UniformBall { radius, .. } | GeneralPotential { radius, .. } => {
                // |x + t e|^2 <= R^2 with |e| = 1
                let xe: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
                let ee: f64 = e.iter().map(|t| t * t).sum();
                let xx: f64 = x.iter().map(|t| t * t).sum();
                let disc = xe * xe - ee * (xx - radius * radius);
                if disc < 0.0 || ee == 0.0 {
                    return None;
                }
                let s = disc.sqrt();
                Some(((-xe - s) / ee, (-xe + s) / ee))
            }
        }
    }

    /// Bounds of the support (or of all but negligible mass) projected onto
    /// the unit vector `u`.
    pub fn projection_bounds(&self, u: &[f64]) -> (f64, f64) {
        match self {
            StandardGaussian { .. } => (-12.0, 12.0),
            ProductExponential { lambdas, .. } => {
                let scale: f64 = u.iter().zip(lambdas).map(|(ui, l)| ui.abs() * l).sum();
                let b = 60.0 * scale + 10.0 * lambdas.iter().cloned().fold(0.0, f64::max);
                (-b, b)
            }
            UniformBox { lower, upper, .. } => {
                let mut lo = 0.0;
                let mut hi = 0.0;
                for i in 0..lower.len() {
                    let (a, b) = (u[i] * lower[i], u[i] * upper[i]);
                    lo += a.min(b);
                    hi += a.max(b);
                }
                (lo, hi)
            }
            UniformBall { radius, .. } | GeneralPotential { radius, .. } => (-*radius, *radius),
        }
    }

    /// Log-density along the line `t -> x + t e`, with per-line work hoisted
    /// out so evaluations are O(1) in the sample dimension where possible.
    pub fn line_log_density(&self, x: &[f64], e: &[f64]) -> Result<LineLogDensity<'_>> {
        if x.len() != self.dim() || e.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len().max(e.len()) });
        }
        let inner = match self {
            StandardGaussian { .. } => {
                let xx: f64 = x.iter().map(|t| t * t).sum();
                let xe: f64 = x.iter().zip(e).map(|(a, b)| a * b).sum();
                let ee: f64 = e.iter().map(|t| t * t).sum();
                LineKind::Quadratic {
                    c0: -0.5 * xx - self.log_normalization().unwrap(),
                    c1: -xe,
                    c2: -0.5 * ee,
                }
            }
            ProductExponential { lambdas, .. } => LineKind::Exponential {
                x: x.to_vec(),
                e: e.to_vec(),
                lambdas,
                log_norm: self.log_normalization().unwrap(),
            },
            UniformBox { .. } | UniformBall { .. } => LineKind::Constant {
                level: -self.log_normalization().unwrap(),
            },
            GeneralPotential { potential, .. } => LineKind::Poly {
                neg_coeffs: potential.restrict_to_line(x, e)?,
            },
        };
        Ok(LineLogDensity { inner })
    }

    /// Draw `n` points. Gaussian, exponential, box and ball families sample
    /// exactly; `general_potential` runs hit-and-run with default burn-in
    /// and thinning.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampleSet> {
        let method = match self {
            GeneralPotential { dim, .. } => SampleMethod::HitAndRun {
                burn_in: DEFAULT_BURN_IN,
                thinning: dim * DEFAULT_THINNING_PER_DIM,
            },
            _ => SampleMethod::Exact,
        };
        self.sample_with(n, seed, method)
    }

    /// Draw `n` points with an explicit method. Hit-and-run is valid for
    /// every family (useful to cross-check the chain against exact
    /// samplers); `Exact` is invalid for `general_potential`.
    pub fn sample_with(&self, n: usize, seed: u64, method: SampleMethod) -> Result<SampleSet> {
        if n == 0 {
            return Err(Error::Empty("sample size"));
        }
        self.validate()?;
        let mut rng = rng::stream(seed, &[]);
        let points = match method {
            SampleMethod::Exact => self.sample_exact(n, &mut rng)?,
            SampleMethod::HitAndRun { burn_in, thinning } => {
                hit_and_run::run_chain(self, n, burn_in, thinning, &mut rng)?
            }
        };
        SampleSet::new(self.clone(), points, n, seed, method)
    }

    fn sample_exact(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let dim = self.dim();
        let mut points = Vec::with_capacity(n * dim);
        match self {
            StandardGaussian { .. } => {
                for _ in 0..n * dim {
                    points.push(StandardNormal.sample(rng));
                }
            }
            ProductExponential { lambdas, .. } => {
                for _ in 0..n {
                    for l in lambdas {
                        let mag: f64 = Exp1.sample(rng);
                        let flip: f64 = rng.random();
                        let sign = if flip < 0.5 { -1.0 } else { 1.0 };
                        points.push(sign * l * mag);
                    }
                }
            }
            UniformBox { lower, upper, .. } => {
                for _ in 0..n {
                    for (lo, hi) in lower.iter().zip(upper) {
                        let u: f64 = rng.random();
                        points.push(lo + (hi - lo) * u);
                    }
                }
            }
            UniformBall { dim, radius } => {
                let mut dir = vec![0.0; *dim];
                for _ in 0..n {
                    loop {
                        let mut norm2 = 0.0f64;
                        for d in dir.iter_mut() {
                            *d = StandardNormal.sample(rng);
                            norm2 += *d * *d;
                        }
                        if norm2 > 1e-300 {
                            let u: f64 = rng.random();
                            let r = radius * u.powf(1.0 / *dim as f64) / norm2.sqrt();
                            points.extend(dir.iter().map(|d| d * r));
                            break;
                        }
                    }
                }
            }
            GeneralPotential { .. } => {
                return Err(Error::InvalidParameter(
                    "general_potential has no exact sampler; use hit-and-run".into(),
                ));
            }
        }
        Ok(points)
    }
}

/// Piecewise data for a 1-D restriction of a log-density.
pub struct LineLogDensity<'a> {
    inner: LineKind<'a>,
}

enum LineKind<'a> {
    Quadratic { c0: f64, c1: f64, c2: f64 },
    Exponential { x: Vec<f64>, e: Vec<f64>, lambdas: &'a [f64], log_norm: f64 },
    Constant { level: f64 },
    Poly { neg_coeffs: Vec<f64> },
}

impl LineLogDensity<'_> {
    pub fn eval(&self, t: f64) -> f64 {
        match &self.inner {
            LineKind::Quadratic { c0, c1, c2 } => c0 + t * (c1 + t * c2),
            LineKind::Exponential { x, e, lambdas, log_norm } => {
                let mut s = 0.0;
                for i in 0..x.len() {
                    s += (x[i] + t * e[i]).abs() / lambdas[i];
                }
                -s - log_norm
            }
            LineKind::Constant { level } => *level,
            LineKind::Poly { neg_coeffs } => -poly::eval_univariate(neg_coeffs, t),
        }
    }
}

/// How a sample set was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleMethod {
    Exact,
    HitAndRun { burn_in: usize, thinning: usize },
}

/// Seeded draws from a measure, with enough provenance to regenerate them
/// bit-exactly.
#[derive(Debug, Clone)]
pub struct SampleSet {
    measure: LogConcaveMeasure,
    points: Vec<f64>, // row-major, n x dim
    n: usize,
    seed: u64,
    method: SampleMethod,
}

impl SampleSet {
    fn new(
        measure: LogConcaveMeasure,
        points: Vec<f64>,
        n: usize,
        seed: u64,
        method: SampleMethod,
    ) -> Result<Self> {
        debug_assert_eq!(points.len(), n * measure.dim());
        if let Some(index) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(SampleSet { measure, points, n, seed, method })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.measure.dim()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim())
    }

    pub fn measure(&self) -> &LogConcaveMeasure {
        &self.measure
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn method(&self) -> SampleMethod {
        self.method
    }

    /// Compact identity string used as provenance in downstream records.
    pub fn fingerprint(&self) -> String {
        let m = serde_json::to_string(&self.measure).expect("descriptor serializes");
        let method = serde_json::to_string(&self.method).expect("method serializes");
        format!("{m}|{method}|seed={}|n={}", self.seed, self.n)
    }

    /// Per-coordinate sample mean.
    pub fn mean(&self) -> Vec<f64> {
        let d = self.dim();
        let mut m = vec![0.0; d];
        for p in self.iter_points() {
            for (mi, &v) in m.iter_mut().zip(p) {
                *mi += v;
            }
        }
        for mi in m.iter_mut() {
            *mi /= self.n as f64;
        }
        m
    }

    /// Unbiased sample covariance, row-major d x d.
    pub fn covariance(&self) -> Vec<f64> {
        let d = self.dim();
        let mean = self.mean();
        let mut cov = vec![0.0; d * d];
        for p in self.iter_points() {
            for i in 0..d {
                let di = p[i] - mean[i];
                for j in i..d {
                    cov[i * d + j] += di * (p[j] - mean[j]);
                }
            }
        }
        let denom = (self.n - 1).max(1) as f64;
        for i in 0..d {
            for j in i..d {
                cov[i * d + j] /= denom;
                cov[j * d + i] = cov[i * d + j];
            }
        }
        cov
    }
}

/// Invertible affine change of variables `x -> matrix x + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    matrix: Vec<f64>, // row-major dim x dim
    shift: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let dim = shift.len();
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: matrix.len() });
        }
        let m = nalgebra::DMatrix::from_row_slice(dim, dim, &matrix);
        let det = m.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularCovariance);
        }
        Ok(AffineMap { matrix, shift })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut out = self.shift.clone();
        for i in 0..d {
            let row = &self.matrix[i * d..(i + 1) * d];
            out[i] += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        }
        out
    }

    /// Apply to every point of a sample set; returns row-major points.
    pub fn apply_points(&self, s: &SampleSet) -> Vec<f64> {
        let mut out = Vec::with_capacity(s.len() * self.dim());
        for p in s.iter_points() {
            out.extend(self.apply(p));
        }
        out
    }
}

/// Volume of the Euclidean ball of radius `r` in `dim` dimensions.
pub fn ball_volume(dim: usize, r: f64) -> f64 {
    // V_1 = 2r, V_2 = pi r^2, V_n = V_{n-2} * 2 pi r^2 / n
    match dim {
        0 => 1.0,
        1 => 2.0 * r,
        2 => std::f64::consts::PI * r * r,
        n => ball_volume(n - 2, r) * 2.0 * std::f64::consts::PI * r * r / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric;
    use crate::poly::parse;

    #[test]
    fn gaussian_density_at_origin() {
        let m = LogConcaveMeasure::standard_gaussian(1);
        let v = m.density(&[0.0]).unwrap();
        assert!((v - 0.3989422804014327).abs() < 1e-12);
    }

    #[test]
    fn box_density_is_indicator() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0], vec![1.0]).unwrap();
        assert_eq!(m.density(&[0.5]).unwrap(), 1.0);
        assert_eq!(m.density(&[2.0]).unwrap(), 0.0);
    }

    #[test]
    fn laplace_density_at_origin() {
        let m = LogConcaveMeasure::product_exponential(vec![1.0]).unwrap();
        assert!((m.density(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ball_volume_reference() {
        assert!((ball_volume(3, 1.0) - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!((ball_volume(4, 2.0) - 0.5 * std::f64::consts::PI.powi(2) * 16.0).abs() < 1e-9);
    }

    #[test]
    fn ball_density_normalizes() {
        let m = LogConcaveMeasure::uniform_ball(2, 2.0).unwrap();
        let inside = m.density(&[1.0, 0.5]).unwrap();
        assert!((inside - 1.0 / (std::f64::consts::PI * 4.0)).abs() < 1e-12);
        assert_eq!(m.density(&[2.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_sample_moments() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let n = 100_000;
        let s = m.sample(n, 2024).unwrap();
        let mean = s.mean();
        let bar = 3.0 / (n as f64).sqrt();
        assert!(mean.iter().all(|v| v.abs() < bar), "mean {mean:?}");
        let cov = s.covariance();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((cov[i * 2 + j] - want).abs() < 0.02, "cov {cov:?}");
            }
        }
    }

    #[test]
    fn box_sample_variance() {
        let m = LogConcaveMeasure::uniform_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let s = m.sample(100_000, 7).unwrap();
        let cov = s.covariance();
        assert!((cov[0] - 1.0 / 3.0).abs() < 0.01);
        assert!((cov[3] - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = LogConcaveMeasure::standard_gaussian(3);
        let a = m.sample(512, 99).unwrap();
        let b = m.sample(512, 99).unwrap();
        assert_eq!(a.points, b.points);
        let c = m.sample(512, 100).unwrap();
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn exponential_sample_variance() {
        // Var of symmetric exponential with scale lambda is 2 lambda^2.
        let m = LogConcaveMeasure::product_exponential(vec![1.0]).unwrap();
        let s = m.sample(200_000, 5).unwrap();
        let cov = s.covariance();
        assert!((cov[0] - 2.0).abs() < 0.05, "var {}", cov[0]);
    }

    #[test]
    fn ball_sample_radial_moment() {
        // E r^2 = R^2 * dim / (dim + 2)
        let m = LogConcaveMeasure::uniform_ball(3, 1.0).unwrap();
        let s = m.sample(100_000, 11).unwrap();
        let mean_r2: f64 =
            s.iter_points().map(|p| p.iter().map(|t| t * t).sum::<f64>()).sum::<f64>() / s.len() as f64;
        assert!((mean_r2 - 0.6).abs() < 0.01, "got {mean_r2}");
    }

    #[test]
    fn descriptor_round_trips() {
        let cases = vec![
            LogConcaveMeasure::standard_gaussian(2),
            LogConcaveMeasure::product_exponential(vec![1.0, 0.25]).unwrap(),
            LogConcaveMeasure::uniform_box(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap(),
            LogConcaveMeasure::uniform_ball(3, 0.75).unwrap(),
            LogConcaveMeasure::general_potential(parse("x1^2 + 0.5*x2^4", 2).unwrap(), 6.0, true).unwrap(),
        ];
        for m in cases {
            let text = serde_json::to_string(&m).unwrap();
            let back: LogConcaveMeasure = serde_json::from_str(&text).unwrap();
            assert_eq!(m, back);
            assert_eq!(text, serde_json::to_string(&back).unwrap());
        }
    }

    #[test]
    fn unknown_descriptor_fields_rejected() {
        let r: std::result::Result<LogConcaveMeasure, _> =
            serde_json::from_str(r#"{"family":"standard_gaussian","dim":2,"extra":1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn midpoint_log_concavity_all_families() {
        let potential = parse("0.5*x1^2 + 0.25*x1^4 + x2^2", 2).unwrap();
        let families = vec![
            LogConcaveMeasure::standard_gaussian(2),
            LogConcaveMeasure::product_exponential(vec![0.5, 2.0]).unwrap(),
            LogConcaveMeasure::uniform_box(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap(),
            LogConcaveMeasure::uniform_ball(2, 1.5).unwrap(),
            LogConcaveMeasure::general_potential(potential, 4.0, true).unwrap(),
        ];
        for m in families {
            let s = m.sample(2000, 31).unwrap();
            let mut checked = 0;
            for k in 0..1000 {
                let x = s.point(2 * k);
                let y = s.point(2 * k + 1);
                let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
                let lx = m.log_density(x).unwrap();
                let ly = m.log_density(y).unwrap();
                let lm = m.log_density(&mid).unwrap();
                if lx.is_finite() && ly.is_finite() {
                    assert!(lm >= 0.5 * (lx + ly) - 1e-9, "{m:?} at {x:?},{y:?}");
                    checked += 1;
                }
            }
            assert!(checked >= 900, "too few interior pairs for {m:?}");
        }
    }

    #[test]
    fn line_bracket_box_geometry() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let (lo, hi) = m.line_bracket(&[0.5, 1.0], &[1.0, 0.0]).unwrap();
        assert!((lo + 0.5).abs() < 1e-12 && (hi - 0.5).abs() < 1e-12);
        assert!(m.line_bracket(&[0.5, 3.0], &[1.0, 0.0]).is_none());
    }

    #[test]
    fn line_log_density_matches_pointwise() {
        let potential = parse("x1^2 + x1*x2 + x2^4", 2).unwrap();
        let measures = vec![
            LogConcaveMeasure::standard_gaussian(2),
            LogConcaveMeasure::product_exponential(vec![1.0, 3.0]).unwrap(),
            LogConcaveMeasure::general_potential(potential, 9.0, true).unwrap(),
        ];
        let x = [0.4, -0.2];
        let e = [0.6, 0.8];
        for m in measures {
            let line = m.line_log_density(&x, &e).unwrap();
            for k in 0..9 {
                let t = -2.0 + 0.5 * k as f64;
                let p = [x[0] + t * e[0], x[1] + t * e[1]];
                let direct = m.log_density(&p).unwrap();
                if direct.is_finite() {
                    assert!((line.eval(t) - direct).abs() < 1e-9, "{m:?} t={t}");
                }
            }
        }
    }

    #[test]
    fn projection_bounds_cover_sampled_mass() {
        let m = LogConcaveMeasure::product_exponential(vec![1.0, 1.0]).unwrap();
        let u = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        let (lo, hi) = m.projection_bounds(&u);
        let s = m.sample(10_000, 3).unwrap();
        for p in s.iter_points() {
            let y: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
            assert!(y > lo && y < hi);
        }
    }

    #[test]
    fn affine_map_rejects_singular_matrix() {
        assert!(AffineMap::new(vec![1.0, 2.0, 2.0, 4.0], vec![0.0, 0.0]).is_err());
        let id = AffineMap::new(vec![1.0, 0.0, 0.0, 1.0], vec![1.0, -1.0]).unwrap();
        assert_eq!(id.apply(&[2.0, 3.0]), vec![3.0, 2.0]);
    }

    #[test]
    fn normalized_density_integrates_to_one_1d() {
        for m in [
            LogConcaveMeasure::standard_gaussian(1),
            LogConcaveMeasure::product_exponential(vec![0.7]).unwrap(),
            LogConcaveMeasure::uniform_box(vec![-0.3], vec![0.9]).unwrap(),
        ] {
            let (lo, hi) = m.projection_bounds(&[1.0]);
            let total = numeric::integrate(|t| m.density(&[t]).unwrap(), lo, hi, 1e-10);
            assert!((total - 1.0).abs() < 1e-8, "{m:?} integrates to {total}");
        }
    }
}
