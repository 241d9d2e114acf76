//! Shared scalar numerics: adaptive Simpson quadrature, golden-section
//! maximization, log-sum-exp, the standard normal CDF and a couple of
//! small statistics helpers used by the checkers and their oracles.

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// x^(1/d) for x >= 0, exact-rounding paths for small d.
///
/// `sqrt` is correctly rounded, `powf` is not; using it for d in {1,2,4}
/// keeps scale equivariance of checker ratios bit-exact under power-of-two
/// rescaling.
pub fn nth_root(x: f64, d: u32) -> f64 {
    match d {
        0 => f64::NAN,
        1 => x,
        2 => x.sqrt(),
        3 => x.cbrt(),
        4 => x.sqrt().sqrt(),
        _ => x.powf(1.0 / f64::from(d)),
    }
}

fn simpson_estimate(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

struct Adaptive<'a> {
    f: &'a dyn Fn(f64) -> f64,
    max_depth: u32,
    // Force subdivision while the signed integrand changes sign inside an
    // interval; used for |p - q| whose kinks defeat the error estimate.
    sign: Option<&'a dyn Fn(f64) -> f64>,
}

impl Adaptive<'_> {
    fn recurse(&self, a: f64, fa: f64, m: f64, fm: f64, b: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let ml = 0.5 * (a + m);
        let mr = 0.5 * (m + b);
        let fml = (self.f)(ml);
        let fmr = (self.f)(mr);
        let left = simpson_estimate(fa, fml, fm, m - a);
        let right = simpson_estimate(fm, fmr, fb, b - m);
        let err = left + right - whole;

        let mut force = false;
        if let Some(sig) = self.sign {
            if depth < self.max_depth.saturating_sub(16) {
                let s = [sig(a), sig(ml), sig(m), sig(mr), sig(b)];
                let pos = s.iter().any(|&v| v > 0.0);
                let neg = s.iter().any(|&v| v < 0.0);
                force = pos && neg;
            }
        }

        if depth >= self.max_depth || (!force && err.abs() <= 15.0 * tol) {
            return left + right + err / 15.0;
        }
        let half = 0.5 * tol;
        self.recurse(a, fa, ml, fml, m, fm, left, half, depth + 1)
            + self.recurse(m, fm, mr, fmr, b, fb, right, half, depth + 1)
    }

    fn run(&self, a: f64, b: f64, tol: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        // Seed with a few panels so isolated features are not missed.
        let panels = 8;
        let mut total = 0.0;
        let w = (b - a) / panels as f64;
        for k in 0..panels {
            let lo = a + w * k as f64;
            let hi = if k + 1 == panels { b } else { a + w * (k + 1) as f64 };
            let mid = 0.5 * (lo + hi);
            let (fa, fm, fb) = ((self.f)(lo), (self.f)(mid), (self.f)(hi));
            let whole = simpson_estimate(fa, fm, fb, hi - lo);
            total += self.recurse(lo, fa, mid, fm, hi, fb, whole, tol / panels as f64, 0);
        }
        total
    }
}

// Deep enough that an integrable endpoint singularity (such as t^{-1/2})
// runs out of representable interval width before the cap bites.
const MAX_QUAD_DEPTH: u32 = 61;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let adaptive = Adaptive { f: &f, max_depth: MAX_QUAD_DEPTH, sign: None };
    adaptive.run(a, b, tol)
}

/// Adaptive Simpson integration of `|signed|` with forced subdivision across
/// sign changes of `signed`.
pub fn integrate_abs(signed: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let f = |t: f64| signed(t).abs();
    let adaptive = Adaptive { f: &f, max_depth: MAX_QUAD_DEPTH, sign: Some(&signed) };
    adaptive.run(a, b, tol)
}

/// Maximum of a quasi-concave function on `[a, b]`.
///
/// A coarse scan brackets the mode first so that plateaus at -inf (log of an
/// indicator density) cannot strand the golden-section step; golden section
/// then refines inside the bracket. Returns `(argmax, max)`.
pub fn golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    if !(b > a) {
        return (a, f(a));
    }
    let scan = 64usize;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    let step = (b - a) / scan as f64;
    for i in 0..=scan {
        let x = if i == scan { b } else { a + step * i as f64 };
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = a + step * (best_i.saturating_sub(1)) as f64;
    let mut hi = (a + step * (best_i + 1) as f64).min(b);

    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INVPHI * (hi - lo);
    let mut x2 = lo + INVPHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INVPHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INVPHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (lo + hi);
    let fm = f(xm);
    if fm >= best {
        (xm, fm)
    } else {
        (a + step * best_i as f64, best)
    }
}

/// log(sum(exp(x_i))) without overflow; -inf for an empty or all -inf input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Two-sided Kolmogorov-Smirnov statistic of `samples` against the CDF `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((c - lo).abs()).max((hi - c).abs());
    }
    d
}

/// Critical value of the two-sided KS statistic at level `alpha`, asymptotic.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    // K_alpha with P(D_n > K_alpha / sqrt(n)) = alpha.
    let k = (-0.5 * (alpha / 2.0).ln()).sqrt();
    k / (n as f64).sqrt()
}

/// Least-squares slope of `ln y` against `ln x`. Pairs with a non-positive
/// entry are skipped; needs at least two usable pairs.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Mean and unbiased variance of a slice (variance 0 for length < 2).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1) as f64)
}
