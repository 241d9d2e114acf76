//! Sparse multivariate polynomials over f64.
//!
//! A polynomial is a map from exponent vectors to coefficients; terms with a
//! zero coefficient are never stored, and the maximum total degree is cached.
//! Iteration order is graded-lexicographic (total degree first, then
//! lexicographic on the exponent vector), which makes formatting and random
//! generation deterministic.

mod parse;

pub use parse::parse;

use crate::error::{Error, Result};
use crate::rng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial in `dim` variables.
///
/// Serializes as `{"dim": n, "text": "<canonical form>"}`; the canonical
/// text prints coefficients with 17 significant digits, so the round trip
/// is bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, f64>,
    degree: u32,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            dim: usize,
            text: &'a str,
        }
        let text = self.format();
        Repr { dim: self.dim, text: &text }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            dim: usize,
            text: String,
        }
        let repr = Repr::deserialize(deserializer)?;
        parse(&repr.text, repr.dim).map_err(D::Error::custom)
    }
}

impl Polynomial {
    /// The zero polynomial (degree 0 by convention).
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Polynomial { dim, terms: BTreeMap::new(), degree: 0 }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        if c != 0.0 {
            p.terms.insert(Monomial(vec![0; dim]), c);
        }
        p
    }

    /// The variable x_{i+1} (zero-based index).
    pub fn variable(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index out of range");
        let mut exps = vec![0u32; dim];
        exps[i] = 1;
        let mut p = Self::zero(dim);
        p.terms.insert(Monomial(exps), 1.0);
        p.degree = 1;
        p
    }

    /// Build from raw (exponents, coefficient) pairs; zero coefficients are
    /// dropped and duplicate exponent vectors accumulate.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (exps, c) in terms {
            if exps.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: exps.len() });
            }
            p.accumulate(Monomial(exps), c);
        }
        p.recompute_degree();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Max total degree of stored terms; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.degree == 0
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, exps: &[u32]) -> f64 {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(0.0)
    }

    fn accumulate(&mut self, m: Monomial, c: f64) {
        if c == 0.0 {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let v = e.get() + c;
                if v == 0.0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    fn recompute_degree(&mut self) {
        self.degree = self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0);
    }

    fn check_dim(&self, other: &Polynomial) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    /// Value at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut acc = 0.0;
        for (m, c) in self.terms() {
            let mut t = c;
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t *= xi.powi(e as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.accumulate(m.clone(), c);
        }
        out.recompute_degree();
        Ok(out)
    }

    pub fn subtract(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, lambda: f64) -> Polynomial {
        if lambda == 0.0 {
            return Polynomial::zero(self.dim);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= lambda;
        }
        out
    }

    pub fn multiply(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                let exps: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                out.accumulate(Monomial(exps), ca * cb);
            }
        }
        out.recompute_degree();
        Ok(out)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::constant(self.dim, 1.0);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.multiply(&base).expect("same dim");
            }
            k >>= 1;
            if k > 0 {
                base = base.multiply(&base).expect("same dim");
            }
        }
        result
    }

    /// Partial derivative with respect to x_{i+1}.
    pub fn partial(&self, i: usize) -> Polynomial {
        assert!(i < self.dim, "variable index out of range");
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in self.terms() {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] = e - 1;
            out.accumulate(Monomial(exps), c * f64::from(e));
        }
        out.recompute_degree();
        out
    }

    /// Gradient as a vector of polynomials.
    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.partial(i)).collect()
    }

    /// Directional derivative sum_i e_i dp/dx_i.
    pub fn directional_derivative(&self, e: &Direction) -> Result<Polynomial> {
        if e.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: e.dim() });
        }
        let mut out = Polynomial::zero(self.dim);
        for (i, &ei) in e.components().iter().enumerate() {
            if ei != 0.0 {
                out = out.add(&self.partial(i).scale(ei))?;
            }
        }
        Ok(out)
    }

    /// Coefficients of the univariate polynomial `t -> p(x + t*e)`,
    /// ascending in `t`. Lets line-restricted evaluations run in O(degree)
    /// instead of a full sparse eval; the hit-and-run inner loop and the
    /// Skorohod quadrature live on this.
    pub fn restrict_to_line(&self, x: &[f64], e: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim || e.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len().max(e.len()) });
        }
        let mut out = vec![0.0; self.degree as usize + 1];
        let mut term_buf: Vec<f64> = Vec::new();
        let mut factor_buf: Vec<f64> = Vec::new();
        for (m, c) in self.terms() {
            term_buf.clear();
            term_buf.push(c);
            for (i, &a) in m.0.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                // (x_i + t e_i)^a by binomial expansion
                factor_buf.clear();
                let mut binom = 1.0f64;
                for j in 0..=a {
                    let coeff = binom * x[i].powi((a - j) as i32) * e[i].powi(j as i32);
                    factor_buf.push(coeff);
                    binom = binom * f64::from(a - j) / f64::from(j + 1);
                }
                term_buf = convolve(&term_buf, &factor_buf);
            }
            for (k, &v) in term_buf.iter().enumerate() {
                out[k] += v;
            }
        }
        Ok(out)
    }

    /// Canonical text form: graded-lex from the highest term down, explicit
    /// `*`, coefficients with 17 significant digits (reparses bit-exactly).
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = *c < 0.0 || (*c == 0.0 && c.is_sign_negative());
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&format_coefficient(c.abs()));
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                out.push_str(&format!("*x{}", i + 1));
                if e > 1 {
                    out.push_str(&format!("^{e}"));
                }
            }
        }
        out
    }
}

fn format_coefficient(c: f64) -> String {
    // 17 significant digits in scientific notation round-trips every f64.
    format!("{c:.16e}")
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Evaluate ascending coefficients at `t` (Horner).
pub fn eval_univariate(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// Unit vector in R^dim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    components: Vec<f64>,
}

impl Direction {
    /// Normalizes `v` to unit Euclidean length.
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty("direction"));
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidParameter("direction must be a nonzero finite vector".into()));
        }
        let components = v.into_iter().map(|c| c / norm).collect();
        Ok(Direction { components })
    }

    /// The i-th coordinate axis (zero-based).
    pub fn axis(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Direction { components: v }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    /// Flip the sign of every component.
    pub fn negate(&self) -> Self {
        Direction { components: self.components.iter().map(|c| -c).collect() }
    }
}

/// Exponent vectors of all monomials in `dim` variables with total degree
/// at most `degree`, in graded-lex order.
pub fn monomials_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=degree {
        let mut current = vec![0u32; dim];
        fill(&mut out, &mut current, 0, total);
    }
    return out;

    fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
        if pos + 1 == current.len() {
            current[pos] = remaining;
            out.push(current.clone());
            current[pos] = 0;
            return;
        }
        for e in 0..=remaining {
            current[pos] = e;
            fill(out, current, pos + 1, remaining - e);
        }
        current[pos] = 0;
    }
}

/// Random polynomial of exact total degree `degree`: every monomial of total
/// degree <= `degree` gets an independent uniform coefficient in
/// `[-coefficient_scale, coefficient_scale]`. If every top-degree coefficient
/// drew zero, the top block is redrawn.
pub fn random_polynomial(dim: usize, degree: u32, coefficient_scale: f64, rng: &mut ChaCha8Rng) -> Polynomial {
    assert!(dim >= 1);
    let monomials = monomials_up_to(dim, degree);
    let mut p = Polynomial::zero(dim);
    loop {
        for exps in &monomials {
            let m = Monomial(exps.clone());
            if degree > 0 && m.total_degree() < degree && p.terms.contains_key(&m) {
                continue; // lower block kept across a top-block redraw
            }
            let c = rng::symmetric_uniform(rng, coefficient_scale);
            if c != 0.0 {
                p.terms.insert(m, c);
            }
        }
        p.recompute_degree();
        if degree == 0 || p.degree == degree {
            return p;
        }
        // Probability-zero branch: all top-degree coefficients were 0.0.
        let lower: BTreeMap<Monomial, f64> = p
            .terms
            .iter()
            .filter(|(m, _)| m.total_degree() < degree)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        p.terms = lower;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn poly(text: &str, dim: usize) -> Polynomial {
        parse(text, dim).unwrap()
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Monomial(vec![0, 2]);
        let b = Monomial(vec![1, 0]);
        let c = Monomial(vec![1, 1]);
        assert!(b < a, "degree 1 before degree 2");
        assert!(a < c, "(0,2) before (1,1) lexicographically");
    }

    #[test]
    fn eval_direct_substitution() {
        let p = poly("x1^2*x2", 2);
        assert_eq!(p.eval(&[2.0, 3.0]).unwrap(), 12.0);
        assert_eq!(Polynomial::zero(3).eval(&[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(poly("(x1+x2)^2", 2).eval(&[1.0, 1.0]).unwrap(), 4.0);
    }

    #[test]
    fn eval_rejects_wrong_dimension() {
        let p = poly("x1", 2);
        assert!(matches!(p.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn subtract_self_is_zero() {
        let p = poly("1.5*x1^3 - x2 + 4", 2);
        let z = p.subtract(&p).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
    }

    #[test]
    fn scale_by_zero_is_zero() {
        let p = poly("x1^2 + 7", 1);
        assert!(p.scale(0.0).is_zero());
    }

    #[test]
    fn multiply_variables() {
        let x1 = Polynomial::variable(2, 0);
        let x2 = Polynomial::variable(2, 1);
        let p = x1.multiply(&x2).unwrap();
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coefficient(&[1, 1]), 1.0);
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn product_degree_adds() {
        let p = poly("x1^2 + 1", 2);
        let q = poly("x2^3 - x1", 2);
        assert_eq!(p.multiply(&q).unwrap().degree(), p.degree() + q.degree());
    }

    #[test]
    fn coordinate_directional_derivative() {
        let p = poly("x1^2*x2", 2);
        let d = p.directional_derivative(&Direction::axis(2, 0)).unwrap();
        assert_eq!(d, poly("2*x1*x2", 2));
    }

    #[test]
    fn constant_has_zero_derivative() {
        let c = Polynomial::constant(3, 5.0);
        let e = Direction::new(vec![1.0, 2.0, -1.0]).unwrap();
        assert!(c.directional_derivative(&e).unwrap().is_zero());
    }

    #[test]
    fn diagonal_directional_derivative() {
        // d_e(x1^2) with e = (1/sqrt2, 1/sqrt2) is sqrt(2) x1.
        let p = poly("x1^2", 2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let e = Direction::new(vec![s, s]).unwrap();
        let d = p.directional_derivative(&e).unwrap();
        let got = d.coefficient(&[1, 0]);
        assert!((got - std::f64::consts::SQRT_2).abs() < 1e-15);

        // Finite-difference oracle at 5 points.
        let mut rng = stream(11, &[0]);
        for _ in 0..5 {
            let x = [rng::symmetric_uniform(&mut rng, 10.0), rng::symmetric_uniform(&mut rng, 10.0)];
            let h = 1e-5;
            let xp = [x[0] + h * s, x[1] + h * s];
            let xm = [x[0] - h * s, x[1] - h * s];
            let fd = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
            let v = d.eval(&x).unwrap();
            let denom = v.abs().max(1.0);
            assert!((fd - v).abs() / denom < 1e-6, "fd {fd} vs {v}");
        }
    }

    #[test]
    fn gradient_components() {
        let p = poly("x1*x2", 2);
        let g = p.gradient();
        assert_eq!(g[0], poly("x2", 2));
        assert_eq!(g[1], poly("x1", 2));
        assert!(Polynomial::constant(2, 3.0).gradient().iter().all(Polynomial::is_zero));
        let lin = poly("x1 + x2", 2);
        assert!(lin.gradient().iter().all(|q| q.is_constant()));
    }

    #[test]
    fn monomial_enumeration_counts() {
        // C(dim + degree, degree) monomials up to total degree.
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        assert_eq!(monomials_up_to(3, 2).len(), 10);
        assert_eq!(monomials_up_to(1, 0), vec![vec![0]]);
    }

    #[test]
    fn random_polynomial_shape_and_determinism() {
        let mut r1 = stream(7, &[]);
        let p = random_polynomial(2, 2, 1.0, &mut r1);
        assert_eq!(p.degree(), 2);
        assert!(p.num_terms() <= 6);

        let mut r2 = stream(7, &[]);
        let q = random_polynomial(2, 2, 1.0, &mut r2);
        assert_eq!(p, q);

        let mut r3 = stream(8, &[]);
        let c = random_polynomial(1, 0, 1.0, &mut r3);
        assert!(c.is_constant());
    }

    #[test]
    fn line_restriction_matches_direct_eval() {
        let mut rng = stream(21, &[4]);
        for _ in 0..20 {
            let p = random_polynomial(3, 4, 1.0, &mut rng);
            let x = [0.3, -1.2, 0.7];
            let e = [0.5, 0.5, -std::f64::consts::FRAC_1_SQRT_2];
            let coeffs = p.restrict_to_line(&x, &e).unwrap();
            for k in 0..7 {
                let t = -1.5 + 0.5 * k as f64;
                let pt = [x[0] + t * e[0], x[1] + t * e[1], x[2] + t * e[2]];
                let direct = p.eval(&pt).unwrap();
                let restricted = eval_univariate(&coeffs, t);
                assert!((direct - restricted).abs() <= 1e-9 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn format_round_trips_bit_exactly() {
        let mut rng = stream(3, &[1]);
        for _ in 0..50 {
            let p = random_polynomial(3, 3, 2.5, &mut rng);
            let back = parse(&p.format(), 3).unwrap();
            assert_eq!(p, back, "text was {}", p.format());
        }
        assert_eq!(Polynomial::zero(2).format(), "0");
    }
}
