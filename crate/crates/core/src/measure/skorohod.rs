//! Total variation norm of the Skorohod derivative of a log-concave
//! measure along a unit vector:
//!
//! ```text
//! |D_e mu|_TV = 2 * integral over e-perp of  max_t density(x + t e)  dx
//! ```
//!
//! The outer integral runs as nested adaptive Simpson over an orthonormal
//! basis of the complement of `e`; the inner maximum along each fiber uses
//! the closed form for quadratic log-densities and scan-plus-golden-section
//! otherwise, which handles the indicator plateaus of compact supports.

use super::LogConcaveMeasure;
use crate::error::{Error, Result};
use crate::numeric;
use crate::poly::Direction;

const MAX_DIM: usize = 4;

pub fn skorohod_tv(measure: &LogConcaveMeasure, e: &Direction) -> Result<f64> {
    let dim = measure.dim();
    if e.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: e.dim() });
    }
    if !measure.is_normalized() {
        return Err(Error::UnnormalizedDensity);
    }
    if dim > MAX_DIM {
        return Err(Error::DimTooLarge { dim, max: MAX_DIM });
    }
    measure.validate()?;

    let e = e.components();
    if dim == 1 {
        return Ok(2.0 * fiber_max(measure, &[0.0], e));
    }

    let basis = complement_basis(e);
    let bounds: Vec<(f64, f64)> = basis.iter().map(|u| measure.projection_bounds(u)).collect();
    let tol = match dim {
        2 => 1e-9,
        3 => 1e-8,
        _ => 1e-7,
    };

    let y = vec![0.0; dim - 1];
    let integral = nested(measure, e, &basis, &bounds, y, 0, tol);
    Ok(2.0 * integral)
}

fn nested(
    measure: &LogConcaveMeasure,
    e: &[f64],
    basis: &[Vec<f64>],
    bounds: &[(f64, f64)],
    y: Vec<f64>,
    level: usize,
    tol: f64,
) -> f64 {
    let (lo, hi) = bounds[level];
    if level + 1 == bounds.len() {
        let dim = basis[0].len();
        let mut base = vec![0.0; dim];
        for (u_j, &yj) in basis[..level].iter().zip(&y[..level]) {
            for (bi, &ui) in base.iter_mut().zip(u_j) {
                *bi += yj * ui;
            }
        }
        let u = &basis[level];
        return numeric::integrate(
            move |t: f64| {
                let x: Vec<f64> = base.iter().zip(u).map(|(b, ui)| b + t * ui).collect();
                fiber_max(measure, &x, e)
            },
            lo,
            hi,
            tol,
        );
    }
    // Half the budget for this level's rule, half spread over the fibers.
    let inner_tol = 0.5 * tol / (hi - lo).max(1.0);
    numeric::integrate(
        |t: f64| {
            let mut y2 = y.clone();
            y2[level] = t;
            nested(measure, e, basis, bounds, y2, level + 1, inner_tol)
        },
        lo,
        hi,
        0.5 * tol,
    )
}

/// max over t of density(x + t e); 0 when the line misses the support.
/// The caller validated dimensions, so the restriction cannot fail.
fn fiber_max(measure: &LogConcaveMeasure, x: &[f64], e: &[f64]) -> f64 {
    let Some((lo, hi)) = measure.line_bracket(x, e) else {
        return 0.0;
    };
    let line = measure.line_log_density(x, e).expect("dims validated");
    let log_max = match measure {
        LogConcaveMeasure::StandardGaussian { .. } => {
            // Quadratic in t; the vertex is the max.
            let t0 = -x.iter().zip(e).map(|(a, b)| a * b).sum::<f64>();
            line.eval(t0.clamp(lo, hi))
        }
        LogConcaveMeasure::UniformBox { .. } | LogConcaveMeasure::UniformBall { .. } => {
            line.eval(0.5 * (lo + hi))
        }
        _ => numeric::golden_max(|t| line.eval(t), lo, hi, 1e-9 * (hi - lo).abs().max(1.0)).1,
    };
    if log_max == f64::NEG_INFINITY {
        0.0
    } else {
        log_max.exp()
    }
}

/// Orthonormal basis of the orthogonal complement of the unit vector `e`,
/// by Gram-Schmidt over the coordinate axes (deterministic).
fn complement_basis(e: &[f64]) -> Vec<Vec<f64>> {
    let dim = e.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(dim - 1);
    for axis in 0..dim {
        if basis.len() == dim - 1 {
            break;
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        let pe: f64 = v.iter().zip(e).map(|(a, b)| a * b).sum();
        for (vi, &ei) in v.iter_mut().zip(e) {
            *vi -= pe * ei;
        }
        for u in &basis {
            let pu: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            for (vi, &ui) in v.iter_mut().zip(u) {
                *vi -= pu * ui;
            }
        }
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
        }
    }
    assert_eq!(basis.len(), dim - 1, "failed to complete basis for {e:?}");
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LogConcaveMeasure;

    const SQRT_2_OVER_PI: f64 = 0.7978845608028654;

    #[test]
    fn gaussian_dim2_matches_closed_form_any_direction() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        for e in [
            Direction::axis(2, 0),
            Direction::new(vec![0.6, 0.8]).unwrap(),
            Direction::new(vec![-1.0, 3.0]).unwrap(),
        ] {
            let v = skorohod_tv(&m, &e).unwrap();
            assert!((v - SQRT_2_OVER_PI).abs() < 1e-6, "e {:?} -> {v}", e.components());
        }
    }

    #[test]
    fn gaussian_dim1_and_dim3_share_the_constant() {
        let v1 = skorohod_tv(&LogConcaveMeasure::standard_gaussian(1), &Direction::axis(1, 0)).unwrap();
        assert!((v1 - SQRT_2_OVER_PI).abs() < 1e-9, "{v1}");
        let e = Direction::new(vec![1.0, 1.0, -0.5]).unwrap();
        let v3 = skorohod_tv(&LogConcaveMeasure::standard_gaussian(3), &e).unwrap();
        assert!((v3 - SQRT_2_OVER_PI).abs() < 1e-5, "{v3}");
    }

    #[test]
    fn unit_box_axis_direction_is_two() {
        let m = LogConcaveMeasure::uniform_box(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let v = skorohod_tv(&m, &Direction::axis(2, 0)).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn box_dim4_axis_direction() {
        // [0,1] x [0,2] x [0,1] x [0,1], e = e2: 2 * (1/vol) * vol(e-perp box)
        // = 2 * (1/2) * 1 = 1.
        let m = LogConcaveMeasure::uniform_box(vec![0.0; 4], vec![1.0, 2.0, 1.0, 1.0]).unwrap();
        let v = skorohod_tv(&m, &Direction::axis(4, 1)).unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{v}");
    }

    #[test]
    fn product_measure_reduces_by_fubini() {
        // product of two Laplace(1): along e1 the fiber max is the 1-D max
        // 1/2, so the norm equals the 1-D value 2 * 1/2 = 1.
        let m = LogConcaveMeasure::product_exponential(vec![1.0, 1.0]).unwrap();
        let v = skorohod_tv(&m, &Direction::axis(2, 0)).unwrap();
        let v1 = skorohod_tv(
            &LogConcaveMeasure::product_exponential(vec![1.0]).unwrap(),
            &Direction::axis(1, 0),
        )
        .unwrap();
        assert!((v1 - 1.0).abs() < 1e-9, "{v1}");
        assert!((v - v1).abs() < 1e-6, "{v} vs {v1}");
    }

    #[test]
    fn invariant_under_sign_flip_and_coordinate_permutation() {
        let m = LogConcaveMeasure::product_exponential(vec![0.5, 0.5]).unwrap();
        let e = Direction::new(vec![0.6, 0.8]).unwrap();
        let a = skorohod_tv(&m, &e).unwrap();
        let b = skorohod_tv(&m, &e.negate()).unwrap();
        assert!((a - b).abs() < 1e-9);
        // Permuting coordinates of a symmetric product measure together
        // with e leaves the value unchanged.
        let e_perm = Direction::new(vec![0.8, 0.6]).unwrap();
        let c = skorohod_tv(&m, &e_perm).unwrap();
        assert!((a - c).abs() < 1e-7, "{a} vs {c}");
    }

    #[test]
    fn rejects_unnormalized_and_oversized() {
        let v = crate::poly::parse("x1^2", 1).unwrap();
        let gp = LogConcaveMeasure::general_potential(v, 3.0, true).unwrap();
        assert!(matches!(
            skorohod_tv(&gp, &Direction::axis(1, 0)),
            Err(Error::UnnormalizedDensity)
        ));
        let m = LogConcaveMeasure::standard_gaussian(5);
        assert!(matches!(
            skorohod_tv(&m, &Direction::axis(5, 0)),
            Err(Error::DimTooLarge { dim: 5, max: 4 })
        ));
    }
}
