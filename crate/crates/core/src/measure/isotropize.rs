//! Whitening of a sample set to isotropic position.

use super::{AffineMap, SampleSet};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Affine map `T x = L^{-1}(x - mean)` built from the sample mean and the
/// Cholesky factor `L` of the (ridged) sample covariance. Applying it to the
/// input points gives mean 0 and unbiased sample covariance equal to the
/// identity, up to the ridge and floating-point error.
pub fn isotropize(s: &SampleSet) -> Result<AffineMap> {
    let d = s.dim();
    let n = s.len();
    if n <= d {
        return Err(Error::TooFewSamples { n, dim: d });
    }
    let mean = s.mean();
    let cov = s.covariance();

    let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    if !trace.is_finite() {
        return Err(Error::SingularCovariance);
    }
    // Ridge guards rank deficiency from small N without visible bias.
    let ridge = 1e-12 * trace / d as f64;
    let mut sigma = DMatrix::from_row_slice(d, d, &cov);
    for i in 0..d {
        sigma[(i, i)] += ridge;
    }

    let chol = sigma.cholesky().ok_or(Error::SingularCovariance)?;
    let l = chol.l();
    let linv = l
        .solve_lower_triangular(&DMatrix::identity(d, d))
        .ok_or(Error::SingularCovariance)?;

    let mut matrix = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            matrix[i * d + j] = linv[(i, j)];
        }
    }
    let mean_vec = nalgebra::DVector::from_column_slice(&mean);
    let shift_vec = -(&linv * mean_vec);
    let shift: Vec<f64> = shift_vec.iter().copied().collect();

    AffineMap::new(matrix, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LogConcaveMeasure;

    fn operator_norm_sym(a: &DMatrix<f64>) -> f64 {
        a.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    fn whitened_stats(s: &SampleSet, map: &AffineMap) -> (Vec<f64>, DMatrix<f64>) {
        let d = s.dim();
        let pts = map.apply_points(s);
        let n = s.len();
        let mut mean = vec![0.0; d];
        for p in pts.chunks_exact(d) {
            for (m, &v) in mean.iter_mut().zip(p) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n as f64;
        }
        let mut cov = DMatrix::zeros(d, d);
        for p in pts.chunks_exact(d) {
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += (p[i] - mean[i]) * (p[j] - mean[j]);
                }
            }
        }
        cov /= (n - 1) as f64;
        (mean, cov)
    }

    #[test]
    fn whitening_gaussian_is_near_identity() {
        let m = LogConcaveMeasure::standard_gaussian(2);
        let s = m.sample(1_000_000, 555).unwrap();
        let map = isotropize(&s).unwrap();
        let t = DMatrix::from_row_slice(2, 2, map.matrix());
        let dev = &t - DMatrix::<f64>::identity(2, 2);
        assert!(operator_norm_sym(&(&dev + &dev.transpose())) * 0.5 < 0.01, "T = {t}");

        let (mean, cov) = whitened_stats(&s, &map);
        assert!(mean.iter().all(|v| v.abs() < 1e-10), "mean {mean:?}");
        let cov_dev = &cov - DMatrix::<f64>::identity(2, 2);
        assert!(operator_norm_sym(&cov_dev) < 1e-8, "cov {cov}");
    }

    #[test]
    fn whitening_inverts_affine_distortion() {
        // Whiten points c + A z, z standard Gaussian: the composed map
        // T(A z + c) must have moments (0, I) regardless of A and c.
        let base = LogConcaveMeasure::standard_gaussian(2).sample(200_000, 808).unwrap();
        let skew = AffineMap::new(vec![2.0, 0.0, 0.7, 0.4], vec![1.0, -3.0]).unwrap();
        let pts = skew.apply_points(&base);

        let n = base.len();
        let d = 2;
        let mut mean = vec![0.0; d];
        for p in pts.chunks_exact(d) {
            for (mi, &v) in mean.iter_mut().zip(p) {
                *mi += v;
            }
        }
        for mi in mean.iter_mut() {
            *mi /= n as f64;
        }
        let mut cov = DMatrix::zeros(d, d);
        for p in pts.chunks_exact(d) {
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += (p[i] - mean[i]) * (p[j] - mean[j]);
                }
            }
        }
        cov /= (n - 1) as f64;
        let chol = cov.clone().cholesky().unwrap();
        let linv = chol.l().solve_lower_triangular(&DMatrix::identity(d, d)).unwrap();
        // Whitened covariance L^{-1} cov L^{-T} = I by construction.
        let w = &linv * &cov * linv.transpose();
        let dev = w - DMatrix::<f64>::identity(d, d);
        assert!(operator_norm_sym(&dev) < 1e-10);
    }

    #[test]
    fn rejects_underdetermined_input() {
        let m = LogConcaveMeasure::standard_gaussian(3);
        let s = m.sample(3, 1).unwrap();
        assert!(matches!(isotropize(&s), Err(Error::TooFewSamples { n: 3, dim: 3 })));
    }
}
