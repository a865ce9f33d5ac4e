use std::f64::consts::PI;

use super::DspError;
use crate::matrix::Matrix;

/// Precomputed orthonormal DCT-II basis, truncated to the first `n_out` rows.
#[derive(Debug, Clone)]
pub struct DctBasis {
    basis: Matrix,
}

impl DctBasis {
    pub fn new(n_in: usize, n_out: usize) -> Result<Self, DspError> {
        if n_in == 0 || n_out > n_in {
            return Err(DspError::InvalidConfig(format!(
                "DCT output length {n_out} exceeds input length {n_in}"
            )));
        }
        let n = n_in as f64;
        let mut basis = Matrix::zeros(n_out, n_in);
        for k in 0..n_out {
            let alpha = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            for i in 0..n_in {
                basis[(k, i)] = alpha * (PI * (2 * i + 1) as f64 * k as f64 / (2.0 * n)).cos();
            }
        }
        Ok(Self { basis })
    }

    pub fn n_in(&self) -> usize {
        self.basis.cols()
    }

    pub fn n_out(&self) -> usize {
        self.basis.rows()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_in(), "DCT input length mismatch");
        self.basis
            .iter_rows()
            .map(|row| row.iter().zip(x).map(|(b, v)| b * v).sum())
            .collect()
    }
}

/// `c[k] = alpha(k) sum_n x[n] cos(pi (2n+1) k / 2N)` for `k < n_out`, with
/// `alpha(0) = sqrt(1/N)` and `alpha(k) = sqrt(2/N)` otherwise.
pub fn dct_ii(x: &[f64], n_out: usize) -> Result<Vec<f64>, DspError> {
    Ok(DctBasis::new(x.len(), n_out)?.apply(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_input_has_only_dc() {
        let c = dct_ii(&[3.0; 16], 16).unwrap();
        assert!((c[0] - 3.0 * 4.0).abs() < 1e-12);
        assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn linearity() {
        let x: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let scaled: Vec<f64> = x.iter().map(|v| -2.5 * v).collect();
        let (a, b) = (dct_ii(&x, 12).unwrap(), dct_ii(&scaled, 12).unwrap());
        for (p, q) in a.iter().zip(&b) {
            assert!((q + 2.5 * p).abs() < 1e-12);
        }
    }

    #[test]
    fn too_many_outputs() {
        assert!(dct_ii(&[1.0, 2.0], 3).is_err());
    }
}
