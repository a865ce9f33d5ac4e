//! Iterative radix-2 Cooley-Tukey FFT.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::DspError;

/// A planned transform of one power-of-two size. Twiddles are evaluated
/// directly with `cos`/`sin` rather than by recurrence, which keeps the
/// round-trip error near machine precision.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self, DspError> {
        if n == 0 || !n.is_power_of_two() {
            return Err(DspError::NonPowerOfTwoLength(n));
        }
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Self { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In place. Forward: `Z[k] = sum z[n] e^{-2 pi i k n / N}`; inverse uses
    /// the conjugate kernel and scales by `1/N`.
    pub fn process(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(buf.len(), n, "buffer length does not match plan");
        if n == 1 {
            return;
        }

        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if i < j {
                buf.swap(i, j);
            }
        }

        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let mut w = self.twiddles[k * stride];
                    if inverse {
                        w = w.conj();
                    }
                    let u = buf[start + k];
                    let v = buf[start + k + half] * w;
                    buf[start + k] = u + v;
                    buf[start + k + half] = u - v;
                }
            }
            size *= 2;
        }

        if inverse {
            let scale = 1.0 / n as f64;
            for z in buf.iter_mut() {
                *z *= scale;
            }
        }
    }
}

pub fn fft(z: &[Complex64], inverse: bool) -> Result<Vec<Complex64>, DspError> {
    let plan = Fft::new(z.len())?;
    let mut buf = z.to_vec();
    plan.process(&mut buf, inverse);
    Ok(buf)
}
