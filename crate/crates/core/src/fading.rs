//! Log-normal shadow fading: independent draws for drop statistics and
//! spatially correlated 2-D fields for single-instant coverage maps.
//!
//! Fields are synthesized by circulant embedding: the target exponential
//! autocorrelation is laid out on a padded torus, its 2-D spectrum gives the
//! filter gain per frequency, and white Gaussian noise shaped by the square
//! root of that spectrum has exactly the target autocorrelation away from the
//! wrap-around seam. The padding (four correlation distances) keeps the seam
//! outside the cropped grid.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FadingError {
    #[error("correlation distance {d_corr_m} m is below the grid resolution {resolution_m} m")]
    CorrelationDistance { d_corr_m: f64, resolution_m: f64 },
    #[error("sigma must be non-negative, got {0}")]
    Sigma(f64),
    #[error("field dimensions must be non-zero")]
    EmptyField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFading {
    pub sigma_db: f64,
    pub d_corr_m: f64,
}

/// Per-scenario shadow statistics. The indoor layer is unit-variance; its
/// sigma comes from the penetration model of the building it lands in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingSpec {
    pub los: ScenarioFading,
    pub nlos: ScenarioFading,
    pub indoor_d_corr_m: f64,
}

impl Default for FadingSpec {
    fn default() -> Self {
        Self {
            los: ScenarioFading { sigma_db: 7.1, d_corr_m: 37.0 },
            nlos: ScenarioFading { sigma_db: 7.1, d_corr_m: 50.0 },
            indoor_d_corr_m: 10.0,
        }
    }
}

/// Zero-mean Gaussian sample with standard deviation `sigma_db`.
pub fn draw_iid<R: Rng + ?Sized>(sigma_db: f64, rng: &mut R) -> f64 {
    if sigma_db == 0.0 {
        return 0.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    sigma_db * z
}

/// Row-major field of shadow values in dB over an `nx` by `ny` lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl FadingField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Value at the lattice cell nearest to `(x, y)` meters, clamped to the grid.
    pub fn at_point(&self, x: f64, y: f64, resolution_m: f64) -> f64 {
        let i = ((x / resolution_m).round().max(0.0) as usize).min(self.nx - 1);
        let j = ((y / resolution_m).round().max(0.0) as usize).min(self.ny - 1);
        self.at(i, j)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn std(&self) -> f64 {
        let m = self.mean();
        (self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / self.values.len() as f64).sqrt()
    }
}

/// Reusable synthesizer for one `(dims, resolution, d_corr)` combination.
pub struct FieldGenerator {
    nx: usize,
    ny: usize,
    px: usize,
    py: usize,
    amplitude: Vec<f64>,
    row_fft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FieldGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldGenerator")
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .field("px", &self.px)
            .field("py", &self.py)
            .finish()
    }
}

impl FieldGenerator {
    pub fn new(nx: usize, ny: usize, resolution_m: f64, d_corr_m: f64) -> Result<Self, FadingError> {
        if nx == 0 || ny == 0 {
            return Err(FadingError::EmptyField);
        }
        if d_corr_m < resolution_m {
            return Err(FadingError::CorrelationDistance { d_corr_m, resolution_m });
        }
        let pad = (4.0 * d_corr_m / resolution_m).ceil() as usize;
        let (px, py) = (nx + pad, ny + pad);
        let mut planner = FftPlanner::<f64>::new();
        let row_fft = planner.plan_fft_forward(px);
        let col_fft = planner.plan_fft_forward(py);

        let mut cov = vec![Complex64::new(0.0, 0.0); px * py];
        for j in 0..py {
            let dy = j.min(py - j) as f64;
            for i in 0..px {
                let dx = i.min(px - i) as f64;
                let r = resolution_m * dx.hypot(dy);
                cov[j * px + i] = Complex64::new((-r / d_corr_m).exp(), 0.0);
            }
        }
        fft2(&mut cov, px, py, &row_fft, &col_fft);
        let n = (px * py) as f64;
        // Small negative eigenvalues from the truncated embedding are dropped.
        let amplitude = cov.iter().map(|c| (c.re.max(0.0) / n).sqrt()).collect();
        Ok(Self { nx, ny, px, py, amplitude, row_fft, col_fft })
    }

    /// Field with the target correlation, rescaled so its empirical standard
    /// deviation equals `sigma_db` exactly.
    pub fn generate<R: Rng + ?Sized>(&self, sigma_db: f64, rng: &mut R) -> Result<FadingField, FadingError> {
        if sigma_db < 0.0 {
            return Err(FadingError::Sigma(sigma_db));
        }
        let mut buf: Vec<Complex64> = self
            .amplitude
            .iter()
            .map(|a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(a * re, a * im)
            })
            .collect();
        fft2(&mut buf, self.px, self.py, &self.row_fft, &self.col_fft);
        let mut values = Vec::with_capacity(self.nx * self.ny);
        for j in 0..self.ny {
            values.extend(buf[j * self.px..j * self.px + self.nx].iter().map(|c| c.re));
        }
        let mut field = FadingField { nx: self.nx, ny: self.ny, values };
        let std = field.std();
        let scale = if std > 0.0 { sigma_db / std } else { 0.0 };
        field.values.iter_mut().for_each(|v| *v *= scale);
        Ok(field)
    }
}

/// One-shot correlated field; see [`FieldGenerator`] to amortize setup.
pub fn correlated_field<R: Rng + ?Sized>(
    nx: usize,
    ny: usize,
    resolution_m: f64,
    sigma_db: f64,
    d_corr_m: f64,
    rng: &mut R,
) -> Result<FadingField, FadingError> {
    FieldGenerator::new(nx, ny, resolution_m, d_corr_m)?.generate(sigma_db, rng)
}

fn fft2(data: &mut [Complex64], px: usize, py: usize, row_fft: &Arc<dyn Fft<f64>>, col_fft: &Arc<dyn Fft<f64>>) {
    for row in data.chunks_exact_mut(px) {
        row_fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            column[j] = data[j * px + i];
        }
        col_fft.process(&mut column);
        for j in 0..py {
            data[j * px + i] = column[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lag_correlation(f: &FadingField, lag: usize) -> f64 {
        let m = f.mean();
        let var = f.std().powi(2);
        let mut acc = 0.0;
        let mut n = 0usize;
        for j in 0..f.ny {
            for i in 0..f.nx - lag {
                acc += (f.at(i, j) - m) * (f.at(i + lag, j) - m);
                n += 1;
            }
        }
        acc / n as f64 / var
    }

    #[test]
    fn iid_zero_sigma_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..100).all(|_| draw_iid(0.0, &mut rng) == 0.0));
        let a: Vec<f64> = (0..10).map(|_| draw_iid(7.1, &mut ChaCha8Rng::seed_from_u64(5))).collect();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let s1: Vec<f64> = (0..50).map(|_| draw_iid(7.1, &mut r1)).collect();
        let s2: Vec<f64> = (0..50).map(|_| draw_iid(7.1, &mut r2)).collect();
        assert_eq!(s1, s2);
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn iid_sample_std() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| draw_iid(7.1, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        // Standard error of the sample std is sigma / sqrt(2n) ~ 0.016.
        assert!((sd - 7.1).abs() < 0.1, "sd={sd}");
    }

    #[test]
    fn field_std_and_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = correlated_field(200, 150, 1.0, 6.0, 10.0, &mut rng).unwrap();
        assert_eq!(f.values.len(), 200 * 150);
        assert!((f.std() - 6.0).abs() < 1e-9);
        assert!(f.mean().abs() < 1.5);
    }

    #[test]
    fn field_short_correlation_is_nearly_white() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = correlated_field(300, 300, 1.0, 1.0, 1.0, &mut rng).unwrap();
        let r2 = lag_correlation(&f, 3);
        assert!(r2.abs() < 0.1, "r(3)={r2}");
    }

    #[test]
    fn field_determinism() {
        let g = FieldGenerator::new(120, 80, 1.0, 20.0).unwrap();
        let a = g.generate(4.0, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let b = g.generate(4.0, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn field_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            correlated_field(10, 10, 1.0, 1.0, 0.5, &mut rng),
            Err(FadingError::CorrelationDistance { .. })
        ));
        assert!(matches!(correlated_field(0, 10, 1.0, 1.0, 5.0, &mut rng), Err(FadingError::EmptyField)));
        let g = FieldGenerator::new(10, 10, 1.0, 2.0).unwrap();
        assert_eq!(g.generate(-1.0, &mut rng), Err(FadingError::Sigma(-1.0)));
    }
}
