//! Correlated shadow fading: empirical spread and autocorrelation of a full
//! 800 x 800 field against the exponential target.
//!
//! cargo run --release --example shadow_field

use o2i_coverage::fading::{FadingField, FieldGenerator};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn autocorrelation(f: &FadingField, lag: usize) -> f64 {
    let (m, var) = (f.mean(), f.std().powi(2));
    let mut acc = 0.0;
    let mut n = 0usize;
    for j in 0..f.ny {
        for i in 0..f.nx - lag {
            acc += (f.at(i, j) - m) * (f.at(i + lag, j) - m);
            n += 1;
        }
    }
    for j in 0..f.ny - lag {
        for i in 0..f.nx {
            acc += (f.at(i, j) - m) * (f.at(i, j + lag) - m);
            n += 1;
        }
    }
    acc / n as f64 / var
}

fn main() {
    for (name, sigma, d_corr) in [("los", 7.1, 37.0), ("nlos", 7.1, 50.0), ("indoor", 1.0, 10.0)] {
        let g = FieldGenerator::new(800, 800, 1.0, d_corr).unwrap();
        let f = g.generate(sigma, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let lag = d_corr as usize;
        println!(
            "{name:6} sigma {:.3} (target {sigma})  R({lag} m) = {:.3} (target {:.3})  R({} m) = {:.3}",
            f.std(),
            autocorrelation(&f, lag),
            (-1f64).exp(),
            3 * lag,
            autocorrelation(&f, 3 * lag),
        );
    }
}
