//! Street-canyon path gain laws and the 3GPP UMa basic path loss.
//!
//! Gains are in dB and are negative for losses; the UMa function returns a
//! positive path loss like the standard does.

use serde::{Deserialize, Serialize};
use thiserror::Error;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum PropagationError {
    #[error("distance {0} m is below the 1 m model intercept")]
    BelowIntercept(f64),
    #[error("carrier frequency {0} GHz is outside 0.5-100 GHz")]
    Frequency(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Log-distance law for locations on the same street as the base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SameStreetParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub sigma_db: f64,
}

impl Default for SameStreetParams {
    fn default() -> Self {
        Self { intercept_db: -35.0, exponent: 3.56, sigma_db: 7.1 }
    }
}

/// Around-the-corner law. The corner parameters are not published alongside the
/// same-street values and are calibrated, see [`calibrate_corner_exponent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerParams {
    pub intercept_db: f64,
    pub exponent: f64,
    pub corner_loss_db: f64,
    pub sigma_db: f64,
}

impl CornerParams {
    pub fn validate(&self) -> Result<(), PropagationError> {
        if !(self.exponent > 0.0) {
            return Err(PropagationError::Parameter(format!("corner exponent must be positive, got {}", self.exponent)));
        }
        if !(self.corner_loss_db > 0.0) {
            return Err(PropagationError::Parameter(format!(
                "corner loss must be positive, got {}",
                self.corner_loss_db
            )));
        }
        if self.sigma_db < 0.0 {
            return Err(PropagationError::Parameter("corner sigma must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UmaParams {
    pub fc_ghz: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
}

/// Street-canyon parameter set used by the simulation engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationParams {
    pub same_street: SameStreetParams,
    pub corner: CornerParams,
}

/// `A - 10 n log10(d) + shadow`.
pub fn pg_same_street(d_m: f64, p: &SameStreetParams, shadow_db: f64) -> Result<f64, PropagationError> {
    if d_m < 1.0 {
        return Err(PropagationError::BelowIntercept(d_m));
    }
    Ok(p.intercept_db - 10.0 * p.exponent * d_m.log10() + shadow_db)
}

/// Path gain at travelled distance `x_m` along a route turning at `d_c_m`.
///
/// Past the corner, `x - d_c` is floored at 1 m so the gain stays finite just
/// after the turn.
pub fn pg_around_corner(x_m: f64, d_c_m: f64, p: &CornerParams, shadow_db: f64) -> Result<f64, PropagationError> {
    if x_m < 1.0 {
        return Err(PropagationError::BelowIntercept(x_m));
    }
    if d_c_m < 1.0 {
        return Err(PropagationError::BelowIntercept(d_c_m));
    }
    let pg = if x_m <= d_c_m {
        p.intercept_db - 10.0 * p.exponent * x_m.log10()
    } else {
        let leg = (x_m - d_c_m).max(1.0);
        p.intercept_db - p.corner_loss_db - 5.0 * p.exponent * (d_c_m * leg * x_m).log10()
    };
    Ok(pg + shadow_db)
}

/// Exponent that makes the past-corner branch hit `loss_db` at `(d_c, x)` for a
/// given intercept and corner loss.
pub fn calibrate_corner_exponent(
    intercept_db: f64,
    corner_loss_db: f64,
    d_c_m: f64,
    x_m: f64,
    loss_db: f64,
) -> Result<f64, PropagationError> {
    if !(x_m > d_c_m) || d_c_m < 1.0 {
        return Err(PropagationError::Parameter("anchor must lie past the corner".into()));
    }
    let product = (d_c_m * (x_m - d_c_m).max(1.0) * x_m).log10();
    let n = (loss_db + intercept_db - corner_loss_db) / (5.0 * product);
    if !(n > 0.0) {
        return Err(PropagationError::Parameter(format!(
            "anchor of {loss_db} dB needs a non-positive exponent ({n:.3}) with corner loss {corner_loss_db} dB"
        )));
    }
    Ok(n)
}

/// Corner loss that makes the past-corner branch hit `loss_db` at `(d_c, x)`
/// with intercept and exponent held fixed. May come out non-positive, which the
/// model does not allow.
pub fn solve_corner_loss(intercept_db: f64, exponent: f64, d_c_m: f64, x_m: f64, loss_db: f64) -> f64 {
    let product = (d_c_m * (x_m - d_c_m).max(1.0) * x_m).log10();
    intercept_db - 5.0 * exponent * product + loss_db
}

/// UMa LOS/NLOS basic path loss (TR 38.901 Table 7.4.1-1) with a fixed 1 m
/// effective environment height. `d_2d_m` below 10 m is clamped to 10 m.
pub fn pl_uma(d_2d_m: f64, d_3d_m: f64, p: &UmaParams, los: bool) -> Result<f64, PropagationError> {
    if !(0.5..=100.0).contains(&p.fc_ghz) {
        return Err(PropagationError::Frequency(p.fc_ghz));
    }
    let dh = p.bs_height_m - p.ue_height_m;
    let (d_2d, d_3d) = if d_2d_m < 10.0 {
        (10.0, d_3d_m.max(10.0f64.hypot(dh)))
    } else {
        (d_2d_m, d_3d_m)
    };
    let f_term = 20.0 * p.fc_ghz.log10();
    let h_e = 1.0;
    let d_bp = 4.0 * (p.bs_height_m - h_e) * (p.ue_height_m - h_e) * p.fc_ghz * 1e9 / SPEED_OF_LIGHT;
    let pl_los = if d_2d <= d_bp {
        28.0 + 22.0 * d_3d.log10() + f_term
    } else {
        28.0 + 40.0 * d_3d.log10() + f_term - 9.0 * (d_bp * d_bp + dh * dh).log10()
    };
    if los {
        return Ok(pl_los);
    }
    let pl_nlos = 13.54 + 39.08 * d_3d.log10() + f_term - 0.6 * (p.ue_height_m - 1.5);
    Ok(pl_los.max(pl_nlos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const UMA28: UmaParams = UmaParams { fc_ghz: 28.0, bs_height_m: 22.0, ue_height_m: 1.5 };

    #[test]
    fn same_street_values() {
        let p = SameStreetParams::default();
        assert_abs_diff_eq!(pg_same_street(1.0, &p, 0.0).unwrap(), -35.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pg_same_street(100.0, &p, 0.0).unwrap(), -106.2, epsilon = 1e-9);
        assert_abs_diff_eq!(pg_same_street(10.0, &p, 7.1).unwrap(), -63.5, epsilon = 1e-9);
        assert_eq!(pg_same_street(0.5, &p, 0.0), Err(PropagationError::BelowIntercept(0.5)));
    }

    #[test]
    fn corner_values() {
        let p = CornerParams { intercept_db: -35.0, exponent: 3.56, corner_loss_db: 1e-9, sigma_db: 0.0 };
        assert_abs_diff_eq!(pg_around_corner(1.0, 100.0, &p, 0.0).unwrap(), -35.0, epsilon = 1e-12);
        // -35 - 17.8 log10(100 * 90 * 190)
        let expected = -35.0 - 17.8 * (1.71e6f64).log10();
        assert_abs_diff_eq!(pg_around_corner(190.0, 100.0, &p, 0.0).unwrap(), expected, epsilon = 1e-6);
        assert_abs_diff_eq!(expected, -145.9, epsilon = 0.06);
        let clamped = pg_around_corner(100.5, 100.0, &p, 0.0).unwrap();
        let by_hand = -35.0 - 17.8 * (100.0 * 1.0 * 100.5f64).log10();
        assert_abs_diff_eq!(clamped, by_hand, epsilon = 1e-6);
    }

    #[test]
    fn corner_calibration_hits_anchor() {
        let n = calibrate_corner_exponent(-35.0, 10.0, 100.0, 190.0, 135.0).unwrap();
        let p = CornerParams { intercept_db: -35.0, exponent: n, corner_loss_db: 10.0, sigma_db: 7.1 };
        assert_abs_diff_eq!(pg_around_corner(190.0, 100.0, &p, 0.0).unwrap(), -135.0, epsilon = 1e-9);
        // Holding the same-street exponent forces a negative corner loss.
        let delta = solve_corner_loss(-35.0, 3.56, 100.0, 190.0, 135.0);
        assert!(delta < 0.0);
        assert!(calibrate_corner_exponent(-35.0, 120.0, 100.0, 190.0, 135.0).is_err());
    }

    #[test]
    fn corner_validation() {
        let bad = CornerParams { intercept_db: -35.0, exponent: 3.0, corner_loss_db: 0.0, sigma_db: 1.0 };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn uma_golden_28ghz() {
        // Hand evaluation: d_3d = sqrt(190^2 + 20.5^2) = 191.1027; breakpoint
        // 4 * 21 * 0.5 * 28e9 / c = 3922.7 m, so LOS uses PL1.
        let d3 = 190f64.hypot(20.5);
        assert_abs_diff_eq!(d3, 191.1027, epsilon = 1e-4);
        let los = pl_uma(190.0, d3, &UMA28, true).unwrap();
        let nlos = pl_uma(190.0, d3, &UMA28, false).unwrap();
        // 28 + 22 * 2.281267 + 28.943161
        assert_abs_diff_eq!(los, 107.13103, epsilon = 1e-4);
        // 13.54 + 39.08 * 2.281267 + 28.943161
        assert_abs_diff_eq!(nlos, 131.63507, epsilon = 1e-4);
    }

    #[test]
    fn uma_frequency_range() {
        let p = UmaParams { fc_ghz: 0.3, ..UMA28 };
        assert_eq!(pl_uma(100.0, 110.0, &p, false), Err(PropagationError::Frequency(0.3)));
    }

    #[test]
    fn uma_clamps_short_distances() {
        let a = pl_uma(2.0, 20.6, &UMA28, false).unwrap();
        let b = pl_uma(10.0, 10f64.hypot(20.5), &UMA28, false).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
    }

    proptest! {
        #[test]
        fn same_street_decade_slope(d in 1.0f64..1e4, n in 0.5f64..6.0) {
            let p = SameStreetParams { intercept_db: -35.0, exponent: n, sigma_db: 0.0 };
            let diff = pg_same_street(10.0 * d, &p, 0.0).unwrap() - pg_same_street(d, &p, 0.0).unwrap();
            prop_assert!((diff + 10.0 * n).abs() < 1e-9);
        }

        #[test]
        fn corner_branch_one_matches_same_street(x in 1.0f64..99.0) {
            let ss = SameStreetParams::default();
            let c = CornerParams { intercept_db: ss.intercept_db, exponent: ss.exponent, corner_loss_db: 5.0, sigma_db: 0.0 };
            let a = pg_around_corner(x, 100.0, &c, 0.0).unwrap();
            let b = pg_same_street(x, &ss, 0.0).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
            prop_assert!(a <= 0.0);
        }

        #[test]
        fn uma_nlos_dominates_and_is_monotone(d in 10.0f64..5000.0, step in 0.0f64..500.0, fc in 0.5f64..100.0) {
            let p = UmaParams { fc_ghz: fc, bs_height_m: 22.0, ue_height_m: 1.5 };
            let d3 = |d2: f64| d2.hypot(20.5);
            let los = pl_uma(d, d3(d), &p, true).unwrap();
            let nlos = pl_uma(d, d3(d), &p, false).unwrap();
            prop_assert!(nlos >= los);
            let further = pl_uma(d + step, d3(d + step), &p, false).unwrap();
            prop_assert!(further >= nlos - 1e-9);
            let higher = UmaParams { fc_ghz: (fc * 1.1).min(100.0), ..p };
            prop_assert!(pl_uma(d, d3(d), &higher, false).unwrap() >= nlos);
        }
    }
}
