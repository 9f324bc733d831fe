//! Scenario configuration: flat `key = value` files (TOML syntax, one key per
//! line, unit suffix in every dimensional key), named presets and validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fading::{FadingSpec, ScenarioFading};
use crate::grid::{build_grid, place_base_stations, GridSpec, LossClass};
use crate::link::LinkConfig;
use crate::o2i::{BplFamily, BplModel};
use crate::propagation::{calibrate_corner_exponent, CornerParams, PropagationParams, SameStreetParams, UmaParams};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Keys a config file must set when it does not name a preset.
pub const REQUIRED_KEYS: [&str; 4] = ["fc_ghz", "ptx_dbm_per_pol", "isd_m", "p_high"];

/// Corner loss shipped with the defaults; the corner exponent is then solved
/// from the anchor below.
pub const DEFAULT_CORNER_LOSS_DB: f64 = 10.0;
pub const CORNER_ANCHOR_DC_M: f64 = 100.0;
pub const CORNER_ANCHOR_X_M: f64 = 190.0;
pub const CORNER_ANCHOR_LOSS_DB: f64 = 135.0;

macro_rules! scenario_config {
    ($($name:ident : $ty:ty),* $(,)?) => {
        /// Fully resolved scenario. Serializes to the same flat format it is
        /// loaded from.
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ScenarioConfig {
            $(pub $name: $ty,)*
        }

        #[derive(Debug, Default, Deserialize)]
        #[serde(deny_unknown_fields)]
        struct RawConfig {
            preset: Option<String>,
            $($name: Option<$ty>,)*
        }

        impl RawConfig {
            fn is_set(&self, key: &str) -> bool {
                match key {
                    $(stringify!($name) => self.$name.is_some(),)*
                    _ => false,
                }
            }

            fn apply(self, base: &mut ScenarioConfig) {
                $(if let Some(v) = self.$name { base.$name = v; })*
            }
        }
    };
}

scenario_config! {
    fc_ghz: f64,
    ptx_dbm_per_pol: f64,
    bw_hz: f64,
    n_pol: u32,
    gtx_dbi: f64,
    gue_indoor_dbi: f64,
    gue_outdoor_dbi: f64,
    degradation_los_db: f64,
    degradation_nlos_db: f64,
    nf_db: f64,
    min_sinr_db: f64,
    impl_penalty_db: f64,
    max_indoor_depth_m: f64,
    gs_dbi: f64,
    hpbw_deg: f64,
    n_sectors: u32,
    overhead: f64,
    rooftop_keyhole: bool,
    isd_m: f64,
    bs_height_m: f64,
    ue_height_m: f64,
    grid_width_m: f64,
    grid_height_m: f64,
    block_w_m: f64,
    block_h_m: f64,
    building_strip_w_m: f64,
    building_strip_h_m: f64,
    unit_building_w_m: f64,
    unit_building_h_m: f64,
    ignored_core_w_m: f64,
    ignored_core_h_m: f64,
    resolution_m: f64,
    same_street_intercept_db: f64,
    same_street_exponent: f64,
    same_street_sigma_db: f64,
    corner_intercept_db: f64,
    corner_exponent: f64,
    corner_loss_db: f64,
    corner_sigma_db: f64,
    corner_anchor_dc_m: f64,
    corner_anchor_x_m: f64,
    corner_anchor_loss_db: f64,
    d_corr_los_m: f64,
    d_corr_nlos_m: f64,
    d_corr_indoor_m: f64,
    bpl_family: BplFamily,
    pl_npi_db: f64,
    sigma_p_low_db: f64,
    sigma_p_high_db: f64,
    p_high: f64,
    n_drops: usize,
    seed: u64,
    out_dir: String,
}

impl ScenarioConfig {
    /// Reference parameter set for one deployment, with the corner law calibrated.
    pub fn table_defaults(fc_ghz: f64, ptx_dbm_per_pol: f64, isd_m: f64, p_high: f64) -> Self {
        let link = LinkConfig::at(fc_ghz);
        let grid = GridSpec::default();
        let same = SameStreetParams::default();
        let mut cfg = Self {
            fc_ghz,
            ptx_dbm_per_pol,
            bw_hz: link.bw_hz,
            n_pol: link.n_pol,
            gtx_dbi: link.gtx_dbi,
            gue_indoor_dbi: link.gue_indoor_dbi,
            gue_outdoor_dbi: link.gue_outdoor_dbi,
            degradation_los_db: link.degradation_los_db,
            degradation_nlos_db: link.degradation_nlos_db,
            nf_db: link.nf_db,
            min_sinr_db: link.min_sinr_db,
            impl_penalty_db: link.impl_penalty_db,
            max_indoor_depth_m: link.max_indoor_depth_m,
            gs_dbi: link.gs_dbi,
            hpbw_deg: link.hpbw_deg,
            n_sectors: link.n_sectors,
            overhead: link.overhead,
            rooftop_keyhole: false,
            isd_m,
            bs_height_m: 22.0,
            ue_height_m: 1.5,
            grid_width_m: grid.width_m,
            grid_height_m: grid.height_m,
            block_w_m: grid.block_w_m,
            block_h_m: grid.block_h_m,
            building_strip_w_m: grid.building_strip_w_m,
            building_strip_h_m: grid.building_strip_h_m,
            unit_building_w_m: grid.unit_building_w_m,
            unit_building_h_m: grid.unit_building_h_m,
            ignored_core_w_m: grid.ignored_core_w_m,
            ignored_core_h_m: grid.ignored_core_h_m,
            resolution_m: grid.resolution_m,
            same_street_intercept_db: same.intercept_db,
            same_street_exponent: same.exponent,
            same_street_sigma_db: same.sigma_db,
            corner_intercept_db: same.intercept_db,
            corner_exponent: f64::NAN,
            corner_loss_db: DEFAULT_CORNER_LOSS_DB,
            corner_sigma_db: same.sigma_db,
            corner_anchor_dc_m: CORNER_ANCHOR_DC_M,
            corner_anchor_x_m: CORNER_ANCHOR_X_M,
            corner_anchor_loss_db: CORNER_ANCHOR_LOSS_DB,
            d_corr_los_m: 37.0,
            d_corr_nlos_m: 50.0,
            d_corr_indoor_m: 10.0,
            bpl_family: BplFamily::ThreeGpp,
            pl_npi_db: crate::o2i::PL_NPI_DB,
            sigma_p_low_db: crate::o2i::SIGMA_P_LOW_DB,
            sigma_p_high_db: crate::o2i::SIGMA_P_HIGH_DB,
            p_high,
            n_drops: 20,
            seed: 1,
            out_dir: "out".into(),
        };
        cfg.calibrate_corner().expect("default anchor is solvable");
        cfg
    }

    /// Solves the corner exponent from the anchor, keeping intercept and
    /// corner loss fixed. Returns the exponent.
    pub fn calibrate_corner(&mut self) -> Result<f64, ConfigError> {
        let n = calibrate_corner_exponent(
            self.corner_intercept_db,
            self.corner_loss_db,
            self.corner_anchor_dc_m,
            self.corner_anchor_x_m,
            self.corner_anchor_loss_db,
        )
        .map_err(|e| invalid("corner_exponent", e.to_string()))?;
        self.corner_exponent = n;
        Ok(n)
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec {
            width_m: self.grid_width_m,
            height_m: self.grid_height_m,
            block_w_m: self.block_w_m,
            block_h_m: self.block_h_m,
            building_strip_w_m: self.building_strip_w_m,
            building_strip_h_m: self.building_strip_h_m,
            unit_building_w_m: self.unit_building_w_m,
            unit_building_h_m: self.unit_building_h_m,
            ignored_core_w_m: self.ignored_core_w_m,
            ignored_core_h_m: self.ignored_core_h_m,
            resolution_m: self.resolution_m,
        }
    }

    pub fn with_grid(mut self, grid: &GridSpec) -> Self {
        self.grid_width_m = grid.width_m;
        self.grid_height_m = grid.height_m;
        self.block_w_m = grid.block_w_m;
        self.block_h_m = grid.block_h_m;
        self.building_strip_w_m = grid.building_strip_w_m;
        self.building_strip_h_m = grid.building_strip_h_m;
        self.unit_building_w_m = grid.unit_building_w_m;
        self.unit_building_h_m = grid.unit_building_h_m;
        self.ignored_core_w_m = grid.ignored_core_w_m;
        self.ignored_core_h_m = grid.ignored_core_h_m;
        self.resolution_m = grid.resolution_m;
        self
    }

    pub fn link(&self) -> LinkConfig {
        LinkConfig {
            fc_ghz: self.fc_ghz,
            ptx_dbm_per_pol: self.ptx_dbm_per_pol,
            bw_hz: self.bw_hz,
            n_pol: self.n_pol,
            gtx_dbi: self.gtx_dbi,
            gue_indoor_dbi: self.gue_indoor_dbi,
            gue_outdoor_dbi: self.gue_outdoor_dbi,
            degradation_los_db: self.degradation_los_db,
            degradation_nlos_db: self.degradation_nlos_db,
            nf_db: self.nf_db,
            min_sinr_db: self.min_sinr_db,
            impl_penalty_db: self.impl_penalty_db,
            max_indoor_depth_m: self.max_indoor_depth_m,
            gs_dbi: self.gs_dbi,
            hpbw_deg: self.hpbw_deg,
            n_sectors: self.n_sectors,
            overhead: self.overhead,
        }
    }

    pub fn propagation(&self) -> PropagationParams {
        PropagationParams {
            same_street: SameStreetParams {
                intercept_db: self.same_street_intercept_db,
                exponent: self.same_street_exponent,
                sigma_db: self.same_street_sigma_db,
            },
            corner: CornerParams {
                intercept_db: self.corner_intercept_db,
                exponent: self.corner_exponent,
                corner_loss_db: self.corner_loss_db,
                sigma_db: self.corner_sigma_db,
            },
        }
    }

    pub fn uma(&self) -> UmaParams {
        UmaParams { fc_ghz: self.fc_ghz, bs_height_m: self.bs_height_m, ue_height_m: self.ue_height_m }
    }

    /// LOS shadowing follows the same-street law, NLOS the corner law.
    pub fn fading(&self) -> FadingSpec {
        FadingSpec {
            los: ScenarioFading { sigma_db: self.same_street_sigma_db, d_corr_m: self.d_corr_los_m },
            nlos: ScenarioFading { sigma_db: self.corner_sigma_db, d_corr_m: self.d_corr_nlos_m },
            indoor_d_corr_m: self.d_corr_indoor_m,
        }
    }

    pub fn bpl_model(&self, class: LossClass) -> BplModel {
        let mut m = self.bpl_family.model(class);
        if self.bpl_family == BplFamily::ThreeGpp {
            m.pl_npi_db = self.pl_npi_db;
        }
        m.sigma_p_db = match class {
            LossClass::Low => self.sigma_p_low_db,
            LossClass::High => self.sigma_p_high_db,
        };
        m
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite_positive = [
            ("fc_ghz", self.fc_ghz),
            ("bw_hz", self.bw_hz),
            ("bs_height_m", self.bs_height_m),
            ("ue_height_m", self.ue_height_m),
            ("isd_m", self.isd_m),
            ("hpbw_deg", self.hpbw_deg),
            ("same_street_exponent", self.same_street_exponent),
            ("d_corr_los_m", self.d_corr_los_m),
            ("d_corr_nlos_m", self.d_corr_nlos_m),
            ("d_corr_indoor_m", self.d_corr_indoor_m),
        ];
        for (key, v) in finite_positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        let finite = [
            ("ptx_dbm_per_pol", self.ptx_dbm_per_pol),
            ("gtx_dbi", self.gtx_dbi),
            ("gue_indoor_dbi", self.gue_indoor_dbi),
            ("gue_outdoor_dbi", self.gue_outdoor_dbi),
            ("degradation_los_db", self.degradation_los_db),
            ("degradation_nlos_db", self.degradation_nlos_db),
            ("nf_db", self.nf_db),
            ("min_sinr_db", self.min_sinr_db),
            ("impl_penalty_db", self.impl_penalty_db),
            ("gs_dbi", self.gs_dbi),
            ("same_street_intercept_db", self.same_street_intercept_db),
            ("corner_intercept_db", self.corner_intercept_db),
            ("pl_npi_db", self.pl_npi_db),
        ];
        for (key, v) in finite {
            if !v.is_finite() {
                return Err(invalid(key, format!("must be finite, got {v}")));
            }
        }
        if !(0.5..=100.0).contains(&self.fc_ghz) {
            return Err(invalid("fc_ghz", "must lie in 0.5-100 GHz".into()));
        }
        if !matches!(self.n_pol, 1 | 2) {
            return Err(invalid("n_pol", format!("must be 1 or 2, got {}", self.n_pol)));
        }
        if self.n_sectors == 0 {
            return Err(invalid("n_sectors", "must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.overhead) {
            return Err(invalid("overhead", "must lie in [0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.p_high) {
            return Err(invalid("p_high", format!("must lie in [0, 1], got {}", self.p_high)));
        }
        if self.n_drops == 0 {
            return Err(invalid("n_drops", "must be at least 1".into()));
        }
        if self.max_indoor_depth_m < 0.0 {
            return Err(invalid("max_indoor_depth_m", "must be non-negative".into()));
        }
        for (key, v) in [
            ("same_street_sigma_db", self.same_street_sigma_db),
            ("corner_sigma_db", self.corner_sigma_db),
            ("sigma_p_low_db", self.sigma_p_low_db),
            ("sigma_p_high_db", self.sigma_p_high_db),
        ] {
            if !(v >= 0.0) {
                return Err(invalid(key, "must be non-negative".into()));
            }
        }
        if !(self.corner_exponent > 0.0) {
            return Err(invalid("corner_exponent", format!("must be positive, got {}", self.corner_exponent)));
        }
        if !(self.corner_loss_db > 0.0) {
            return Err(invalid("corner_loss_db", format!("must be positive, got {}", self.corner_loss_db)));
        }
        if self.bs_height_m <= self.ue_height_m {
            return Err(invalid("bs_height_m", "must exceed ue_height_m".into()));
        }
        let grid = self.grid();
        build_grid(grid.clone()).map_err(|e| invalid("grid_width_m", e.to_string()))?;
        place_base_stations(&grid, self.isd_m, self.bs_height_m, self.ue_height_m)
            .map_err(|e| invalid("isd_m", e.to_string()))?;
        if self.d_corr_los_m < self.resolution_m
            || self.d_corr_nlos_m < self.resolution_m
            || self.d_corr_indoor_m < self.resolution_m
        {
            return Err(invalid("d_corr_indoor_m", "correlation distances must be at least resolution_m".into()));
        }
        Ok(())
    }

    /// Flat `key = value` text that [`parse_config`] reads back unchanged.
    pub fn to_config_string(&self) -> String {
        toml::to_string(self).expect("flat config serializes")
    }

    /// Short SHA-256 of the echoed configuration.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

fn invalid(key: &str, reason: String) -> ConfigError {
    ConfigError::Invalid { key: key.into(), reason }
}

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "paper-28ghz-1w",
    "paper-28ghz-100w",
    "paper-14ghz-100w",
    "paper-7ghz-100w",
    "paper-3.5ghz-100w",
    "paper-28ghz-1w-isd800",
    "paper-28ghz-100w-isd800",
    "paper-14ghz-100w-isd800",
    "paper-7ghz-100w-isd800",
    "paper-3.5ghz-100w-isd800",
    "paper-3.5ghz-100w-100mhz",
    "paper-3.5ghz-100w-isd800-100mhz",
];

/// Published deployment scenarios: 20% high-loss buildings, 400 m ISD unless
/// suffixed `-isd800`, 400 MHz unless suffixed `-100mhz`.
pub fn preset(name: &str) -> Result<ScenarioConfig, ConfigError> {
    if !PRESETS.contains(&name) {
        return Err(ConfigError::UnknownPreset(name.into()));
    }
    let mut parts = name.strip_prefix("paper-").unwrap_or(name).split('-');
    let fc_ghz: f64 = parts
        .next()
        .and_then(|f| f.strip_suffix("ghz"))
        .and_then(|f| f.parse().ok())
        .ok_or_else(|| ConfigError::UnknownPreset(name.into()))?;
    let ptx = match parts.next() {
        Some("1w") => 30.0,
        Some("100w") => 50.0,
        _ => return Err(ConfigError::UnknownPreset(name.into())),
    };
    let mut cfg = ScenarioConfig::table_defaults(fc_ghz, ptx, 400.0, 0.2);
    for suffix in parts {
        match suffix {
            "isd800" => cfg.isd_m = 800.0,
            "100mhz" => cfg.bw_hz = 100e6,
            _ => return Err(ConfigError::UnknownPreset(name.into())),
        }
    }
    Ok(cfg)
}

/// Parses config text. Without `preset = "..."` every key in
/// [`REQUIRED_KEYS`] must be present; all other keys take their reference defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
    let mut cfg = match &raw.preset {
        Some(name) => preset(name)?,
        None => {
            let missing: Vec<String> =
                REQUIRED_KEYS.iter().filter(|k| !raw.is_set(k)).map(|k| k.to_string()).collect();
            if !missing.is_empty() {
                return Err(ConfigError::MissingKeys(missing));
            }
            ScenarioConfig::table_defaults(
                raw.fc_ghz.unwrap_or_default(),
                raw.ptx_dbm_per_pol.unwrap_or_default(),
                raw.isd_m.unwrap_or_default(),
                raw.p_high.unwrap_or_default(),
            )
        }
    };
    let explicit_exponent = raw.is_set("corner_exponent");
    raw.apply(&mut cfg);
    if !explicit_exponent {
        cfg.calibrate_corner()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_28_1w() {
        let c = preset("paper-28ghz-1w").unwrap();
        assert_eq!(c.fc_ghz, 28.0);
        assert_eq!(c.ptx_dbm_per_pol, 30.0);
        assert_eq!(c.isd_m, 400.0);
        assert_eq!(c.p_high, 0.2);
        assert_eq!(c.bs_height_m, 22.0);
        c.validate().unwrap();
    }

    #[test]
    fn preset_35_100w() {
        let c = preset("paper-3.5ghz-100w").unwrap();
        assert_eq!(c.fc_ghz, 3.5);
        assert_eq!(c.ptx_dbm_per_pol, 50.0);
        let c = preset("paper-3.5ghz-100w-isd800-100mhz").unwrap();
        assert_eq!((c.isd_m, c.bw_hz), (800.0, 100e6));
        assert!(matches!(preset("paper-9ghz-100w"), Err(ConfigError::UnknownPreset(_))));
        for name in PRESETS {
            preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn empty_file_lists_required_keys() {
        match parse_config("") {
            Err(ConfigError::MissingKeys(keys)) => assert_eq!(keys, REQUIRED_KEYS.to_vec()),
            other => panic!("{other:?}"),
        }
        match parse_config("fc_ghz = 28.0\nisd_m = 400.0\n") {
            Err(ConfigError::MissingKeys(keys)) => assert_eq!(keys, vec!["ptx_dbm_per_pol", "p_high"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation_names_key() {
        let text = "preset = \"paper-28ghz-1w\"\np_high = 1.5\n";
        match parse_config(text) {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "p_high"),
            other => panic!("{other:?}"),
        }
        match parse_config("preset = \"paper-28ghz-1w\"\nisd_m = 300.0\n") {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "isd_m"),
            other => panic!("{other:?}"),
        }
        match parse_config("preset = \"paper-28ghz-1w\"\nfrequency = 3\n") {
            Err(ConfigError::Parse(msg)) => assert!(msg.contains("frequency"), "{msg}"),
            other => panic!("{other:?}"),
        }
        match parse_config("preset = \"paper-28ghz-1w\"\nn_pol = 3\n") {
            Err(ConfigError::Invalid { key, .. }) => assert_eq!(key, "n_pol"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_keys_without_preset() {
        let text = "fc_ghz = 14.0\nptx_dbm_per_pol = 50.0\nisd_m = 800.0\np_high = 0.0\nseed = 9\n";
        let c = parse_config(text).unwrap();
        assert_eq!((c.fc_ghz, c.isd_m, c.p_high, c.seed), (14.0, 800.0, 0.0, 9));
        assert_eq!(c.nf_db, 9.0);
    }

    #[test]
    fn corner_is_recalibrated_unless_pinned() {
        let c = parse_config("preset = \"paper-28ghz-1w\"\ncorner_loss_db = 5.0\n").unwrap();
        let expected = calibrate_corner_exponent(-35.0, 5.0, 100.0, 190.0, 135.0).unwrap();
        assert!((c.corner_exponent - expected).abs() < 1e-12);
        let c = parse_config("preset = \"paper-28ghz-1w\"\ncorner_exponent = 3.0\n").unwrap();
        assert_eq!(c.corner_exponent, 3.0);
    }

    #[test]
    fn echo_round_trip() {
        for name in ["paper-28ghz-1w", "paper-3.5ghz-100w-isd800-100mhz"] {
            let c = preset(name).unwrap();
            let back = parse_config(&c.to_config_string()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.hash(), c.hash());
        }
    }
}
