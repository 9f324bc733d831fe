//! Outdoor-to-indoor penetration: composite wall loss from material mixes,
//! depth-dependent indoor loss and the two-parameter 5GCM comparison model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::LossClass;

#[derive(Debug, Error, PartialEq)]
pub enum O2iError {
    #[error("material fractions sum to {0}, expected 1")]
    Fractions(f64),
    #[error("frequency {0} GHz is outside 0.5-100 GHz")]
    Frequency(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Material {
    StandardGlass,
    IrrGlass,
    Concrete,
}

impl Material {
    /// Linear-in-frequency loss, `f_ghz` in GHz.
    pub fn loss_db(&self, f_ghz: f64) -> f64 {
        match self {
            Material::StandardGlass => 2.0 + 0.2 * f_ghz,
            Material::IrrGlass => 23.0 + 0.3 * f_ghz,
            Material::Concrete => 5.0 + 4.0 * f_ghz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BplVariant {
    /// Area-weighted mix of exterior materials.
    ThreeGpp(Vec<(Material, f64)>),
    /// `10 log10(a + b f^2)`.
    FiveGcm { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BplModel {
    pub variant: BplVariant,
    pub pl_npi_db: f64,
    pub sigma_p_db: f64,
}

/// Default non-perpendicular incidence loss.
pub const PL_NPI_DB: f64 = 5.0;
pub const SIGMA_P_LOW_DB: f64 = 4.4;
pub const SIGMA_P_HIGH_DB: f64 = 6.5;

impl BplModel {
    pub fn three_gpp_low() -> Self {
        Self {
            variant: BplVariant::ThreeGpp(vec![(Material::StandardGlass, 0.3), (Material::Concrete, 0.7)]),
            pl_npi_db: PL_NPI_DB,
            sigma_p_db: SIGMA_P_LOW_DB,
        }
    }

    pub fn three_gpp_high() -> Self {
        Self {
            variant: BplVariant::ThreeGpp(vec![(Material::IrrGlass, 0.7), (Material::Concrete, 0.3)]),
            pl_npi_db: PL_NPI_DB,
            sigma_p_db: SIGMA_P_HIGH_DB,
        }
    }

    pub fn five_gcm_low() -> Self {
        Self { variant: BplVariant::FiveGcm { a: 5.0, b: 0.03 }, pl_npi_db: 0.0, sigma_p_db: SIGMA_P_LOW_DB }
    }

    pub fn five_gcm_high() -> Self {
        Self { variant: BplVariant::FiveGcm { a: 10.0, b: 5.0 }, pl_npi_db: 0.0, sigma_p_db: SIGMA_P_HIGH_DB }
    }

    pub fn validate(&self) -> Result<(), O2iError> {
        if let BplVariant::ThreeGpp(mix) = &self.variant {
            let total: f64 = mix.iter().map(|(_, p)| p).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(O2iError::Fractions(total));
            }
        }
        Ok(())
    }
}

/// Which model family backs the low/high building classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BplFamily {
    #[serde(rename = "3gpp")]
    ThreeGpp,
    #[serde(rename = "5gcm")]
    FiveGcm,
}

impl BplFamily {
    pub fn model(&self, class: LossClass) -> BplModel {
        match (self, class) {
            (BplFamily::ThreeGpp, LossClass::Low) => BplModel::three_gpp_low(),
            (BplFamily::ThreeGpp, LossClass::High) => BplModel::three_gpp_high(),
            (BplFamily::FiveGcm, LossClass::Low) => BplModel::five_gcm_low(),
            (BplFamily::FiveGcm, LossClass::High) => BplModel::five_gcm_high(),
        }
    }
}

/// Through-wall penetration loss.
pub fn pl_tw(model: &BplModel, f_ghz: f64) -> Result<f64, O2iError> {
    if !(0.5..=100.0).contains(&f_ghz) {
        return Err(O2iError::Frequency(f_ghz));
    }
    model.validate()?;
    Ok(match &model.variant {
        BplVariant::ThreeGpp(mix) => {
            let sum: f64 = mix.iter().map(|(m, p)| p * 10f64.powf(-m.loss_db(f_ghz) / 10.0)).sum();
            model.pl_npi_db - 10.0 * sum.log10()
        }
        BplVariant::FiveGcm { a, b } => 10.0 * (a + b * f_ghz * f_ghz).log10(),
    })
}

pub fn bpl_5gcm(low_loss: bool, f_ghz: f64) -> f64 {
    let (a, b) = if low_loss { (5.0, 0.03) } else { (10.0, 5.0) };
    10.0 * (a + b * f_ghz * f_ghz).log10()
}

pub fn pl_indoor(d_2d_in_m: f64) -> f64 {
    0.5 * d_2d_in_m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct O2iLossBreakdown {
    pub pl_b_db: f64,
    pub pl_tw_db: f64,
    pub pl_in_db: f64,
    pub shadow_p_db: f64,
    pub total_db: f64,
}

pub fn o2i_total(
    pl_b_db: f64,
    model: &BplModel,
    f_ghz: f64,
    d_2d_in_m: f64,
    shadow_p_db: f64,
) -> Result<O2iLossBreakdown, O2iError> {
    let pl_tw_db = pl_tw(model, f_ghz)?;
    let pl_in_db = pl_indoor(d_2d_in_m);
    Ok(O2iLossBreakdown {
        pl_b_db,
        pl_tw_db,
        pl_in_db,
        shadow_p_db,
        total_db: pl_b_db + pl_tw_db + pl_in_db + shadow_p_db,
    })
}

/// One row of the penetration-loss-versus-frequency table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BplCurvePoint {
    pub f_ghz: f64,
    pub model: &'static str,
    pub bpl_db: f64,
}

/// 3GPP and 5GCM curves over 0.5-100 GHz in 0.5 GHz steps.
pub fn bpl_curves() -> Vec<BplCurvePoint> {
    let models: [(&'static str, BplModel); 4] = [
        ("3gpp_low", BplModel::three_gpp_low()),
        ("3gpp_high", BplModel::three_gpp_high()),
        ("5gcm_low", BplModel::five_gcm_low()),
        ("5gcm_high", BplModel::five_gcm_high()),
    ];
    let mut out = Vec::with_capacity(200 * models.len());
    for k in 1..=200 {
        let f_ghz = k as f64 * 0.5;
        for (name, m) in &models {
            out.push(BplCurvePoint { f_ghz, model: name, bpl_db: pl_tw(m, f_ghz).expect("in range") });
        }
    }
    out
}
