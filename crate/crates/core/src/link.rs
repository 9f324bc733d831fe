//! Downlink link budget: received power, keyhole-sector self interference,
//! thermal noise, SINR, outage and Shannon rate.

use serde::{Deserialize, Serialize};

/// Received power that stands for "nothing arrives".
pub const NO_POWER_DBM: f64 = f64::NEG_INFINITY;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    if mw <= 0.0 {
        NO_POWER_DBM
    } else {
        10.0 * mw.log10()
    }
}

/// Linear-domain sum of powers given in dBm (or gains in dB).
pub fn power_sum_dbm<I: IntoIterator<Item = f64>>(powers: I) -> f64 {
    mw_to_dbm(powers.into_iter().map(dbm_to_mw).sum())
}

/// Radio parameters of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub fc_ghz: f64,
    pub ptx_dbm_per_pol: f64,
    pub bw_hz: f64,
    pub n_pol: u32,
    pub gtx_dbi: f64,
    pub gue_indoor_dbi: f64,
    pub gue_outdoor_dbi: f64,
    pub degradation_los_db: f64,
    pub degradation_nlos_db: f64,
    pub nf_db: f64,
    pub min_sinr_db: f64,
    pub impl_penalty_db: f64,
    pub max_indoor_depth_m: f64,
    pub gs_dbi: f64,
    pub hpbw_deg: f64,
    pub n_sectors: u32,
    pub overhead: f64,
}

impl LinkConfig {
    /// Table values at the given carrier: 30 dBm/pol at 28 GHz, 50 dBm/pol below.
    pub fn at(fc_ghz: f64) -> Self {
        Self {
            fc_ghz,
            ptx_dbm_per_pol: if fc_ghz >= 28.0 { 30.0 } else { 50.0 },
            bw_hz: 400e6,
            n_pol: 2,
            gtx_dbi: 26.0,
            gue_indoor_dbi: 12.0,
            gue_outdoor_dbi: 6.0,
            degradation_los_db: 2.0,
            degradation_nlos_db: 5.0,
            nf_db: 9.0,
            min_sinr_db: -6.0,
            impl_penalty_db: 3.0,
            max_indoor_depth_m: 10.0,
            gs_dbi: 4.0,
            hpbw_deg: 10.0,
            n_sectors: 4,
            overhead: 0.4,
        }
    }

    pub fn noise_dbm(&self) -> f64 {
        noise_power_dbm(self.bw_hz, self.nf_db)
    }

    pub fn degradation_db(&self, los: bool) -> f64 {
        if los { self.degradation_los_db } else { self.degradation_nlos_db }
    }

    /// SINR below which a location is in outage.
    pub fn outage_threshold_db(&self) -> f64 {
        self.min_sinr_db + self.impl_penalty_db
    }

    pub fn sectors(&self) -> SectorPattern {
        SectorPattern { n_sectors: self.n_sectors, main_gain_dbi: self.gtx_dbi, side_gain_dbi: self.gs_dbi }
    }
}

pub fn noise_power_dbm(bw_hz: f64, nf_db: f64) -> f64 {
    -174.0 + 10.0 * bw_hz.log10() + nf_db
}

pub fn rx_power_dbm(ptx_dbm: f64, gtx_dbi: f64, gue_dbi: f64, degradation_db: f64, pg_db: f64) -> f64 {
    ptx_dbm + gtx_dbi + gue_dbi - degradation_db + pg_db
}

/// Street direction a sector's main lobe points along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sector {
    North,
    East,
    South,
    West,
}

impl Sector {
    /// Sector whose lobe covers the first leg of a street route leaving `from`
    /// towards `to` (the leg runs along whichever axis differs first).
    pub fn for_leg(dx: f64, dy: f64) -> Sector {
        if dy.abs() >= dx.abs() && dy != 0.0 {
            if dy < 0.0 { Sector::North } else { Sector::South }
        } else if dx < 0.0 {
            Sector::West
        } else {
            Sector::East
        }
    }
}

/// Keyhole pattern: main-lobe gain inside the serving sector and a flat
/// side-lobe gain from every other co-sited sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPattern {
    pub n_sectors: u32,
    pub main_gain_dbi: f64,
    pub side_gain_dbi: f64,
}

impl SectorPattern {
    /// Total power from the non-serving sectors of the serving site, given the
    /// power the serving sector delivers through its main lobe.
    pub fn self_interference_dbm(&self, serving_dbm: f64) -> f64 {
        if self.n_sectors <= 1 {
            return NO_POWER_DBM;
        }
        let per_sector = serving_dbm - self.main_gain_dbi + self.side_gain_dbi;
        per_sector + 10.0 * ((self.n_sectors - 1) as f64).log10()
    }
}

/// Gain change on a path leaving the site at bearing `(dx, dy)`: zero inside a
/// main lobe (within half the HPBW of a street axis), `G_S - G_tx` otherwise.
pub fn keyhole_offset_db(dx: f64, dy: f64, cfg: &LinkConfig) -> f64 {
    if dx == 0.0 && dy == 0.0 {
        return 0.0;
    }
    let deg = dy.atan2(dx).to_degrees().rem_euclid(90.0);
    let off_axis = deg.min(90.0 - deg);
    if off_axis <= cfg.hpbw_deg / 2.0 { 0.0 } else { cfg.gs_dbi - cfg.gtx_dbi }
}

pub fn snr_db(serving_dbm: f64, noise_dbm: f64) -> f64 {
    serving_dbm - noise_dbm
}

pub fn sinr_db(serving_dbm: f64, interferers_dbm: &[f64], noise_dbm: f64) -> f64 {
    let denom = power_sum_dbm(interferers_dbm.iter().copied().chain(std::iter::once(noise_dbm)));
    serving_dbm - denom
}

pub fn is_outage(sinr_db: f64, min_sinr_db: f64, impl_penalty_db: f64) -> bool {
    sinr_db < min_sinr_db + impl_penalty_db
}

/// `(1 - overhead) * bw * n_pol * log2(1 + 10^((sinr - penalty) / 10))`.
pub fn shannon_rate_bps(sinr_db: f64, bw_hz: f64, n_pol: u32, overhead: f64, impl_penalty_db: f64) -> f64 {
    (1.0 - overhead) * bw_hz * n_pol as f64 * (1.0 + 10f64.powf(0.1 * (sinr_db - impl_penalty_db))).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkResult {
    pub serving_power_dbm: f64,
    /// Other sites plus co-sited sectors.
    pub interference_dbm: f64,
    pub inter_site_interference_dbm: f64,
    pub sector_interference_dbm: f64,
    pub noise_dbm: f64,
    pub snr_db: f64,
    pub sinr_db: f64,
    pub rate_bps: f64,
    pub outage: bool,
}

impl LinkResult {
    pub fn evaluate(serving_dbm: f64, inter_site_dbm: f64, cfg: &LinkConfig) -> Self {
        let noise = cfg.noise_dbm();
        let sector = cfg.sectors().self_interference_dbm(serving_dbm);
        let interference = power_sum_dbm([inter_site_dbm, sector]);
        let sinr = sinr_db(serving_dbm, &[interference], noise);
        let outage = is_outage(sinr, cfg.min_sinr_db, cfg.impl_penalty_db);
        let rate = if outage {
            0.0
        } else {
            shannon_rate_bps(sinr, cfg.bw_hz, cfg.n_pol, cfg.overhead, cfg.impl_penalty_db)
        };
        Self {
            serving_power_dbm: serving_dbm,
            interference_dbm: interference,
            inter_site_interference_dbm: inter_site_dbm,
            sector_interference_dbm: sector,
            noise_dbm: noise,
            snr_db: snr_db(serving_dbm, noise),
            sinr_db: sinr,
            rate_bps: rate,
            outage,
        }
    }
}
