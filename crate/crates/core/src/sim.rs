//! Coverage engine: per-site street path-gain maps, five-path indoor combining,
//! serving-cell selection, drop statistics and single-instant heatmaps.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::fading::{draw_iid, FadingError, FadingField, FadingSpec, FieldGenerator};
use crate::grid::{
    assign_building_classes, build_grid, in_diamond, manhattan_route_on, place_base_stations, Cell, Face,
    GridError, GridSpec, IndoorInfo, LossClass, Point, Route, SiteLayout, World,
};
use crate::link::{dbm_to_mw, keyhole_offset_db, mw_to_dbm, power_sum_dbm, LinkConfig, LinkResult, NO_POWER_DBM};
use crate::o2i::{pl_indoor, pl_tw, O2iError};
use crate::propagation::{pg_around_corner, pg_same_street, pl_uma, PropagationError, PropagationParams, UmaParams};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Propagation(#[from] PropagationError),
    #[error(transparent)]
    O2i(#[from] O2iError),
    #[error(transparent)]
    Fading(#[from] FadingError),
}

/// How a site's signal reaches a street point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mechanism {
    SameStreet,
    /// Around one corner, power-summed with the over-rooftop path.
    OneTurn,
    OverRooftop,
}

impl Mechanism {
    pub fn is_los(&self) -> bool {
        matches!(self, Mechanism::SameStreet)
    }
}

/// Median street path gain from one site, shadowing excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreetGain {
    pub pg_db: f64,
    pub mechanism: Mechanism,
}

/// Street gain from `bs` to centerline point `sp`.
pub fn street_gain(
    spec: &GridSpec,
    bs: &Point,
    sp: &Point,
    prop: &PropagationParams,
    uma: &UmaParams,
    antenna: Option<&LinkConfig>,
) -> Result<StreetGain, PropagationError> {
    let rooftop = || -> Result<f64, PropagationError> {
        let d_2d = bs.euclidean(sp);
        let d_3d = d_2d.hypot(uma.bs_height_m - uma.ue_height_m);
        let offset = antenna.map_or(0.0, |a| keyhole_offset_db(sp.x - bs.x, sp.y - bs.y, a));
        Ok(offset - pl_uma(d_2d, d_3d, uma, false)?)
    };
    Ok(match manhattan_route_on(spec, bs, sp) {
        Route::SameStreet { d_m } => StreetGain {
            pg_db: pg_same_street(d_m.max(1.0), &prop.same_street, 0.0)?,
            mechanism: Mechanism::SameStreet,
        },
        Route::OneTurn { d_c_m, x_m } => {
            let corner = pg_around_corner(x_m.max(1.0), d_c_m.max(1.0), &prop.corner, 0.0)?;
            StreetGain { pg_db: power_sum_dbm([corner, rooftop()?]), mechanism: Mechanism::OneTurn }
        }
        Route::NoStreetRoute => StreetGain { pg_db: rooftop()?, mechanism: Mechanism::OverRooftop },
    })
}

/// Dense per-site street gains over every street centerline lattice point,
/// including the far boundary streets.
#[derive(Debug, Clone)]
pub struct StreetPgMap {
    spec: GridSpec,
    n_ns: usize,
    n_ew: usize,
    ns_len: usize,
    ew_len: usize,
    per_bs: Vec<Vec<StreetGain>>,
}

impl StreetPgMap {
    pub fn build(
        spec: &GridSpec,
        sites: &SiteLayout,
        prop: &PropagationParams,
        uma: &UmaParams,
        antenna: Option<&LinkConfig>,
    ) -> Result<Self, PropagationError> {
        let n_ns = (spec.width_m / spec.block_w_m).round() as usize + 1;
        let n_ew = (spec.height_m / spec.block_h_m).round() as usize + 1;
        let ns_len = spec.ny() + 1;
        let ew_len = spec.nx() + 1;
        let per_bs = sites
            .bs_positions
            .par_iter()
            .map(|bs| {
                let mut gains = Vec::with_capacity(n_ns * ns_len + n_ew * ew_len);
                for k in 0..n_ns {
                    for j in 0..ns_len {
                        let sp = Point::new(k as f64 * spec.block_w_m, j as f64 * spec.resolution_m);
                        gains.push(street_gain(spec, bs, &sp, prop, uma, antenna)?);
                    }
                }
                for k in 0..n_ew {
                    for i in 0..ew_len {
                        let sp = Point::new(i as f64 * spec.resolution_m, k as f64 * spec.block_h_m);
                        gains.push(street_gain(spec, bs, &sp, prop, uma, antenna)?);
                    }
                }
                Ok(gains)
            })
            .collect::<Result<Vec<_>, PropagationError>>()?;
        Ok(Self { spec: spec.clone(), n_ns, n_ew, ns_len, ew_len, per_bs })
    }

    pub fn n_bs(&self) -> usize {
        self.per_bs.len()
    }

    /// Gain at a street centerline point. Panics if `sp` is off the centerlines.
    pub fn get(&self, bs: usize, sp: &Point) -> StreetGain {
        let s = &self.spec;
        let gains = &self.per_bs[bs];
        if s.is_ns_street(sp.x) {
            let k = (sp.x / s.block_w_m).round() as usize;
            let j = ((sp.y / s.resolution_m).round() as usize).min(self.ns_len - 1);
            gains[k * self.ns_len + j]
        } else {
            assert!(s.is_ew_street(sp.y), "({}, {}) is not on a street centerline", sp.x, sp.y);
            let k = (sp.y / s.block_h_m).round() as usize;
            let i = ((sp.x / s.resolution_m).round() as usize).min(self.ew_len - 1);
            debug_assert!(k < self.n_ew);
            gains[self.n_ns * self.ns_len + k * self.ew_len + i]
        }
    }
}

/// Source of shadowing terms seen by the power computations.
pub trait ShadowSource {
    /// Street-level shadow on the path from site `bs` to street point `sp`.
    fn street(&mut self, bs: usize, sp: &Point, los: bool) -> f64;
    /// Shadow on the over-rooftop path from site `bs` to indoor point `p`.
    fn rooftop(&mut self, bs: usize, p: &Point) -> f64;
    /// Unit-variance penetration shadow at indoor point `p`; scaled by the
    /// building's sigma by the caller.
    fn penetration(&mut self, bs: usize, p: &Point) -> f64;
}

/// Median channel.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoShadow;

impl ShadowSource for NoShadow {
    fn street(&mut self, _: usize, _: &Point, _: bool) -> f64 {
        0.0
    }
    fn rooftop(&mut self, _: usize, _: &Point) -> f64 {
        0.0
    }
    fn penetration(&mut self, _: usize, _: &Point) -> f64 {
        0.0
    }
}

/// Independent draws on every call, for drop statistics.
#[derive(Debug)]
pub struct IidShadow<R> {
    pub rng: R,
    pub fading: FadingSpec,
}

impl<R: rand::Rng> ShadowSource for IidShadow<R> {
    fn street(&mut self, _: usize, _: &Point, los: bool) -> f64 {
        let sigma = if los { self.fading.los.sigma_db } else { self.fading.nlos.sigma_db };
        draw_iid(sigma, &mut self.rng)
    }
    fn rooftop(&mut self, _: usize, _: &Point) -> f64 {
        draw_iid(self.fading.nlos.sigma_db, &mut self.rng)
    }
    fn penetration(&mut self, _: usize, _: &Point) -> f64 {
        draw_iid(1.0, &mut self.rng)
    }
}

/// Spatially correlated layers for one site.
#[derive(Debug, Clone)]
pub struct SiteFields {
    pub los: FadingField,
    pub nlos: FadingField,
    /// Unit variance.
    pub indoor: FadingField,
    pub resolution_m: f64,
}

impl ShadowSource for &SiteFields {
    fn street(&mut self, _: usize, sp: &Point, los: bool) -> f64 {
        let f = if los { &self.los } else { &self.nlos };
        f.at_point(sp.x, sp.y, self.resolution_m)
    }
    fn rooftop(&mut self, _: usize, p: &Point) -> f64 {
        self.nlos.at_point(p.x, p.y, self.resolution_m)
    }
    fn penetration(&mut self, _: usize, p: &Point) -> f64 {
        self.indoor.at_point(p.x, p.y, self.resolution_m)
    }
}

/// One of the five candidate indoor paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndoorPath {
    /// 1-4 through the West, East, North, South walls; 5 over the rooftops.
    pub path_id: u8,
    pub face: Option<Face>,
    /// Outdoor path gain (street gain at the wall exit, or minus UMa NLOS loss).
    pub outdoor_pg_db: f64,
    pub mechanism: Mechanism,
    pub pl_tw_db: f64,
    pub pl_in_db: f64,
    /// Sum of outdoor and penetration shadow terms.
    pub shadow_db: f64,
    pub rx_dbm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndoorPower {
    pub paths: [IndoorPath; 5],
    pub total_dbm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Population {
    Indoor,
    Outdoor,
}

impl Population {
    pub fn as_str(&self) -> &'static str {
        match self {
            Population::Indoor => "indoor",
            Population::Outdoor => "outdoor",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointResult {
    pub x: f64,
    pub y: f64,
    pub population: Population,
    pub serving_bs: usize,
    pub link: LinkResult,
}

/// Strongest site (ties to the lowest index) and the power sum of all others.
pub fn select_serving(powers_dbm: &[f64]) -> (usize, f64) {
    assert!(!powers_dbm.is_empty(), "at least one site required");
    let mut best = 0;
    for (i, p) in powers_dbm.iter().enumerate().skip(1) {
        if *p > powers_dbm[best] {
            best = i;
        }
    }
    let others: f64 = powers_dbm.iter().enumerate().filter(|(i, _)| *i != best).map(|(_, p)| dbm_to_mw(*p)).sum();
    (best, mw_to_dbm(others))
}

/// Empirical CDF over a sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_by(f64::total_cmp);
        Self { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Percentile `q` in [0, 100], linearly interpolated between order statistics.
    pub fn percentile(&self, q: f64) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        let pos = (q / 100.0).clamp(0.0, 1.0) * (self.sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let t = pos - lo as f64;
        self.sorted[lo] + t * (self.sorted[hi] - self.sorted[lo])
    }

    pub fn median(&self) -> f64 {
        self.percentile(50.0)
    }

    /// Fraction of samples at or below `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.sorted.is_empty() {
            return f64::NAN;
        }
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    /// `(value, cdf)` pairs on an even grid of `n` steps.
    pub fn table(&self, n: usize) -> Vec<(f64, f64)> {
        (0..=n)
            .map(|k| {
                let c = k as f64 / n as f64;
                (self.percentile(100.0 * c), c)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationStats {
    pub population: Population,
    pub snr_db: Ecdf,
    pub sinr_db: Ecdf,
    pub rate_bps: Ecdf,
    pub outage_fraction: f64,
    pub edge_rate_bps: f64,
    pub median_rate_bps: f64,
}

impl PopulationStats {
    pub fn from_points<'a>(population: Population, points: impl IntoIterator<Item = &'a PointResult>) -> Self {
        let (mut snr, mut sinr, mut rate) = (Vec::new(), Vec::new(), Vec::new());
        let mut outages = 0usize;
        for p in points.into_iter().filter(|p| p.population == population) {
            snr.push(p.link.snr_db);
            sinr.push(p.link.sinr_db);
            rate.push(p.link.rate_bps);
            outages += p.link.outage as usize;
        }
        let n = snr.len();
        let rate_bps = Ecdf::new(rate);
        Self {
            population,
            snr_db: Ecdf::new(snr),
            sinr_db: Ecdf::new(sinr),
            outage_fraction: if n == 0 { f64::NAN } else { outages as f64 / n as f64 },
            edge_rate_bps: rate_bps.percentile(10.0),
            median_rate_bps: rate_bps.median(),
            rate_bps,
        }
    }

    pub fn n_samples(&self) -> usize {
        self.snr_db.len()
    }
}

#[derive(Debug, Clone)]
pub struct CoverageResult {
    pub indoor: PopulationStats,
    pub outdoor: PopulationStats,
    pub n_drops: usize,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl CoverageResult {
    pub fn population(&self, p: Population) -> &PopulationStats {
        match p {
            Population::Indoor => &self.indoor,
            Population::Outdoor => &self.outdoor,
        }
    }
}

/// Single-instant coverage map over the whole lattice.
#[derive(Debug, Clone)]
pub struct Heatmap {
    pub nx: usize,
    pub ny: usize,
    pub resolution_m: f64,
    /// Row-major, `y` outer.
    pub snr_db: Vec<f64>,
    pub sinr_db: Vec<f64>,
    pub class: Vec<&'static str>,
    /// Loss class of the building each cell lies in, if any.
    pub loss_class: Vec<Option<LossClass>>,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl Heatmap {
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Mean SNR over cells satisfying `keep`.
    pub fn mean_snr_where(&self, mut keep: impl FnMut(usize) -> bool) -> f64 {
        let (mut acc, mut n) = (0.0, 0usize);
        for k in 0..self.snr_db.len() {
            if keep(k) {
                acc += self.snr_db[k];
                n += 1;
            }
        }
        acc / n as f64
    }
}

// Stream layout: the drop index occupies the high 32 bits; the low bits pick
// the point chunk, with one reserved value for building classes.
const CLASS_STREAM: u64 = 0xffff_ffff;
const CHUNK: usize = 2048;

fn stream_rng(seed: u64, drop: u64, sub: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((drop << 32) | sub);
    rng
}

/// A scenario bound to its geometry, sites and street maps.
#[derive(Debug, Clone)]
pub struct Deployment {
    config: ScenarioConfig,
    world: World,
    sites: SiteLayout,
    link: LinkConfig,
    uma: UmaParams,
    fading: FadingSpec,
    street: StreetPgMap,
    pl_tw_db: [f64; 2],
    sigma_p_db: [f64; 2],
    samples: Vec<(Point, Cell)>,
}

fn class_index(c: LossClass) -> usize {
    match c {
        LossClass::Low => 0,
        LossClass::High => 1,
    }
}

impl Deployment {
    pub fn new(config: &ScenarioConfig) -> Result<Self, SimError> {
        config.validate()?;
        let spec = config.grid();
        let world = build_grid(spec.clone())?;
        let sites = place_base_stations(&spec, config.isd_m, config.bs_height_m, config.ue_height_m)?;
        let uma = config.uma();
        let link = config.link();
        let antenna = config.rooftop_keyhole.then_some(&link);
        let street = StreetPgMap::build(&spec, &sites, &config.propagation(), &uma, antenna)?;
        let fc = config.fc_ghz;
        let pl_tw_db = [pl_tw(&config.bpl_model(LossClass::Low), fc)?, pl_tw(&config.bpl_model(LossClass::High), fc)?];
        let center = sites.center();
        let radius = sites.diamond_radius_m();
        let samples = world
            .lattice()
            .filter(|p| in_diamond(p, &center, radius))
            .map(|p| (p, world.cell(&p)))
            .filter(|(_, c)| !matches!(c, Cell::IgnoredCore { .. }))
            .collect();
        Ok(Self {
            link,
            fading: config.fading(),
            sigma_p_db: [config.sigma_p_low_db, config.sigma_p_high_db],
            config: config.clone(),
            world,
            sites,
            uma,
            street,
            pl_tw_db,
            samples,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn sites(&self) -> &SiteLayout {
        &self.sites
    }

    pub fn link(&self) -> &LinkConfig {
        &self.link
    }

    pub fn street_map(&self) -> &StreetPgMap {
        &self.street
    }

    /// Diamond points that enter the statistics.
    pub fn samples(&self) -> &[(Point, Cell)] {
        &self.samples
    }

    /// Same deployment with every building set to `class`.
    pub fn with_uniform_class(mut self, class: LossClass) -> Self {
        let classes = vec![class; self.world.buildings().len()];
        self.world = self.world.with_building_classes(&classes);
        self
    }

    pub fn with_classes(mut self, classes: &[LossClass]) -> Self {
        self.world = self.world.with_building_classes(classes);
        self
    }

    pub fn pl_tw_db(&self, class: LossClass) -> f64 {
        self.pl_tw_db[class_index(class)]
    }

    fn rx_dbm(&self, pg_db: f64, los: bool, indoor: bool) -> f64 {
        let l = &self.link;
        let gue = if indoor { l.gue_indoor_dbi } else { l.gue_outdoor_dbi };
        l.ptx_dbm_per_pol + l.gtx_dbi + gue - l.degradation_db(los) + pg_db
    }

    /// Received power at a street point from one site.
    pub fn outdoor_power_dbm(&self, bs: usize, sp: &Point, shadows: &mut impl ShadowSource) -> f64 {
        let g = self.street.get(bs, sp);
        let los = g.mechanism.is_los();
        self.rx_dbm(g.pg_db + shadows.street(bs, sp, los), los, false)
    }

    /// Five-path received power at an indoor point from one site.
    pub fn indoor_power(
        &self,
        bs: usize,
        p: &Point,
        info: &IndoorInfo,
        shadows: &mut impl ShadowSource,
    ) -> IndoorPower {
        let class = self.world.buildings()[info.building_id].loss_class;
        let pl_tw_db = self.pl_tw_db[class_index(class)];
        let shadow_p = -self.sigma_p_db[class_index(class)] * shadows.penetration(bs, p);
        let mut paths = [IndoorPath {
            path_id: 0,
            face: None,
            outdoor_pg_db: 0.0,
            mechanism: Mechanism::OverRooftop,
            pl_tw_db,
            pl_in_db: 0.0,
            shadow_db: 0.0,
            rx_dbm: NO_POWER_DBM,
        }; 5];
        for (k, wall) in info.walls.iter().enumerate() {
            let g = self.street.get(bs, &wall.street_point);
            let los = g.mechanism.is_los();
            let shadow_db = shadows.street(bs, &wall.street_point, los) + shadow_p;
            let pl_in_db = pl_indoor(wall.distance_m);
            paths[k] = IndoorPath {
                path_id: k as u8 + 1,
                face: Some(wall.face),
                outdoor_pg_db: g.pg_db,
                mechanism: g.mechanism,
                pl_tw_db,
                pl_in_db,
                shadow_db,
                rx_dbm: self.rx_dbm(g.pg_db - pl_tw_db - pl_in_db + shadow_db, los, true),
            };
        }
        let bs_p = self.sites.bs_positions[bs];
        let d_2d = bs_p.euclidean(p);
        let d_3d = d_2d.hypot(self.uma.bs_height_m - self.uma.ue_height_m);
        let offset = if self.config.rooftop_keyhole { keyhole_offset_db(p.x - bs_p.x, p.y - bs_p.y, &self.link) } else { 0.0 };
        let pg = offset - pl_uma(d_2d, d_3d, &self.uma, false).expect("frequency validated with the config");
        let pl_in_db = pl_indoor(info.depth_m().min(self.link.max_indoor_depth_m));
        let shadow_db = shadows.rooftop(bs, p) + shadow_p;
        paths[4] = IndoorPath {
            path_id: 5,
            face: None,
            outdoor_pg_db: pg,
            mechanism: Mechanism::OverRooftop,
            pl_tw_db,
            pl_in_db,
            shadow_db,
            rx_dbm: self.rx_dbm(pg - pl_tw_db - pl_in_db + shadow_db, false, true),
        };
        IndoorPower { total_dbm: power_sum_dbm(paths.iter().map(|p| p.rx_dbm)), paths }
    }

    /// Received power from each site at a classified point.
    pub fn powers_dbm(&self, p: &Point, cell: &Cell, shadows: &mut impl ShadowSource) -> Vec<f64> {
        (0..self.sites.bs_positions.len())
            .map(|b| match cell {
                Cell::Street(sp) => self.outdoor_power_dbm(b, sp, shadows),
                Cell::Indoor(info) => self.indoor_power(b, p, info, shadows).total_dbm,
                Cell::IgnoredCore { .. } => {
                    let info = self.world.strip_geometry(p).expect("core lies in a strip");
                    self.indoor_power(b, p, &info, shadows).total_dbm
                }
            })
            .collect()
    }

    /// Full link evaluation at one point; `None` inside an ignored core.
    pub fn evaluate_point(&self, p: &Point, shadows: &mut impl ShadowSource) -> Option<PointResult> {
        let cell = self.world.cell(p);
        self.evaluate_cell(p, &cell, shadows)
    }

    fn evaluate_cell(&self, p: &Point, cell: &Cell, shadows: &mut impl ShadowSource) -> Option<PointResult> {
        let population = match cell {
            Cell::Street(_) => Population::Outdoor,
            Cell::Indoor(_) => Population::Indoor,
            Cell::IgnoredCore { .. } => return None,
        };
        let powers = self.powers_dbm(p, cell, shadows);
        let (serving_bs, inter) = select_serving(&powers);
        Some(PointResult {
            x: p.x,
            y: p.y,
            population,
            serving_bs,
            link: LinkResult::evaluate(powers[serving_bs], inter, &self.link),
        })
    }

    /// Median-channel evaluation (no shadowing).
    pub fn evaluate_median(&self, p: &Point) -> Option<PointResult> {
        self.evaluate_point(p, &mut NoShadow)
    }

    /// One drop: fresh building classes and independent shadowing at every
    /// diamond point. Output order follows [`Deployment::samples`].
    pub fn evaluate_drop(&self, seed: u64, drop: u64) -> Vec<PointResult> {
        let mut rng = stream_rng(seed, drop, CLASS_STREAM);
        let classes = assign_building_classes(self.world.buildings().len(), self.config.p_high, &mut rng);
        let dep = self.clone().with_classes(&classes);
        dep.samples
            .par_chunks(CHUNK)
            .enumerate()
            .flat_map_iter(|(k, chunk)| {
                let mut shadows = IidShadow { rng: stream_rng(seed, drop, k as u64), fading: dep.fading };
                chunk
                    .iter()
                    .filter_map(|(p, cell)| dep.evaluate_cell(p, cell, &mut shadows))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn run_drops(&self, n_drops: usize, seed: u64) -> CoverageResult {
        let drops: Vec<Vec<PointResult>> = (0..n_drops as u64).map(|d| self.evaluate_drop(seed, d)).collect();
        let all = || drops.iter().flatten();
        CoverageResult {
            indoor: PopulationStats::from_points(Population::Indoor, all()),
            outdoor: PopulationStats::from_points(Population::Outdoor, all()),
            n_drops,
            seed,
            config: self.config.clone(),
        }
    }

    /// Independent correlated fields for every site.
    pub fn site_fields(&self, seed: u64) -> Result<Vec<SiteFields>, SimError> {
        let s = self.world.spec();
        let (nx, ny, res) = (s.nx(), s.ny(), s.resolution_m);
        let f = &self.fading;
        let gen_los = FieldGenerator::new(nx, ny, res, f.los.d_corr_m)?;
        let gen_nlos = FieldGenerator::new(nx, ny, res, f.nlos.d_corr_m)?;
        let gen_in = FieldGenerator::new(nx, ny, res, f.indoor_d_corr_m)?;
        (0..self.sites.bs_positions.len())
            .into_par_iter()
            .map(|b| {
                let mut rng = stream_rng(seed, b as u64, 0);
                Ok(SiteFields {
                    los: gen_los.generate(f.los.sigma_db, &mut rng)?,
                    nlos: gen_nlos.generate(f.nlos.sigma_db, &mut rng)?,
                    indoor: gen_in.generate(1.0, &mut rng)?,
                    resolution_m: res,
                })
            })
            .collect()
    }

    /// Coverage map at one instant: correlated shadowing, one building-class
    /// draw, every lattice cell evaluated (ignored cores as indoor points).
    pub fn snapshot_heatmap(&self, seed: u64) -> Result<Heatmap, SimError> {
        let mut rng = stream_rng(seed, 0, CLASS_STREAM);
        let classes = assign_building_classes(self.world.buildings().len(), self.config.p_high, &mut rng);
        let dep = self.clone().with_classes(&classes);
        let fields = dep.site_fields(seed)?;
        let s = dep.world.spec().clone();
        let (nx, ny) = (s.nx(), s.ny());
        let cells: Vec<(Point, Cell)> = dep.world.lattice().map(|p| (p, dep.world.cell(&p))).collect();

        let per_bs: Vec<Vec<f64>> = fields
            .par_iter()
            .enumerate()
            .map(|(b, field)| {
                let mut sh = field;
                cells
                    .iter()
                    .map(|(p, cell)| match cell {
                        Cell::Street(sp) => dep.outdoor_power_dbm(b, sp, &mut sh),
                        Cell::Indoor(info) => dep.indoor_power(b, p, info, &mut sh).total_dbm,
                        Cell::IgnoredCore { .. } => {
                            let info = dep.world.strip_geometry(p).expect("core lies in a strip");
                            dep.indoor_power(b, p, &info, &mut sh).total_dbm
                        }
                    })
                    .collect()
            })
            .collect();

        let noise = dep.link.noise_dbm();
        let (snr_db, sinr_db): (Vec<f64>, Vec<f64>) = (0..cells.len())
            .into_par_iter()
            .map(|k| {
                let powers: Vec<f64> = per_bs.iter().map(|v| v[k]).collect();
                let (best, inter) = select_serving(&powers);
                let r = LinkResult::evaluate(powers[best], inter, &dep.link);
                (powers[best] - noise, r.sinr_db)
            })
            .unzip();

        let class = cells
            .iter()
            .map(|(p, cell)| match cell {
                Cell::Street(_) => dep.world.classify(p, &dep.sites).label(),
                Cell::Indoor(_) => "indoor",
                Cell::IgnoredCore { .. } => "ignored",
            })
            .collect();
        let loss_class = cells
            .iter()
            .map(|(p, _)| dep.world.strip_geometry(p).map(|i| dep.world.buildings()[i.building_id].loss_class))
            .collect();
        Ok(Heatmap {
            nx,
            ny,
            resolution_m: s.resolution_m,
            snr_db,
            sinr_db,
            class,
            loss_class,
            seed,
            config: dep.config.clone(),
        })
    }
}

/// Drop statistics for a scenario, using its `n_drops` and `seed`.
pub fn run_drops(config: &ScenarioConfig) -> Result<CoverageResult, SimError> {
    Ok(Deployment::new(config)?.run_drops(config.n_drops, config.seed))
}

pub fn snapshot_heatmap(config: &ScenarioConfig, seed: u64) -> Result<Heatmap, SimError> {
    Deployment::new(config)?.snapshot_heatmap(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;
    use approx::assert_abs_diff_eq;

    fn dep28() -> Deployment {
        Deployment::new(&preset("paper-28ghz-1w").unwrap()).unwrap()
    }

    #[test]
    fn serving_selection() {
        assert_eq!(select_serving(&[-50.0]), (0, NO_POWER_DBM));
        assert_eq!(select_serving(&[-60.0, -50.0, -50.0]).0, 1);
        let (b, inter) = select_serving(&[-40.0, -43.0, -43.0]);
        assert_eq!(b, 0);
        assert_abs_diff_eq!(inter, -43.0 + 10.0 * 2f64.log10(), epsilon = 1e-9);
    }

    #[test]
    fn street_map_matches_direct_evaluation() {
        let d = dep28();
        let cfg = d.config();
        for sp in [Point::new(400.0, 300.0), Point::new(490.0, 500.0), Point::new(600.0, 475.0), Point::new(800.0, 800.0)] {
            for b in 0..d.sites().bs_positions.len() {
                let direct = street_gain(&cfg.grid(), &d.sites().bs_positions[b], &sp, &cfg.propagation(), &cfg.uma(), None).unwrap();
                assert_eq!(d.street_map().get(b, &sp), direct);
            }
        }
        let g = d.street_map().get(d.sites().center_bs, &Point::new(400.0, 300.0));
        assert_eq!(g.mechanism, Mechanism::SameStreet);
        assert_abs_diff_eq!(g.pg_db, -106.2, epsilon = 1e-9);
    }

    #[test]
    fn one_turn_includes_both_mechanisms() {
        let d = dep28();
        let cfg = d.config();
        let bs = Point::new(400.0, 400.0);
        let sp = Point::new(490.0, 500.0);
        let g = street_gain(&cfg.grid(), &bs, &sp, &cfg.propagation(), &cfg.uma(), None).unwrap();
        assert_eq!(g.mechanism, Mechanism::OneTurn);
        let corner = pg_around_corner(190.0, 100.0, &cfg.propagation().corner, 0.0).unwrap();
        assert_abs_diff_eq!(corner, -135.0, epsilon = 1e-9);
        assert!(g.pg_db > corner);
    }

    #[test]
    fn indoor_paths_combine_linearly() {
        let d = dep28().with_uniform_class(LossClass::Low);
        let p = Point::new(450.0, 440.0);
        let info = d.world().indoor_info(&p).unwrap();
        let ip = d.indoor_power(d.sites().center_bs, &p, &info, &mut NoShadow);
        let sum = power_sum_dbm(ip.paths.iter().map(|q| q.rx_dbm));
        assert_abs_diff_eq!(ip.total_dbm, sum, epsilon = 1e-12);
        assert!(ip.paths.iter().all(|q| q.rx_dbm <= ip.total_dbm));
        assert_eq!(ip.paths[4].path_id, 5);
        assert!(ip.paths[4].pl_in_db <= 5.0);
    }

    #[test]
    fn heatmap_path5_depth_cap() {
        let d = dep28().with_uniform_class(LossClass::Low);
        // 20 m from the nearest wall would be 10 dB uncapped.
        let p = Point::new(240.0, 470.0);
        if let Cell::Indoor(info) = d.world().cell(&p) {
            let ip = d.indoor_power(0, &p, &info, &mut NoShadow);
            assert!(info.depth_m() >= 10.0 || ip.paths[4].pl_in_db == pl_indoor(info.depth_m()));
            assert!(ip.paths[4].pl_in_db <= 5.0 + 1e-12);
        }
    }

    #[test]
    fn ecdf_percentiles() {
        let e = Ecdf::new(vec![3.0, 1.0, 2.0, 4.0, 5.0]);
        assert_eq!(e.percentile(0.0), 1.0);
        assert_eq!(e.percentile(50.0), 3.0);
        assert_eq!(e.percentile(100.0), 5.0);
        assert_abs_diff_eq!(e.percentile(10.0), 1.4, epsilon = 1e-12);
        assert_eq!(e.cdf(2.0), 0.4);
        assert_eq!(e.cdf(0.0), 0.0);
        let t = e.table(10);
        assert!(t.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
    }

    #[test]
    fn drop_is_deterministic_and_excludes_core() {
        let mut cfg = preset("paper-28ghz-1w").unwrap().with_grid(&GridSpec::reduced(400.0));
        cfg.isd_m = 400.0;
        let d = Deployment::new(&cfg).unwrap();
        let a = d.evaluate_drop(7, 0);
        let b = d.evaluate_drop(7, 0);
        assert_eq!(a, b);
        assert_ne!(a, d.evaluate_drop(7, 1));
        assert_eq!(a.len(), d.samples().len());
        assert!(a.iter().all(|r| in_diamond(&Point::new(r.x, r.y), &d.sites().center(), 200.0)));
        assert!(a.iter().all(|r| r.link.sinr_db <= r.link.snr_db + 1e-12));
    }
}
