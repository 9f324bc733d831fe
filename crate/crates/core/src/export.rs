//! CSV and JSON writers. Every file carries the seed and config hash: CSVs in a
//! leading `#` comment line, JSON as top-level fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::fading::FadingField;
use crate::grid::{Cell, World};
use crate::o2i::BplCurvePoint;
use crate::sim::{CoverageResult, Heatmap, PopulationStats};

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Steps in the exported CDF tables (0.1% resolution).
pub const CDF_STEPS: usize = 1000;

fn create(path: &Path) -> Result<BufWriter<File>, ExportError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| io_err(dir, source))?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| io_err(path, source))
}

fn io_err(path: &Path, source: std::io::Error) -> ExportError {
    ExportError::Io { path: path.display().to_string(), source }
}

fn header_line(seed: u64, config: &ScenarioConfig) -> String {
    format!("# seed={seed} config_hash={}\n", config.hash())
}

fn write_all(path: &Path, text: &str) -> Result<(), ExportError> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

/// `population,metric,value,cdf`; SNR and SINR in dB, rate in bit/s.
pub fn cdf_csv(result: &CoverageResult) -> String {
    let mut out = header_line(result.seed, &result.config);
    out.push_str("population,metric,value,cdf\n");
    for stats in [&result.indoor, &result.outdoor] {
        let pop = stats.population.as_str();
        for (metric, e) in [("snr", &stats.snr_db), ("sinr", &stats.sinr_db), ("rate", &stats.rate_bps)] {
            if e.is_empty() {
                continue;
            }
            for (v, c) in e.table(CDF_STEPS) {
                out.push_str(&format!("{pop},{metric},{v},{c}\n"));
            }
        }
    }
    out
}

pub fn write_cdf_csv(result: &CoverageResult, path: impl AsRef<Path>) -> Result<(), ExportError> {
    write_all(path.as_ref(), &cdf_csv(result))
}

#[derive(Debug, Serialize)]
pub struct PopulationSummary {
    pub samples: usize,
    pub outage_fraction: f64,
    pub edge_rate_bps: f64,
    pub median_rate_bps: f64,
    pub median_snr_db: f64,
    pub median_sinr_db: f64,
}

impl From<&PopulationStats> for PopulationSummary {
    fn from(s: &PopulationStats) -> Self {
        Self {
            samples: s.n_samples(),
            outage_fraction: s.outage_fraction,
            edge_rate_bps: s.edge_rate_bps,
            median_rate_bps: s.median_rate_bps,
            median_snr_db: s.snr_db.median(),
            median_sinr_db: s.sinr_db.median(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub seed: u64,
    pub config_hash: String,
    pub n_drops: usize,
    pub indoor_outage: f64,
    pub outdoor_outage: f64,
    pub indoor: PopulationSummary,
    pub outdoor: PopulationSummary,
    pub config: &'a ScenarioConfig,
}

pub fn summary(result: &CoverageResult) -> Summary<'_> {
    Summary {
        seed: result.seed,
        config_hash: result.config.hash(),
        n_drops: result.n_drops,
        indoor_outage: result.indoor.outage_fraction,
        outdoor_outage: result.outdoor.outage_fraction,
        indoor: (&result.indoor).into(),
        outdoor: (&result.outdoor).into(),
        config: &result.config,
    }
}

pub fn write_summary_json(result: &CoverageResult, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let mut text = serde_json::to_string_pretty(&summary(result))?;
    text.push('\n');
    write_all(path.as_ref(), &text)
}

/// `x,y,class,snr_db`, one row per lattice cell.
pub fn write_heatmap_csv(map: &Heatmap, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let res = map.resolution_m;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(header_line(map.seed, &map.config).as_bytes())?;
        writeln!(w, "x,y,class,snr_db")?;
        for j in 0..map.ny {
            for i in 0..map.nx {
                let k = map.index(i, j);
                writeln!(w, "{},{},{},{:.3}", i as f64 * res, j as f64 * res, map.class[k], map.snr_db[k])?;
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| io_err(path, e))
}

/// `f_ghz,model,bpl_db`.
pub fn bpl_curves_csv(points: &[BplCurvePoint], seed: u64, config: &ScenarioConfig) -> String {
    let mut out = header_line(seed, config);
    out.push_str("f_ghz,model,bpl_db\n");
    for p in points {
        out.push_str(&format!("{},{},{:.4}\n", p.f_ghz, p.model, p.bpl_db));
    }
    out
}

pub fn write_bpl_curves_csv(
    points: &[BplCurvePoint],
    seed: u64,
    config: &ScenarioConfig,
    path: impl AsRef<Path>,
) -> Result<(), ExportError> {
    write_all(path.as_ref(), &bpl_curves_csv(points, seed, config))
}

/// `x,y,class,building_id,loss_class`; street cells leave the last two empty.
pub fn write_classification_csv(
    world: &World,
    seed: u64,
    config: &ScenarioConfig,
    path: impl AsRef<Path>,
) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(header_line(seed, config).as_bytes())?;
        writeln!(w, "x,y,class,building_id,loss_class")?;
        for p in world.lattice() {
            let (class, id) = match world.cell(&p) {
                Cell::Street(_) => ("street", None),
                Cell::Indoor(info) => ("indoor", Some(info.building_id)),
                Cell::IgnoredCore { building_id } => ("ignored", Some(building_id)),
            };
            match id {
                Some(id) => writeln!(w, "{},{},{class},{id},{}", p.x, p.y, world.buildings()[id].loss_class.as_str())?,
                None => writeln!(w, "{},{},{class},,", p.x, p.y)?,
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| io_err(path, e))
}

/// `x,y,shadow_db`.
pub fn write_field_csv(
    field: &FadingField,
    resolution_m: f64,
    seed: u64,
    config: &ScenarioConfig,
    path: impl AsRef<Path>,
) -> Result<(), ExportError> {
    let path = path.as_ref();
    let mut w = create(path)?;
    let run = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(header_line(seed, config).as_bytes())?;
        writeln!(w, "x,y,shadow_db")?;
        for j in 0..field.ny {
            for i in 0..field.nx {
                writeln!(w, "{},{},{:.4}", i as f64 * resolution_m, j as f64 * resolution_m, field.at(i, j))?;
            }
        }
        w.flush()
    };
    run(&mut w).map_err(|e| io_err(path, e))
}

/// The effective configuration in loadable form, preceded by the hash comment.
pub fn write_config_echo(config: &ScenarioConfig, path: impl AsRef<Path>) -> Result<(), ExportError> {
    let text = format!("{}{}", header_line(config.seed, config), config.to_config_string());
    write_all(path.as_ref(), &text)
}
