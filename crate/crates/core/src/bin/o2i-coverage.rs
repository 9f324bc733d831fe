use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use o2i_coverage::config::{load_config, preset, ScenarioConfig};
use o2i_coverage::export;
use o2i_coverage::o2i::bpl_curves;
use o2i_coverage::propagation::{pg_around_corner, solve_corner_loss};
use o2i_coverage::sim::Deployment;

#[derive(Parser)]
#[command(name = "o2i-coverage", version, about = "Urban street-grid outdoor and outdoor-to-indoor coverage simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drop-based statistics: CDF table, summary and config echo.
    Simulate(Common),
    /// Single-instant SNR map with correlated shadowing.
    Heatmap(Common),
    /// Penetration loss versus frequency for the 3GPP and 5GCM models.
    BplCurves(Common),
    /// Solve the corner-law exponent from the path-loss anchor.
    CalibrateCorner(Common),
}

#[derive(Args)]
struct Common {
    /// Config file (flat `key = value`).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named scenario, e.g. paper-28ghz-1w.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn resolve(&self) -> Result<ScenarioConfig, Box<dyn std::error::Error>> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => load_config(path)?,
            (None, Some(name)) => preset(name)?,
            (None, None) => preset("paper-28ghz-1w")?,
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(drops) = self.drops {
            cfg.n_drops = drops;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.display().to_string();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Simulate(c) => {
            let cfg = c.resolve()?;
            let out = Path::new(&cfg.out_dir);
            let result = Deployment::new(&cfg)?.run_drops(cfg.n_drops, cfg.seed);
            export::write_cdf_csv(&result, out.join("cdf.csv"))?;
            export::write_summary_json(&result, out.join("summary.json"))?;
            export::write_config_echo(&cfg, out.join("config.toml"))?;
            for s in [&result.indoor, &result.outdoor] {
                println!(
                    "{:7} samples {:8}  outage {:5.1}%  edge {:7.1} Mbps  median {:7.1} Mbps  median SINR {:5.1} dB",
                    s.population.as_str(),
                    s.n_samples(),
                    100.0 * s.outage_fraction,
                    s.edge_rate_bps / 1e6,
                    s.median_rate_bps / 1e6,
                    s.sinr_db.median(),
                );
            }
            println!("wrote {}/{{cdf.csv,summary.json,config.toml}}", out.display());
        }
        Command::Heatmap(c) => {
            let cfg = c.resolve()?;
            let out = Path::new(&cfg.out_dir);
            let dep = Deployment::new(&cfg)?;
            let map = dep.snapshot_heatmap(cfg.seed)?;
            export::write_heatmap_csv(&map, out.join("heatmap.csv"))?;
            export::write_config_echo(&cfg, out.join("config.toml"))?;
            println!("wrote {}/heatmap.csv ({} x {})", out.display(), map.nx, map.ny);
        }
        Command::BplCurves(c) => {
            let cfg = c.resolve()?;
            let path = Path::new(&cfg.out_dir).join("bpl_curves.csv");
            export::write_bpl_curves_csv(&bpl_curves(), cfg.seed, &cfg, &path)?;
            println!("wrote {}", path.display());
        }
        Command::CalibrateCorner(c) => {
            let mut cfg = c.resolve()?;
            let n = cfg.calibrate_corner()?;
            let (dc, x, loss) = (cfg.corner_anchor_dc_m, cfg.corner_anchor_x_m, cfg.corner_anchor_loss_db);
            let check = -pg_around_corner(x, dc, &cfg.propagation().corner, 0.0)?;
            println!("anchor: {loss} dB at d_c = {dc} m, x = {x} m");
            println!(
                "intercept {} dB, corner loss {} dB -> exponent {n:.4} (model loss at anchor {check:.2} dB)",
                cfg.corner_intercept_db, cfg.corner_loss_db
            );
            let delta = solve_corner_loss(cfg.corner_intercept_db, cfg.same_street_exponent, dc, x, loss);
            println!(
                "with the same-street exponent {} the anchor needs corner loss {delta:.2} dB{}",
                cfg.same_street_exponent,
                if delta > 0.0 { "" } else { " (not positive, rejected)" }
            );
            let path = Path::new(&cfg.out_dir).join("config.toml");
            export::write_config_echo(&cfg, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
