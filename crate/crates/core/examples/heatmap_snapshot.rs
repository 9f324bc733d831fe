//! Single-instant SNR map over the whole grid with correlated shadowing.
//!
//! cargo run --release --example heatmap_snapshot -- [out.csv]

use o2i_coverage::export::write_heatmap_csv;
use o2i_coverage::grid::LossClass;
use o2i_coverage::{preset, snapshot_heatmap};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "heatmap_28ghz.csv".into());
    let cfg = preset("paper-28ghz-1w").unwrap();
    let map = snapshot_heatmap(&cfg, cfg.seed).unwrap();

    let mean = |label: &str| map.mean_snr_where(|k| map.class[k] == label);
    println!("mean SNR street_los   {:6.1} dB", mean("street_los"));
    println!("mean SNR street_nlos  {:6.1} dB", mean("street_nlos"));
    for lc in [LossClass::Low, LossClass::High] {
        let m = map.mean_snr_where(|k| map.class[k] == "indoor" && map.loss_class[k] == Some(lc));
        println!("mean SNR indoor {:5}  {m:6.1} dB", lc.as_str());
    }
    write_heatmap_csv(&map, &out).unwrap();
    println!("wrote {out} ({} x {} cells)", map.nx, map.ny);
}
