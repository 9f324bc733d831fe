//! Indoor and outdoor statistics across carriers, powers, ISDs and bandwidths.
//!
//! cargo run --release --example frequency_sweep -- [drops]

use o2i_coverage::sim::Deployment;
use o2i_coverage::preset;

fn main() {
    let drops: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    println!(
        "{:34} {:>9} {:>9} {:>10} {:>10} {:>9} {:>9} {:>10} {:>10}",
        "preset", "snr_in", "sinr_in", "edge_in", "med_in", "snr_out", "sinr_out", "edge_out", "med_out"
    );
    for name in [
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
        "paper-3.5ghz-100w-isd800-100mhz",
    ] {
        let cfg = preset(name).unwrap();
        let r = Deployment::new(&cfg).unwrap().run_drops(drops, cfg.seed);
        let (i, o) = (&r.indoor, &r.outdoor);
        // Medians in dB, rates in Mbps.
        println!(
            "{name:34} {:9.1} {:9.1} {:10.0} {:10.0} {:9.1} {:9.1} {:10.0} {:10.0}",
            i.snr_db.median(),
            i.sinr_db.median(),
            i.edge_rate_bps / 1e6,
            i.median_rate_bps / 1e6,
            o.snr_db.median(),
            o.sinr_db.median(),
            o.edge_rate_bps / 1e6,
            o.median_rate_bps / 1e6,
        );
    }
}
