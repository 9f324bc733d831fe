//! Indoor outage versus the share of high-loss buildings at 28 GHz, 1 W/pol.
//!
//! cargo run --release --example outage_drops -- [drops]

use o2i_coverage::sim::Deployment;
use o2i_coverage::preset;

fn main() {
    let drops: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    println!("p_high  indoor_outage  outdoor_outage  indoor_edge_Mbps  outdoor_edge_Mbps  indoor_med_sinr  outdoor_med_sinr");
    for p_high in [0.0, 0.2, 1.0] {
        let mut cfg = preset("paper-28ghz-1w").unwrap();
        cfg.p_high = p_high;
        let r = Deployment::new(&cfg).unwrap().run_drops(drops, cfg.seed);
        println!(
            "{p_high:6.1}  {:13.3}  {:14.3}  {:16.1}  {:17.1}  {:15.1}  {:16.1}",
            r.indoor.outage_fraction,
            r.outdoor.outage_fraction,
            r.indoor.edge_rate_bps / 1e6,
            r.outdoor.edge_rate_bps / 1e6,
            r.indoor.sinr_db.median(),
            r.outdoor.sinr_db.median(),
        );
    }
}
