//! Median-channel link budgets at the three reference points A, P and Q.
//!
//! cargo run --release --example worked_examples

use o2i_coverage::grid::{Cell, LossClass, Point};
use o2i_coverage::propagation::pg_around_corner;
use o2i_coverage::sim::{Deployment, NoShadow};
use o2i_coverage::{preset, ScenarioConfig};

fn report(dep: &Deployment, name: &str, p: Point) {
    let r = dep.evaluate_median(&p).expect("reference points are not in a core");
    println!(
        "{name} ({:.0}, {:.0}) {:?}: serving BS {} S = {:.1} dBm, I(other sites) = {:.1} dBm, I(total) = {:.1} dBm, SNR = {:.1} dB, SINR = {:.1} dB",
        p.x,
        p.y,
        r.population,
        r.serving_bs,
        r.link.serving_power_dbm,
        r.link.inter_site_interference_dbm,
        r.link.interference_dbm,
        r.link.snr_db,
        r.link.sinr_db,
    );
    if let Cell::Indoor(info) = dep.world().cell(&p) {
        let ip = dep.indoor_power(r.serving_bs, &p, &info, &mut NoShadow);
        for path in ip.paths {
            println!(
                "    path {} {:>9}: outdoor PG {:7.1} dB ({:?}), BPL {:.1} dB, indoor {:.1} dB -> {:.1} dBm",
                path.path_id,
                path.face.map(|f| format!("{f:?}")).unwrap_or_else(|| "rooftop".into()),
                path.outdoor_pg_db,
                path.mechanism,
                path.pl_tw_db,
                path.pl_in_db,
                path.rx_dbm,
            );
        }
    }
}

fn main() {
    let cfg: ScenarioConfig = preset("paper-28ghz-1w").unwrap();
    let corner = cfg.propagation().corner;
    println!(
        "corner law: exponent {:.3}, corner loss {:.2} dB; loss at d_c=100 m, x=190 m: {:.1} dB",
        corner.exponent,
        corner.corner_loss_db,
        -pg_around_corner(190.0, 100.0, &corner, 0.0).unwrap()
    );

    let dep = Deployment::new(&cfg).unwrap().with_uniform_class(LossClass::Low);
    println!("\n28 GHz, 1 W/pol, low-loss buildings");
    report(&dep, "A", Point::new(490.0, 490.0));
    report(&dep, "street next to A", Point::new(490.0, 500.0));

    let dep = Deployment::new(&preset("paper-28ghz-100w").unwrap()).unwrap().with_uniform_class(LossClass::Low);
    println!("\n28 GHz, 100 W/pol, low-loss buildings");
    report(&dep, "P", Point::new(450.0, 440.0));
    report(&dep, "Q", Point::new(450.0, 450.0));
}
