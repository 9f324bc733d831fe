use o2i_coverage::grid::{GridSpec, LossClass, Point};
use o2i_coverage::preset;
use o2i_coverage::sim::{CoverageResult, Deployment, Ecdf};

fn run(name: &str, drops: usize) -> CoverageResult {
    let cfg = preset(name).unwrap();
    Deployment::new(&cfg).unwrap().run_drops(drops, cfg.seed)
}

// Mean absolute gap between two CDFs, taken over the 5th..95th percentiles.
fn cdf_gap(a: &Ecdf, b: &Ecdf) -> f64 {
    let qs: Vec<f64> = (1..=19).map(|k| 5.0 * k as f64).collect();
    qs.iter().map(|&q| (a.percentile(q) - b.percentile(q)).abs()).sum::<f64>() / qs.len() as f64
}

#[test]
fn indoor_point_beats_street_point_at_high_power() {
    let cfg = preset("paper-28ghz-100w").unwrap();
    let dep = Deployment::new(&cfg).unwrap().with_uniform_class(LossClass::Low);
    let p = dep.evaluate_median(&Point::new(450.0, 440.0)).unwrap();
    let q = dep.evaluate_median(&Point::new(450.0, 450.0)).unwrap();
    assert!(p.link.sinr_db > q.link.sinr_db, "P {} vs Q {}", p.link.sinr_db, q.link.sinr_db);
    assert!(p.link.serving_power_dbm < q.link.serving_power_dbm);
}

#[test]
fn power_reduction_costs_a_few_db_of_sinr() {
    let hi = run("paper-28ghz-100w", 5);
    let lo = run("paper-28ghz-1w", 5);
    for (h, l) in [(&hi.indoor, &lo.indoor), (&hi.outdoor, &lo.outdoor)] {
        let d = h.sinr_db.median() - l.sinr_db.median();
        assert!((0.0..=5.0).contains(&d), "{:?}: {d}", h.population);
    }
}

#[test]
fn wider_spacing_brings_indoor_and_outdoor_sinr_together() {
    let mut rows = Vec::new();
    for f in ["3.5", "7", "14", "28"] {
        let near = run(&format!("paper-{f}ghz-100w"), 5);
        let far = run(&format!("paper-{f}ghz-100w-isd800"), 5);
        rows.push((f, cdf_gap(&near.indoor.sinr_db, &near.outdoor.sinr_db), cdf_gap(&far.indoor.sinr_db, &far.outdoor.sinr_db)));
    }
    for (f, near, far) in &rows {
        println!("{f:>4} GHz: indoor/outdoor SINR gap {near:.2} dB at 400 m, {far:.2} dB at 800 m");
    }
    assert!(rows.iter().all(|(_, near, far)| far < near), "{rows:?}");
}

#[test]
fn heatmap_shows_los_streets_and_dark_buildings() {
    let cfg = preset("paper-28ghz-1w").unwrap().with_grid(&GridSpec::reduced(400.0));
    let map = Deployment::new(&cfg).unwrap().snapshot_heatmap(cfg.seed).unwrap();
    assert_eq!(map.snr_db.len(), map.nx * map.ny);
    let los = map.mean_snr_where(|k| map.class[k] == "street_los");
    let nlos = map.mean_snr_where(|k| map.class[k] == "street_nlos");
    let low = map.mean_snr_where(|k| map.class[k] == "indoor" && map.loss_class[k] == Some(LossClass::Low));
    let high = map.mean_snr_where(|k| map.class[k] == "indoor" && map.loss_class[k] == Some(LossClass::High));
    assert!(los > nlos + 5.0, "los {los} nlos {nlos}");
    assert!(low > high + 10.0, "low {low} high {high}");
    assert!(map.sinr_db.iter().zip(&map.snr_db).all(|(i, s)| i <= s));
}

#[test]
fn heatmap_is_reproducible() {
    let cfg = preset("paper-28ghz-1w").unwrap().with_grid(&GridSpec::reduced(400.0));
    let dep = Deployment::new(&cfg).unwrap();
    let a = dep.snapshot_heatmap(9).unwrap();
    let b = dep.snapshot_heatmap(9).unwrap();
    let c = dep.snapshot_heatmap(10).unwrap();
    assert_eq!(a.snr_db, b.snr_db);
    assert_ne!(a.snr_db, c.snr_db);
}

#[test]
fn drops_are_reproducible_and_seed_sensitive() {
    let cfg = preset("paper-28ghz-1w").unwrap().with_grid(&GridSpec::reduced(400.0));
    let dep = Deployment::new(&cfg).unwrap();
    let a = dep.run_drops(3, 4);
    let b = dep.run_drops(3, 4);
    let c = dep.run_drops(3, 5);
    assert_eq!(a.indoor.sinr_db.samples(), b.indoor.sinr_db.samples());
    assert_ne!(a.indoor.sinr_db.samples(), c.indoor.sinr_db.samples());
    assert_eq!(a.indoor.n_samples() + a.outdoor.n_samples(), 3 * dep.samples().len());
}

#[test]
fn every_sample_has_consistent_outage_and_rate() {
    let cfg = preset("paper-28ghz-1w").unwrap().with_grid(&GridSpec::reduced(400.0));
    let dep = Deployment::new(&cfg).unwrap();
    for r in dep.evaluate_drop(cfg.seed, 0) {
        assert!(r.link.sinr_db <= r.link.snr_db);
        assert_eq!(r.link.outage, r.link.sinr_db < -3.0);
        assert_eq!(r.link.outage, r.link.rate_bps == 0.0);
        assert!(r.serving_bs < dep.sites().bs_positions.len());
    }
}
