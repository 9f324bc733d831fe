//! Loading a flat config file, inspecting the resolved scenario and echoing
//! it back out.
//!
//! cargo run --example config_file

use o2i_coverage::config::{parse_config, PRESETS};

fn main() {
    let text = "\
preset = \"paper-3.5ghz-100w\"
isd_m = 800.0
bw_hz = 100e6
p_high = 0.3
seed = 42
";
    let cfg = parse_config(text).unwrap();
    println!("fc {} GHz, ptx {} dBm/pol, isd {} m, bw {} MHz, p_high {}", cfg.fc_ghz, cfg.ptx_dbm_per_pol, cfg.isd_m, cfg.bw_hz / 1e6, cfg.p_high);
    println!("noise {:.1} dBm, config hash {}", cfg.link().noise_dbm(), cfg.hash());

    match parse_config("fc_ghz = 28.0\n") {
        Err(e) => println!("partial file: {e}"),
        Ok(_) => unreachable!(),
    }
    match parse_config("preset = \"paper-28ghz-1w\"\nisd_m = 300.0\n") {
        Err(e) => println!("bad isd: {e}"),
        Ok(_) => unreachable!(),
    }

    println!("\npresets: {}", PRESETS.join(", "));
    println!("\neffective config:\n{}", cfg.to_config_string());
}
