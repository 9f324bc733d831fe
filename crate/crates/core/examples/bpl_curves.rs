//! Building penetration loss versus carrier frequency.
//!
//! cargo run --example bpl_curves

use o2i_coverage::o2i::{bpl_5gcm, bpl_curves, pl_tw, BplModel};

fn main() {
    for f in [3.5, 7.0, 14.0, 28.0] {
        println!(
            "{f:5.1} GHz  3gpp low {:5.1}  3gpp high {:5.1}  5gcm low {:5.1}  5gcm high {:5.1} dB",
            pl_tw(&BplModel::three_gpp_low(), f).unwrap(),
            pl_tw(&BplModel::three_gpp_high(), f).unwrap(),
            bpl_5gcm(true, f),
            bpl_5gcm(false, f),
        );
    }
    let curves = bpl_curves();
    println!("\nf_ghz,model,bpl_db ({} rows, first 8 shown)", curves.len());
    for p in curves.iter().take(8) {
        println!("{},{},{:.2}", p.f_ghz, p.model, p.bpl_db);
    }
}
