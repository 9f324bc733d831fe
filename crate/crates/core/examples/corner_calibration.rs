//! Around-the-corner law: fitting the exponent to the 135 dB anchor for a range
//! of corner losses, and the resulting loss along a perpendicular street.
//!
//! cargo run --example corner_calibration

use o2i_coverage::propagation::{calibrate_corner_exponent, pg_around_corner, pg_same_street, solve_corner_loss, CornerParams, SameStreetParams};

fn main() {
    let (dc, x, anchor) = (100.0, 190.0, 135.0);
    let delta = solve_corner_loss(-35.0, 3.56, dc, x, anchor);
    println!("same-street exponent 3.56 would need corner loss {delta:.2} dB, which is not allowed");

    println!("\ncorner_loss_db  exponent  loss(d_c=100,x=150)  loss(d_c=100,x=300)");
    for delta in [1.0, 5.0, 10.0, 15.0, 20.0] {
        let n = calibrate_corner_exponent(-35.0, delta, dc, x, anchor).unwrap();
        let p = CornerParams { intercept_db: -35.0, exponent: n, corner_loss_db: delta, sigma_db: 7.1 };
        println!(
            "{delta:14.1}  {n:8.3}  {:19.1}  {:19.1}",
            -pg_around_corner(150.0, dc, &p, 0.0).unwrap(),
            -pg_around_corner(300.0, dc, &p, 0.0).unwrap()
        );
    }

    let same = SameStreetParams::default();
    println!("\nsame street: 100 m {:.1} dB, 190 m {:.1} dB", -pg_same_street(100.0, &same, 0.0).unwrap(), -pg_same_street(190.0, &same, 0.0).unwrap());
}
