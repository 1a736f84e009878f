//! Recomputes the `‖u‖_∞` calibration constant.

use micropolar::inequality::{
    calibration_ensemble_max, CALIBRATION_BAND, CALIBRATION_COUNT, CALIBRATION_N, CALIBRATION_SEED,
};

fn main() {
    let c = calibration_ensemble_max(CALIBRATION_N, CALIBRATION_BAND, CALIBRATION_COUNT, CALIBRATION_SEED)
        .expect("calibration");
    println!("{c:.17e}");
}
