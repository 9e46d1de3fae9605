//! Unit conventions.
//!
//! Internally time is in ns and angular frequency in rad/ns. Rates are 1/ns.

use std::f64::consts::PI;

pub const TWO_PI: f64 = 2.0 * PI;

/// Laser repetition period of the mode-locked source, ns.
pub const REPETITION_PERIOD_NS: f64 = 13.0;

/// Ordinary frequency in GHz to angular frequency in rad/ns.
pub fn ghz_to_rad_per_ns(ghz: f64) -> f64 {
    TWO_PI * ghz
}

/// Angular frequency in rad/ns to ordinary frequency in GHz.
pub fn rad_per_ns_to_ghz(omega: f64) -> f64 {
    omega / TWO_PI
}

pub fn ps_to_ns(ps: f64) -> f64 {
    ps * 1e-3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_round_trip() {
        let w = ghz_to_rad_per_ns(25.3);
        assert!((w - 158.964_588_3).abs() < 1e-6);
        assert!((rad_per_ns_to_ghz(w) - 25.3).abs() < 1e-12);
    }
}
