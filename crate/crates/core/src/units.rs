//! Unit conventions: energies in cm⁻¹, times in fs, `ħ = 1` otherwise.

use std::f64::consts::TAU;

/// Speed of light in cm/fs.
pub const SPEED_OF_LIGHT_CM_PER_FS: f64 = 2.997_924_58e-5;

/// Phase per (cm⁻¹ · fs): `2πc`.
pub const WAVENUMBER_FS_TO_RAD: f64 = TAU * SPEED_OF_LIGHT_CM_PER_FS;

/// Default FMO / TLS step and horizon.
pub const DEFAULT_TAU_FS: f64 = 5.0;
pub const DEFAULT_STEPS: usize = 200;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_factor_value() {
        assert!((WAVENUMBER_FS_TO_RAD - 1.883_651_6e-4).abs() < 1e-11);
    }
}
