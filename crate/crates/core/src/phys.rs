//! Physical constants and unit conversions.
//!
//! Internal units: km for length, ps for pulse widths, ns for gate and
//! dark-count times, GHz for rates, W for optical power. Transmissions are
//! linear factors in (0, 1]; dB only appears at the edges.

use crate::{ModelError, Result};

/// Planck constant, J·s (exact SI).
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Speed of light in vacuum, m/s (exact SI).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Speed of light in vacuum expressed in nm/ps.
pub const SPEED_OF_LIGHT_NM_PER_PS: f64 = 2.997_924_58e5;

/// Length of an AES-256 key in bits.
pub const AES_KEY_BITS: f64 = 256.0;

/// Fixed key refresh period, seconds.
pub const KEY_REFRESH_PERIOD_S: f64 = 60.0;

/// Converts a loss in dB into a linear transmission factor, `10^(-x/10)`.
pub fn db_to_linear(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// Inverse of [`db_to_linear`].
pub fn linear_to_db(factor: f64) -> f64 {
    -10.0 * factor.log10()
}

/// dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

/// Attenuation in dB/km converted to the natural-log coefficient in 1/km.
pub fn attenuation_per_km(alpha_db_per_km: f64) -> f64 {
    alpha_db_per_km * std::f64::consts::LN_10 / 10.0
}

/// Power transmission of `length_km` of fiber with the given attenuation.
pub fn fiber_transmission(alpha_db_per_km: f64, length_km: f64) -> Result<f64> {
    if !(length_km >= 0.0) {
        return Err(ModelError::invalid(
            "length_km",
            length_km,
            "fiber length must be non-negative",
        ));
    }
    Ok(db_to_linear(alpha_db_per_km * length_km))
}

/// Photon energy `hc/λ` in joules for a vacuum wavelength in nm.
pub fn photon_energy(wavelength_nm: f64) -> f64 {
    PLANCK * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Minimum secret key rate (b/s) that refreshes one AES-256 key per minute
/// on each of `channels` encrypted links.
pub fn min_skr_threshold(channels: u32) -> Result<f64> {
    if channels == 0 {
        return Err(ModelError::invalid(
            "channels",
            0.0,
            "at least one encrypted channel is required",
        ));
    }
    Ok(channels as f64 * AES_KEY_BITS / KEY_REFRESH_PERIOD_S)
}
