//! Physical constants; all lengths in meters.

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Gaussian-unit conductivity per S/m, `1/(4πε₀)` (1/s per S/m).
pub const GAUSSIAN_PER_SIEMENS: f64 = 8.987_55e9;

/// Mean earth radius (m).
pub const EARTH_RADIUS: f64 = 6.371e6;

/// Equivalent earth radius for standard refraction, `4/3` of the mean radius.
pub const EQUIVALENT_EARTH_RADIUS: f64 = EARTH_RADIUS * 4.0 / 3.0;

/// Wavenumber (1/m) of a frequency in Hz.
pub fn wavenumber(frequency_hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * frequency_hz / SPEED_OF_LIGHT
}

/// Frequency in Hz of a wavenumber (1/m).
pub fn frequency(k: f64) -> f64 {
    k * SPEED_OF_LIGHT / (2.0 * std::f64::consts::PI)
}
