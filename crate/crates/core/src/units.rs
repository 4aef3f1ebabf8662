//! dB helpers and physical constants shared by the models.

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Floor used when a dB value has to be written out as a finite number.
pub const DB_FLOOR: f64 = -400.0;

#[inline]
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[inline]
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `to_db` clamped at [`DB_FLOOR`] so a linear zero serializes as a number.
#[inline]
pub fn to_db_clamped(linear: f64) -> f64 {
    to_db(linear).max(DB_FLOOR)
}
