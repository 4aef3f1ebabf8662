//! Hand-placed scenes for unit tests.

use crate::constellation::{geodetic_to_ecef, position_from_look_angles};
use crate::link_budget::{noise_power_dbw, RadioConfig};
use crate::phased_array::ArraySpec;
use crate::selection::{SatView, SceneSnapshot, UserTerminal};
use crate::Vec3;

pub const AUSTIN: (f64, f64) = (30.267153, -97.743057);

/// `(id, elevation_deg, azimuth_deg, altitude_km, tx_power_dbw)`
pub type Placement = (u32, f64, f64, f64, f64);

pub fn user(array: u32) -> UserTerminal {
    let pos = geodetic_to_ecef(AUSTIN.0, AUSTIN.1, 0.0);
    UserTerminal::new(pos, ArraySpec::ground(array), noise_power_dbw(&RadioConfig::default())).unwrap()
}

pub fn sat(user_pos: &Vec3, (id, el, az, alt, power): Placement) -> SatView {
    let pos = position_from_look_angles(user_pos, el, az, alt).unwrap();
    // any horizontal velocity will do
    let vel = pos.cross(&Vec3::z()).normalize() * 7500.0 + Vec3::z() * 100.0;
    SatView::new(id, pos, vel, ArraySpec::satellite(64), power, user_pos).unwrap()
}

pub fn scene(primary: &[Placement], secondary: &[Placement]) -> SceneSnapshot {
    let u = user(32);
    let p = primary.iter().map(|&x| sat(u.pos(), x)).collect();
    let s = secondary.iter().map(|&x| sat(u.pos(), x)).collect();
    SceneSnapshot::new(0.0, u, u, p, s, RadioConfig::default().carrier_hz)
}
