//! Walker-Delta constellations on circular orbits over a spherical, rotating
//! Earth, plus ground-user placement and elevation/visibility geometry.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phased_array::{ArrayFrame, ArraySpec};
use crate::Vec3;

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;
/// Earth's gravitational parameter, m^3/s^2.
pub const MU_EARTH: f64 = 3.986004418e14;
/// Sidereal rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.2921159e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemRole {
    Primary,
    Secondary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub num_planes: u32,
    pub sats_per_plane: u32,
}

impl ShellSpec {
    pub const fn new(altitude_km: f64, inclination_deg: f64, num_planes: u32, sats_per_plane: u32) -> Self {
        ShellSpec { altitude_km, inclination_deg, num_planes, sats_per_plane }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude_km > 0.0) || !self.altitude_km.is_finite() {
            return Err(Error::validation("altitude_km", "must be positive"));
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(Error::validation("inclination_deg", "must lie in [0, 180]"));
        }
        if self.num_planes == 0 {
            return Err(Error::validation("num_planes", "must be at least 1"));
        }
        if self.sats_per_plane == 0 {
            return Err(Error::validation("sats_per_plane", "must be at least 1"));
        }
        Ok(())
    }

    pub fn satellite_count(&self) -> usize {
        self.num_planes as usize * self.sats_per_plane as usize
    }

    pub fn semi_major_axis_m(&self) -> f64 {
        EARTH_RADIUS_M + self.altitude_km * 1e3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub name: String,
    pub shells: Vec<ShellSpec>,
    pub role: SystemRole,
}

impl ConstellationSpec {
    /// First-generation Starlink shells.
    pub fn starlink() -> Self {
        ConstellationSpec {
            name: "starlink".into(),
            role: SystemRole::Primary,
            shells: vec![
                ShellSpec::new(540.0, 53.2, 72, 22),
                ShellSpec::new(550.0, 53.0, 72, 22),
                ShellSpec::new(560.0, 97.6, 4, 43),
                ShellSpec::new(560.0, 97.6, 6, 58),
                ShellSpec::new(570.0, 70.0, 36, 20),
            ],
        }
    }

    /// Project Kuiper shells.
    pub fn kuiper() -> Self {
        ConstellationSpec {
            name: "kuiper".into(),
            role: SystemRole::Secondary,
            shells: vec![
                ShellSpec::new(590.0, 33.0, 28, 28),
                ShellSpec::new(610.0, 42.0, 36, 36),
                ShellSpec::new(630.0, 51.9, 34, 34),
            ],
        }
    }

    pub fn total_satellites(&self) -> usize {
        self.shells.iter().map(ShellSpec::satellite_count).sum()
    }

    /// Lowest shell altitude; the power-control reference.
    pub fn lowest_altitude_km(&self) -> Option<f64> {
        self.shells.iter().map(|s| s.altitude_km).min_by(|a, b| a.total_cmp(b))
    }

    pub fn validate(&self) -> Result<()> {
        if self.shells.is_empty() {
            return Err(Error::validation(format!("{}.shells", self.name), "at least one shell required"));
        }
        for (i, shell) in self.shells.iter().enumerate() {
            shell.validate().map_err(|e| match e {
                Error::Validation { field, reason } => {
                    Error::Validation { field: format!("{}.shells[{i}].{field}", self.name), reason }
                }
                other => other,
            })?;
        }
        Ok(())
    }
}

/// One satellite's circular orbit. Positions are a closed-form function of
/// time since the common epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteState {
    pub id: u32,
    pub shell_index: usize,
    pub shell: ShellSpec,
    pub raan_rad: f64,
    /// Argument of latitude at epoch.
    pub arg_phase_rad: f64,
    pub inclination_rad: f64,
    pub semi_major_axis_m: f64,
    pub mean_motion_rad_s: f64,
}

impl SatelliteState {
    pub fn period_s(&self) -> f64 {
        TAU / self.mean_motion_rad_s
    }

    /// Position in the Earth-centred inertial frame aligned with the
    /// Earth-fixed frame at epoch.
    pub fn inertial_position(&self, t: f64) -> Vec3 {
        let u = self.arg_phase_rad + self.mean_motion_rad_s * t;
        let (su, cu) = u.sin_cos();
        let (so, co) = self.raan_rad.sin_cos();
        let (si, ci) = self.inclination_rad.sin_cos();
        self.semi_major_axis_m * Vec3::new(co * cu - so * su * ci, so * cu + co * su * ci, su * si)
    }

    fn inertial_velocity(&self, t: f64) -> Vec3 {
        let u = self.arg_phase_rad + self.mean_motion_rad_s * t;
        let (su, cu) = u.sin_cos();
        let (so, co) = self.raan_rad.sin_cos();
        let (si, ci) = self.inclination_rad.sin_cos();
        self.semi_major_axis_m
            * self.mean_motion_rad_s
            * Vec3::new(-co * su - so * cu * ci, -so * su + co * cu * ci, cu * si)
    }

    /// Earth-fixed position at `t` seconds after epoch.
    pub fn propagate_ecef(&self, t: f64) -> Vec3 {
        rotate_z(&self.inertial_position(t), -EARTH_ROTATION_RAD_S * t)
    }

    /// Earth-fixed position and velocity (velocity relative to the rotating
    /// Earth).
    pub fn state_ecef(&self, t: f64) -> (Vec3, Vec3) {
        let angle = -EARTH_ROTATION_RAD_S * t;
        let r = rotate_z(&self.inertial_position(t), angle);
        let v_inertial = rotate_z(&self.inertial_velocity(t), angle);
        let omega = Vec3::new(0.0, 0.0, EARTH_ROTATION_RAD_S);
        (r, v_inertial - omega.cross(&r))
    }
}

fn rotate_z(v: &Vec3, angle: f64) -> Vec3 {
    let (s, c) = angle.sin_cos();
    Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
}

/// Lay out every shell as a Walker-Delta pattern: planes evenly spaced over
/// 360 degrees of RAAN, satellites evenly spaced within each plane, and plane
/// `j` offset by `j * phasing * 360 / (planes * sats_per_plane)` degrees.
/// Ids are assigned consecutively, shell by shell.
pub fn build_constellation(spec: &ConstellationSpec, seed_phasing: u32) -> Result<Vec<SatelliteState>> {
    spec.validate()?;
    let mut sats = Vec::with_capacity(spec.total_satellites());
    for (shell_index, shell) in spec.shells.iter().enumerate() {
        let a = shell.semi_major_axis_m();
        let n = (MU_EARTH / (a * a * a)).sqrt();
        let planes = shell.num_planes as f64;
        let per_plane = shell.sats_per_plane as f64;
        let phase_step = seed_phasing as f64 * TAU / (planes * per_plane);
        for j in 0..shell.num_planes {
            let raan = TAU * j as f64 / planes;
            for k in 0..shell.sats_per_plane {
                let anomaly = (TAU * k as f64 / per_plane + j as f64 * phase_step).rem_euclid(TAU);
                sats.push(SatelliteState {
                    id: sats.len() as u32,
                    shell_index,
                    shell: *shell,
                    raan_rad: raan,
                    arg_phase_rad: anomaly,
                    inclination_rad: shell.inclination_deg.to_radians(),
                    semi_major_axis_m: a,
                    mean_motion_rad_s: n,
                });
            }
        }
    }
    Ok(sats)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserRole {
    /// `u`, served by the primary system.
    Primary,
    /// `v`, served by the secondary system.
    Secondary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundUser {
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub alt_m: f64,
    pub array: ArraySpec,
    pub noise_figure_db: f64,
    pub role: UserRole,
}

impl GroundUser {
    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat_deg) {
            return Err(Error::validation("lat_deg", "must lie in [-90, 90]"));
        }
        if !(-180.0..=180.0).contains(&self.lon_deg) {
            return Err(Error::validation("lon_deg", "must lie in [-180, 180]"));
        }
        self.array.validate()
    }

    pub fn position(&self) -> Vec3 {
        user_ecef(self)
    }
}

/// Spherical-Earth position of a geodetic point.
pub fn geodetic_to_ecef(lat_deg: f64, lon_deg: f64, alt_m: f64) -> Vec3 {
    let r = EARTH_RADIUS_M + alt_m;
    let (slat, clat) = lat_deg.to_radians().sin_cos();
    let (slon, clon) = lon_deg.to_radians().sin_cos();
    r * Vec3::new(clat * clon, clat * slon, slat)
}

pub fn user_ecef(user: &GroundUser) -> Vec3 {
    geodetic_to_ecef(user.lat_deg, user.lon_deg, user.alt_m)
}

/// Geocentric latitude of an Earth-fixed point, degrees.
pub fn latitude_deg(pos: &Vec3) -> f64 {
    (pos.z / pos.norm()).asin().to_degrees()
}

/// Elevation of `sat_pos` above the local horizon at `user_pos`, degrees.
pub fn elevation_angle(user_pos: &Vec3, sat_pos: &Vec3) -> Result<f64> {
    let d = sat_pos - user_pos;
    let range = d.norm();
    if range == 0.0 {
        return Err(Error::Geometry("satellite coincides with user".into()));
    }
    let up = user_pos.normalize();
    Ok((d.dot(&up) / range).clamp(-1.0, 1.0).asin().to_degrees())
}

/// Point at `altitude_km` seen from `user_pos` at the given elevation and
/// azimuth (degrees, azimuth clockwise from North).
pub fn position_from_look_angles(
    user_pos: &Vec3,
    elevation_deg: f64,
    azimuth_deg: f64,
    altitude_km: f64,
) -> Result<Vec3> {
    let frame = ArrayFrame::ground(user_pos)?;
    let r_user = user_pos.norm();
    let r_sat = EARTH_RADIUS_M + altitude_km * 1e3;
    if r_sat <= r_user {
        return Err(Error::validation("altitude_km", "must place the point above the user"));
    }
    let (se, ce) = elevation_deg.to_radians().sin_cos();
    let (sa, ca) = azimuth_deg.to_radians().sin_cos();
    // |user + d * dir| = r_sat
    let range = -r_user * se + (r_user * r_user * se * se + r_sat * r_sat - r_user * r_user).sqrt();
    let dir = frame.x * (ce * sa) + frame.y * (ce * ca) + frame.z * se;
    Ok(user_pos + dir * range)
}

/// Ids of satellites at or above `eps_min_deg` elevation at time `t`.
pub fn visible_set(user_pos: &Vec3, sats: &[SatelliteState], t: f64, eps_min_deg: f64) -> Vec<u32> {
    sats.iter()
        .filter(|s| elevation_angle(user_pos, &s.propagate_ecef(t)).is_ok_and(|e| e >= eps_min_deg))
        .map(|s| s.id)
        .collect()
}

/// Range, elevation and the link direction as seen in each end's array frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub range_m: f64,
    pub elevation_deg: f64,
    /// User -> satellite, in the user's array frame.
    pub dir_user_frame: Vec3,
    /// Satellite -> user, in the satellite's array frame.
    pub dir_sat_frame: Vec3,
}

impl LinkGeometry {
    pub fn compute(user_pos: &Vec3, user_frame: &ArrayFrame, sat_pos: &Vec3, sat_frame: &ArrayFrame) -> Result<Self> {
        let range_m = (sat_pos - user_pos).norm();
        Ok(LinkGeometry {
            range_m,
            elevation_deg: elevation_angle(user_pos, sat_pos)?,
            dir_user_frame: user_frame.direction_to(user_pos, sat_pos)?,
            dir_sat_frame: sat_frame.direction_to(sat_pos, user_pos)?,
        })
    }
}
