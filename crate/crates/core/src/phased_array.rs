//! Uniform planar array with half-wavelength element spacing and
//! matched-filter (conjugate phase) steering.
//!
//! Directions are expressed in the array frame: `z` is boresight, `x` runs
//! along the array rows and `y` along the columns. A direction `d` maps to
//! direction cosines `(u, v) = (d.x, d.y)`. With isotropic elements the gain
//! toward `eval` while steered at `steer` is
//!
//! ```text
//! |sum_{m,n} exp(j*pi*(m*(u_e - u_s) + n*(v_e - v_s)))|^2 / (rows * cols)
//! ```
//!
//! which factors into two 1-D Dirichlet kernels. Directions behind the array
//! (negative boresight component) receive zero gain.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::to_db;
use crate::Vec3;

/// Element spacing in wavelengths. Fixed for every array in the model.
pub const ELEMENT_SPACING_WAVELENGTHS: f64 = 0.5;

const UNIT_TOLERANCE: f64 = 1e-9;

/// Which way the array faces. Satellites look down at nadir with their
/// in-plane `x` axis along the velocity; ground terminals look up at zenith
/// with `x` pointing East.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boresight {
    Nadir,
    Zenith,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub rows: u32,
    pub cols: u32,
    pub boresight: Boresight,
}

impl ArraySpec {
    pub fn new(rows: u32, cols: u32, boresight: Boresight) -> Result<Self> {
        let spec = ArraySpec { rows, cols, boresight };
        spec.validate()?;
        Ok(spec)
    }

    /// Square array facing zenith, as carried by a ground user.
    pub fn ground(size: u32) -> Self {
        ArraySpec { rows: size, cols: size, boresight: Boresight::Zenith }
    }

    /// Square array facing nadir, as carried by a satellite.
    pub fn satellite(size: u32) -> Self {
        ArraySpec { rows: size, cols: size, boresight: Boresight::Nadir }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 {
            return Err(Error::validation("rows", "must be at least 1"));
        }
        if self.cols == 0 {
            return Err(Error::validation("cols", "must be at least 1"));
        }
        Ok(())
    }

    pub fn elements(&self) -> u32 {
        self.rows * self.cols
    }

    /// Short label such as `32x32`.
    pub fn label(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

/// Peak gain in dBi: `10 log10(rows * cols)`.
pub fn max_gain(spec: &ArraySpec) -> f64 {
    to_db(spec.elements() as f64)
}

/// `|sum_{m<count} exp(j*pi*spacing*2*m*delta)|^2`, closed form.
#[inline]
fn dirichlet_power(count: u32, delta: f64) -> f64 {
    let n = count as f64;
    let half = PI * ELEMENT_SPACING_WAVELENGTHS * delta;
    let den = half.sin();
    if den.abs() < 1e-12 {
        // main lobe or grating lobe
        return n * n;
    }
    let num = (n * half).sin();
    (num * num) / (den * den)
}

/// Linear gain for unit directions already known to be valid. Used on hot
/// paths where the directions come from [`ArrayFrame::direction_to`].
#[inline]
pub fn steered_gain_linear(spec: &ArraySpec, steer_dir: &Vec3, eval_dir: &Vec3) -> f64 {
    if eval_dir.z < 0.0 {
        return 0.0;
    }
    let du = eval_dir.x - steer_dir.x;
    let dv = eval_dir.y - steer_dir.y;
    dirichlet_power(spec.rows, du) / spec.rows as f64 * dirichlet_power(spec.cols, dv) / spec.cols as f64
}

/// Gain in dBi toward `eval_dir` while steered at `steer_dir`. Both
/// directions must be unit vectors in the array frame.
pub fn steered_gain(spec: &ArraySpec, steer_dir: &Vec3, eval_dir: &Vec3) -> Result<f64> {
    check_unit("steer_dir", steer_dir)?;
    check_unit("eval_dir", eval_dir)?;
    Ok(to_db(steered_gain_linear(spec, steer_dir, eval_dir)))
}

fn check_unit(field: &str, dir: &Vec3) -> Result<()> {
    let norm = dir.norm();
    if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::validation(field, format!("direction must be unit-norm, got |d| = {norm}")));
    }
    Ok(())
}

/// Orthonormal basis of an array mounted somewhere in Earth-fixed space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayFrame {
    pub x: Vec3,
    pub y: Vec3,
    /// Boresight.
    pub z: Vec3,
}

impl ArrayFrame {
    /// Satellite frame: boresight toward the Earth's centre, `x` along the
    /// component of the velocity orthogonal to boresight.
    pub fn satellite(position: &Vec3, velocity: &Vec3) -> Result<Self> {
        let r = position.norm();
        if r == 0.0 {
            return Err(Error::Geometry("satellite at Earth's centre".into()));
        }
        let z = -position / r;
        let along = velocity - z * velocity.dot(&z);
        let along_norm = along.norm();
        if along_norm <= 1e-12 * velocity.norm().max(1.0) {
            return Err(Error::Geometry("velocity parallel to nadir".into()));
        }
        let x = along / along_norm;
        let y = z.cross(&x);
        Ok(ArrayFrame { x, y, z })
    }

    /// Ground frame: boresight along the local radial (up), `x` East, `y`
    /// North. At the poles East is taken along the Earth-fixed `y` axis.
    pub fn ground(position: &Vec3) -> Result<Self> {
        let r = position.norm();
        if r == 0.0 {
            return Err(Error::Geometry("ground user at Earth's centre".into()));
        }
        let z = position / r;
        let pole = Vec3::z();
        let east = pole.cross(&z);
        let x = if east.norm() < 1e-12 { Vec3::y() } else { east.normalize() };
        let y = z.cross(&x);
        Ok(ArrayFrame { x, y, z })
    }

    /// Express an Earth-fixed vector in this frame.
    #[inline]
    pub fn to_local(&self, v: &Vec3) -> Vec3 {
        Vec3::new(v.dot(&self.x), v.dot(&self.y), v.dot(&self.z))
    }

    /// Unit direction from `origin` to `target`, in this frame.
    pub fn direction_to(&self, origin: &Vec3, target: &Vec3) -> Result<Vec3> {
        let d = target - origin;
        let n = d.norm();
        if n == 0.0 {
            return Err(Error::Geometry("coincident positions".into()));
        }
        Ok(self.to_local(&(d / n)))
    }
}

/// Unit direction from `origin` to `target` in the frame of an array mounted
/// at `origin`. `velocity` is required for nadir-facing (satellite) arrays.
pub fn array_frame_direction(
    origin: &Vec3,
    target: &Vec3,
    boresight: Boresight,
    velocity: Option<&Vec3>,
) -> Result<Vec3> {
    let frame = match boresight {
        Boresight::Zenith => ArrayFrame::ground(origin)?,
        Boresight::Nadir => {
            let v = velocity.ok_or_else(|| Error::Geometry("satellite frame needs a velocity".into()))?;
            ArrayFrame::satellite(origin, v)?
        }
    };
    frame.direction_to(origin, target)
}

/// Unit vector from spherical angles in the array frame: `theta` from
/// boresight, `phi` from the `x` axis, both in degrees.
pub fn direction_from_angles(theta_deg: f64, phi_deg: f64) -> Vec3 {
    let (st, ct) = theta_deg.to_radians().sin_cos();
    let (sp, cp) = phi_deg.to_radians().sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Gain cut through the `x`-`z` plane with the beam at boresight, as
/// `(angle_deg, gain_dbi)` pairs from -90 to +90 degrees.
pub fn azimuth_cut(spec: &ArraySpec, step_deg: f64) -> Result<Vec<(f64, f64)>> {
    if !(step_deg > 0.0) {
        return Err(Error::validation("step_deg", "must be positive"));
    }
    let steer = Vec3::z();
    let n = (180.0 / step_deg).round() as usize;
    Ok((0..=n)
        .map(|i| {
            let angle = -90.0 + 180.0 * i as f64 / n as f64;
            let eval = direction_from_angles(angle, 0.0);
            (angle, to_db(steered_gain_linear(spec, &steer, &eval)))
        })
        .collect())
}
