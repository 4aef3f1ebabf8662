//! Free-space link budgets: path loss, receiver noise, EIRP-derived transmit
//! power, and the SNR / INR / SINR arithmetic both systems share.
//!
//! Ratios are carried in linear units internally and converted to dB only at
//! the boundaries, so a zero gain (array null, back hemisphere) becomes a
//! linear zero INR rather than a NaN.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::SystemRole;
use crate::error::{Error, Result};
use crate::phased_array::{steered_gain_linear, ArrayFrame, ArraySpec};
use crate::units::{from_db, to_db, SPEED_OF_LIGHT};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RadioConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub eirp_density_primary_dbw_hz: f64,
    pub eirp_density_secondary_dbw_hz: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub power_control_limit_db: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            carrier_hz: 20e9,
            bandwidth_hz: 400e6,
            eirp_density_primary_dbw_hz: -54.3,
            eirp_density_secondary_dbw_hz: -53.3,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 1.2,
            power_control_limit_db: 1.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::validation("radio.carrier_hz", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::validation("radio.bandwidth_hz", "must be positive"));
        }
        if !(self.power_control_limit_db >= 0.0) {
            return Err(Error::validation("radio.power_control_limit_db", "must be non-negative"));
        }
        Ok(())
    }

    pub fn eirp_density_dbw_hz(&self, role: SystemRole) -> f64 {
        match role {
            SystemRole::Primary => self.eirp_density_primary_dbw_hz,
            SystemRole::Secondary => self.eirp_density_secondary_dbw_hz,
        }
    }
}

/// `20 log10(4 pi d f / c)`.
pub fn fspl_db(range_m: f64, carrier_hz: f64) -> Result<f64> {
    if !(range_m > 0.0) {
        return Err(Error::validation("range_m", "must be positive"));
    }
    Ok(fspl_db_unchecked(range_m, carrier_hz))
}

#[inline]
pub(crate) fn fspl_db_unchecked(range_m: f64, carrier_hz: f64) -> f64 {
    20.0 * (4.0 * PI * range_m * carrier_hz / SPEED_OF_LIGHT).log10()
}

/// Thermal noise over the configured band plus the noise figure, dBW.
pub fn noise_power_dbw(cfg: &RadioConfig) -> f64 {
    noise_power_dbw_with(cfg.noise_psd_dbm_hz, cfg.bandwidth_hz, cfg.noise_figure_db)
}

pub fn noise_power_dbw_with(psd_dbm_hz: f64, bandwidth_hz: f64, noise_figure_db: f64) -> f64 {
    psd_dbm_hz - 30.0 + to_db(bandwidth_hz) + noise_figure_db
}

/// Power-control offset for a shell: the extra zenith path loss relative to
/// the constellation's lowest shell, clamped to the configured limit.
pub fn power_control_db(cfg: &RadioConfig, shell_altitude_km: f64, reference_altitude_km: f64) -> f64 {
    let delta = fspl_db_unchecked(shell_altitude_km * 1e3, cfg.carrier_hz)
        - fspl_db_unchecked(reference_altitude_km * 1e3, cfg.carrier_hz);
    delta.clamp(-cfg.power_control_limit_db, cfg.power_control_limit_db)
}

/// Conducted transmit power: EIRP density over the band, minus the peak
/// array gain, plus the shell's power-control offset.
pub fn tx_power_dbw(
    cfg: &RadioConfig,
    role: SystemRole,
    shell_altitude_km: f64,
    reference_altitude_km: f64,
    max_gain_dbi: f64,
) -> f64 {
    cfg.eirp_density_dbw_hz(role) + to_db(cfg.bandwidth_hz) - max_gain_dbi
        + power_control_db(cfg, shell_altitude_km, reference_altitude_km)
}

/// Interference protection threshold on the primary user's INR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ProtectionThreshold {
    /// No constraint; every satellite is admissible.
    #[default]
    Unconstrained,
    Db(f64),
}

impl ProtectionThreshold {
    /// INR threshold implied by a fractional noise-temperature rise.
    pub fn from_delta_t(fraction: f64) -> Result<Self> {
        inr_threshold_from_delta_t(fraction).map(ProtectionThreshold::Db)
    }

    /// Linear threshold; `+inf` when unconstrained.
    pub fn linear(&self) -> f64 {
        match *self {
            ProtectionThreshold::Unconstrained => f64::INFINITY,
            ProtectionThreshold::Db(db) => from_db(db),
        }
    }

    /// Whether a linear INR satisfies the constraint.
    #[inline]
    pub fn admits(&self, inr_linear: f64) -> bool {
        match *self {
            ProtectionThreshold::Unconstrained => true,
            ProtectionThreshold::Db(db) => inr_linear <= from_db(db),
        }
    }

    pub fn db(&self) -> Option<f64> {
        match *self {
            ProtectionThreshold::Unconstrained => None,
            ProtectionThreshold::Db(db) => Some(db),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ProtectionThreshold::Db(_))
    }
}

impl fmt::Display for ProtectionThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtectionThreshold::Unconstrained => f.write_str("unconstrained"),
            // same spelling as the CSV column, e.g. `0.0` and `-12.2`
            ProtectionThreshold::Db(db) => write!(f, "{db:?}"),
        }
    }
}

impl FromStr for ProtectionThreshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "unconstrained" => Ok(ProtectionThreshold::Unconstrained),
            _ => {
                let db: f64 = s.parse().map_err(|_| Error::validation("inr_th_db", format!("not a number: {s:?}")))?;
                if !db.is_finite() {
                    return Err(Error::validation("inr_th_db", "must be finite or \"unconstrained\""));
                }
                Ok(ProtectionThreshold::Db(db))
            }
        }
    }
}

impl Serialize for ProtectionThreshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ProtectionThreshold::Unconstrained => s.serialize_str("unconstrained"),
            ProtectionThreshold::Db(db) => s.serialize_f64(*db),
        }
    }
}

impl<'de> Deserialize<'de> for ProtectionThreshold {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(db) if db.is_finite() => Ok(ProtectionThreshold::Db(db)),
            Raw::Num(_) => Err(serde::de::Error::custom("threshold must be finite")),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `10 log10(fraction)`: the INR at which the receiver noise temperature
/// rises by `fraction`.
pub fn inr_threshold_from_delta_t(fraction: f64) -> Result<f64> {
    if !(fraction > 0.0) {
        return Err(Error::validation("delta_t_fraction", "must be positive"));
    }
    Ok(to_db(fraction))
}

/// `10 log10(snr / (1 + inr))` from dB inputs.
pub fn sinr(snr_db: f64, inr_db: f64) -> f64 {
    to_db(from_db(snr_db) / (1.0 + from_db(inr_db)))
}

/// Fraction of `log2(1 + SNR)` lost when interference drops the link to
/// `log2(1 + SINR)`.
pub fn spectral_efficiency_loss(snr_db: f64, inr_db: f64) -> f64 {
    let snr = from_db(snr_db);
    let sinr = snr / (1.0 + from_db(inr_db));
    // ln_1p keeps precision at very low SNR
    1.0 - sinr.ln_1p() / snr.ln_1p()
}

/// Per-link quantities. Powers in dBW, ratios in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub snr_db: f64,
    pub inr_db: f64,
    pub sinr_db: f64,
    pub received_signal_dbw: f64,
    pub interference_dbw: f64,
    pub noise_dbw: f64,
}

impl LinkMetrics {
    pub fn from_linear(signal_w: f64, interference_w: f64, noise_w: f64) -> Self {
        LinkMetrics {
            snr_db: to_db(signal_w / noise_w),
            inr_db: to_db(interference_w / noise_w),
            sinr_db: to_db(signal_w / (noise_w + interference_w)),
            received_signal_dbw: to_db(signal_w),
            interference_dbw: to_db(interference_w),
            noise_dbw: to_db(noise_w),
        }
    }
}

/// An array at a position, with its frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Terminal {
    pub pos: Vec3,
    pub frame: ArrayFrame,
    pub array: ArraySpec,
}

impl Terminal {
    /// Linear gain toward `eval_target` while the beam is steered at
    /// `steer_target`.
    #[inline]
    pub fn gain_toward(&self, steer_target: &Vec3, eval_target: &Vec3) -> f64 {
        let steer = unit_local(&self.frame, &self.pos, steer_target);
        let eval = unit_local(&self.frame, &self.pos, eval_target);
        steered_gain_linear(&self.array, &steer, &eval)
    }
}

#[inline]
fn unit_local(frame: &ArrayFrame, origin: &Vec3, target: &Vec3) -> Vec3 {
    let d = target - origin;
    frame.to_local(&(d / d.norm()))
}

#[derive(Debug, Clone, Copy)]
pub struct Transmitter<'a> {
    pub terminal: &'a Terminal,
    pub power_dbw: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Receiver<'a> {
    pub terminal: &'a Terminal,
    pub noise_dbw: f64,
}

/// Linear `P_tx G_tx G_rx / (L P_n)` for a transmitter beam steered at
/// `tx_steer` and a receive beam steered at `rx_steer`.
#[inline]
pub fn link_ratio(tx: Transmitter<'_>, tx_steer: &Vec3, rx: Receiver<'_>, rx_steer: &Vec3, carrier_hz: f64) -> f64 {
    let g_tx = tx.terminal.gain_toward(tx_steer, &rx.terminal.pos);
    let g_rx = rx.terminal.gain_toward(rx_steer, &tx.terminal.pos);
    let range = (tx.terminal.pos - rx.terminal.pos).norm();
    from_db(tx.power_dbw - fspl_db_unchecked(range, carrier_hz) - rx.noise_dbw) * g_tx * g_rx
}

/// Matched downlink SNR (linear): the satellite steers at the user and the
/// user steers at the satellite.
pub fn snr(sat: Transmitter<'_>, user: Receiver<'_>, carrier_hz: f64) -> f64 {
    link_ratio(sat, &user.terminal.pos, user, &sat.terminal.pos, carrier_hz)
}

/// INR (linear) at `victim`, whose beam points at `victim_serving_sat`, from
/// `interferer`, whose beam points at `interferer_user`.
pub fn inr(
    victim: Receiver<'_>,
    victim_serving_sat: &Vec3,
    interferer: Transmitter<'_>,
    interferer_user: &Vec3,
    carrier_hz: f64,
) -> f64 {
    link_ratio(interferer, interferer_user, victim, victim_serving_sat, carrier_hz)
}
