//! Satellite selection with a known primary serving satellite.
//!
//! The primary system picks `p*`, the overhead satellite with the highest SNR
//! at its user, and ignores the secondary system entirely. The secondary
//! system then picks a satellite for its own user `v`, either greedily (max
//! SNR or max SINR) or protectively, restricted to satellites whose
//! interference at the primary user stays under the INR threshold.
//!
//! Every argmax breaks ties toward the lowest satellite id. A protective
//! strategy with nothing feasible reports [`Outage::NoneFeasible`] rather than
//! falling back to a greedy choice.

mod scene;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use scene::{SatView, SceneSnapshot, UserTerminal};

use crate::error::{Error, Result};
use crate::link_budget::ProtectionThreshold;
use crate::units::{from_db, to_db};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    GreedyMaxSnr,
    GreedyMaxSinr,
    ProtectiveMaxSnr,
    ProtectiveMaxSinr,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::GreedyMaxSnr, Strategy::GreedyMaxSinr, Strategy::ProtectiveMaxSnr, Strategy::ProtectiveMaxSinr];

    pub fn is_protective(self) -> bool {
        matches!(self, Strategy::ProtectiveMaxSnr | Strategy::ProtectiveMaxSinr)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::GreedyMaxSnr => "greedy_max_snr",
            Strategy::GreedyMaxSinr => "greedy_max_sinr",
            Strategy::ProtectiveMaxSnr => "protective_max_snr",
            Strategy::ProtectiveMaxSinr => "protective_max_sinr",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::validation("strategy", format!("unknown strategy {s:?}")))
    }
}

/// Why a step produced no selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outage {
    NoPrimaryVisible,
    NoSecondaryVisible,
    NoneFeasible,
}

impl Outage {
    pub fn as_str(self) -> &'static str {
        match self {
            Outage::NoPrimaryVisible => "no_primary_visible",
            Outage::NoSecondaryVisible => "no_secondary_visible",
            Outage::NoneFeasible => "none_feasible",
        }
    }
}

impl fmt::Display for Outage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Upper and lower INR bounds, linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InrBounds {
    pub max: f64,
    pub min: f64,
}

impl InrBounds {
    pub fn max_db(&self) -> f64 {
        to_db(self.max)
    }

    pub fn min_db(&self) -> f64 {
        to_db(self.min)
    }
}

/// Index maximizing `value`; ties go to the lowest id.
pub(crate) fn argmax_by<I, V, K>(candidates: I, value: V, id: K) -> Option<usize>
where
    I: IntoIterator<Item = usize>,
    V: Fn(usize) -> f64,
    K: Fn(usize) -> u32,
{
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let v = value(i);
        best = match best {
            None => Some((i, v)),
            Some((b, bv)) if v > bv || (v == bv && id(i) < id(b)) => Some((i, v)),
            keep => keep,
        };
    }
    best.map(|(i, _)| i)
}

/// `p* = argmax_p SNR(u, p)`.
pub fn select_primary(scene: &SceneSnapshot) -> Result<usize, Outage> {
    argmax_by(0..scene.num_primary(), |p| scene.snr_primary(p), |p| scene.primary_id(p)).ok_or(Outage::NoPrimaryVisible)
}

fn require_both(scene: &SceneSnapshot) -> Result<(), Outage> {
    if scene.num_primary() == 0 {
        return Err(Outage::NoPrimaryVisible);
    }
    if scene.num_secondary() == 0 {
        return Err(Outage::NoSecondaryVisible);
    }
    Ok(())
}

/// Max and min of `INR(u, p; s)` over every pair in `P x S`.
pub fn absolute_inr_bounds(scene: &SceneSnapshot) -> Result<InrBounds, Outage> {
    require_both(scene)?;
    let mut bounds = InrBounds { max: f64::NEG_INFINITY, min: f64::INFINITY };
    for p in 0..scene.num_primary() {
        for s in 0..scene.num_secondary() {
            let v = scene.inr_primary(p, s);
            bounds.max = bounds.max.max(v);
            bounds.min = bounds.min.min(v);
        }
    }
    Ok(bounds)
}

/// Max and min of `INR(u, p*; s)` over `S`.
pub fn conditional_inr_bounds(scene: &SceneSnapshot, p_star: usize) -> Result<InrBounds, Outage> {
    require_both(scene)?;
    let (max, min) = (0..scene.num_secondary())
        .map(|s| scene.inr_primary(p_star, s))
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(hi, lo), v| (hi.max(v), lo.min(v)));
    Ok(InrBounds { max, min })
}

/// Secondary satellites whose interference at the primary user respects the
/// threshold. Its length is the feasible count `N_s`.
pub fn feasible_set(scene: &SceneSnapshot, p_star: usize, threshold: ProtectionThreshold) -> Vec<usize> {
    (0..scene.num_secondary()).filter(|&s| threshold.admits(scene.inr_primary(p_star, s))).collect()
}

/// Secondary choice under `strategy`. Greedy strategies ignore `threshold`.
pub fn select_secondary(
    scene: &SceneSnapshot,
    p_star: usize,
    strategy: Strategy,
    threshold: ProtectionThreshold,
) -> Result<usize, Outage> {
    if scene.num_secondary() == 0 {
        return Err(Outage::NoSecondaryVisible);
    }
    let id = |s: usize| scene.secondary_id(s);
    let snr = |s: usize| scene.snr_secondary(s);
    let sinr = |s: usize| scene.sinr_secondary(s, p_star);
    let all = 0..scene.num_secondary();
    let choice = match strategy {
        Strategy::GreedyMaxSnr => argmax_by(all, snr, id),
        Strategy::GreedyMaxSinr => argmax_by(all, sinr, id),
        Strategy::ProtectiveMaxSnr => argmax_by(feasible_set(scene, p_star, threshold), snr, id),
        Strategy::ProtectiveMaxSinr => argmax_by(feasible_set(scene, p_star, threshold), sinr, id),
    };
    choice.ok_or(Outage::NoneFeasible)
}

/// Greedy max-SNR benchmark `s_inf_dagger`, the secondary upper bound.
pub fn max_snr_benchmark(scene: &SceneSnapshot) -> Option<usize> {
    argmax_by(0..scene.num_secondary(), |s| scene.snr_secondary(s), |s| scene.secondary_id(s))
}

/// Feasible satellites whose `SINR(v, s; p*)` is within `delta_db` of the
/// best unconstrained SNR at `v`. `delta_db = inf` counts every feasible
/// satellite.
pub fn useful_count(scene: &SceneSnapshot, p_star: usize, threshold: ProtectionThreshold, delta_db: f64) -> usize {
    let Some(best) = max_snr_benchmark(scene) else {
        return 0;
    };
    let floor = scene.snr_secondary(best) / from_db(delta_db);
    feasible_set(scene, p_star, threshold).into_iter().filter(|&s| scene.sinr_secondary(s, p_star) >= floor).count()
}

/// Angle between two satellites as seen from `user_pos`, degrees in [0, 180].
pub fn angular_separation(user_pos: &Vec3, sat_a: &Vec3, sat_b: &Vec3) -> Result<f64> {
    let a = sat_a - user_pos;
    let b = sat_b - user_pos;
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::Geometry("satellite coincides with user".into()));
    }
    Ok(angle_between_deg(&a, &b))
}

/// Angle between two non-zero vectors, degrees. Exactly zero for parallel
/// inputs.
pub(crate) fn angle_between_deg(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b)).to_degrees()
}

/// One strategy's result at one step, with the derived metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub strategy: Strategy,
    pub threshold: ProtectionThreshold,
    pub primary_choice: Option<u32>,
    pub secondary_choice: Option<u32>,
    pub outage: Option<Outage>,
    pub snr_primary_db: Option<f64>,
    pub sinr_primary_db: Option<f64>,
    pub snr_secondary_db: Option<f64>,
    pub sinr_secondary_db: Option<f64>,
    /// `INR(u, p*; s)` for the chosen `s`.
    pub inr_primary_db: Option<f64>,
    pub feasible_count: usize,
    pub useful_count: usize,
    /// Separation between `p*` and the chosen `s`, seen from the primary user.
    pub separation_deg: Option<f64>,
    /// Elevation of the chosen `s` at the secondary user.
    pub secondary_elevation_deg: Option<f64>,
}

impl SelectionOutcome {
    fn empty(strategy: Strategy, threshold: ProtectionThreshold, outage: Outage) -> Self {
        SelectionOutcome {
            strategy,
            threshold,
            primary_choice: None,
            secondary_choice: None,
            outage: Some(outage),
            snr_primary_db: None,
            sinr_primary_db: None,
            snr_secondary_db: None,
            sinr_secondary_db: None,
            inr_primary_db: None,
            feasible_count: 0,
            useful_count: 0,
            separation_deg: None,
            secondary_elevation_deg: None,
        }
    }
}

/// Run primary selection and then `strategy`, filling every reported metric.
pub fn evaluate(
    scene: &SceneSnapshot,
    strategy: Strategy,
    threshold: ProtectionThreshold,
    useful_delta_db: f64,
) -> SelectionOutcome {
    let p_star = match select_primary(scene) {
        Ok(p) => p,
        Err(o) => return SelectionOutcome::empty(strategy, threshold, o),
    };
    let mut out = SelectionOutcome::empty(strategy, threshold, Outage::NoSecondaryVisible);
    out.primary_choice = Some(scene.primary_id(p_star));
    out.snr_primary_db = Some(to_db(scene.snr_primary(p_star)));
    out.feasible_count = feasible_set(scene, p_star, threshold).len();
    out.useful_count = useful_count(scene, p_star, threshold, useful_delta_db);
    match select_secondary(scene, p_star, strategy, threshold) {
        Err(o) => out.outage = Some(o),
        Ok(s) => {
            out.outage = None;
            out.secondary_choice = Some(scene.secondary_id(s));
            out.sinr_primary_db = Some(to_db(scene.sinr_primary(p_star, s)));
            out.snr_secondary_db = Some(to_db(scene.snr_secondary(s)));
            out.sinr_secondary_db = Some(to_db(scene.sinr_secondary(s, p_star)));
            out.inr_primary_db = Some(to_db(scene.inr_primary(p_star, s)));
            out.separation_deg = Some(angle_between_deg(
                &(scene.primary[p_star].pos() - scene.primary_user.pos()),
                &(scene.secondary[s].pos() - scene.primary_user.pos()),
            ));
            out.secondary_elevation_deg = Some(scene.secondary[s].elevation_deg);
        }
    }
    out
}

#[cfg(test)]
mod tests;
