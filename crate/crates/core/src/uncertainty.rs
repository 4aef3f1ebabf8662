//! Secondary selection when the primary serving satellite is only known to
//! lie within a cone of half-width `gamma` around a direction `mu`, as seen
//! from the primary user.
//!
//! A secondary satellite is robustly feasible if it respects the protection
//! threshold against every candidate primary satellite in the cone. Among
//! those, max-guaranteed-SINR picks the one whose worst-case SINR over the
//! candidates is largest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link_budget::ProtectionThreshold;
use crate::selection::{angle_between_deg, argmax_by, select_primary, Outage, SceneSnapshot};
use crate::units::to_db;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyModel {
    /// Estimated direction of the primary serving satellite from the primary
    /// user, Earth-fixed, unit norm.
    pub mu_direction: Vec3,
    pub gamma_deg: f64,
}

impl UncertaintyModel {
    pub fn new(mu_direction: Vec3, gamma_deg: f64) -> Result<Self> {
        if !(0.0..=180.0).contains(&gamma_deg) {
            return Err(Error::validation("gamma_deg", "must lie in [0, 180]"));
        }
        let n = mu_direction.norm();
        if (n - 1.0).abs() > 1e-9 {
            return Err(Error::validation("mu_direction", format!("must be unit-norm, got {n}")));
        }
        Ok(UncertaintyModel { mu_direction, gamma_deg })
    }

    /// Cone centred on primary satellite `p` of the scene.
    pub fn centred_on(scene: &SceneSnapshot, p: usize, gamma_deg: f64) -> Result<Self> {
        UncertaintyModel::new(primary_direction(scene, p), gamma_deg)
    }
}

/// Unit direction from the primary user to primary satellite `p`. Computed
/// one way only, so a cone centred on `p` contains `p` at zero angle.
fn primary_direction(scene: &SceneSnapshot, p: usize) -> Vec3 {
    let d = scene.primary[p].pos() - scene.primary_user.pos();
    d / d.norm()
}

/// Which INR the robust constraint bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustConstraint {
    /// `INR(u, p; s) <= th` for every candidate `p`: protect the primary user.
    #[default]
    PrimaryUser,
    /// `INR(v, s; p) <= th` for every candidate `p`: bound the interference
    /// the secondary user receives instead.
    SecondaryUser,
}

impl RobustConstraint {
    #[inline]
    fn admits(self, scene: &SceneSnapshot, p: usize, s: usize, threshold: ProtectionThreshold) -> bool {
        match self {
            RobustConstraint::PrimaryUser => threshold.admits(scene.inr_primary(p, s)),
            RobustConstraint::SecondaryUser => threshold.admits(scene.inr_secondary(s, p)),
        }
    }
}

/// `P' = {p in P : angle(mu, p) <= gamma}`.
pub fn candidate_primary_set(scene: &SceneSnapshot, model: &UncertaintyModel) -> Result<Vec<usize>, Outage> {
    if scene.num_primary() == 0 {
        return Err(Outage::NoPrimaryVisible);
    }
    Ok((0..scene.num_primary())
        .filter(|&p| angle_between_deg(&model.mu_direction, &primary_direction(scene, p)) <= model.gamma_deg)
        .collect())
}

/// Secondary satellites feasible against every candidate in `candidates`.
pub fn robust_feasible_set(
    scene: &SceneSnapshot,
    candidates: &[usize],
    threshold: ProtectionThreshold,
    constraint: RobustConstraint,
) -> Vec<usize> {
    (0..scene.num_secondary())
        .filter(|&s| candidates.iter().all(|&p| constraint.admits(scene, p, s, threshold)))
        .collect()
}

/// `N_s'`.
pub fn robust_feasible_count(
    scene: &SceneSnapshot,
    candidates: &[usize],
    threshold: ProtectionThreshold,
    constraint: RobustConstraint,
) -> usize {
    robust_feasible_set(scene, candidates, threshold, constraint).len()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustOutcome {
    /// Chosen secondary satellite (index into the scene), or why none was.
    pub choice: Result<RobustChoice, Outage>,
    pub candidate_set_size: usize,
    /// `N_s'`.
    pub robust_feasible_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustChoice {
    /// `s'`, index into `scene.secondary`.
    pub secondary: usize,
    /// `p'`, the worst-case candidate for `s'`, index into `scene.primary`.
    pub worst_primary: usize,
    /// `SINR(v, s'; p')`, linear.
    pub guaranteed_sinr: f64,
}

impl RobustChoice {
    pub fn guaranteed_sinr_db(&self) -> f64 {
        to_db(self.guaranteed_sinr)
    }
}

/// Worst candidate for `s`: lowest `SINR(v, s; p)`, ties to the lowest id.
fn worst_candidate(scene: &SceneSnapshot, s: usize, candidates: &[usize]) -> Option<(usize, f64)> {
    let p = argmax_by(candidates.iter().copied(), |p| -scene.sinr_secondary(s, p), |p| scene.primary_id(p))?;
    Some((p, scene.sinr_secondary(s, p)))
}

/// `s' = argmax_s min_{p in P'} SINR(v, s; p)` over robustly feasible `s`.
pub fn max_guaranteed_sinr(
    scene: &SceneSnapshot,
    candidates: &[usize],
    threshold: ProtectionThreshold,
    constraint: RobustConstraint,
) -> RobustOutcome {
    let feasible = robust_feasible_set(scene, candidates, threshold, constraint);
    let mut outcome = RobustOutcome {
        choice: Err(Outage::NoneFeasible),
        candidate_set_size: candidates.len(),
        robust_feasible_count: feasible.len(),
    };
    if scene.num_secondary() == 0 {
        outcome.choice = Err(Outage::NoSecondaryVisible);
        return outcome;
    }
    if candidates.is_empty() {
        outcome.choice = Err(Outage::NoPrimaryVisible);
        return outcome;
    }
    let worst: Vec<(usize, f64)> =
        feasible.iter().map(|&s| worst_candidate(scene, s, candidates).expect("candidates non-empty")).collect();
    let best = argmax_by(0..feasible.len(), |i| worst[i].1, |i| scene.secondary_id(feasible[i]));
    if let Some(i) = best {
        outcome.choice =
            Ok(RobustChoice { secondary: feasible[i], worst_primary: worst[i].0, guaranteed_sinr: worst[i].1 });
    }
    outcome
}

/// Cone around the primary's own max-SNR choice, then the robust selection.
pub fn evaluate_centred(
    scene: &SceneSnapshot,
    gamma_deg: f64,
    threshold: ProtectionThreshold,
    constraint: RobustConstraint,
) -> Result<(usize, RobustOutcome), Outage> {
    let p_star = select_primary(scene)?;
    let model = UncertaintyModel::centred_on(scene, p_star, gamma_deg).map_err(|_| Outage::NoPrimaryVisible)?;
    let candidates = candidate_primary_set(scene, &model)?;
    debug_assert!(candidates.contains(&p_star));
    Ok((p_star, max_guaranteed_sinr(scene, &candidates, threshold, constraint)))
}
