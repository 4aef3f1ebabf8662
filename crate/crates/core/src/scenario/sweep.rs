use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{City, ScenarioConfig};
use crate::constellation::{build_constellation, elevation_angle, geodetic_to_ecef, SatelliteState, EARTH_RADIUS_M};
use crate::error::Result;
use crate::link_budget::{noise_power_dbw, tx_power_dbw, ProtectionThreshold};
use crate::phased_array::{max_gain, ArrayFrame, ArraySpec};
use crate::selection::{
    absolute_inr_bounds, conditional_inr_bounds, evaluate, max_snr_benchmark, select_primary, Outage, SatView,
    SceneSnapshot, SelectionOutcome, Strategy, UserTerminal,
};
use crate::uncertainty::evaluate_centred;
use crate::units::{to_db, to_db_clamped};
use crate::Vec3;

/// One CSV row of the selection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub t_s: f64,
    pub strategy: Strategy,
    pub inr_th_db: ProtectionThreshold,
    pub p_star: Option<u32>,
    pub s_choice: Option<u32>,
    pub snr_p_db: Option<f64>,
    pub sinr_p_db: Option<f64>,
    pub snr_s_db: Option<f64>,
    pub sinr_s_db: Option<f64>,
    pub inr_p_db: Option<f64>,
    pub n_feasible: usize,
    pub n_useful: usize,
    pub sep_deg: Option<f64>,
    pub elev_s_deg: Option<f64>,
    pub outage: Option<Outage>,
}

fn clamp_db(v: Option<f64>) -> Option<f64> {
    v.map(|x| x.max(crate::units::DB_FLOOR))
}

impl SelectionRow {
    pub fn from_outcome(t_s: f64, o: &SelectionOutcome) -> Self {
        SelectionRow {
            t_s,
            strategy: o.strategy,
            inr_th_db: o.threshold,
            p_star: o.primary_choice,
            s_choice: o.secondary_choice,
            snr_p_db: clamp_db(o.snr_primary_db),
            sinr_p_db: clamp_db(o.sinr_primary_db),
            snr_s_db: clamp_db(o.snr_secondary_db),
            sinr_s_db: clamp_db(o.sinr_secondary_db),
            inr_p_db: clamp_db(o.inr_primary_db),
            n_feasible: o.feasible_count,
            n_useful: o.useful_count,
            sep_deg: o.separation_deg,
            elev_s_deg: o.secondary_elevation_deg,
            outage: o.outage,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustStrategy {
    MaxGuaranteedSinr,
}

/// One CSV row of the uncertainty table. The selection columns describe the
/// robust choice `s'` judged against the true `p*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustRow {
    pub t_s: f64,
    pub strategy: RobustStrategy,
    pub inr_th_db: ProtectionThreshold,
    pub p_star: Option<u32>,
    pub s_choice: Option<u32>,
    pub snr_p_db: Option<f64>,
    pub sinr_p_db: Option<f64>,
    pub snr_s_db: Option<f64>,
    pub sinr_s_db: Option<f64>,
    pub inr_p_db: Option<f64>,
    pub n_feasible: usize,
    pub n_useful: usize,
    pub sep_deg: Option<f64>,
    pub elev_s_deg: Option<f64>,
    pub outage: Option<Outage>,
    pub gamma_deg: f64,
    pub n_feasible_robust: usize,
    pub guaranteed_sinr_db: Option<f64>,
    /// Guaranteed SINR minus the best unconstrained secondary SNR.
    pub guaranteed_sinr_norm_db: Option<f64>,
}

/// Per-step visibility and interference bounds (one row per step).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub t_s: f64,
    pub n_primary: usize,
    pub n_secondary: usize,
    pub p_star: Option<u32>,
    /// Best unconstrained secondary SNR, `SNR(v, s_inf_dagger)`.
    pub snr_s_max_db: Option<f64>,
    pub inr_max_db: Option<f64>,
    pub inr_min_db: Option<f64>,
    pub inr_max_cond_db: Option<f64>,
    pub inr_min_cond_db: Option<f64>,
}

/// All rows for one city and one ground-array size.
/// Everything one scene contributes to the output tables.
pub type SceneRows = (StepStats, Vec<SelectionRow>, Vec<RobustRow>);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ArrayResults {
    pub array_label: String,
    pub steps: Vec<StepStats>,
    pub selection: Vec<SelectionRow>,
    pub robust: Vec<RobustRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityResults {
    pub city: City,
    pub arrays: Vec<ArrayResults>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResults {
    pub config: ScenarioConfig,
    pub cities: Vec<CityResults>,
}

impl ScenarioResults {
    pub fn city(&self, name: &str) -> Option<&CityResults> {
        self.cities.iter().find(|c| c.city.name == name)
    }
}

impl CityResults {
    pub fn array(&self, label: &str) -> Option<&ArrayResults> {
        self.arrays.iter().find(|a| a.array_label == label)
    }
}

/// Primary and secondary user positions for one city.
#[derive(Debug, Clone, Copy)]
pub struct UserSite {
    pub u: Vec3,
    pub v: Vec3,
}

impl UserSite {
    pub fn new(city: &City, separation_m: f64) -> Result<Self> {
        let u = geodetic_to_ecef(city.lat_deg, city.lon_deg, 0.0);
        if separation_m == 0.0 {
            return Ok(UserSite { u, v: u });
        }
        let east = ArrayFrame::ground(&u)?.x;
        let v = (u + east * separation_m).normalize() * EARTH_RADIUS_M;
        Ok(UserSite { u, v })
    }
}

/// Earth-fixed position and velocity of every satellite at one instant.
pub struct Epoch {
    pub t_s: f64,
    pub primary: Vec<(Vec3, Vec3)>,
    pub secondary: Vec<(Vec3, Vec3)>,
}

/// Prepared sweep: satellites built, powers and user sites resolved.
pub struct Sweep {
    config: ScenarioConfig,
    primary: Vec<SatelliteState>,
    secondary: Vec<SatelliteState>,
    primary_tx_dbw: Vec<f64>,
    secondary_tx_dbw: Vec<f64>,
    sat_array: ArraySpec,
    noise_dbw: f64,
    sites: Vec<UserSite>,
}

fn shell_powers(
    cfg: &ScenarioConfig,
    sats: &[SatelliteState],
    spec: &crate::ConstellationSpec,
    gain_dbi: f64,
) -> Vec<f64> {
    let reference = spec.lowest_altitude_km().unwrap_or(0.0);
    sats.iter().map(|s| tx_power_dbw(&cfg.radio, spec.role, s.shell.altitude_km, reference, gain_dbi)).collect()
}

impl Sweep {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let primary = build_constellation(&config.primary, config.seed_phasing)?;
        let secondary = build_constellation(&config.secondary, config.seed_phasing)?;
        let sat_array = ArraySpec::satellite(config.satellite_array);
        let g = max_gain(&sat_array);
        let sites =
            config.cities.iter().map(|c| UserSite::new(c, config.user_separation_m)).collect::<Result<Vec<_>>>()?;
        Ok(Sweep {
            primary_tx_dbw: shell_powers(config, &primary, &config.primary, g),
            secondary_tx_dbw: shell_powers(config, &secondary, &config.secondary, g),
            primary,
            secondary,
            sat_array,
            noise_dbw: noise_power_dbw(&config.radio),
            sites,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn sites(&self) -> &[UserSite] {
        &self.sites
    }

    pub fn primary_satellites(&self) -> &[SatelliteState] {
        &self.primary
    }

    pub fn secondary_satellites(&self) -> &[SatelliteState] {
        &self.secondary
    }

    pub fn epoch(&self, t_s: f64) -> Epoch {
        let ts = t_s + self.config.secondary_time_offset_s;
        Epoch {
            t_s,
            primary: self.primary.iter().map(|s| s.state_ecef(t_s)).collect(),
            secondary: self.secondary.iter().map(|s| s.state_ecef(ts)).collect(),
        }
    }

    fn views(
        &self,
        states: &[(Vec3, Vec3)],
        sats: &[SatelliteState],
        powers: &[f64],
        user: &Vec3,
    ) -> Result<Vec<SatView>> {
        let mut out = Vec::new();
        for (i, (pos, vel)) in states.iter().enumerate() {
            let el = elevation_angle(user, pos)?;
            if el >= self.config.eps_min_deg {
                out.push(SatView::new(sats[i].id, *pos, *vel, self.sat_array, powers[i], user)?);
            }
        }
        Ok(out)
    }

    /// Overhead satellites of both systems for city `city` at `epoch`.
    pub fn overhead(&self, city: usize, epoch: &Epoch) -> Result<(Vec<SatView>, Vec<SatView>)> {
        let site = &self.sites[city];
        Ok((
            self.views(&epoch.primary, &self.primary, &self.primary_tx_dbw, &site.u)?,
            self.views(&epoch.secondary, &self.secondary, &self.secondary_tx_dbw, &site.v)?,
        ))
    }

    fn scene_from(
        &self,
        city: usize,
        t_s: f64,
        array: ArraySpec,
        primary: Vec<SatView>,
        secondary: Vec<SatView>,
    ) -> Result<SceneSnapshot> {
        let site = &self.sites[city];
        Ok(SceneSnapshot::new(
            t_s,
            UserTerminal::new(site.u, array, self.noise_dbw)?,
            UserTerminal::new(site.v, array, self.noise_dbw)?,
            primary,
            secondary,
            self.config.radio.carrier_hz,
        ))
    }

    /// The full scene for one city, instant and ground array.
    pub fn scene(&self, city: usize, t_s: f64, array: ArraySpec) -> Result<SceneSnapshot> {
        let epoch = self.epoch(t_s);
        let (p, s) = self.overhead(city, &epoch)?;
        self.scene_from(city, t_s, array, p, s)
    }

    /// Every configured evaluation of one scene.
    pub fn evaluate_scene(&self, scene: &SceneSnapshot) -> SceneRows {
        let cfg = &self.config;
        let t = scene.t_s;
        let p_star = select_primary(scene).ok();
        let abs = absolute_inr_bounds(scene).ok();
        let cond = p_star.and_then(|p| conditional_inr_bounds(scene, p).ok());
        let bench = max_snr_benchmark(scene);
        let stats = StepStats {
            t_s: t,
            n_primary: scene.num_primary(),
            n_secondary: scene.num_secondary(),
            p_star: p_star.map(|p| scene.primary_id(p)),
            snr_s_max_db: bench.map(|s| to_db_clamped(scene.snr_secondary(s))),
            inr_max_db: abs.map(|b| to_db_clamped(b.max)),
            inr_min_db: abs.map(|b| to_db_clamped(b.min)),
            inr_max_cond_db: cond.map(|b| to_db_clamped(b.max)),
            inr_min_cond_db: cond.map(|b| to_db_clamped(b.min)),
        };

        let mut selection = Vec::with_capacity(cfg.strategies.len() * cfg.thresholds_db.len());
        for &strategy in &cfg.strategies {
            for &th in &cfg.thresholds_db {
                let o = evaluate(scene, strategy, th, cfg.useful_delta_db);
                selection.push(SelectionRow::from_outcome(t, &o));
            }
        }

        let mut robust = Vec::with_capacity(cfg.gammas_deg.len() * cfg.thresholds_db.len());
        for &th in &cfg.thresholds_db {
            let known = evaluate(scene, Strategy::ProtectiveMaxSinr, th, cfg.useful_delta_db);
            for &gamma in &cfg.gammas_deg {
                robust.push(self.robust_row(scene, &known, th, gamma, bench));
            }
        }
        (stats, selection, robust)
    }

    fn robust_row(
        &self,
        scene: &SceneSnapshot,
        known: &SelectionOutcome,
        th: ProtectionThreshold,
        gamma: f64,
        bench: Option<usize>,
    ) -> RobustRow {
        let mut row = RobustRow {
            t_s: scene.t_s,
            strategy: RobustStrategy::MaxGuaranteedSinr,
            inr_th_db: th,
            p_star: known.primary_choice,
            s_choice: None,
            snr_p_db: clamp_db(known.snr_primary_db),
            sinr_p_db: None,
            snr_s_db: None,
            sinr_s_db: None,
            inr_p_db: None,
            n_feasible: known.feasible_count,
            n_useful: known.useful_count,
            sep_deg: None,
            elev_s_deg: None,
            outage: None,
            gamma_deg: gamma,
            n_feasible_robust: 0,
            guaranteed_sinr_db: None,
            guaranteed_sinr_norm_db: None,
        };
        let (p, out) = match evaluate_centred(scene, gamma, th, self.config.robust_constraint) {
            Ok(r) => r,
            Err(o) => {
                row.outage = Some(o);
                return row;
            }
        };
        row.n_feasible_robust = out.robust_feasible_count;
        match out.choice {
            Err(o) => row.outage = Some(o),
            Ok(c) => {
                let s = c.secondary;
                let u = scene.primary_user.pos();
                row.s_choice = Some(scene.secondary_id(s));
                row.sinr_p_db = Some(to_db_clamped(scene.sinr_primary(p, s)));
                row.snr_s_db = Some(to_db_clamped(scene.snr_secondary(s)));
                row.sinr_s_db = Some(to_db_clamped(scene.sinr_secondary(s, p)));
                row.inr_p_db = Some(to_db_clamped(scene.inr_primary(p, s)));
                row.sep_deg = Some(crate::selection::angle_between_deg(
                    &(scene.primary[p].pos() - u),
                    &(scene.secondary[s].pos() - u),
                ));
                row.elev_s_deg = Some(scene.secondary[s].elevation_deg);
                let g = c.guaranteed_sinr_db();
                row.guaranteed_sinr_db = Some(g.max(crate::units::DB_FLOOR));
                row.guaranteed_sinr_norm_db =
                    bench.map(|b| (g - to_db(scene.snr_secondary(b))).max(crate::units::DB_FLOOR));
            }
        }
        row
    }

    /// Evaluate every city and ground array at one instant.
    pub fn step(&self, t_s: f64) -> Result<Vec<Vec<SceneRows>>> {
        let epoch = self.epoch(t_s);
        let arrays = self.config.user_array_specs();
        let mut per_city = Vec::with_capacity(self.sites.len());
        for city in 0..self.sites.len() {
            let (p, s) = self.overhead(city, &epoch)?;
            let mut per_array = Vec::with_capacity(arrays.len());
            for &array in &arrays {
                let scene = self.scene_from(city, t_s, array, p.clone(), s.clone())?;
                per_array.push(self.evaluate_scene(&scene));
            }
            per_city.push(per_array);
        }
        Ok(per_city)
    }

    /// Run every step in parallel on the current rayon pool and merge in
    /// time order.
    pub fn run(&self) -> Result<ScenarioResults> {
        let steps = self.config.timesteps();
        let evaluated: Vec<_> = steps.par_iter().map(|&t| self.step(t)).collect::<Result<_>>()?;
        let arrays = self.config.user_array_specs();
        let mut cities: Vec<CityResults> = self
            .config
            .cities
            .iter()
            .map(|c| CityResults {
                city: c.clone(),
                arrays: arrays.iter().map(|a| ArrayResults { array_label: a.label(), ..Default::default() }).collect(),
            })
            .collect();
        for step in evaluated {
            for (ci, per_array) in step.into_iter().enumerate() {
                for (ai, (stats, sel, rob)) in per_array.into_iter().enumerate() {
                    let slot = &mut cities[ci].arrays[ai];
                    slot.steps.push(stats);
                    slot.selection.extend(sel);
                    slot.robust.extend(rob);
                }
            }
        }
        Ok(ScenarioResults { config: self.config.clone(), cities })
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResults> {
    Sweep::new(config)?.run()
}
