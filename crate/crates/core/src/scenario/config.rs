use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constellation::{ConstellationSpec, SystemRole};
use crate::error::{Error, Result};
use crate::link_budget::{ProtectionThreshold, RadioConfig};
use crate::phased_array::ArraySpec;
use crate::selection::Strategy;
use crate::uncertainty::RobustConstraint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct City {
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
}

impl City {
    pub fn new(name: &str, lat_deg: f64, lon_deg: f64) -> Self {
        City { name: name.into(), lat_deg, lon_deg }
    }

    /// Lower-case name with spaces replaced, for file and directory names.
    pub fn slug(&self) -> String {
        self.name.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect()
    }
}

pub fn default_cities() -> Vec<City> {
    vec![
        City::new("Vancouver", 49.2827, -123.1207),
        City::new("Madrid", 40.4168, -3.7038),
        City::new("Seoul", 37.5519, 126.9918),
        City::new("Cape Town", -33.9249, 18.4241),
        City::new("Austin", 30.267153, -97.743057),
        City::new("Rio de Janeiro", -22.9068, -43.1729),
        City::new("Bangalore", 12.9716, 77.5946),
    ]
}

/// Everything a sweep needs. Every field has a default, so an empty TOML
/// document is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub primary: ConstellationSpec,
    pub secondary: ConstellationSpec,
    pub radio: RadioConfig,
    pub cities: Vec<City>,
    pub eps_min_deg: f64,
    /// Sweep start relative to the constellation epoch.
    pub start_s: f64,
    pub duration_s: f64,
    pub step_s: f64,
    pub thresholds_db: Vec<ProtectionThreshold>,
    /// Square ground-array sizes, one sweep each.
    pub user_arrays: Vec<u32>,
    /// Square satellite-array size, both systems.
    pub satellite_array: u32,
    pub gammas_deg: Vec<f64>,
    pub strategies: Vec<Strategy>,
    /// East offset of the secondary user from the primary user.
    pub user_separation_m: f64,
    pub seed_phasing: u32,
    /// Added to the secondary constellation's clock, shifting its phase
    /// against the primary.
    pub secondary_time_offset_s: f64,
    /// Margin for the useful-satellite count in the selection rows.
    pub useful_delta_db: f64,
    pub robust_constraint: RobustConstraint,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            primary: ConstellationSpec::starlink(),
            secondary: ConstellationSpec::kuiper(),
            radio: RadioConfig::default(),
            cities: default_cities(),
            eps_min_deg: 35.0,
            start_s: 0.0,
            duration_s: 86_400.0,
            step_s: 30.0,
            thresholds_db: [-15.0, -12.2, -6.0, 0.0].map(ProtectionThreshold::Db).to_vec(),
            user_arrays: vec![8, 16, 32],
            satellite_array: 64,
            gammas_deg: vec![0.0, 10.0, 20.0, 25.0, 30.0, 40.0, 50.0],
            strategies: Strategy::ALL.to_vec(),
            user_separation_m: 0.0,
            seed_phasing: 1,
            secondary_time_offset_s: 0.0,
            useful_delta_db: 3.0,
            robust_constraint: RobustConstraint::PrimaryUser,
        }
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        for (slot, spec, role) in
            [("primary", &self.primary, SystemRole::Primary), ("secondary", &self.secondary, SystemRole::Secondary)]
        {
            if spec.role != role {
                return Err(Error::validation(format!("{slot}.role"), format!("must be {role:?}").to_lowercase()));
            }
            spec.validate()?;
        }
        self.radio.validate()?;
        if self.cities.is_empty() {
            return Err(Error::validation("cities", "at least one city required"));
        }
        for (i, c) in self.cities.iter().enumerate() {
            if !(-90.0..=90.0).contains(&c.lat_deg) {
                return Err(Error::validation(format!("cities[{i}].lat_deg"), "must lie in [-90, 90]"));
            }
            if !(-180.0..=180.0).contains(&c.lon_deg) {
                return Err(Error::validation(format!("cities[{i}].lon_deg"), "must lie in [-180, 180]"));
            }
        }
        if !(0.0..90.0).contains(&self.eps_min_deg) {
            return Err(Error::validation("eps_min_deg", "must lie in [0, 90)"));
        }
        if !(self.step_s > 0.0) || !self.step_s.is_finite() {
            return Err(Error::validation("step_s", "must be positive"));
        }
        if !(self.duration_s >= self.step_s) || !self.duration_s.is_finite() {
            return Err(Error::validation("duration_s", "must be at least step_s"));
        }
        if !self.start_s.is_finite() {
            return Err(Error::validation("start_s", "must be finite"));
        }
        if !self.secondary_time_offset_s.is_finite() {
            return Err(Error::validation("secondary_time_offset_s", "must be finite"));
        }
        if self.user_arrays.is_empty() {
            return Err(Error::validation("user_arrays", "at least one array size required"));
        }
        if self.user_arrays.contains(&0) {
            return Err(Error::validation("user_arrays", "sizes must be positive"));
        }
        if self.satellite_array == 0 {
            return Err(Error::validation("satellite_array", "must be positive"));
        }
        if let Some(g) = self.gammas_deg.iter().find(|g| !(0.0..=180.0).contains(*g)) {
            return Err(Error::validation("gammas_deg", format!("{g} outside [0, 180]")));
        }
        if self.strategies.is_empty() {
            return Err(Error::validation("strategies", "at least one strategy required"));
        }
        if !(self.user_separation_m >= 0.0) || !self.user_separation_m.is_finite() {
            return Err(Error::validation("user_separation_m", "must be non-negative"));
        }
        if self.seed_phasing == 0 {
            return Err(Error::validation("seed_phasing", "must be at least 1"));
        }
        if !(self.useful_delta_db >= 0.0) {
            return Err(Error::validation("useful_delta_db", "must be non-negative"));
        }
        Ok(())
    }

    /// Sweep instants: `start_s + k * step_s` for every whole step that fits
    /// in `duration_s`.
    pub fn timesteps(&self) -> Vec<f64> {
        let n = (self.duration_s / self.step_s + 1e-9).floor() as usize;
        (0..n).map(|k| self.start_s + k as f64 * self.step_s).collect()
    }

    pub fn user_array_specs(&self) -> Vec<ArraySpec> {
        self.user_arrays.iter().map(|&n| ArraySpec::ground(n)).collect()
    }

    /// Keep only the named city (case-insensitive, name or slug).
    pub fn restrict_to_city(&mut self, name: &str) -> Result<()> {
        let want = name.to_lowercase();
        self.cities.retain(|c| c.name.to_lowercase() == want || c.slug() == want);
        if self.cities.is_empty() {
            return Err(Error::validation("city", format!("no configured city named {name:?}")));
        }
        Ok(())
    }
}
