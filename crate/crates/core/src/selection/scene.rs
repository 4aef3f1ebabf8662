use crate::constellation::{elevation_angle, SatelliteState};
use crate::error::Result;
use crate::link_budget::{link_ratio, Receiver, Terminal, Transmitter};
use crate::phased_array::{ArrayFrame, ArraySpec};
use crate::units::to_db;
use crate::Vec3;

/// A satellite above its user's elevation mask at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatView {
    pub id: u32,
    pub terminal: Terminal,
    pub tx_power_dbw: f64,
    /// Elevation seen from the user of the satellite's own system.
    pub elevation_deg: f64,
}

impl SatView {
    pub fn new(id: u32, pos: Vec3, vel: Vec3, array: ArraySpec, tx_power_dbw: f64, own_user: &Vec3) -> Result<Self> {
        Ok(SatView {
            id,
            terminal: Terminal { pos, frame: ArrayFrame::satellite(&pos, &vel)?, array },
            tx_power_dbw,
            elevation_deg: elevation_angle(own_user, &pos)?,
        })
    }

    pub fn from_state(
        sat: &SatelliteState,
        t: f64,
        array: ArraySpec,
        tx_power_dbw: f64,
        own_user: &Vec3,
    ) -> Result<Self> {
        let (pos, vel) = sat.state_ecef(t);
        SatView::new(sat.id, pos, vel, array, tx_power_dbw, own_user)
    }

    pub fn pos(&self) -> &Vec3 {
        &self.terminal.pos
    }

    fn tx(&self) -> Transmitter<'_> {
        Transmitter { terminal: &self.terminal, power_dbw: self.tx_power_dbw }
    }
}

/// A ground terminal with its receiver noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserTerminal {
    pub terminal: Terminal,
    pub noise_dbw: f64,
}

impl UserTerminal {
    pub fn new(pos: Vec3, array: ArraySpec, noise_dbw: f64) -> Result<Self> {
        Ok(UserTerminal { terminal: Terminal { pos, frame: ArrayFrame::ground(&pos)?, array }, noise_dbw })
    }

    pub fn pos(&self) -> &Vec3 {
        &self.terminal.pos
    }

    fn rx(&self) -> Receiver<'_> {
        Receiver { terminal: &self.terminal, noise_dbw: self.noise_dbw }
    }
}

/// Everything the selection strategies need at one time step: the overhead
/// sets `P` and `S`, both users, and every pairwise link ratio.
///
/// Ratios are linear and cached at construction:
/// `SNR(u,p)`, `SNR(v,s)`, `INR(u,p;s)` and `INR(v,s;p)`. Indices into
/// [`primary`](Self::primary) and [`secondary`](Self::secondary) are used
/// throughout; ids are only for reporting and tie-breaking.
#[derive(Debug, Clone)]
pub struct SceneSnapshot {
    pub t_s: f64,
    pub primary_user: UserTerminal,
    pub secondary_user: UserTerminal,
    pub primary: Vec<SatView>,
    pub secondary: Vec<SatView>,
    carrier_hz: f64,
    snr_u: Vec<f64>,
    snr_v: Vec<f64>,
    /// Row-major `|P| x |S|`.
    inr_u: Vec<f64>,
    /// Row-major `|S| x |P|`.
    inr_v: Vec<f64>,
}

impl SceneSnapshot {
    pub fn new(
        t_s: f64,
        primary_user: UserTerminal,
        secondary_user: UserTerminal,
        primary: Vec<SatView>,
        secondary: Vec<SatView>,
        carrier_hz: f64,
    ) -> Self {
        let (u, v) = (&primary_user, &secondary_user);
        let snr_u = primary.iter().map(|p| link_ratio(p.tx(), u.pos(), u.rx(), p.pos(), carrier_hz)).collect();
        let snr_v = secondary.iter().map(|s| link_ratio(s.tx(), v.pos(), v.rx(), s.pos(), carrier_hz)).collect();
        let mut inr_u = Vec::with_capacity(primary.len() * secondary.len());
        for p in &primary {
            for s in &secondary {
                inr_u.push(link_ratio(s.tx(), v.pos(), u.rx(), p.pos(), carrier_hz));
            }
        }
        let mut inr_v = Vec::with_capacity(primary.len() * secondary.len());
        for s in &secondary {
            for p in &primary {
                inr_v.push(link_ratio(p.tx(), u.pos(), v.rx(), s.pos(), carrier_hz));
            }
        }
        SceneSnapshot { t_s, primary_user, secondary_user, primary, secondary, carrier_hz, snr_u, snr_v, inr_u, inr_v }
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn num_primary(&self) -> usize {
        self.primary.len()
    }

    pub fn num_secondary(&self) -> usize {
        self.secondary.len()
    }

    /// `SNR(u, p)`, linear.
    #[inline]
    pub fn snr_primary(&self, p: usize) -> f64 {
        self.snr_u[p]
    }

    /// `SNR(v, s)`, linear.
    #[inline]
    pub fn snr_secondary(&self, s: usize) -> f64 {
        self.snr_v[s]
    }

    /// `INR(u, p; s)`: interference at the primary user served by `p` from
    /// secondary satellite `s` serving `v`. Linear.
    #[inline]
    pub fn inr_primary(&self, p: usize, s: usize) -> f64 {
        self.inr_u[p * self.secondary.len() + s]
    }

    /// `INR(v, s; p)`, linear.
    #[inline]
    pub fn inr_secondary(&self, s: usize, p: usize) -> f64 {
        self.inr_v[s * self.primary.len() + p]
    }

    /// `SINR(u, p; s)`, linear.
    #[inline]
    pub fn sinr_primary(&self, p: usize, s: usize) -> f64 {
        self.snr_primary(p) / (1.0 + self.inr_primary(p, s))
    }

    /// `SINR(v, s; p)`, linear.
    #[inline]
    pub fn sinr_secondary(&self, s: usize, p: usize) -> f64 {
        self.snr_secondary(s) / (1.0 + self.inr_secondary(s, p))
    }

    pub fn primary_id(&self, p: usize) -> u32 {
        self.primary[p].id
    }

    pub fn secondary_id(&self, s: usize) -> u32 {
        self.secondary[s].id
    }

    /// Spread (max - min) of `SNR(v, s)` across `S`, dB.
    pub fn secondary_snr_spread_db(&self) -> Option<f64> {
        let max = self.snr_v.iter().copied().reduce(f64::max)?;
        let min = self.snr_v.iter().copied().reduce(f64::min)?;
        Some(to_db(max) - to_db(min))
    }
}
