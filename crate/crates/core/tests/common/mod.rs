//! Randomized scenes and brute-force oracles shared by the integration tests.
//!
//! The oracles deliberately avoid the crate's own helpers: frames are rebuilt
//! from scratch, array factors are direct element sums, and every argmax is a
//! full sort rather than a running scan.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::f64::consts::PI;

use coexist_core::constellation::{geodetic_to_ecef, position_from_look_angles};
use coexist_core::link_budget::{noise_power_dbw, RadioConfig};
use coexist_core::selection::{SatView, UserTerminal};
use coexist_core::units::SPEED_OF_LIGHT;
use coexist_core::{ArraySpec, ProtectionThreshold, RobustConstraint, SceneSnapshot, Strategy, Vec3};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone)]
pub struct RawSat {
    pub id: u32,
    pub pos: Vec3,
    pub vel: Vec3,
    pub power_dbw: f64,
}

/// Plain description of a scene, enough to rebuild every link by hand.
#[derive(Debug, Clone)]
pub struct RawScene {
    pub u: Vec3,
    pub v: Vec3,
    pub user_array: u32,
    pub sat_array: u32,
    pub noise_dbw: f64,
    pub carrier_hz: f64,
    pub primary: Vec<RawSat>,
    pub secondary: Vec<RawSat>,
}

impl RawScene {
    pub fn snapshot(&self) -> SceneSnapshot {
        let ut = UserTerminal::new(self.u, ArraySpec::ground(self.user_array), self.noise_dbw).unwrap();
        let vt = UserTerminal::new(self.v, ArraySpec::ground(self.user_array), self.noise_dbw).unwrap();
        let view = |s: &RawSat, own: &Vec3| {
            SatView::new(s.id, s.pos, s.vel, ArraySpec::satellite(self.sat_array), s.power_dbw, own).unwrap()
        };
        SceneSnapshot::new(
            0.0,
            ut,
            vt,
            self.primary.iter().map(|s| view(s, &self.u)).collect(),
            self.secondary.iter().map(|s| view(s, &self.v)).collect(),
            self.carrier_hz,
        )
    }
}

fn horizontal_velocity(rng: &mut ChaCha8Rng, pos: &Vec3) -> Vec3 {
    let r = pos.normalize();
    loop {
        let t = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let h = t - r * r.dot(&t);
        if h.norm() > 0.1 {
            return h.normalize() * rng.random_range(7000.0..7800.0);
        }
    }
}

fn sat_at(rng: &mut ChaCha8Rng, id: u32, user: &Vec3) -> RawSat {
    let el = rng.random_range(30.0..90.0);
    let az = rng.random_range(0.0..360.0);
    let alt = rng.random_range(500.0..700.0);
    let pos = position_from_look_angles(user, el, az, alt).unwrap();
    RawSat { id, pos, vel: horizontal_velocity(rng, &pos), power_dbw: rng.random_range(-8.0..0.0) }
}

/// A secondary placed within a few degrees of `near` as seen from `u`, the
/// geometry that produces strong interference.
fn sat_near(rng: &mut ChaCha8Rng, id: u32, u: &Vec3, near: &Vec3) -> RawSat {
    let d = near - u;
    let jitter = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        * rng.random_range(0.0..0.05);
    let dir = (d.normalize() + jitter).normalize();
    let pos = u + dir * d.norm() * rng.random_range(0.95..1.2);
    RawSat { id, pos, vel: horizontal_velocity(rng, &pos), power_dbw: rng.random_range(-8.0..0.0) }
}

/// Random scene with unique shuffled ids, occasional empty sets, satellites
/// clustered near primaries, and exact duplicates under a different id so
/// that tie-breaking is exercised.
pub fn random_scene(rng: &mut ChaCha8Rng) -> RawScene {
    let lat = rng.random_range(-60.0..60.0);
    let lon = rng.random_range(-180.0..180.0);
    let u = geodetic_to_ecef(lat, lon, 0.0);
    let v = if rng.random_bool(0.5) {
        u
    } else {
        geodetic_to_ecef(lat + rng.random_range(-0.05..0.05), lon + rng.random_range(-0.05..0.05), 0.0)
    };
    let mut ids: Vec<u32> = (0..1000).collect();
    ids.shuffle(rng);
    let mut ids = ids.into_iter();

    let n_p = if rng.random_bool(0.05) { 0 } else { rng.random_range(1..=8) };
    let n_s = if rng.random_bool(0.05) { 0 } else { rng.random_range(1..=12) };
    let mut primary: Vec<RawSat> = (0..n_p).map(|_| sat_at(rng, ids.next().unwrap(), &u)).collect();
    let mut secondary: Vec<RawSat> = Vec::new();
    for _ in 0..n_s {
        let id = ids.next().unwrap();
        if !primary.is_empty() && rng.random_bool(0.4) {
            let near = primary[rng.random_range(0..primary.len())].pos;
            secondary.push(sat_near(rng, id, &u, &near));
        } else {
            secondary.push(sat_at(rng, id, &v));
        }
    }
    for set in [&mut primary, &mut secondary] {
        if !set.is_empty() && rng.random_bool(0.3) {
            let mut dup = set[rng.random_range(0..set.len())].clone();
            dup.id = ids.next().unwrap();
            let at = rng.random_range(0..=set.len());
            set.insert(at, dup);
        }
    }
    RawScene {
        u,
        v,
        user_array: *[4u32, 8, 16, 32].choose(rng).unwrap(),
        sat_array: *[8u32, 16, 32, 64].choose(rng).unwrap(),
        noise_dbw: noise_power_dbw(&RadioConfig::default()),
        carrier_hz: RadioConfig::default().carrier_hz,
        primary,
        secondary,
    }
}

pub fn random_threshold(rng: &mut ChaCha8Rng) -> ProtectionThreshold {
    match rng.random_range(0..8) {
        0 => ProtectionThreshold::Unconstrained,
        1 => ProtectionThreshold::Db(-12.2),
        2 => ProtectionThreshold::Db(-15.0),
        3 => ProtectionThreshold::Db(0.0),
        _ => ProtectionThreshold::Db(rng.random_range(-40.0..20.0)),
    }
}

// ---------------------------------------------------------------------------
// Link oracle

/// `[x, y, z]` with z = up, x = East.
fn ground_axes(pos: &Vec3) -> [Vec3; 3] {
    let up = pos / pos.norm();
    let east = Vec3::new(-up.y, up.x, 0.0).normalize();
    [east, up.cross(&east), up]
}

/// `[x, y, z]` with z = nadir, x = velocity projected off nadir.
fn satellite_axes(pos: &Vec3, vel: &Vec3) -> [Vec3; 3] {
    let nadir = -pos / pos.norm();
    let x = (vel - nadir * nadir.dot(vel)).normalize();
    [x, nadir.cross(&x), nadir]
}

fn local(axes: &[Vec3; 3], from: &Vec3, to: &Vec3) -> Vec3 {
    let d = (to - from).normalize();
    Vec3::new(d.dot(&axes[0]), d.dot(&axes[1]), d.dot(&axes[2]))
}

/// `|sum_m exp(j pi m delta)|`, element by element.
fn line_amplitude(n: u32, delta: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for m in 0..n {
        let ph = PI * m as f64 * delta;
        re += ph.cos();
        im += ph.sin();
    }
    re.hypot(im)
}

/// Amplitudes below this lose too many digits to cancellation for a 1e-9 dB
/// comparison.
const WELL_CONDITIONED: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub linear: f64,
    /// Peak of this link: both arrays on boresight.
    pub peak: f64,
    /// Every one-dimensional factor is far from a null.
    pub well_conditioned: bool,
}

struct End<'a> {
    pos: &'a Vec3,
    axes: [Vec3; 3],
    n: u32,
}

fn array_gain(end: &End<'_>, steer: &Vec3, eval: &Vec3) -> (f64, bool) {
    let s = local(&end.axes, end.pos, steer);
    let e = local(&end.axes, end.pos, eval);
    if e.z < 0.0 {
        return (0.0, true);
    }
    let a = line_amplitude(end.n, e.x - s.x);
    let b = line_amplitude(end.n, e.y - s.y);
    let n = end.n as f64;
    (a * a / n * (b * b / n), a > WELL_CONDITIONED && b > WELL_CONDITIONED)
}

#[allow(clippy::too_many_arguments)]
fn oracle_link(
    tx: &End<'_>,
    power_dbw: f64,
    tx_steer: &Vec3,
    rx: &End<'_>,
    noise_dbw: f64,
    rx_steer: &Vec3,
    carrier_hz: f64,
) -> OracleValue {
    let (gt, ct) = array_gain(tx, tx_steer, rx.pos);
    let (gr, cr) = array_gain(rx, rx_steer, tx.pos);
    let d = (tx.pos - rx.pos).norm();
    let path = (SPEED_OF_LIGHT / (4.0 * PI * d * carrier_hz)).powi(2);
    let scale = 10f64.powf((power_dbw - noise_dbw) / 10.0) * path;
    let peak = scale * (tx.n * tx.n) as f64 * (rx.n * rx.n) as f64;
    OracleValue { linear: scale * gt * gr, peak, well_conditioned: ct && cr }
}

/// Every ratio of a scene, recomputed independently.
pub struct OracleLinks {
    pub snr_u: Vec<OracleValue>,
    pub snr_v: Vec<OracleValue>,
    /// `[p][s]`
    pub inr_u: Vec<Vec<OracleValue>>,
    /// `[s][p]`
    pub inr_v: Vec<Vec<OracleValue>>,
}

pub fn oracle_links(raw: &RawScene) -> OracleLinks {
    let u = End { pos: &raw.u, axes: ground_axes(&raw.u), n: raw.user_array };
    let v = End { pos: &raw.v, axes: ground_axes(&raw.v), n: raw.user_array };
    let (n0, f) = (raw.noise_dbw, raw.carrier_hz);
    let ps: Vec<End> = raw.primary.iter().map(|s| sat_end(s, raw.sat_array)).collect();
    let ss: Vec<End> = raw.secondary.iter().map(|s| sat_end(s, raw.sat_array)).collect();
    OracleLinks {
        snr_u: raw
            .primary
            .iter()
            .zip(&ps)
            .map(|(p, e)| oracle_link(e, p.power_dbw, &raw.u, &u, n0, &p.pos, f))
            .collect(),
        snr_v: raw
            .secondary
            .iter()
            .zip(&ss)
            .map(|(s, e)| oracle_link(e, s.power_dbw, &raw.v, &v, n0, &s.pos, f))
            .collect(),
        inr_u: raw
            .primary
            .iter()
            .map(|p| {
                raw.secondary
                    .iter()
                    .zip(&ss)
                    .map(|(s, e)| oracle_link(e, s.power_dbw, &raw.v, &u, n0, &p.pos, f))
                    .collect()
            })
            .collect(),
        inr_v: raw
            .secondary
            .iter()
            .map(|s| {
                raw.primary
                    .iter()
                    .zip(&ps)
                    .map(|(p, e)| oracle_link(e, p.power_dbw, &raw.u, &v, n0, &s.pos, f))
                    .collect()
            })
            .collect(),
    }
}

fn sat_end(s: &RawSat, n: u32) -> End<'_> {
    End { pos: &s.pos, axes: satellite_axes(&s.pos, &s.vel), n }
}

/// Agreement test for one ratio: 1e-9 dB where the oracle is well
/// conditioned, otherwise 1e-12 of the link's peak in linear terms.
pub fn agrees(actual: f64, oracle: &OracleValue) -> bool {
    if oracle.linear == 0.0 || actual == 0.0 {
        return actual == oracle.linear;
    }
    if oracle.well_conditioned {
        (10.0 * (actual / oracle.linear).log10()).abs() <= 1e-9
    } else {
        (actual - oracle.linear).abs() <= 1e-12 * oracle.peak
    }
}

// ---------------------------------------------------------------------------
// Selection oracles: full sorts over the scene's cached ratios.

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Index of the maximum `(value, -id)`, found by sorting.
pub fn sorted_best(items: Vec<(usize, u32, f64)>) -> Option<usize> {
    let mut items = items;
    items.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
    items.first().map(|x| x.0)
}

fn admits_db(th: ProtectionThreshold, inr: f64) -> bool {
    match th {
        ProtectionThreshold::Unconstrained => true,
        ProtectionThreshold::Db(t) => db(inr) <= t,
    }
}

pub fn naive_primary(sc: &SceneSnapshot) -> Option<usize> {
    sorted_best((0..sc.num_primary()).map(|p| (p, sc.primary_id(p), sc.snr_primary(p))).collect())
}

/// `(max, min)` of `INR(u, p; s)` over `rows x S`.
pub fn naive_bounds(sc: &SceneSnapshot, rows: &[usize]) -> Option<(f64, f64)> {
    let mut all: Vec<f64> =
        rows.iter().flat_map(|&p| (0..sc.num_secondary()).map(move |s| sc.inr_primary(p, s))).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some((*all.last()?, all[0]))
}

pub fn naive_feasible(sc: &SceneSnapshot, p: usize, th: ProtectionThreshold) -> Vec<usize> {
    (0..sc.num_secondary()).filter(|&s| admits_db(th, sc.inr_primary(p, s))).collect()
}

pub fn naive_secondary(sc: &SceneSnapshot, p: usize, strategy: Strategy, th: ProtectionThreshold) -> Option<usize> {
    let pool: Vec<usize> =
        if strategy.is_protective() { naive_feasible(sc, p, th) } else { (0..sc.num_secondary()).collect() };
    let value = |s: usize| match strategy {
        Strategy::GreedyMaxSnr | Strategy::ProtectiveMaxSnr => sc.snr_secondary(s),
        Strategy::GreedyMaxSinr | Strategy::ProtectiveMaxSinr => sc.snr_secondary(s) / (1.0 + sc.inr_secondary(s, p)),
    };
    sorted_best(pool.into_iter().map(|s| (s, sc.secondary_id(s), value(s))).collect())
}

pub fn naive_useful(sc: &SceneSnapshot, p: usize, th: ProtectionThreshold, delta_db: f64) -> usize {
    let Some(best) =
        sorted_best((0..sc.num_secondary()).map(|s| (s, sc.secondary_id(s), sc.snr_secondary(s))).collect())
    else {
        return 0;
    };
    let floor_db = db(sc.snr_secondary(best)) - delta_db;
    naive_feasible(sc, p, th)
        .into_iter()
        .filter(|&s| db(sc.snr_secondary(s) / (1.0 + sc.inr_secondary(s, p))) >= floor_db)
        .count()
}

/// Chord-based angle, stable near zero.
pub fn naive_angle_deg(a: &Vec3, b: &Vec3) -> f64 {
    (2.0 * ((a.normalize() - b.normalize()).norm() / 2.0).min(1.0).asin()).to_degrees()
}

pub fn naive_candidates(sc: &SceneSnapshot, mu: &Vec3, gamma_deg: f64) -> Vec<usize> {
    (0..sc.num_primary())
        .filter(|&p| {
            let d = sc.primary[p].pos() - sc.primary_user.pos();
            naive_angle_deg(mu, &(d / d.norm())) <= gamma_deg
        })
        .collect()
}

/// `(robust feasible set, Some((s', p', guaranteed SINR)))` by exhaustive
/// search.
pub fn naive_robust(
    sc: &SceneSnapshot,
    cands: &[usize],
    th: ProtectionThreshold,
    constraint: RobustConstraint,
) -> (Vec<usize>, Option<(usize, usize, f64)>) {
    let feasible: Vec<usize> = (0..sc.num_secondary())
        .filter(|&s| {
            cands.iter().all(|&p| {
                let inr = match constraint {
                    RobustConstraint::PrimaryUser => sc.inr_primary(p, s),
                    RobustConstraint::SecondaryUser => sc.inr_secondary(s, p),
                };
                admits_db(th, inr)
            })
        })
        .collect();
    if cands.is_empty() {
        return (feasible, None);
    }
    let sinr = |s: usize, p: usize| sc.snr_secondary(s) / (1.0 + sc.inr_secondary(s, p));
    let mut scored: Vec<(usize, u32, f64, usize)> = feasible
        .iter()
        .map(|&s| {
            let mut ps: Vec<(usize, u32, f64)> = cands.iter().map(|&p| (p, sc.primary_id(p), sinr(s, p))).collect();
            ps.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.1.cmp(&b.1)));
            (s, sc.secondary_id(s), ps[0].2, ps[0].0)
        })
        .collect();
    scored.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.1.cmp(&b.1)));
    let best = scored.first().map(|&(s, _, g, p)| (s, p, g));
    (feasible, best)
}
