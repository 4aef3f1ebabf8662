use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sweep::{ArrayResults, RobustRow, SelectionRow};
use crate::link_budget::ProtectionThreshold;
use crate::selection::Strategy;

/// Sorted sample set with order-statistic quantiles.
///
/// `quantile(q)` returns the sample at rank `ceil(q * n)` (1-based, clamped
/// to `[1, n]`), so the median of an even-sized set is the lower of the two
/// middle values. NaN samples are dropped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: impl IntoIterator<Item = f64>) -> Self {
        let mut sorted: Vec<f64> = samples.into_iter().filter(|x| !x.is_nan()).collect();
        sorted.sort_by(f64::total_cmp);
        EmpiricalCdf { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn quantile(&self, q: f64) -> Option<f64> {
        let n = self.sorted.len();
        if n == 0 {
            return None;
        }
        let rank = (q.clamp(0.0, 1.0) * n as f64).ceil() as usize;
        Some(self.sorted[rank.clamp(1, n) - 1])
    }

    pub fn median(&self) -> Option<f64> {
        self.quantile(0.5)
    }

    pub fn min(&self) -> Option<f64> {
        self.sorted.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.sorted.last().copied()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.sorted.iter().sum::<f64>() / self.len() as f64)
    }

    /// Fraction of samples `<= x`.
    pub fn fraction_le(&self, x: f64) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.sorted.partition_point(|&v| v <= x) as f64 / self.len() as f64
    }

    /// Fraction of samples `>= x`.
    pub fn fraction_ge(&self, x: f64) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        1.0 - self.sorted.partition_point(|&v| v < x) as f64 / self.len() as f64
    }

    /// Step points `(x, F(x))`, one per distinct sample value.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let y = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = y,
                _ => out.push((x, y)),
            }
        }
        out
    }
}

pub const SUMMARY_QUANTILES: [f64; 9] = [0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];

/// Quantile table of one sample set, as written to the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub count: usize,
    pub mean: Option<f64>,
    /// `(q, value)` pairs for [`SUMMARY_QUANTILES`].
    pub quantiles: Vec<(f64, f64)>,
}

impl QuantileTable {
    pub fn from_cdf(cdf: &EmpiricalCdf) -> Self {
        QuantileTable {
            count: cdf.len(),
            mean: cdf.mean(),
            quantiles: SUMMARY_QUANTILES.iter().filter_map(|&q| cdf.quantile(q).map(|v| (q, v))).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reducer {
    Mean,
    Median,
}

impl Reducer {
    pub fn apply(self, cdf: &EmpiricalCdf) -> Option<f64> {
        match self {
            Reducer::Mean => cdf.mean(),
            Reducer::Median => cdf.median(),
        }
    }
}

/// Threshold x gamma grid. `cells[i][j]` is row `thresholds[i]`, column
/// `gammas[j]`; empty cells are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub reducer: Reducer,
    pub thresholds: Vec<String>,
    pub gammas_deg: Vec<f64>,
    pub cells: Vec<Vec<Option<f64>>>,
}

/// Threshold label used as a JSON key and in plot-data file names.
pub fn threshold_key(th: ProtectionThreshold) -> String {
    th.to_string()
}

fn distinct<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Selection-table samples of `metric` for one strategy and threshold.
pub fn selection_cdf(
    rows: &[SelectionRow],
    strategy: Strategy,
    th: ProtectionThreshold,
    metric: impl Fn(&SelectionRow) -> Option<f64>,
) -> EmpiricalCdf {
    EmpiricalCdf::new(rows.iter().filter(|r| r.strategy == strategy && r.inr_th_db == th).filter_map(metric))
}

/// Robust-table samples of `metric` for one threshold and gamma.
pub fn robust_cdf(
    rows: &[RobustRow],
    th: ProtectionThreshold,
    gamma_deg: f64,
    metric: impl Fn(&RobustRow) -> Option<f64>,
) -> EmpiricalCdf {
    EmpiricalCdf::new(rows.iter().filter(|r| r.inr_th_db == th && r.gamma_deg == gamma_deg).filter_map(metric))
}

pub fn robust_heatmap(
    rows: &[RobustRow],
    reducer: Reducer,
    metric: impl Fn(&RobustRow) -> Option<f64> + Copy,
) -> Heatmap {
    let thresholds = distinct(rows.iter().map(|r| r.inr_th_db));
    let gammas = distinct(rows.iter().map(|r| r.gamma_deg));
    Heatmap {
        reducer,
        thresholds: thresholds.iter().map(|&t| threshold_key(t)).collect(),
        gammas_deg: gammas.clone(),
        cells: thresholds
            .iter()
            .map(|&th| gammas.iter().map(|&g| reducer.apply(&robust_cdf(rows, th, g, metric))).collect())
            .collect(),
    }
}

type Tables = BTreeMap<String, QuantileTable>;

/// Per-figure quantile tables for one city and ground array.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FigureSummary {
    /// Feasible count `N_s` per threshold.
    pub fig6: Tables,
    /// Primary SINR per `strategy@threshold`.
    pub fig8a: Tables,
    /// Secondary SINR per `strategy@threshold`.
    pub fig8b: Tables,
    /// Protective max-SINR choice: `elevation@threshold` and
    /// `separation@threshold`.
    pub fig10: Tables,
    /// Normalized guaranteed SINR per `threshold@gamma`.
    pub fig12a: Tables,
    /// Median guaranteed SINR over the threshold x gamma grid.
    pub fig12b: Option<Heatmap>,
    /// Mean robust feasible count `N_s'` over the threshold x gamma grid.
    pub robust_feasible_mean: Option<Heatmap>,
    /// Outage fraction per `strategy@threshold`.
    pub outage_fraction: BTreeMap<String, f64>,
}

fn key2(a: impl std::fmt::Display, b: impl std::fmt::Display) -> String {
    format!("{a}@{b}")
}

impl FigureSummary {
    pub fn from_results(res: &ArrayResults) -> Self {
        let sel = &res.selection;
        let mut out = FigureSummary::default();
        let strategies = distinct(sel.iter().map(|r| r.strategy));
        let thresholds = distinct(sel.iter().map(|r| r.inr_th_db));
        if let Some(&first) = strategies.first() {
            // N_s does not depend on the strategy
            for &th in &thresholds {
                let cdf = selection_cdf(sel, first, th, |r| r.p_star.map(|_| r.n_feasible as f64));
                out.fig6.insert(threshold_key(th), QuantileTable::from_cdf(&cdf));
            }
        }
        for &st in &strategies {
            for &th in &thresholds {
                let k = key2(st, th);
                out.fig8a.insert(k.clone(), QuantileTable::from_cdf(&selection_cdf(sel, st, th, |r| r.sinr_p_db)));
                out.fig8b.insert(k.clone(), QuantileTable::from_cdf(&selection_cdf(sel, st, th, |r| r.sinr_s_db)));
                let rows: Vec<_> = sel.iter().filter(|r| r.strategy == st && r.inr_th_db == th).collect();
                if !rows.is_empty() {
                    let o = rows.iter().filter(|r| r.outage.is_some()).count();
                    out.outage_fraction.insert(k, o as f64 / rows.len() as f64);
                }
            }
        }
        if strategies.contains(&Strategy::ProtectiveMaxSinr) {
            for &th in &thresholds {
                let el = selection_cdf(sel, Strategy::ProtectiveMaxSinr, th, |r| r.elev_s_deg);
                let sep = selection_cdf(sel, Strategy::ProtectiveMaxSinr, th, |r| r.sep_deg);
                out.fig10.insert(key2("elevation", th), QuantileTable::from_cdf(&el));
                out.fig10.insert(key2("separation", th), QuantileTable::from_cdf(&sep));
            }
        }
        let rob = &res.robust;
        if !rob.is_empty() {
            for th in distinct(rob.iter().map(|r| r.inr_th_db)) {
                for g in distinct(rob.iter().map(|r| r.gamma_deg)) {
                    let cdf = robust_cdf(rob, th, g, |r| r.guaranteed_sinr_norm_db);
                    out.fig12a.insert(key2(th, g), QuantileTable::from_cdf(&cdf));
                }
            }
            out.fig12b = Some(robust_heatmap(rob, Reducer::Median, |r| r.guaranteed_sinr_db));
            out.robust_feasible_mean =
                Some(robust_heatmap(rob, Reducer::Mean, |r| r.p_star.map(|_| r.n_feasible_robust as f64)));
        }
        out
    }
}

/// `summary.json`: city -> ground array -> figure tables.
pub type Summary = BTreeMap<String, BTreeMap<String, FigureSummary>>;
