use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::aggregate::{robust_cdf, selection_cdf, threshold_key, EmpiricalCdf, FigureSummary, Heatmap, Summary};
use super::sweep::{ArrayResults, RobustRow, ScenarioResults, SelectionRow, StepStats};
use crate::error::{Error, Result};
use crate::selection::Strategy;

pub const SELECTION_COLUMNS: [&str; 15] = [
    "t_s",
    "strategy",
    "inr_th_db",
    "p_star",
    "s_choice",
    "snr_p_db",
    "sinr_p_db",
    "snr_s_db",
    "sinr_s_db",
    "inr_p_db",
    "n_feasible",
    "n_useful",
    "sep_deg",
    "elev_s_deg",
    "outage",
];

pub const ROBUST_COLUMNS: [&str; 19] = [
    "t_s",
    "strategy",
    "inr_th_db",
    "p_star",
    "s_choice",
    "snr_p_db",
    "sinr_p_db",
    "snr_s_db",
    "sinr_s_db",
    "inr_p_db",
    "n_feasible",
    "n_useful",
    "sep_deg",
    "elev_s_deg",
    "outage",
    "gamma_deg",
    "n_feasible_robust",
    "guaranteed_sinr_db",
    "guaranteed_sinr_norm_db",
];

pub const STEP_COLUMNS: [&str; 9] = [
    "t_s",
    "n_primary",
    "n_secondary",
    "p_star",
    "snr_s_max_db",
    "inr_max_db",
    "inr_min_db",
    "inr_max_cond_db",
    "inr_min_cond_db",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Plotdata,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "plotdata" => Ok(Format::Plotdata),
            other => Err(Error::validation("format", format!("unknown format {other:?}"))),
        }
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Write `rows` with an explicit header, so an empty table still has one.
pub fn write_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| Error::csv(path, e))?;
    w.write_record(header).map_err(|e| Error::csv(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| Error::csv(path, e))
}

pub fn selection_path(city_dir: &Path, array_label: &str) -> PathBuf {
    city_dir.join(format!("selection_{array_label}.csv"))
}

pub fn robust_path(city_dir: &Path, array_label: &str) -> PathBuf {
    city_dir.join(format!("robust_{array_label}.csv"))
}

pub fn steps_path(city_dir: &Path, array_label: &str) -> PathBuf {
    city_dir.join(format!("steps_{array_label}.csv"))
}

pub fn write_array_csv(city_dir: &Path, res: &ArrayResults) -> Result<()> {
    create_dir(city_dir)?;
    write_csv(&selection_path(city_dir, &res.array_label), &SELECTION_COLUMNS, &res.selection)?;
    write_csv(&robust_path(city_dir, &res.array_label), &ROBUST_COLUMNS, &res.robust)?;
    write_csv(&steps_path(city_dir, &res.array_label), &STEP_COLUMNS, &res.steps)
}

/// Read back what [`write_array_csv`] wrote. A missing robust or steps file
/// is treated as empty.
pub fn read_array_csv(city_dir: &Path, array_label: &str) -> Result<ArrayResults> {
    let robust_p = robust_path(city_dir, array_label);
    let steps_p = steps_path(city_dir, array_label);
    Ok(ArrayResults {
        array_label: array_label.to_string(),
        selection: read_csv::<SelectionRow>(&selection_path(city_dir, array_label))?,
        robust: if robust_p.exists() { read_csv::<RobustRow>(&robust_p)? } else { Vec::new() },
        steps: if steps_p.exists() { read_csv::<StepStats>(&steps_p)? } else { Vec::new() },
    })
}

/// `8x8` before `16x16`; anything unparseable sorts last by name.
fn label_order(label: &str) -> (u64, String) {
    let size = label.split('x').map(|n| n.parse::<u64>().ok()).try_fold(1u64, |acc, n| n.map(|n| acc * n));
    (size.unwrap_or(u64::MAX), label.to_string())
}

/// Every `(city directory name, results)` found under `dir`: cities by name,
/// arrays by element count.
pub fn load_results_dir(dir: &Path) -> Result<Vec<(String, Vec<ArrayResults>)>> {
    let mut out = Vec::new();
    let mut cities: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    cities.sort();
    for city_dir in cities {
        let mut labels: Vec<String> = fs::read_dir(&city_dir)
            .map_err(|e| Error::io(&city_dir, e))?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                let name = e.file_name().to_string_lossy().into_owned();
                name.strip_prefix("selection_")?.strip_suffix(".csv").map(str::to_string)
            })
            .collect();
        if labels.is_empty() {
            continue;
        }
        labels.sort_by_key(|l| label_order(l));
        let arrays = labels.iter().map(|l| read_array_csv(&city_dir, l)).collect::<Result<Vec<_>>>()?;
        let name = city_dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        out.push((name, arrays));
    }
    Ok(out)
}

pub fn summarize<'a>(cities: impl IntoIterator<Item = (String, &'a [ArrayResults])>) -> Summary {
    cities
        .into_iter()
        .map(|(name, arrays)| {
            let per_array = arrays.iter().map(|a| (a.array_label.clone(), FigureSummary::from_results(a))).collect();
            (name, per_array)
        })
        .collect()
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<Summary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn file_part(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' }).collect()
}

fn write_series(path: &Path, points: &[(f64, f64)]) -> Result<()> {
    #[derive(Serialize)]
    struct Xy {
        x: f64,
        y: f64,
    }
    let rows: Vec<Xy> = points.iter().map(|&(x, y)| Xy { x, y }).collect();
    write_csv(path, &["x", "y"], &rows)
}

fn write_cdf(dir: &Path, name: &str, cdf: &EmpiricalCdf) -> Result<()> {
    write_series(&dir.join(format!("{}.csv", file_part(name))), &cdf.points())
}

fn write_heatmap(dir: &Path, prefix: &str, map: &Heatmap) -> Result<()> {
    for (i, th) in map.thresholds.iter().enumerate() {
        let points: Vec<(f64, f64)> =
            map.gammas_deg.iter().zip(&map.cells[i]).filter_map(|(&g, v)| v.map(|v| (g, v))).collect();
        write_series(&dir.join(format!("{}.csv", file_part(&format!("{prefix}_{th}")))), &points)?;
    }
    Ok(())
}

/// One `x,y` file per curve: CDFs as `(value, cumulative fraction)` and
/// heatmap rows as `(gamma, cell)`.
pub fn write_plotdata(dir: &Path, res: &ArrayResults) -> Result<()> {
    create_dir(dir)?;
    let sel = &res.selection;
    let mut strategies: Vec<Strategy> = Vec::new();
    let mut thresholds = Vec::new();
    for r in sel {
        if !strategies.contains(&r.strategy) {
            strategies.push(r.strategy);
        }
        if !thresholds.contains(&r.inr_th_db) {
            thresholds.push(r.inr_th_db);
        }
    }
    if let Some(&first) = strategies.first() {
        for &th in &thresholds {
            let cdf = selection_cdf(sel, first, th, |r| r.p_star.map(|_| r.n_feasible as f64));
            write_cdf(dir, &format!("fig6_{}", threshold_key(th)), &cdf)?;
        }
    }
    for &st in &strategies {
        for &th in &thresholds {
            let tag = format!("{st}_{}", threshold_key(th));
            write_cdf(dir, &format!("fig8a_{tag}"), &selection_cdf(sel, st, th, |r| r.sinr_p_db))?;
            write_cdf(dir, &format!("fig8b_{tag}"), &selection_cdf(sel, st, th, |r| r.sinr_s_db))?;
        }
    }
    if strategies.contains(&Strategy::ProtectiveMaxSinr) {
        for &th in &thresholds {
            let k = threshold_key(th);
            let st = Strategy::ProtectiveMaxSinr;
            write_cdf(dir, &format!("fig10_elevation_{k}"), &selection_cdf(sel, st, th, |r| r.elev_s_deg))?;
            write_cdf(dir, &format!("fig10_separation_{k}"), &selection_cdf(sel, st, th, |r| r.sep_deg))?;
        }
    }
    let summary = FigureSummary::from_results(res);
    let rob = &res.robust;
    let mut pairs = Vec::new();
    for r in rob {
        if !pairs.contains(&(r.inr_th_db, r.gamma_deg)) {
            pairs.push((r.inr_th_db, r.gamma_deg));
        }
    }
    for (th, g) in pairs {
        let cdf = robust_cdf(rob, th, g, |r| r.guaranteed_sinr_norm_db);
        write_cdf(dir, &format!("fig12a_{}_{g}", threshold_key(th)), &cdf)?;
    }
    if let Some(map) = &summary.fig12b {
        write_heatmap(dir, "fig12b", map)?;
    }
    if let Some(map) = &summary.robust_feasible_mean {
        write_heatmap(dir, "robust_feasible_mean", map)?;
    }
    Ok(())
}

/// Write the requested formats under `out_dir`:
/// `<city>/{selection,robust,steps}_<array>.csv`, `summary.json` and
/// `<city>/plotdata/<array>/*.csv`.
pub fn emit(results: &ScenarioResults, out_dir: &Path, formats: &[Format]) -> Result<()> {
    create_dir(out_dir)?;
    for city in &results.cities {
        let city_dir = out_dir.join(city.city.slug());
        for arr in &city.arrays {
            if formats.contains(&Format::Csv) {
                write_array_csv(&city_dir, arr)?;
            }
            if formats.contains(&Format::Plotdata) {
                write_plotdata(&city_dir.join("plotdata").join(&arr.array_label), arr)?;
            }
        }
    }
    if formats.contains(&Format::Json) {
        let summary = summarize(results.cities.iter().map(|c| (c.city.slug(), c.arrays.as_slice())));
        write_summary(&out_dir.join("summary.json"), &summary)?;
    }
    if formats.contains(&Format::Csv) {
        let path = out_dir.join("config.toml");
        fs::write(&path, results.config.to_toml_string()?).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}
