use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use coexist_core::phased_array::azimuth_cut;
use coexist_core::scenario::emit::{summarize, write_plotdata, write_summary};
use coexist_core::scenario::{emit, load_results_dir, Format, SelectionRow, Sweep};
use coexist_core::selection::{absolute_inr_bounds, conditional_inr_bounds, evaluate, select_primary};
use coexist_core::units::{to_db_clamped, DB_FLOOR};
use coexist_core::{ArraySpec, ScenarioConfig};
use log::info;

#[derive(Parser)]
#[command(name = "coexist", version, about = "LEO downlink coexistence simulator")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "COEXIST_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// TOML scenario file; defaults apply to anything it leaves out.
    #[arg(long, env = "COEXIST_CONFIG")]
    config: Option<PathBuf>,

    /// Restrict the run to one configured city.
    #[arg(long)]
    city: Option<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(c) = &self.city {
            cfg.restrict_to_city(c)?;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Full sweep: every city, step, array, strategy, threshold and gamma.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,

        #[arg(long, default_value = "out")]
        out_dir: PathBuf,

        /// Comma-separated subset of csv,json,plotdata.
        #[arg(long, value_delimiter = ',', default_value = "csv,json,plotdata")]
        format: Vec<Format>,
    },
    /// Dump one time step as JSON.
    Snapshot {
        #[command(flatten)]
        scenario: ScenarioArgs,

        /// Seconds since the constellation epoch.
        #[arg(long, default_value_t = 0.0)]
        t: f64,

        /// Ground-array size (square).
        #[arg(long, default_value_t = 32)]
        array: u32,

        /// Also write every satellite's Earth-fixed position to this CSV.
        #[arg(long)]
        positions: Option<PathBuf>,

        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boresight-steered gain cut of a square array as `angle_deg,gain_db`.
    Pattern {
        #[arg(long, default_value_t = 64)]
        size: u32,

        #[arg(long, default_value_t = 0.1)]
        step_deg: f64,

        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild summary.json and plot data from the CSVs of an earlier run.
    Figures {
        /// Directory written by `run`.
        #[arg(long)]
        input: PathBuf,

        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(scenario: &ScenarioArgs, out_dir: &Path, format: &[Format]) -> Result<()> {
    let cfg = scenario.load()?;
    info!("sweeping {} cities x {} steps x {} arrays", cfg.cities.len(), cfg.timesteps().len(), cfg.user_arrays.len());
    let started = Instant::now();
    let results = Sweep::new(&cfg)?.run()?;
    info!("sweep finished in {:.1?}", started.elapsed());
    emit(&results, out_dir, format)?;
    info!("wrote {}", out_dir.display());
    Ok(())
}

fn snapshot(scenario: &ScenarioArgs, t: f64, array: u32, positions: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let cfg = scenario.load()?;
    let array = ArraySpec::new(array, array, coexist_core::Boresight::Zenith)?;
    let sweep = Sweep::new(&cfg)?;
    let mut cities = Vec::new();
    for (i, city) in cfg.cities.iter().enumerate() {
        let scene = sweep.scene(i, t, array)?;
        let p_star = select_primary(&scene).ok();
        let abs = absolute_inr_bounds(&scene).ok();
        let cond = p_star.and_then(|p| conditional_inr_bounds(&scene, p).ok());
        let mut rows: Vec<SelectionRow> = Vec::new();
        for &st in &cfg.strategies {
            for &th in &cfg.thresholds_db {
                rows.push(SelectionRow::from_outcome(t, &evaluate(&scene, st, th, cfg.useful_delta_db)));
            }
        }
        let sats = |v: &[coexist_core::selection::SatView]| -> Vec<serde_json::Value> {
            v.iter()
                .map(|s| serde_json::json!({ "id": s.id, "elevation_deg": s.elevation_deg, "tx_power_dbw": s.tx_power_dbw }))
                .collect()
        };
        cities.push(serde_json::json!({
            "city": city.name,
            "primary_visible": sats(&scene.primary),
            "secondary_visible": sats(&scene.secondary),
            "p_star": p_star.map(|p| scene.primary_id(p)),
            "inr_max_db": abs.map(|b| to_db_clamped(b.max)),
            "inr_min_db": abs.map(|b| to_db_clamped(b.min)),
            "inr_max_cond_db": cond.map(|b| to_db_clamped(b.max)),
            "inr_min_cond_db": cond.map(|b| to_db_clamped(b.min)),
            "selection": rows,
        }));
    }
    let doc = serde_json::json!({ "t_s": t, "array": array.label(), "cities": cities });
    write_or_print(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;

    if let Some(path) = positions {
        let epoch = sweep.epoch(t);
        let mut text = String::from("system,t_s,sat_id,x_m,y_m,z_m\n");
        for (system, sats, states) in [
            ("primary", sweep.primary_satellites(), &epoch.primary),
            ("secondary", sweep.secondary_satellites(), &epoch.secondary),
        ] {
            for (s, (pos, _)) in sats.iter().zip(states) {
                writeln!(text, "{system},{t},{},{},{},{}", s.id, pos.x, pos.y, pos.z)?;
            }
        }
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn pattern(size: u32, step_deg: f64, out: Option<&Path>) -> Result<()> {
    let spec = ArraySpec::new(size, size, coexist_core::Boresight::Zenith)?;
    let mut text = String::from("angle_deg,gain_db\n");
    for (a, g) in azimuth_cut(&spec, step_deg)? {
        writeln!(text, "{a},{}", g.max(DB_FLOOR))?;
    }
    write_or_print(out, &text)
}

fn figures(input: &Path, out_dir: Option<&Path>) -> Result<()> {
    let out_dir = out_dir.unwrap_or(input);
    let loaded = load_results_dir(input)?;
    if loaded.is_empty() {
        bail!("no selection_*.csv files under {}", input.display());
    }
    for (city, arrays) in &loaded {
        for a in arrays {
            write_plotdata(&out_dir.join(city).join("plotdata").join(&a.array_label), a)?;
        }
    }
    let summary = summarize(loaded.iter().map(|(c, a)| (c.clone(), a.as_slice())));
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    write_summary(&out_dir.join("summary.json"), &summary)?;
    info!("wrote figures for {} cities to {}", loaded.len(), out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Run { scenario, out_dir, format } => run(scenario, out_dir, format),
        Command::Snapshot { scenario, t, array, positions, out } => {
            snapshot(scenario, *t, *array, positions.as_deref(), out.as_deref())
        }
        Command::Pattern { size, step_deg, out } => pattern(*size, *step_deg, out.as_deref()),
        Command::Figures { input, out_dir } => figures(input, out_dir.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
