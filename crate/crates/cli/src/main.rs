//! `bracelet` — generate data, regenerate the classifier leaderboard, run
//! the wearable simulator, and export plot-ready CSVs.
//!
//! Every run writes a `manifest.json` describing the resolved configuration
//! and produced files. Manifests carry no timestamps, so reruns with the
//! same inputs produce byte-identical output trees.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bracelet_core::dataset::{generate_synthetic, load_csv, save_csv, GeneratorConfig};
use bracelet_core::classifiers::{all_table1_presets, lookup_preset};
use bracelet_core::eval::{export_parallel_coords, export_scatter, run_leaderboard};
use bracelet_core::sim::decision::render_step_log;
use bracelet_core::sim::{format_alert, run_decision_loop, ScenarioConfig};

#[derive(Parser)]
#[command(name = "bracelet", version, about = "Impairment-detection pipeline and bracelet simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic BAC/pulse dataset as CSV.
    GenData(GenDataArgs),
    /// Cross-validate classifier presets and write the leaderboard.
    TrainEval(TrainEvalArgs),
    /// Run one bracelet scenario end to end.
    Simulate(SimulateArgs),
    /// Export plot-ready CSVs for one preset.
    PlotExport(PlotExportArgs),
}

#[derive(Args, Serialize)]
struct GenDataArgs {
    /// Number of sober samples.
    #[arg(long, default_value_t = 100)]
    n_normal: usize,
    /// Number of induced samples.
    #[arg(long, default_value_t = 99)]
    n_induced: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output CSV path; a manifest is written next to it.
    #[arg(long)]
    out: PathBuf,
    /// Upper bound of induced blood-alcohol content.
    #[arg(long)]
    induced_bac_max: Option<f64>,
    /// Upper bound of the induced pulse z-score.
    #[arg(long)]
    induced_pulse_zmax: Option<f64>,
    /// Fraction of induced samples drawn to look sober.
    #[arg(long)]
    overlap_fraction: Option<f64>,
}

#[derive(Args, Serialize)]
struct TrainEvalArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated preset names, or "all" for the full table.
    #[arg(long, default_value = "all")]
    presets: String,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Exit nonzero unless the run raises an alert.
    #[arg(long, conflicts_with = "expect_no_alert")]
    expect_alert: bool,
    /// Exit nonzero if the run raises an alert.
    #[arg(long)]
    expect_no_alert: bool,
}

#[derive(Args, Serialize)]
struct PlotExportArgs {
    /// Input dataset CSV.
    #[arg(long)]
    data: PathBuf,
    /// Preset whose cross-validated predictions color the export.
    #[arg(long, default_value = "Boosted Trees")]
    preset: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Reproducible record of one CLI run.
#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    config: serde_json::Value,
    seed: u64,
    /// Files produced by this run, relative to the manifest location.
    outputs: Vec<String>,
    version: &'static str,
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_manifest(dir_or_file: &Path, manifest: &RunManifest) -> Result<(), String> {
    let path = if dir_or_file.extension().is_some() && dir_or_file.extension() != Some("json".as_ref()) {
        // "next to" a data file: data.csv -> data.manifest.json
        dir_or_file.with_extension("manifest.json")
    } else {
        dir_or_file.join("manifest.json")
    };
    let mut body = serde_json::to_string_pretty(manifest).map_err(|e| e.to_string())?;
    body.push('\n');
    write_file(&path, &body)
}

fn file_slug(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_gen_data(args: &GenDataArgs) -> Result<(), String> {
    let mut cfg = GeneratorConfig {
        n_normal: args.n_normal,
        n_induced: args.n_induced,
        seed: args.seed,
        ..GeneratorConfig::default()
    };
    if let Some(v) = args.induced_bac_max {
        cfg.induced_bac_max = v;
    }
    if let Some(v) = args.induced_pulse_zmax {
        cfg.induced_pulse_zmax = v;
    }
    if let Some(v) = args.overlap_fraction {
        cfg.overlap_fraction = v;
    }
    let ds = generate_synthetic(&cfg).map_err(|e| e.to_string())?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    save_csv(&ds, &args.out).map_err(|e| e.to_string())?;
    let out_name = args
        .out
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_manifest(
        &args.out,
        &RunManifest {
            subcommand: "gen-data",
            config: serde_json::to_value(&cfg).map_err(|e| e.to_string())?,
            seed: args.seed,
            outputs: vec![out_name],
            version: env!("CARGO_PKG_VERSION"),
        },
    )
}

fn resolve_presets(spec: &str) -> Result<Vec<String>, String> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(all_table1_presets().into_iter().map(|p| p.name).collect());
    }
    let names: Vec<String> = spec
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err("no presets given".into());
    }
    for n in &names {
        // surface unknown names before any cross-validation work
        lookup_preset(n).map_err(|e| e.to_string())?;
    }
    Ok(names)
}

fn cmd_train_eval(args: &TrainEvalArgs) -> Result<(), String> {
    let ds = load_csv(&args.data).map_err(|e| e.to_string())?;
    let names = resolve_presets(&args.presets)?;
    let (board, outcomes) =
        run_leaderboard(&ds, &names, args.k, args.seed).map_err(|e| e.to_string())?;

    let mut outputs = Vec::new();
    let mut emit = |rel: &str, contents: &str| -> Result<(), String> {
        write_file(&args.out_dir.join(rel), contents)?;
        outputs.push(rel.to_string());
        Ok(())
    };

    print!("{}", board.render_text());
    emit("leaderboard.txt", &board.render_text())?;
    emit("leaderboard.csv", &board.render_csv())?;
    for row in &board.rows {
        let rel = format!("reports/{}.json", file_slug(&row.report.classifier));
        let mut body = serde_json::to_string_pretty(row).map_err(|e| e.to_string())?;
        body.push('\n');
        emit(&rel, &body)?;
    }
    emit("scatter.csv", &export_scatter(&ds))?;
    let winner = board
        .rows
        .iter()
        .position(|r| r.winner)
        .expect("leaderboard always flags a winner");
    let coords = export_parallel_coords(&ds, &outcomes[winner].predictions)
        .map_err(|e| e.to_string())?;
    emit("parallel_coordinates.csv", &coords)?;

    write_manifest(
        &args.out_dir,
        &RunManifest {
            subcommand: "train-eval",
            config: serde_json::json!({
                "data": args.data.display().to_string(),
                "k": args.k,
                "presets": names,
            }),
            seed: args.seed,
            outputs,
            version: env!("CARGO_PKG_VERSION"),
        },
    )
}

fn cmd_simulate(args: &SimulateArgs) -> Result<bool, String> {
    let raw = fs::read_to_string(&args.scenario)
        .map_err(|e| format!("cannot read {}: {e}", args.scenario.display()))?;
    let cfg: ScenarioConfig =
        serde_json::from_str(&raw).map_err(|e| format!("bad scenario: {e}"))?;
    let (alert, log) = run_decision_loop(&cfg).map_err(|e| e.to_string())?;

    let alerts = match &alert {
        Some(ev) => {
            let line = format_alert(ev);
            println!("{line}");
            format!("{line}\n")
        }
        None => String::new(),
    };
    write_file(&args.out_dir.join("step_log.csv"), &render_step_log(&log))?;
    write_file(&args.out_dir.join("alerts.log"), &alerts)?;
    write_manifest(
        &args.out_dir,
        &RunManifest {
            subcommand: "simulate",
            config: serde_json::to_value(&cfg).map_err(|e| e.to_string())?,
            seed: cfg.seed,
            outputs: vec!["step_log.csv".into(), "alerts.log".into()],
            version: env!("CARGO_PKG_VERSION"),
        },
    )?;

    if args.expect_alert && alert.is_none() {
        eprintln!("expected an alert but none was raised");
        return Ok(false);
    }
    if args.expect_no_alert {
        if let Some(ev) = &alert {
            eprintln!("expected no alert but got: {}", format_alert(ev));
            return Ok(false);
        }
    }
    Ok(true)
}

fn cmd_plot_export(args: &PlotExportArgs) -> Result<(), String> {
    let ds = load_csv(&args.data).map_err(|e| e.to_string())?;
    let names = vec![lookup_preset(&args.preset).map_err(|e| e.to_string())?.name];
    let (_, outcomes) =
        run_leaderboard(&ds, &names, args.k, args.seed).map_err(|e| e.to_string())?;
    write_file(&args.out_dir.join("scatter.csv"), &export_scatter(&ds))?;
    let coords =
        export_parallel_coords(&ds, &outcomes[0].predictions).map_err(|e| e.to_string())?;
    write_file(&args.out_dir.join("parallel_coordinates.csv"), &coords)?;
    write_manifest(
        &args.out_dir,
        &RunManifest {
            subcommand: "plot-export",
            config: serde_json::json!({
                "data": args.data.display().to_string(),
                "preset": names[0],
                "k": args.k,
            }),
            seed: args.seed,
            outputs: vec!["scatter.csv".into(), "parallel_coordinates.csv".into()],
            version: env!("CARGO_PKG_VERSION"),
        },
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::GenData(args) => cmd_gen_data(args).map(|()| true),
        Command::TrainEval(args) => cmd_train_eval(args).map(|()| true),
        Command::Simulate(args) => cmd_simulate(args),
        Command::PlotExport(args) => cmd_plot_export(args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
