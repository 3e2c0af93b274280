//! Writing run results to an output directory.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::harness::experiment::{GameExperiment, MethodRun, Summary};
use crate::harness::plot::{emit_plot, PlotOptions, Series};
use crate::harness::trace::{export_csv, write_timings};

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes `<method>.csv`, `<method>_summary.json`, `<method>_timings.csv`
/// and `<method>.svg` into `dir`, returning the paths written.
pub fn write_run_outputs(run: &MethodRun, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = run.method.name();
    let csv = dir.join(format!("{name}.csv"));
    let summary = dir.join(format!("{name}_summary.json"));
    let timings = dir.join(format!("{name}_timings.csv"));
    let svg = dir.join(format!("{name}.svg"));
    export_csv(&run.rows, &csv)?;
    write_json(&run.summary, &summary)?;
    write_timings(&run.mean_wall_time(), BufWriter::new(File::create(&timings)?))?;
    let mut series = vec![Series::new(
        name,
        run.rows.iter().map(|r| r.mean_dist_sq).collect(),
    )];
    if run.rows[0].bound.is_some() {
        series.push(Series::new(
            "bound",
            run.rows.iter().map(|r| r.bound.unwrap_or(f64::NAN)).collect(),
        ));
    }
    emit_plot(
        &series,
        &svg,
        &PlotOptions {
            title: format!("{name}, {} replications", run.summary.replications),
            ..PlotOptions::default()
        },
    )?;
    Ok(vec![csv, summary, timings, svg])
}

#[derive(Serialize)]
struct GameSummary<'a> {
    kappa: f64,
    horizon: usize,
    methods: Vec<&'a Summary>,
}

/// Per-method files plus `game_summary.json`, `game_single_run.svg`
/// (replication 0) and `game_mean.svg` (mean over replications).
pub fn write_game_outputs(exp: &GameExperiment, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for run in &exp.runs {
        written.extend(write_run_outputs(run, dir)?);
    }
    let summary = dir.join("game_summary.json");
    write_json(
        &GameSummary {
            kappa: exp.kappa,
            horizon: exp.horizon,
            methods: exp.runs.iter().map(|r| &r.summary).collect(),
        },
        &summary,
    )?;
    written.push(summary);

    let single: Vec<Series> = exp
        .runs
        .iter()
        .map(|r| {
            let d = r.trace.replications[0].distances.clone().unwrap_or_default();
            Series::new(r.method.name(), d)
        })
        .collect();
    let mean: Vec<Series> = exp
        .runs
        .iter()
        .map(|r| Series::new(r.method.name(), r.rows.iter().map(|x| x.mean_dist_sq).collect()))
        .collect();
    let single_path = dir.join("game_single_run.svg");
    let mean_path = dir.join("game_mean.svg");
    emit_plot(
        &single,
        &single_path,
        &PlotOptions {
            title: format!("one run, kappa = {:.1}", exp.kappa),
            y_label: "d_k".into(),
            ..PlotOptions::default()
        },
    )?;
    let reps = exp.runs.first().map_or(0, |r| r.summary.replications);
    emit_plot(
        &mean,
        &mean_path,
        &PlotOptions {
            title: format!("mean of {reps} runs, kappa = {:.1}", exp.kappa),
            ..PlotOptions::default()
        },
    )?;
    written.push(single_path);
    written.push(mean_path);
    Ok(written)
}
