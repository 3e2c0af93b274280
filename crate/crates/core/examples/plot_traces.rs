//! Writes an SVG comparing extra-gradient and extra-point on the same noisy
//! problem, plus the CSV of each run.

use stochvi::harness::{
    emit_plot, export_csv, run_experiment, ExperimentConfig, Method, PlotOptions, ProblemKind,
    Series,
};

fn main() -> stochvi::Result<()> {
    let dir = std::env::temp_dir().join("stochvi-plot-example");
    std::fs::create_dir_all(&dir)?;
    let mut series = Vec::new();
    for method in [Method::ExtraGradient, Method::ExtraPoint, Method::ExtraMomentum] {
        let mut c = ExperimentConfig {
            seed: Some(8),
            replications: 20,
            iters: Some(300),
            method,
            ..ExperimentConfig::default()
        };
        c.problem.kind = ProblemKind::Synthetic;
        c.problem.sigma2 = 0.01;
        let run = run_experiment(&c)?;
        export_csv(&run.rows, &dir.join(format!("{method}.csv")))?;
        series.push(Series::new(method.name(), run.rows.iter().map(|r| r.mean_dist_sq).collect()));
    }
    let svg = dir.join("comparison.svg");
    emit_plot(
        &series,
        &svg,
        &PlotOptions {
            title: "quadratic saddle, 20 runs".into(),
            ..PlotOptions::default()
        },
    )?;
    println!("wrote {}", svg.display());
    Ok(())
}
