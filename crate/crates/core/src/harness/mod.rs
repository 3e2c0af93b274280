//! Experiment orchestration: configuration, replicated runs, CSV traces,
//! summaries and SVG plots.

pub mod config;
pub mod experiment;
pub mod output;
pub mod plot;
pub mod trace;

pub use config::{
    BaselineOracle, BatchRule, ExperimentConfig, Method, ParamSource, ParamsConfig, ProblemConfig,
    ProblemKind, ZerothOrderConfig,
};
pub use experiment::{
    bound_column, build_problem, game_experiment, game_horizon, resolve_params, run_experiment,
    run_method, schedule_for, BuiltProblem, GameExperiment, MethodRun, ResolvedParams, Summary,
    GAME_METHODS,
};
pub use output::{write_game_outputs, write_run_outputs};
pub use plot::{emit_plot, render_svg, PlotOptions, Series};
pub use trace::{export_csv, parse_csv, read_csv, write_csv, write_timings, TraceRow};
