//! Data ingestion, the subset-predictor fixture, the evaluation pipeline, reports
//! and plot data.

pub mod fixture;
pub mod ingest;
pub mod plot;
pub mod report;

pub use fixture::{Fixture, FixturePoint, FixtureRow};
pub use ingest::{
    load_survival_csv, read_survival_csv, CovariateColumn, IngestConfig, IngestSummary, Ingested,
    PointRule, StatusCodes,
};
pub use plot::{emit_plot_data, PlotKind, PlotParams};
pub use report::{
    run_pipeline, DivergenceCurve, PointReport, Report, RunConfig, RunMetadata, Source,
};
