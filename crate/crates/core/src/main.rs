//! Command-line front end. Results go to stdout (or `--out`); failures print
//! one JSON record `{"error": kind, "message": text}` on stderr and exit 1.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use linkdiv::cli_io::{
    emit_plot_data, load_survival_csv, run_pipeline, IngestConfig, PlotKind, PlotParams, PointRule,
    Report, RunConfig, Source,
};
use linkdiv::copula::{
    check_dependence_symmetry, dependence_divergence, normalized_dependence_index, CopulaModel,
};
use linkdiv::divergence::{
    check_gll_symmetry, check_survival_link_symmetry, jeffreys, kl_generic, Direction,
    DEFAULT_SYMMETRY_TOL,
};
use linkdiv::fitting::FitConfig;
use linkdiv::links::{asymmetric_pw_density, RealLink, UnitLink, DEFAULT_TRUNCATION};
use linkdiv::numerics::{Dist, QuadratureSpec};
use linkdiv::{Error, Result};

#[derive(Parser)]
#[command(
    name = "linkdiv",
    version,
    about = "Link models, divergences and subset evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a survival CSV (PBC schema) and print the ingest summary.
    Ingest {
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the subset evaluation pipeline and print the JSON report.
    Eval(EvalArgs),
    /// Divergence between two distributions given as JSON.
    Divergence {
        /// e.g. '{"family":"exponential","rate":1}'
        #[arg(long)]
        p1: String,
        #[arg(long)]
        p2: String,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        /// Report both KL directions and their sum instead.
        #[arg(long)]
        jeffreys: bool,
    },
    /// Forward/reverse symmetry check for a link.
    Symmetry {
        #[arg(long, value_enum)]
        link: LinkName,
        /// α for po, p for piecewise_uniform, π for power.
        #[arg(long)]
        param: Option<f64>,
        /// Shift for location links.
        #[arg(long, default_value_t = 1.0)]
        theta: f64,
        #[arg(long, default_value_t = 4.0)]
        dof: f64,
        #[arg(long, default_value_t = 2.0)]
        a1: f64,
        #[arg(long, default_value_t = 2.5)]
        a2: f64,
        #[arg(long, default_value_t = 2.0)]
        n: f64,
        #[arg(long, default_value = "0.5,1,2,3")]
        q_grid: String,
        #[arg(long, default_value_t = DEFAULT_SYMMETRY_TOL)]
        tol: f64,
    },
    /// Dependence divergences of a copula from independence.
    Copula {
        #[arg(long, value_enum)]
        family: CopulaName,
        /// ρ for gaussian, θ for fgm.
        #[arg(long, default_value_t = 0.0)]
        param: f64,
        #[arg(long, default_value = "0.5,1,2")]
        q_grid: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// CSV series for the divergence plots.
    PlotData {
        /// po_ph_curves, ranked_bars or pairwise_hist.
        #[arg(long)]
        kind: String,
        /// Take tables from a saved report instead of the shipped fixture.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Prediction point label within the report.
        #[arg(long, default_value = "absent")]
        point: String,
        /// lo,hi,points for po_ph_curves.
        #[arg(long, default_value = "-4,4,81")]
        grid: String,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EvalArgs {
    /// Fixture CSV; the shipped one when given without a path.
    #[arg(long, num_args = 0..=1, conflicts_with = "fit")]
    fixture: Option<Option<PathBuf>>,
    /// Fit every subset on `--csv`.
    #[arg(long, requires = "csv")]
    fit: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Covariate label toggled 0/1 to form two prediction points.
    #[arg(long)]
    binary: Option<String>,
    /// `median` or comma-separated values.
    #[arg(long, default_value = "median")]
    point: String,
    #[arg(long, default_value = "0.5,1,2,3")]
    q_grid: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the Jensen-Shannon quadrature.
    #[arg(long)]
    no_js: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum LinkName {
    Po,
    PiecewiseUniform,
    Power,
    Probit,
    Logit,
    Laplace,
    StudentT,
    Gumbel,
    AsymmetricPw,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CopulaName {
    Independent,
    Gaussian,
    Fgm,
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidParam(format!("{what}: '{t}': {e}")))
        })
        .collect()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            // A closed reader (e.g. `| head`) is not a failure.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
            r => r?,
        },
    }
    Ok(())
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn need(param: Option<f64>, what: &str) -> Result<f64> {
    param.ok_or_else(|| Error::InvalidParam(format!("--param ({what}) is required")))
}

fn eval(a: EvalArgs) -> Result<()> {
    let q_grid = parse_list(&a.q_grid, "q-grid")?;
    let source = if a.fit {
        let csv = a.csv.clone().expect("clap enforces --csv with --fit");
        let mut ingest = IngestConfig::pbc(csv);
        if a.point != "median" {
            ingest.point_rule = PointRule::Explicit(parse_list(&a.point, "point")?);
        }
        let binary_index = match &a.binary {
            None => None,
            Some(label) => Some(
                ingest
                    .covariates
                    .iter()
                    .position(|c| &c.label == label)
                    .ok_or_else(|| Error::MissingColumn(label.clone()))?,
            ),
        };
        Source::Csv {
            ingest,
            binary_index,
        }
    } else {
        let path = a.fixture.clone().flatten();
        Source::Fixture {
            path,
            binary_feature: a.binary.clone().unwrap_or_else(|| "z2".into()),
        }
    };
    let config = RunConfig {
        source,
        q_grid,
        seed: a.seed,
        fit: FitConfig::default(),
        compute_js: !a.no_js,
    };
    let report = run_pipeline(&config)?;
    emit(&report.to_json()?, a.out.as_ref())
}

fn symmetry(
    link: LinkName,
    param: Option<f64>,
    theta: f64,
    (dof, a1, a2, n): (f64, f64, f64, f64),
    q_grid: &[f64],
    tol: f64,
) -> Result<String> {
    let spec = QuadratureSpec::default();
    let unit = |l: Result<UnitLink>| -> Result<String> {
        pretty(&check_survival_link_symmetry(&l?, q_grid, tol, &spec)?)
    };
    let real = |l: RealLink| -> Result<String> {
        pretty(&check_gll_symmetry(&l, theta, q_grid, tol, &spec)?)
    };
    match link {
        LinkName::Po => unit(UnitLink::po(need(param, "alpha")?)),
        LinkName::PiecewiseUniform => unit(UnitLink::piecewise_uniform(need(param, "p")?)),
        LinkName::Power => unit(UnitLink::power(need(param, "pi")?)),
        LinkName::Probit => real(RealLink::Probit),
        LinkName::Logit => real(RealLink::Logit),
        LinkName::Laplace => real(RealLink::Laplace),
        LinkName::StudentT => real(RealLink::student_t(dof)?),
        LinkName::Gumbel => real(RealLink::Gumbel),
        LinkName::AsymmetricPw => {
            real(asymmetric_pw_density(theta, a1, a2, n, DEFAULT_TRUNCATION)?)
        }
    }
}

fn copula(family: CopulaName, param: f64, q_grid: &[f64], tol: f64) -> Result<String> {
    let spec = QuadratureSpec::default();
    let cop = match family {
        CopulaName::Independent => CopulaModel::Independent,
        CopulaName::Gaussian => CopulaModel::gaussian(param)?,
        CopulaName::Fgm => CopulaModel::fgm(param)?,
    };
    let mi = dependence_divergence(&cop, 1.0, Direction::Forward, &spec)?;
    let report = check_dependence_symmetry(&cop, q_grid, tol, &spec)?;
    pretty(&json!({
        "copula": cop,
        "mutual_information": mi.value,
        "normalized_index": normalized_dependence_index(&cop, &spec)?,
        "symmetry": report,
    }))
}

fn plot_data(
    kind: &str,
    report: Option<PathBuf>,
    point: &str,
    grid: &str,
    bins: usize,
) -> Result<String> {
    let kind: PlotKind = kind.parse()?;
    let g = parse_list(grid, "grid")?;
    let &[lo, hi, pts] = g.as_slice() else {
        return Err(Error::InvalidParam("grid must be lo,hi,points".into()));
    };
    let table = if kind == PlotKind::PoPhCurves {
        None
    } else {
        let report = match report {
            Some(p) => Report::read(&p)?,
            None => run_pipeline(&RunConfig {
                compute_js: false,
                ..RunConfig::builtin_fixture()
            })?,
        };
        let p = report
            .point(point)
            .ok_or_else(|| Error::InvalidParam(format!("no prediction point '{point}'")))?;
        Some(p.table.clone())
    };
    emit_plot_data(
        kind,
        &PlotParams {
            grid: (lo, hi, pts as usize),
            table,
            bins,
        },
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { csv, out } => {
            let got = load_survival_csv(&IngestConfig::pbc(csv))?;
            emit(&pretty(&got.summary)?, out.as_ref())
        }
        Command::Eval(a) => eval(a),
        Command::Divergence {
            p1,
            p2,
            q,
            jeffreys: both,
        } => {
            let spec = QuadratureSpec::default();
            let d1: Dist = serde_json::from_str(&p1)?;
            let d2: Dist = serde_json::from_str(&p2)?;
            d1.validate()?;
            d2.validate()?;
            let text = if both {
                pretty(&jeffreys(&d1, &d2, &spec)?)?
            } else {
                pretty(&kl_generic(&d1, &d2, q, &spec)?)?
            };
            emit(&text, None)
        }
        Command::Symmetry {
            link,
            param,
            theta,
            dof,
            a1,
            a2,
            n,
            q_grid,
            tol,
        } => {
            let q = parse_list(&q_grid, "q-grid")?;
            emit(
                &symmetry(link, param, theta, (dof, a1, a2, n), &q, tol)?,
                None,
            )
        }
        Command::Copula {
            family,
            param,
            q_grid,
            tol,
        } => emit(
            &copula(family, param, &parse_list(&q_grid, "q-grid")?, tol)?,
            None,
        ),
        Command::PlotData {
            kind,
            report,
            point,
            grid,
            bins,
            out,
        } => {
            let csv = plot_data(&kind, report, &point, &grid, bins)?;
            emit(csv.trim_end(), out.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            eprintln!(
                "{}",
                json!({"error": "Usage", "message": e.to_string().trim()})
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::FAILURE
        }
    }
}
