//! Sweep CLI: evaluate Rényi-2 correlation measures over parameter grids,
//! emit CSV tables and SVG line plots, or re-check the closed forms against
//! the dynamical and measurement-optimisation oracles (`--verify`).
//!
//! Exit codes: 0 success, 1 validation failure, 2 verification failure,
//! 3 runtime error.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use optocorr::error::Error;
use optocorr::plot::{emit_plot, PanelSpec};
use optocorr::sweep::{
    csv_string, run_sweep, verify, Axis, Measure, RangeSpec, SeriesParam, SeriesSpec, Spacing,
    SweepConfig, SvgPanel, DEFAULT_TOL,
};

#[derive(Debug, Parser)]
#[command(
    name = "optocorr",
    about = "Steady-state Rényi-2 entanglement and discord sweeps for squeezed-light-driven optomechanical cavity pairs",
    after_help = "Fixed parameters default to gamma_ratio 0.01, cooperativity 34, n_th 0, r 1.\n\
                  Example: optocorr --axis temperature_K --range 1e-5,1e-1,200 --log \\\n\
                      --series r=0,1,2,3 --out-csv sweep.csv --out-svg e2_m=e2_m.svg"
)]
struct Cli {
    /// JSON sweep configuration; flags below override its fields
    config: Option<PathBuf>,

    /// Swept quantity: temperature_K, cooperativity, n_th or squeezing
    #[arg(long)]
    axis: Option<String>,

    /// Sweep range as START,STOP,POINTS
    #[arg(long, value_delimiter = ',', value_name = "START,STOP,POINTS")]
    range: Option<Vec<f64>>,

    /// Space the sweep logarithmically
    #[arg(long)]
    log: bool,

    /// Fixed damping ratio gamma/kappa
    #[arg(long)]
    gamma_ratio: Option<f64>,

    /// Fixed optomechanical cooperativity
    #[arg(long)]
    coop: Option<f64>,

    /// Fixed thermal occupation
    #[arg(long)]
    nth: Option<f64>,

    /// Fixed squeezing parameter
    #[arg(long)]
    r: Option<f64>,

    /// Overlay parameter, e.g. r=0,1,2,3 (one line per value)
    #[arg(long, value_name = "PARAM=V1,V2,...")]
    series: Option<String>,

    /// Mechanical angular frequency (rad/s) for temperature conversion
    #[arg(long)]
    omega_mu: Option<f64>,

    /// Write the sweep table here (stdout when omitted)
    #[arg(long)]
    out_csv: Option<PathBuf>,

    /// Emit an SVG panel, e.g. e2_m=panel.svg (repeatable)
    #[arg(long, value_name = "MEASURE=PATH")]
    out_svg: Vec<String>,

    /// Recompute the grid through the Lyapunov, spectral and
    /// measurement-optimisation oracles instead of sweeping
    #[arg(long)]
    verify: bool,

    /// Verification tolerance
    #[arg(long)]
    tol: Option<f64>,
}

fn parse_series(text: &str) -> Result<SeriesSpec, Error> {
    let (name, values) = text.split_once('=').ok_or_else(|| {
        Error::validation("series", format!("expected PARAM=V1,V2,..., got {text:?}"))
    })?;
    let param = SeriesParam::parse(name.trim())?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim().parse::<f64>().map_err(|_| {
                Error::validation("series", format!("cannot parse series value {v:?}"))
            })
        })
        .collect::<Result<Vec<f64>, Error>>()?;
    Ok(SeriesSpec { param, values })
}

fn parse_svg_panel(text: &str) -> Result<SvgPanel, Error> {
    let (measure, path) = text.split_once('=').ok_or_else(|| {
        Error::validation("out-svg", format!("expected MEASURE=PATH, got {text:?}"))
    })?;
    Measure::parse(measure.trim())?;
    Ok(SvgPanel { measure: measure.trim().to_string(), path: PathBuf::from(path) })
}

fn build_config(cli: &Cli) -> Result<SweepConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => SweepConfig::from_json(&fs::read_to_string(path)?)?,
        None => SweepConfig::default(),
    };

    if let Some(axis) = &cli.axis {
        cfg.axis = Some(Axis::parse(axis)?);
    }
    if let Some(range) = &cli.range {
        if range.len() != 3 {
            return Err(Error::validation(
                "range",
                format!("expected START,STOP,POINTS, got {} value(s)", range.len()),
            ));
        }
        let points = range[2];
        if points.fract() != 0.0 || points < 0.0 {
            return Err(Error::validation(
                "range.points",
                format!("must be a non-negative integer, got {points}"),
            ));
        }
        cfg.range = Some(RangeSpec {
            start: range[0],
            stop: range[1],
            points: points as usize,
            spacing: if cli.log { Spacing::Log } else { Spacing::Linear },
        });
    } else if cli.log {
        if let Some(range) = cfg.range.as_mut() {
            range.spacing = Spacing::Log;
        }
    }
    if let Some(v) = cli.gamma_ratio {
        cfg.fixed.gamma_ratio = Some(v);
    }
    if let Some(v) = cli.coop {
        cfg.fixed.coop = Some(v);
    }
    if let Some(v) = cli.nth {
        cfg.fixed.nth = Some(v);
    }
    if let Some(v) = cli.r {
        cfg.fixed.r = Some(v);
    }
    if let Some(series) = &cli.series {
        cfg.series = Some(parse_series(series)?);
    }
    if let Some(v) = cli.omega_mu {
        cfg.omega_mu = Some(v);
    }
    if let Some(path) = &cli.out_csv {
        cfg.outputs.csv = Some(path.clone());
    }
    for panel in &cli.out_svg {
        cfg.outputs.svg.push(parse_svg_panel(panel)?);
    }
    if cli.verify {
        cfg.verify = true;
    }
    if let Some(tol) = cli.tol {
        cfg.tol = Some(tol);
    }
    cfg.validate()?;
    if let Some(physical) = &cfg.physical {
        for warning in physical.validate()? {
            eprintln!("warning: {warning}");
        }
    }
    Ok(cfg)
}

fn run(cfg: &SweepConfig) -> Result<(), Error> {
    if cfg.verify {
        let report = verify(cfg, cfg.tol.unwrap_or(DEFAULT_TOL))?;
        println!("{}", report.summary());
        if !report.pass() {
            return Err(Error::Validation {
                path: "verification".into(),
                message: "oracle deviation exceeded tolerance".into(),
            });
        }
        return Ok(());
    }

    let rows = run_sweep(cfg)?;
    let csv = csv_string(&rows)?;
    match &cfg.outputs.csv {
        Some(path) => {
            fs::write(path, &csv)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(csv.as_bytes())?;
        }
    }

    let (axis_label, log_axis, series_label) = cfg.panel_context()?;
    for panel in &cfg.outputs.svg {
        let measure = Measure::parse(&panel.measure)?;
        let svg = emit_plot(
            &rows,
            &PanelSpec {
                measure,
                x_log: log_axis,
                axis_label: axis_label.to_string(),
                series_label: series_label.to_string(),
            },
        )?;
        fs::write(&panel.path, svg)?;
        eprintln!("wrote {} panel to {}", panel.measure, panel.path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's help/version go to stdout with success
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };

    match run(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Validation { path, message }) if path == "verification" => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
