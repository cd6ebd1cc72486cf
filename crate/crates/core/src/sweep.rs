//! Parameter sweeps over the reduced-parameter space: grid evaluation of the
//! correlation measures, CSV emission, critical-temperature bisection and the
//! oracle-verification mode behind the CLI's `--verify` flag.

use std::io::Write;
use std::path::PathBuf;

use serde::Deserialize;

use crate::correlations::{analyze, discord_oracle, gr2_discord, gr2_entanglement, Measured};
use crate::dynamics::{build_dynamics, extract_bipartition, lyapunov_cm, spectral_cm, Bipartition};
use crate::error::{Error, Result};
use crate::gaussian::{TwoModeCM, PHYSICALITY_TOL};
use crate::model::{mechanical_cm, optical_cm, thermal_occupation, PhysicalParams, ReducedParams};

/// Default mechanical frequency for temperature conversion, rad/s.
pub const DEFAULT_OMEGA_MU: f64 = std::f64::consts::TAU * 947e3;

/// Default verification tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Axis {
    #[serde(rename = "temperature_K")]
    TemperatureK,
    #[serde(rename = "cooperativity")]
    Cooperativity,
    #[serde(rename = "n_th")]
    NTh,
    #[serde(rename = "squeezing")]
    Squeezing,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::TemperatureK => "temperature_K",
            Axis::Cooperativity => "cooperativity",
            Axis::NTh => "n_th",
            Axis::Squeezing => "squeezing",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "temperature_K" => Ok(Axis::TemperatureK),
            "cooperativity" => Ok(Axis::Cooperativity),
            "n_th" => Ok(Axis::NTh),
            "squeezing" => Ok(Axis::Squeezing),
            other => Err(Error::validation(
                "axis",
                format!("unknown axis {other:?}; expected temperature_K, cooperativity, n_th or squeezing"),
            )),
        }
    }

    fn default_range(&self) -> RangeSpec {
        match self {
            Axis::TemperatureK => RangeSpec { start: 1e-5, stop: 1e-1, points: 200, spacing: Spacing::Log },
            Axis::Cooperativity => RangeSpec { start: 0.0, stop: 100.0, points: 200, spacing: Spacing::Linear },
            Axis::NTh => RangeSpec { start: 0.0, stop: 50.0, points: 200, spacing: Spacing::Linear },
            Axis::Squeezing => RangeSpec { start: 0.0, stop: 3.0, points: 200, spacing: Spacing::Linear },
        }
    }

    /// The reduced parameter this axis drives (temperature drives `n_th`).
    fn driven_param(&self) -> SeriesParam {
        match self {
            Axis::TemperatureK | Axis::NTh => SeriesParam::NTh,
            Axis::Cooperativity => SeriesParam::Coop,
            Axis::Squeezing => SeriesParam::R,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// `(start, stop, points)` with linear or log spacing.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl RangeSpec {
    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::validation("range.points", format!("need at least 2, got {}", self.points)));
        }
        if self.start.is_nan() || self.stop.is_nan() || self.start >= self.stop {
            return Err(Error::validation(
                "range.start",
                format!("start must be < stop, got {} >= {}", self.start, self.stop),
            ));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err(Error::validation(
                "range.start",
                format!("log spacing needs start > 0, got {}", self.start),
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::validation("range", "bounds must be finite".to_string()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let denom = (n - 1) as f64;
        match self.spacing {
            Spacing::Linear => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / denom)
                .collect(),
            Spacing::Log => {
                let (a, b) = (self.start.ln(), self.stop.ln());
                (0..n).map(|i| (a + (b - a) * i as f64 / denom).exp()).collect()
            }
        }
    }
}

/// Overlay parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum SeriesParam {
    #[serde(rename = "gamma_ratio")]
    GammaRatio,
    #[serde(rename = "coop", alias = "cooperativity")]
    Coop,
    #[serde(rename = "nth", alias = "n_th")]
    NTh,
    #[serde(rename = "r", alias = "squeezing")]
    R,
}

impl SeriesParam {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesParam::GammaRatio => "gamma_ratio",
            SeriesParam::Coop => "coop",
            SeriesParam::NTh => "nth",
            SeriesParam::R => "r",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gamma_ratio" | "gamma-ratio" => Ok(SeriesParam::GammaRatio),
            "coop" | "cooperativity" => Ok(SeriesParam::Coop),
            "nth" | "n_th" => Ok(SeriesParam::NTh),
            "r" | "squeezing" => Ok(SeriesParam::R),
            other => Err(Error::validation(
                "series.param",
                format!("unknown parameter {other:?}; expected gamma_ratio, coop, nth or r"),
            )),
        }
    }

    fn apply(&self, rp: &mut ReducedParams, value: f64) {
        match self {
            SeriesParam::GammaRatio => rp.gamma_ratio = value,
            SeriesParam::Coop => rp.cooperativity = value,
            SeriesParam::NTh => rp.n_th = value,
            SeriesParam::R => rp.r = value,
        }
    }
}

/// One overlay parameter and the values to draw one line per.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub param: SeriesParam,
    pub values: Vec<f64>,
}

/// Optional per-field overrides of the base reduced parameters.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedOverrides {
    pub gamma_ratio: Option<f64>,
    pub coop: Option<f64>,
    pub nth: Option<f64>,
    pub r: Option<f64>,
}

/// Output selection: a CSV path and any number of SVG panels.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub svg: Vec<SvgPanel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SvgPanel {
    pub measure: String,
    pub path: PathBuf,
}

/// Sweep description as read from a JSON config file; CLI flags override
/// individual fields before resolution.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Option<Axis>,
    pub range: Option<RangeSpec>,
    #[serde(default)]
    pub fixed: FixedOverrides,
    pub series: Option<SeriesSpec>,
    pub physical: Option<PhysicalParams>,
    pub omega_mu: Option<f64>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub verify: bool,
    pub tol: Option<f64>,
}

impl SweepConfig {
    /// Parses a JSON document, reporting the path of the offending field on
    /// failure.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::ConfigParse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub(crate) fn resolve(&self) -> Result<ResolvedSweep> {
        let axis = self.axis.ok_or_else(|| {
            Error::validation(
                "axis",
                "required; one of temperature_K, cooperativity, n_th, squeezing",
            )
        })?;
        let range = self.range.unwrap_or_else(|| axis.default_range());
        range.validate()?;

        // base parameters: defaults, then the physical block, then overrides
        let mut base = ReducedParams { gamma_ratio: 0.01, cooperativity: 34.0, n_th: 0.0, r: 1.0 };
        let mut omega_mu = DEFAULT_OMEGA_MU;
        if let Some(physical) = &self.physical {
            base = crate::model::reduce(physical)?;
            omega_mu = physical.omega_mu;
        }
        if let Some(v) = self.fixed.gamma_ratio {
            base.gamma_ratio = v;
        }
        if let Some(v) = self.fixed.coop {
            base.cooperativity = v;
        }
        if let Some(v) = self.fixed.nth {
            base.n_th = v;
        }
        if let Some(v) = self.fixed.r {
            base.r = v;
        }
        if let Some(v) = self.omega_mu {
            omega_mu = v;
        }
        if omega_mu <= 0.0 || !omega_mu.is_finite() {
            return Err(Error::validation("omega_mu", format!("must be finite and > 0, got {omega_mu}")));
        }
        base.validate()
            .map_err(|e| prefix_validation(e, "fixed"))?;

        let (series_param, series_values) = match &self.series {
            Some(series) => {
                if series.values.is_empty() {
                    return Err(Error::validation("series.values", "must not be empty".to_string()));
                }
                if series.param == axis.driven_param() {
                    return Err(Error::validation(
                        "series.param",
                        format!("{} is already driven by the {} axis", series.param.name(), axis.name()),
                    ));
                }
                for (i, v) in series.values.iter().enumerate() {
                    let mut probe = base;
                    series.param.apply(&mut probe, *v);
                    probe
                        .validate()
                        .map_err(|e| prefix_validation(e, &format!("series.values[{i}]")))?;
                }
                (series.param, series.values.clone())
            }
            // the placeholder series must not collide with the swept quantity
            None => match axis.driven_param() {
                SeriesParam::R => (SeriesParam::NTh, vec![base.n_th]),
                _ => (SeriesParam::R, vec![base.r]),
            },
        };

        // axis values must land in the validity range too
        for (i, v) in range.values().iter().enumerate() {
            if axis == Axis::TemperatureK {
                if *v < 0.0 {
                    return Err(Error::validation(
                        format!("range[{i}]"),
                        format!("temperature must be >= 0, got {v}"),
                    ));
                }
            } else {
                let mut probe = base;
                axis.driven_param().apply(&mut probe, *v);
                probe
                    .validate()
                    .map_err(|e| prefix_validation(e, &format!("range[{i}]")))?;
            }
        }

        if let Some(tol) = self.tol {
            if tol <= 0.0 || !tol.is_finite() {
                return Err(Error::validation("tol", format!("must be finite and > 0, got {tol}")));
            }
        }
        for (i, panel) in self.outputs.svg.iter().enumerate() {
            Measure::parse(&panel.measure)
                .map_err(|e| prefix_validation(e, &format!("outputs.svg[{i}]")))?;
        }

        Ok(ResolvedSweep {
            axis,
            axis_values: range.values(),
            log_axis: range.spacing == Spacing::Log,
            series_param,
            series_values,
            base,
            omega_mu,
        })
    }

    /// Validates without running.
    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// Axis name, log-scale flag and series label for plot annotation.
    pub fn panel_context(&self) -> Result<(&'static str, bool, &'static str)> {
        let resolved = self.resolve()?;
        Ok((resolved.axis.name(), resolved.log_axis, resolved.series_param.name()))
    }
}

fn prefix_validation(e: Error, prefix: &str) -> Error {
    match e {
        Error::Validation { path, message } => Error::Validation {
            path: format!("{prefix}.{path}"),
            message,
        },
        other => other,
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ResolvedSweep {
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub log_axis: bool,
    pub series_param: SeriesParam,
    pub series_values: Vec<f64>,
    pub base: ReducedParams,
    pub omega_mu: f64,
}

impl ResolvedSweep {
    fn params_at(&self, series_value: f64, axis_value: f64) -> Result<ReducedParams> {
        let mut rp = self.base;
        self.series_param.apply(&mut rp, series_value);
        match self.axis {
            Axis::TemperatureK => rp.n_th = thermal_occupation(self.omega_mu, axis_value)?,
            other => other.driven_param().apply(&mut rp, axis_value),
        }
        rp.validate()?;
        Ok(rp)
    }
}

/// One output row; columns in CSV order.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub axis_value: f64,
    pub series_value: f64,
    pub n_th: f64,
    pub e2_m: f64,
    pub e2_op: f64,
    pub d2_m: f64,
    pub d2_op: f64,
    pub i2_m: f64,
    pub i2_op: f64,
    pub det_v3_m: f64,
    pub det_v3_op: f64,
    pub nu_minus_m: f64,
    pub nu_minus_op: f64,
}

pub const CSV_HEADER: &str = "axis,series,n_th,e2_m,e2_op,d2_m,d2_op,i2_m,i2_op,det_v3_m,det_v3_op,nu_minus_m,nu_minus_op";

impl SweepRow {
    pub fn measure(&self, m: Measure) -> f64 {
        match m {
            Measure::E2M => self.e2_m,
            Measure::E2Op => self.e2_op,
            Measure::D2M => self.d2_m,
            Measure::D2Op => self.d2_op,
            Measure::I2M => self.i2_m,
            Measure::I2Op => self.i2_op,
            Measure::DetV3M => self.det_v3_m,
            Measure::DetV3Op => self.det_v3_op,
            Measure::NuMinusM => self.nu_minus_m,
            Measure::NuMinusOp => self.nu_minus_op,
        }
    }
}

/// A plottable column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    E2M,
    E2Op,
    D2M,
    D2Op,
    I2M,
    I2Op,
    DetV3M,
    DetV3Op,
    NuMinusM,
    NuMinusOp,
}

impl Measure {
    pub fn name(&self) -> &'static str {
        match self {
            Measure::E2M => "e2_m",
            Measure::E2Op => "e2_op",
            Measure::D2M => "d2_m",
            Measure::D2Op => "d2_op",
            Measure::I2M => "i2_m",
            Measure::I2Op => "i2_op",
            Measure::DetV3M => "det_v3_m",
            Measure::DetV3Op => "det_v3_op",
            Measure::NuMinusM => "nu_minus_m",
            Measure::NuMinusOp => "nu_minus_op",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "e2_m" => Ok(Measure::E2M),
            "e2_op" => Ok(Measure::E2Op),
            "d2_m" => Ok(Measure::D2M),
            "d2_op" => Ok(Measure::D2Op),
            "i2_m" => Ok(Measure::I2M),
            "i2_op" => Ok(Measure::I2Op),
            "det_v3_m" => Ok(Measure::DetV3M),
            "det_v3_op" => Ok(Measure::DetV3Op),
            "nu_minus_m" => Ok(Measure::NuMinusM),
            "nu_minus_op" => Ok(Measure::NuMinusOp),
            other => Err(Error::validation(
                "measure",
                format!("unknown measure {other:?}; expected one of the CSV columns"),
            )),
        }
    }
}

fn evaluate_point(rp: &ReducedParams, context: &str) -> Result<(f64, SweepRow)> {
    let mech = mechanical_cm(rp)?;
    let opt = optical_cm(rp)?;
    let mech_report = analyze(&mech)?;
    let opt_report = analyze(&opt)?;
    for report in [&mech_report, &opt_report] {
        if report.nu_minus < 0.5 - PHYSICALITY_TOL {
            return Err(Error::NonPhysical { nu_minus: report.nu_minus, context: context.to_string() });
        }
    }
    Ok((
        rp.n_th,
        SweepRow {
            axis_value: 0.0,
            series_value: 0.0,
            n_th: rp.n_th,
            e2_m: mech_report.e2,
            e2_op: opt_report.e2,
            d2_m: mech_report.d2_a_given_b,
            d2_op: opt_report.d2_a_given_b,
            i2_m: mech_report.i2,
            i2_op: opt_report.i2,
            det_v3_m: mech_report.det_v3,
            det_v3_op: opt_report.det_v3,
            nu_minus_m: mech_report.nu_minus,
            nu_minus_op: opt_report.nu_minus,
        },
    ))
}

/// Evaluates the full grid, one row per `(series value, axis value)` pair,
/// series-major and axis-minor; deterministic.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let resolved = cfg.resolve()?;
    let mut rows = Vec::with_capacity(resolved.series_values.len() * resolved.axis_values.len());
    for &series_value in &resolved.series_values {
        for &axis_value in &resolved.axis_values {
            let context = format!(
                "{} = {axis_value}, {} = {series_value}",
                resolved.axis.name(),
                resolved.series_param.name()
            );
            let rp = resolved.params_at(series_value, axis_value)?;
            let (_, mut row) = evaluate_point(&rp, &context)?;
            row.axis_value = axis_value;
            row.series_value = series_value;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// 17-significant-digit decimal formatting, stable across runs. Negative
/// zero is canonicalised so `r = 0` rows print an unsigned zero.
fn fmt17(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Writes the rows as UTF-8 CSV with the fixed header and 17 significant
/// digits per value.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: &mut W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let fields = [
            row.axis_value,
            row.series_value,
            row.n_th,
            row.e2_m,
            row.e2_op,
            row.d2_m,
            row.d2_op,
            row.i2_m,
            row.i2_op,
            row.det_v3_m,
            row.det_v3_op,
            row.nu_minus_m,
            row.nu_minus_op,
        ];
        let line: Vec<String> = fields.iter().map(|v| fmt17(*v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV is ASCII"))
}

fn entanglement_at(
    rp_base: &ReducedParams,
    which: Bipartition,
    omega_mu: f64,
    temperature: f64,
) -> Result<f64> {
    let mut rp = *rp_base;
    rp.n_th = thermal_occupation(omega_mu, temperature)?;
    let cm = match which {
        Bipartition::Mechanical => mechanical_cm(&rp)?,
        Bipartition::Optical => optical_cm(&rp)?,
    };
    gr2_entanglement(&cm)
}

const CRITICAL_TEMPERATURE_REL_TOL: f64 = 1e-4;

/// Smallest temperature at which the selected bipartition's entanglement has
/// died, located by bisection on a bracket `(t_low, t_high)` with
/// `e2(t_low) > 0` and `e2(t_high) = 0`. The monotone decay of `e2` with
/// temperature is asserted on the bracket before bisecting; a violation flags
/// a model bug rather than being silently accepted.
pub fn critical_temperature(
    rp_base: &ReducedParams,
    which: Bipartition,
    omega_mu: f64,
    bracket: (f64, f64),
) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo >= 0.0 && lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Bracket(format!("invalid bracket ({lo}, {hi})")));
    }
    let e_lo = entanglement_at(rp_base, which, omega_mu, lo)?;
    if e_lo <= 0.0 {
        return Err(Error::Bracket(format!("e2({lo} K) = {e_lo}; need e2 > 0 at the bracket start")));
    }
    let e_hi = entanglement_at(rp_base, which, omega_mu, hi)?;
    if e_hi > 0.0 {
        return Err(Error::Bracket(format!("e2({hi} K) = {e_hi}; need e2 = 0 at the bracket end")));
    }

    // spot-check monotone decay across the bracket (log-spaced when possible)
    let samples = 17;
    let mut previous = f64::INFINITY;
    for i in 0..samples {
        let f = i as f64 / (samples - 1) as f64;
        let t = if lo > 0.0 {
            (lo.ln() + (hi.ln() - lo.ln()) * f).exp()
        } else {
            lo + (hi - lo) * f
        };
        let e = entanglement_at(rp_base, which, omega_mu, t)?;
        if e > previous + 1e-12 {
            return Err(Error::MonotonicityViolation(format!(
                "e2 rose from {previous} to {e} at T = {t} K"
            )));
        }
        previous = e;
    }

    while hi - lo > CRITICAL_TEMPERATURE_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if entanglement_at(rp_base, which, omega_mu, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Worst absolute deviation between two standard-form CMs, with the name of
/// the offending field.
pub fn cm_deviation(a: &TwoModeCM, b: &TwoModeCM) -> (f64, &'static str) {
    let candidates = [
        ((a.nu1 - b.nu1).abs(), "nu1"),
        ((a.nu2 - b.nu2).abs(), "nu2"),
        ((a.nu3 - b.nu3).abs(), "nu3"),
        ((a.nu3p - b.nu3p).abs(), "nu3p"),
    ];
    candidates
        .into_iter()
        .max_by(|x, y| x.0.partial_cmp(&y.0).expect("finite deviations"))
        .expect("non-empty")
}

/// Where and how badly a verification quantity deviated worst.
#[derive(Debug, Clone, Default)]
pub struct WorstDeviation {
    pub value: f64,
    pub context: String,
}

impl WorstDeviation {
    fn update(&mut self, value: f64, context: impl Fn() -> String) {
        if value > self.value {
            self.value = value;
            self.context = context();
        }
    }
}

/// Outcome of [`verify`]: maxima of the oracle-vs-closed-form deviations over
/// the grid.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub points: usize,
    pub tol: f64,
    pub lyapunov: WorstDeviation,
    pub spectral: WorstDeviation,
    pub discord: WorstDeviation,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.lyapunov.value <= self.tol && self.spectral.value <= self.tol && self.discord.value <= self.tol
    }

    pub fn summary(&self) -> String {
        let verdict = |v: f64| if v <= self.tol { "ok" } else { "FAIL" };
        format!(
            "verified {} grid points at tol {:.1e}\n  lyapunov  max dev {:.3e} [{}] {}\n  spectral  max dev {:.3e} [{}] {}\n  discord   max dev {:.3e} [{}] {}",
            self.points,
            self.tol,
            self.lyapunov.value,
            self.lyapunov.context,
            verdict(self.lyapunov.value),
            self.spectral.value,
            self.spectral.context,
            verdict(self.spectral.value),
            self.discord.value,
            self.discord.context,
            verdict(self.discord.value),
        )
    }
}

/// Recomputes every grid point through the dynamical oracles (Lyapunov and
/// spectral) and the measurement-optimising discord oracle, reporting the
/// worst absolute deviations from the closed forms.
pub fn verify(cfg: &SweepConfig, tol: f64) -> Result<VerificationReport> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::validation("tol", format!("must be finite and > 0, got {tol}")));
    }
    let resolved = cfg.resolve()?;
    // below ~1e-10 the closed-form/spectral comparison is dominated by the
    // integration tail anyway, so cap the quadrature effort and let such
    // gates fail as verification failures rather than integration errors
    let quad_tol = (0.01 * tol).clamp(1e-11, 9e-4);
    let oracle_tol = 1e-8;

    let mut report = VerificationReport {
        points: 0,
        tol,
        lyapunov: WorstDeviation::default(),
        spectral: WorstDeviation::default(),
        discord: WorstDeviation::default(),
    };

    for &series_value in &resolved.series_values {
        for &axis_value in &resolved.axis_values {
            let rp = resolved.params_at(series_value, axis_value)?;
            let describe = |what: &str| {
                format!(
                    "{} at {} = {axis_value:.6e}, {} = {series_value:.6e}",
                    what,
                    resolved.axis.name(),
                    resolved.series_param.name()
                )
            };

            let closed_mech = mechanical_cm(&rp)?;
            let closed_opt = optical_cm(&rp)?;
            let dynamics = build_dynamics(&rp)?;

            let lyap = lyapunov_cm(&dynamics)?;
            let spec = spectral_cm(&dynamics, quad_tol)?;
            for (which, closed) in [
                (Bipartition::Mechanical, &closed_mech),
                (Bipartition::Optical, &closed_opt),
            ] {
                let name = match which {
                    Bipartition::Mechanical => "mechanical",
                    Bipartition::Optical => "optical",
                };
                let (dev, field) = cm_deviation(&extract_bipartition(&lyap, which)?, closed);
                report.lyapunov.update(dev, || describe(&format!("{name} {field}")));
                let (dev, field) = cm_deviation(&extract_bipartition(&spec, which)?, closed);
                report.spectral.update(dev, || describe(&format!("{name} {field}")));

                let d2 = gr2_discord(closed, Measured::B)?;
                let oracle = discord_oracle(closed, Measured::B, oracle_tol)?;
                report.discord.update((d2 - oracle).abs(), || describe(&format!("{name} discord")));
            }
            report.points += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{temperature_for_occupation, KB};
    use approx::assert_relative_eq;

    fn fig2_style_config(points: usize, r_values: Vec<f64>) -> SweepConfig {
        SweepConfig {
            axis: Some(Axis::TemperatureK),
            range: Some(RangeSpec { start: 1e-5, stop: 1e-1, points, spacing: Spacing::Log }),
            fixed: FixedOverrides {
                gamma_ratio: Some(0.01),
                coop: Some(34.0),
                nth: None,
                r: None,
            },
            series: Some(SeriesSpec { param: SeriesParam::R, values: r_values }),
            ..SweepConfig::default()
        }
    }

    #[test]
    fn temperature_sweep_without_squeezing_has_no_correlations() {
        let cfg = fig2_style_config(20, vec![0.0, 1.0, 2.0, 3.0]);
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 80);
        // series-major ordering: the first 20 rows belong to r = 0
        for row in &rows[..20] {
            assert_eq!(row.series_value, 0.0);
            assert_eq!(row.e2_m, 0.0);
            assert_eq!(row.e2_op, 0.0);
            assert_eq!(row.d2_m, 0.0);
            assert_eq!(row.d2_op, 0.0);
        }
        for row in &rows[20..] {
            assert!(row.series_value > 0.0);
            assert!(row.d2_m > 0.0);
            assert!(row.d2_op > 0.0);
        }
    }

    #[test]
    fn cooperativity_sweep_starts_unentangled_mechanically() {
        let cfg = SweepConfig {
            axis: Some(Axis::Cooperativity),
            range: Some(RangeSpec { start: 0.0, stop: 100.0, points: 26, spacing: Spacing::Linear }),
            fixed: FixedOverrides { gamma_ratio: Some(0.01), coop: None, nth: Some(0.0), r: Some(2.0) },
            series: Some(SeriesSpec { param: SeriesParam::NTh, values: vec![0.0, 1.0, 10.0] }),
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        for row in rows.iter().filter(|r| r.axis_value == 0.0) {
            // decoupled mirrors: no mechanical cross covariance at all
            assert_eq!(row.e2_m, 0.0);
            assert_eq!(row.det_v3_m, 0.0);
        }
    }

    #[test]
    fn discord_positive_at_tenth_of_a_kelvin() {
        let cfg = fig2_style_config(10, vec![1.0]);
        let rows = run_sweep(&cfg).unwrap();
        let last = rows.last().unwrap();
        assert_relative_eq!(last.axis_value, 0.1, max_relative = 1e-12);
        assert!(last.d2_m > 0.0);
        assert!(last.d2_op > 0.0);
    }

    #[test]
    fn csv_is_deterministic_and_well_formed() {
        let cfg = fig2_style_config(5, vec![0.0, 2.0]);
        let rows1 = run_sweep(&cfg).unwrap();
        let rows2 = run_sweep(&cfg).unwrap();
        let csv1 = csv_string(&rows1).unwrap();
        let csv2 = csv_string(&rows2).unwrap();
        assert_eq!(csv1, csv2);
        let mut lines = csv1.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        assert_eq!(lines.count(), 10);
        // 17 significant digits survive a round trip
        for (txt, row) in csv1.lines().skip(1).zip(&rows1) {
            let first: f64 = txt.split(',').next().unwrap().parse().unwrap();
            assert_eq!(first, row.axis_value);
        }
    }

    #[test]
    fn config_json_round_trip_and_field_paths() {
        let cfg = SweepConfig::from_json(
            r#"{
                "axis": "temperature_K",
                "range": {"start": 1e-5, "stop": 0.1, "points": 50, "spacing": "log"},
                "fixed": {"gamma_ratio": 0.01, "coop": 34.0},
                "series": {"param": "r", "values": [1, 2, 3]},
                "outputs": {"csv": "out.csv", "svg": [{"measure": "e2_m", "path": "panel.svg"}]}
            }"#,
        )
        .unwrap();
        assert!(cfg.validate().is_ok());

        let bad = SweepConfig::from_json(r#"{"axis": "temperature_K", "range": {"start": 1}}"#);
        match bad {
            Err(Error::ConfigParse { path, .. }) => assert!(path.contains("range")),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validation_reports_field_paths() {
        let mut cfg = fig2_style_config(1, vec![1.0]);
        match cfg.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "range.points"),
            other => panic!("expected points validation, got {other:?}"),
        }
        cfg = fig2_style_config(10, vec![1.0]);
        cfg.range.as_mut().unwrap().start = 0.5;
        cfg.range.as_mut().unwrap().stop = 0.1;
        match cfg.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "range.start"),
            other => panic!("expected range validation, got {other:?}"),
        }
        cfg = fig2_style_config(10, vec![-1.0]);
        match cfg.validate() {
            Err(Error::Validation { path, .. }) => assert!(path.starts_with("series.values[0]")),
            other => panic!("expected series validation, got {other:?}"),
        }
        cfg = fig2_style_config(10, vec![1.0]);
        cfg.series = Some(SeriesSpec { param: SeriesParam::NTh, values: vec![1.0] });
        assert!(matches!(cfg.validate(), Err(Error::Validation { .. })));
    }

    #[test]
    fn squeezing_axis_defaults_to_an_occupation_series() {
        let cfg = SweepConfig {
            axis: Some(Axis::Squeezing),
            range: Some(RangeSpec { start: 0.0, stop: 2.0, points: 5, spacing: Spacing::Linear }),
            ..SweepConfig::default()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.series_value == 0.0));
        assert_eq!(rows[0].e2_m, 0.0);
        assert!(rows[4].e2_m > 0.0);
    }

    #[test]
    fn physical_block_feeds_base_parameters() {
        let cfg = SweepConfig::from_json(
            r#"{
                "axis": "temperature_K",
                "range": {"start": 1e-5, "stop": 1e-2, "points": 4, "spacing": "log"},
                "physical": {
                    "omega_mu": 5.9502e6, "m_mu": 1.45e-10, "gamma": 879.6,
                    "l": 2.5e-2, "omega_c": 3.3049e15, "kappa": 1.0807e6,
                    "omega_l": 1.7718e15, "power": 1.5e-3, "temperature": 0.0, "r": 1.0
                },
                "fixed": {"coop": 34.0}
            }"#,
        )
        .unwrap();
        let resolved = cfg.resolve().unwrap();
        // damping ratio comes from the physical block, the override wins for C
        assert_relative_eq!(resolved.base.gamma_ratio, 879.6 / 1.0807e6, max_relative = 1e-12);
        assert_eq!(resolved.base.cooperativity, 34.0);
        assert_eq!(resolved.base.r, 1.0);
        assert_relative_eq!(resolved.omega_mu, 5.9502e6, max_relative = 1e-12);
    }

    #[test]
    fn missing_axis_is_rejected() {
        let cfg = SweepConfig::default();
        match cfg.validate() {
            Err(Error::Validation { path, .. }) => assert_eq!(path, "axis"),
            other => panic!("expected axis validation, got {other:?}"),
        }
    }

    #[test]
    fn default_ranges_fill_in() {
        let cfg = SweepConfig { axis: Some(Axis::TemperatureK), ..SweepConfig::default() };
        let resolved = cfg.resolve().unwrap();
        assert_eq!(resolved.axis_values.len(), 200);
        assert!(resolved.log_axis);
        assert_relative_eq!(resolved.axis_values[0], 1e-5, max_relative = 1e-12);
        assert_relative_eq!(*resolved.axis_values.last().unwrap(), 1e-1, max_relative = 1e-12);
    }

    /// Independent check of the bisection: the entanglement boundary has the
    /// closed-form occupation `n_c = C (1 - e^{-2r}) / (2 (1 + G + G C))` for
    /// the mechanical pair and `n_c = (1 + G + C)(1 - e^{-2r}) / (2 G C)` for
    /// the optical pair; convert back to a temperature and compare.
    #[test]
    fn critical_temperature_matches_analytic_boundary() {
        let rp = ReducedParams::new(0.01, 34.0, 0.0, 2.0).unwrap();
        let omega = DEFAULT_OMEGA_MU;
        let bracket = (1e-5, 1e-1);

        let n_c_mech = 34.0 * (1.0 - (-4.0f64).exp()) / (2.0 * (1.0 + 0.01 + 0.01 * 34.0));
        let t_c_mech = temperature_for_occupation(omega, n_c_mech).unwrap();
        let found = critical_temperature(&rp, Bipartition::Mechanical, omega, bracket).unwrap();
        assert_relative_eq!(found, t_c_mech, max_relative = 3e-4);

        let n_c_opt = (1.0 + 0.01 + 34.0) * (1.0 - (-4.0f64).exp()) / (2.0 * 0.01 * 34.0);
        let t_c_opt = temperature_for_occupation(omega, n_c_opt).unwrap();
        let found_opt = critical_temperature(&rp, Bipartition::Optical, omega, bracket).unwrap();
        assert_relative_eq!(found_opt, t_c_opt, max_relative = 3e-4);

        assert!(found_opt > found);
    }

    #[test]
    fn critical_temperature_rejects_unentangled_bracket() {
        let rp = ReducedParams::new(0.01, 34.0, 0.0, 0.0).unwrap();
        let err = critical_temperature(&rp, Bipartition::Mechanical, DEFAULT_OMEGA_MU, (1e-5, 1e-1));
        assert!(matches!(err, Err(Error::Bracket(_))));
    }

    #[test]
    fn critical_temperature_grows_with_squeezing() {
        let omega = DEFAULT_OMEGA_MU;
        let mut previous = 0.0;
        for r in [1.0, 2.0, 3.0] {
            let rp = ReducedParams::new(0.01, 34.0, 0.0, r).unwrap();
            let t_c = critical_temperature(&rp, Bipartition::Mechanical, omega, (1e-5, 1e-1)).unwrap();
            assert!(t_c > previous, "T_c({r}) = {t_c} did not grow");
            previous = t_c;
        }
    }

    #[test]
    fn verify_small_grid_passes() {
        let mut cfg = fig2_style_config(5, vec![0.0, 2.0]);
        cfg.tol = Some(1e-6);
        let report = verify(&cfg, 1e-6).unwrap();
        assert!(report.pass(), "{}", report.summary());
        assert_eq!(report.points, 10);
    }

    #[test]
    fn corrupted_cm_is_located() {
        let rp = ReducedParams::new(0.01, 34.0, 0.0, 2.0).unwrap();
        let clean = mechanical_cm(&rp).unwrap();
        let mut corrupted = clean;
        corrupted.nu3 += 1e-3;
        let (dev, field) = cm_deviation(&corrupted, &clean);
        assert_eq!(field, "nu3");
        assert_relative_eq!(dev, 1e-3, max_relative = 1e-9);
    }

    #[test]
    fn entanglement_decays_monotonically_with_temperature() {
        let rows = run_sweep(&fig2_style_config(60, vec![1.0, 2.0, 3.0])).unwrap();
        for series in rows.chunks(60) {
            for pair in series.windows(2) {
                assert!(pair[1].e2_m <= pair[0].e2_m + 1e-12);
                assert!(pair[1].e2_op <= pair[0].e2_op + 1e-12);
            }
        }
    }

    #[test]
    fn temperature_grid_uses_bose_conversion() {
        let cfg = fig2_style_config(3, vec![1.0]);
        let rows = run_sweep(&cfg).unwrap();
        for row in rows {
            let expected = thermal_occupation(DEFAULT_OMEGA_MU, row.axis_value).unwrap();
            assert_relative_eq!(row.n_th, expected, max_relative = 1e-12);
        }
        // 0.1 K is deep in the classical regime for a ~MHz mirror
        let n_at_01 = thermal_occupation(DEFAULT_OMEGA_MU, 0.1).unwrap();
        assert_relative_eq!(n_at_01, KB * 0.1 / (crate::model::HBAR * DEFAULT_OMEGA_MU), max_relative = 1e-3);
    }
}
