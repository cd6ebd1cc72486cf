//! Regenerates the committed plot fixture:
//! `cargo run --example render_golden_panel > tests/golden/temperature_panel_e2m.svg`

use optocorr::plot::{emit_plot, PanelSpec};
use optocorr::sweep::{
    run_sweep, Axis, FixedOverrides, Measure, RangeSpec, SeriesParam, SeriesSpec, Spacing,
    SweepConfig,
};

fn main() {
    let cfg = SweepConfig {
        axis: Some(Axis::TemperatureK),
        range: Some(RangeSpec { start: 1e-5, stop: 1e-1, points: 12, spacing: Spacing::Log }),
        fixed: FixedOverrides { gamma_ratio: Some(0.01), coop: Some(34.0), nth: None, r: None },
        series: Some(SeriesSpec { param: SeriesParam::R, values: vec![0.0, 1.0, 2.0, 3.0] }),
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).expect("sweep");
    let svg = emit_plot(
        &rows,
        &PanelSpec {
            measure: Measure::E2M,
            x_log: true,
            axis_label: "temperature_K".into(),
            series_label: "r".into(),
        },
    )
    .expect("panel");
    print!("{svg}");
}
