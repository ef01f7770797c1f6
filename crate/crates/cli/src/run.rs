//! Trajectory and sweep runs and their CSV / JSON tables.

use horizon_spin::channel::channel_report;
use horizon_spin::kinematics::{integrate_worldline, MomentumState};
use horizon_spin::wigner::{accumulate_history, closed_form_history};
use horizon_spin::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ConfigError, RunConfig, SweepAxis};

/// One output row. Field order is the column order of the CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub kind: &'static str,
    pub index: usize,
    pub tau: f64,
    pub t: f64,
    #[serde(rename = "t_over_M")]
    pub t_over_m: f64,
    pub r: f64,
    #[serde(rename = "r_over_M")]
    pub r_over_m: f64,
    #[serde(rename = "T")]
    pub kruskal_t: f64,
    #[serde(rename = "X")]
    pub kruskal_x: f64,
    pub beta: f64,
    pub d11_re: f64,
    pub d11_im: f64,
    pub d12_re: f64,
    pub d12_im: f64,
    pub d21_re: f64,
    pub d21_im: f64,
    pub d22_re: f64,
    pub d22_im: f64,
    pub unitarity_dev: f64,
    pub p: f64,
    pub q: f64,
    pub trace_out: f64,
    pub entropy_paper: f64,
    pub entropy_normalized: f64,
    pub bitflip_distance: f64,
    pub bitflip_lambda: f64,
    pub closed_form_distance: f64,
}

pub const VALUE_COLUMNS: [&str; 25] = [
    "tau",
    "t",
    "t_over_M",
    "r",
    "r_over_M",
    "T",
    "X",
    "beta",
    "d11_re",
    "d11_im",
    "d12_re",
    "d12_im",
    "d21_re",
    "d21_im",
    "d22_re",
    "d22_im",
    "unitarity_dev",
    "p",
    "q",
    "trace_out",
    "entropy_paper",
    "entropy_normalized",
    "bitflip_distance",
    "bitflip_lambda",
    "closed_form_distance",
];

impl Row {
    pub fn values(&self) -> [f64; 25] {
        [
            self.tau,
            self.t,
            self.t_over_m,
            self.r,
            self.r_over_m,
            self.kruskal_t,
            self.kruskal_x,
            self.beta,
            self.d11_re,
            self.d11_im,
            self.d12_re,
            self.d12_im,
            self.d21_re,
            self.d21_im,
            self.d22_re,
            self.d22_im,
            self.unitarity_dev,
            self.p,
            self.q,
            self.trace_out,
            self.entropy_paper,
            self.entropy_normalized,
            self.bitflip_distance,
            self.bitflip_lambda,
            self.closed_form_distance,
        ]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryOutput {
    pub config: RunConfig,
    pub samples: Vec<Row>,
    pub summary: Row,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub sweep_axis: String,
    pub sweep_value: f64,
    #[serde(flatten)]
    pub summary: Row,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepOutput {
    pub config: RunConfig,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] Error),
    #[error("sweep point {axis} = {value}: {source}")]
    SweepPoint {
        axis: SweepAxis,
        value: f64,
        #[source]
        source: Box<RunError>,
    },
}

/// Integrates the configured worldline and tabulates the running Wigner map
/// and its channel diagnostics at every sample.
pub fn run_trajectory(config: &RunConfig) -> Result<TrajectoryOutput, RunError> {
    config.validate()?;
    let m = config.mass;
    let worldline = integrate_worldline(config.r_start * m, config.r_end * m, config.alpha0, m, config.n_steps)?;
    let mom = MomentumState::from_rapidity(config.alpha0, m)?;
    let maps = accumulate_history(&worldline, &mom)?;
    let closed = closed_form_history(&worldline, &mom)?;

    let mut samples = Vec::with_capacity(worldline.len());
    for (i, ((s, d), c)) in worldline.iter().zip(&maps).zip(&closed).enumerate() {
        let report = channel_report(d).map_err(|e| Error::AtSample {
            index: i,
            source: Box::new(e),
        })?;
        let [d11, d12, d21, d22] = d.entries();
        samples.push(Row {
            kind: "sample",
            index: i,
            tau: s.proper_time,
            t: s.t(),
            t_over_m: s.t() / m,
            r: s.r(),
            r_over_m: s.r() / m,
            kruskal_t: s.kruskal_t,
            kruskal_x: s.kruskal_x,
            beta: s.beta,
            d11_re: d11.re,
            d11_im: d11.im,
            d12_re: d12.re,
            d12_im: d12.im,
            d21_re: d21.re,
            d21_im: d21.im,
            d22_re: d22.re,
            d22_im: d22.im,
            unitarity_dev: report.unitarity_dev,
            p: report.params.p,
            q: report.params.q,
            trace_out: report.trace_out,
            entropy_paper: report.entropy_paper,
            entropy_normalized: report.entropy_normalized,
            bitflip_distance: report.bitflip_distance,
            bitflip_lambda: report.bitflip_lambda,
            closed_form_distance: d.distance(c),
        });
    }
    let mut summary = samples.last().cloned().expect("a validated worldline has samples");
    summary.kind = "summary";
    Ok(TrajectoryOutput {
        config: config.clone(),
        samples,
        summary,
    })
}

/// Runs one trajectory per sweep value on a pool of `config.workers` threads.
/// Rows come back ordered by sweep value.
pub fn run_sweep(config: &RunConfig) -> Result<SweepOutput, RunError> {
    config.validate()?;
    let axis = config
        .sweep_axis
        .ok_or_else(|| ConfigError::Invalid("sweep mode needs sweep_axis".into()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ConfigError::Invalid(format!("cannot start {} workers: {e}", config.workers)))?;
    let results: Vec<Result<SweepRow, RunError>> = pool.install(|| {
        config
            .sweep_values
            .par_iter()
            .map(|&value| {
                let point = config.with_axis(axis, value)?;
                let out = run_trajectory(&point).map_err(|e| RunError::SweepPoint {
                    axis,
                    value,
                    source: Box::new(e),
                })?;
                Ok(SweepRow {
                    sweep_axis: axis.to_string(),
                    sweep_value: value,
                    summary: out.summary,
                })
            })
            .collect()
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    rows.sort_by(|a, b| a.sweep_value.total_cmp(&b.sweep_value));
    Ok(SweepOutput {
        config: config.clone(),
        rows,
    })
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_line(prefix: &[String], row: &Row) -> String {
    let mut cells: Vec<String> = prefix.to_vec();
    cells.push(row.kind.to_string());
    cells.push(row.index.to_string());
    cells.extend(row.values().iter().map(|&x| number(x)));
    cells.join(",")
}

const CSV_NOTE: &str = "# geometric units G = c = 1; entropies in bits (log base 2)";

pub fn trajectory_csv(out: &TrajectoryOutput) -> String {
    let mut lines = vec![CSV_NOTE.to_string()];
    lines.push(
        ["kind", "index"]
            .iter()
            .chain(VALUE_COLUMNS.iter())
            .copied()
            .collect::<Vec<_>>()
            .join(","),
    );
    for row in out.samples.iter().chain(std::iter::once(&out.summary)) {
        lines.push(csv_line(&[], row));
    }
    lines.join("\n") + "\n"
}

pub fn sweep_csv(out: &SweepOutput) -> String {
    let mut lines = vec![CSV_NOTE.to_string()];
    lines.push(
        ["sweep_axis", "sweep_value", "kind", "index"]
            .iter()
            .chain(VALUE_COLUMNS.iter())
            .copied()
            .collect::<Vec<_>>()
            .join(","),
    );
    for row in &out.rows {
        lines.push(csv_line(
            &[row.sweep_axis.clone(), number(row.sweep_value)],
            &row.summary,
        ));
    }
    lines.join("\n") + "\n"
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output tables serialize") + "\n"
}
