//! Time integration of the scheme and the run/sweep drivers.

use std::path::{Path, PathBuf};
use std::time::Instant;

use hbolt_core::collision::{CollisionOperator, KernelTable, Reduction};
use hbolt_core::diagnostics::DiagRecord;
use hbolt_core::smoothing::psi_r;
use hbolt_core::stepping::rk4_step;
use hbolt_core::torus::{forward, inverse};
use hbolt_core::{PhysicalField, SpectralField, TorusSpec};
use serde::Serialize;

use crate::config::{RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::io::{self, Checkpoint};

/// Oversampling used to compute the initial Fourier coefficients.
pub const INITIAL_OVERSAMPLE: usize = 4;

/// Largest `2N` the paper's own runs used; anything coarser is labelled as
/// scaled down in the run metadata.
pub const PAPER_MODES: usize = 64;

/// `P_N(f0 psi^R)`: the truncated Fourier series of the cut-off initial
/// datum, its coefficients integrated on a refined grid.
pub fn initial_state(config: &RunConfig, spec: &TorusSpec) -> Result<SpectralField> {
    let datum = config.initial_datum();
    let samples = PhysicalField::sample(*spec, INITIAL_OVERSAMPLE, |v| datum.eval(v) * psi_r(v, spec))?;
    Ok(forward(&samples)?)
}

/// Diagnostics of one run, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub records: Vec<DiagRecord>,
    /// `(R, gamma, N, dt)` of the run.
    pub fingerprint: (f64, f64, usize, f64),
    pub wall_clock_seconds: f64,
}

impl TimeSeries {
    pub fn last(&self) -> Option<&DiagRecord> {
        self.records.last()
    }

    /// Largest `l2_error` over the run, if the run has a reference.
    pub fn max_l2_error(&self) -> Option<f64> {
        self.records
            .iter()
            .map(|r| r.l2_error)
            .try_fold(f64::NEG_INFINITY, |acc, e| e.map(|e| acc.max(e)))
    }
}

/// A run in progress: the spectral state, the step counter and the
/// operator that advances them.
pub struct Simulation {
    config: RunConfig,
    operator: CollisionOperator,
    state: SpectralField,
    step: u64,
}

impl Simulation {
    pub fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let spec = config.spec()?;
        let table = match &config.collision.kernel_table {
            Some(path) => io::load_kernel_table(path, &spec)?,
            None => KernelTable::new(spec),
        };
        Self::with_table(config, table)
    }

    /// Uses a kernel table built elsewhere, e.g. shared across runs.
    pub fn with_table(config: &RunConfig, table: KernelTable) -> Result<Self> {
        let spec = config.spec()?;
        if *table.spec() != spec {
            return Err(Error::Config("kernel table was built for another geometry".into()));
        }
        let reduction = if config.output.deterministic {
            Reduction::Ordered
        } else {
            Reduction::Unordered
        };
        let operator = CollisionOperator::with_table(
            table,
            config.gain_method()?,
            config.quadrature(),
            config.collision.oversample,
        )?
        .with_reduction(reduction);
        Ok(Self {
            state: initial_state(config, &spec)?,
            config: config.clone(),
            operator,
            step: 0,
        })
    }

    /// Continues from a saved state. The time step must match.
    pub fn resume(config: &RunConfig, checkpoint: Checkpoint) -> Result<Self> {
        if checkpoint.dt != config.time.dt {
            return Err(Error::Config(format!(
                "checkpoint was written with dt = {}, config has dt = {}",
                checkpoint.dt, config.time.dt
            )));
        }
        let mut sim = Self::new(config)?;
        checkpoint.field.ensure_same_spec(&sim.state)?;
        sim.state = checkpoint.field;
        sim.step = checkpoint.step;
        Ok(sim)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn operator(&self) -> &CollisionOperator {
        &self.operator
    }

    pub fn state(&self) -> &SpectralField {
        &self.state
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.config.time.dt
    }

    pub fn is_finished(&self) -> bool {
        self.step >= self.config.steps()
    }

    /// `kernel_scale * Q_N^R(f, f)`.
    pub fn rhs(&self, f: &SpectralField) -> Result<SpectralField> {
        Ok(self.operator.q_scheme(f)?.scale(self.config.collision.kernel_scale))
    }

    pub fn advance(&mut self) -> Result<()> {
        let dt = self.config.time.dt;
        let scale = self.config.collision.kernel_scale;
        let next = rk4_step(&self.state, dt, |f| Ok(self.operator.q_scheme(f)?.scale(scale)));
        match next {
            Ok(f) => {
                self.state = f;
                self.step += 1;
                Ok(())
            }
            Err(hbolt_core::Error::NonFinite) => Err(Error::BlowUp {
                t: self.time() + dt,
                last_valid: self.time(),
            }),
            Err(e) => Err(e.into()),
        }
    }

    pub fn record(&self) -> Result<DiagRecord> {
        let t = self.time();
        let record = match self.config.reference() {
            Some(reference) => DiagRecord::compute(t, &self.state, Some(&|v| reference(t, v)))?,
            None => DiagRecord::compute(t, &self.state, None)?,
        };
        Ok(record)
    }

    /// `f(0, 0, v3)` on the `p = 1` grid.
    pub fn slice(&self) -> Result<Vec<(f64, f64)>> {
        let values = inverse(&self.state, 1)?;
        let m = values.grid_size();
        let centre = m / 2;
        Ok((0..m)
            .map(|j| {
                let idx = (centre * m + centre) * m + j;
                (values.coordinate(j), values.samples()[idx])
            })
            .collect())
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            field: self.state.clone(),
            step: self.step,
            t: self.time(),
            dt: self.config.time.dt,
        }
    }
}

/// What a run produced, including a partial series when it blew up.
#[derive(Debug)]
pub struct RunOutcome {
    pub series: TimeSeries,
    pub error: Option<Error>,
}

impl RunOutcome {
    pub fn into_result(self) -> Result<TimeSeries> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.series),
        }
    }
}

/// Steps a simulation to its final time, recording diagnostics every
/// `diag_every` steps and at the end. Snapshot times are served by the
/// nearest step.
pub fn drive(sim: &mut Simulation, mut on_snapshot: impl FnMut(f64, &Simulation) -> Result<()>) -> RunOutcome {
    let start = Instant::now();
    let config = sim.config.clone();
    let dt = config.time.dt;
    let spec = sim.operator.spec();
    let fingerprint = (spec.radius(), spec.gamma(), spec.n(), dt);
    let snapshot_steps: Vec<(f64, u64)> = config
        .output
        .snapshot_times
        .iter()
        .map(|&t| (t, (t / dt).round() as u64))
        .collect();
    let mut records = Vec::new();
    let mut error = None;
    let mut visit = |sim: &Simulation, records: &mut Vec<DiagRecord>| -> Result<()> {
        let step = sim.step;
        if step % config.output.diag_every as u64 == 0 || step == config.steps() {
            let r = sim.record()?;
            if !r.is_finite() {
                return Err(Error::BlowUp {
                    t: r.t,
                    last_valid: records.last().map_or(f64::NAN, |p: &DiagRecord| p.t),
                });
            }
            records.push(r);
        }
        for &(t, s) in &snapshot_steps {
            if s == step {
                on_snapshot(t, sim)?;
            }
        }
        Ok(())
    };
    if let Err(e) = visit(sim, &mut records) {
        error = Some(e);
    }
    while error.is_none() && !sim.is_finished() {
        if let Err(e) = sim.advance().and_then(|_| visit(sim, &mut records)) {
            error = Some(e);
        }
    }
    RunOutcome {
        series: TimeSeries {
            records,
            fingerprint,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
        error,
    }
}

#[derive(Debug, Serialize)]
struct Meta<'a> {
    config: &'a RunConfig,
    radius: f64,
    half_width: f64,
    lambda: f64,
    n: usize,
    gamma: f64,
    gain_method: String,
    steps: u64,
    resumed_from_step: u64,
    wall_clock_seconds: f64,
    scaled_down: bool,
    label: &'a str,
    status: String,
}

/// Runs `sim` to the end and writes `diag.csv`, `slice_t<t>.csv`,
/// `state.bin`, `config.toml` and `meta.json` into `out`.
pub fn run_into(mut sim: Simulation, out: &Path) -> Result<TimeSeries> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let resumed_from_step = sim.step;
    let outcome = drive(&mut sim, |t, s| {
        io::write_slice_csv(&out.join(io::slice_file_name(t)), &s.slice()?)
    });
    let config = sim.config();
    io::write_diag_csv(&out.join("diag.csv"), &outcome.series.records)?;
    let config_path = out.join("config.toml");
    std::fs::write(&config_path, config.to_toml()).map_err(|e| Error::io(&config_path, e))?;
    if outcome.error.is_none() {
        io::write_checkpoint(&out.join("state.bin"), &sim.checkpoint())?;
    }
    let spec = sim.operator().spec();
    let meta = Meta {
        config,
        radius: spec.radius(),
        half_width: spec.half_width(),
        lambda: spec.lambda(),
        n: spec.n(),
        gamma: spec.gamma(),
        gain_method: format!("{:?}", sim.operator().method()),
        steps: sim.step_count(),
        resumed_from_step,
        wall_clock_seconds: outcome.series.wall_clock_seconds,
        scaled_down: spec.side() < PAPER_MODES,
        label: &config.output.label,
        status: match &outcome.error {
            None => "ok".into(),
            Some(e) => e.to_string(),
        },
    };
    let meta_path = out.join("meta.json");
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&meta_path, text).map_err(|e| Error::io(&meta_path, e))?;
    outcome.into_result()
}

/// Runs a configuration, writing outputs when `out` is given.
pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<TimeSeries> {
    let sim = Simulation::new(config)?;
    match out {
        Some(dir) => run_into(sim, dir),
        None => {
            let mut sim = sim;
            drive(&mut sim, |_, _| Ok(())).into_result()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Torus half-width `L`.
    L,
    /// Half-mode count `N`.
    N,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" => Ok(SweepAxis::L),
            "N" => Ok(SweepAxis::N),
            other => Err(Error::Config(format!("sweep axis must be L or N, got `{other}`"))),
        }
    }
}

impl std::fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepAxis::L => "L",
            SweepAxis::N => "N",
        })
    }
}

/// `base` with one parameter replaced.
pub fn with_axis(base: &RunConfig, axis: SweepAxis, value: f64) -> Result<RunConfig> {
    let mut c = base.clone();
    match axis {
        SweepAxis::L => {
            c.domain.radius = None;
            c.domain.half_width = Some(value);
        }
        SweepAxis::N => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(Error::Config(format!("N must be an integer >= 2, got {value}")));
            }
            c.domain.n = value as usize;
        }
    }
    c.validate()?;
    Ok(c)
}

/// One sweep member: its value and either its series or why it failed.
pub type SweepEntry = (f64, Result<TimeSeries>);

/// Runs one configuration per value, in order. Each run writes into
/// `out/<axis>_<value>` when `out` is given, and `out/summary.csv` collects
/// `(value, t, l2_error)`. A failed member does not stop the sweep.
pub fn sweep(base: &RunConfig, axis: SweepAxis, values: &[f64], out: Option<&Path>) -> Result<Vec<SweepEntry>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let configs = values
        .iter()
        .map(|&v| with_axis(base, axis, v))
        .collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::with_capacity(values.len());
    for (&value, mut config) in values.iter().zip(configs) {
        let dir: Option<PathBuf> = out.map(|o| o.join(format!("{axis}_{value}")));
        if let Some(d) = &dir {
            config.output.out_dir = d.clone();
        }
        entries.push((value, run(&config, dir.as_deref())));
    }
    if let Some(o) = out {
        write_summary(&o.join("summary.csv"), axis, &entries)?;
    }
    Ok(entries)
}

pub fn write_summary(path: &Path, axis: SweepAxis, entries: &[SweepEntry]) -> Result<()> {
    use std::io::Write;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut text = format!("{axis},t,l2_error\n");
    for (value, result) in entries {
        if let Ok(series) = result {
            for r in &series.records {
                let e = r.l2_error.map(io::fmt_f64).unwrap_or_default();
                text.push_str(&format!("{},{},{e}\n", io::fmt_f64(*value), io::fmt_f64(r.t)));
            }
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Scenario presets used by the validation suites.
pub fn bkw_config(half_width: f64, n: usize, dt: f64, t_final: f64) -> RunConfig {
    RunConfig::preset(Scenario::BkwMaxwell, half_width, n, dt, t_final)
}

pub fn hard_sphere_config(half_width: f64, n: usize, dt: f64, t_final: f64) -> RunConfig {
    RunConfig::preset(Scenario::TwoGaussianHardSphere, half_width, n, dt, t_final)
}
