//! Run configuration, read from TOML.
//!
//! ```toml
//! scenario = "bkw_maxwell"     # or "two_gaussian_hard_sphere", "custom"
//!
//! [domain]
//! half_width = 12.0            # or radius = ...
//! n = 8                        # half-mode count
//!
//! [time]
//! dt = 0.01
//! t_final = 1.0
//!
//! [collision]
//! gain_method = "auto"         # "direct", "fast"
//! oversample = 2
//!
//! [output]
//! diag_every = 1
//! snapshot_times = [0.0, 0.5, 1.0]
//! out_dir = "out/bkw"
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use hbolt_core::analytic::{bkw, maxwellian, two_gaussian_ic, BkwParams, MaxwellianParams};
use hbolt_core::collision::{GainMethod, GainQuadrature};
use hbolt_core::{TorusSpec, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Maxwell molecules started from the BKW solution, compared against it.
    BkwMaxwell,
    /// Hard spheres started from two displaced Gaussians.
    TwoGaussianHardSphere,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Direct,
    Fast,
    Auto,
}

/// Initial datum for custom runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialDatum {
    Bkw,
    Maxwellian,
    TwoGaussian,
}

impl InitialDatum {
    pub fn eval(self, v: Vec3) -> f64 {
        match self {
            InitialDatum::Bkw => bkw(0.0, v, &BkwParams::default()),
            InitialDatum::Maxwellian => maxwellian(v, &MaxwellianParams::standard()),
            InitialDatum::TwoGaussian => two_gaussian_ic(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Time {
    pub dt: f64,
    pub t_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Collision {
    pub kernel_scale: f64,
    pub gain_method: MethodChoice,
    /// Defaults to a size scaled to `n` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radial_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_degree: Option<usize>,
    pub oversample: usize,
    /// Kernel values dumped by an earlier `kernel-table` run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_table: Option<PathBuf>,
}

impl Default for Collision {
    fn default() -> Self {
        Self {
            kernel_scale: 1.0 / (4.0 * PI),
            gain_method: MethodChoice::Auto,
            radial_nodes: None,
            sphere_degree: None,
            oversample: 2,
            kernel_table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub diag_every: usize,
    pub snapshot_times: Vec<f64>,
    /// Parallel reductions in a fixed order, for bit-identical reruns.
    pub deterministic: bool,
    pub out_dir: PathBuf,
    /// Free-form label copied into the run metadata.
    pub label: String,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            diag_every: 1,
            snapshot_times: Vec::new(),
            deterministic: true,
            out_dir: PathBuf::from("out"),
            label: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// Required for custom runs, ignored otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialDatum>,
    pub domain: Domain,
    pub time: Time,
    #[serde(default)]
    pub collision: Collision,
    #[serde(default)]
    pub output: Output,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Preset scenario with the given geometry and time grid.
    pub fn preset(scenario: Scenario, half_width: f64, n: usize, dt: f64, t_final: f64) -> Self {
        Self {
            scenario,
            initial: None,
            domain: Domain {
                radius: None,
                half_width: Some(half_width),
                n,
                gamma: None,
            },
            time: Time { dt, t_final },
            collision: Collision::default(),
            output: Output::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        match (self.domain.radius, self.domain.half_width) {
            (Some(_), Some(_)) => return bad("give either domain.radius or domain.half_width, not both"),
            (None, None) => return bad("domain.radius or domain.half_width is required"),
            _ => {}
        }
        if self.domain.n < 2 {
            return bad("domain.n must be at least 2");
        }
        if !(self.time.dt > 0.0) {
            return bad("time.dt must be positive");
        }
        if !(self.time.t_final >= self.time.dt) {
            return bad("time.t_final must be at least time.dt");
        }
        if self.collision.oversample == 0 {
            return bad("collision.oversample must be positive");
        }
        if !self.collision.kernel_scale.is_finite() {
            return bad("collision.kernel_scale must be finite");
        }
        if self.output.diag_every == 0 {
            return bad("output.diag_every must be positive");
        }
        if self.scenario == Scenario::Custom {
            if self.initial.is_none() {
                return bad("custom scenario needs `initial`");
            }
            if self.domain.gamma.is_none() {
                return bad("custom scenario needs domain.gamma");
            }
        } else if self.domain.gamma.is_some_and(|g| g != self.preset_gamma()) {
            return bad("domain.gamma is fixed by the scenario");
        }
        if self.collision.gain_method == MethodChoice::Fast {
            let quad = self.quadrature();
            let (radial, degree) = GainQuadrature::minimums(self.domain.n);
            if quad.radial().len() < radial || quad.sphere_degree() < degree {
                return bad("fast gain quadrature below the minimum for this n");
            }
        }
        self.spec().map(|_| ()).map_err(|e| Error::Config(e.to_string()))
    }

    fn preset_gamma(&self) -> f64 {
        match self.scenario {
            Scenario::BkwMaxwell => 0.0,
            Scenario::TwoGaussianHardSphere => 1.0,
            Scenario::Custom => self.domain.gamma.unwrap_or(0.0),
        }
    }

    pub fn gamma(&self) -> f64 {
        self.domain.gamma.unwrap_or_else(|| self.preset_gamma())
    }

    pub fn spec(&self) -> hbolt_core::Result<TorusSpec> {
        match (self.domain.radius, self.domain.half_width) {
            (Some(r), _) => TorusSpec::new(r, self.domain.n, self.gamma()),
            (None, Some(l)) => TorusSpec::from_half_width(l, self.domain.n, self.gamma()),
            (None, None) => Err(hbolt_core::Error::InvalidSpec("no radius or half-width")),
        }
    }

    pub fn quadrature(&self) -> GainQuadrature {
        let fallback = self
            .spec()
            .map(|s| GainQuadrature::recommended(&s))
            .unwrap_or_else(|_| GainQuadrature::new(16, 17));
        GainQuadrature::new(
            self.collision.radial_nodes.unwrap_or(fallback.radial().len()),
            self.collision.sphere_degree.unwrap_or(fallback.sphere_degree()),
        )
    }

    pub fn gain_method(&self) -> hbolt_core::Result<GainMethod> {
        Ok(match self.collision.gain_method {
            MethodChoice::Direct => GainMethod::Direct,
            MethodChoice::Fast => GainMethod::Fast,
            MethodChoice::Auto => GainMethod::auto(&self.spec()?, &self.quadrature()),
        })
    }

    pub fn initial_datum(&self) -> InitialDatum {
        match self.scenario {
            Scenario::BkwMaxwell => InitialDatum::Bkw,
            Scenario::TwoGaussianHardSphere => InitialDatum::TwoGaussian,
            Scenario::Custom => self.initial.unwrap_or(InitialDatum::Maxwellian),
        }
    }

    /// Exact solution to compare against, when one is known.
    pub fn reference(&self) -> Option<fn(f64, Vec3) -> f64> {
        match (self.scenario, self.initial) {
            (Scenario::BkwMaxwell, _) => Some(bkw_reference),
            (Scenario::Custom, Some(InitialDatum::Maxwellian)) => Some(maxwellian_reference),
            _ => None,
        }
    }

    /// Number of steps; `t_final` is rounded to a whole number of steps.
    pub fn steps(&self) -> u64 {
        (self.time.t_final / self.time.dt).round() as u64
    }
}

fn bkw_reference(t: f64, v: Vec3) -> f64 {
    bkw(t, v, &BkwParams::default())
}

fn maxwellian_reference(_t: f64, v: Vec3) -> f64 {
    maxwellian(v, &MaxwellianParams::standard())
}
