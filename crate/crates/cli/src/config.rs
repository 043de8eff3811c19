//! Run configuration: one JSON file describing the experiment.
//!
//! The schema is split into a `body` section (rectangle, grid, time
//! discretization, solver, flux profile — everything the measurement
//! *apparatus* knows) and a `cavities` section (the hidden truth). The
//! truth feeds the forward simulation and the oracle cross-check; the
//! indicator stage never reads it, and the reconstruction stage reads it
//! only after its estimate is finished, to grade the result — so the
//! inversion itself works from the body section and recorded boundary
//! data alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use heatprobe::forward::{SolverOptions, TimeGrid};
use heatprobe::geometry::{Rect, Scene, Shape, Vec2};
use heatprobe::probes::{Probe, TemporalProfile};
use heatprobe::reconstruct::uniform_directions;

use crate::{CliError, CliResult};

/// Everything one run needs, as parsed from the config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub body: BodyConfig,
    pub probes: ProbeConfig,
    /// Hidden cavity shapes; empty list = cavity-free body. Read only by
    /// the forward and oracle stages.
    #[serde(default)]
    pub cavities: Vec<Shape>,
    /// Run the stationary cross-check stage as part of `all`.
    #[serde(default = "default_true")]
    pub oracle_cross_check: bool,
    #[serde(default)]
    pub reconstruct: ReconstructConfig,
    /// Output directory; the `--out` flag overrides it.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

/// The measured body and discretization — no cavity knowledge.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub rect: Rect,
    pub grid_n: usize,
    pub final_time: f64,
    pub time: TimeSpec,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default = "default_profile")]
    pub profile: TemporalProfile,
}

fn default_true() -> bool {
    true
}

fn default_profile() -> TemporalProfile {
    TemporalProfile::ConstOne
}

/// Time grid description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeSpec {
    Uniform {
        steps: usize,
    },
    /// Nodes `t_k = T (k/N)^power`; `power = 2` concentrates steps near
    /// `t = 0` where the `e^{−τt}` weight lives.
    Graded {
        steps: usize,
        power: f64,
    },
}

impl TimeSpec {
    pub fn build(&self, t_final: f64) -> CliResult<TimeGrid> {
        match *self {
            TimeSpec::Uniform { steps } => TimeGrid::uniform(t_final, steps),
            TimeSpec::Graded { steps, power } => TimeGrid::graded(t_final, steps, power),
        }
        .map_err(|e| CliError::Config(format!("time grid: {e}")))
    }
}

/// Probe fan: explicit directions, a uniform fan, point probes, and the
/// shared τ sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default)]
    pub directions: Vec<Vec2>,
    /// Appends `uniform_directions(count)` after the explicit list.
    #[serde(default)]
    pub uniform_directions: Option<usize>,
    #[serde(default)]
    pub points: Vec<Vec2>,
    /// Ascending spectral parameters shared by every probe.
    pub taus: Vec<f64>,
}

/// Reconstruction knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    /// Raster resolution for the ball-complement enclosure.
    pub ball_grid_n: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        ReconstructConfig { ball_grid_n: 128 }
    }
}

/// A probe with its artifact naming tag (`dir03`, `pt00`, …).
#[derive(Clone, Debug)]
pub struct ProbeJob {
    pub tag: String,
    /// Probe at the first τ; re-parameterized per sweep entry.
    pub probe: Probe,
}

/// Parsed, validated configuration plus the identity hash of its file.
pub struct LoadedConfig {
    pub config: RunConfig,
    /// SHA-256 of the exact config file bytes, hex-encoded.
    pub sha256: String,
}

pub fn load(path: &Path) -> CliResult<LoadedConfig> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    validate(&config)?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let sha256 = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect::<String>();
    Ok(LoadedConfig { config, sha256 })
}

fn validate(c: &RunConfig) -> CliResult<()> {
    let cfg = |msg: String| CliError::Config(msg);

    // The scene validator covers rectangle sanity, cavity containment,
    // disjointness, and the positive horizon.
    scene(c)?;
    if c.body.grid_n < 4 {
        return Err(cfg(format!(
            "grid_n must be at least 4, got {}",
            c.body.grid_n
        )));
    }
    c.body.time.build(c.body.final_time)?;
    if !(c.body.solver.cg_tol > 0.0 && c.body.solver.cg_tol.is_finite()) {
        return Err(cfg(format!(
            "solver.cg_tol must be positive, got {}",
            c.body.solver.cg_tol
        )));
    }
    if c.body.solver.cg_max_iter == 0 {
        return Err(cfg("solver.cg_max_iter must be positive".into()));
    }
    c.body
        .profile
        .validate(c.body.final_time)
        .map_err(|e| cfg(format!("profile: {e}")))?;

    if c.probes.taus.is_empty() {
        return Err(cfg("probes.taus must not be empty".into()));
    }
    if !c.probes.taus.windows(2).all(|w| w[1] > w[0]) {
        return Err(cfg("probes.taus must be strictly ascending".into()));
    }
    if !c.probes.taus.iter().all(|t| t.is_finite() && *t > 0.0) {
        return Err(cfg("probes.taus must be positive and finite".into()));
    }
    let n_dirs = c.probes.directions.len() + c.probes.uniform_directions.unwrap_or(0);
    if n_dirs + c.probes.points.len() == 0 {
        return Err(cfg("configure at least one direction or point probe".into()));
    }
    // Constructing every probe front-loads direction/point validation.
    let tau0 = c.probes.taus[0];
    for job in direction_jobs(c, tau0)? {
        job.probe
            .validate_outside(&c.body.rect)
            .map_err(|e| cfg(format!("probe {}: {e}", job.tag)))?;
    }
    for job in point_jobs(c, tau0)? {
        job.probe
            .validate_outside(&c.body.rect)
            .map_err(|e| cfg(format!("probe {}: {e}", job.tag)))?;
    }
    if c.reconstruct.ball_grid_n == 0 {
        return Err(cfg("reconstruct.ball_grid_n must be positive".into()));
    }
    Ok(())
}

/// Scene with the hidden cavities (forward/oracle stages only).
pub fn scene(c: &RunConfig) -> CliResult<Scene> {
    Scene::new(c.body.rect, c.cavities.clone(), c.body.final_time)
        .map_err(|e| CliError::Config(format!("scene: {e}")))
}

/// The cavity-free body as a scene (any stage may use this).
pub fn body_scene(c: &RunConfig) -> CliResult<Scene> {
    Scene::new(c.body.rect, Vec::new(), c.body.final_time)
        .map_err(|e| CliError::Config(format!("body: {e}")))
}

/// All directional probes in configured order, tagged `dir00, dir01, …`,
/// carrying the first τ of the sweep.
pub fn direction_jobs(c: &RunConfig, tau: f64) -> CliResult<Vec<ProbeJob>> {
    let mut dirs = c.probes.directions.clone();
    if let Some(count) = c.probes.uniform_directions {
        dirs.extend(uniform_directions(count));
    }
    dirs.iter()
        .enumerate()
        .map(|(i, &omega)| {
            Ok(ProbeJob {
                tag: format!("dir{i:02}"),
                probe: Probe::directional(omega, tau)
                    .map_err(|e| CliError::Config(format!("direction {i}: {e}")))?,
            })
        })
        .collect()
}

/// All point probes, tagged `pt00, pt01, …`.
pub fn point_jobs(c: &RunConfig, tau: f64) -> CliResult<Vec<ProbeJob>> {
    c.probes
        .points
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            Ok(ProbeJob {
                tag: format!("pt{i:02}"),
                probe: Probe::point(p, tau)
                    .map_err(|e| CliError::Config(format!("point {i}: {e}")))?,
            })
        })
        .collect()
}

/// Every probe job (directions then points).
pub fn all_jobs(c: &RunConfig, tau: f64) -> CliResult<Vec<ProbeJob>> {
    let mut jobs = direction_jobs(c, tau)?;
    jobs.extend(point_jobs(c, tau)?);
    Ok(jobs)
}
