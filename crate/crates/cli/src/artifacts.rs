//! File-shaped stage boundaries: CSV data artifacts, JSON sidecars, and the
//! run manifest.
//!
//! All numeric CSV fields use Rust's shortest round-trip float formatting,
//! so identical runs produce byte-identical files and parsing them back
//! loses nothing. Schemas:
//!
//! * `faces.csv`  — `face_id,center_x,center_y,normal_x,normal_y,length`
//! * `times.csv`  — `time_index,t`
//! * `trace_*.csv` — `face_id,time_index,u,f`, time-major row order
//! * `sweep_*.csv` — `tau,sqrt_tau,sign_J,log_abs_J,h_est_pointwise`
//! * `oracle_*.csv` — gap columns per τ (see [`ORACLE_HEADER`])
//! * `hull_vertices.csv` — `vertex_id,x,y` (counterclockwise)
//! * `balls.csv` — `ball_id,center_x,center_y,radius`

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use heatprobe::forward::BoundaryTrace;
use heatprobe::grid::BoundaryFaceSet;
use heatprobe::indicator::{IndicatorSample, SupportFit};
use heatprobe::probes::Probe;

use crate::{io_err, CliError, CliResult};

pub const FACES_FILE: &str = "faces.csv";
pub const TIMES_FILE: &str = "times.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const RECONSTRUCTION_FILE: &str = "reconstruction.json";
pub const HULL_FILE: &str = "hull_vertices.csv";
pub const BALLS_FILE: &str = "balls.csv";
pub const OVERLAY_FILE: &str = "overlay.svg";

pub const ORACLE_HEADER: &str = "tau,sqrt_tau,gap_boundary,gap_energy,part_gradR,part_R,\
                                 part_gradv,part_v,cavity_weight,bridge_residual_rel";

pub fn trace_file(tag: &str, tau_index: usize, reference: bool) -> String {
    let role = if reference { "ref" } else { "meas" };
    format!("trace_{tag}_t{tau_index:02}_{role}.csv")
}

pub fn sweep_file(tag: &str) -> String {
    format!("sweep_{tag}.csv")
}

pub fn fit_file(tag: &str) -> String {
    format!("fit_{tag}.json")
}

pub fn oracle_file(tag: &str) -> String {
    format!("oracle_{tag}.csv")
}

pub fn sweep_plot_file(tag: &str) -> String {
    format!("sweep_{tag}.svg")
}

/// Write via a sibling temp file + rename so a crashed run never leaves a
/// half-written artifact that `--resume` would trust.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(|e| io_err(&format!("write {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path).map_err(|e| io_err(&format!("rename to {}", path.display()), e))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Boundary traces
// ---------------------------------------------------------------------------

pub fn write_faces_csv(path: &Path, faces: &BoundaryFaceSet) -> CliResult<()> {
    let mut out = String::from("face_id,center_x,center_y,normal_x,normal_y,length\n");
    for (id, f) in faces.iter().enumerate() {
        out.push_str(&format!(
            "{id},{},{},{},{},{}\n",
            f.center.x, f.center.y, f.normal.x, f.normal.y, f.length
        ));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_times_csv(path: &Path, times: &[f64]) -> CliResult<()> {
    let mut out = String::from("time_index,t\n");
    for (k, t) in times.iter().enumerate() {
        out.push_str(&format!("{k},{t}\n"));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_trace_csv(path: &Path, trace: &BoundaryTrace) -> CliResult<()> {
    let nf = trace.faces.len();
    let mut out = String::with_capacity(24 * nf * trace.times.len());
    out.push_str("face_id,time_index,u,f\n");
    for (k, (u_row, f_row)) in trace.u.iter().zip(&trace.f).enumerate() {
        for id in 0..nf {
            out.push_str(&format!("{id},{k},{},{}\n", u_row[id], f_row[id]));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Rebuild a [`BoundaryTrace`] from a trace CSV plus the body-derived face
/// set and time nodes. The row order is validated strictly so externally
/// produced data either matches the schema or fails loudly.
pub fn read_trace_csv(
    path: &Path,
    faces: &BoundaryFaceSet,
    times: &[f64],
    tau: f64,
) -> CliResult<BoundaryTrace> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_err(&format!("read {}", path.display()), e))?;
    let nf = faces.len();
    let mut u = vec![vec![0.0f64; nf]; times.len()];
    let mut f = vec![vec![0.0f64; nf]; times.len()];
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "face_id,time_index,u,f" {
        return Err(CliError::Config(format!(
            "{}: unexpected header {header:?}",
            path.display()
        )));
    }
    let mut rows = 0usize;
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = |name: &str| -> CliResult<&str> {
            cols.next().ok_or_else(|| {
                CliError::Config(format!(
                    "{} line {}: missing column {name}",
                    path.display(),
                    lineno + 2
                ))
            })
        };
        let parse_err = |what: &str| {
            CliError::Config(format!(
                "{} line {}: bad {what}",
                path.display(),
                lineno + 2
            ))
        };
        let id: usize = next("face_id")?.parse().map_err(|_| parse_err("face_id"))?;
        let k: usize = next("time_index")?
            .parse()
            .map_err(|_| parse_err("time_index"))?;
        let uv: f64 = next("u")?.parse().map_err(|_| parse_err("u"))?;
        let fv: f64 = next("f")?.parse().map_err(|_| parse_err("f"))?;
        if id >= nf || k >= times.len() {
            return Err(CliError::Config(format!(
                "{} line {}: indices ({id}, {k}) outside {nf} faces x {} nodes",
                path.display(),
                lineno + 2,
                times.len()
            )));
        }
        u[k][id] = uv;
        f[k][id] = fv;
        rows += 1;
    }
    if rows != nf * times.len() {
        return Err(CliError::Config(format!(
            "{}: {rows} data rows, expected {}",
            path.display(),
            nf * times.len()
        )));
    }
    Ok(BoundaryTrace {
        tau,
        times: times.to_vec(),
        faces: faces.clone(),
        u,
        f,
    })
}

// ---------------------------------------------------------------------------
// Sweeps and fits
// ---------------------------------------------------------------------------

pub fn write_sweep_csv(path: &Path, samples: &[IndicatorSample]) -> CliResult<()> {
    let mut out = String::from("tau,sqrt_tau,sign_J,log_abs_J,h_est_pointwise\n");
    for s in samples {
        let h_point = s
            .support_estimate_pointwise()
            .map(|h| format!("{h}"))
            .unwrap_or_else(|_| "nan".to_string());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.tau,
            s.tau.sqrt(),
            s.sign,
            s.log_abs_j,
            h_point
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Probe family, for artifact routing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Directional,
    Point,
}

/// Regression sidecar for one probe's τ-sweep: everything the
/// reconstruction stage may use.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FitRecord {
    pub tag: String,
    pub kind: ProbeKind,
    /// The probe, parameterized at the sweep's first τ.
    pub probe: Probe,
    /// τ values with usable samples, ascending.
    pub taus: Vec<f64>,
    /// Per-τ detection verdicts (aligned with `taus`).
    pub detected_per_tau: Vec<bool>,
    /// The three-parameter regression, if it could run.
    pub fit: Option<SupportFit>,
    /// Sweep-level verdict: a fit exists and every sample cleared the
    /// detection floor.
    pub detected: bool,
    /// Support estimate (directional probes with a fit).
    pub h_est: Option<f64>,
    /// Distance estimate (point probes with a fit).
    pub d_est: Option<f64>,
    /// τ values whose traces were missing (listed and skipped).
    pub skipped_taus: Vec<f64>,
    /// τ values whose indicator vanished (no regression possible there).
    pub degenerate_taus: Vec<f64>,
}

pub fn write_fit_json(path: &Path, record: &FitRecord) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(record)
        .map_err(|e| CliError::Config(format!("serialize {}: {e}", path.display())))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn read_fit_json(path: &Path) -> CliResult<FitRecord> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| io_err(&format!("read {}", path.display()), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// One stage's completion record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageRecord {
    pub seconds: f64,
    /// Artifact files (relative to the output directory), sorted.
    pub artifacts: Vec<String>,
}

/// Run identity and per-stage artifact inventory, at
/// `<out>/manifest.json`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config_sha256: String,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn path(out: &Path) -> PathBuf {
        out.join(MANIFEST_FILE)
    }

    pub fn load(out: &Path) -> CliResult<Option<RunManifest>> {
        let path = Self::path(out);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| io_err(&format!("read {}", path.display()), e))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Record a finished stage and save. Every listed artifact must exist —
    /// the manifest is a completion certificate, not a plan.
    pub fn record_stage(
        &mut self,
        out: &Path,
        stage: &str,
        seconds: f64,
        mut artifacts: Vec<String>,
    ) -> CliResult<()> {
        artifacts.sort();
        artifacts.dedup();
        for a in &artifacts {
            if !out.join(a).exists() {
                return Err(CliError::Config(format!(
                    "stage {stage} claims artifact {a} which does not exist"
                )));
            }
        }
        self.stages
            .insert(stage.to_string(), StageRecord { seconds, artifacts });
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("serialize manifest: {e}")))?;
        text.push('\n');
        write_atomic(&Self::path(out), text.as_bytes())
    }
}

/// Open (or start) the manifest for this config in `out`.
///
/// A `--resume` against a directory holding a *different* config's
/// artifacts is refused: mixing runs silently would corrupt the inventory.
/// Without `--resume` a mismatched manifest is replaced — the rerun
/// recomputes everything anyway.
pub fn open_manifest(out: &Path, config_sha256: &str, resume: bool) -> CliResult<RunManifest> {
    match RunManifest::load(out)? {
        Some(m) if m.config_sha256 == config_sha256 => Ok(m),
        Some(m) if resume => Err(CliError::Config(format!(
            "output directory {} holds artifacts for config {} but --resume was given for config {}",
            out.display(),
            &m.config_sha256[..12.min(m.config_sha256.len())],
            &config_sha256[..12]
        ))),
        _ => Ok(RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config_sha256.to_string(),
            stages: BTreeMap::new(),
        }),
    }
}
