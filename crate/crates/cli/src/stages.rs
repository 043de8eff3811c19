//! The four pipeline stages and the `all` driver.
//!
//! * `forward` — simulate the cavity body and the cavity-free reference for
//!   every (probe, τ) pair; write boundary-trace CSVs. The only stage that
//!   is expensive, hence the only one with a worker pool and `--resume`.
//! * `indicator` — read trace pairs back, subtract, evaluate `J(τ)`, run the
//!   `log|J| = 2h√τ + μ log τ + c` regression per probe, apply the
//!   detection rule; write sweep CSVs and fit sidecars. Works from recorded
//!   boundary data and the body section only.
//! * `oracle` — stationary cross-check: for every (probe, τ), both gap
//!   computation paths, the energy parts, the analytic cavity weight, and
//!   (where traces exist) the time-domain bridge residual.
//! * `reconstruct` — combine detected directional fits into a half-plane
//!   intersection hull and detected point fits into a ball-complement
//!   enclosure; write `reconstruction.json` and an overlay figure. Reads
//!   the hidden truth only *after* the estimate is finished, to grade it.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use heatprobe::elliptic::{ntd_gap_energy, verify_basic_identity};
use heatprobe::forward::simulate;
use heatprobe::geometry::{Shape, Vec2};
use heatprobe::grid::{boundary_faces_of_grid, BoundaryFaceSet};
use heatprobe::indicator::{
    compute_indicator, detection_scale, is_detected, regress_support, IndicatorSample,
};
use heatprobe::probes::Probe;
use heatprobe::reconstruct::{
    ball_complement_enclosure, halfplane_intersection, BallEnclosure, HullEstimate, SupportEntry,
    SupportTable,
};
use heatprobe::Error as CoreError;

use crate::artifacts::{
    self, open_manifest, FitRecord, ProbeKind, RunManifest, BALLS_FILE, FACES_FILE, HULL_FILE,
    OVERLAY_FILE, RECONSTRUCTION_FILE, TIMES_FILE,
};
use crate::config::{self, LoadedConfig, RunConfig};
use crate::svg;
use crate::{CliError, CliResult};

/// The outer-boundary face set as the measurement apparatus knows it —
/// built from the body rectangle and grid alone, never from a cavity mask.
fn apparatus_faces(c: &RunConfig) -> BoundaryFaceSet {
    let n = c.body.grid_n;
    let hx = c.body.rect.width() / n as f64;
    let hy = c.body.rect.height() / n as f64;
    boundary_faces_of_grid(n, c.body.rect.lo, hx, hy)
}

fn solver_err(context: &str, e: CoreError) -> CliError {
    CliError::Solver(format!("{context}: {e}"))
}

/// Later stages refuse to touch an output directory that was not produced
/// by this exact config (or was never initialized by `forward`).
fn require_manifest(out: &Path, sha256: &str) -> CliResult<RunManifest> {
    match RunManifest::load(out)? {
        None => Err(CliError::Config(format!(
            "{} has no manifest — run the forward stage first",
            out.display()
        ))),
        Some(m) if m.config_sha256 != sha256 => Err(CliError::Config(format!(
            "output directory {} holds a run of config {}, not {}",
            out.display(),
            &m.config_sha256[..12.min(m.config_sha256.len())],
            &sha256[..12]
        ))),
        Some(m) => Ok(m),
    }
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

struct ForwardUnit {
    tag: String,
    probe: Probe,
    tau_index: usize,
    tau: f64,
    meas_path: PathBuf,
    ref_path: PathBuf,
}

pub fn cmd_forward(loaded: &LoadedConfig, out: &Path, jobs: usize, resume: bool) -> CliResult<()> {
    let started = Instant::now();
    let c = &loaded.config;
    std::fs::create_dir_all(out)
        .map_err(|e| crate::io_err(&format!("create {}", out.display()), e))?;
    let mut manifest = open_manifest(out, &loaded.sha256, resume)?;

    let cavity_scene = config::scene(c)?;
    let reference_scene = config::body_scene(c)?;
    let time = c.body.time.build(c.body.final_time)?;
    let faces = apparatus_faces(c);

    artifacts::write_faces_csv(&out.join(FACES_FILE), &faces)?;
    artifacts::write_times_csv(&out.join(TIMES_FILE), time.nodes())?;
    let mut artifact_names = vec![FACES_FILE.to_string(), TIMES_FILE.to_string()];

    // Enumerate every (probe, τ) simulation pair.
    let mut units = Vec::new();
    for job in config::all_jobs(c, c.probes.taus[0])? {
        for (ti, &tau) in c.probes.taus.iter().enumerate() {
            let meas_name = artifacts::trace_file(&job.tag, ti, false);
            let ref_name = artifacts::trace_file(&job.tag, ti, true);
            artifact_names.push(meas_name.clone());
            artifact_names.push(ref_name.clone());
            let meas_path = out.join(&meas_name);
            let ref_path = out.join(&ref_name);
            if resume && meas_path.exists() && ref_path.exists() {
                continue;
            }
            units.push(ForwardUnit {
                tag: job.tag.clone(),
                probe: job
                    .probe
                    .with_tau(tau)
                    .map_err(|e| CliError::Config(format!("probe {}: {e}", job.tag)))?,
                tau_index: ti,
                tau,
                meas_path,
                ref_path,
            });
        }
    }
    let total = units.len();
    let total_pairs = (artifact_names.len() - 2) / 2;
    if total < total_pairs {
        eprintln!(
            "forward: resuming, {} of {total_pairs} trace pairs already on disk",
            total_pairs - total
        );
    }

    // Coarse worker pool: each unit is two full PDE solves, so a shared
    // atomic job index over `--jobs` threads is all the scheduling needed.
    let next = AtomicUsize::new(0);
    let done = AtomicUsize::new(0);
    let failures: Mutex<Vec<String>> = Mutex::new(Vec::new());
    let workers = jobs.max(1).min(total.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= total {
                    break;
                }
                let unit = &units[i];
                let run = || -> CliResult<()> {
                    let meas = simulate(
                        &cavity_scene,
                        c.body.grid_n,
                        &unit.probe,
                        &c.body.profile,
                        &time,
                        &c.body.solver,
                    )
                    .map_err(|e| solver_err("measurement run", e))?;
                    artifacts::write_trace_csv(&unit.meas_path, &meas)?;
                    let reference = simulate(
                        &reference_scene,
                        c.body.grid_n,
                        &unit.probe,
                        &c.body.profile,
                        &time,
                        &c.body.solver,
                    )
                    .map_err(|e| solver_err("reference run", e))?;
                    artifacts::write_trace_csv(&unit.ref_path, &reference)?;
                    Ok(())
                };
                match run() {
                    Ok(()) => {
                        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                        eprintln!(
                            "forward: {} tau {} (t{:02}) done [{d}/{total}]",
                            unit.tag, unit.tau, unit.tau_index
                        );
                    }
                    Err(e) => failures
                        .lock()
                        .expect("failure list lock")
                        .push(format!("{} tau {}: {e}", unit.tag, unit.tau)),
                }
            });
        }
    });
    let failures = failures.into_inner().expect("failure list lock");
    if !failures.is_empty() {
        // Completed trace files stay on disk for --resume.
        return Err(CliError::Solver(format!(
            "{} of {total} forward units failed:\n  {}",
            failures.len(),
            failures.join("\n  ")
        )));
    }

    manifest.record_stage(
        out,
        "forward",
        started.elapsed().as_secs_f64(),
        artifact_names,
    )
}

// ---------------------------------------------------------------------------
// indicator
// ---------------------------------------------------------------------------

pub fn cmd_indicator(loaded: &LoadedConfig, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let c = &loaded.config;
    let mut manifest = require_manifest(out, &loaded.sha256)?;

    let time = c.body.time.build(c.body.final_time)?;
    let nodes = time.nodes();
    let faces = apparatus_faces(c);
    let mut artifact_names = Vec::new();

    for job in config::all_jobs(c, c.probes.taus[0])? {
        let kind = match job.probe {
            Probe::Directional { .. } => ProbeKind::Directional,
            Probe::Point { .. } => ProbeKind::Point,
        };
        let mut samples: Vec<IndicatorSample> = Vec::new();
        let mut taus_used = Vec::new();
        let mut detected_per_tau = Vec::new();
        let mut skipped_taus = Vec::new();
        let mut degenerate_taus = Vec::new();

        for (ti, &tau) in c.probes.taus.iter().enumerate() {
            let meas_path = out.join(artifacts::trace_file(&job.tag, ti, false));
            let ref_path = out.join(artifacts::trace_file(&job.tag, ti, true));
            if !meas_path.exists() || !ref_path.exists() {
                eprintln!(
                    "indicator: {} tau {tau}: trace files missing, skipping this tau",
                    job.tag
                );
                skipped_taus.push(tau);
                continue;
            }
            let probe_t = job
                .probe
                .with_tau(tau)
                .map_err(|e| CliError::Config(format!("probe {}: {e}", job.tag)))?;
            let meas = artifacts::read_trace_csv(&meas_path, &faces, nodes, tau)?;
            let reference = artifacts::read_trace_csv(&ref_path, &faces, nodes, tau)?;
            let diff = meas
                .subtract(&reference)
                .map_err(|e| solver_err("trace subtraction", e))?;
            let sample = compute_indicator(&diff, &probe_t, &c.body.profile)
                .map_err(|e| solver_err("indicator", e))?;
            let scale = detection_scale(&probe_t, &faces, &c.body.profile, c.body.final_time)
                .map_err(|e| solver_err("detection scale", e))?;
            if sample.sign == 0 {
                degenerate_taus.push(tau);
            }
            taus_used.push(tau);
            detected_per_tau.push(is_detected(&sample, scale));
            samples.push(sample);
        }

        // Fit on the non-degenerate samples; a sweep that lost too many τ
        // values (missing traces or vanished indicators) carries no fit.
        let nonzero: Vec<IndicatorSample> =
            samples.iter().copied().filter(|s| s.sign != 0).collect();
        let fit = if nonzero.len() >= 3 {
            match regress_support(&nonzero) {
                Ok(f) => Some(f),
                Err(e) => {
                    eprintln!("indicator: {}: regression failed ({e}); no fit", job.tag);
                    None
                }
            }
        } else {
            None
        };
        let detected =
            fit.is_some() && !detected_per_tau.is_empty() && detected_per_tau.iter().all(|&d| d);
        let (h_est, d_est) = match (kind, &fit) {
            (ProbeKind::Directional, Some(f)) => (Some(f.h), None),
            (ProbeKind::Point, Some(f)) => (None, Some(-f.h)),
            _ => (None, None),
        };

        let sweep_name = artifacts::sweep_file(&job.tag);
        artifacts::write_sweep_csv(&out.join(&sweep_name), &samples)?;
        let plot_name = artifacts::sweep_plot_file(&job.tag);
        artifacts::write_atomic(
            &out.join(&plot_name),
            svg::sweep_plot(&job.tag, &samples, fit.as_ref()).as_bytes(),
        )?;
        let record = FitRecord {
            tag: job.tag.clone(),
            kind,
            probe: job.probe.clone(),
            taus: taus_used,
            detected_per_tau,
            fit,
            detected,
            h_est,
            d_est,
            skipped_taus,
            degenerate_taus,
        };
        let fit_name = artifacts::fit_file(&job.tag);
        artifacts::write_fit_json(&out.join(&fit_name), &record)?;
        artifact_names.extend([sweep_name, plot_name, fit_name]);

        match (record.detected, record.h_est, record.d_est) {
            (true, Some(h), _) => eprintln!("indicator: {} detected, h_est = {h:.4}", job.tag),
            (true, _, Some(d)) => eprintln!("indicator: {} detected, d_est = {d:.4}", job.tag),
            _ => eprintln!("indicator: {} no detection", job.tag),
        }
    }

    manifest.record_stage(
        out,
        "indicator",
        started.elapsed().as_secs_f64(),
        artifact_names,
    )
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

pub fn cmd_oracle(loaded: &LoadedConfig, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let c = &loaded.config;
    let mut manifest = require_manifest(out, &loaded.sha256)?;

    let scene = config::scene(c)?;
    let mask = scene
        .rasterize(c.body.grid_n)
        .map_err(|e| solver_err("rasterize", e))?;
    let time = c.body.time.build(c.body.final_time)?;
    let nodes = time.nodes();
    let faces = apparatus_faces(c);
    let mut artifact_names = Vec::new();

    for job in config::all_jobs(c, c.probes.taus[0])? {
        let mut rows = String::from(artifacts::ORACLE_HEADER);
        rows.push('\n');
        for (ti, &tau) in c.probes.taus.iter().enumerate() {
            let probe_t = job
                .probe
                .with_tau(tau)
                .map_err(|e| CliError::Config(format!("probe {}: {e}", job.tag)))?;
            let report = ntd_gap_energy(&mask, &c.cavities, &probe_t)
                .map_err(|e| solver_err("stationary gap", e))?;

            // Bridge residual against the recorded measurement, when present.
            let meas_path = out.join(artifacts::trace_file(&job.tag, ti, false));
            let bridge_col = if meas_path.exists() {
                let trace = artifacts::read_trace_csv(&meas_path, &faces, nodes, tau)?;
                let bridge = verify_basic_identity(&trace, &probe_t, &c.body.profile, &mask)
                    .map_err(|e| solver_err("bridge identity", e))?;
                format!("{}", bridge.residual_rel)
            } else {
                String::new()
            };
            rows.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                tau,
                tau.sqrt(),
                report.gap_boundary,
                report.gap_energy,
                report.part_grad_r,
                report.part_r,
                report.part_grad_v,
                report.part_v,
                report.cavity_weight,
                bridge_col
            ));
            eprintln!(
                "oracle: {} tau {tau}: two-path rel error {:.3e}{}",
                job.tag,
                report.two_path_rel_error(),
                if bridge_col.is_empty() {
                    String::new()
                } else {
                    format!(", bridge residual {bridge_col}")
                }
            );
        }
        let name = artifacts::oracle_file(&job.tag);
        artifacts::write_atomic(&out.join(&name), rows.as_bytes())?;
        artifact_names.push(name);
    }

    manifest.record_stage(
        out,
        "oracle",
        started.elapsed().as_secs_f64(),
        artifact_names,
    )
}

// ---------------------------------------------------------------------------
// reconstruct
// ---------------------------------------------------------------------------

/// Sup-distance of support functions between the hull and the union of the
/// true cavity shapes, over a fine direction fan (for convex truth this is
/// the Hausdorff distance; for a union it still grades the convex hull).
fn union_support_distance(hull: &HullEstimate, cavities: &[Shape], n_dirs: usize) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..n_dirs {
        let angle = 2.0 * std::f64::consts::PI * k as f64 / n_dirs as f64;
        let omega = Vec2::new(angle.cos(), angle.sin());
        let truth = cavities
            .iter()
            .map(|s| s.support_raw(omega))
            .fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max((hull.support(omega) - truth).abs());
    }
    worst
}

pub fn cmd_reconstruct(loaded: &LoadedConfig, out: &Path) -> CliResult<()> {
    let started = Instant::now();
    let c = &loaded.config;
    let mut manifest = require_manifest(out, &loaded.sha256)?;
    let mut artifact_names = vec![RECONSTRUCTION_FILE.to_string(), OVERLAY_FILE.to_string()];

    // Collect the indicator stage's verdicts.
    let mut records = Vec::new();
    for job in config::all_jobs(c, c.probes.taus[0])? {
        let path = out.join(artifacts::fit_file(&job.tag));
        if !path.exists() {
            return Err(CliError::Config(format!(
                "{} is missing — run the indicator stage first",
                path.display()
            )));
        }
        records.push(artifacts::read_fit_json(&path)?);
    }

    let dir_records: Vec<&FitRecord> = records
        .iter()
        .filter(|r| r.kind == ProbeKind::Directional)
        .collect();
    let point_records: Vec<&FitRecord> = records
        .iter()
        .filter(|r| r.kind == ProbeKind::Point)
        .collect();
    let n_dir_detected = dir_records.iter().filter(|r| r.detected).count();
    let n_pt_detected = point_records.iter().filter(|r| r.detected).count();
    let detection = n_dir_detected + n_pt_detected > 0;

    // Half-plane intersection from the detected directional fits.
    let mut hull: Option<HullEstimate> = None;
    let mut suspect_directions = 0usize;
    if n_dir_detected > 0 {
        if n_dir_detected < 3 {
            return Err(CliError::EmptyReconstruction(format!(
                "only {n_dir_detected} directional probe(s) detected the cavity; \
                 a hull needs at least 3 spanning directions"
            )));
        }
        let entries: Vec<SupportEntry> = dir_records
            .iter()
            .filter(|r| r.detected)
            .map(|r| {
                let omega = match r.probe {
                    Probe::Directional { omega, .. } => omega,
                    Probe::Point { .. } => unreachable!("directional record"),
                };
                let fit = r.fit.as_ref().expect("detected record has a fit");
                SupportEntry {
                    omega,
                    h_est: r.h_est.expect("directional record has h_est"),
                    detected: true,
                    residual_norm: fit.residual_norm,
                    n_samples: fit.n_samples,
                }
            })
            .collect();
        let table = SupportTable::new(c.body.rect, entries)
            .map_err(|e| CliError::Config(format!("support table: {e}")))?;
        suspect_directions = table.exceeds_body.iter().filter(|&&b| b).count();
        if suspect_directions > 0 {
            eprintln!(
                "reconstruct: {suspect_directions} directional estimate(s) exceed the body's \
                 own support — kept, but suspect"
            );
        }
        let estimate = match halfplane_intersection(&table) {
            Ok(h) => h,
            Err(e @ CoreError::EmptyIntersection { .. }) => {
                return Err(CliError::EmptyReconstruction(e.to_string()))
            }
            Err(e @ CoreError::InvalidInput(_)) => {
                return Err(CliError::EmptyReconstruction(e.to_string()))
            }
            Err(e) => return Err(solver_err("half-plane intersection", e)),
        };
        artifacts::write_atomic(&out.join(HULL_FILE), estimate.vertices_csv().as_bytes())?;
        artifact_names.push(HULL_FILE.to_string());
        eprintln!(
            "reconstruct: hull from {n_dir_detected} directions, {} vertices, area {:.4}",
            estimate.vertices.len(),
            estimate.area()
        );
        hull = Some(estimate);
    }

    // Ball-complement enclosure from the detected point fits.
    let mut enclosure: Option<BallEnclosure> = None;
    if n_pt_detected > 0 {
        let mut balls = Vec::new();
        for r in point_records.iter().filter(|r| r.detected) {
            let p = match r.probe {
                Probe::Point { p, .. } => p,
                Probe::Directional { .. } => unreachable!("point record"),
            };
            let d = r.d_est.expect("point record has d_est");
            if d < 0.0 {
                eprintln!(
                    "reconstruct: {} estimated a negative distance ({d:.4}); \
                     clamped to 0 (no exclusion)",
                    r.tag
                );
            }
            balls.push((p, d.max(0.0)));
        }
        let enc = match ball_complement_enclosure(c.body.rect, &balls, c.reconstruct.ball_grid_n) {
            Ok(e) => e,
            Err(e @ CoreError::EmptyIntersection { .. }) => {
                return Err(CliError::EmptyReconstruction(e.to_string()))
            }
            Err(e) => return Err(solver_err("ball enclosure", e)),
        };
        let mut rows = String::from("ball_id,center_x,center_y,radius\n");
        for (id, b) in enc.balls.iter().enumerate() {
            rows.push_str(&format!(
                "{id},{},{},{}\n",
                b.center.x, b.center.y, b.radius
            ));
        }
        artifacts::write_atomic(&out.join(BALLS_FILE), rows.as_bytes())?;
        artifact_names.push(BALLS_FILE.to_string());
        eprintln!(
            "reconstruct: {} exclusion ball(s), remaining area {:.4} of {:.4}",
            enc.balls.len(),
            enc.remaining_area(),
            c.body.rect.area()
        );
        enclosure = Some(enc);
    }

    // A rerun that no longer produces a hull or ball set must not leave a
    // previous run's files behind looking current.
    if hull.is_none() {
        let _ = std::fs::remove_file(out.join(HULL_FILE));
    }
    if enclosure.is_none() {
        let _ = std::fs::remove_file(out.join(BALLS_FILE));
    }

    if !detection {
        eprintln!("reconstruct: no probe detected a cavity; reporting a clean body");
    }

    // Grade the finished estimate against the configured truth, if any.
    let hausdorff = match (&hull, c.cavities.is_empty()) {
        (Some(h), false) => Some(union_support_distance(h, &c.cavities, 4096)),
        _ => None,
    };

    let report = serde_json::json!({
        "detection": detection,
        "directional_probes": {
            "total": dir_records.len(),
            "detected": n_dir_detected,
            "suspect": suspect_directions,
        },
        "point_probes": {
            "total": point_records.len(),
            "detected": n_pt_detected,
        },
        "hull": hull.as_ref().map(|h| {
            serde_json::json!({
                "n_vertices": h.vertices.len(),
                "area": h.area(),
                "vertices": h.vertices.iter().map(|v| vec![v.x, v.y]).collect::<Vec<_>>(),
            })
        }),
        "remaining_area": enclosure.as_ref().map(|e| e.remaining_area()),
        "hausdorff_to_truth": hausdorff,
    });
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Config(format!("serialize reconstruction report: {e}")))?;
    text.push('\n');
    artifacts::write_atomic(&out.join(RECONSTRUCTION_FILE), text.as_bytes())?;

    let overlay = svg::overlay(&c.body.rect, &c.cavities, hull.as_ref(), enclosure.as_ref());
    artifacts::write_atomic(&out.join(OVERLAY_FILE), overlay.as_bytes())?;

    manifest.record_stage(
        out,
        "reconstruct",
        started.elapsed().as_secs_f64(),
        artifact_names,
    )
}

// ---------------------------------------------------------------------------
// all
// ---------------------------------------------------------------------------

pub fn cmd_all(loaded: &LoadedConfig, out: &Path, jobs: usize, resume: bool) -> CliResult<()> {
    cmd_forward(loaded, out, jobs, resume)?;
    cmd_indicator(loaded, out)?;
    if loaded.config.oracle_cross_check {
        cmd_oracle(loaded, out)?;
    } else {
        eprintln!("all: oracle cross-check disabled in the config, skipping");
    }
    cmd_reconstruct(loaded, out)
}
