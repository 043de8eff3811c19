//! Implicit time stepping for the insulated-cavity heat problem.
//!
//! The forward model on the fluid region `Ω ∖ D̄`:
//!
//! ```text
//! ∂u/∂t = Δu              in (Ω ∖ D̄) × (0, T],
//! ∂u/∂ν = f(x, t)         on ∂Ω        (prescribed flux),
//! ∂u/∂ν = 0               on ∂D        (insulating cavity),
//! u(·, 0) = 0             (or a caller-supplied initial state).
//! ```
//!
//! Space is the finite-volume Laplacian from [`crate::grid`]; time is
//! backward Euler (robust, first order) or Crank–Nicolson (second order).
//! Because the initial data is zero while the flux is not, the solution has
//! a `√t` startup layer; graded time grids `t_j = T (j/N)^q` with `q ≈ 2`
//! spend their steps where that layer lives.
//!
//! The synthetic measurement is the boundary temperature trace: per face,
//! `u_face = u_cell + offset · g_face`, a one-sided reconstruction using the
//! known flux that is exact for fields linear along the face normal.

use serde::{Deserialize, Serialize};

use crate::geometry::Scene;
use crate::grid::{self, BoundaryFaceSet, CellMask, SparseOperator};
use crate::probes::{self, Probe, TemporalProfile};
use crate::{Error, Result};

/// Time integrator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    /// First order, L-stable; damps the startup layer monotonically.
    BackwardEuler,
    /// Second order, A-stable; preferred when the flux profile is smooth.
    CrankNicolson,
}

/// Strictly increasing time nodes `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

impl TimeGrid {
    /// Uniform spacing.
    pub fn uniform(t_final: f64, steps: usize) -> Result<TimeGrid> {
        TimeGrid::graded(t_final, steps, 1.0)
    }

    /// Graded nodes `t_j = T (j/N)^power`; `power = 1` is uniform, `power = 2`
    /// matches the `√t` startup layer of incompatible initial data.
    pub fn graded(t_final: f64, steps: usize, power: f64) -> Result<TimeGrid> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidInput(format!(
                "final time must be positive and finite, got {t_final}"
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidInput(
                "time grid needs at least one step".into(),
            ));
        }
        if !(power.is_finite() && power >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "grading power must be ≥ 1 (1 = uniform), got {power}"
            )));
        }
        let n = steps as f64;
        let mut nodes: Vec<f64> = (0..=steps)
            .map(|j| t_final * (j as f64 / n).powf(power))
            .collect();
        // Guard the endpoints against powf round-off.
        nodes[0] = 0.0;
        nodes[steps] = t_final;
        Ok(TimeGrid { nodes })
    }

    /// Caller-supplied nodes (must start at 0 and increase strictly).
    pub fn from_nodes(nodes: Vec<f64>) -> Result<TimeGrid> {
        if nodes.len() < 2 || nodes[0] != 0.0 {
            return Err(Error::InvalidInput(
                "time grid needs nodes starting at t = 0 and at least one step".into(),
            ));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0] && w[1].is_finite()) {
            return Err(Error::InvalidInput(
                "time grid nodes must be finite and strictly increasing".into(),
            ));
        }
        Ok(TimeGrid { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        *self.nodes.last().expect("time grid is never empty")
    }
}

/// Forward-solver knobs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolverOptions {
    pub scheme: TimeScheme,
    /// Relative CG residual per implicit solve.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            scheme: TimeScheme::BackwardEuler,
            cg_tol: 1e-11,
            cg_max_iter: 50_000,
        }
    }
}

/// Boundary measurement of one forward run: temperature `u` and prescribed
/// flux `f` per time node and outer face. This is the *only* data the
/// indicator stage may see — it carries no cavity information beyond what
/// the physics put into `u`.
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    /// Spectral parameter of the probe that generated the flux (the
    /// indicator must pair the trace with the same `τ`).
    pub tau: f64,
    /// Time nodes, `times[0] = 0`.
    pub times: Vec<f64>,
    /// Outer faces in the fixed perimeter order.
    pub faces: BoundaryFaceSet,
    /// `u[node][face]`: boundary temperature.
    pub u: Vec<Vec<f64>>,
    /// `f[node][face]`: prescribed flux.
    pub f: Vec<Vec<f64>>,
}

impl BoundaryTrace {
    pub fn n_nodes(&self) -> usize {
        self.times.len()
    }

    pub fn t_final(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trace has at least the initial node")
    }

    /// Difference of two measurements of the *same experiment* (same probe,
    /// same τ, same grid, same time nodes): `u ← u − u_ref`, `f ← f − f_ref`.
    ///
    /// Subtracting the cavity-free reference run of the known body removes
    /// the discretization bias common to both runs, leaving the cavity's
    /// contribution; since both runs share the prescribed flux, the
    /// difference trace has `f ≡ 0` and the indicator reduces to its
    /// measurement term.
    pub fn subtract(&self, reference: &BoundaryTrace) -> Result<BoundaryTrace> {
        if self.tau != reference.tau {
            return Err(Error::TauMismatch {
                trace_tau: self.tau,
                probe_tau: reference.tau,
            });
        }
        if self.times != reference.times {
            return Err(Error::InvalidInput(
                "trace subtraction needs identical time nodes".into(),
            ));
        }
        if self.faces.len() != reference.faces.len() {
            return Err(Error::InvalidInput(
                "trace subtraction needs identical face sets".into(),
            ));
        }
        let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
            a.iter()
                .zip(b)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
                .collect()
        };
        Ok(BoundaryTrace {
            tau: self.tau,
            times: self.times.clone(),
            faces: self.faces.clone(),
            u: diff(&self.u, &reference.u),
            f: diff(&self.f, &reference.f),
        })
    }
}

/// Everything a time march produces.
#[derive(Clone, Debug)]
pub struct MarchResult {
    /// `u[node][face]` boundary temperatures.
    pub trace_u: Vec<Vec<f64>>,
    /// `f[node][face]` prescribed fluxes.
    pub trace_f: Vec<Vec<f64>>,
    /// Cell state at `t = T`.
    pub final_state: Vec<f64>,
}

/// March the implicit scheme with an arbitrary flux history `flux_at(t)`
/// (one value per outer face) and optional initial state.
///
/// The operator must be the Neumann Laplacian assembled on `mask`; it is a
/// parameter so callers amortize assembly over many runs.
pub fn march(
    mask: &CellMask,
    faces: &BoundaryFaceSet,
    operator: &SparseOperator,
    time: &TimeGrid,
    opts: &SolverOptions,
    initial: Option<&[f64]>,
    mut flux_at: impl FnMut(f64) -> Result<Vec<f64>>,
) -> Result<MarchResult> {
    let nf = mask.n_fluid();
    if operator.dim != nf {
        return Err(Error::InvalidInput(format!(
            "operator dimension {} does not match {} fluid cells",
            operator.dim, nf
        )));
    }
    let mut state = match initial {
        Some(u0) => {
            if u0.len() != nf {
                return Err(Error::InvalidInput(format!(
                    "initial state has {} entries for {} fluid cells",
                    u0.len(),
                    nf
                )));
            }
            u0.to_vec()
        }
        None => vec![0.0; nf],
    };

    let nodes = time.nodes();
    let mut trace_u = Vec::with_capacity(nodes.len());
    let mut trace_f = Vec::with_capacity(nodes.len());

    let g0 = flux_at(nodes[0])?;
    let mut b_prev = grid::flux_load(mask, faces, &g0)?;
    trace_u.push(boundary_temperature(mask, faces, &state, &g0)?);
    trace_f.push(g0);

    let mut scratch = vec![0.0; nf];
    // Preconditioners are cached per quarter-octave bucket of the CG shift:
    // a factor built for a nearby shift keeps nearly all of its strength, so
    // a graded march reuses a couple dozen factors across hundreds of steps.
    let mut pc_cache: Vec<(i64, grid::Preconditioner)> = Vec::new();
    fn pc_for(
        cache: &mut Vec<(i64, grid::Preconditioner)>,
        operator: &SparseOperator,
        shift: f64,
    ) -> usize {
        let key = (2.0 * shift.log2()).round() as i64;
        if let Some(pos) = cache.iter().position(|(k, _)| *k == key) {
            return pos;
        }
        let centered = (key as f64 / 2.0).exp2();
        cache.push((key, grid::Preconditioner::build(operator, centered)));
        cache.len() - 1
    }
    // Warm-start seed: quadratic extrapolation through the last three time
    // levels (falling back to linear/copy early on), which starts CG two
    // Taylor orders closer to the new level than a plain copy of u.
    let mut hist: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut seed = vec![0.0; nf];
    for w in nodes.windows(2) {
        let (t0, t_next) = (w[0], w[1]);
        let dt = t_next - t0;
        let g_next = flux_at(t_next)?;
        let b_next = grid::flux_load(mask, faces, &g_next)?;

        match hist.len() {
            0 => seed.copy_from_slice(&state),
            1 => {
                let (t1, prev) = (&hist[0].0, &hist[0].1);
                let theta = (t_next - t0) / (t0 - t1);
                for k in 0..nf {
                    seed[k] = state[k] + theta * (state[k] - prev[k]);
                }
            }
            _ => {
                let (t1, p1) = (&hist[0].0, &hist[0].1);
                let (t2, p2) = (&hist[1].0, &hist[1].1);
                let c0 = (t_next - t1) * (t_next - t2) / ((t0 - t1) * (t0 - t2));
                let c1 = (t_next - t0) * (t_next - t2) / ((t1 - t0) * (t1 - t2));
                let c2 = (t_next - t0) * (t_next - t1) / ((t2 - t0) * (t2 - t1));
                for k in 0..nf {
                    seed[k] = c0 * state[k] + c1 * p1[k] + c2 * p2[k];
                }
            }
        }

        let next = match opts.scheme {
            TimeScheme::BackwardEuler => {
                // (A + I/dt) u⁺ = u/dt + b⁺
                let shift = 1.0 / dt;
                let pc = pc_for(&mut pc_cache, operator, shift);
                let rhs: Vec<f64> = (0..nf).map(|k| state[k] / dt + b_next[k]).collect();
                grid::cg_solve_with(
                    operator,
                    shift,
                    &rhs,
                    opts.cg_tol,
                    opts.cg_max_iter,
                    Some(&seed),
                    &pc_cache[pc].1,
                )?
            }
            TimeScheme::CrankNicolson => {
                // (A + 2I/dt) u⁺ = (2/dt) u − A u + b + b⁺
                let shift = 2.0 / dt;
                let pc = pc_for(&mut pc_cache, operator, shift);
                operator.matvec(&state, &mut scratch);
                let rhs: Vec<f64> = (0..nf)
                    .map(|k| 2.0 * state[k] / dt - scratch[k] + b_prev[k] + b_next[k])
                    .collect();
                grid::cg_solve_with(
                    operator,
                    shift,
                    &rhs,
                    opts.cg_tol,
                    opts.cg_max_iter,
                    Some(&seed),
                    &pc_cache[pc].1,
                )?
            }
        };
        let displaced = std::mem::replace(&mut state, next);
        hist.insert(0, (t0, displaced));
        hist.truncate(2);

        trace_u.push(boundary_temperature(mask, faces, &state, &g_next)?);
        trace_f.push(g_next);
        b_prev = b_next;
    }

    Ok(MarchResult {
        trace_u,
        trace_f,
        final_state: state,
    })
}

/// Simulate the full measurement for a scene: rasterize, assemble, march,
/// and package the boundary trace for the probe/profile pair.
pub fn simulate(
    scene: &Scene,
    n: usize,
    probe: &Probe,
    profile: &TemporalProfile,
    time: &TimeGrid,
    opts: &SolverOptions,
) -> Result<BoundaryTrace> {
    if (time.t_final() - scene.final_time).abs() > 1e-12 * scene.final_time.max(1.0) {
        return Err(Error::InvalidInput(format!(
            "time grid ends at {} but the scene's horizon is {}",
            time.t_final(),
            scene.final_time
        )));
    }
    probe.validate_outside(&scene.omega_rect)?;
    profile.validate(scene.final_time)?;
    let mask = scene.rasterize(n)?;
    let faces = grid::boundary_faces(&mask)?;
    let operator = grid::build_neumann_laplacian(&mask)?;
    let result = march(&mask, &faces, &operator, time, opts, None, |t| {
        probes::flux_on_faces(probe, &faces, profile, t)
    })?;
    Ok(BoundaryTrace {
        tau: probe.tau(),
        times: time.nodes().to_vec(),
        faces,
        u: result.trace_u,
        f: result.trace_f,
    })
}

/// One-sided boundary temperature reconstruction: `u_face = u_cell +
/// offset · g_face`, where `g_face` is the prescribed outward flux on that
/// face. Exact whenever `u` is linear along the face normal.
pub fn boundary_temperature(
    mask: &CellMask,
    faces: &BoundaryFaceSet,
    state: &[f64],
    flux: &[f64],
) -> Result<Vec<f64>> {
    if flux.len() != faces.len() {
        return Err(Error::InvalidInput(format!(
            "flux data has {} entries for {} faces",
            flux.len(),
            faces.len()
        )));
    }
    let mut out = Vec::with_capacity(faces.len());
    for (face, &g) in faces.iter().zip(flux) {
        let fi = mask.fluid_index[face.cell];
        if fi < 0 {
            return Err(Error::InvalidInput(
                "boundary face adjacent to a cavity cell".into(),
            ));
        }
        out.push(state[fi as usize] + face.offset * g);
    }
    Ok(out)
}

/// Total heat content `∫ u` of a fluid-cell state (cell-area weights).
pub fn total_mass(mask: &CellMask, state: &[f64]) -> f64 {
    mask.cell_area() * state.iter().sum::<f64>()
}
