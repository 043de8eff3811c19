//! Stationary (elliptic) oracle: an independent verification path for the
//! time-domain pipeline.
//!
//! For a probe field `v` with `(Δ − τ)v = 0` and outer flux data
//! `g = ∂v/∂ν` on `∂Ω`, let `w_D` and `w_∅` solve `(−Δ + τ)w = 0` on the
//! cavity body `Ω∖D̄` (insulated cavity) and on the full body `Ω`, both with
//! Neumann data `g`. The *gap*
//!
//! ```text
//! gap(τ) = ∫_{∂Ω} g (w_D − w_∅) dS
//! ```
//!
//! measures how much hotter the insulated body runs under the same flux. It
//! admits a second expression through the reflector `R = w_D − w_∅` (zero
//! outer flux, `∂R/∂n = −∂w_∅/∂n` on the cavity wall):
//!
//! ```text
//! gap(τ) = ∫_{Ω∖D̄}|∇R|² + τ∫_{Ω∖D̄}R² + ∫_D|∇w_∅|² + τ∫_D w_∅²,
//! ```
//!
//! a sum of four nonnegative energies. (In the continuum `w_∅` is exactly
//! the probe `v`: both solve `(−Δ+τ)u = 0` in all of `Ω` with the same
//! Neumann data, and `τ > 0` makes that problem uniquely solvable. The grid
//! realization of that object is the discrete reference solve — sampling the
//! analytic `v` at cell centers instead would inject the lattice's `O(τh²)`
//! dispersion mismatch into the identity.) Computing the gap both ways —
//! once as boundary algebra of the `w_D`/`w_∅` traces, once by assembling
//! interior energies of a third solve plus the reference field — exercises
//! the load assembly, the staircase flux convention, the trace extraction
//! and the energy quadratures against an identity that holds *exactly* in
//! exact arithmetic, so the cross-check is asserted near solver tolerance,
//! not at a discretization-error scale.
//! Since `gap ≍ e^{2√τ h_D(ω)}` (directional) or `≍ e^{−2√τ d_D(p)}`
//! (point), `log(gap)/(2√τ)` is the stationary twin of the time-domain
//! support estimate, and `J(τ) ≈ −Φ(τ)·gap(τ)` bridges the two worlds.
//!
//! Discrete conventions: the gradient energies use the same face-difference
//! quadrature as the operator's own quadratic form
//! ([`grid::dirichlet_energy`]); the cavity terms square `w_∅`'s face
//! differences over every face touching a cavity cell and weight cavity
//! cells by area for the `L²` term; the reflector's staircase data divides
//! `w_∅`'s face difference by the center distance, matching the operator's
//! own flux stencil.
//!
//! This module deliberately never runs the time stepper: the bridge
//! residual `J + Φ·gap` then compares a time-domain computation against a
//! stationary one with no shared solver code beyond the grid.

use serde::{Deserialize, Serialize};

use crate::forward::{boundary_temperature, BoundaryTrace};
use crate::geometry::{Rect, Shape, Vec2};
use crate::grid::{
    boundary_faces, build_neumann_laplacian, cavity_interface, cg_solve, dirichlet_energy,
    flux_load, l2_sq, BoundaryFaceSet, CellMask, InteriorFace,
};
use crate::indicator::compute_indicator;
use crate::probes::{laplace_of_profile, Probe, TemporalProfile};
use crate::{Error, Result};

/// Stationary solves are cheap, so they run at a tighter tolerance than the
/// time stepper; the gap extraction cancels several digits and needs the
/// headroom.
const CG_TOL: f64 = 1e-12;
const CG_MAX_ITER: usize = 200_000;

/// Solution of one stationary problem `(A + τI)x = load`.
#[derive(Clone, Debug)]
pub struct EllipticSolution {
    pub tau: f64,
    /// Values on the mask's fluid cells, in fluid-index order.
    pub cells: Vec<f64>,
}

/// Solve `(−Δ_h + τ)w = 0` with prescribed Neumann flux on outer faces and
/// on cavity staircase faces (both in the outward-of-the-fluid direction;
/// either data set may be empty).
pub fn solve_stationary(
    mask: &CellMask,
    tau: f64,
    outer_faces: &BoundaryFaceSet,
    outer_flux: &[f64],
    cavity_faces: &[InteriorFace],
    cavity_flux: &[f64],
) -> Result<EllipticSolution> {
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!(
            "stationary solve needs tau > 0, got {tau}"
        )));
    }
    if cavity_flux.len() != cavity_faces.len() {
        return Err(Error::InvalidInput(format!(
            "cavity flux has {} entries for {} staircase faces",
            cavity_flux.len(),
            cavity_faces.len()
        )));
    }
    let a = build_neumann_laplacian(mask)?;
    let mut b = flux_load(mask, outer_faces, outer_flux)?;
    let inv_area = 1.0 / mask.cell_area();
    for (face, &q) in cavity_faces.iter().zip(cavity_flux) {
        let fi = mask.fluid_index[face.fluid_cell];
        debug_assert!(fi >= 0, "staircase face must sit on a fluid cell");
        b[fi as usize] += q * face.length * inv_area;
    }
    let cells = cg_solve(&a, tau, &b, CG_TOL, CG_MAX_ITER, None)?;
    Ok(EllipticSolution { tau, cells })
}

/// Outer Neumann data of a probe: `g = ∂v/∂ν` at face midpoints.
pub fn probe_outer_flux(probe: &Probe, faces: &BoundaryFaceSet) -> Result<Vec<f64>> {
    faces
        .iter()
        .map(|f| probe.normal_derivative(f.center, f.normal))
        .collect()
}

fn body_rect(mask: &CellMask) -> Rect {
    Rect::new(
        mask.origin,
        Vec2::new(
            mask.origin.x + mask.hx * mask.n as f64,
            mask.origin.y + mask.hy * mask.n as f64,
        ),
    )
}

/// The gap as a boundary integral: solve with and without the cavity under
/// the same outer data and pair the trace difference with the data.
///
/// `D = ∅` gives exactly zero (the two solves are bit-identical); with a
/// cavity the value is positive — insulation raises the trace.
pub fn ntd_gap_boundary(mask: &CellMask, probe: &Probe) -> Result<f64> {
    probe.validate_outside(&body_rect(mask))?;
    let faces = boundary_faces(mask)?;
    let g = probe_outer_flux(probe, &faces)?;
    let tau = probe.tau();

    let with_cavity = solve_stationary(mask, tau, &faces, &g, &[], &[])?;
    let full = mask.without_cavities();
    let without = solve_stationary(&full, tau, &faces, &g, &[], &[])?;

    let trace_d = boundary_temperature(mask, &faces, &with_cavity.cells, &g)?;
    let trace_0 = boundary_temperature(&full, &faces, &without.cells, &g)?;

    Ok(faces
        .iter()
        .zip(trace_d.iter().zip(&trace_0))
        .zip(&g)
        .map(|((face, (td, t0)), gv)| gv * (td - t0) * face.length)
        .sum())
}

/// The gap as an energy sum, with every term reported.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapReport {
    pub probe: Probe,
    /// Boundary-integral value (first path).
    pub gap_boundary: f64,
    /// Energy-sum value (second path): exactly the sum of the four parts.
    pub gap_energy: f64,
    /// `∫_{Ω∖D̄} |∇R|²` of the reflector, by face differences.
    pub part_grad_r: f64,
    /// `τ ∫_{Ω∖D̄} R²`.
    pub part_r: f64,
    /// `∫_D |∇w_∅|²` of the reference field over the cavity, by face
    /// differences across every face touching a cavity cell.
    pub part_grad_v: f64,
    /// `τ ∫_D w_∅²` over the cavity cells.
    pub part_v: f64,
    /// `∫_D e^{2√τ x·ω} dx` (directional) or `∫_D e^{−2√τ|x−p|} dx`
    /// (point), by adaptive Gauss quadrature on the analytic shapes.
    pub cavity_weight: f64,
}

impl GapReport {
    pub fn tau(&self) -> f64 {
        self.probe.tau()
    }

    /// Relative disagreement of the two computation paths.
    pub fn two_path_rel_error(&self) -> f64 {
        if self.gap_energy == 0.0 {
            self.gap_boundary.abs()
        } else {
            (self.gap_boundary - self.gap_energy).abs() / self.gap_energy
        }
    }
}

/// The gap via the reflector's energies, plus the boundary-path value and
/// the analytic cavity weight for context.
///
/// Runs three stationary solves: `w_D` (cavity body), `w_∅` (reference
/// body), and the reflector `R` driven on the staircase wall by `w_∅`'s own
/// face differences. The boundary path pairs the `w_D − w_∅` trace with the
/// data; the energy path sums the reflector energies and the reference
/// field's cavity energies. In exact arithmetic the two agree identically.
///
/// `cavities` must be the same shape list the mask was rasterized from; it
/// feeds only the [`cavity_weight`] column, never the solves.
pub fn ntd_gap_energy(mask: &CellMask, cavities: &[Shape], probe: &Probe) -> Result<GapReport> {
    probe.validate_outside(&body_rect(mask))?;
    let tau = probe.tau();
    let faces = boundary_faces(mask)?;
    let interface = cavity_interface(mask);
    let g = probe_outer_flux(probe, &faces)?;

    let with_cavity = solve_stationary(mask, tau, &faces, &g, &[], &[])?;
    let full = mask.without_cavities();
    let reference = solve_stationary(&full, tau, &faces, &g, &[], &[])?;

    // Boundary path: pair the trace difference with the data.
    let trace_d = boundary_temperature(mask, &faces, &with_cavity.cells, &g)?;
    let trace_0 = boundary_temperature(&full, &faces, &reference.cells, &g)?;
    let gap_boundary = faces
        .iter()
        .zip(trace_d.iter().zip(&trace_0))
        .zip(&g)
        .map(|((face, (td, t0)), gv)| gv * (td - t0) * face.length)
        .sum();

    let n = mask.n;
    let w0 = |i: usize, j: usize| reference.cells[full.fluid_index[full.idx(i, j)] as usize];

    // Reflector problem: zero outer flux; on the staircase wall the data is
    // −∂w_∅/∂n in the operator's own stencil, i.e. minus the face difference
    // of the reference field over the center distance (n points out of the
    // fluid, into the cavity).
    let q: Vec<f64> = interface
        .iter()
        .map(|f| {
            let (fi, fj) = (f.fluid_cell % n, f.fluid_cell / n);
            let ci = (fi as f64 + f.normal.x) as usize;
            let cj = (fj as f64 + f.normal.y) as usize;
            let dist = if f.normal.x != 0.0 { mask.hx } else { mask.hy };
            -(w0(ci, cj) - w0(fi, fj)) / dist
        })
        .collect();
    let zeros = vec![0.0; faces.len()];
    let reflector = solve_stationary(mask, tau, &faces, &zeros, &interface, &q)?;

    let part_grad_r = dirichlet_energy(mask, &reflector.cells);
    let part_r = tau * l2_sq(mask, &reflector.cells);

    // Reference-field energies over the cavity region, in the operator's own
    // metric: square face differences over every face touching a cavity
    // cell, and weight cavity cells by area for the L² term.
    let wx = mask.hy / mask.hx;
    let wy = mask.hx / mask.hy;
    let mut part_grad_v = 0.0;
    for j in 0..n {
        for i in 0..n {
            let here_fluid = mask.is_fluid(i, j);
            if i + 1 < n && (!here_fluid || !mask.is_fluid(i + 1, j)) {
                let d = w0(i + 1, j) - w0(i, j);
                part_grad_v += d * d * wx;
            }
            if j + 1 < n && (!here_fluid || !mask.is_fluid(i, j + 1)) {
                let d = w0(i, j + 1) - w0(i, j);
                part_grad_v += d * d * wy;
            }
        }
    }
    let mut part_v = 0.0;
    for j in 0..n {
        for i in 0..n {
            if !mask.is_fluid(i, j) {
                let v = w0(i, j);
                part_v += v * v;
            }
        }
    }
    part_v *= tau * mask.cell_area();

    let gap_energy = part_grad_r + part_r + part_grad_v + part_v;
    let variant = WeightVariant::of_probe(probe);
    // Folded from +0.0 rather than `sum()`: the standard float `Sum` starts
    // at −0.0, and an empty cavity list must report a plain zero.
    let cavity_weight = cavities
        .iter()
        .fold(0.0, |acc, s| acc + cavity_weight(s, variant, tau));

    Ok(GapReport {
        probe: probe.clone(),
        gap_boundary,
        gap_energy,
        part_grad_r,
        part_r,
        part_grad_v,
        part_v,
        cavity_weight,
    })
}

/// Which exponential weight to integrate over the cavity.
#[derive(Clone, Copy, Debug)]
pub enum WeightVariant {
    /// `e^{2√τ x·ω}` — grows toward the probing direction.
    Directional { omega: Vec2 },
    /// `e^{−2√τ |x−p|}` — decays away from the probing point.
    Point { p: Vec2 },
}

impl WeightVariant {
    pub fn of_probe(probe: &Probe) -> WeightVariant {
        match probe {
            Probe::Directional { omega, .. } => WeightVariant::Directional { omega: *omega },
            Probe::Point { p, .. } => WeightVariant::Point { p: *p },
        }
    }
}

/// `∫_D (weight) dx` by adaptive Gauss–Legendre quadrature on the analytic
/// shape (polar rule for disks, tensor rule for rectangles, sum over union
/// members). Node counts double until two successive levels agree to
/// near-machine relative precision.
pub fn cavity_weight(shape: &Shape, variant: WeightVariant, tau: f64) -> f64 {
    let two_rt = 2.0 * tau.sqrt();
    let f = |x: Vec2| -> f64 {
        match variant {
            WeightVariant::Directional { omega } => (two_rt * x.dot(omega)).exp(),
            WeightVariant::Point { p } => (-two_rt * (x - p).norm()).exp(),
        }
    };
    integrate_shape(shape, &f)
}

fn integrate_shape(shape: &Shape, f: &dyn Fn(Vec2) -> f64) -> f64 {
    match shape {
        Shape::Union { members } => members.iter().map(|m| integrate_shape(m, f)).sum(),
        Shape::Disk { center, radius } => adaptive(|order| disk_rule(*center, *radius, order, f)),
        Shape::Rect { lo, hi } => adaptive(|order| rect_rule(*lo, *hi, order, f)),
    }
}

fn adaptive(rule: impl Fn(usize) -> f64) -> f64 {
    let mut prev = rule(8);
    for order in [16, 32, 64, 128, 256, 512] {
        let next = rule(order);
        if (next - prev).abs() <= 1e-13 * next.abs() + 1e-300 {
            return next;
        }
        prev = next;
    }
    prev
}

/// Polar product rule: Gauss in radius (weighted by ρ), Gauss in angle.
fn disk_rule(center: Vec2, radius: f64, order: usize, f: &dyn Fn(Vec2) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut acc = 0.0;
    for (tr, wr) in nodes.iter().zip(&weights) {
        let rho = 0.5 * radius * (tr + 1.0);
        let jr = 0.5 * radius * wr * rho;
        let mut ring = 0.0;
        for (ta, wa) in nodes.iter().zip(&weights) {
            let theta = 0.5 * two_pi * (ta + 1.0);
            let x = Vec2::new(center.x + rho * theta.cos(), center.y + rho * theta.sin());
            ring += wa * f(x);
        }
        acc += jr * ring * 0.5 * two_pi;
    }
    acc
}

fn rect_rule(lo: Vec2, hi: Vec2, order: usize, f: &dyn Fn(Vec2) -> f64) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let cx = 0.5 * (lo.x + hi.x);
    let cy = 0.5 * (lo.y + hi.y);
    let sx = 0.5 * (hi.x - lo.x);
    let sy = 0.5 * (hi.y - lo.y);
    let mut acc = 0.0;
    for (tx, wx) in nodes.iter().zip(&weights) {
        let x = cx + sx * tx;
        let mut row = 0.0;
        for (ty, wy) in nodes.iter().zip(&weights) {
            row += wy * f(Vec2::new(x, cy + sy * ty));
        }
        acc += wx * row;
    }
    acc * sx * sy
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` by Newton iteration on the
/// Legendre recurrence, seeded with Chebyshev angles.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Residual of the bridge between the time-domain indicator and the
/// stationary gap.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BridgeReport {
    pub tau: f64,
    /// `J(τ)` evaluated from the supplied trace (linear scale).
    pub j: f64,
    /// `Φ(τ)`: the profile's truncated Laplace transform.
    pub phi: f64,
    /// Stationary gap on the supplied mask.
    pub gap: f64,
    /// `r(τ) = J(τ) + Φ(τ)·gap(τ)` — zero in exact arithmetic up to the
    /// `O(e^{−τT} e^{2√τ h_Ω})` truncation remainder.
    pub residual: f64,
    /// `|r| / |J|`; infinite when `J = 0` but the gap is not.
    pub residual_rel: f64,
}

/// Check the bridge identity `J(τ) ≈ −Φ(τ)·gap(τ)` on matched data.
///
/// The trace should be referenced (cavity-free run subtracted) so that its
/// own discretization bias does not masquerade as a residual. The residual
/// shrinks as `τT` grows at fixed `2√τ h_Ω`; callers verify that trend by
/// re-running with a longer horizon.
pub fn verify_basic_identity(
    trace: &BoundaryTrace,
    probe: &Probe,
    profile: &TemporalProfile,
    mask: &CellMask,
) -> Result<BridgeReport> {
    let sample = compute_indicator(trace, probe, profile)?;
    let j = sample.j_value();
    let phi = laplace_of_profile(profile, probe.tau(), trace.t_final())?;
    let gap = ntd_gap_boundary(mask, probe)?;
    let residual = j + phi * gap;
    let residual_rel = if j == 0.0 {
        if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        residual.abs() / j.abs()
    };
    Ok(BridgeReport {
        tau: probe.tau(),
        j,
        phi,
        gap,
        residual,
        residual_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel;
    use crate::forward::{simulate, SolverOptions, TimeGrid};
    use crate::geometry::Scene;
    use crate::indicator::{regress_support, IndicatorSample};

    fn v2(x: f64, y: f64) -> Vec2 {
        Vec2 { x, y }
    }

    fn body() -> Rect {
        Rect::new(v2(-0.5, -0.5), v2(0.5, 0.5))
    }

    fn disk_scene() -> Scene {
        Scene::new(body(), vec![Shape::disk(v2(0.1, 0.05), 0.15)], 1.0).unwrap()
    }

    fn empty_scene() -> Scene {
        Scene::new(body(), vec![], 1.0).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let mask = disk_scene().rasterize(24).unwrap();
        let faces = boundary_faces(&mask).unwrap();
        let interface = cavity_interface(&mask);
        let sol = solve_stationary(
            &mask,
            7.0,
            &faces,
            &vec![0.0; faces.len()],
            &interface,
            &vec![0.0; interface.len()],
        )
        .unwrap();
        assert!(
            sol.cells.iter().all(|&v| v == 0.0),
            "zero load must give the zero field"
        );
    }

    #[test]
    fn directional_data_reproduces_probe_field_at_second_order() {
        // No cavity: w solves the same problem as v = e^{√τ x·ω}, so the
        // discrete solution converges to the sampled field at O(h²).
        let tau = 9.0;
        let probe = Probe::directional(v2(0.6, 0.8), tau).unwrap();
        let err_at = |n: usize| -> f64 {
            let mask = empty_scene().rasterize(n).unwrap();
            let faces = boundary_faces(&mask).unwrap();
            let g = probe_outer_flux(&probe, &faces).unwrap();
            let sol = solve_stationary(&mask, tau, &faces, &g, &[], &[]).unwrap();
            let mut worst = 0.0f64;
            for (fi, &cell) in mask.fluid_cells.iter().enumerate() {
                let c = mask.cell_center(cell % n, cell / n);
                let v = probe.value(c).unwrap();
                worst = worst.max((sol.cells[fi] - v).abs());
            }
            worst
        };
        let e1 = err_at(24);
        let e2 = err_at(48);
        let rate = (e1 / e2).log2();
        assert!(
            (1.7..2.4).contains(&rate),
            "directional field convergence rate {rate:.2} (errors {e1:.3e} → {e2:.3e})"
        );
    }

    #[test]
    fn point_data_reproduces_bessel_field_at_second_order() {
        let tau = 16.0;
        let probe = Probe::point(v2(1.2, 0.4), tau).unwrap();
        let err_at = |n: usize| -> f64 {
            let mask = empty_scene().rasterize(n).unwrap();
            let faces = boundary_faces(&mask).unwrap();
            let g = probe_outer_flux(&probe, &faces).unwrap();
            let sol = solve_stationary(&mask, tau, &faces, &g, &[], &[]).unwrap();
            let mut worst = 0.0f64;
            for (fi, &cell) in mask.fluid_cells.iter().enumerate() {
                let c = mask.cell_center(cell % n, cell / n);
                let v = probe.value(c).unwrap();
                worst = worst.max((sol.cells[fi] - v).abs());
            }
            worst
        };
        let e1 = err_at(24);
        let e2 = err_at(48);
        let rate = (e1 / e2).log2();
        assert!(
            (1.7..2.4).contains(&rate),
            "point field convergence rate {rate:.2} (errors {e1:.3e} → {e2:.3e})"
        );
    }

    #[test]
    fn empty_cavity_gap_vanishes_exactly() {
        let mask = empty_scene().rasterize(32).unwrap();
        let probe = Probe::directional(v2(1.0, 0.0), 25.0).unwrap();
        let gap = ntd_gap_boundary(&mask, &probe).unwrap();
        assert_eq!(gap, 0.0, "cavity-free gap must vanish exactly, got {gap}");

        let report = ntd_gap_energy(&mask, &[], &probe).unwrap();
        assert_eq!(report.gap_energy, 0.0);
        assert_eq!(report.part_grad_r, 0.0);
        assert_eq!(report.part_r, 0.0);
        assert_eq!(report.part_grad_v, 0.0);
        assert_eq!(report.part_v, 0.0);
        assert_eq!(report.cavity_weight, 0.0);
        assert!(
            report.cavity_weight.is_sign_positive(),
            "empty cavity list must report +0.0, not -0.0 (got {})",
            report.cavity_weight
        );
    }

    #[test]
    fn gap_is_positive_and_two_paths_agree() {
        let scene = disk_scene();
        let mask = scene.rasterize(64).unwrap();
        let probe = Probe::directional(v2(1.0, 0.0), 100.0).unwrap();
        let report = ntd_gap_energy(&mask, &scene.cavities, &probe).unwrap();
        assert!(
            report.gap_boundary > 0.0,
            "gap must be positive with a cavity"
        );
        assert!(report.gap_energy > 0.0);
        let rel = report.two_path_rel_error();
        assert!(
            rel < 1e-9,
            "two paths must agree to solver tolerance, got {rel:.3e} at n = 64 \
             (boundary {}, energy {})",
            report.gap_boundary,
            report.gap_energy
        );
    }

    #[test]
    fn energy_parts_are_nonnegative_and_bound_the_gap() {
        let scene = disk_scene();
        let mask = scene.rasterize(64).unwrap();
        for &tau in &[25.0, 400.0] {
            let probe = Probe::directional(v2(0.0, 1.0), tau).unwrap();
            let r = ntd_gap_energy(&mask, &scene.cavities, &probe).unwrap();
            for (name, part) in [
                ("grad_r", r.part_grad_r),
                ("r", r.part_r),
                ("grad_v", r.part_grad_v),
                ("v", r.part_v),
            ] {
                assert!(part >= 0.0, "part {name} is negative: {part}");
            }
            let sum = r.part_grad_r + r.part_r + r.part_grad_v + r.part_v;
            assert!(
                (r.gap_energy - sum).abs() <= 1e-15 * sum,
                "gap_energy must equal the sum of its parts"
            );
            // Exact discrete lower bound: dropping the reflector terms.
            let lower = r.part_grad_v + r.part_v;
            assert!(
                r.gap_energy >= lower - 1e-12 * lower,
                "gap {} below its own lower bound {}",
                r.gap_energy,
                lower
            );
            // Shape of the two-sided continuum bound: gap / (2τ·weight)
            // sits in [1, C·τ].
            let ratio = r.gap_energy / (2.0 * tau * r.cavity_weight);
            assert!(
                (1.0..=1.0 * tau).contains(&ratio),
                "gap/(2τ·weight) = {ratio:.3} outside [1, τ] at tau = {tau}"
            );
        }
    }

    #[test]
    fn ntd_map_is_symmetric() {
        // ⟨g₁, Λ g₂⟩ = ⟨g₂, Λ g₁⟩ for the discrete insulated NtD map.
        let mask = disk_scene().rasterize(48).unwrap();
        let faces = boundary_faces(&mask).unwrap();
        let tau = 25.0;
        let p1 = Probe::directional(v2(1.0, 0.0), tau).unwrap();
        let p2 = Probe::directional(v2(-0.6, 0.8), tau).unwrap();
        let g1 = probe_outer_flux(&p1, &faces).unwrap();
        let g2 = probe_outer_flux(&p2, &faces).unwrap();
        let w1 = solve_stationary(&mask, tau, &faces, &g1, &[], &[]).unwrap();
        let w2 = solve_stationary(&mask, tau, &faces, &g2, &[], &[]).unwrap();
        let t1 = boundary_temperature(&mask, &faces, &w1.cells, &g1).unwrap();
        let t2 = boundary_temperature(&mask, &faces, &w2.cells, &g2).unwrap();
        let a12: f64 = faces
            .iter()
            .zip(g1.iter().zip(&t2))
            .map(|(f, (g, t))| g * t * f.length)
            .sum();
        let a21: f64 = faces
            .iter()
            .zip(g2.iter().zip(&t1))
            .map(|(f, (g, t))| g * t * f.length)
            .sum();
        let scale = a12.abs().max(a21.abs());
        assert!(
            (a12 - a21).abs() <= 1e-8 * scale,
            "NtD symmetry violated: {a12} vs {a21}"
        );
    }

    #[test]
    fn cavity_weight_tau_to_zero_recovers_area() {
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        let w = cavity_weight(
            &disk,
            WeightVariant::Directional {
                omega: v2(1.0, 0.0),
            },
            1e-20,
        );
        let area = std::f64::consts::PI * 0.0225;
        assert!((w - area).abs() < 1e-8, "tau → 0 weight {w} vs area {area}");
    }

    #[test]
    fn cavity_weight_rect_matches_separated_closed_form() {
        // Aligned rectangle: the integral separates into 1-D factors.
        let (ax, bx, ay, by) = (-0.1, 0.25, -0.2, 0.1);
        let rect = Shape::rect(v2(ax, ay), v2(bx, by));
        for &tau in &[4.0, 49.0, 225.0] {
            let s = 2.0 * f64::sqrt(tau);
            let w = cavity_weight(
                &rect,
                WeightVariant::Directional {
                    omega: v2(1.0, 0.0),
                },
                tau,
            );
            let exact = (((s * bx).exp() - (s * ax).exp()) / s) * (by - ay);
            assert!(
                ((w - exact) / exact).abs() < 1e-10,
                "rect weight {w} vs closed form {exact} at tau = {tau}"
            );
        }
        // Disk sanity against the modified-Bessel closed form:
        // ∫_disk e^{s x} dx = 2π r e^{s cx} I₁(s r)/s.
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        for &tau in &[25.0, 400.0] {
            let s = 2.0 * f64::sqrt(tau);
            let w = cavity_weight(
                &disk,
                WeightVariant::Directional {
                    omega: v2(1.0, 0.0),
                },
                tau,
            );
            let exact =
                2.0 * std::f64::consts::PI * 0.15 * (s * 0.1).exp() * bessel::i1(s * 0.15) / s;
            assert!(
                ((w - exact) / exact).abs() < 1e-10,
                "disk weight {w} vs Bessel closed form {exact} at tau = {tau}"
            );
        }
    }

    #[test]
    fn point_weight_decay_rate_recovers_distance() {
        // log W(τ) ≈ −2√τ d + μ log τ + c: the fitted slope gives d_D(p)
        // within 2% of the geometric distance.
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        let p = v2(1.5, 0.0);
        let d_true = disk.distance_to_point(p).unwrap();
        let taus: Vec<f64> = (0..8)
            .map(|k| 25.0 * (400.0f64 / 25.0).powf(k as f64 / 7.0))
            .collect();
        let samples: Vec<IndicatorSample> = taus
            .iter()
            .map(|&tau| {
                let w = cavity_weight(&disk, WeightVariant::Point { p }, tau);
                IndicatorSample {
                    tau,
                    sign: 1,
                    log_abs_j: w.ln(),
                    log_phi: 0.0,
                }
            })
            .collect();
        let fit = regress_support(&samples).unwrap();
        let d_est = -fit.h;
        assert!(
            ((d_est - d_true) / d_true).abs() < 0.02,
            "fitted decay distance {d_est:.4} vs geometric {d_true:.4}"
        );
    }

    #[test]
    fn bridge_residual_small_on_empty_body_and_shrinks_with_horizon() {
        // D = ∅: gap = 0 exactly and J is pure discretization bias, so the
        // residual equals J and must be small against the probe scale.
        let n = 48;
        let tau = 25.0;
        let probe = Probe::directional(v2(1.0, 0.0), tau).unwrap();
        let profile = TemporalProfile::ConstOne;
        let opts = SolverOptions::default();

        let run = |t_final: f64, steps: usize| -> BridgeReport {
            let scene = Scene::new(body(), vec![], t_final).unwrap();
            let mask = scene.rasterize(n).unwrap();
            let time = TimeGrid::graded(t_final, steps, 2.0).unwrap();
            let trace = simulate(&scene, n, &probe, &profile, &time, &opts).unwrap();
            verify_basic_identity(&trace, &probe, &profile, &mask).unwrap()
        };

        let r1 = run(1.0, 160);
        assert_eq!(r1.gap, 0.0);
        let faces = boundary_faces(&empty_scene().rasterize(n).unwrap()).unwrap();
        let scale = crate::indicator::detection_scale(&probe, &faces, &profile, 1.0).unwrap();
        assert!(
            r1.residual.abs() <= 1e-2 * scale,
            "empty-body residual {} vs probe scale {}",
            r1.residual,
            scale
        );

        // Doubling the horizon at fixed τ must not increase the residual:
        // the truncation term carries e^{−τT}. Compare with the cavity in
        // place so the residual is dominated by that term, using matched
        // step sizes.
        let run_cavity = |t_final: f64, steps: usize| -> BridgeReport {
            let scene =
                Scene::new(body(), vec![Shape::disk(v2(0.1, 0.05), 0.15)], t_final).unwrap();
            let empty = Scene::new(body(), vec![], t_final).unwrap();
            let mask = scene.rasterize(n).unwrap();
            let time = TimeGrid::graded(t_final, steps, 2.0).unwrap();
            let trace = simulate(&scene, n, &probe, &profile, &time, &opts).unwrap();
            let reference = simulate(&empty, n, &probe, &profile, &time, &opts).unwrap();
            let referenced = trace.subtract(&reference).unwrap();
            verify_basic_identity(&referenced, &probe, &profile, &mask).unwrap()
        };
        let short = run_cavity(1.0, 160);
        let long = run_cavity(2.0, 320);
        assert!(
            long.residual.abs() <= short.residual.abs() * 1.05 + 1e-12,
            "residual grew with the horizon: {} → {}",
            short.residual,
            long.residual
        );
    }

    #[test]
    fn stationary_gap_log_tracks_support_function() {
        // log(gap)/(2√τ) approaches h_D(ω); at √τ = 10 on a modest grid it
        // should already sit near the disk's support value 0.25.
        let scene = disk_scene();
        let mask = scene.rasterize(64).unwrap();
        let probe = Probe::directional(v2(1.0, 0.0), 100.0).unwrap();
        let gap = ntd_gap_boundary(&mask, &probe).unwrap();
        let h = gap.ln() / (2.0 * 10.0);
        let h_true = scene.cavity_support(v2(1.0, 0.0)).unwrap();
        assert!(
            (h - h_true).abs() < 0.12,
            "stationary support estimate {h:.3} vs true {h_true:.3}"
        );
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(8);
        assert_eq!(nodes.len(), 8);
        // Exact for degree ≤ 15: check x⁰, x², x¹⁴ and an odd power.
        for (k, exact) in [(0usize, 2.0), (2, 2.0 / 3.0), (14, 2.0 / 15.0), (7, 0.0)] {
            let got: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * x.powi(k as i32))
                .sum();
            assert!((got - exact).abs() < 1e-14, "∫x^{k} = {got} vs {exact}");
        }
        let wsum: f64 = weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14, "weights must sum to 2");
    }
}
