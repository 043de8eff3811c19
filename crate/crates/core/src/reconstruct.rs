//! From support/distance estimates to certified enclosures of the cavity.
//!
//! Directional sweeps produce support estimates `h(ω) ≈ h_D(ω)`; each one is
//! the half-plane constraint `D ⊆ {x : x·ω ≤ h(ω)}`. Intersecting the
//! constraints (clipped to the body rectangle) encloses the cavity's convex
//! hull — with exact estimates the intersection *is* the circumscribed
//! polygon, and over-estimates only enlarge it, never lose the cavity.
//!
//! Point sweeps produce distance estimates `d(p) ≈ d_D(p)` from probe points
//! outside the body; each one is the complement constraint
//! `D ⊆ {x : |x − p| ≥ d(p)}`. The balls `B(p, d(p))` are carved out of the
//! body; what remains is a (generally non-convex) region guaranteed to
//! contain the cavity, reported as a rasterized indicator on a diagnostic
//! grid.
//!
//! Both constructions are monotone: adding a direction or a probe point can
//! only shrink the enclosure. Estimates are used exactly as given — no
//! snapping or feasibility repair — so an inconsistent set surfaces as an
//! explicit [`Error::EmptyIntersection`] instead of a silently adjusted
//! answer.

use serde::{Deserialize, Serialize};

use crate::geometry::{Rect, Shape, Vec2};
use crate::{Error, Result};

/// Default number of sweep directions for a directional reconstruction.
pub const DEFAULT_DIRECTIONS: usize = 16;

/// Slack added to the body's own support before an estimate is flagged as
/// claiming material outside the body.
pub const BODY_MARGIN: f64 = 1e-9;

/// `count` unit directions spread uniformly over the circle, starting at
/// `(1, 0)` and turning counterclockwise.
pub fn uniform_directions(count: usize) -> Vec<Vec2> {
    (0..count)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            Vec2::new(theta.cos(), theta.sin())
        })
        .collect()
}

/// One direction's worth of sweep output: the estimate plus the diagnostics
/// a reader needs to judge it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportEntry {
    /// Unit probing direction.
    pub omega: Vec2,
    /// Support estimate `h(ω)`; the constraint is `x·ω ≤ h(ω)`.
    pub h_est: f64,
    /// Whether the sweep's indicator cleared the detection floor; entries
    /// with `false` describe a direction where no cavity signal was seen.
    pub detected: bool,
    /// Residual norm of the regression that produced `h_est`.
    pub residual_norm: f64,
    /// Number of τ samples behind the estimate.
    pub n_samples: usize,
}

/// A validated collection of directional estimates for one body.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupportTable {
    pub omega_rect: Rect,
    pub entries: Vec<SupportEntry>,
    /// Per entry: `h_est` exceeds the body's own support by more than
    /// [`BODY_MARGIN`] — the estimate claims material outside `Ω` and should
    /// be treated as suspect (it is still used as given).
    pub exceeds_body: Vec<bool>,
}

impl SupportTable {
    /// Validates directions (unit, pairwise distinct) and estimates
    /// (finite), and flags estimates beyond the body's support.
    pub fn new(omega_rect: Rect, entries: Vec<SupportEntry>) -> Result<Self> {
        omega_rect.validate()?;
        for e in &entries {
            e.omega.require_unit()?;
            if !e.h_est.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "support estimate for direction ({}, {}) is not finite",
                    e.omega.x, e.omega.y
                )));
            }
        }
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                if (entries[i].omega - entries[j].omega).norm() < 1e-9 {
                    return Err(Error::InvalidInput(format!(
                        "directions {i} and {j} coincide: ({}, {})",
                        entries[i].omega.x, entries[i].omega.y
                    )));
                }
            }
        }
        let exceeds_body = entries
            .iter()
            .map(|e| e.h_est > omega_rect.support_raw(e.omega) + BODY_MARGIN)
            .collect();
        Ok(SupportTable {
            omega_rect,
            entries,
            exceeds_body,
        })
    }

    /// Entries whose sweep cleared the detection floor.
    pub fn detected(&self) -> impl Iterator<Item = &SupportEntry> {
        self.entries.iter().filter(|e| e.detected)
    }
}

/// Convex polygon enclosing the cavity's convex hull: counterclockwise
/// vertex list, contained in the body rectangle (up to [`BODY_MARGIN`]).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullEstimate {
    pub vertices: Vec<Vec2>,
}

impl HullEstimate {
    /// Enclosed area (shoelace; nonnegative for the CCW order produced by
    /// [`halfplane_intersection`]).
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut acc = 0.0;
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            acc += a.x * b.y - a.y * b.x;
        }
        0.5 * acc
    }

    /// Support function of the polygon: `max_i v_i·ω`.
    pub fn support(&self, omega: Vec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(omega))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `p` lies inside (or within distance `tol` of) the polygon.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        for i in 0..n {
            let a = v[i];
            let b = v[(i + 1) % n];
            let e = b - a;
            let len = e.norm();
            if len == 0.0 {
                continue;
            }
            let cross = e.x * (p.y - a.y) - e.y * (p.x - a.x);
            if cross < -tol * len {
                return false;
            }
        }
        true
    }

    /// Vertex list as `x,y` CSV lines (one vertex per line, CCW).
    pub fn vertices_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for v in &self.vertices {
            out.push_str(&format!("{:.17e},{:.17e}\n", v.x, v.y));
        }
        out
    }
}

/// Sup-distance of support functions between the hull estimate and a shape,
/// sampled over `n_dirs` uniform directions. For a convex shape this equals
/// the Hausdorff distance; in general it is the Hausdorff distance to the
/// shape's convex hull, which is exactly what a support-function method can
/// be held to.
pub fn support_distance(hull: &HullEstimate, shape: &Shape, n_dirs: usize) -> f64 {
    uniform_directions(n_dirs)
        .into_iter()
        .map(|w| (hull.support(w) - shape.support_raw(w)).abs())
        .fold(0.0, f64::max)
}

/// Intersects the table's half-planes `{x : x·ω ≤ h(ω)}` with the body
/// rectangle.
///
/// Preconditions: at least three directions, not all contained in a closed
/// half-circle (otherwise the half-planes alone leave an unbounded wedge and
/// the estimates cannot brace the cavity from all sides). The estimates are
/// used exactly as given; an empty intersection is reported as
/// [`Error::EmptyIntersection`] carrying the full constraint set.
pub fn halfplane_intersection(table: &SupportTable) -> Result<HullEstimate> {
    let entries = &table.entries;
    if entries.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "half-plane intersection needs at least 3 directions, got {}",
            entries.len()
        )));
    }
    // Spanning check: sort direction angles; a gap of π or more between
    // consecutive directions means all of them fit in a closed half-circle.
    let mut angles: Vec<f64> = entries.iter().map(|e| e.omega.y.atan2(e.omega.x)).collect();
    angles.sort_by(|a, b| a.partial_cmp(b).expect("angles are finite"));
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut max_gap: f64 = 0.0;
    for i in 0..angles.len() {
        let next = if i + 1 == angles.len() {
            angles[0] + two_pi
        } else {
            angles[i + 1]
        };
        max_gap = max_gap.max(next - angles[i]);
    }
    if max_gap >= std::f64::consts::PI - 1e-12 {
        return Err(Error::InvalidInput(format!(
            "directions must not fit in a half-circle (largest angular gap {max_gap:.6} rad); \
             add directions on the uncovered side"
        )));
    }

    let c = table.omega_rect.corners();
    let mut poly: Vec<Vec2> = vec![c[0], c[1], c[2], c[3]];
    for e in entries {
        poly = clip_halfplane(&poly, e.omega, e.h_est);
        if poly.len() < 3 {
            let detail = entries
                .iter()
                .map(|e| {
                    format!(
                        "omega = ({:.6}, {:.6}), h = {:.6}",
                        e.omega.x, e.omega.y, e.h_est
                    )
                })
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::EmptyIntersection { detail });
        }
    }

    let scale = table.omega_rect.width().max(table.omega_rect.height());
    let mut vertices: Vec<Vec2> = Vec::with_capacity(poly.len());
    for v in poly {
        if vertices
            .last()
            .map_or(true, |last| (*last - v).norm() > 1e-12 * scale)
        {
            vertices.push(v);
        }
    }
    while vertices.len() > 1
        && (vertices[0] - *vertices.last().expect("nonempty")).norm() <= 1e-12 * scale
    {
        vertices.pop();
    }
    if vertices.len() < 3 {
        let detail = entries
            .iter()
            .map(|e| {
                format!(
                    "omega = ({:.6}, {:.6}), h = {:.6}",
                    e.omega.x, e.omega.y, e.h_est
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::EmptyIntersection { detail });
    }
    Ok(HullEstimate { vertices })
}

/// One Sutherland–Hodgman pass against `x·ω ≤ h`; keeps CCW order.
fn clip_halfplane(poly: &[Vec2], omega: Vec2, h: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let (dc, dn) = (cur.dot(omega) - h, next.dot(omega) - h);
        if dc <= 0.0 {
            out.push(cur);
        }
        if (dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn <= 0.0) {
            let t = dc / (dc - dn);
            out.push(cur + (next - cur).scale(t));
        }
    }
    out
}

/// One probe point's exclusion constraint `D ⊆ {x : |x − p| ≥ d}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExclusionBall {
    pub center: Vec2,
    pub radius: f64,
}

/// The region of the body not excluded by any probe ball, rasterized on a
/// diagnostic grid (cell-center sampling, row-major `j·n + i`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BallEnclosure {
    pub omega_rect: Rect,
    pub balls: Vec<ExclusionBall>,
    pub grid_n: usize,
    /// `true` = the cell's center survives every constraint (the cavity may
    /// be here); `false` = excluded.
    pub remaining: Vec<bool>,
}

impl BallEnclosure {
    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        let n = self.grid_n as f64;
        Vec2::new(
            self.omega_rect.lo.x + (i as f64 + 0.5) * self.omega_rect.width() / n,
            self.omega_rect.lo.y + (j as f64 + 0.5) * self.omega_rect.height() / n,
        )
    }

    pub fn is_remaining(&self, i: usize, j: usize) -> bool {
        self.remaining[j * self.grid_n + i]
    }

    /// Area of the non-excluded region (cell-counting measure).
    pub fn remaining_area(&self) -> f64 {
        let cell = self.omega_rect.area() / (self.grid_n * self.grid_n) as f64;
        cell * self.remaining.iter().filter(|&&r| r).count() as f64
    }

    /// Whether a point survives every constraint, with `margin` of slack
    /// (a point is excluded only when it sits deeper than `margin` inside
    /// some ball).
    pub fn point_remains(&self, p: Vec2, margin: f64) -> bool {
        self.balls
            .iter()
            .all(|b| (p - b.center).norm() >= b.radius - margin)
    }
}

/// Carves the probe balls `B(p_i, d_i)` out of the body rectangle.
///
/// Preconditions: every probe point lies strictly outside the closed body
/// rectangle and every distance is finite and nonnegative. `d = 0` is a
/// degenerate ball that excludes nothing (the estimate carried no
/// information) and is accepted. A ball that covers the whole body
/// contradicts `D ⊆ Ω` and is reported as [`Error::EmptyIntersection`].
pub fn ball_complement_enclosure(
    omega_rect: Rect,
    probes: &[(Vec2, f64)],
    grid_n: usize,
) -> Result<BallEnclosure> {
    omega_rect.validate()?;
    if grid_n == 0 {
        return Err(Error::InvalidInput(
            "diagnostic grid needs at least one cell".into(),
        ));
    }
    for &(p, d) in probes {
        if omega_rect.distance_to(p) <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "probe point ({}, {}) must lie strictly outside the body",
                p.x, p.y
            )));
        }
        if !(d >= 0.0) || !d.is_finite() {
            return Err(Error::InvalidInput(format!(
                "distance estimate for probe ({}, {}) must be finite and >= 0, got {d}",
                p.x, p.y
            )));
        }
        if omega_rect.corners().iter().all(|&c| (c - p).norm() < d) {
            return Err(Error::EmptyIntersection {
                detail: format!(
                    "ball around ({}, {}) with radius {d} covers the whole body; \
                     the distance estimate contradicts a cavity inside the body",
                    p.x, p.y
                ),
            });
        }
    }

    let balls: Vec<ExclusionBall> = probes
        .iter()
        .map(|&(center, radius)| ExclusionBall { center, radius })
        .collect();
    let mut enclosure = BallEnclosure {
        omega_rect,
        balls,
        grid_n,
        remaining: Vec::new(),
    };
    let mut remaining = Vec::with_capacity(grid_n * grid_n);
    for j in 0..grid_n {
        for i in 0..grid_n {
            let c = enclosure.cell_center(i, j);
            remaining.push(
                enclosure
                    .balls
                    .iter()
                    .all(|b| (c - b.center).norm() >= b.radius),
            );
        }
    }
    enclosure.remaining = remaining;
    Ok(enclosure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v2(x: f64, y: f64) -> Vec2 {
        Vec2::new(x, y)
    }

    fn body() -> Rect {
        Rect::new(v2(-0.5, -0.5), v2(0.5, 0.5))
    }

    fn exact_table(shape: &Shape, count: usize) -> SupportTable {
        let entries = uniform_directions(count)
            .into_iter()
            .map(|omega| SupportEntry {
                omega,
                h_est: shape.support_raw(omega),
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            })
            .collect();
        SupportTable::new(body(), entries).unwrap()
    }

    #[test]
    fn four_axis_directions_cut_a_square() {
        let a = 0.3;
        let entries = uniform_directions(4)
            .into_iter()
            .map(|omega| SupportEntry {
                omega,
                h_est: a,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            })
            .collect();
        let table = SupportTable::new(body(), entries).unwrap();
        let hull = halfplane_intersection(&table).unwrap();
        assert_eq!(hull.vertices.len(), 4, "square must have 4 vertices");
        assert!(
            (hull.area() - 4.0 * a * a).abs() < 1e-12,
            "area {} vs {}",
            hull.area(),
            4.0 * a * a
        );
        for v in &hull.vertices {
            assert!(
                (v.x.abs() - a).abs() < 1e-12 && (v.y.abs() - a).abs() < 1e-12,
                "vertex ({}, {}) is not a corner of the square",
                v.x,
                v.y
            );
        }
    }

    #[test]
    fn dense_directions_circumscribe_a_disk_tightly() {
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        let table = exact_table(&disk, 64);
        let hull = halfplane_intersection(&table).unwrap();
        // The tangent polygon's vertices sit at radius r·sec(θ) with
        // θ = π/64 (half the angle between adjacent tangent directions), so
        // the exact Hausdorff distance is r(sec θ − 1).
        let theta = std::f64::consts::PI / 64.0;
        let bound = 0.15 * (1.0 / theta.cos() - 1.0);
        let d = support_distance(&hull, &disk, 4096);
        assert!(
            d <= bound * (1.0 + 1e-9),
            "support distance {d:.6e} exceeds circumscription bound {bound:.6e}"
        );
        assert!(
            d >= bound * 0.9,
            "support distance {d:.6e} suspiciously far below the sharp bound {bound:.6e}"
        );
    }

    #[test]
    fn enclosure_is_sound_for_exact_estimates() {
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        let table = exact_table(&disk, 16);
        let hull = halfplane_intersection(&table).unwrap();
        // Every point of the cavity must survive every constraint.
        for k in 0..256 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 256.0;
            let p = v2(0.1 + 0.15 * t.cos(), 0.05 + 0.15 * t.sin());
            assert!(
                hull.contains(p, 1e-9),
                "cavity boundary point ({}, {}) escaped the hull",
                p.x,
                p.y
            );
        }
        assert!(hull.contains(v2(0.1, 0.05), 1e-9), "cavity center escaped");
        // And the hull must stay inside the body.
        for v in &hull.vertices {
            assert!(
                body().contains(*v) || body().distance_to(*v) < 1e-9,
                "hull vertex ({}, {}) left the body rectangle",
                v.x,
                v.y
            );
        }
    }

    #[test]
    fn adding_a_direction_never_enlarges_the_hull() {
        let disk = Shape::disk(v2(0.1, 0.05), 0.15);
        let coarse = exact_table(&disk, 16);
        let hull16 = halfplane_intersection(&coarse).unwrap();

        let mut entries = coarse.entries.clone();
        let extra = v2(0.3f64.cos(), 0.3f64.sin());
        entries.push(SupportEntry {
            omega: extra,
            h_est: disk.support_raw(extra),
            detected: true,
            residual_norm: 0.0,
            n_samples: 7,
        });
        let fine = SupportTable::new(body(), entries).unwrap();
        let hull17 = halfplane_intersection(&fine).unwrap();

        for v in &hull17.vertices {
            assert!(
                hull16.contains(*v, 1e-9),
                "vertex ({}, {}) of the refined hull left the coarse hull",
                v.x,
                v.y
            );
        }
        assert!(
            hull17.area() <= hull16.area() + 1e-12,
            "area grew: {} -> {}",
            hull16.area(),
            hull17.area()
        );
    }

    #[test]
    fn directions_in_a_half_circle_are_rejected() {
        let dirs = [v2(1.0, 0.0), v2(0.0, 1.0), v2(-1.0, 0.0)];
        let entries = dirs
            .iter()
            .map(|&omega| SupportEntry {
                omega,
                h_est: 0.3,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            })
            .collect();
        let table = SupportTable::new(body(), entries).unwrap();
        let err = halfplane_intersection(&table).unwrap_err();
        assert!(
            matches!(err, Error::InvalidInput(_)),
            "expected the spanning precondition to fire, got {err:?}"
        );
    }

    #[test]
    fn duplicate_directions_are_rejected() {
        let entries = vec![
            SupportEntry {
                omega: v2(1.0, 0.0),
                h_est: 0.3,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            },
            SupportEntry {
                omega: v2(1.0, 0.0),
                h_est: 0.2,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            },
        ];
        assert!(SupportTable::new(body(), entries).is_err());
    }

    #[test]
    fn inconsistent_estimates_report_empty_intersection() {
        // x ≤ −0.4 together with −x ≤ −0.4 (x ≥ 0.4) is infeasible.
        let constraints = [
            (v2(1.0, 0.0), -0.4),
            (v2(-1.0, 0.0), -0.4),
            (v2(0.0, 1.0), 0.3),
            (v2(0.0, -1.0), 0.3),
        ];
        let entries = constraints
            .iter()
            .map(|&(omega, h_est)| SupportEntry {
                omega,
                h_est,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            })
            .collect();
        let table = SupportTable::new(body(), entries).unwrap();
        let err = halfplane_intersection(&table).unwrap_err();
        match err {
            Error::EmptyIntersection { detail } => {
                assert!(
                    detail.contains("omega = (1.000000, 0.000000)"),
                    "detail must carry the constraint set, got: {detail}"
                );
            }
            other => panic!("expected EmptyIntersection, got {other:?}"),
        }
    }

    #[test]
    fn estimates_beyond_the_body_are_flagged() {
        let entries = vec![
            SupportEntry {
                omega: v2(1.0, 0.0),
                h_est: 0.7,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            },
            SupportEntry {
                omega: v2(0.0, 1.0),
                h_est: 0.2,
                detected: true,
                residual_norm: 0.0,
                n_samples: 7,
            },
        ];
        let table = SupportTable::new(body(), entries).unwrap();
        assert_eq!(table.exceeds_body, vec![true, false]);
    }

    #[test]
    fn single_ball_excludes_exactly_its_intersection_with_the_body() {
        let p = v2(1.5, 0.0);
        let d = 1.1;
        let enc = ball_complement_enclosure(body(), &[(p, d)], 128).unwrap();
        // Cell-by-cell the indicator must agree with the defining predicate.
        for j in 0..128 {
            for i in 0..128 {
                let c = enc.cell_center(i, j);
                assert_eq!(
                    enc.is_remaining(i, j),
                    (c - p).norm() >= d,
                    "cell ({i}, {j}) disagrees with the ball predicate"
                );
            }
        }
        // Excluded area ≈ circular segment: the chord x = 0.5 sits at
        // distance 1.0 from the center, giving r²·acos(1/r) − √(r²−1).
        let segment = d * d * (1.0 / d).acos() - (d * d - 1.0).sqrt();
        let excluded = body().area() - enc.remaining_area();
        assert!(
            (excluded - segment).abs() < 0.01,
            "excluded area {excluded:.5} vs analytic segment {segment:.5}"
        );
    }

    #[test]
    fn compass_probes_leave_a_region_containing_the_disk() {
        let disk_center = v2(0.0, 0.0);
        let r = 0.15;
        let probes: Vec<(Vec2, f64)> = [v2(1.5, 0.0), v2(-1.5, 0.0), v2(0.0, 1.5), v2(0.0, -1.5)]
            .iter()
            .map(|&p| (p, (p - disk_center).norm() - r))
            .collect();
        let coarse = ball_complement_enclosure(body(), &probes, 96).unwrap();
        // Soundness: every cavity point survives with margin.
        for k in 0..128 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 128.0;
            let q = v2(r * t.cos(), r * t.sin());
            assert!(
                coarse.point_remains(q, 1e-9),
                "cavity point ({}, {}) was excluded",
                q.x,
                q.y
            );
        }
        // The raster area converges: a 4× finer grid must agree to a few
        // boundary-cell widths of the curved exclusion fronts.
        let fine = ball_complement_enclosure(body(), &probes, 384).unwrap();
        let (a_coarse, a_fine) = (coarse.remaining_area(), fine.remaining_area());
        let h = 1.0 / 96.0;
        assert!(
            (a_coarse - a_fine).abs() < 6.0 * h,
            "coarse {a_coarse:.5} vs fine {a_fine:.5} remaining area"
        );
        // The region keeps more than the disk itself (overshoot is expected)
        // but must stay well below the whole body.
        let disk_area = std::f64::consts::PI * r * r;
        assert!(a_fine > disk_area, "remaining {a_fine:.5} lost cavity area");
        assert!(a_fine < body().area(), "no exclusion happened at all");
    }

    #[test]
    fn zero_distance_excludes_nothing() {
        let enc = ball_complement_enclosure(body(), &[(v2(1.5, 0.0), 0.0)], 32).unwrap();
        assert!(
            enc.remaining.iter().all(|&r| r),
            "degenerate ball must exclude nothing"
        );
        assert!((enc.remaining_area() - body().area()).abs() < 1e-12);
    }

    #[test]
    fn ball_covering_the_body_is_rejected() {
        let err = ball_complement_enclosure(body(), &[(v2(1.5, 0.0), 3.0)], 32).unwrap_err();
        assert!(
            matches!(err, Error::EmptyIntersection { .. }),
            "expected the covering ball to be flagged, got {err:?}"
        );
    }

    #[test]
    fn probe_point_inside_the_body_is_rejected() {
        let err = ball_complement_enclosure(body(), &[(v2(0.2, 0.0), 0.1)], 32).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        /// With exact support data for a random disk, the hull always
        /// contains the disk and shrinks (weakly) when a direction is added.
        #[test]
        fn prop_exact_hull_contains_disk_and_is_monotone(
            cx in -0.2f64..0.2,
            cy in -0.2f64..0.2,
            r in 0.05f64..0.2,
            count in 5usize..24,
            extra_angle in 0.0f64..std::f64::consts::TAU,
        ) {
            let disk = Shape::disk(v2(cx, cy), r);
            let table = exact_table(&disk, count);
            let hull = halfplane_intersection(&table).unwrap();
            prop_assert!(hull.contains(v2(cx, cy), 1e-9));
            prop_assert!(hull.area() >= std::f64::consts::PI * r * r - 1e-9);

            let extra = v2(extra_angle.cos(), extra_angle.sin());
            if table.entries.iter().all(|e| (e.omega - extra).norm() > 1e-6) {
                let mut entries = table.entries.clone();
                entries.push(SupportEntry {
                    omega: extra,
                    h_est: disk.support_raw(extra),
                    detected: true,
                    residual_norm: 0.0,
                    n_samples: 7,
                });
                let refined = SupportTable::new(body(), entries).unwrap();
                let hull2 = halfplane_intersection(&refined).unwrap();
                prop_assert!(hull2.area() <= hull.area() + 1e-12);
            }
        }
    }
}
