//! Scene description and exact geometric oracles.
//!
//! The body `Ω` is an axis-aligned rectangle; cavities are disks, axis-aligned
//! rectangles, or finite unions of those. Both families admit closed-form
//! support functions `h_D(ω) = sup_{x∈D} x·ω` and point distances
//! `d_D(p) = inf_{y∈D} |y−p|`, which serve as ground truth for everything the
//! reconstruction pipeline estimates from boundary data.
//!
//! [`Scene::rasterize`] maps the continuous scene onto an `n × n` cell grid:
//! a cell is tagged `Cavity` when its center lies in a cavity, `Fluid`
//! otherwise (staircase approximation of `∂D`).

use serde::{Deserialize, Serialize};

use crate::grid::{CellMask, CellTag};
use crate::{Error, Result};

/// Tolerance on `| |ω| − 1 |` for directions that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Plane vector / point. Serialized as a two-element array `[x, y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(s * self.x, s * self.y)
    }

    /// Errors unless `|self| = 1` within [`UNIT_TOL`].
    pub fn require_unit(self) -> Result<Vec2> {
        let norm = self.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(self)
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(self) -> Result<Vec2> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput(format!(
                "cannot normalize vector ({}, {})",
                self.x, self.y
            )));
        }
        Ok(self.scale(1.0 / norm))
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.y + other.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.y - other.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Axis-aligned rectangle `[lo.x, hi.x] × [lo.y, hi.y]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl Rect {
    pub const fn new(lo: Vec2, hi: Vec2) -> Self {
        Rect { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi.x - self.lo.x
    }

    pub fn height(&self) -> f64 {
        self.hi.y - self.lo.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width() + self.height())
    }

    /// Closure membership.
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.lo.x && p.x <= self.hi.x && p.y >= self.lo.y && p.y <= self.hi.y
    }

    /// Euclidean distance from `p` to the closed rectangle (0 inside).
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let dx = (self.lo.x - p.x).max(p.x - self.hi.x).max(0.0);
        let dy = (self.lo.y - p.y).max(p.y - self.hi.y).max(0.0);
        dx.hypot(dy)
    }

    /// Corners in counterclockwise order starting at `lo`.
    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.lo,
            Vec2::new(self.hi.x, self.lo.y),
            self.hi,
            Vec2::new(self.lo.x, self.hi.y),
        ]
    }

    /// Support function of the rectangle for an arbitrary (not necessarily
    /// unit) direction; positively homogeneous of degree 1.
    pub fn support_raw(&self, w: Vec2) -> f64 {
        (self.lo.x * w.x).max(self.hi.x * w.x) + (self.lo.y * w.y).max(self.hi.y * w.y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.x < self.hi.x && self.lo.y < self.hi.y) {
            return Err(Error::InvalidScene(format!(
                "rectangle corners must be strictly ordered per axis (lo = ({}, {}), hi = ({}, {}))",
                self.lo.x, self.lo.y, self.hi.x, self.hi.y
            )));
        }
        Ok(())
    }
}

/// Cavity shape: exact support function and distance in closed form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Disk { center: Vec2, radius: f64 },
    Rect { lo: Vec2, hi: Vec2 },
    Union { members: Vec<Shape> },
}

impl Shape {
    pub fn disk(center: Vec2, radius: f64) -> Self {
        Shape::Disk { center, radius }
    }

    pub fn rect(lo: Vec2, hi: Vec2) -> Self {
        Shape::Rect { lo, hi }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Shape::Disk { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidScene(format!(
                        "disk radius must be positive (got {radius})"
                    )));
                }
            }
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi).validate()?,
            Shape::Union { members } => {
                if members.is_empty() {
                    return Err(Error::InvalidScene("union of zero shapes".into()));
                }
                for m in members {
                    m.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Support function `h(ω) = sup_{x ∈ shape} x·ω` for a unit direction.
    pub fn support_function(&self, omega: Vec2) -> Result<f64> {
        omega.require_unit()?;
        Ok(self.support_raw(omega))
    }

    /// Support value for an arbitrary direction, without the unit-length
    /// check; positively homogeneous of degree 1 in `w`.
    pub fn support_raw(&self, w: Vec2) -> f64 {
        match self {
            Shape::Disk { center, radius } => center.dot(w) + radius * w.norm(),
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi).support_raw(w),
            Shape::Union { members } => members
                .iter()
                .map(|m| m.support_raw(w))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Euclidean distance from `p` to the shape. Errors when `p` lies in the
    /// shape's closure (the probing theory needs exterior points only).
    pub fn distance_to_point(&self, p: Vec2) -> Result<f64> {
        if self.contains(p) {
            return Err(Error::PointInsideShape { x: p.x, y: p.y });
        }
        Ok(self.distance_raw(p))
    }

    fn distance_raw(&self, p: Vec2) -> f64 {
        match self {
            Shape::Disk { center, radius } => ((p - *center).norm() - radius).max(0.0),
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi).distance_to(p),
            Shape::Union { members } => members
                .iter()
                .map(|m| m.distance_raw(p))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Closure membership (used for cell tagging; the boundary has measure
    /// zero, so the closed/open choice does not affect any estimate).
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Shape::Disk { center, radius } => (p - *center).norm_sq() <= radius * radius,
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi).contains(p),
            Shape::Union { members } => members.iter().any(|m| m.contains(p)),
        }
    }

    /// Tight axis-aligned bounding box.
    pub fn bbox(&self) -> Rect {
        match self {
            Shape::Disk { center, radius } => Rect::new(
                Vec2::new(center.x - radius, center.y - radius),
                Vec2::new(center.x + radius, center.y + radius),
            ),
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi),
            Shape::Union { members } => {
                let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for m in members {
                    let b = m.bbox();
                    lo.x = lo.x.min(b.lo.x);
                    lo.y = lo.y.min(b.lo.y);
                    hi.x = hi.x.max(b.hi.x);
                    hi.y = hi.y.max(b.hi.y);
                }
                Rect::new(lo, hi)
            }
        }
    }

    /// Exact area (unions are required to be disjoint by scene validation).
    pub fn area(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
            Shape::Rect { lo, hi } => Rect::new(*lo, *hi).area(),
            Shape::Union { members } => members.iter().map(|m| m.area()).sum(),
        }
    }

    /// Thinnest extent of the shape (diameter of the narrowest cross
    /// section); used to warn when the raster cannot resolve a cavity.
    pub fn min_feature(&self) -> f64 {
        match self {
            Shape::Disk { radius, .. } => 2.0 * radius,
            Shape::Rect { lo, hi } => (hi.x - lo.x).min(hi.y - lo.y),
            Shape::Union { members } => members
                .iter()
                .map(|m| m.min_feature())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// True when the closures of `self` and `other` do not intersect.
    pub fn disjoint_from(&self, other: &Shape) -> bool {
        match (self, other) {
            (Shape::Union { members }, _) => members.iter().all(|m| m.disjoint_from(other)),
            (_, Shape::Union { members }) => members.iter().all(|m| self.disjoint_from(m)),
            (
                Shape::Disk {
                    center: c1,
                    radius: r1,
                },
                Shape::Disk {
                    center: c2,
                    radius: r2,
                },
            ) => (*c1 - *c2).norm() > r1 + r2,
            (Shape::Disk { center, radius }, Shape::Rect { lo, hi })
            | (Shape::Rect { lo, hi }, Shape::Disk { center, radius }) => {
                Rect::new(*lo, *hi).distance_to(*center) > *radius
            }
            (Shape::Rect { lo: l1, hi: h1 }, Shape::Rect { lo: l2, hi: h2 }) => {
                h1.x < l2.x || h2.x < l1.x || h1.y < l2.y || h2.y < l1.y
            }
        }
    }
}

/// The full problem geometry: body, cavities, and final measurement time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scene {
    pub omega_rect: Rect,
    pub cavities: Vec<Shape>,
    pub final_time: f64,
}

impl Scene {
    pub fn new(omega_rect: Rect, cavities: Vec<Shape>, final_time: f64) -> Result<Self> {
        let scene = Scene {
            omega_rect,
            cavities,
            final_time,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Checks every structural invariant: positive body area, `T > 0`, valid
    /// shapes, cavity closures strictly inside the body, pairwise disjoint
    /// cavities.
    pub fn validate(&self) -> Result<()> {
        self.omega_rect.validate()?;
        if !(self.final_time > 0.0) {
            return Err(Error::InvalidScene(format!(
                "final_time must be positive (got {})",
                self.final_time
            )));
        }
        for (k, cavity) in self.cavities.iter().enumerate() {
            cavity.validate()?;
            let b = cavity.bbox();
            let inside = b.lo.x > self.omega_rect.lo.x
                && b.lo.y > self.omega_rect.lo.y
                && b.hi.x < self.omega_rect.hi.x
                && b.hi.y < self.omega_rect.hi.y;
            if !inside {
                return Err(Error::InvalidScene(format!(
                    "cavity #{k} is not strictly inside the body rectangle"
                )));
            }
        }
        for a in 0..self.cavities.len() {
            for b in (a + 1)..self.cavities.len() {
                if !self.cavities[a].disjoint_from(&self.cavities[b]) {
                    return Err(Error::InvalidScene(format!(
                        "cavities #{a} and #{b} are not disjoint"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Support function of the union of all cavities (errors when there is
    /// no cavity — an empty sup has no finite value).
    pub fn cavity_support(&self, omega: Vec2) -> Result<f64> {
        omega.require_unit()?;
        if self.cavities.is_empty() {
            return Err(Error::InvalidInput(
                "scene has no cavity; support function undefined".into(),
            ));
        }
        Ok(self
            .cavities
            .iter()
            .map(|c| c.support_raw(omega))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Tags an `n × n` cell grid over the body rectangle: `Cavity` where the
    /// cell center falls inside a cavity, `Fluid` elsewhere. Warnings (not
    /// errors) are attached for cavities thinner than two cells or too small
    /// to receive any cell at this resolution.
    pub fn rasterize(&self, n: usize) -> Result<CellMask> {
        self.validate()?;
        if n < 8 {
            return Err(Error::InvalidInput(format!(
                "rasterization needs n >= 8 cells per axis (got {n})"
            )));
        }
        let hx = self.omega_rect.width() / n as f64;
        let hy = self.omega_rect.height() / n as f64;
        let origin = self.omega_rect.lo;

        let mut tags = vec![CellTag::Fluid; n * n];
        let mut cavity_cell_counts = vec![0usize; self.cavities.len()];
        for j in 0..n {
            for i in 0..n {
                let center = Vec2::new(
                    origin.x + (i as f64 + 0.5) * hx,
                    origin.y + (j as f64 + 0.5) * hy,
                );
                for (k, cavity) in self.cavities.iter().enumerate() {
                    if cavity.contains(center) {
                        tags[j * n + i] = CellTag::Cavity;
                        cavity_cell_counts[k] += 1;
                        break;
                    }
                }
            }
        }

        let mut warnings = Vec::new();
        let cell = hx.max(hy);
        for (k, cavity) in self.cavities.iter().enumerate() {
            if cavity.min_feature() < 2.0 * cell {
                warnings.push(format!(
                    "cavity #{k} is thinner than two cells ({:.3e} < {:.3e}); resolution insufficient",
                    cavity.min_feature(),
                    2.0 * cell
                ));
            }
            if cavity_cell_counts[k] == 0 {
                warnings.push(format!(
                    "cavity #{k} received no cells at n = {n}; it is invisible to the solver"
                ));
            }
        }

        Ok(CellMask::new(n, origin, hx, hy, tags, warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit(angle: f64) -> Vec2 {
        Vec2::new(angle.cos(), angle.sin())
    }

    #[test]
    fn disk_support_along_axes() {
        let disk = Shape::disk(Vec2::new(0.1, 0.0), 0.2);
        let right = disk.support_function(Vec2::new(1.0, 0.0)).unwrap();
        let left = disk.support_function(Vec2::new(-1.0, 0.0)).unwrap();
        assert!(
            (right - 0.3).abs() < 1e-15,
            "h((1,0)) = {right}, expected 0.3"
        );
        assert!(
            (left - 0.1).abs() < 1e-15,
            "h((-1,0)) = {left}, expected 0.1"
        );
    }

    #[test]
    fn rect_support_diagonal_corner() {
        let a = 0.35;
        let sq = Shape::rect(Vec2::new(-a, -a), Vec2::new(a, a));
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let h = sq.support_function(Vec2::new(w, w)).unwrap();
        assert!(
            (h - a * 2f64.sqrt()).abs() < 1e-15,
            "corner should maximize: h = {h}, expected {}",
            a * 2f64.sqrt()
        );
    }

    #[test]
    fn support_requires_unit_direction() {
        let disk = Shape::disk(Vec2::new(0.0, 0.0), 1.0);
        let err = disk.support_function(Vec2::new(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonUnitDirection { .. }));
    }

    #[test]
    fn disk_distance_to_exterior_point() {
        let disk = Shape::disk(Vec2::new(0.1, 0.0), 0.2);
        assert_eq!(disk.distance_to_point(Vec2::new(2.0, 0.0)).unwrap(), 1.7);
    }

    #[test]
    fn rect_distance_vertical_drop() {
        let sq = Shape::rect(Vec2::new(-0.2, -0.2), Vec2::new(0.2, 0.2));
        let d = sq.distance_to_point(Vec2::new(0.2, 1.2)).unwrap();
        assert!((d - 1.0).abs() < 1e-15, "vertical drop to edge: {d}");
    }

    #[test]
    fn union_distance_is_min_over_members() {
        let a = Shape::disk(Vec2::new(-0.3, 0.0), 0.1);
        let b = Shape::disk(Vec2::new(0.3, 0.0), 0.1);
        let u = Shape::Union {
            members: vec![a.clone(), b.clone()],
        };
        let p = Vec2::new(1.0, 0.4);
        let du = u.distance_to_point(p).unwrap();
        let da = a.distance_to_point(p).unwrap();
        let db = b.distance_to_point(p).unwrap();
        assert_eq!(du, da.min(db));
    }

    #[test]
    fn distance_rejects_interior_point() {
        let disk = Shape::disk(Vec2::new(0.0, 0.0), 0.5);
        let err = disk.distance_to_point(Vec2::new(0.1, 0.1)).unwrap_err();
        assert!(matches!(err, Error::PointInsideShape { .. }));
    }

    #[test]
    fn disk_width_equals_diameter() {
        let disk = Shape::disk(Vec2::new(0.17, -0.05), 0.23);
        for k in 0..16 {
            let omega = unit(k as f64 * std::f64::consts::PI / 8.0)
                .normalized()
                .unwrap();
            let width = disk.support_raw(omega) + disk.support_raw(omega.scale(-1.0));
            assert!(
                (width - 0.46).abs() < 1e-14,
                "disk width along any direction is the diameter: {width}"
            );
        }
    }

    proptest! {
        /// h(λ·w) = λ·h(w) for λ > 0, checked pre-normalization.
        #[test]
        fn support_is_positively_homogeneous(
            angle in 0.0..std::f64::consts::TAU,
            lambda in 0.1..10.0f64,
            cx in -0.3..0.3f64,
            cy in -0.3..0.3f64,
        ) {
            let shapes = [
                Shape::disk(Vec2::new(cx, cy), 0.2),
                Shape::rect(Vec2::new(cx - 0.1, cy - 0.2), Vec2::new(cx + 0.3, cy + 0.1)),
            ];
            let w = unit(angle);
            for shape in &shapes {
                let lhs = shape.support_raw(w.scale(lambda));
                let rhs = lambda * shape.support_raw(w);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
            }
        }

        /// Width h(ω) + h(−ω) is nonnegative for any shape and direction.
        #[test]
        fn width_is_nonnegative(angle in 0.0..std::f64::consts::TAU) {
            let u = Shape::Union { members: vec![
                Shape::disk(Vec2::new(-0.2, 0.1), 0.05),
                Shape::rect(Vec2::new(0.1, -0.3), Vec2::new(0.3, -0.1)),
            ]};
            let omega = unit(angle);
            let width = u.support_raw(omega) + u.support_raw(omega.scale(-1.0));
            prop_assert!(width >= 0.0);
        }
    }

    fn reference_scene() -> Scene {
        Scene::new(
            Rect::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5)),
            vec![Shape::disk(Vec2::new(0.1, 0.05), 0.15)],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn rasterize_empty_scene_is_all_fluid() {
        let scene = Scene::new(
            Rect::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5)),
            vec![],
            1.0,
        )
        .unwrap();
        let mask = scene.rasterize(16).unwrap();
        assert_eq!(mask.n_fluid(), 256);
        assert!(mask.warnings.is_empty());
    }

    #[test]
    fn rasterize_disk_cell_count_near_analytic_area() {
        let scene = reference_scene();
        let mask = scene.rasterize(128).unwrap();
        let cavity_cells = mask.tags.iter().filter(|t| **t == CellTag::Cavity).count();
        let analytic = std::f64::consts::PI * 0.15 * 0.15;
        let counted = cavity_cells as f64 * mask.hx * mask.hy;
        let rel = (counted - analytic).abs() / analytic;
        assert!(
            rel < 0.03,
            "staircase area {counted} vs analytic {analytic} (rel {rel:.4})"
        );
    }

    #[test]
    fn rasterize_grid_aligned_rect_is_exact() {
        // A rect cavity whose edges lie exactly on cell faces of a 16-cell
        // grid over [0,1]^2: cells [4,8) x [4,12) in each axis.
        let scene = Scene::new(
            Rect::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0)),
            vec![Shape::rect(Vec2::new(0.25, 0.25), Vec2::new(0.5, 0.75))],
            1.0,
        )
        .unwrap();
        let mask = scene.rasterize(16).unwrap();
        let cavity_cells = mask.tags.iter().filter(|t| **t == CellTag::Cavity).count();
        assert_eq!(
            cavity_cells,
            4 * 8,
            "grid-aligned rect has no staircase error"
        );
    }

    #[test]
    fn rasterize_partitions_cells_and_refinement_shrinks_area_error() {
        let scene = reference_scene();
        let analytic = std::f64::consts::PI * 0.15 * 0.15;
        let mut errors = Vec::new();
        for n in [16usize, 32, 64, 128, 256] {
            let mask = scene.rasterize(n).unwrap();
            let cavity = mask.tags.iter().filter(|t| **t == CellTag::Cavity).count();
            let fluid = mask.n_fluid();
            assert_eq!(cavity + fluid, n * n, "tags partition all cells");
            let err = (cavity as f64 * mask.hx * mask.hy - analytic).abs();
            // Midpoint classification keeps the error within one boundary
            // ring of cells (the error oscillates with grid alignment, so
            // only the envelope is monotone).
            let h = 1.0 / n as f64;
            let ring = 2.0 * std::f64::consts::PI * 0.15 * h;
            assert!(
                err < ring,
                "n = {n}: area error {err:.2e} exceeds boundary ring {ring:.2e}"
            );
            errors.push(err);
        }
        assert!(
            errors.last().unwrap() < &errors[0],
            "refinement 16 → 256 should shrink the area error: {errors:?}"
        );
    }

    #[test]
    fn rasterize_warns_on_thin_cavity() {
        let scene = Scene::new(
            Rect::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5)),
            vec![Shape::disk(Vec2::new(0.0, 0.0), 0.04)],
            1.0,
        )
        .unwrap();
        let mask = scene.rasterize(16).unwrap(); // cell 1/16 = 0.0625 > 2r/2
        assert!(
            !mask.warnings.is_empty(),
            "a 0.08-wide cavity on a 0.0625 grid must warn"
        );
    }

    #[test]
    fn scene_rejects_cavity_touching_boundary() {
        let err = Scene::new(
            Rect::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5)),
            vec![Shape::disk(Vec2::new(0.3, 0.0), 0.2)],
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidScene(_)));
    }

    #[test]
    fn scene_rejects_overlapping_cavities() {
        let err = Scene::new(
            Rect::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5)),
            vec![
                Shape::disk(Vec2::new(-0.1, 0.0), 0.15),
                Shape::disk(Vec2::new(0.1, 0.0), 0.15),
            ],
            1.0,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidScene(_)));
    }

    #[test]
    fn shape_serde_round_trip() {
        let u = Shape::Union {
            members: vec![
                Shape::disk(Vec2::new(0.1, 0.05), 0.15),
                Shape::rect(Vec2::new(-0.4, -0.4), Vec2::new(-0.2, -0.2)),
            ],
        };
        let json = serde_json::to_string(&u).unwrap();
        let back: Shape = serde_json::from_str(&json).unwrap();
        let omega = Vec2::new(0.6, 0.8);
        assert_eq!(u.support_raw(omega), back.support_raw(omega));
    }
}
