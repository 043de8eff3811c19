//! Finite-volume spatial discretization and the conjugate-gradient solver.
//!
//! The discrete operator is the cell-centered five-point approximation of
//! `−Δ` on the fluid cells of a [`CellMask`]. For each face shared by two
//! fluid cells the standard two-point flux contributes; faces against cavity
//! cells or against `∂Ω` contribute nothing, which makes the homogeneous
//! Neumann condition on the (staircase) cavity boundary and on the outer
//! boundary the *natural* condition — no boundary assembly at all. Prescribed
//! outer fluxes enter only through the load vector ([`flux_load`]).
//!
//! The resulting matrix is symmetric positive semidefinite with nullspace
//! spanned by the constant vector; every production solve adds a positive
//! shift (`τ` or `1/Δt`), so [`cg_solve`] works on the SPD operator
//! `A + shift·I` with Jacobi preconditioning.

use crate::geometry::Vec2;
use crate::{Error, Result};

/// Classification of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellTag {
    /// Conducting material (the region `Ω∖D̄` the PDE lives on).
    Fluid,
    /// Insulating cavity interior; carries no unknown.
    Cavity,
}

/// Uniform `n × n` cell grid over the body rectangle with per-cell tags.
///
/// Cells are indexed by `(i, j)` with linear index `j·n + i`; cell `(i, j)`
/// has center `origin + ((i+½)·hx, (j+½)·hy)`. `fluid_index` renumbers the
/// fluid cells densely (cavity cells map to `-1`); `fluid_cells` is the
/// inverse map.
#[derive(Clone, Debug)]
pub struct CellMask {
    pub n: usize,
    pub origin: Vec2,
    pub hx: f64,
    pub hy: f64,
    pub tags: Vec<CellTag>,
    pub fluid_index: Vec<i64>,
    pub fluid_cells: Vec<usize>,
    /// Resolution diagnostics produced at rasterization time.
    pub warnings: Vec<String>,
}

impl CellMask {
    pub fn new(
        n: usize,
        origin: Vec2,
        hx: f64,
        hy: f64,
        tags: Vec<CellTag>,
        warnings: Vec<String>,
    ) -> Self {
        assert_eq!(tags.len(), n * n, "one tag per cell");
        let mut fluid_index = vec![-1i64; n * n];
        let mut fluid_cells = Vec::new();
        for (cell, tag) in tags.iter().enumerate() {
            if *tag == CellTag::Fluid {
                fluid_index[cell] = fluid_cells.len() as i64;
                fluid_cells.push(cell);
            }
        }
        CellMask {
            n,
            origin,
            hx,
            hy,
            tags,
            fluid_index,
            fluid_cells,
            warnings,
        }
    }

    /// Cell width along x (square scenes have `hx = hy`, so this is *the*
    /// mesh size `h`).
    pub fn h(&self) -> f64 {
        self.hx
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (i as f64 + 0.5) * self.hx,
            self.origin.y + (j as f64 + 0.5) * self.hy,
        )
    }

    pub fn is_fluid(&self, i: usize, j: usize) -> bool {
        self.tags[self.idx(i, j)] == CellTag::Fluid
    }

    pub fn n_fluid(&self) -> usize {
        self.fluid_cells.len()
    }

    pub fn cell_area(&self) -> f64 {
        self.hx * self.hy
    }

    /// Linear indices of all cavity cells.
    pub fn cavity_cells(&self) -> Vec<usize> {
        (0..self.n * self.n)
            .filter(|&c| self.tags[c] == CellTag::Cavity)
            .collect()
    }

    /// The same grid with every cell retagged fluid (the cavity-free body).
    pub fn without_cavities(&self) -> CellMask {
        CellMask::new(
            self.n,
            self.origin,
            self.hx,
            self.hy,
            vec![CellTag::Fluid; self.n * self.n],
            Vec::new(),
        )
    }
}

/// Symmetric sparse matrix in compressed-row storage (five-point pattern).
#[derive(Clone, Debug)]
pub struct SparseOperator {
    pub dim: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub vals: Vec<f64>,
    pub symmetric: bool,
}

impl SparseOperator {
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = A·x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for row in 0..self.dim {
            let mut acc = 0.0;
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.col_idx[k] as usize];
            }
            y[row] = acc;
        }
    }

    /// Diagonal entries (zero where a row has no stored diagonal).
    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for row in 0..self.dim {
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                if self.col_idx[k] as usize == row {
                    d[row] = self.vals[k];
                }
            }
        }
        d
    }

    /// Stored entry `(i, j)`, or 0 if outside the pattern (test helper).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            if self.col_idx[k] as usize == j {
                return self.vals[k];
            }
        }
        0.0
    }
}

/// Which side of the rectangle a boundary face lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Bottom,
    Right,
    Top,
    Left,
}

/// One face of a boundary cell lying on `∂Ω`.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryFace {
    /// Linear grid index of the adjacent cell.
    pub cell: usize,
    pub side: Side,
    /// Face midpoint on `∂Ω`.
    pub center: Vec2,
    /// Outward unit normal of the body (axis-aligned).
    pub normal: Vec2,
    /// Face length (`hx` on horizontal sides, `hy` on vertical sides).
    pub length: f64,
    /// Distance from the adjacent cell center to the face (`h/2` across).
    pub offset: f64,
}

/// All outer faces, tiling `∂Ω` exactly. Deterministic order: bottom edge
/// left→right, then right edge bottom→top, then top edge left→right, then
/// left edge bottom→top.
#[derive(Clone, Debug)]
pub struct BoundaryFaceSet {
    pub faces: Vec<BoundaryFace>,
}

impl BoundaryFaceSet {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.faces.iter().map(|f| f.length).sum()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BoundaryFace> {
        self.faces.iter()
    }
}

/// Builds the outer boundary faces of the mask's rectangle.
///
/// Errors when a boundary cell is tagged cavity: the theory requires the
/// cavity closure strictly inside the body, and a cavity cell touching `∂Ω`
/// means the resolution cannot separate the two boundaries.
pub fn boundary_faces(mask: &CellMask) -> Result<BoundaryFaceSet> {
    let n = mask.n;
    let check = |i: usize, j: usize| -> Result<()> {
        if !mask.is_fluid(i, j) {
            return Err(Error::InvalidInput(format!(
                "boundary cell ({i}, {j}) is tagged cavity; refine the grid so the cavity stays interior"
            )));
        }
        Ok(())
    };
    for i in 0..n {
        check(i, 0)?;
        check(i, n - 1)?;
    }
    for j in 0..n {
        check(0, j)?;
        check(n - 1, j)?;
    }
    Ok(boundary_faces_of_grid(n, mask.origin, mask.hx, mask.hy))
}

/// Boundary faces from the rectangle data alone (no cavity knowledge); this
/// is what the indicator stage uses so that it never touches the scene's
/// cavity description.
pub fn boundary_faces_of_grid(n: usize, origin: Vec2, hx: f64, hy: f64) -> BoundaryFaceSet {
    let mut faces = Vec::with_capacity(4 * n);
    let x1 = origin.x + hx * n as f64;
    let y1 = origin.y + hy * n as f64;
    for i in 0..n {
        faces.push(BoundaryFace {
            cell: i,
            side: Side::Bottom,
            center: Vec2::new(origin.x + (i as f64 + 0.5) * hx, origin.y),
            normal: Vec2::new(0.0, -1.0),
            length: hx,
            offset: 0.5 * hy,
        });
    }
    for j in 0..n {
        faces.push(BoundaryFace {
            cell: j * n + (n - 1),
            side: Side::Right,
            center: Vec2::new(x1, origin.y + (j as f64 + 0.5) * hy),
            normal: Vec2::new(1.0, 0.0),
            length: hy,
            offset: 0.5 * hx,
        });
    }
    for i in 0..n {
        faces.push(BoundaryFace {
            cell: (n - 1) * n + i,
            side: Side::Top,
            center: Vec2::new(origin.x + (i as f64 + 0.5) * hx, y1),
            normal: Vec2::new(0.0, 1.0),
            length: hx,
            offset: 0.5 * hy,
        });
    }
    for j in 0..n {
        faces.push(BoundaryFace {
            cell: j * n,
            side: Side::Left,
            center: Vec2::new(origin.x, origin.y + (j as f64 + 0.5) * hy),
            normal: Vec2::new(-1.0, 0.0),
            length: hy,
            offset: 0.5 * hx,
        });
    }
    BoundaryFaceSet { faces }
}

/// One staircase face separating a fluid cell from a cavity cell.
#[derive(Clone, Copy, Debug)]
pub struct InteriorFace {
    /// Linear grid index of the fluid cell.
    pub fluid_cell: usize,
    /// Face midpoint.
    pub center: Vec2,
    /// Unit normal pointing out of the fluid (into the cavity).
    pub normal: Vec2,
    /// Face length (`hx` on horizontal faces, `hy` on vertical faces).
    pub length: f64,
}

/// All fluid/cavity staircase faces, the discrete `∂D`. Order is
/// deterministic: row-major over fluid cells, each cell listing its
/// west/east/south/north cavity neighbors in that order.
pub fn cavity_interface(mask: &CellMask) -> Vec<InteriorFace> {
    let n = mask.n;
    let mut faces = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if !mask.is_fluid(i, j) {
                continue;
            }
            let c = mask.cell_center(i, j);
            let cell = mask.idx(i, j);
            if i > 0 && !mask.is_fluid(i - 1, j) {
                faces.push(InteriorFace {
                    fluid_cell: cell,
                    center: Vec2::new(c.x - 0.5 * mask.hx, c.y),
                    normal: Vec2::new(-1.0, 0.0),
                    length: mask.hy,
                });
            }
            if i + 1 < n && !mask.is_fluid(i + 1, j) {
                faces.push(InteriorFace {
                    fluid_cell: cell,
                    center: Vec2::new(c.x + 0.5 * mask.hx, c.y),
                    normal: Vec2::new(1.0, 0.0),
                    length: mask.hy,
                });
            }
            if j > 0 && !mask.is_fluid(i, j - 1) {
                faces.push(InteriorFace {
                    fluid_cell: cell,
                    center: Vec2::new(c.x, c.y - 0.5 * mask.hy),
                    normal: Vec2::new(0.0, -1.0),
                    length: mask.hx,
                });
            }
            if j + 1 < n && !mask.is_fluid(i, j + 1) {
                faces.push(InteriorFace {
                    fluid_cell: cell,
                    center: Vec2::new(c.x, c.y + 0.5 * mask.hy),
                    normal: Vec2::new(0.0, 1.0),
                    length: mask.hx,
                });
            }
        }
    }
    faces
}

/// Assembles the five-point finite-volume `−Δ` on the fluid cells with
/// natural (zero-flux) conditions on every cavity face and on `∂Ω`.
///
/// Errors when the fluid region is not face-connected: the probing identity
/// assumes a connected conducting region, and a disconnected component would
/// silently never feel the boundary flux.
pub fn build_neumann_laplacian(mask: &CellMask) -> Result<SparseOperator> {
    let nf = mask.n_fluid();
    if nf == 0 {
        return Err(Error::InvalidInput("mask has no fluid cell".into()));
    }
    check_fluid_connected(mask)?;

    let n = mask.n;
    let wx = 1.0 / (mask.hx * mask.hx);
    let wy = 1.0 / (mask.hy * mask.hy);

    let mut row_ptr = Vec::with_capacity(nf + 1);
    let mut col_idx = Vec::with_capacity(5 * nf);
    let mut vals = Vec::with_capacity(5 * nf);
    row_ptr.push(0);

    for &cell in &mask.fluid_cells {
        let i = cell % n;
        let j = cell / n;
        let mut diag = 0.0;
        // Gather fluid neighbors in column order (linear index order):
        // south, west, self, east, north.
        let push_neighbor = |col_idx: &mut Vec<u32>,
                             vals: &mut Vec<f64>,
                             ii: usize,
                             jj: usize,
                             w: f64,
                             diag: &mut f64| {
            if mask.is_fluid(ii, jj) {
                col_idx.push(mask.fluid_index[mask.idx(ii, jj)] as u32);
                vals.push(-w);
                *diag += w;
            }
        };
        let self_pos_marker = u32::MAX;
        if j > 0 {
            push_neighbor(&mut col_idx, &mut vals, i, j - 1, wy, &mut diag);
        }
        if i > 0 {
            push_neighbor(&mut col_idx, &mut vals, i - 1, j, wx, &mut diag);
        }
        let diag_slot = vals.len();
        col_idx.push(self_pos_marker);
        vals.push(0.0);
        if i + 1 < n {
            push_neighbor(&mut col_idx, &mut vals, i + 1, j, wx, &mut diag);
        }
        if j + 1 < n {
            push_neighbor(&mut col_idx, &mut vals, i, j + 1, wy, &mut diag);
        }
        col_idx[diag_slot] = mask.fluid_index[cell] as u32;
        vals[diag_slot] = diag;
        row_ptr.push(vals.len());
    }

    Ok(SparseOperator {
        dim: nf,
        row_ptr,
        col_idx,
        vals,
        symmetric: true,
    })
}

/// Breadth-first search over fluid cells through shared faces.
fn check_fluid_connected(mask: &CellMask) -> Result<()> {
    let n = mask.n;
    let nf = mask.n_fluid();
    let mut seen = vec![false; nf];
    let mut queue = std::collections::VecDeque::new();
    let start = mask.fluid_cells[0];
    seen[mask.fluid_index[start] as usize] = true;
    queue.push_back(start);
    let mut reached = 1usize;
    while let Some(cell) = queue.pop_front() {
        let i = cell % n;
        let j = cell / n;
        let visit = |ii: usize,
                     jj: usize,
                     seen: &mut Vec<bool>,
                     queue: &mut std::collections::VecDeque<usize>,
                     reached: &mut usize| {
            if mask.is_fluid(ii, jj) {
                let f = mask.fluid_index[mask.idx(ii, jj)] as usize;
                if !seen[f] {
                    seen[f] = true;
                    *reached += 1;
                    queue.push_back(mask.idx(ii, jj));
                }
            }
        };
        if i > 0 {
            visit(i - 1, j, &mut seen, &mut queue, &mut reached);
        }
        if i + 1 < n {
            visit(i + 1, j, &mut seen, &mut queue, &mut reached);
        }
        if j > 0 {
            visit(i, j - 1, &mut seen, &mut queue, &mut reached);
        }
        if j + 1 < n {
            visit(i, j + 1, &mut seen, &mut queue, &mut reached);
        }
    }
    if reached != nf {
        // Count components for the error message.
        let mut comp = 1usize;
        let mut seen2 = seen;
        loop {
            let Some(next) = (0..nf).find(|&f| !seen2[f]) else {
                break;
            };
            comp += 1;
            let mut queue = std::collections::VecDeque::new();
            seen2[next] = true;
            queue.push_back(mask.fluid_cells[next]);
            while let Some(cell) = queue.pop_front() {
                let i = cell % n;
                let j = cell / n;
                let visit =
                    |ii: usize,
                     jj: usize,
                     seen2: &mut Vec<bool>,
                     queue: &mut std::collections::VecDeque<usize>| {
                        if mask.is_fluid(ii, jj) {
                            let f = mask.fluid_index[mask.idx(ii, jj)] as usize;
                            if !seen2[f] {
                                seen2[f] = true;
                                queue.push_back(mask.idx(ii, jj));
                            }
                        }
                    };
                if i > 0 {
                    visit(i - 1, j, &mut seen2, &mut queue);
                }
                if i + 1 < n {
                    visit(i + 1, j, &mut seen2, &mut queue);
                }
                if j > 0 {
                    visit(i, j - 1, &mut seen2, &mut queue);
                }
                if j + 1 < n {
                    visit(i, j + 1, &mut seen2, &mut queue);
                }
            }
        }
        return Err(Error::DisconnectedFluid { components: comp });
    }
    Ok(())
}

/// Load vector for prescribed outer Neumann flux `g` (one value per face,
/// positive = heat flowing in along the outward normal convention of the
/// flux data): `b[cell] += g·(face length)/(cell area)`.
pub fn flux_load(mask: &CellMask, faces: &BoundaryFaceSet, g: &[f64]) -> Result<Vec<f64>> {
    if g.len() != faces.len() {
        return Err(Error::InvalidInput(format!(
            "flux data has {} entries for {} faces",
            g.len(),
            faces.len()
        )));
    }
    let mut b = vec![0.0; mask.n_fluid()];
    let inv_area = 1.0 / mask.cell_area();
    for (face, &gv) in faces.iter().zip(g) {
        let fi = mask.fluid_index[face.cell];
        if fi < 0 {
            return Err(Error::InvalidInput(
                "boundary face adjacent to a cavity cell".into(),
            ));
        }
        b[fi as usize] += gv * face.length * inv_area;
    }
    Ok(b)
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relaxation weight for the modified incomplete Cholesky factorization:
/// the fraction of each dropped fill-in entry folded back into the diagonal.
/// `1.0` preserves row sums exactly (strongest clustering of the
/// preconditioned spectrum); slightly less hedges against pivot loss on
/// nearly singular shifts.
const MIC_RELAXATION: f64 = 0.97;

/// Cumulative conjugate-gradient iteration count for this process.
static CG_ITERATIONS: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);

/// Total CG iterations performed by [`cg_solve`] since process start.
/// Diagnostic only (solver cost accounting in benchmarks and tests); the
/// counter never influences the arithmetic.
pub fn cg_iterations_total() -> u64 {
    CG_ITERATIONS.load(std::sync::atomic::Ordering::Relaxed)
}

/// Zero-fill modified incomplete Cholesky factor of `A + shift·I`.
///
/// `L` keeps exactly the lower-triangular sparsity of `A`. Fill-in produced
/// when a node is eliminated is not stored; following Gustafsson, a
/// `MIC_RELAXATION` fraction of each dropped entry is subtracted from the two
/// diagonal positions it would have coupled, which approximately preserves
/// row sums and clusters the preconditioned spectrum far better than plain
/// dropping on these five-point stencils. The factorization exists whenever
/// the shifted matrix is a symmetric M-matrix, which covers every operator
/// assembled here (nonpositive off-diagonals, weak diagonal dominance).
/// Applying `(L Lᵀ)⁻¹` costs about one matvec.
struct IncompleteCholesky {
    /// Strict lower triangle of `L`, CSR layout with ascending columns.
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
    /// Diagonal of `L`.
    diag: Vec<f64>,
}

impl IncompleteCholesky {
    /// Factors `A + shift·I` by right-looking elimination on the upper
    /// triangle; returns `None` if a pivot loses positivity (the matrix is
    /// then not an M-matrix and the caller falls back to diagonal
    /// preconditioning). Rows of `A` must store ascending columns, as
    /// [`build_neumann_laplacian`] produces.
    fn factor(a: &SparseOperator, shift: f64) -> Option<Self> {
        let dim = a.dim;

        // Strict-upper entries of each row (the candidates L[i][k] with
        // i > k produced when eliminating k), as a CSR slice of A's layout.
        let mut upper_start = vec![0usize; dim];
        let mut diag = vec![0.0; dim];
        for k in 0..dim {
            let mut seen_diag = false;
            for p in a.row_ptr[k]..a.row_ptr[k + 1] {
                let c = a.col_idx[p] as usize;
                if c == k {
                    diag[k] = a.vals[p] + shift;
                    upper_start[k] = p + 1;
                    seen_diag = true;
                }
            }
            if !seen_diag {
                return None;
            }
        }
        let mut work: Vec<f64> = a.vals.clone();

        // Lower-triangle skeleton by transposing the upper entries: row i of
        // L collects every (k, i) upper entry, and the k's arrive ascending.
        let mut row_len = vec![0usize; dim];
        for k in 0..dim {
            for p in upper_start[k]..a.row_ptr[k + 1] {
                row_len[a.col_idx[p] as usize] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0usize);
        for i in 0..dim {
            row_ptr.push(row_ptr[i] + row_len[i]);
        }
        let nnz = row_ptr[dim];
        let mut col_idx = vec![0u32; nnz];
        let mut vals = vec![0.0f64; nnz];
        let mut fill_pos = row_ptr[..dim].to_vec();

        for k in 0..dim {
            let pivot = diag[k];
            if pivot <= 0.0 || !pivot.is_finite() {
                return None;
            }
            let lk = pivot.sqrt();
            diag[k] = lk;

            let up = upper_start[k]..a.row_ptr[k + 1];
            // Scale the column below the pivot and apply the diagonal part
            // of the Schur update.
            for p in up.clone() {
                let i = a.col_idx[p] as usize;
                let l = work[p] / lk;
                work[p] = l;
                diag[i] -= l * l;
                let slot = fill_pos[i];
                col_idx[slot] = k as u32;
                vals[slot] = l;
                fill_pos[i] = slot + 1;
            }
            // Off-diagonal Schur entries couple two distinct neighbors of k.
            // On the five-point stencils assembled here such pairs are never
            // adjacent, so the entry is always dropped fill: compensate both
            // diagonals (row-sum style). Treating an in-pattern pair as
            // dropped would only weaken the preconditioner, never its
            // symmetry or definiteness, so arbitrary symmetric operators
            // remain safe.
            let (s, e) = (up.start, up.end);
            for p in s..e {
                for q in (p + 1)..e {
                    let drop = MIC_RELAXATION * work[p] * work[q];
                    diag[a.col_idx[p] as usize] -= drop;
                    diag[a.col_idx[q] as usize] -= drop;
                }
            }
        }

        Some(Self {
            row_ptr,
            col_idx,
            vals,
            diag,
        })
    }

    /// `z ← (L Lᵀ)⁻¹ r` via one forward and one backward triangular sweep.
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let dim = self.diag.len();
        debug_assert_eq!(r.len(), dim);
        debug_assert_eq!(z.len(), dim);
        z.copy_from_slice(r);
        // Forward: L y = r.
        for i in 0..dim {
            let mut acc = z[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc -= self.vals[k] * z[self.col_idx[k] as usize];
            }
            z[i] = acc / self.diag[i];
        }
        // Backward: Lᵀ z = y, right-looking column updates off the same rows.
        for i in (0..dim).rev() {
            let zi = z[i] / self.diag[i];
            z[i] = zi;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                z[self.col_idx[k] as usize] -= self.vals[k] * zi;
            }
        }
    }
}

/// Reusable preconditioner for [`cg_solve_with`]: the modified incomplete
/// Cholesky factor of `A + shift·I`, with diagonal scaling as fallback when
/// the factorization breaks down.
///
/// A factor built for one shift remains a valid (symmetric positive
/// definite) preconditioner for any other nonnegative shift of the same
/// operator — convergence degrades gradually with the shift ratio — so time
/// marches amortize one factorization over many nearby steps.
pub struct Preconditioner {
    ic: Option<IncompleteCholesky>,
    inv_diag: Vec<f64>,
}

impl Preconditioner {
    /// Builds the preconditioner for `A + shift·I`.
    pub fn build(a: &SparseOperator, shift: f64) -> Self {
        let ic = IncompleteCholesky::factor(a, shift);
        let inv_diag = if ic.is_none() {
            a.diagonal().iter().map(|d| 1.0 / (d + shift)).collect()
        } else {
            Vec::new()
        };
        Self { ic, inv_diag }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match &self.ic {
            Some(f) => f.apply(r, z),
            None => {
                for k in 0..r.len() {
                    z[k] = self.inv_diag[k] * r[k];
                }
            }
        }
    }
}

/// Preconditioned conjugate gradients for `(A + shift·I) x = b` with a
/// caller-supplied preconditioner (see [`Preconditioner::build`]).
///
/// `x0` seeds the iteration (pass the previous time level when marching).
/// Convergence criterion: `‖b − (A+shift)x‖ ≤ tol·‖b‖`; `b = 0` returns the
/// zero vector immediately.
pub fn cg_solve_with(
    a: &SparseOperator,
    shift: f64,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    x0: Option<&[f64]>,
    pc: &Preconditioner,
) -> Result<Vec<f64>> {
    let dim = a.dim;
    assert_eq!(b.len(), dim);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(vec![0.0; dim]);
    }

    let precondition = |r: &[f64], z: &mut [f64]| pc.apply(r, z);

    let mut x = match x0 {
        Some(seed) => {
            assert_eq!(seed.len(), dim);
            seed.to_vec()
        }
        None => vec![0.0; dim],
    };

    let mut ax = vec![0.0; dim];
    a.matvec(&x, &mut ax);
    let mut r: Vec<f64> = (0..dim).map(|k| b[k] - ax[k] - shift * x[k]).collect();
    let mut z = vec![0.0; dim];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(ri, zi)| ri * zi).sum();
    let mut res = norm(&r);

    use std::sync::atomic::Ordering;
    for iter in 0..max_iter {
        if res <= tol * b_norm {
            CG_ITERATIONS.fetch_add(iter as u64, Ordering::Relaxed);
            return Ok(x);
        }
        a.matvec(&p, &mut ax);
        for k in 0..dim {
            ax[k] += shift * p[k];
        }
        let pap: f64 = p.iter().zip(&ax).map(|(pi, qi)| pi * qi).sum();
        if pap <= 0.0 {
            return Err(Error::CgDidNotConverge {
                iters: iter,
                residual: res / b_norm,
                tol,
            });
        }
        let alpha = rz / pap;
        for k in 0..dim {
            x[k] += alpha * p[k];
            r[k] -= alpha * ax[k];
        }
        res = norm(&r);
        precondition(&r, &mut z);
        let rz_new: f64 = r.iter().zip(&z).map(|(ri, zi)| ri * zi).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..dim {
            p[k] = z[k] + beta * p[k];
        }
    }
    CG_ITERATIONS.fetch_add(max_iter as u64, Ordering::Relaxed);
    if res <= tol * b_norm {
        return Ok(x);
    }
    Err(Error::CgDidNotConverge {
        iters: max_iter,
        residual: res / b_norm,
        tol,
    })
}

/// Preconditioned conjugate gradients for `(A + shift·I) x = b`, building
/// the preconditioner on the spot. Prefer [`cg_solve_with`] when solving
/// many systems with the same operator.
pub fn cg_solve(
    a: &SparseOperator,
    shift: f64,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    x0: Option<&[f64]>,
) -> Result<Vec<f64>> {
    cg_solve_with(
        a,
        shift,
        b,
        tol,
        max_iter,
        x0,
        &Preconditioner::build(a, shift),
    )
}

/// Discrete Dirichlet energy `∫ |∇u|²` of a fluid-cell field, by squared
/// face differences: each fluid-fluid face contributes
/// `(Δu/dist)² · (face length · dist)`.
pub fn dirichlet_energy(mask: &CellMask, u: &[f64]) -> f64 {
    assert_eq!(u.len(), mask.n_fluid());
    let n = mask.n;
    let mut acc = 0.0;
    // Horizontal neighbors: distance hx, face length hy.
    let wx = mask.hy / mask.hx;
    // Vertical neighbors: distance hy, face length hx.
    let wy = mask.hx / mask.hy;
    for j in 0..n {
        for i in 0..n {
            if !mask.is_fluid(i, j) {
                continue;
            }
            let ui = u[mask.fluid_index[mask.idx(i, j)] as usize];
            if i + 1 < n && mask.is_fluid(i + 1, j) {
                let ue = u[mask.fluid_index[mask.idx(i + 1, j)] as usize];
                acc += (ue - ui) * (ue - ui) * wx;
            }
            if j + 1 < n && mask.is_fluid(i, j + 1) {
                let un = u[mask.fluid_index[mask.idx(i, j + 1)] as usize];
                acc += (un - ui) * (un - ui) * wy;
            }
        }
    }
    acc
}

/// Discrete `∫ u²` over the fluid cells (cell-area weights).
pub fn l2_sq(mask: &CellMask, u: &[f64]) -> f64 {
    assert_eq!(u.len(), mask.n_fluid());
    mask.cell_area() * u.iter().map(|x| x * x).sum::<f64>()
}
