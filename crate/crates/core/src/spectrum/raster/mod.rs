//! Finite-difference spectra on a uniform grid.
//!
//! Unknowns live at cell centres. Interior links use the 5-point stencil.
//! A link that leaves the domain is treated by boundary condition: Dirichlet
//! puts `u = 0` on the boundary crossing a fraction `theta` of the link away
//! (symmetric cut-cell rule, `+1/(theta h^2)` on the diagonal), Neumann drops
//! the link (zero flux through the face, i.e. a mirror ghost node). For a
//! pixel mask the boundary is the pixel face, `theta = 1/2`; for analytic
//! circles and rectangles the exact crossing is used, which makes the scheme
//! second order.

mod solver;

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{take_count, BoundaryCondition, CrossSection, ModeLabel, Spectrum, SpectrumError, TransverseMode};
use solver::{largest_inverse_eigenvalues, SkylineMatrix};

/// Relative tolerance for merging numerically coincident grid eigenvalues.
pub const RASTER_DEGENERACY_TOL: f64 = 1e-8;
/// Neumann zero-mode threshold is `ZERO_MODE_SCALE / h^2`.
pub const ZERO_MODE_SCALE: f64 = 1e-8;
/// At most this fraction of the grid points may be requested as modes.
pub const MAX_MODE_FRACTION: f64 = 0.1;

const MIN_THETA: f64 = 1e-6;

/// Boolean occupancy grid, row 0 at the top of the file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Mask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl Mask {
    pub fn from_fn(rows: usize, cols: usize, mut inside: impl FnMut(usize, usize) -> bool) -> Mask {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                cells.push(inside(r, c));
            }
        }
        Mask { rows, cols, cells }
    }

    /// Pixels of an `n x n` grid whose centres fall inside the inscribed disk.
    pub fn disk(n: usize) -> Mask {
        let half = n as f64 / 2.0;
        Mask::from_fn(n, n, |r, c| {
            let x = c as f64 + 0.5 - half;
            let y = r as f64 + 0.5 - half;
            x * x + y * y < half * half
        })
    }

    /// Parse rows of `0`/`1` characters. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Mask, SpectrumError> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let before = cells.len();
            for ch in line.chars() {
                match ch {
                    '0' => cells.push(false),
                    '1' => cells.push(true),
                    other => {
                        return Err(SpectrumError::MalformedMask(format!(
                            "line {}: unexpected character {other:?}",
                            lineno + 1
                        )))
                    }
                }
            }
            let width = cells.len() - before;
            match cols {
                None => cols = Some(width),
                Some(w) if w != width => {
                    return Err(SpectrumError::MalformedMask(format!(
                        "line {}: row has {width} cells, expected {w}",
                        lineno + 1
                    )))
                }
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or(SpectrumError::EmptyMask)?;
        Ok(Mask { rows, cols, cells })
    }

    pub fn from_file(path: &Path) -> std::io::Result<Result<Mask, SpectrumError>> {
        Ok(Mask::parse(&std::fs::read_to_string(path)?))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        r < self.rows && c < self.cols && self.cells[r * self.cols + c]
    }

    pub fn count_inside(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    /// Number of 4-connected components of the inside set.
    pub fn components(&self) -> usize {
        let mut seen = vec![false; self.cells.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.cells.len() {
            if !self.cells[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                let (r, c) = (k / self.cols, k % self.cols);
                let mut visit = |rr: usize, cc: usize| {
                    let j = rr * self.cols + cc;
                    if self.cells[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                };
                if r > 0 {
                    visit(r - 1, c);
                }
                if r + 1 < self.rows {
                    visit(r + 1, c);
                }
                if c > 0 {
                    visit(r, c - 1);
                }
                if c + 1 < self.cols {
                    visit(r, c + 1);
                }
            }
        }
        count
    }

    pub fn validate_connected(&self) -> Result<(), SpectrumError> {
        match self.components() {
            0 => Err(SpectrumError::EmptyMask),
            1 => Ok(()),
            components => Err(SpectrumError::DisconnectedMask { components }),
        }
    }

    /// Split every pixel into `k x k` pixels.
    pub fn subdivide(&self, k: usize) -> Mask {
        Mask::from_fn(self.rows * k, self.cols * k, |r, c| self.get(r / k, c / k))
    }
}

impl TryFrom<Vec<String>> for Mask {
    type Error = SpectrumError;

    fn try_from(rows: Vec<String>) -> Result<Self, Self::Error> {
        Mask::parse(&rows.join("\n"))
    }
}

impl From<Mask> for Vec<String> {
    fn from(m: Mask) -> Self {
        (0..m.rows)
            .map(|r| (0..m.cols).map(|c| if m.get(r, c) { '1' } else { '0' }).collect())
            .collect()
    }
}

/// Domain to discretise.
#[derive(Debug, Clone, PartialEq)]
pub enum RasterShape {
    Mask(Mask),
    /// Disk of the given radius, boundary resolved with exact cut fractions.
    Circle { radius: f64 },
    /// `a x b` rectangle, boundary resolved with exact cut fractions.
    Rectangle { a: f64, b: f64 },
}

impl RasterShape {
    fn cross_section(&self, h: f64) -> CrossSection {
        match self {
            RasterShape::Mask(mask) => CrossSection::RasterMask { mask: mask.clone(), h },
            RasterShape::Circle { radius } => CrossSection::Circle { radius: *radius },
            RasterShape::Rectangle { a, b } => CrossSection::Rectangle { a: *a, b: *b },
        }
    }

    /// Same domain at spacing `h / 2`.
    fn refined(&self) -> RasterShape {
        match self {
            RasterShape::Mask(mask) => RasterShape::Mask(mask.subdivide(2)),
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterOptions {
    /// Repeat the solve at `h / 2` and attach Richardson error estimates.
    pub richardson: bool,
    /// Number of lowest eigenvalues compared against the refined grid.
    pub max_checked: usize,
}

impl Default for RasterOptions {
    fn default() -> Self {
        RasterOptions {
            richardson: true,
            max_checked: 64,
        }
    }
}

/// Discretisation diagnostics attached to a raster spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RasterInfo {
    pub h: f64,
    pub grid_points: usize,
    /// Eigenvalues (per set) compared with the `h / 2` grid.
    pub modes_checked: usize,
    /// Largest Richardson estimate of the relative error in `lambda_sq`.
    pub max_relative_error: Option<f64>,
}

impl RasterInfo {
    pub fn merge(a: RasterInfo, b: RasterInfo) -> RasterInfo {
        let max_relative_error = match (a.max_relative_error, b.max_relative_error) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        RasterInfo {
            h: a.h,
            grid_points: a.grid_points.max(b.grid_points),
            modes_checked: a.modes_checked.max(b.modes_checked),
            max_relative_error,
        }
    }
}

/// Cell-centred grid over the shape's bounding box.
struct Grid {
    nx: usize,
    ny: usize,
    h: f64,
    x0: f64,
    y0: f64,
    shape: RasterShape,
}

impl Grid {
    fn new(shape: &RasterShape, h: f64) -> Grid {
        let (nx, ny, x0, y0) = match shape {
            RasterShape::Mask(m) => (m.cols(), m.rows(), 0.0, 0.0),
            RasterShape::Circle { radius } => {
                let n = (2.0 * radius / h - 1e-9).ceil().max(1.0) as usize;
                let half = n as f64 * h / 2.0;
                (n, n, -half, -half)
            }
            RasterShape::Rectangle { a, b } => (
                (a / h - 1e-9).ceil().max(1.0) as usize,
                (b / h - 1e-9).ceil().max(1.0) as usize,
                0.0,
                0.0,
            ),
        };
        Grid {
            nx,
            ny,
            h,
            x0,
            y0,
            shape: shape.clone(),
        }
    }

    fn centre(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.h,
            self.y0 + (j as f64 + 0.5) * self.h,
        )
    }

    fn inside(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return false;
        }
        let (i, j) = (i as usize, j as usize);
        match &self.shape {
            RasterShape::Mask(m) => m.get(j, i),
            RasterShape::Circle { radius } => {
                let (x, y) = self.centre(i, j);
                x * x + y * y < radius * radius
            }
            RasterShape::Rectangle { a, b } => {
                let (x, y) = self.centre(i, j);
                x < *a && y < *b
            }
        }
    }

    /// Fraction of the link from inside node `(i, j)` towards `(di, dj)` at
    /// which the boundary is crossed.
    fn cut_fraction(&self, i: usize, j: usize, di: isize, dj: isize) -> f64 {
        let (x, y) = self.centre(i, j);
        let dist = match &self.shape {
            RasterShape::Mask(_) => return 0.5,
            RasterShape::Circle { radius } => {
                let (along, across) = if di != 0 { (x * di as f64, y) } else { (y * dj as f64, x) };
                (radius * radius - across * across).max(0.0).sqrt() - along
            }
            RasterShape::Rectangle { a, b } => match (di, dj) {
                (1, _) => a - x,
                (-1, _) => x,
                (_, 1) => b - y,
                _ => y,
            },
        };
        (dist / self.h).clamp(MIN_THETA, 1.0)
    }
}

/// Grid Laplacian plus its inside-node count.
fn assemble(grid: &Grid, bc: BoundaryCondition, shift: f64) -> (SkylineMatrix, usize) {
    let mut index = vec![usize::MAX; grid.nx * grid.ny];
    let mut n = 0;
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if grid.inside(i as isize, j as isize) {
                index[j * grid.nx + i] = n;
                n += 1;
            }
        }
    }
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let mut entries = Vec::with_capacity(3 * n);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let k = index[j * grid.nx + i];
            if k == usize::MAX {
                continue;
            }
            let mut diag = shift;
            for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
                let (ni, nj) = (i as isize + di, j as isize + dj);
                if grid.inside(ni, nj) {
                    diag += inv_h2;
                    let nb = index[nj as usize * grid.nx + ni as usize];
                    if nb < k {
                        entries.push((k, nb, -inv_h2));
                    }
                } else if bc == BoundaryCondition::Dirichlet {
                    diag += inv_h2 / grid.cut_fraction(i, j, di, dj);
                }
            }
            entries.push((k, k, diag));
        }
    }
    (SkylineMatrix::from_lower(n, &entries), n)
}

/// Lowest `count` eigenvalues of the grid operator (Neumann zero mode
/// included), ascending, plus the number of grid points.
pub fn raster_eigenvalues(
    shape: &RasterShape,
    h: f64,
    bc: BoundaryCondition,
    count: usize,
) -> Result<(Vec<f64>, usize), SpectrumError> {
    let grid = Grid::new(shape, h);
    // Neumann: the singular operator is shifted by 1/A, well below the first
    // physical eigenvalue, and the shift removed afterwards
    let shift = match bc {
        BoundaryCondition::Dirichlet => 0.0,
        BoundaryCondition::Neumann => 1.0 / (grid.nx as f64 * grid.ny as f64 * h * h),
    };
    let (matrix, points) = assemble(&grid, bc, shift);
    if points == 0 {
        return Err(SpectrumError::EmptyMask);
    }
    let chol = matrix.cholesky()?;
    let inv = largest_inverse_eigenvalues(&chol, count.min(points))?;
    Ok((inv.iter().map(|t| 1.0 / t - shift).collect(), points))
}

/// Raster spectrum of `shape` at spacing `h`: at least `n` eigenfunctions for
/// `bc`, with the Neumann constant mode removed.
pub fn raster_spectrum(
    shape: &RasterShape,
    h: f64,
    n: usize,
    bc: BoundaryCondition,
    opts: &RasterOptions,
) -> Result<Spectrum, SpectrumError> {
    let cs = shape.cross_section(h);
    cs.validate()?;
    if n == 0 {
        return Err(SpectrumError::InvalidParameter("mode count must be at least 1".into()));
    }
    let grid = Grid::new(shape, h);
    let points = (0..grid.ny)
        .flat_map(|j| (0..grid.nx).map(move |i| (i, j)))
        .filter(|&(i, j)| grid.inside(i as isize, j as isize))
        .count();
    if points == 0 {
        return Err(SpectrumError::EmptyMask);
    }
    let limit = (MAX_MODE_FRACTION * points as f64).floor() as usize;
    if n > limit {
        return Err(SpectrumError::TooManyModes {
            requested: n,
            limit,
            points,
        });
    }
    if let RasterShape::Mask(_) = shape {
    } else if grid_components(&grid) != 1 {
        return Err(SpectrumError::InvalidParameter(
            "grid too coarse to resolve the domain".into(),
        ));
    }

    let zero_modes = usize::from(bc == BoundaryCondition::Neumann);
    // headroom so the last multiplet is complete
    let want = n + zero_modes + 8;
    let (raw, _) = raster_eigenvalues(shape, h, bc, want)?;
    let threshold = ZERO_MODE_SCALE / (h * h);
    let physical: Vec<f64> = raw.into_iter().filter(|&v| v.abs() >= threshold).collect();

    let errors = if opts.richardson {
        let checked = physical.len().min(opts.max_checked).min(n + 8);
        let (fine_raw, _) = raster_eigenvalues(&shape.refined(), h / 2.0, bc, checked + zero_modes)?;
        let fine: Vec<f64> = fine_raw.into_iter().filter(|&v| v.abs() >= threshold / 4.0).collect();
        // second order: lambda^2(h) - lambda^2(0) ~ (4/3) (lambda^2(h) - lambda^2(h/2))
        let est: Vec<f64> = physical
            .iter()
            .zip(&fine)
            .map(|(c, f)| (4.0 / 3.0) * (c - f).abs())
            .collect();
        Some(est)
    } else {
        None
    };

    let mut modes: Vec<TransverseMode> = Vec::new();
    for (idx, &v) in physical.iter().enumerate() {
        let err = errors.as_ref().and_then(|e| e.get(idx).copied());
        match modes.last_mut() {
            Some(last) if (v - last.lambda_sq).abs() <= RASTER_DEGENERACY_TOL * v => {
                last.degeneracy += 1;
                if let (Some(a), Some(b)) = (last.error_estimate, err) {
                    last.error_estimate = Some(a.max(b));
                }
            }
            _ => {
                let mut m = TransverseMode::new(v, 1, bc, ModeLabel::Raster { index: idx as u32 });
                m.error_estimate = err;
                modes.push(m);
            }
        }
    }
    let total: usize = modes.iter().map(|m| m.degeneracy as usize).sum();
    if total < n {
        return Err(SpectrumError::TooFewModes { needed: n, got: total });
    }
    let modes = take_count(modes, n);
    let modes_checked = errors.as_ref().map_or(0, Vec::len);
    let max_relative_error = errors.as_ref().map(|e| {
        e.iter()
            .zip(&physical)
            .take(n.max(1))
            .map(|(err, v)| err / v)
            .fold(0.0, f64::max)
    });
    let info = RasterInfo {
        h,
        grid_points: points,
        modes_checked,
        max_relative_error,
    };
    Ok(Spectrum::from_modes(modes, cs, n, Some(info)))
}

fn grid_components(grid: &Grid) -> usize {
    let mask = Mask::from_fn(grid.ny, grid.nx, |r, c| grid.inside(c as isize, r as isize));
    mask.components()
}
