//! Grid geometry and boolean cell masks.
//!
//! Row 0 is the top of the viewport (largest imaginary part). All
//! neighborhoods are Chebyshev (8-neighbor).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    Plane,
    /// Riemann sphere; the point at infinity is a single flag bit on masks.
    Sphere,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    center: Complex64,
    half_width: f64,
    half_height: f64,
    cols: usize,
    rows: usize,
    metric: Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub col: usize,
    pub row: usize,
}

impl Cell {
    pub fn new(col: usize, row: usize) -> Self {
        Cell { col, row }
    }

    pub fn chebyshev(self, other: Cell) -> usize {
        self.col.abs_diff(other.col).max(self.row.abs_diff(other.row))
    }
}

impl Viewport {
    pub fn new(
        center: Complex64,
        half_width: f64,
        half_height: f64,
        cols: usize,
        rows: usize,
        metric: Metric,
    ) -> Result<Self> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(Error::InvalidViewport("center must be finite".into()));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidViewport("half_width must be positive".into()));
        }
        if !(half_height > 0.0 && half_height.is_finite()) {
            return Err(Error::InvalidViewport("half_height must be positive".into()));
        }
        if cols == 0 || rows == 0 {
            return Err(Error::InvalidViewport("cols and rows must be positive".into()));
        }
        Ok(Viewport {
            center,
            half_width,
            half_height,
            cols,
            rows,
            metric,
        })
    }

    /// Square viewport centered at `center`.
    pub fn square(center: Complex64, half: f64, cells: usize, metric: Metric) -> Result<Self> {
        Self::new(center, half, half, cells, cells, metric)
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn half_height(&self) -> f64 {
        self.half_height
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.cols * self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.cols as f64
    }

    pub fn cell_height(&self) -> f64 {
        2.0 * self.half_height / self.rows as f64
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_width().min(self.cell_height())
    }

    pub fn left(&self) -> f64 {
        self.center.re - self.half_width
    }

    pub fn top(&self) -> f64 {
        self.center.im + self.half_height
    }

    #[inline]
    pub fn index(&self, cell: Cell) -> usize {
        cell.row * self.cols + cell.col
    }

    #[inline]
    pub fn cell_at(&self, index: usize) -> Cell {
        Cell {
            col: index % self.cols,
            row: index / self.cols,
        }
    }

    #[inline]
    pub fn cell_center(&self, cell: Cell) -> Complex64 {
        Complex64::new(
            self.left() + (cell.col as f64 + 0.5) * self.cell_width(),
            self.top() - (cell.row as f64 + 0.5) * self.cell_height(),
        )
    }

    /// The cell containing `z`, or `None` outside the rectangle. The right and
    /// bottom edges belong to the last column and row.
    #[inline]
    pub fn locate(&self, z: Complex64) -> Option<Cell> {
        let x = (z.re - self.left()) / self.cell_width();
        let y = (self.top() - z.im) / self.cell_height();
        if !(x >= 0.0 && y >= 0.0) {
            return None;
        }
        let col = if x == self.cols as f64 { self.cols - 1 } else { x as usize };
        let row = if y == self.rows as f64 { self.rows - 1 } else { y as usize };
        (col < self.cols && row < self.rows).then_some(Cell { col, row })
    }

    pub fn cell_index(&self, z: Complex64) -> Result<Cell> {
        self.locate(z).ok_or_else(|| Error::OutsideViewport(z.to_string()))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.locate(z).is_some()
    }

    /// Lower-left and upper-right corners of the cell rectangle.
    pub fn cell_rect(&self, cell: Cell) -> (Complex64, Complex64) {
        let c = self.cell_center(cell);
        let hw = 0.5 * self.cell_width();
        let hh = 0.5 * self.cell_height();
        (c - Complex64::new(hw, hh), c + Complex64::new(hw, hh))
    }

    /// Existing 8-neighbors of `cell`.
    pub fn neighbors(&self, cell: Cell) -> impl Iterator<Item = Cell> + '_ {
        let (c, r) = (cell.col as isize, cell.row as isize);
        (-1isize..=1)
            .flat_map(move |dr| (-1isize..=1).map(move |dc| (dc, dr)))
            .filter(|&(dc, dr)| dc != 0 || dr != 0)
            .filter_map(move |(dc, dr)| {
                let (nc, nr) = (c + dc, r + dr);
                (nc >= 0 && nr >= 0 && (nc as usize) < self.cols && (nr as usize) < self.rows)
                    .then_some(Cell::new(nc as usize, nr as usize))
            })
    }
}

/// A boolean cell mask approximating a planar set.
#[derive(Clone, Debug, PartialEq)]
pub struct SetMask {
    viewport: Viewport,
    bits: Vec<bool>,
    infinity: bool,
}

impl SetMask {
    pub fn empty(viewport: Viewport) -> Self {
        SetMask {
            viewport,
            bits: vec![false; viewport.len()],
            infinity: false,
        }
    }

    pub fn full(viewport: Viewport) -> Self {
        SetMask {
            viewport,
            bits: vec![true; viewport.len()],
            infinity: viewport.metric == Metric::Sphere,
        }
    }

    pub fn from_bits(viewport: Viewport, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != viewport.len() {
            return Err(Error::Precondition(format!(
                "expected {} cells, got {}",
                viewport.len(),
                bits.len()
            )));
        }
        Ok(SetMask {
            viewport,
            bits,
            infinity: false,
        })
    }

    /// Marks each cell for which `f(cell)` holds. Evaluated in parallel rows.
    pub fn from_cells<F>(viewport: Viewport, f: F) -> Self
    where
        F: Fn(Cell) -> bool + Sync,
    {
        let cols = viewport.cols;
        let mut bits = vec![false; viewport.len()];
        bits.par_chunks_mut(cols).enumerate().for_each(|(row, chunk)| {
            for (col, b) in chunk.iter_mut().enumerate() {
                *b = f(Cell { col, row });
            }
        });
        SetMask {
            viewport,
            bits,
            infinity: false,
        }
    }

    /// Marks each cell whose center satisfies `f`.
    pub fn from_centers<F>(viewport: Viewport, f: F) -> Self
    where
        F: Fn(Complex64) -> bool + Sync,
    {
        Self::from_cells(viewport, |c| f(viewport.cell_center(c)))
    }

    pub fn viewport(&self) -> &Viewport {
        &self.viewport
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, cell: Cell) -> bool {
        self.bits[self.viewport.index(cell)]
    }

    #[inline]
    pub fn get_index(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn set(&mut self, cell: Cell, value: bool) {
        let i = self.viewport.index(cell);
        self.bits[i] = value;
    }

    pub fn infinity_bit(&self) -> bool {
        self.infinity
    }

    pub fn set_infinity_bit(&mut self, value: bool) {
        self.infinity = value && self.viewport.metric == Metric::Sphere;
    }

    /// Whether the plane point `z` lies in a marked cell.
    pub fn contains_point(&self, z: Complex64) -> bool {
        self.viewport.locate(z).is_some_and(|c| self.get(c))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn area_fraction(&self) -> f64 {
        self.count() as f64 / self.bits.len() as f64
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.viewport.cell_at(i))
    }

    fn check_same(&self, other: &SetMask) -> Result<()> {
        if self.viewport == other.viewport {
            Ok(())
        } else {
            Err(Error::ViewportMismatch)
        }
    }

    pub fn is_subset_of(&self, other: &SetMask) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.difference_count(other)? == 0)
    }

    /// Number of cells marked here but not in `other`.
    pub fn difference_count(&self, other: &SetMask) -> Result<usize> {
        self.check_same(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && !b)
            .count())
    }

    pub fn difference(&self, other: &SetMask) -> Result<SetMask> {
        self.check_same(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && !b).collect();
        Ok(SetMask {
            viewport: self.viewport,
            bits,
            infinity: self.infinity && !other.infinity,
        })
    }

    pub fn complement(&self) -> SetMask {
        SetMask {
            viewport: self.viewport,
            bits: self.bits.iter().map(|&b| !b).collect(),
            infinity: !self.infinity && self.viewport.metric == Metric::Sphere,
        }
    }

    pub fn union_in_place(&mut self, other: &SetMask) -> Result<()> {
        self.check_same(other)?;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        self.infinity |= other.infinity;
        Ok(())
    }
}

/// Cellwise OR.
pub fn union(m1: &SetMask, m2: &SetMask) -> Result<SetMask> {
    let mut out = m1.clone();
    out.union_in_place(m2)?;
    Ok(out)
}

/// Marks every cell within Chebyshev distance `radius_cells` of a marked cell.
pub fn dilate(m: &SetMask, radius_cells: usize) -> SetMask {
    if radius_cells == 0 {
        return m.clone();
    }
    let vp = m.viewport;
    let (cols, rows) = (vp.cols, vp.rows);
    let r = radius_cells;
    // separable max filter: rows, then columns
    let mut horiz = vec![false; vp.len()];
    for row in 0..rows {
        let src = &m.bits[row * cols..(row + 1) * cols];
        let dst = &mut horiz[row * cols..(row + 1) * cols];
        let mut last = src[..cols.min(r)].iter().rposition(|&b| b);
        for col in 0..cols {
            if col + r < cols && src[col + r] {
                last = Some(col + r);
            }
            dst[col] = last.is_some_and(|l| l + r >= col);
        }
    }
    let mut bits = vec![false; vp.len()];
    for col in 0..cols {
        let mut last: Option<usize> = None;
        for row in 0..rows.min(r) {
            if horiz[row * cols + col] {
                last = Some(row);
            }
        }
        for row in 0..rows {
            if row + r < rows && horiz[(row + r) * cols + col] {
                last = Some(row + r);
            }
            bits[row * cols + col] = last.is_some_and(|l| l + r >= row);
        }
    }
    SetMask {
        viewport: vp,
        bits,
        infinity: m.infinity,
    }
}

/// Cells whose full Chebyshev `radius_cells` neighborhood is marked and lies
/// at least `radius_cells` away from the viewport edge. Returns the qualifying
/// cell closest to the grid center, if any.
pub fn interior_disk_exists(m: &SetMask, radius_cells: usize) -> Result<Option<Cell>> {
    if radius_cells < 2 {
        return Err(Error::param("radius_cells", "interior witness needs radius ≥ 2"));
    }
    let vp = m.viewport;
    let (cols, rows) = (vp.cols, vp.rows);
    let r = radius_cells;
    if cols < 2 * r + 1 || rows < 2 * r + 1 {
        return Ok(None);
    }
    // erosion = complement of dilation of complement
    let eroded = dilate(&m.complement(), r);
    let (cc, cr) = ((cols - 1) as f64 / 2.0, (rows - 1) as f64 / 2.0);
    let mut best: Option<(f64, Cell)> = None;
    for row in r..rows - r {
        for col in r..cols - r {
            if !eroded.bits[row * cols + col] {
                let d = (col as f64 - cc).abs().max((row as f64 - cr).abs());
                let cell = Cell::new(col, row);
                if best.is_none_or(|(bd, bc)| d < bd || (d == bd && cell < bc)) {
                    best = Some((d, cell));
                }
            }
        }
    }
    Ok(best.map(|(_, c)| c))
}

/// Marked cells none of whose existing 8-neighbors is marked.
pub fn isolated_cells(m: &SetMask) -> Vec<Cell> {
    m.cells()
        .filter(|&c| !m.viewport.neighbors(c).any(|n| m.get(n)))
        .collect()
}

/// Chebyshev distance (in cells) from every cell to the nearest marked cell;
/// `u32::MAX` everywhere when `m` is empty.
pub fn chebyshev_distance_transform(m: &SetMask) -> Vec<u32> {
    let vp = m.viewport;
    let (cols, rows) = (vp.cols, vp.rows);
    let inf = u32::MAX / 2;
    let mut d: Vec<u32> = m.bits.iter().map(|&b| if b { 0 } else { inf }).collect();
    for row in 0..rows {
        for col in 0..cols {
            let i = row * cols + col;
            let mut v = d[i];
            if col > 0 {
                v = v.min(d[i - 1] + 1);
            }
            if row > 0 {
                v = v.min(d[i - cols] + 1);
                if col > 0 {
                    v = v.min(d[i - cols - 1] + 1);
                }
                if col + 1 < cols {
                    v = v.min(d[i - cols + 1] + 1);
                }
            }
            d[i] = v;
        }
    }
    for row in (0..rows).rev() {
        for col in (0..cols).rev() {
            let i = row * cols + col;
            let mut v = d[i];
            if col + 1 < cols {
                v = v.min(d[i + 1] + 1);
            }
            if row + 1 < rows {
                v = v.min(d[i + cols] + 1);
                if col + 1 < cols {
                    v = v.min(d[i + cols + 1] + 1);
                }
                if col > 0 {
                    v = v.min(d[i + cols - 1] + 1);
                }
            }
            d[i] = v;
        }
    }
    if m.is_empty() {
        d.iter_mut().for_each(|v| *v = u32::MAX);
    }
    d
}

/// Symmetric Hausdorff distance in Chebyshev cell units.
pub fn hausdorff_cells(m1: &SetMask, m2: &SetMask) -> Result<f64> {
    m1.check_same(m2)?;
    if m1.is_empty() || m2.is_empty() {
        return Err(Error::EmptyMask);
    }
    let directed = |a: &SetMask, b: &SetMask| -> u32 {
        let dt = chebyshev_distance_transform(b);
        a.bits
            .iter()
            .zip(&dt)
            .filter(|(&m, _)| m)
            .map(|(_, &d)| d)
            .max()
            .unwrap_or(0)
    };
    Ok(directed(m1, m2).max(directed(m2, m1)) as f64)
}

/// Whether any edge-row or edge-column cell is marked.
pub fn touches_boundary(m: &SetMask) -> bool {
    let (cols, rows) = (m.viewport.cols, m.viewport.rows);
    let top = &m.bits[..cols];
    let bottom = &m.bits[(rows - 1) * cols..];
    top.iter().chain(bottom).any(|&b| b)
        || (0..rows).any(|r| m.bits[r * cols] || m.bits[r * cols + cols - 1])
}

/// Cells whose rectangle meets the closed annulus `r_in ≤ |z − center| ≤ r_out`.
/// With `r_in == r_out` this rasterizes a circle.
pub fn raster_annulus(vp: Viewport, center: Complex64, r_in: f64, r_out: f64) -> SetMask {
    SetMask::from_cells(vp, |cell| {
        let (lo, hi) = vp.cell_rect(cell);
        let lo = lo - center;
        let hi = hi - center;
        let nx = if lo.re > 0.0 { lo.re } else if hi.re < 0.0 { hi.re } else { 0.0 };
        let ny = if lo.im > 0.0 { lo.im } else if hi.im < 0.0 { hi.im } else { 0.0 };
        let near = nx.hypot(ny);
        let fx = lo.re.abs().max(hi.re.abs());
        let fy = lo.im.abs().max(hi.im.abs());
        let far = fx.hypot(fy);
        far >= r_in && near <= r_out
    })
}

/// Cells whose rectangle meets the closed disk `|z − center| ≤ radius`.
pub fn raster_disk(vp: Viewport, center: Complex64, radius: f64) -> SetMask {
    raster_annulus(vp, center, 0.0, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vp(n: usize) -> Viewport {
        Viewport::square(Complex64::new(0.0, 0.0), 2.0, n, Metric::Plane).unwrap()
    }

    fn single(v: Viewport, col: usize, row: usize) -> SetMask {
        let mut m = SetMask::empty(v);
        m.set(Cell::new(col, row), true);
        m
    }

    #[test]
    fn viewport_geometry() {
        let v = vp(4);
        assert_eq!(v.cell_width(), 1.0);
        assert_eq!(v.cell_center(Cell::new(0, 0)), Complex64::new(-1.5, 1.5));
        assert_eq!(v.locate(Complex64::new(-1.5, 1.5)), Some(Cell::new(0, 0)));
        assert_eq!(v.locate(Complex64::new(2.0, -2.0)), Some(Cell::new(3, 3)));
        assert_eq!(v.locate(Complex64::new(2.1, 0.0)), None);
        assert!(v.cell_index(Complex64::new(0.0, -3.0)).is_err());
        assert!(Viewport::square(Complex64::new(0.0, 0.0), -1.0, 4, Metric::Plane).is_err());
        assert!(Viewport::square(Complex64::new(0.0, 0.0), 1.0, 0, Metric::Plane).is_err());
    }

    #[test]
    fn union_examples() {
        let v = vp(8);
        let m = single(v, 2, 3);
        let e = SetMask::empty(v);
        assert_eq!(union(&m, &e).unwrap(), m);
        assert_eq!(union(&m, &m).unwrap(), m);
        let left = SetMask::from_centers(v, |z| z.re < 0.0);
        let right = SetMask::from_centers(v, |z| z.re >= 0.0);
        assert_eq!(union(&left, &right).unwrap().area_fraction(), 1.0);
        assert!(matches!(union(&m, &SetMask::empty(vp(4))), Err(Error::ViewportMismatch)));
    }

    #[test]
    fn dilate_examples() {
        let v = vp(9);
        assert!(dilate(&SetMask::empty(v), 2).is_empty());
        let d = dilate(&single(v, 4, 4), 1);
        assert_eq!(d.count(), 9);
        for c in d.cells() {
            assert!(c.chebyshev(Cell::new(4, 4)) <= 1);
        }
        let corner = dilate(&single(v, 0, 0), 2);
        assert_eq!(corner.count(), 9);
    }

    #[test]
    fn interior_examples() {
        let v = vp(21);
        let full = SetMask::full(v);
        assert_eq!(interior_disk_exists(&full, 3).unwrap(), Some(Cell::new(10, 10)));
        let circle = raster_annulus(v, Complex64::new(0.0, 0.0), 1.2, 1.2);
        assert_eq!(interior_disk_exists(&circle, 2).unwrap(), None);
        assert!(interior_disk_exists(&full, 1).is_err());
    }

    #[test]
    fn solid_disk_has_interior() {
        let v = vp(41);
        let center = Cell::new(20, 20);
        let disk = SetMask::from_cells(v, |c| {
            let dc = c.col as f64 - 20.0;
            let dr = c.row as f64 - 20.0;
            dc.hypot(dr) <= 10.0
        });
        // brute-force oracle: any cell whose (2r+1)² block is fully marked
        let r = 4;
        let brute = (r..41 - r).any(|row| {
            (r..41 - r).any(|col| {
                (row - r..=row + r).all(|rr| (col - r..=col + r).all(|cc| disk.get(Cell::new(cc, rr))))
            })
        });
        assert!(brute);
        assert_eq!(interior_disk_exists(&disk, r).unwrap(), Some(center));
    }

    #[test]
    fn isolated_examples() {
        let v = vp(8);
        assert_eq!(isolated_cells(&single(v, 0, 7)), vec![Cell::new(0, 7)]);
        let m = union(&single(v, 1, 1), &single(v, 5, 5)).unwrap();
        assert!(isolated_cells(&dilate(&m, 1)).is_empty());
        let big = vp(128);
        let circle = raster_annulus(big, Complex64::new(0.0, 0.0), 1.0, 1.0);
        // brute-force neighbor scan
        let brute: Vec<Cell> = circle
            .cells()
            .filter(|&c| {
                let mut any = false;
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let (nc, nr) = (c.col as i64 + dc, c.row as i64 + dr);
                        if (dc, dr) != (0, 0) && (0..128).contains(&nc) && (0..128).contains(&nr) {
                            any |= circle.get(Cell::new(nc as usize, nr as usize));
                        }
                    }
                }
                !any
            })
            .collect();
        assert!(brute.is_empty());
        assert!(isolated_cells(&circle).is_empty());
    }

    #[test]
    fn hausdorff_examples() {
        let v = vp(16);
        let a = single(v, 0, 0);
        let b = single(v, 0, 3);
        assert_eq!(hausdorff_cells(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_cells(&a, &b).unwrap(), 3.0);
        assert!(matches!(
            hausdorff_cells(&a, &SetMask::empty(v)),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn hausdorff_of_concentric_circles() {
        let v = vp(512);
        let o = Complex64::new(0.0, 0.0);
        let c1 = raster_annulus(v, o, 1.0, 1.0);
        let c2 = raster_annulus(v, o, 1.1, 1.1);
        let expected = 0.1 / v.cell_width();
        let h = hausdorff_cells(&c1, &c2).unwrap();
        assert!((h - expected).abs() <= 2.0, "h = {h}, expected ≈ {expected}");
    }

    #[test]
    fn boundary_examples() {
        let v = vp(16);
        assert!(touches_boundary(&SetMask::full(v)));
        let blob = raster_disk(v, Complex64::new(0.0, 0.0), 0.5);
        assert!(!touches_boundary(&blob));
        assert!(touches_boundary(&blob.complement()));
    }

    #[test]
    fn complement_involution() {
        let v = vp(16);
        let blob = raster_disk(v, Complex64::new(0.3, 0.0), 0.7);
        assert_eq!(blob.complement().complement(), blob);
        assert_eq!(SetMask::empty(v).complement(), SetMask::full(v));
    }
}
