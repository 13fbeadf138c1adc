//! Cell-centred finite-volume discretization of the mixed Dirichlet /
//! no-flux problem on a rectilinear slit domain.

use std::collections::VecDeque;

use super::solver::Operator;
use crate::error::{Error, Result};
use crate::flat_geometry::{BoundaryElement, BoundarySet, Point, Side, SlitDomain};
use crate::scalar::{Coord, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    Exterior,
    Interior,
    /// Interior cell with at least one face on a slit.
    SlitAdjacent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceDir {
    West,
    East,
    South,
    North,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceLabel {
    E,
    F,
    Insulated,
}

/// Labelled boundary face of an interior cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryFace {
    pub cell: usize,
    pub dir: FaceDir,
    pub label: FaceLabel,
}

/// Uniform `nx × ny` grid of `hx × hy` cells over the domain's bounding box.
#[derive(Clone, Debug)]
pub struct Grid<C> {
    pub hx: C,
    pub hy: C,
    pub origin: Point<C>,
    pub nx: usize,
    pub ny: usize,
    pub mask: Vec<CellClass>,
    /// E and F faces sorted by `(cell, dir)`; every other boundary face is
    /// insulated.
    pub faces: Vec<BoundaryFace>,
    blocked_x: Vec<bool>,
    blocked_y: Vec<bool>,
}

fn ticks<C: Coord>(v: &C, origin: &C, h: &C, what: &str) -> Result<i64> {
    (v.clone() - origin.clone())
        .div_to_int(h)
        .ok_or_else(|| Error::Resolution(format!("{what} {v} is not on a grid line")))
}

fn to_index(k: i64, n: usize, what: &str) -> Result<usize> {
    if k < 0 || k as usize > n {
        return Err(Error::Resolution(format!(
            "{what} index {k} lies outside the grid"
        )));
    }
    Ok(k as usize)
}

impl<C: Coord> Grid<C> {
    /// Square cells of side `h`.
    pub fn new(dom: &SlitDomain<C>, e: &BoundarySet<C>, f: &BoundarySet<C>, h: &C) -> Result<Self> {
        Self::with_cells(dom, e, f, h, h, true)
    }

    /// Rectangular `hx × hy` cells. `strict` additionally requires two cells
    /// between parallel features.
    pub fn with_cells(
        dom: &SlitDomain<C>,
        e: &BoundarySet<C>,
        f: &BoundarySet<C>,
        hx: &C,
        hy: &C,
        strict: bool,
    ) -> Result<Self> {
        if *hx <= C::zero() || *hy <= C::zero() {
            return Err(Error::InvalidParameter("cell size must be positive".into()));
        }
        if !e.is_disjoint(dom, f) {
            return Err(Error::InvalidParameter(
                "boundary sets are not disjoint".into(),
            ));
        }
        let (x0, y0, x1, y1) = dom.bbox();
        let nx = to_index(ticks(&x1, &x0, hx, "width")?, usize::MAX / 2, "width")?;
        let ny = to_index(ticks(&y1, &y0, hy, "height")?, usize::MAX / 2, "height")?;
        if nx < 2 || ny < 2 {
            return Err(Error::Resolution(
                "fewer than two cells across the domain".into(),
            ));
        }
        let xi = |v: &C| ticks(v, &x0, hx, "abscissa");
        let yi = |v: &C| ticks(v, &y0, hy, "ordinate");
        for p in dom.outer() {
            xi(&p.x)?;
            yi(&p.y)?;
        }
        for s in dom.slits() {
            for p in [&s.a, &s.b] {
                xi(&p.x)?;
                yi(&p.y)?;
            }
        }
        check_separation(dom, hx, hy, if strict { 2 } else { 1 })?;

        // Scanline fill: cell centres never lie on a grid-aligned edge.
        let mut inside = vec![false; nx * ny];
        let n = dom.edge_count();
        let mut vertical_edges = Vec::new();
        for k in 0..n {
            let (p, q) = dom.edge(k);
            if p.x.same(&q.x) {
                let (a, b) = (yi(&p.y)?, yi(&q.y)?);
                vertical_edges.push((xi(&p.x)?, a.min(b), a.max(b)));
            }
        }
        for j in 0..ny as i64 {
            let mut xs: Vec<i64> = vertical_edges
                .iter()
                .filter(|(_, lo, hi)| *lo <= j && j < *hi)
                .map(|(x, _, _)| *x)
                .collect();
            xs.sort_unstable();
            for pair in xs.chunks(2) {
                if let [a, b] = pair {
                    for i in *a..*b {
                        inside[i as usize * ny + j as usize] = true;
                    }
                }
            }
        }

        let mut blocked_x = vec![false; (nx - 1) * ny];
        let mut blocked_y = vec![false; nx * (ny - 1)];
        let mut mask: Vec<CellClass> = inside
            .iter()
            .map(|&b| {
                if b {
                    CellClass::Interior
                } else {
                    CellClass::Exterior
                }
            })
            .collect();
        for s in dom.slits() {
            if s.on_boundary {
                continue;
            }
            if s.is_vertical() {
                let xk = xi(&s.a.x)?;
                let (ja, jb) = (yi(&s.a.y)?, yi(&s.b.y)?);
                if xk <= 0 || xk as usize >= nx {
                    continue;
                }
                let il = xk as usize - 1;
                for j in ja.min(jb)..ja.max(jb) {
                    let j = j as usize;
                    blocked_x[il * ny + j] = true;
                    for c in [il * ny + j, (il + 1) * ny + j] {
                        if mask[c] == CellClass::Interior {
                            mask[c] = CellClass::SlitAdjacent;
                        }
                    }
                }
            } else {
                let yk = yi(&s.a.y)?;
                let (ia, ib) = (xi(&s.a.x)?, xi(&s.b.x)?);
                if yk <= 0 || yk as usize >= ny {
                    continue;
                }
                let jl = yk as usize - 1;
                for i in ia.min(ib)..ia.max(ib) {
                    let i = i as usize;
                    blocked_y[i * (ny - 1) + jl] = true;
                    for c in [i * ny + jl, i * ny + jl + 1] {
                        if mask[c] == CellClass::Interior {
                            mask[c] = CellClass::SlitAdjacent;
                        }
                    }
                }
            }
        }

        let mut grid = Grid {
            hx: hx.clone(),
            hy: hy.clone(),
            origin: Point::new(x0, y0),
            nx,
            ny,
            mask,
            faces: Vec::new(),
            blocked_x,
            blocked_y,
        };
        let mut faces = Vec::new();
        grid.label_set(dom, e, FaceLabel::E, &mut faces)?;
        grid.label_set(dom, f, FaceLabel::F, &mut faces)?;
        faces.sort_by_key(|bf| (bf.cell, bf.dir));
        for w in faces.windows(2) {
            if w[0].cell == w[1].cell && w[0].dir == w[1].dir && w[0].label != w[1].label {
                return Err(Error::Resolution(
                    "a grid face belongs to both boundary sets".into(),
                ));
            }
        }
        faces.dedup_by_key(|bf| (bf.cell, bf.dir));
        grid.faces = faces;
        Ok(grid)
    }

    pub fn is_active(&self, c: usize) -> bool {
        self.mask[c] != CellClass::Exterior
    }

    /// Label of face `dir` of cell `c`.
    pub fn label(&self, c: usize, dir: FaceDir) -> FaceLabel {
        self.faces
            .binary_search_by_key(&(c, dir), |bf| (bf.cell, bf.dir))
            .map(|k| self.faces[k].label)
            .unwrap_or(FaceLabel::Insulated)
    }

    fn label_set(
        &self,
        dom: &SlitDomain<C>,
        set: &BoundarySet<C>,
        label: FaceLabel,
        out: &mut Vec<BoundaryFace>,
    ) -> Result<()> {
        let (x0, y0) = (&self.origin.x, &self.origin.y);
        let mut total = 0usize;
        for piece in set.pieces() {
            if piece.length() == C::zero() {
                continue;
            }
            let (p0, p1) = (&piece.p0, &piece.p1);
            let ax = ticks(&p0.x, x0, &self.hx, "boundary piece end")?;
            let bx = ticks(&p1.x, x0, &self.hx, "boundary piece end")?;
            let ay = ticks(&p0.y, y0, &self.hy, "boundary piece end")?;
            let by = ticks(&p1.y, y0, &self.hy, "boundary piece end")?;
            // Interior side of the carrier: (cell offset, face of that cell).
            let horizontal = ay == by;
            let (before, dir) = match piece.element {
                BoundaryElement::Edge(_) => {
                    // Counterclockwise outline: the interior is on the left.
                    if horizontal {
                        if bx > ax {
                            (false, FaceDir::South)
                        } else {
                            (true, FaceDir::North)
                        }
                    } else if by > ay {
                        (true, FaceDir::East)
                    } else {
                        (false, FaceDir::West)
                    }
                }
                BoundaryElement::SlitSide { slit, side } => {
                    let vertical = dom.slits()[slit].is_vertical();
                    match (vertical, side) {
                        (true, Side::Left) => (true, FaceDir::East),
                        (true, Side::Right) => (false, FaceDir::West),
                        (false, Side::Left) => (false, FaceDir::South),
                        (false, Side::Right) => (true, FaceDir::North),
                    }
                }
                BoundaryElement::Tip { .. } => continue,
            };
            let mut count = 0;
            if horizontal {
                let j = ay - i64::from(before);
                if j < 0 || j as usize >= self.ny {
                    continue;
                }
                for i in ax.min(bx)..ax.max(bx) {
                    let c = i as usize * self.ny + j as usize;
                    if self.is_active(c) {
                        out.push(BoundaryFace {
                            cell: c,
                            dir,
                            label,
                        });
                        count += 1;
                    }
                }
            } else {
                let i = ax - i64::from(before);
                if i < 0 || i as usize >= self.nx {
                    continue;
                }
                for j in ay.min(by)..ay.max(by) {
                    let c = i as usize * self.ny + j as usize;
                    if self.is_active(c) {
                        out.push(BoundaryFace {
                            cell: c,
                            dir,
                            label,
                        });
                        count += 1;
                    }
                }
            }
            if count == 0 {
                return Err(Error::Resolution(
                    "a boundary piece covers no grid face".into(),
                ));
            }
            total += count;
        }
        if total == 0 {
            return Err(Error::Resolution("boundary set covers no grid face".into()));
        }
        Ok(())
    }

    fn open_x(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i * self.ny + j, (i + 1) * self.ny + j);
        self.is_active(a) && self.is_active(b) && !self.blocked_x[i * self.ny + j]
    }

    fn open_y(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i * self.ny + j, i * self.ny + j + 1);
        self.is_active(a) && self.is_active(b) && !self.blocked_y[i * (self.ny - 1) + j]
    }

    /// Cells connected to at least one Dirichlet face.
    fn anchored(&self) -> Vec<bool> {
        let (nx, ny) = (self.nx, self.ny);
        let mut seen = vec![false; nx * ny];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for bf in &self.faces {
            if !seen[bf.cell] {
                seen[bf.cell] = true;
                queue.push_back(bf.cell);
            }
        }
        while let Some(c) = queue.pop_front() {
            let (i, j) = (c / ny, c % ny);
            let mut visit = |d: usize, open: bool| {
                if open && !seen[d] {
                    seen[d] = true;
                    queue.push_back(d);
                }
            };
            if i > 0 {
                visit(c - ny, self.open_x(i - 1, j));
            }
            if i + 1 < nx {
                visit(c + ny, self.open_x(i, j));
            }
            if j > 0 {
                visit(c - 1, self.open_y(i, j - 1));
            }
            if j + 1 < ny {
                visit(c + 1, self.open_y(i, j));
            }
        }
        seen
    }

    /// Face conductances `(x-faces, y-faces)`.
    fn conductances<T: Real>(&self) -> (T, T) {
        let r = self.hy.to_f64() / self.hx.to_f64();
        (T::lit(r), T::lit(1.0 / r))
    }

    /// Assembles `A u = b` with `u = 0` on E and `u = 1` on F.
    pub fn system<T: Real>(&self) -> (Operator<T>, Vec<T>) {
        let (nx, ny) = (self.nx, self.ny);
        let (gxv, gyv) = self.conductances::<T>();
        let anchored = self.anchored();
        let live = |c: usize| self.is_active(c) && anchored[c];
        let mut gx = vec![T::zero(); (nx - 1) * ny];
        let mut gy = vec![T::zero(); nx * (ny - 1)];
        let mut diag = vec![T::zero(); nx * ny];
        let mut rhs = vec![T::zero(); nx * ny];
        for i in 0..nx - 1 {
            for j in 0..ny {
                let c = i * ny + j;
                if self.open_x(i, j) && live(c) {
                    gx[c] = gxv;
                    diag[c] = diag[c] + gxv;
                    diag[c + ny] = diag[c + ny] + gxv;
                }
            }
        }
        for i in 0..nx {
            for j in 0..ny - 1 {
                let c = i * ny + j;
                if self.open_y(i, j) && live(c) {
                    gy[i * (ny - 1) + j] = gyv;
                    diag[c] = diag[c] + gyv;
                    diag[c + 1] = diag[c + 1] + gyv;
                }
            }
        }
        for bf in &self.faces {
            let g = match bf.dir {
                FaceDir::West | FaceDir::East => gxv,
                FaceDir::South | FaceDir::North => gyv,
            };
            let g2 = g + g;
            diag[bf.cell] = diag[bf.cell] + g2;
            if bf.label == FaceLabel::F {
                rhs[bf.cell] = rhs[bf.cell] + g2;
            }
        }
        let active: Vec<bool> = (0..nx * ny).map(live).collect();
        for (d, a) in diag.iter_mut().zip(&active) {
            if !*a {
                *d = T::one();
            }
        }
        (
            Operator {
                nx,
                ny,
                gx,
                gy,
                diag,
                active,
            },
            rhs,
        )
    }

    /// Discrete Dirichlet energy of the cell potential `u`.
    pub fn energy<T: Real>(&self, op: &Operator<T>, u: &[T]) -> f64 {
        let (nx, ny) = (self.nx, self.ny);
        let col = |i: usize| -> f64 {
            let mut acc = 0.0;
            for j in 0..ny {
                let c = i * ny + j;
                let uc = u[c].as_f64();
                if i + 1 < nx {
                    let g = op.gx[c].as_f64();
                    if g != 0.0 {
                        let d = uc - u[c + ny].as_f64();
                        acc += g * d * d;
                    }
                }
                if j + 1 < ny {
                    let g = op.gy[i * (ny - 1) + j].as_f64();
                    if g != 0.0 {
                        let d = uc - u[c + 1].as_f64();
                        acc += g * d * d;
                    }
                }
            }
            acc
        };
        let mut total: f64 = (0..nx).map(col).sum();
        let (gxv, gyv) = self.conductances::<f64>();
        for bf in &self.faces {
            if !op.active[bf.cell] {
                continue;
            }
            let g = match bf.dir {
                FaceDir::West | FaceDir::East => gxv,
                FaceDir::South | FaceDir::North => gyv,
            };
            let target = if bf.label == FaceLabel::F { 1.0 } else { 0.0 };
            let d = u[bf.cell].as_f64() - target;
            total += 2.0 * g * d * d;
        }
        total
    }
}

/// Parallel features (edges and slits) must be at least `cells` cells apart
/// where their projections overlap.
fn check_separation<C: Coord>(dom: &SlitDomain<C>, hx: &C, hy: &C, cells: i64) -> Result<()> {
    let mut segs: Vec<(bool, C, C, C)> = Vec::new();
    for k in 0..dom.edge_count() {
        let (p, q) = dom.edge(k);
        segs.push(axis_segment(p, q));
    }
    for s in dom.slits() {
        if !s.on_boundary {
            segs.push(axis_segment(&s.a, &s.b));
        }
    }
    let need_x = hx.clone() * C::from_i64(cells);
    let need_y = hy.clone() * C::from_i64(cells);
    for (a, sa) in segs.iter().enumerate() {
        for sb in &segs[a + 1..] {
            if sa.0 != sb.0 || sa.1.same(&sb.1) {
                continue;
            }
            let lo = C::max_of(&sa.2, &sb.2);
            let hi = C::min_of(&sa.3, &sb.3);
            if hi <= lo {
                continue;
            }
            let gap = (sa.1.clone() - sb.1.clone()).abs();
            let need = if sa.0 { &need_x } else { &need_y };
            if gap < *need {
                return Err(Error::Resolution(format!(
                    "features {gap} apart need a finer grid"
                )));
            }
        }
    }
    Ok(())
}

/// `(vertical, fixed coordinate, lo, hi)`.
fn axis_segment<C: Coord>(p: &Point<C>, q: &Point<C>) -> (bool, C, C, C) {
    if p.x.same(&q.x) {
        (
            true,
            p.x.clone(),
            C::min_of(&p.y, &q.y),
            C::max_of(&p.y, &q.y),
        )
    } else {
        (
            false,
            p.y.clone(),
            C::min_of(&p.x, &q.x),
            C::max_of(&p.x, &q.x),
        )
    }
}
