use super::boundary::{build_loops, BoundaryLoop};
use super::{on_segment, segments_cross, segments_intersect, Point};
use crate::error::{invalid, Result};
use crate::scalar::Coord;

/// Axis-aligned closed slit segment from `a` to `b`.
///
/// `a` precedes `b` in the canonical direction: bottom to top for vertical
/// slits, left to right for horizontal ones.
#[derive(Clone, Debug, PartialEq)]
pub struct Slit<C> {
    pub a: Point<C>,
    pub b: Point<C>,
    /// The slit lies on the outer boundary and only refines it.
    pub on_boundary: bool,
    /// Which endpoint touches the outer boundary: `Some(false)` for `a`,
    /// `Some(true)` for `b`, `None` for a floating slit.
    pub(crate) foot_is_b: Option<bool>,
}

impl<C: Coord> Slit<C> {
    pub fn is_vertical(&self) -> bool {
        self.a.x.same(&self.b.x)
    }

    pub fn length(&self) -> C {
        if self.is_vertical() {
            self.b.y.clone() - self.a.y.clone()
        } else {
            self.b.x.clone() - self.a.x.clone()
        }
    }

    /// Endpoint touching the outer boundary, if any.
    pub fn foot(&self) -> Option<&Point<C>> {
        self.foot_is_b.map(|b| if b { &self.b } else { &self.a })
    }

    /// Free endpoint of an attached slit.
    pub fn tip(&self) -> Option<&Point<C>> {
        self.foot_is_b.map(|b| if b { &self.a } else { &self.b })
    }

    pub fn is_floating(&self) -> bool {
        !self.on_boundary && self.foot_is_b.is_none()
    }
}

/// Rectilinear simple polygon minus finitely many axis-aligned slits.
#[derive(Clone, Debug)]
pub struct SlitDomain<C> {
    outer: Vec<Point<C>>,
    slits: Vec<Slit<C>>,
    area: C,
    loops: Vec<BoundaryLoop<C>>,
}

impl<C: Coord> SlitDomain<C> {
    /// Validates and builds a domain. Clockwise outlines are reversed;
    /// collinear overlapping slits are merged into their union.
    pub fn new(outer: Vec<Point<C>>, slits: Vec<(Point<C>, Point<C>)>) -> Result<Self> {
        let mut outer = outer;
        if outer.len() > 1 && outer[0].same(&outer[outer.len() - 1]) {
            outer.pop();
        }
        if outer.len() < 4 {
            return invalid("outer polygon needs at least four vertices");
        }
        let n = outer.len();
        for i in 0..n {
            let (p, q) = (&outer[i], &outer[(i + 1) % n]);
            if p.same(q) {
                return invalid(format!("zero-length edge at vertex {i}"));
            }
            if !p.x.same(&q.x) && !p.y.same(&q.y) {
                return invalid(format!("edge {i} is not axis-aligned"));
            }
        }
        let signed = signed_area(&outer);
        if signed.same(&C::zero()) {
            return invalid("outer polygon has zero area");
        }
        if signed < C::zero() {
            outer.reverse();
        }
        check_simple(&outer)?;
        let area = signed.abs();

        let merged = merge_slits(slits)?;
        let mut out_slits = Vec::with_capacity(merged.len());
        for (a, b) in merged {
            out_slits.push(classify_slit(&outer, a, b)?);
        }
        for i in 0..out_slits.len() {
            for j in (i + 1)..out_slits.len() {
                let (s, t) = (&out_slits[i], &out_slits[j]);
                if s.on_boundary || t.on_boundary {
                    continue;
                }
                if segments_intersect(&s.a, &s.b, &t.a, &t.b) {
                    return invalid(format!("slits {i} and {j} intersect"));
                }
            }
        }
        let loops = build_loops(&outer, &out_slits);
        Ok(Self {
            outer,
            slits: out_slits,
            area,
            loops,
        })
    }

    pub fn outer(&self) -> &[Point<C>] {
        &self.outer
    }

    pub fn slits(&self) -> &[Slit<C>] {
        &self.slits
    }

    /// Polygon area; slits are null sets.
    pub fn area(&self) -> C {
        self.area.clone()
    }

    /// Prime-end boundary loops. Loop 0 is the outer boundary with its
    /// attached slits; every floating slit contributes one further loop.
    pub fn loops(&self) -> &[BoundaryLoop<C>] {
        &self.loops
    }

    pub fn is_simply_connected(&self) -> bool {
        self.loops.len() == 1
    }

    pub fn edge(&self, i: usize) -> (&Point<C>, &Point<C>) {
        let n = self.outer.len();
        (&self.outer[i % n], &self.outer[(i + 1) % n])
    }

    pub fn edge_count(&self) -> usize {
        self.outer.len()
    }

    /// Bounding box `(xmin, ymin, xmax, ymax)`.
    pub fn bbox(&self) -> (C, C, C, C) {
        let mut it = self.outer.iter();
        let first = it.next().expect("nonempty outline");
        let (mut x0, mut y0, mut x1, mut y1) = (
            first.x.clone(),
            first.y.clone(),
            first.x.clone(),
            first.y.clone(),
        );
        for p in it {
            x0 = C::min_of(&x0, &p.x);
            y0 = C::min_of(&y0, &p.y);
            x1 = C::max_of(&x1, &p.x);
            y1 = C::max_of(&y1, &p.y);
        }
        (x0, y0, x1, y1)
    }

    /// Strictly inside the polygon and off every slit.
    pub fn contains(&self, p: &Point<C>) -> bool {
        polygon_interior(&self.outer, p)
            && !self
                .slits
                .iter()
                .any(|s| !s.on_boundary && on_segment(p, &s.a, &s.b))
    }

    /// Inside or on the outer polygon.
    pub fn in_closed_polygon(&self, p: &Point<C>) -> bool {
        polygon_closed(&self.outer, p)
    }

    /// True when the point lies on the prime-end boundary (outer edge or
    /// slit).
    pub fn on_boundary(&self, p: &Point<C>) -> bool {
        on_polygon_boundary(&self.outer, p) || self.slits.iter().any(|s| on_segment(p, &s.a, &s.b))
    }

    /// Slit whose segment contains `p`, ignoring boundary refinements.
    pub fn slit_containing(&self, p: &Point<C>) -> Option<usize> {
        self.slits
            .iter()
            .position(|s| !s.on_boundary && on_segment(p, &s.a, &s.b))
    }

    /// Interior (non-boundary) vertical slit with the given abscissa that
    /// contains height `y` in its closed range.
    pub fn vertical_slit_at(&self, x: &C, y: &C) -> Option<usize> {
        self.slits.iter().position(|s| {
            !s.on_boundary
                && s.is_vertical()
                && s.a.x.same(x)
                && (s.a.y <= *y || s.a.y.same(y))
                && (s.b.y >= *y || s.b.y.same(y))
        })
    }

    /// Image under an affine map `(x, y) ↦ (sx·x + tx, sy·y + ty)` with
    /// positive scale factors.
    pub fn affine(&self, sx: &C, tx: &C, sy: &C, ty: &C) -> Result<Self> {
        if *sx <= C::zero() || *sy <= C::zero() {
            return invalid("affine scale factors must be positive");
        }
        let map = |p: &Point<C>| {
            Point::new(
                sx.clone() * p.x.clone() + tx.clone(),
                sy.clone() * p.y.clone() + ty.clone(),
            )
        };
        let outer = self.outer.iter().map(map).collect();
        let slits = self.slits.iter().map(|s| (map(&s.a), map(&s.b))).collect();
        Self::new(outer, slits)
    }
}

/// Axis-aligned rectangle `[0, width] × [0, height]`.
pub fn build_rectangle<C: Coord>(width: C, height: C) -> Result<SlitDomain<C>> {
    build_box(C::zero(), C::zero(), width, height, Vec::new())
}

pub(crate) fn build_box<C: Coord>(
    x0: C,
    y0: C,
    x1: C,
    y1: C,
    slits: Vec<(Point<C>, Point<C>)>,
) -> Result<SlitDomain<C>> {
    if x1 <= x0 || y1 <= y0 {
        return invalid("rectangle dimensions must be positive");
    }
    SlitDomain::new(
        vec![
            Point::new(x0.clone(), y0.clone()),
            Point::new(x1.clone(), y0),
            Point::new(x1, y1.clone()),
            Point::new(x0, y1),
        ],
        slits,
    )
}

pub(crate) fn check_slit_rectangle<C: Coord>(a: &C, b: &C, c: &C, n: usize) -> Result<()> {
    if *a <= C::zero() {
        return invalid("a must be positive");
    }
    if !(C::zero() < *c && c < b) {
        return invalid("need 0 < c < b");
    }
    if n == 0 {
        return invalid("N must be at least 1");
    }
    Ok(())
}

/// `(0,a)×(0,b)` minus the vertical slits `{a·i/N} × [c, b]`, `i = 0..=N`.
///
/// The slits at `i = 0` and `i = N` lie on the vertical edges and are kept
/// as boundary refinements.
pub fn build_slit_rectangle<C: Coord>(a: C, b: C, c: C, n: usize) -> Result<SlitDomain<C>> {
    check_slit_rectangle(&a, &b, &c, n)?;
    let nn = n as i64;
    let slits = (0..=nn)
        .map(|i| {
            let x = a.clone() * C::from_ratio(i, nn);
            (Point::new(x.clone(), c.clone()), Point::new(x, b.clone()))
        })
        .collect();
    build_box(C::zero(), C::zero(), a, b, slits)
}

pub(crate) fn signed_area<C: Coord>(pts: &[Point<C>]) -> C {
    let n = pts.len();
    let mut acc = C::zero();
    for i in 0..n {
        let (p, q) = (&pts[i], &pts[(i + 1) % n]);
        acc = acc + p.x.clone() * q.y.clone() - q.x.clone() * p.y.clone();
    }
    acc / C::from_i64(2)
}

fn check_simple<C: Coord>(pts: &[Point<C>]) -> Result<()> {
    let n = pts.len();
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (&pts[j], &pts[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex only: reject backtracking overlaps.
                let (shared, other_i, other_j) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                if on_segment(other_j, shared, other_i) || on_segment(other_i, shared, other_j) {
                    return invalid(format!("edges {i} and {j} overlap"));
                }
            } else if segments_intersect(a, b, c, d) {
                return invalid(format!("outer polygon is not simple (edges {i}, {j})"));
            }
        }
    }
    Ok(())
}

fn on_polygon_boundary<C: Coord>(pts: &[Point<C>], p: &Point<C>) -> bool {
    let n = pts.len();
    (0..n).any(|i| on_segment(p, &pts[i], &pts[(i + 1) % n]))
}

fn crossing_inside<C: Coord>(pts: &[Point<C>], p: &Point<C>) -> bool {
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let t = (p.y.clone() - a.y.clone()) / (b.y.clone() - a.y.clone());
            let x = a.x.clone() + (b.x.clone() - a.x.clone()) * t;
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub(crate) fn polygon_interior<C: Coord>(pts: &[Point<C>], p: &Point<C>) -> bool {
    !on_polygon_boundary(pts, p) && crossing_inside(pts, p)
}

pub(crate) fn polygon_closed<C: Coord>(pts: &[Point<C>], p: &Point<C>) -> bool {
    on_polygon_boundary(pts, p) || crossing_inside(pts, p)
}

fn merge_slits<C: Coord>(raw: Vec<(Point<C>, Point<C>)>) -> Result<Vec<(Point<C>, Point<C>)>> {
    // (vertical, fixed coordinate, lo, hi)
    let mut items: Vec<(bool, C, C, C)> = Vec::with_capacity(raw.len());
    for (i, (p, q)) in raw.into_iter().enumerate() {
        if p.same(&q) {
            return invalid(format!("slit {i} has zero length"));
        }
        if p.x.same(&q.x) {
            let (lo, hi) = if p.y < q.y { (p.y, q.y) } else { (q.y, p.y) };
            items.push((true, p.x, lo, hi));
        } else if p.y.same(&q.y) {
            let (lo, hi) = if p.x < q.x { (p.x, q.x) } else { (q.x, p.x) };
            items.push((false, p.y, lo, hi));
        } else {
            return invalid(format!("slit {i} is not axis-aligned"));
        }
    }
    items.sort_by(|u, v| {
        (u.0, &u.1, &u.2)
            .partial_cmp(&(v.0, &v.1, &v.2))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut merged: Vec<(bool, C, C, C)> = Vec::new();
    for it in items {
        if let Some(last) = merged.last_mut() {
            if last.0 == it.0 && last.1.same(&it.1) && (it.2 <= last.3 || it.2.same(&last.3)) {
                last.3 = C::max_of(&last.3, &it.3);
                continue;
            }
        }
        merged.push(it);
    }
    Ok(merged
        .into_iter()
        .map(|(vertical, c, lo, hi)| {
            if vertical {
                (Point::new(c.clone(), lo), Point::new(c, hi))
            } else {
                (Point::new(lo, c.clone()), Point::new(hi, c))
            }
        })
        .collect())
}

fn classify_slit<C: Coord>(outer: &[Point<C>], a: Point<C>, b: Point<C>) -> Result<Slit<C>> {
    let n = outer.len();
    let on_edge = |p: &Point<C>| (0..n).any(|i| on_segment(p, &outer[i], &outer[(i + 1) % n]));
    let mid = a.lerp(&b, &C::half());
    // Entirely on the outline: both endpoints and the midpoint on some edge
    // collinear with the slit.
    let collinear_cover = (0..n).any(|i| {
        let (p, q) = (&outer[i], &outer[(i + 1) % n]);
        on_segment(&a, p, q) && on_segment(&b, p, q)
    });
    if collinear_cover {
        return Ok(Slit {
            a,
            b,
            on_boundary: true,
            foot_is_b: None,
        });
    }
    if !polygon_closed(outer, &a) || !polygon_closed(outer, &b) || !polygon_interior(outer, &mid) {
        return invalid("slit does not lie in the closed polygon");
    }
    for i in 0..n {
        let (p, q) = (&outer[i], &outer[(i + 1) % n]);
        if segments_cross(&a, &b, p, q) {
            return invalid("slit crosses the outer boundary");
        }
        // A polygon vertex in the slit interior splits the domain.
        for v in [p, q] {
            if !v.same(&a) && !v.same(&b) && on_segment(v, &a, &b) {
                return invalid("slit passes through a polygon vertex");
            }
        }
    }
    let foot_is_b = match (on_edge(&a), on_edge(&b)) {
        (false, false) => None,
        (true, false) => Some(false),
        (false, true) => Some(true),
        (true, true) => return invalid("slit cuts the domain in two"),
    };
    Ok(Slit {
        a,
        b,
        on_boundary: false,
        foot_is_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;

    fn q(p: i64, d: i64) -> Exact {
        Exact::new(p, d)
    }

    #[test]
    fn rectangle_areas() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        assert_eq!(sq.area(), q(1, 1));
        let r = build_rectangle(q(2, 1), q(1, 1)).unwrap();
        assert_eq!(r.area(), q(2, 1));
        assert!(build_rectangle(q(1, 1), q(0, 1)).is_err());
        assert!(build_rectangle(-1.0, 1.0).is_err());
    }

    #[test]
    fn slit_rectangle_layout() {
        let d = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 4).unwrap();
        assert_eq!(d.slits().len(), 5);
        assert_eq!(d.slits().iter().filter(|s| s.on_boundary).count(), 2);
        assert_eq!(d.area(), q(1, 1));
        let d1 = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 1).unwrap();
        assert_eq!(d1.slits().len(), 2);
        assert!(d1.slits().iter().all(|s| s.on_boundary));
        assert!(build_slit_rectangle(q(1, 1), q(1, 1), q(2, 1), 4).is_err());
        assert!(build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 0).is_err());
    }

    #[test]
    fn containment() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        assert!(sq.contains(&Point::new(q(1, 2), q(1, 2))));
        assert!(!sq.contains(&Point::new(q(3, 2), q(1, 2))));
        assert!(!sq.contains(&Point::new(q(1, 1), q(1, 2))));
        let d = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 4).unwrap();
        assert!(!d.contains(&Point::new(q(1, 4), q(3, 4))));
        assert!(d.contains(&Point::new(q(1, 4), q(1, 4))));
        assert!(d.contains(&Point::new(q(1, 8), q(3, 4))));
    }

    #[test]
    fn clockwise_outline_is_reversed() {
        let cw = vec![
            Point::new(q(0, 1), q(0, 1)),
            Point::new(q(0, 1), q(1, 1)),
            Point::new(q(1, 1), q(1, 1)),
            Point::new(q(1, 1), q(0, 1)),
        ];
        let d = SlitDomain::new(cw, vec![]).unwrap();
        assert!(signed_area(d.outer()) > q(0, 1));
    }

    #[test]
    fn rejects_bad_input() {
        let diag = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.5, 1.5),
        ];
        assert!(SlitDomain::new(diag, vec![]).is_err());
        let sq = || {
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ]
        };
        // Cross-cut from bottom to top.
        let cut = (Point::new(0.5, 0.0), Point::new(0.5, 1.0));
        assert!(SlitDomain::new(sq(), vec![cut]).is_err());
        // Crossing slits.
        let s1 = (Point::new(0.5, 0.2), Point::new(0.5, 0.8));
        let s2 = (Point::new(0.2, 0.5), Point::new(0.8, 0.5));
        assert!(SlitDomain::new(sq(), vec![s1, s2]).is_err());
        // Outside.
        let out = (Point::new(1.5, 0.2), Point::new(1.5, 0.8));
        assert!(SlitDomain::new(sq(), vec![out]).is_err());
    }

    #[test]
    fn overlapping_slits_merge() {
        let sq = vec![
            Point::new(q(0, 1), q(0, 1)),
            Point::new(q(1, 1), q(0, 1)),
            Point::new(q(1, 1), q(1, 1)),
            Point::new(q(0, 1), q(1, 1)),
        ];
        let s1 = (Point::new(q(1, 2), q(1, 2)), Point::new(q(1, 2), q(1, 1)));
        let s2 = (Point::new(q(1, 2), q(1, 4)), Point::new(q(1, 2), q(1, 1)));
        let d = SlitDomain::new(sq, vec![s1, s2]).unwrap();
        assert_eq!(d.slits().len(), 1);
        assert_eq!(d.slits()[0].a.y, q(1, 4));
        assert_eq!(d.slits()[0].foot().unwrap().y, q(1, 1));
    }
}
