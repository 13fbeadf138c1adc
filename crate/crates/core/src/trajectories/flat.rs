//! Vertical fibers of a flat slit domain, where `φ = dw²` and vertical
//! trajectories are Euclidean vertical segments.

use crate::flat_geometry::{BoundaryElement, BoundarySet, Point, PolyCurve, Side, SlitDomain};
use crate::scalar::Coord;

/// Prime end reached by a vertical fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberEnd<C> {
    pub point: Point<C>,
    pub element: BoundaryElement,
    pub component: usize,
    /// Loop position of the prime end.
    pub s: C,
}

/// Maximal vertical segment `{x} × (y0, y1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalSegment<C> {
    pub x: C,
    pub y0: C,
    pub y1: C,
    pub bottom: Option<FiberEnd<C>>,
    pub top: Option<FiberEnd<C>>,
    /// The segment runs along a vertical slit instead of through the
    /// open domain.
    pub along_slit: bool,
}

impl<C: Coord> VerticalSegment<C> {
    pub fn length(&self) -> C {
        self.y1.clone() - self.y0.clone()
    }
}

fn in_right_range<C: Coord>(x: &C, lo: &C, hi: &C) -> bool {
    (*x >= *lo || x.same(lo)) && *x < *hi && !x.same(hi)
}

/// Loop position of the prime end on carrier `element` at parameter `t`,
/// taken as the limit from larger abscissae when `t` sits at an element
/// boundary. `dt_dx` is the sign of `dt/dx` along the carrier.
fn prime_end<C: Coord>(
    dom: &SlitDomain<C>,
    element: BoundaryElement,
    t: &C,
    dt_dx: i8,
) -> Option<(usize, C)> {
    for (c, lp) in dom.loops().iter().enumerate() {
        for e in &lp.elements {
            if e.element != element || e.len.same(&C::zero()) {
                continue;
            }
            let lo = C::min_of(&e.t_start, &e.t_end);
            let hi = C::max_of(&e.t_start, &e.t_end);
            let ok = if dt_dx > 0 {
                in_right_range(t, &lo, &hi)
            } else {
                (*t > lo && !t.same(&lo)) && (*t <= hi || t.same(&hi))
            };
            if ok {
                return Some((c, e.s0.clone() + (t.clone() - e.t_start.clone()).abs()));
            }
        }
    }
    None
}

fn end_on<C: Coord>(
    dom: &SlitDomain<C>,
    element: BoundaryElement,
    x: &C,
    y: &C,
) -> Option<FiberEnd<C>> {
    let (t, sign) = match element {
        BoundaryElement::Edge(i) => {
            let (p, q) = dom.edge(i);
            let sign = if q.x > p.x { 1 } else { -1 };
            ((x.clone() - p.x.clone()).abs(), sign)
        }
        BoundaryElement::SlitSide { slit, .. } => (x.clone() - dom.slits()[slit].a.x.clone(), 1),
        BoundaryElement::Tip { .. } => return None,
    };
    let (component, s) = prime_end(dom, element, &t, sign)?;
    Some(FiberEnd {
        point: Point::new(x.clone(), y.clone()),
        element,
        component,
        s,
    })
}

/// Maximal vertical segments through abscissa `x`, as right limits: at a
/// critical abscissa the segments of the strip just to the right are
/// returned (vertical slits and edges at `x` are ignored).
pub fn fibers<C: Coord>(dom: &SlitDomain<C>, x: &C) -> Vec<VerticalSegment<C>> {
    let mut hits: Vec<(C, BoundaryElement)> = Vec::new();
    for i in 0..dom.edge_count() {
        let (p, q) = dom.edge(i);
        if !p.y.same(&q.y) {
            continue;
        }
        let (lo, hi) = (C::min_of(&p.x, &q.x), C::max_of(&p.x, &q.x));
        if in_right_range(x, &lo, &hi) {
            hits.push((p.y.clone(), BoundaryElement::Edge(i)));
        }
    }
    hits.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut cuts: Vec<(C, usize)> = dom
        .slits()
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.on_boundary && !s.is_vertical() && in_right_range(x, &s.a.x, &s.b.x))
        .map(|(k, s)| (s.a.y.clone(), k))
        .collect();
    cuts.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut out = Vec::new();
    for pair in hits.chunks(2) {
        if pair.len() < 2 {
            break;
        }
        let (ylo, elo) = (&pair[0].0, pair[0].1);
        let (yhi, ehi) = (&pair[1].0, pair[1].1);
        let mut bottom = (ylo.clone(), elo);
        for (yc, k) in cuts.iter().filter(|(y, _)| *y > *ylo && *y < *yhi) {
            out.push(segment(
                dom,
                x,
                bottom.clone(),
                (
                    yc.clone(),
                    BoundaryElement::SlitSide {
                        slit: *k,
                        side: Side::Right,
                    },
                ),
            ));
            bottom = (
                yc.clone(),
                BoundaryElement::SlitSide {
                    slit: *k,
                    side: Side::Left,
                },
            );
        }
        out.push(segment(dom, x, bottom, (yhi.clone(), ehi)));
    }
    out
}

fn segment<C: Coord>(
    dom: &SlitDomain<C>,
    x: &C,
    bottom: (C, BoundaryElement),
    top: (C, BoundaryElement),
) -> VerticalSegment<C> {
    VerticalSegment {
        x: x.clone(),
        bottom: end_on(dom, bottom.1, x, &bottom.0),
        top: end_on(dom, top.1, x, &top.0),
        y0: bottom.0,
        y1: top.0,
        along_slit: false,
    }
}

/// Abscissae where the fiber structure of the domain can change.
pub fn critical_abscissae<C: Coord>(dom: &SlitDomain<C>) -> Vec<C> {
    let mut xs: Vec<C> = dom.outer().iter().map(|p| p.x.clone()).collect();
    for s in dom.slits() {
        if !s.on_boundary {
            xs.push(s.a.x.clone());
            xs.push(s.b.x.clone());
        }
    }
    sort_dedup(xs)
}

pub(crate) fn sort_dedup<C: Coord>(mut xs: Vec<C>) -> Vec<C> {
    xs.sort_by(|u, v| u.partial_cmp(v).unwrap_or(std::cmp::Ordering::Equal));
    xs.dedup_by(|a, b| a.same(b));
    xs
}

/// The maximal open vertical segments of the line `Re = x` inside the
/// domain. At a vertical slit abscissa the slit splits the line; the part
/// running along the slit is reported with `along_slit` set.
pub fn vertical_through<C: Coord>(dom: &SlitDomain<C>, x: &C) -> Vec<VerticalSegment<C>> {
    let (x0, _, x1, _) = dom.bbox();
    if (*x < x0 && !x.same(&x0)) || (*x > x1 && !x.same(&x1)) {
        return Vec::new();
    }
    let crit = critical_abscissae(dom);
    if !crit.iter().any(|c| c.same(x)) {
        return fibers(dom, x);
    }
    // Left and right limits; the fiber at x is their common part.
    let right = if x.same(&x1) {
        Vec::new()
    } else {
        fibers(dom, x)
    };
    let left = left_fibers(dom, x);
    let mut pieces: Vec<(C, C)> = Vec::new();
    for l in &left {
        for r in &right {
            let lo = C::max_of(&l.y0, &r.y0);
            let hi = C::min_of(&l.y1, &r.y1);
            if lo < hi && !lo.same(&hi) {
                pieces.push((lo, hi));
            }
        }
    }
    let mut out = Vec::new();
    for (lo, hi) in pieces {
        // Cut by vertical slits at x and by horizontal slits ending at x.
        let mut marks: Vec<(C, C)> = Vec::new();
        for s in dom.slits().iter().filter(|s| !s.on_boundary) {
            if s.is_vertical() && s.a.x.same(x) {
                marks.push((s.a.y.clone(), s.b.y.clone()));
            } else if !s.is_vertical() && (s.a.x.same(x) || s.b.x.same(x)) {
                marks.push((s.a.y.clone(), s.a.y.clone()));
            }
        }
        marks.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut y = lo.clone();
        for (a, b) in marks {
            if b <= lo || a >= hi {
                continue;
            }
            let a = C::max_of(&a, &lo);
            let b = C::min_of(&b, &hi);
            if a > y && !a.same(&y) {
                out.push(bare(x, y.clone(), a.clone(), false));
            }
            if b > a && !b.same(&a) {
                out.push(bare(x, a, b.clone(), true));
            }
            y = C::max_of(&y, &b);
        }
        if hi > y && !hi.same(&y) {
            out.push(bare(x, y, hi, false));
        }
    }
    out
}

fn bare<C: Coord>(x: &C, y0: C, y1: C, along_slit: bool) -> VerticalSegment<C> {
    VerticalSegment {
        x: x.clone(),
        y0,
        y1,
        bottom: None,
        top: None,
        along_slit,
    }
}

fn left_fibers<C: Coord>(dom: &SlitDomain<C>, x: &C) -> Vec<VerticalSegment<C>> {
    // Mirror the domain so that left limits become right limits.
    let Some(m) = mirror(dom) else {
        return Vec::new();
    };
    fibers(&m, &(-x.clone()))
        .into_iter()
        .map(|mut s| {
            s.x = x.clone();
            s.bottom = None;
            s.top = None;
            s
        })
        .collect()
}

fn mirror<C: Coord>(dom: &SlitDomain<C>) -> Option<SlitDomain<C>> {
    let outer = dom
        .outer()
        .iter()
        .map(|p| Point::new(-p.x.clone(), p.y.clone()))
        .collect();
    let slits = dom
        .slits()
        .iter()
        .map(|s| {
            (
                Point::new(-s.a.x.clone(), s.a.y.clone()),
                Point::new(-s.b.x.clone(), s.b.y.clone()),
            )
        })
        .collect();
    SlitDomain::new(outer, slits).ok()
}

/// Strip structure: open abscissa intervals on which the fibers move
/// rigidly, each with its fibers evaluated at the interval midpoint.
pub fn strips<C: Coord>(dom: &SlitDomain<C>, extra: &[C]) -> Vec<(C, C, Vec<VerticalSegment<C>>)> {
    let (x0, _, x1, _) = dom.bbox();
    let mut xs = critical_abscissae(dom);
    xs.extend(extra.iter().filter(|x| **x > x0 && **x < x1).cloned());
    let xs = sort_dedup(xs);
    xs.windows(2)
        .map(|w| {
            let mid = (w[0].clone() + w[1].clone()) * C::half();
            (w[0].clone(), w[1].clone(), fibers(dom, &mid))
        })
        .collect()
}

fn set_contains_end<C: Coord>(set: &BoundarySet<C>, end: &FiberEnd<C>) -> bool {
    set.arcs().iter().any(|a| {
        a.component == end.component
            && (end.s >= a.s0 || end.s.same(&a.s0))
            && (end.s <= a.s1 || end.s.same(&a.s1))
    })
}

fn horizontal_piece_xs<C: Coord>(set: &BoundarySet<C>) -> Vec<C> {
    set.pieces()
        .iter()
        .filter(|p| p.p0.y.same(&p.p1.y))
        .flat_map(|p| [p.p0.x.clone(), p.p1.x.clone()])
        .collect()
}

/// `∫_X dx / l(x)` over the abscissae whose vertical fiber joins `e` and
/// `f`; exact on rational data.
pub fn vertical_family_modulus<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
) -> C {
    let mut extra = horizontal_piece_xs(e);
    extra.extend(horizontal_piece_xs(f));
    let mut total = C::zero();
    for (a, b, segs) in strips(dom, &extra) {
        let dx = b - a;
        for s in segs {
            let (Some(bot), Some(top)) = (&s.bottom, &s.top) else {
                continue;
            };
            let joins = (set_contains_end(e, bot) && set_contains_end(f, top))
                || (set_contains_end(f, bot) && set_contains_end(e, top));
            if joins {
                total = total + dx.clone() / s.length();
            }
        }
    }
    total
}

/// Width of a curve: the measure of abscissae whose fiber the curve
/// meets, summed over strips.
pub fn width<C: Coord>(dom: &SlitDomain<C>, curve: &PolyCurve<C>) -> C {
    let vx: Vec<C> = curve.vertices().iter().map(|p| p.x.clone()).collect();
    let mut total = C::zero();
    for (a, b, segs) in strips(dom, &vx) {
        for s in &segs {
            let mut hits: Vec<(C, C)> = Vec::new();
            for w in curve.vertices().windows(2) {
                if let Some(iv) = meet_interval(&w[0], &w[1], &a, &b, &s.y0, &s.y1) {
                    hits.push(iv);
                }
            }
            total = total + union_length(hits);
        }
    }
    total
}

/// Sub-interval of `(a, b)` where the segment `p q` has ordinate in
/// `(y0, y1)`.
fn meet_interval<C: Coord>(
    p: &Point<C>,
    q: &Point<C>,
    a: &C,
    b: &C,
    y0: &C,
    y1: &C,
) -> Option<(C, C)> {
    if p.x.same(&q.x) {
        return None;
    }
    let (p, q) = if p.x < q.x { (p, q) } else { (q, p) };
    let lo = C::max_of(a, &p.x);
    let hi = C::min_of(b, &q.x);
    if hi <= lo || hi.same(&lo) {
        return None;
    }
    let slope = (q.y.clone() - p.y.clone()) / (q.x.clone() - p.x.clone());
    let (mut u, mut v) = (lo, hi);
    if slope.same(&C::zero()) {
        let y = p.y.clone();
        return if y > *y0 && y < *y1 && !y.same(y0) && !y.same(y1) {
            Some((u, v))
        } else {
            None
        };
    }
    // Solve y(x) = y0 and y(x) = y1.
    let x_of = |y: &C| p.x.clone() + (y.clone() - p.y.clone()) / slope.clone();
    let (xa, xb) = {
        let s0 = x_of(y0);
        let s1 = x_of(y1);
        if s0 <= s1 {
            (s0, s1)
        } else {
            (s1, s0)
        }
    };
    u = C::max_of(&u, &xa);
    v = C::min_of(&v, &xb);
    if v > u && !v.same(&u) {
        Some((u, v))
    } else {
        None
    }
}

fn union_length<C: Coord>(mut ivs: Vec<(C, C)>) -> C {
    ivs.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut total = C::zero();
    let mut cur: Option<(C, C)> = None;
    for (a, b) in ivs {
        match cur.take() {
            None => cur = Some((a, b)),
            Some((c0, c1)) => {
                if a <= c1 {
                    cur = Some((c0, C::max_of(&c1, &b)));
                } else {
                    total = total + (c1 - c0);
                    cur = Some((a, b));
                }
            }
        }
    }
    if let Some((c0, c1)) = cur {
        total = total + (c1 - c0);
    }
    total
}
