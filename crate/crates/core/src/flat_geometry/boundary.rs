use super::domain::{Slit, SlitDomain};
use super::{segment_dist_sq, Facing, Point, Side};
use crate::error::{invalid, Result};
use crate::scalar::Coord;

/// Geometric carrier of a prime-end boundary piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryElement {
    /// Outer polygon edge `i`, from vertex `i` to vertex `i + 1`.
    Edge(usize),
    /// One side of slit `slit`.
    SlitSide { slit: usize, side: Side },
    /// Zero-length turning point at a free slit end (`at_b` selects `b`).
    Tip { slit: usize, at_b: bool },
}

/// One traversal step of a boundary loop.
///
/// `t_start` and `t_end` are positions along the carrier: distance from
/// the edge start vertex for edges and distance from `a` for slits.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopElement<C> {
    pub element: BoundaryElement,
    pub start: Point<C>,
    pub end: Point<C>,
    pub s0: C,
    pub len: C,
    pub t_start: C,
    pub t_end: C,
}

/// Closed prime-end boundary loop parameterized by arc length `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLoop<C> {
    pub elements: Vec<LoopElement<C>>,
    pub length: C,
}

fn axis_len<C: Coord>(p: &Point<C>, q: &Point<C>) -> C {
    (q.x.clone() - p.x.clone()).abs() + (q.y.clone() - p.y.clone()).abs()
}

struct LoopBuilder<C> {
    elements: Vec<LoopElement<C>>,
    s: C,
}

impl<C: Coord> LoopBuilder<C> {
    fn new() -> Self {
        Self {
            elements: Vec::new(),
            s: C::zero(),
        }
    }

    fn push(&mut self, element: BoundaryElement, start: Point<C>, end: Point<C>, t0: C, t1: C) {
        let len = axis_len(&start, &end);
        self.elements.push(LoopElement {
            element,
            start,
            end,
            s0: self.s.clone(),
            len: len.clone(),
            t_start: t0,
            t_end: t1,
        });
        self.s = self.s.clone() + len;
    }

    fn finish(self) -> BoundaryLoop<C> {
        BoundaryLoop {
            elements: self.elements,
            length: self.s,
        }
    }

    fn detour(&mut self, idx: usize, slit: &Slit<C>) {
        let foot_is_b = slit.foot_is_b.expect("attached slit");
        let len = slit.length();
        let (foot, tip) = if foot_is_b {
            (&slit.b, &slit.a)
        } else {
            (&slit.a, &slit.b)
        };
        let (t_foot, t_tip) = if foot_is_b {
            (len, C::zero())
        } else {
            (C::zero(), len)
        };
        // Outbound along the side left of the foot-to-tip direction.
        let (out_side, back_side) = if foot_is_b {
            (Side::Right, Side::Left)
        } else {
            (Side::Left, Side::Right)
        };
        self.push(
            BoundaryElement::SlitSide {
                slit: idx,
                side: out_side,
            },
            foot.clone(),
            tip.clone(),
            t_foot.clone(),
            t_tip.clone(),
        );
        self.push(
            BoundaryElement::Tip {
                slit: idx,
                at_b: !foot_is_b,
            },
            tip.clone(),
            tip.clone(),
            t_tip.clone(),
            t_tip.clone(),
        );
        self.push(
            BoundaryElement::SlitSide {
                slit: idx,
                side: back_side,
            },
            tip.clone(),
            foot.clone(),
            t_tip,
            t_foot,
        );
    }
}

pub(crate) fn build_loops<C: Coord>(outer: &[Point<C>], slits: &[Slit<C>]) -> Vec<BoundaryLoop<C>> {
    let n = outer.len();
    let mut feet: Vec<Vec<(C, usize)>> = vec![Vec::new(); n];
    for (k, s) in slits.iter().enumerate() {
        if s.on_boundary {
            continue;
        }
        let Some(foot) = s.foot() else { continue };
        for i in 0..n {
            let (p, q) = (&outer[i], &outer[(i + 1) % n]);
            if super::on_segment(foot, p, q) && !foot.same(q) {
                feet[i].push((axis_len(p, foot), k));
                break;
            }
        }
    }
    let mut outer_loop = LoopBuilder::new();
    for i in 0..n {
        let (p, q) = (&outer[i], &outer[(i + 1) % n]);
        feet[i].sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut t = C::zero();
        let mut at = p.clone();
        let elen = axis_len(p, q);
        for (tf, k) in &feet[i] {
            if *tf > t && !tf.same(&t) {
                let fp = p.lerp(q, &(tf.clone() / elen.clone()));
                outer_loop.push(BoundaryElement::Edge(i), at, fp.clone(), t, tf.clone());
                at = fp;
                t = tf.clone();
            }
            outer_loop.detour(*k, &slits[*k]);
        }
        outer_loop.push(BoundaryElement::Edge(i), at, q.clone(), t, elen);
    }
    let mut loops = vec![outer_loop.finish()];
    for (k, s) in slits.iter().enumerate() {
        if !s.is_floating() {
            continue;
        }
        let len = s.length();
        let mut b = LoopBuilder::new();
        b.push(
            BoundaryElement::SlitSide {
                slit: k,
                side: Side::Left,
            },
            s.a.clone(),
            s.b.clone(),
            C::zero(),
            len.clone(),
        );
        b.push(
            BoundaryElement::Tip {
                slit: k,
                at_b: true,
            },
            s.b.clone(),
            s.b.clone(),
            len.clone(),
            len.clone(),
        );
        b.push(
            BoundaryElement::SlitSide {
                slit: k,
                side: Side::Right,
            },
            s.b.clone(),
            s.a.clone(),
            len,
            C::zero(),
        );
        b.push(
            BoundaryElement::Tip {
                slit: k,
                at_b: false,
            },
            s.a.clone(),
            s.a.clone(),
            C::zero(),
            C::zero(),
        );
        loops.push(b.finish());
    }
    loops
}

impl<C: Coord> BoundaryLoop<C> {
    /// Index of the element containing loop position `s` (the first one
    /// with positive length whose range contains it).
    pub fn locate(&self, s: &C) -> usize {
        let mut last = 0;
        for (i, e) in self.elements.iter().enumerate() {
            if e.len.same(&C::zero()) {
                continue;
            }
            last = i;
            let end = e.s0.clone() + e.len.clone();
            if *s < end && !s.same(&end) {
                return i;
            }
        }
        last
    }

    /// Point at loop position `s ∈ [0, length]`.
    pub fn point_at(&self, s: &C) -> Point<C> {
        let e = &self.elements[self.locate(s)];
        let t = (s.clone() - e.s0.clone()) / e.len.clone();
        e.start.lerp(&e.end, &t)
    }

    /// Loop positions where `element` passes carrier position `t`.
    pub fn positions_of(&self, element: BoundaryElement, t: &C) -> Vec<C> {
        let mut out = Vec::new();
        for e in &self.elements {
            if e.element != element {
                continue;
            }
            let lo = C::min_of(&e.t_start, &e.t_end);
            let hi = C::max_of(&e.t_start, &e.t_end);
            if (*t >= lo || t.same(&lo)) && (*t <= hi || t.same(&hi)) {
                out.push(e.s0.clone() + (t.clone() - e.t_start.clone()).abs());
            }
        }
        out
    }

    /// Loop range `(s0, s1)` covered by the positive-length elements
    /// carried by `element`.
    pub fn span_of(&self, element: BoundaryElement) -> Vec<(C, C)> {
        self.elements
            .iter()
            .filter(|e| e.element == element && !e.len.same(&C::zero()))
            .map(|e| (e.s0.clone(), e.s0.clone() + e.len.clone()))
            .collect()
    }
}

/// Closed arc `[s0, s1]` of boundary loop `component`, with `s0 < s1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopArc<C> {
    pub component: usize,
    pub s0: C,
    pub s1: C,
}

/// Sub-segment of a boundary carrier belonging to a [`BoundarySet`].
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPiece<C> {
    pub component: usize,
    pub element: BoundaryElement,
    /// Carrier parameter interval, in traversal order.
    pub t0: C,
    pub t1: C,
    pub p0: Point<C>,
    pub p1: Point<C>,
}

impl<C: Coord> BoundaryPiece<C> {
    pub fn length(&self) -> C {
        axis_len(&self.p0, &self.p1)
    }
}

/// Closed subset of the prime-end boundary: a finite union of loop arcs.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySet<C> {
    arcs: Vec<LoopArc<C>>,
    pieces: Vec<BoundaryPiece<C>>,
}

impl<C: Coord> BoundarySet<C> {
    fn from_arcs(dom: &SlitDomain<C>, arcs: Vec<LoopArc<C>>) -> Result<Self> {
        if arcs.is_empty() {
            return invalid("empty boundary set");
        }
        let mut arcs = arcs;
        arcs.sort_by(|u, v| {
            (u.component, &u.s0)
                .partial_cmp(&(v.component, &v.s0))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut merged: Vec<LoopArc<C>> = Vec::new();
        for a in arcs {
            if let Some(m) = merged.last_mut() {
                if m.component == a.component && (a.s0 <= m.s1 || a.s0.same(&m.s1)) {
                    m.s1 = C::max_of(&m.s1, &a.s1);
                    continue;
                }
            }
            merged.push(a);
        }
        let mut pieces = Vec::new();
        for a in &merged {
            let lp = &dom.loops()[a.component];
            for e in &lp.elements {
                if e.len.same(&C::zero()) {
                    continue;
                }
                let e1 = e.s0.clone() + e.len.clone();
                let lo = C::max_of(&a.s0, &e.s0);
                let hi = C::min_of(&a.s1, &e1);
                if hi <= lo || hi.same(&lo) {
                    continue;
                }
                let u0 = (lo.clone() - e.s0.clone()) / e.len.clone();
                let u1 = (hi.clone() - e.s0.clone()) / e.len.clone();
                let dt = e.t_end.clone() - e.t_start.clone();
                pieces.push(BoundaryPiece {
                    component: a.component,
                    element: e.element,
                    t0: e.t_start.clone() + dt.clone() * u0.clone(),
                    t1: e.t_start.clone() + dt * u1.clone(),
                    p0: e.start.lerp(&e.end, &u0),
                    p1: e.start.lerp(&e.end, &u1),
                });
            }
        }
        if pieces.is_empty() {
            return invalid("boundary set has zero length");
        }
        Ok(Self {
            arcs: merged,
            pieces,
        })
    }

    /// Arc `[s0, s1]` of a boundary loop; `s1 < s0` wraps through the
    /// loop origin.
    pub fn arc(dom: &SlitDomain<C>, component: usize, s0: C, s1: C) -> Result<Self> {
        let Some(lp) = dom.loops().get(component) else {
            return invalid(format!("no boundary component {component}"));
        };
        let len = lp.length.clone();
        let inside = |s: &C| (*s >= C::zero()) && (*s <= len || s.same(&len));
        if !inside(&s0) || !inside(&s1) {
            return invalid("arc endpoints outside the loop");
        }
        if s0.same(&s1) {
            return invalid("arc has zero length");
        }
        let arcs = if s0 < s1 {
            vec![LoopArc { component, s0, s1 }]
        } else {
            let mut v = Vec::new();
            if !s0.same(&len) {
                v.push(LoopArc {
                    component,
                    s0,
                    s1: len,
                });
            }
            if !s1.same(&C::zero()) {
                v.push(LoopArc {
                    component,
                    s0: C::zero(),
                    s1,
                });
            }
            v
        };
        Self::from_arcs(dom, arcs)
    }

    /// Points of outer edge `edge` with carrier parameter in `[t0, t1]`.
    /// Slit feet inside the range split the set into several prime-end
    /// arcs.
    pub fn on_edge(dom: &SlitDomain<C>, edge: usize, t0: C, t1: C) -> Result<Self> {
        Self::on_carrier(dom, BoundaryElement::Edge(edge), t0, t1)
    }

    /// One side of slit `slit`, carrier parameter (distance from `a`) in
    /// `[t0, t1]`.
    pub fn slit_side(dom: &SlitDomain<C>, slit: usize, side: Side, t0: C, t1: C) -> Result<Self> {
        if slit >= dom.slits().len() || dom.slits()[slit].on_boundary {
            return invalid(format!("slit {slit} is not an interior slit"));
        }
        Self::on_carrier(dom, BoundaryElement::SlitSide { slit, side }, t0, t1)
    }

    fn on_carrier(dom: &SlitDomain<C>, element: BoundaryElement, t0: C, t1: C) -> Result<Self> {
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        let mut arcs = Vec::new();
        for (c, lp) in dom.loops().iter().enumerate() {
            for e in &lp.elements {
                if e.element != element || e.len.same(&C::zero()) {
                    continue;
                }
                let elo = C::min_of(&e.t_start, &e.t_end);
                let ehi = C::max_of(&e.t_start, &e.t_end);
                let a = C::max_of(&lo, &elo);
                let b = C::min_of(&hi, &ehi);
                if b <= a || b.same(&a) {
                    continue;
                }
                let sa = e.s0.clone() + (a - e.t_start.clone()).abs();
                let sb = e.s0.clone() + (b - e.t_start.clone()).abs();
                let (s0, s1) = if sa <= sb { (sa, sb) } else { (sb, sa) };
                arcs.push(LoopArc {
                    component: c,
                    s0,
                    s1,
                });
            }
        }
        if arcs.is_empty() {
            return invalid("carrier range does not meet the boundary");
        }
        Self::from_arcs(dom, arcs)
    }

    /// Union of all outer edges facing the given direction.
    pub fn facing(dom: &SlitDomain<C>, facing: Facing) -> Result<Self> {
        let mut arcs = Vec::new();
        for i in 0..dom.edge_count() {
            let (p, q) = dom.edge(i);
            let f = if p.y.same(&q.y) {
                if q.x > p.x {
                    Facing::Bottom
                } else {
                    Facing::Top
                }
            } else if q.y > p.y {
                Facing::Right
            } else {
                Facing::Left
            };
            if f != facing {
                continue;
            }
            for (s0, s1) in dom.loops()[0].span_of(BoundaryElement::Edge(i)) {
                arcs.push(LoopArc {
                    component: 0,
                    s0,
                    s1,
                });
            }
        }
        if arcs.is_empty() {
            return invalid(format!("no {facing:?} edge"));
        }
        Self::from_arcs(dom, arcs)
    }

    pub fn whole_component(dom: &SlitDomain<C>, component: usize) -> Result<Self> {
        let Some(lp) = dom.loops().get(component) else {
            return invalid(format!("no boundary component {component}"));
        };
        Self::from_arcs(
            dom,
            vec![LoopArc {
                component,
                s0: C::zero(),
                s1: lp.length.clone(),
            }],
        )
    }

    pub fn union(&self, dom: &SlitDomain<C>, other: &Self) -> Result<Self> {
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().cloned());
        Self::from_arcs(dom, arcs)
    }

    pub fn arcs(&self) -> &[LoopArc<C>] {
        &self.arcs
    }

    pub fn pieces(&self) -> &[BoundaryPiece<C>] {
        &self.pieces
    }

    pub fn length(&self) -> C {
        self.arcs
            .iter()
            .fold(C::zero(), |acc, a| acc + a.s1.clone() - a.s0.clone())
    }

    /// Squared Euclidean diameter.
    pub fn diameter_sq(&self) -> C {
        let pts: Vec<&Point<C>> = self.pieces.iter().flat_map(|p| [&p.p0, &p.p1]).collect();
        let mut best = C::zero();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                best = C::max_of(&best, &pts[i].dist_sq(pts[j]));
            }
        }
        best
    }

    pub fn diameter(&self) -> f64 {
        self.diameter_sq().to_f64().sqrt()
    }

    /// Squared Euclidean distance between the two point sets.
    pub fn dist_sq(&self, other: &Self) -> C {
        let mut best: Option<C> = None;
        for p in &self.pieces {
            for q in &other.pieces {
                let d = segment_dist_sq(&p.p0, &p.p1, &q.p0, &q.p1);
                best = Some(match best {
                    None => d,
                    Some(b) => C::min_of(&b, &d),
                });
            }
        }
        best.unwrap_or_else(C::zero)
    }

    /// True when the sets share no prime-end point.
    pub fn is_disjoint(&self, dom: &SlitDomain<C>, other: &Self) -> bool {
        for a in &self.arcs {
            for b in &other.arcs {
                if a.component != b.component {
                    continue;
                }
                let len = &dom.loops()[a.component].length;
                let meets = |x: &LoopArc<C>, y: &LoopArc<C>| {
                    (x.s0 <= y.s1 || x.s0.same(&y.s1)) && (y.s0 <= x.s1 || y.s0.same(&x.s1))
                };
                if meets(a, b) {
                    return false;
                }
                // Touching through the loop origin.
                let at_end = |x: &LoopArc<C>| x.s1.same(len);
                let at_start = |x: &LoopArc<C>| x.s0.same(&C::zero());
                if (at_end(a) && at_start(b)) || (at_end(b) && at_start(a)) {
                    return false;
                }
            }
        }
        true
    }

    /// True when a point of the plane lies in the set.
    pub fn contains_point(&self, p: &Point<C>) -> bool {
        self.pieces
            .iter()
            .any(|q| super::on_segment(p, &q.p0, &q.p1))
    }

    /// Image under the affine map used by [`SlitDomain::affine`]; loop
    /// positions are recomputed from the carrier parameters.
    pub fn transport(&self, image: &SlitDomain<C>, sx: &C, sy: &C) -> Result<Self> {
        let mut out: Option<Self> = None;
        for p in &self.pieces {
            let scale = match p.element {
                BoundaryElement::Edge(i) => {
                    let (a, b) = image.edge(i);
                    if a.x.same(&b.x) {
                        sy
                    } else {
                        sx
                    }
                }
                BoundaryElement::SlitSide { slit, .. } => {
                    if image.slits()[slit].is_vertical() {
                        sy
                    } else {
                        sx
                    }
                }
                BoundaryElement::Tip { .. } => continue,
            };
            let t0 = p.t0.clone() * scale.clone();
            let t1 = p.t1.clone() * scale.clone();
            let piece = Self::on_carrier(image, p.element, t0, t1)?;
            out = Some(match out {
                None => piece,
                Some(acc) => acc.union(image, &piece)?,
            });
        }
        out.ok_or_else(|| crate::Error::InvalidParameter("empty boundary set".into()))
    }
}

/// Connected components of the boundary minus `e ∪ f`, counterclockwise
/// starting after `e`.
pub fn boundary_complement<C: Coord>(
    dom: &SlitDomain<C>,
    e: &BoundarySet<C>,
    f: &BoundarySet<C>,
) -> Result<Vec<BoundarySet<C>>> {
    if !e.is_disjoint(dom, f) {
        return invalid("boundary sets overlap");
    }
    let comps: Vec<usize> = e.arcs.iter().chain(&f.arcs).map(|a| a.component).collect();
    if comps.iter().any(|&c| c != 0) || !dom.is_simply_connected() {
        return invalid("boundary complement needs a single boundary component");
    }
    let len = dom.loops()[0].length.clone();
    let mut all: Vec<(C, C, bool)> = e
        .arcs
        .iter()
        .map(|a| (a.s0.clone(), a.s1.clone(), true))
        .chain(f.arcs.iter().map(|a| (a.s0.clone(), a.s1.clone(), false)))
        .collect();
    all.sort_by(|u, v| u.0.partial_cmp(&v.0).unwrap_or(std::cmp::Ordering::Equal));
    let m = all.len();
    let first_e = all.iter().position(|a| a.2).expect("e is nonempty");
    let mut out = Vec::new();
    for step in 0..m {
        let i = (first_e + step) % m;
        let j = (i + 1) % m;
        let g0 = all[i].1.clone();
        let g1 = if j == 0 {
            all[j].0.clone() + len.clone()
        } else {
            all[j].0.clone()
        };
        if g1 <= g0 || g1.same(&g0) {
            continue;
        }
        let (s0, s1) = if g1 > len && !g1.same(&len) && !g0.same(&len) {
            (g0, g1 - len.clone())
        } else if g0.same(&len) {
            (C::zero(), g1 - len.clone())
        } else {
            (g0, g1)
        };
        out.push(BoundarySet::arc(dom, 0, s0, s1)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_geometry::{build_rectangle, build_slit_rectangle};
    use crate::scalar::Exact;

    fn q(p: i64, d: i64) -> Exact {
        Exact::new(p, d)
    }

    #[test]
    fn square_loop() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let lp = &sq.loops()[0];
        assert_eq!(lp.length, q(4, 1));
        assert_eq!(lp.point_at(&q(3, 2)), Point::new(q(1, 1), q(1, 2)));
    }

    #[test]
    fn slit_detour_lengths() {
        let d = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 4).unwrap();
        // Three interior slits of length 1/2, both sides each.
        assert_eq!(d.loops()[0].length, q(4, 1) + q(3, 1));
        assert!(d.is_simply_connected());
    }

    #[test]
    fn complement_of_square_sides() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let bottom = BoundarySet::facing(&sq, Facing::Bottom).unwrap();
        let top = BoundarySet::facing(&sq, Facing::Top).unwrap();
        let right = BoundarySet::facing(&sq, Facing::Right).unwrap();
        let left = BoundarySet::facing(&sq, Facing::Left).unwrap();
        let comps = boundary_complement(&sq, &bottom, &top).unwrap();
        assert_eq!(comps, vec![right, left]);
        assert!(boundary_complement(&sq, &bottom, &bottom).is_err());
    }

    #[test]
    fn corner_touching_sets_are_not_disjoint() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let bottom = BoundarySet::facing(&sq, Facing::Bottom).unwrap();
        let left = BoundarySet::facing(&sq, Facing::Left).unwrap();
        assert!(!bottom.is_disjoint(&sq, &left));
    }

    #[test]
    fn floating_slit_gets_own_loop() {
        let sq = vec![
            Point::new(q(0, 1), q(0, 1)),
            Point::new(q(1, 1), q(0, 1)),
            Point::new(q(1, 1), q(1, 1)),
            Point::new(q(0, 1), q(1, 1)),
        ];
        let s = (Point::new(q(1, 4), q(1, 2)), Point::new(q(3, 4), q(1, 2)));
        let d = SlitDomain::new(sq, vec![s]).unwrap();
        assert_eq!(d.loops().len(), 2);
        assert_eq!(d.loops()[1].length, q(1, 1));
        let north = BoundarySet::slit_side(&d, 0, Side::Left, q(0, 1), q(1, 2)).unwrap();
        assert_eq!(north.pieces()[0].p1, Point::new(q(3, 4), q(1, 2)));
    }

    #[test]
    fn diameter_and_distance() {
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let bottom = BoundarySet::facing(&sq, Facing::Bottom).unwrap();
        let top = BoundarySet::facing(&sq, Facing::Top).unwrap();
        assert_eq!(bottom.diameter_sq(), q(1, 1));
        assert_eq!(bottom.dist_sq(&top), q(1, 1));
    }

    #[test]
    fn edge_split_by_foot() {
        let d = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 2).unwrap();
        // The top edge is split by the interior slit foot at x = 1/2.
        let top = BoundarySet::facing(&d, Facing::Top).unwrap();
        assert_eq!(top.arcs().len(), 2);
        assert_eq!(top.length(), q(1, 1));
    }
}
