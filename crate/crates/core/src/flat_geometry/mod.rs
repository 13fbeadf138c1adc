//! Rectilinear slit domains: the flat world where the quadratic
//! differential is `dw²`.
//!
//! A [`SlitDomain`] is a counterclockwise rectilinear polygon minus a set of
//! axis-aligned slits. Its prime-end boundary is described by one or more
//! [`BoundaryLoop`]s; subsets of the boundary are [`BoundarySet`]s measured
//! in loop arc length.

mod boundary;
mod curve;
pub(crate) mod domain;
pub mod io;

pub use boundary::{
    boundary_complement, BoundaryElement, BoundaryLoop, BoundaryPiece, BoundarySet, LoopArc,
    LoopElement,
};
pub use curve::PolyCurve;
pub use domain::{build_rectangle, build_slit_rectangle, Slit, SlitDomain};

use crate::scalar::Coord;

/// Point of the flat domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<C> {
    pub x: C,
    pub y: C,
}

impl<C: Coord> Point<C> {
    pub fn new(x: C, y: C) -> Self {
        Self { x, y }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }

    pub fn same(&self, other: &Self) -> bool {
        self.x.same(&other.x) && self.y.same(&other.y)
    }

    pub fn dist_sq(&self, other: &Self) -> C {
        let dx = self.x.clone() - other.x.clone();
        let dy = self.y.clone() - other.y.clone();
        dx.clone() * dx + dy.clone() * dy
    }

    pub(crate) fn lerp(&self, other: &Self, t: &C) -> Self {
        Self::new(
            self.x.clone() + (other.x.clone() - self.x.clone()) * t.clone(),
            self.y.clone() + (other.y.clone() - self.y.clone()) * t.clone(),
        )
    }
}

/// Which side of a slit, relative to its canonical direction (bottom to top
/// for vertical slits, left to right for horizontal ones).
///
/// For a vertical slit `Left` is the west side; for a horizontal slit it is
/// the north side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Direction an outer edge faces, i.e. the side of the domain it bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Facing {
    /// Edge along the bottom of the domain (interior above it).
    Bottom,
    Top,
    Left,
    Right,
}

impl std::str::FromStr for Facing {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bottom" => Ok(Facing::Bottom),
            "top" => Ok(Facing::Top),
            "left" => Ok(Facing::Left),
            "right" => Ok(Facing::Right),
            other => Err(crate::Error::Parse(format!("unknown side '{other}'"))),
        }
    }
}

pub(crate) fn orient<C: Coord>(a: &Point<C>, b: &Point<C>, c: &Point<C>) -> C {
    (b.x.clone() - a.x.clone()) * (c.y.clone() - a.y.clone())
        - (b.y.clone() - a.y.clone()) * (c.x.clone() - a.x.clone())
}

/// True when `p` lies on the closed segment `[a, b]`.
pub(crate) fn on_segment<C: Coord>(p: &Point<C>, a: &Point<C>, b: &Point<C>) -> bool {
    if !orient(a, b, p).same(&C::zero()) {
        return false;
    }
    let (xlo, xhi) = (C::min_of(&a.x, &b.x), C::max_of(&a.x, &b.x));
    let (ylo, yhi) = (C::min_of(&a.y, &b.y), C::max_of(&a.y, &b.y));
    (p.x >= xlo || p.x.same(&xlo))
        && (p.x <= xhi || p.x.same(&xhi))
        && (p.y >= ylo || p.y.same(&ylo))
        && (p.y <= yhi || p.y.same(&yhi))
}

fn sign<C: Coord>(v: &C) -> i8 {
    if v.same(&C::zero()) {
        0
    } else if *v > C::zero() {
        1
    } else {
        -1
    }
}

/// Transversal crossing of segment interiors (no endpoint involvement).
pub(crate) fn segments_cross<C: Coord>(
    a: &Point<C>,
    b: &Point<C>,
    c: &Point<C>,
    d: &Point<C>,
) -> bool {
    let o1 = sign(&orient(a, b, c));
    let o2 = sign(&orient(a, b, d));
    let o3 = sign(&orient(c, d, a));
    let o4 = sign(&orient(c, d, b));
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Any common point of two closed segments.
pub(crate) fn segments_intersect<C: Coord>(
    a: &Point<C>,
    b: &Point<C>,
    c: &Point<C>,
    d: &Point<C>,
) -> bool {
    segments_cross(a, b, c, d)
        || on_segment(c, a, b)
        || on_segment(d, a, b)
        || on_segment(a, c, d)
        || on_segment(b, c, d)
}

/// Squared distance from `p` to the closed segment `[a, b]`, exact for
/// rational coordinates.
pub(crate) fn point_segment_dist_sq<C: Coord>(p: &Point<C>, a: &Point<C>, b: &Point<C>) -> C {
    let len_sq = a.dist_sq(b);
    if len_sq.same(&C::zero()) {
        return p.dist_sq(a);
    }
    let t = ((p.x.clone() - a.x.clone()) * (b.x.clone() - a.x.clone())
        + (p.y.clone() - a.y.clone()) * (b.y.clone() - a.y.clone()))
        / len_sq;
    let t = C::max_of(&C::zero(), &C::min_of(&C::one(), &t));
    p.dist_sq(&a.lerp(b, &t))
}

pub(crate) fn segment_dist_sq<C: Coord>(
    a: &Point<C>,
    b: &Point<C>,
    c: &Point<C>,
    d: &Point<C>,
) -> C {
    if segments_intersect(a, b, c, d) {
        return C::zero();
    }
    let cands = [
        point_segment_dist_sq(a, c, d),
        point_segment_dist_sq(b, c, d),
        point_segment_dist_sq(c, a, b),
        point_segment_dist_sq(d, a, b),
    ];
    cands
        .into_iter()
        .fold(None::<C>, |acc, v| match acc {
            None => Some(v),
            Some(m) => Some(C::min_of(&m, &v)),
        })
        .expect("four candidates")
}
