//! The comb domain: the unit square minus the vertical slits
//! `L_{k,j} = {2^-k + j·4^-k} × [2^-k, 1]`, and its boundary set families.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::flat_geometry::{BoundaryElement, BoundarySet, Point, Side, SlitDomain};
use crate::scalar::Coord;

/// Comb parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CombSpec {
    pub k_max: u32,
}

/// One entry `L_{k,j}` of the slit list.
#[derive(Clone, Debug, PartialEq)]
pub struct CombSlit<C> {
    pub k: u32,
    pub j: i64,
    pub x: C,
    pub foot_y: C,
}

/// Largest supported `k_max`; coordinates stay exact in `i64` rationals.
pub const MAX_LEVEL: u32 = 12;

impl CombSpec {
    pub fn new(k_max: u32) -> Result<Self> {
        if k_max < 1 {
            return invalid("k_max must be at least 1");
        }
        if k_max > MAX_LEVEL {
            return invalid(format!("k_max above {MAX_LEVEL} is not supported"));
        }
        Ok(Self { k_max })
    }

    /// All `L_{k,j}`, `k = 1..=k_max`, `j = 0..=2^k`, before merging.
    pub fn slit_list<C: Coord>(&self) -> Vec<CombSlit<C>> {
        let mut out = Vec::new();
        for k in 1..=self.k_max {
            let p = 1i64 << k;
            for j in 0..=p {
                out.push(CombSlit {
                    k,
                    j,
                    x: C::from_ratio(1, p) + C::from_ratio(j, p * p),
                    foot_y: C::from_ratio(1, p),
                });
            }
        }
        out
    }
}

/// The comb domain for levels `1..=k_max`.
pub fn build_comb<C: Coord>(k_max: u32) -> Result<SlitDomain<C>> {
    let spec = CombSpec::new(k_max)?;
    let slits = spec
        .slit_list::<C>()
        .into_iter()
        .map(|s| (Point::new(s.x.clone(), s.foot_y), Point::new(s.x, C::one())))
        .collect();
    let one = C::one();
    SlitDomain::new(
        vec![
            Point::new(C::zero(), C::zero()),
            Point::new(one.clone(), C::zero()),
            Point::new(one.clone(), one.clone()),
            Point::new(C::zero(), one),
        ],
        slits,
    )
}

/// The eight boundary sets of level `k`.
#[derive(Clone, Debug)]
pub struct CombSets<C> {
    pub k: u32,
    pub e: BoundarySet<C>,
    pub f: BoundarySet<C>,
    pub e_prime: BoundarySet<C>,
    pub f_prime: BoundarySet<C>,
    pub e1: BoundarySet<C>,
    pub e2: BoundarySet<C>,
    pub f1: BoundarySet<C>,
    pub f2: BoundarySet<C>,
}

fn edge_where<C: Coord>(
    dom: &SlitDomain<C>,
    pred: impl Fn(&Point<C>, &Point<C>) -> bool,
) -> Result<usize> {
    (0..dom.edge_count())
        .find(|&i| {
            let (p, q) = dom.edge(i);
            pred(p, q)
        })
        .ok_or_else(|| crate::Error::InvalidParameter("domain is not the unit square comb".into()))
}

fn interior_slit_at<C: Coord>(dom: &SlitDomain<C>, x: &C) -> Option<usize> {
    dom.slits()
        .iter()
        .position(|s| !s.on_boundary && s.is_vertical() && s.a.x.same(x))
}

fn single_position<C: Coord>(
    dom: &SlitDomain<C>,
    element: BoundaryElement,
    t: &C,
    last: bool,
) -> Result<C> {
    let mut ps = dom.loops()[0].positions_of(element, t);
    ps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let pick = if last { ps.last() } else { ps.first() };
    pick.cloned()
        .ok_or_else(|| crate::Error::InvalidParameter("position not on the boundary".into()))
}

/// Boundary sets of level `k` of the comb built with [`build_comb`].
///
/// `F_k = [2^-k, 2^{1-k}]` on the bottom edge and `E_k` the arc above it:
/// from the west side of the slit at `2^{1-k}` (from height `2^-k`), along
/// the top with every slit in between, down the east side of the slit at
/// `2^-k` to height `2^-k`. Primed sets are the halves with the same
/// centre; `E¹, F¹` are the western and `E², F²` the eastern remainders.
pub fn comb_sets<C: Coord>(dom: &SlitDomain<C>, k_max: u32, k: u32) -> Result<CombSets<C>> {
    if k < 1 || k > k_max {
        return invalid(format!("level {k} outside 1..={k_max}"));
    }
    let p = 1i64 << k;
    let unit = C::from_ratio(1, p);
    let at = |num: i64, den: i64| C::from_ratio(num, den * p);
    let bottom = edge_where(dom, |a, b| a.y.same(&C::zero()) && b.y.same(&C::zero()))?;
    let top = edge_where(dom, |a, b| a.y.same(&C::one()) && b.y.same(&C::one()))?;
    let right = edge_where(dom, |a, b| a.x.same(&C::one()) && b.x.same(&C::one()))?;

    let e_start = match interior_slit_at(dom, &at(2, 1)) {
        Some(i) => {
            let t = unit.clone() - dom.slits()[i].a.y.clone();
            single_position(
                dom,
                BoundaryElement::SlitSide {
                    slit: i,
                    side: Side::Left,
                },
                &t,
                false,
            )?
        }
        None => {
            // The slit lies on the right edge.
            let (p0, _) = dom.edge(right);
            let t = unit.clone() - p0.y.clone();
            single_position(dom, BoundaryElement::Edge(right), &t, false)?
        }
    };
    let west = interior_slit_at(dom, &unit)
        .ok_or_else(|| crate::Error::InvalidParameter("missing slit at 2^-k".into()))?;
    let t_west = unit.clone() - dom.slits()[west].a.y.clone();
    let e_end = single_position(
        dom,
        BoundaryElement::SlitSide {
            slit: west,
            side: Side::Right,
        },
        &t_west,
        false,
    )?;

    let (top0, _) = dom.edge(top);
    let top_t = |x: &C| top0.x.clone() - x.clone();
    let ep_start = single_position(dom, BoundaryElement::Edge(top), &top_t(&at(7, 4)), false)?;
    let ep_end = single_position(dom, BoundaryElement::Edge(top), &top_t(&at(5, 4)), true)?;

    let (bot0, _) = dom.edge(bottom);
    let bt = |x: C| x - bot0.x.clone();
    let on_bottom = |x0: C, x1: C| BoundarySet::on_edge(dom, bottom, bt(x0), bt(x1));
    Ok(CombSets {
        k,
        e: BoundarySet::arc(dom, 0, e_start.clone(), e_end.clone())?,
        f: on_bottom(at(1, 1), at(2, 1))?,
        e_prime: BoundarySet::arc(dom, 0, ep_start.clone(), ep_end.clone())?,
        f_prime: on_bottom(at(5, 4), at(7, 4))?,
        e1: BoundarySet::arc(dom, 0, ep_end, e_end)?,
        e2: BoundarySet::arc(dom, 0, e_start, ep_start)?,
        f1: on_bottom(at(1, 1), at(5, 4))?,
        f2: on_bottom(at(7, 4), at(2, 1))?,
    })
}

/// SVG drawing of the domain with `e` and `f` highlighted.
pub fn render_svg<C: Coord>(dom: &SlitDomain<C>, highlight: &[(&BoundarySet<C>, &str)]) -> String {
    let (x0, y0, x1, y1) = dom.bbox();
    let (w, h) = (
        (x1.clone() - x0.clone()).to_f64(),
        (y1.clone() - y0.clone()).to_f64(),
    );
    let scale = 512.0 / w.max(h);
    let (pw, ph) = (w * scale + 16.0, h * scale + 16.0);
    let px = |x: &C| (x.to_f64() - x0.to_f64()) * scale + 8.0;
    let py = |y: &C| ph - 8.0 - (y.to_f64() - y0.to_f64()) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw:.0}" height="{ph:.0}" viewBox="0 0 {pw:.2} {ph:.2}">"#
    );
    let pts: Vec<String> = dom
        .outer()
        .iter()
        .map(|p| format!("{:.3},{:.3}", px(&p.x), py(&p.y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        pts.join(" ")
    );
    for sl in dom.slits() {
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-width="0.6"/>"#,
            px(&sl.a.x),
            py(&sl.a.y),
            px(&sl.b.x),
            py(&sl.b.y)
        );
    }
    for (set, colour) in highlight {
        for piece in set.pieces() {
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{colour}" stroke-width="3"/>"#,
                px(&piece.p0.x),
                py(&piece.p0.y),
                px(&piece.p1.x),
                py(&piece.p1.y)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulus::relative_distance;
    use crate::scalar::Exact;
    use crate::trajectories::vertical_family_modulus;

    fn q(p: i64, d: i64) -> Exact {
        Exact::new(p, d)
    }

    #[test]
    fn level_one_slits() {
        let list = CombSpec::new(1).unwrap().slit_list::<Exact>();
        let xs: Vec<Exact> = list.iter().map(|s| s.x).collect();
        assert_eq!(xs, vec![q(1, 2), q(3, 4), q(1, 1)]);
        assert_eq!(CombSpec::new(3).unwrap().slit_list::<Exact>().len(), 17);
        let d = build_comb::<Exact>(3).unwrap();
        assert_eq!(d.slits().len(), 15);
        assert_eq!(d.area(), q(1, 1));
        assert!(build_comb::<Exact>(0).is_err());
    }

    #[test]
    fn sets_and_vertical_modulus() {
        let dom = build_comb::<Exact>(3).unwrap();
        for k in 1..=3 {
            let s = comb_sets(&dom, 3, k).unwrap();
            let p = 1i64 << k;
            assert_eq!(s.f.length(), q(1, p));
            assert_eq!(s.f_prime.length(), q(1, 2 * p));
            assert_eq!(vertical_family_modulus(&dom, &s.f, &s.e), q(1, p));
            assert!((relative_distance(&s.e, &s.f).unwrap() - 1.0).abs() < 1e-12);
            for (a, b) in [
                (&s.e1, &s.f1),
                (&s.e2, &s.f2),
                (&s.e1, &s.f2),
                (&s.e2, &s.f1),
            ] {
                assert!(a.is_disjoint(&dom, b));
            }
            assert!(s.e_prime.is_disjoint(&dom, &s.f_prime));
        }
        let s3 = comb_sets(&dom, 3, 3).unwrap();
        let p = &s3.f_prime.pieces()[0];
        assert_eq!((p.p0.x, p.p1.x), (q(5, 32), q(7, 32)));
        assert!(comb_sets(&dom, 3, 4).is_err());
    }

    #[test]
    fn svg_mentions_every_slit() {
        let dom = build_comb::<Exact>(2).unwrap();
        let s = comb_sets(&dom, 2, 1).unwrap();
        let svg = render_svg(&dom, &[(&s.e, "red"), (&s.f, "blue")]);
        assert_eq!(svg.matches("stroke=\"gray\"").count(), dom.slits().len());
        assert!(svg.contains("blue"));
    }
}
