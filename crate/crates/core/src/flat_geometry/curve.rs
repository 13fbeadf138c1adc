use super::domain::SlitDomain;
use super::{on_segment, orient, segments_cross, Point};
use crate::error::{invalid, Result};
use crate::scalar::Coord;

/// Polygonal curve in the closure of a slit domain, never crossing a slit.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve<C> {
    vertices: Vec<Point<C>>,
}

impl<C: Coord> PolyCurve<C> {
    /// Curve without domain checks (consecutive vertices must differ).
    pub fn new(vertices: Vec<Point<C>>) -> Result<Self> {
        if vertices.len() < 2 {
            return invalid("a curve needs at least two vertices");
        }
        if vertices.windows(2).any(|w| w[0].same(&w[1])) {
            return invalid("consecutive curve vertices coincide");
        }
        Ok(Self { vertices })
    }

    /// Curve validated against a domain: it stays in the closed polygon
    /// and does not cross the interior of any slit.
    pub fn in_domain(dom: &SlitDomain<C>, vertices: Vec<Point<C>>) -> Result<Self> {
        let c = Self::new(vertices)?;
        for (i, w) in c.vertices.windows(2).enumerate() {
            let (p, q) = (&w[0], &w[1]);
            let mid = p.lerp(q, &C::half());
            if !dom.in_closed_polygon(p)
                || !dom.in_closed_polygon(q)
                || !dom.in_closed_polygon(&mid)
            {
                return invalid(format!("segment {i} leaves the domain"));
            }
            for k in 0..dom.edge_count() {
                let (a, b) = dom.edge(k);
                if segments_cross(p, q, a, b) {
                    return invalid(format!("segment {i} leaves the domain"));
                }
            }
            for (k, s) in dom.slits().iter().enumerate() {
                if s.on_boundary {
                    continue;
                }
                if segments_cross(p, q, &s.a, &s.b) {
                    return invalid(format!("segment {i} crosses slit {k}"));
                }
            }
        }
        c.check_vertex_crossings(dom)?;
        Ok(c)
    }

    pub fn vertices(&self) -> &[Point<C>] {
        &self.vertices
    }

    pub fn length(&self) -> f64 {
        self.vertices
            .windows(2)
            .map(|w| w[0].dist_sq(&w[1]).to_f64().sqrt())
            .sum()
    }
}

impl<C: Coord> PolyCurve<C> {
    /// Rejects curves that switch sides of a slit at a vertex lying on the
    /// slit interior.
    fn check_vertex_crossings(&self, dom: &SlitDomain<C>) -> Result<()> {
        for w in self.vertices.windows(3) {
            let (p, v, q) = (&w[0], &w[1], &w[2]);
            for (k, s) in dom.slits().iter().enumerate() {
                if s.on_boundary || !on_segment(v, &s.a, &s.b) || v.same(&s.a) || v.same(&s.b) {
                    continue;
                }
                let op = orient(&s.a, &s.b, p);
                let oq = orient(&s.a, &s.b, q);
                if (op > C::zero() && oq < C::zero()) || (op < C::zero() && oq > C::zero()) {
                    return invalid(format!("curve crosses slit {k} at a vertex"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_geometry::build_slit_rectangle;
    use crate::scalar::Exact;

    fn p(x: (i64, i64), y: (i64, i64)) -> Point<Exact> {
        Point::new(Exact::new(x.0, x.1), Exact::new(y.0, y.1))
    }

    #[test]
    fn crossing_slit_rejected() {
        let d =
            build_slit_rectangle(Exact::new(1, 1), Exact::new(1, 1), Exact::new(1, 2), 4).unwrap();
        let bad = vec![p((1, 8), (3, 4)), p((3, 8), (3, 4))];
        assert!(PolyCurve::in_domain(&d, bad).is_err());
        let ok = vec![p((1, 8), (1, 4)), p((3, 8), (1, 4))];
        assert!(PolyCurve::in_domain(&d, ok).is_ok());
        // Touching a slit tip is allowed.
        let tip = vec![p((1, 8), (1, 2)), p((3, 8), (1, 2))];
        assert!(PolyCurve::in_domain(&d, tip).is_ok());
    }

    #[test]
    fn length_and_degenerate() {
        let c = PolyCurve::new(vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)]).unwrap();
        assert!((c.length() - 5.0).abs() < 1e-15);
        assert!(PolyCurve::new(vec![Point::new(0.0, 0.0), Point::new(0.0, 0.0)]).is_err());
    }
}
