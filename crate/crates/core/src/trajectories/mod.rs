//! Vertical and horizontal trajectories: traced on the disk, exact on flat
//! slit domains.

mod disk;
mod flat;

pub use disk::{
    trace_horizontal, trace_vertical, trace_vertical_with, TraceOptions, DEFAULT_BUDGET,
};
pub use flat::{
    critical_abscissae, fibers, strips, vertical_family_modulus, vertical_through, width, FiberEnd,
    VerticalSegment,
};

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qd_analytic::PolynomialQD;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryKind {
    Vertical,
    Horizontal,
}

/// How one end of a trajectory terminates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum End<T> {
    /// Limit point on the boundary.
    Boundary(Complex<T>),
    /// The trajectory runs into a zero of φ.
    Zero(Complex<T>),
    /// Budget or step limit exhausted first.
    Truncated,
}

impl<T: Real> End<T> {
    pub fn is_boundary(&self) -> bool {
        matches!(self, End::Boundary(_))
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            End::Boundary(z) => serde_json::json!({"boundary": [z.re.as_f64(), z.im.as_f64()]}),
            End::Zero(z) => serde_json::json!({"zero": [z.re.as_f64(), z.im.as_f64()]}),
            End::Truncated => serde_json::json!("truncated"),
        }
    }
}

/// Traced trajectory polyline from `end_a` to `end_b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub points: Vec<Complex<T>>,
    pub phi_length: T,
    pub end_a: End<T>,
    pub end_b: End<T>,
    pub kind: TrajectoryKind,
}

impl<T: Real> Trajectory<T> {
    pub fn is_full(&self) -> bool {
        self.end_a.is_boundary() && self.end_b.is_boundary()
    }

    pub fn is_truncated(&self) -> bool {
        matches!(self.end_a, End::Truncated) || matches!(self.end_b, End::Truncated)
    }

    pub fn is_critical(&self) -> bool {
        matches!(self.end_a, End::Zero(_)) || matches!(self.end_b, End::Zero(_))
    }

    /// CSV rows `t,x,y` with `t` the Euclidean arc length along the
    /// polyline.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y\n");
        let mut t = 0.0;
        let mut prev: Option<Complex<T>> = None;
        for &z in &self.points {
            if let Some(p) = prev {
                t += (z - p).norm().as_f64();
            }
            out.push_str(&format!("{t},{},{}\n", z.re.as_f64(), z.im.as_f64()));
            prev = Some(z);
        }
        out
    }

    /// Sidecar record `{phi_length, end_a, end_b, kind}`.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "phi_length": self.phi_length.as_f64(),
            "end_a": self.end_a.describe(),
            "end_b": self.end_b.describe(),
            "kind": self.kind,
        })
    }
}

/// Boundary endpoints as angles in `(-π, π]`, in increasing order.
pub fn endpoint_pair<T: Real>(traj: &Trajectory<T>) -> Result<(T, T)> {
    match (traj.end_a, traj.end_b) {
        (End::Boundary(a), End::Boundary(b)) => {
            let (ta, tb) = (a.arg(), b.arg());
            Ok(if ta <= tb { (ta, tb) } else { (tb, ta) })
        }
        _ => Err(Error::NotFullTrajectory(
            "an end stops at a zero or at the budget".into(),
        )),
    }
}

/// Natural-parameter increments along a traced polyline, as
/// `(Δw, φ-length)` per polyline segment. Used to check verticality.
pub fn natural_increments<T: Real>(
    qd: &PolynomialQD<T>,
    traj: &Trajectory<T>,
) -> Result<Vec<(Complex<T>, T)>> {
    let mut branch = crate::qd_analytic::BranchState::new(qd, traj.points[0])?;
    let mut out = Vec::with_capacity(traj.points.len());
    for w in traj.points.windows(2) {
        let dw = branch.integrate_to(qd, w[1]);
        out.push((dw, qd.phi_length(&[w[0], w[1]])));
    }
    Ok(out)
}

/// Exact or sampled strip of vertical trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripKind {
    Exact,
    Sampled,
}

/// Vertical trajectories crossing a horizontal transversal, sampled at
/// midpoints of equal natural-length intervals.
#[derive(Clone, Debug)]
pub struct Strip<T> {
    /// Horizontal arc, as a polyline.
    pub transversal: Vec<Complex<T>>,
    /// `(x, trajectory)` with `x` the natural-length coordinate of the
    /// crossing point.
    pub samples: Vec<(T, Trajectory<T>)>,
    /// Natural width `Δx` of each sample cell.
    pub dx: T,
    pub kind: StripKind,
}

/// Points at natural-length positions `targets` along a polyline.
pub(crate) fn points_at_lengths<T: Real>(
    qd: &PolynomialQD<T>,
    poly: &[Complex<T>],
    targets: &[T],
) -> Vec<Complex<T>> {
    const PIECES: usize = 64;
    // Table of (segment, t, cumulative length).
    let mut table: Vec<(usize, T, T)> = Vec::new();
    let mut acc = T::zero();
    for (k, w) in poly.windows(2).enumerate() {
        let d = w[1] - w[0];
        table.push((k, T::zero(), acc));
        for j in 1..=PIECES {
            let t0 = T::of_usize(j - 1) / T::of_usize(PIECES);
            let t1 = T::of_usize(j) / T::of_usize(PIECES);
            acc = acc + qd.phi_length(&[w[0] + d * t0, w[0] + d * t1]);
            table.push((k, t1, acc));
        }
    }
    targets
        .iter()
        .map(|&target| {
            let idx = table
                .partition_point(|e| e.2 < target)
                .clamp(1, table.len() - 1);
            let (k, t_lo, l_lo) = if table[idx - 1].0 == table[idx].0 {
                table[idx - 1]
            } else {
                (table[idx].0, T::zero(), table[idx - 1].2)
            };
            let a = poly[k];
            let d = poly[k + 1] - a;
            let speed_at = |t: T| qd.eval(a + d * t).norm().sqrt() * d.norm();
            let mut t = t_lo;
            for _ in 0..30 {
                let l = l_lo + qd.phi_length(&[a + d * t_lo, a + d * t]);
                let sp = speed_at(t);
                if sp == T::zero() {
                    t = t + T::lit(1e-9);
                    continue;
                }
                let step = (l - target) / sp;
                t = (t - step).max(T::zero()).min(T::one());
                if step.abs() < T::lit(1e-14) {
                    break;
                }
            }
            a + d * t
        })
        .collect()
}

/// Traces the vertical trajectory through the midpoints of `n` equal
/// natural-length cells of each transversal polyline. The cells are
/// shared by all transversals in proportion to their natural lengths.
pub fn sample_strips<T: Real>(
    qd: &PolynomialQD<T>,
    transversals: &[Vec<Complex<T>>],
    n: usize,
    opts: &TraceOptions,
) -> Result<Vec<Strip<T>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let lengths: Vec<T> = transversals.iter().map(|p| qd.phi_length(p)).collect();
    let total: T = lengths.iter().copied().sum();
    if total <= T::zero() {
        return Err(Error::InvalidParameter(
            "transversal has zero natural length".into(),
        ));
    }
    let dx = total / T::of_usize(n);
    let mut out = Vec::new();
    let mut offset = T::zero();
    for (poly, &len) in transversals.iter().zip(&lengths) {
        check_horizontal(qd, poly)?;
        // Cells whose midpoints fall in this transversal.
        let first = ((offset / dx) - T::lit(0.5)).ceil().max(T::zero());
        let mut xs = Vec::new();
        let mut j = first;
        loop {
            let x = (j + T::lit(0.5)) * dx - offset;
            if x >= len || xs.len() >= n {
                break;
            }
            if x >= T::zero() {
                xs.push(x);
            }
            j = j + T::one();
        }
        let pts = points_at_lengths(qd, poly, &xs);
        let samples: Vec<(T, Trajectory<T>)> = xs
            .par_iter()
            .zip(pts.par_iter())
            .map(|(&x, &z)| trace_vertical_with(qd, z, opts).map(|t| (x, t)))
            .collect::<Result<Vec<_>>>()?;
        out.push(Strip {
            transversal: poly.clone(),
            samples,
            dx,
            kind: StripKind::Sampled,
        });
        offset = offset + len;
    }
    Ok(out)
}

/// Rejects transversals that are not horizontal arcs (`φ dz² > 0`).
fn check_horizontal<T: Real>(qd: &PolynomialQD<T>, poly: &[Complex<T>]) -> Result<()> {
    for w in poly.windows(2) {
        let d = w[1] - w[0];
        for t in [0.25, 0.5, 0.75] {
            let z = w[0] + d * T::lit(t);
            let v = qd.eval(z) * d * d;
            if v.norm() == T::zero() {
                continue;
            }
            if v.re <= T::zero() || v.im.abs() > T::lit(1e-6) * v.norm() {
                return Err(Error::InvalidParameter(
                    "transversal is not horizontal".into(),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flat_geometry::{build_rectangle, build_slit_rectangle, Point, PolyCurve};
    use crate::scalar::Exact;

    type C = Complex<f64>;

    #[test]
    fn constant_phi_vertical_chord() {
        let one = PolynomialQD::<f64>::constant(1.0);
        let t = trace_vertical(&one, C::new(0.2, 0.0), DEFAULT_BUDGET).unwrap();
        assert!(t.is_full());
        let chord = 2.0 * (1.0f64 - 0.04).sqrt();
        assert!((t.phi_length - chord).abs() < 1e-5);
        let (a, b) = endpoint_pair(&t).unwrap();
        assert!((a + (0.96f64).sqrt().atan2(0.2)).abs() < 1e-5);
        assert!((b - (0.96f64).sqrt().atan2(0.2)).abs() < 1e-5);
    }

    #[test]
    fn diameter_endpoints() {
        let one = PolynomialQD::<f64>::constant(1.0);
        let t = trace_vertical(&one, C::new(0.0, 0.0), DEFAULT_BUDGET).unwrap();
        let (a, b) = endpoint_pair(&t).unwrap();
        let h = std::f64::consts::FRAC_PI_2;
        assert!((a + h).abs() < 1e-6 && (b - h).abs() < 1e-6);
    }

    #[test]
    fn budget_truncates() {
        let one = PolynomialQD::<f64>::constant(1.0);
        let t = trace_vertical(&one, C::new(0.0, 0.0), 0.5).unwrap();
        assert!(t.is_truncated());
        assert!((t.phi_length - 1.0).abs() < 1e-9);
        assert!(matches!(
            endpoint_pair(&t),
            Err(Error::NotFullTrajectory(_))
        ));
    }

    #[test]
    fn simple_zero_model() {
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        let t = trace_vertical(&z, C::new(0.5, 0.0), DEFAULT_BUDGET).unwrap();
        assert!(t.is_full());
        let (a, b) = endpoint_pair(&t).unwrap();
        let re_w = 2.0 / 3.0 * 0.5f64.powf(1.5);
        let expect = 2.0 / 3.0 * (1.5 * re_w).acos();
        assert!((b - expect).abs() < 1e-5, "{b} vs {expect}");
        assert!((a + expect).abs() < 1e-5);
        // Constant real part of w along the trace.
        let inc = natural_increments(&z, &t).unwrap();
        let drift: f64 = inc.iter().map(|(dw, _)| dw.re).sum();
        assert!(drift.abs() < 1e-6);
        for (dw, dl) in &inc {
            if *dl > 1e-12 {
                assert!(dw.re.abs() / dl < 1e-6);
            }
        }
    }

    #[test]
    fn start_checks() {
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        assert!(trace_vertical(&z, C::new(0.0, 0.0), 1.0).is_err());
        assert!(trace_vertical(&z, C::new(1.5, 0.0), 1.0).is_err());
    }

    #[test]
    fn projective_invariance_of_traces() {
        let z = PolynomialQD::<f64>::from_real(&[0.3, 1.0]).unwrap();
        let z4 = z.scaled(C::new(4.0, 0.0)).unwrap();
        let a = trace_vertical(&z, C::new(0.1, 0.2), DEFAULT_BUDGET).unwrap();
        let b = trace_vertical(&z4, C::new(0.1, 0.2), DEFAULT_BUDGET).unwrap();
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn flat_vertical_through() {
        let q = |p, d| Exact::new(p, d);
        let sq = build_rectangle(q(1, 1), q(1, 1)).unwrap();
        let v = vertical_through(&sq, &q(1, 2));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].length(), q(1, 1));
        let d = build_slit_rectangle(q(1, 1), q(1, 1), q(1, 2), 4).unwrap();
        let v = vertical_through(&d, &q(1, 4));
        assert_eq!(v.len(), 2);
        assert_eq!((v[0].y0, v[0].y1), (q(0, 1), q(1, 2)));
        assert_eq!((v[1].y0, v[1].y1), (q(1, 2), q(1, 1)));
        assert!(v[1].along_slit && !v[0].along_slit);
        assert!(vertical_through(&d, &q(2, 1)).is_empty());
    }

    #[test]
    fn flat_width() {
        let sq = build_rectangle(1.0, 1.0).unwrap();
        let vert = PolyCurve::new(vec![Point::new(0.5, 0.1), Point::new(0.5, 0.9)]).unwrap();
        assert_eq!(width(&sq, &vert), 0.0);
        let diag = PolyCurve::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).unwrap();
        assert!((width(&sq, &diag) - 1.0).abs() < 1e-12);
        // Back and forth over the same abscissae counts once per strip.
        let zig = PolyCurve::new(vec![
            Point::new(0.1, 0.2),
            Point::new(0.6, 0.3),
            Point::new(0.3, 0.8),
        ])
        .unwrap();
        assert!((width(&sq, &zig) - 0.5).abs() < 1e-12);
    }
}
