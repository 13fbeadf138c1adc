//! Vertical and horizontal trajectories of a polynomial differential on
//! the unit disk, traced with an adaptive Dormand–Prince integrator in
//! Euclidean arc length.

use num_complex::Complex;

use super::{End, Trajectory, TrajectoryKind};
use crate::error::{invalid, Result};
use crate::qd_analytic::{nearest_sqrt, PolynomialQD, NEAR_ZERO};
use crate::scalar::Real;

/// Default φ-length budget per direction.
pub const DEFAULT_BUDGET: f64 = 1e3;

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Maximal φ-length traced in each direction.
    pub budget: f64,
    /// Local error tolerance of the integrator (absolute, in `z`).
    pub tol: f64,
    /// Stop when `|z|` exceeds `1 - boundary_gap`.
    pub boundary_gap: f64,
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            tol: 1e-10,
            boundary_gap: 1e-6,
            max_steps: 200_000,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Field<'a, T: Real> {
    qd: &'a PolynomialQD<T>,
    /// `i` for vertical, `1` for horizontal.
    rot: Complex<T>,
}

impl<T: Real> Field<'_, T> {
    /// Unit Euclidean direction and φ-speed at `z` for the branch closest
    /// to `reference`.
    fn eval(&self, z: Complex<T>, reference: Complex<T>) -> (Complex<T>, T, Complex<T>) {
        let s = nearest_sqrt(self.qd.eval(z), reference);
        let m = s.norm();
        let dir = if m == T::zero() {
            Complex::new(T::zero(), T::zero())
        } else {
            self.rot * s.conj() / m
        };
        (dir, m, s)
    }
}

/// One direction of a trace starting at `z0` with branch `s0`.
fn trace_half<T: Real>(
    field: &Field<'_, T>,
    z0: Complex<T>,
    s0: Complex<T>,
    opts: &TraceOptions,
) -> (Vec<Complex<T>>, T, End<T>) {
    let lit = T::lit;
    let tol = lit(opts.tol);
    let budget = lit(opts.budget);
    let rmax = T::one() - lit(opts.boundary_gap);
    let near = lit(NEAR_ZERO);
    let mut z = z0;
    let mut sref = s0;
    let mut ell = T::zero();
    let mut h = lit(1e-3);
    let mut pts = vec![z0];
    let (mut k1, mut m1, _) = field.eval(z, sref);
    for _ in 0..opts.max_steps {
        if field.qd.zero_distance(z) < near {
            return (pts, ell, End::Zero(z));
        }
        if ell >= budget * (T::one() - lit(1e-12)) {
            return (pts, ell, End::Truncated);
        }
        // Keep the φ-length step inside the remaining budget.
        if m1 > T::zero() {
            h = h.min((budget - ell) / m1 * lit(1.0001)).max(T::epsilon());
        }
        let (k2, _, sa) = field.eval(z + k1 * (h * lit(A21)), sref);
        let (k3, _, _) = field.eval(z + (k1 * lit(A31) + k2 * lit(A32)) * h, sa);
        let (k4, _, _) = field.eval(z + (k1 * lit(A41) + k2 * lit(A42) + k3 * lit(A43)) * h, sa);
        let (k5, _, _) = field.eval(
            z + (k1 * lit(A51) + k2 * lit(A52) + k3 * lit(A53) + k4 * lit(A54)) * h,
            sa,
        );
        let (k6, _, _) = field.eval(
            z + (k1 * lit(A61) + k2 * lit(A62) + k3 * lit(A63) + k4 * lit(A64) + k5 * lit(A65)) * h,
            sa,
        );
        let dz = (k1 * lit(B1) + k3 * lit(B3) + k4 * lit(B4) + k5 * lit(B5) + k6 * lit(B6)) * h;
        let znew = z + dz;
        let (k7, m7, snew) = field.eval(znew, sref);
        let err = ((k1 * lit(E1)
            + k3 * lit(E3)
            + k4 * lit(E4)
            + k5 * lit(E5)
            + k6 * lit(E6)
            + k7 * lit(E7))
            * h)
            .norm();
        // Branch guard: arg φ may move by less than π/4 per step.
        let ratio = field.qd.eval(znew) / field.qd.eval(z);
        let arg_ok = ratio.im.atan2(ratio.re).abs() < lit(std::f64::consts::FRAC_PI_4);
        let r = znew.norm();
        if err > tol || !arg_ok || r >= T::one() || !znew.re.is_finite() {
            let fac = if err > tol {
                (lit(0.9) * (tol / err).powf(lit(0.2))).max(lit(0.1))
            } else {
                lit(0.5)
            };
            h = h * fac;
            if h < lit(1e-14) {
                return (pts, ell, End::Truncated);
            }
            continue;
        }
        // φ-length increment by Simpson on the endpoint speeds and the
        // midpoint speed.
        let mmid = field.eval(z + dz * lit(0.5), sref).1;
        let dl = h * (m1 + mmid * lit(4.0) + m7) / lit(6.0);
        if ell + dl > budget * (T::one() + lit(1e-12)) && dl > T::zero() {
            h = h * ((budget - ell) / dl).max(lit(0.01));
            continue;
        }
        ell = ell + dl;
        z = znew;
        sref = snew;
        k1 = k7;
        m1 = m7;
        pts.push(z);
        if r > rmax {
            let unit = z / r;
            return (pts, ell, End::Boundary(unit));
        }
        let grow = if err == T::zero() {
            lit(5.0)
        } else {
            (lit(0.9) * (tol / err).powf(lit(0.2))).min(lit(5.0))
        };
        h = (h * grow).min(lit(0.05));
    }
    (pts, ell, End::Truncated)
}

fn trace<T: Real>(
    qd: &PolynomialQD<T>,
    z0: Complex<T>,
    kind: TrajectoryKind,
    opts: &TraceOptions,
) -> Result<Trajectory<T>> {
    if z0.norm() >= T::one() {
        return invalid("start point must lie in the open unit disk");
    }
    let v = qd.eval(z0);
    if v.norm() == T::zero() || qd.zero_distance(z0) < T::lit(NEAR_ZERO) {
        return invalid("start point is a zero of the differential");
    }
    let rot = match kind {
        TrajectoryKind::Vertical => Complex::new(T::zero(), T::one()),
        TrajectoryKind::Horizontal => Complex::new(T::one(), T::zero()),
    };
    let s0 = v.sqrt();
    let fwd = Field { qd, rot };
    let bwd = Field { qd, rot: -rot };
    let (pf, lf, ef) = trace_half(&fwd, z0, s0, opts);
    let (pb, lb, eb) = trace_half(&bwd, z0, s0, opts);
    let mut points: Vec<Complex<T>> = pb.into_iter().rev().collect();
    points.extend(pf.into_iter().skip(1));
    Ok(Trajectory {
        points,
        phi_length: lf + lb,
        end_a: eb,
        end_b: ef,
        kind,
    })
}

/// Vertical trajectory through `z0`: `φ(γ) γ'² < 0`.
pub fn trace_vertical<T: Real>(
    qd: &PolynomialQD<T>,
    z0: Complex<T>,
    budget: f64,
) -> Result<Trajectory<T>> {
    let opts = TraceOptions {
        budget,
        ..TraceOptions::default()
    };
    trace(qd, z0, TrajectoryKind::Vertical, &opts)
}

pub fn trace_vertical_with<T: Real>(
    qd: &PolynomialQD<T>,
    z0: Complex<T>,
    opts: &TraceOptions,
) -> Result<Trajectory<T>> {
    trace(qd, z0, TrajectoryKind::Vertical, opts)
}

/// Horizontal trajectory through `z0`: `φ(γ) γ'² > 0`.
pub fn trace_horizontal<T: Real>(
    qd: &PolynomialQD<T>,
    z0: Complex<T>,
    opts: &TraceOptions,
) -> Result<Trajectory<T>> {
    trace(qd, z0, TrajectoryKind::Horizontal, opts)
}
