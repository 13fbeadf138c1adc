use num_complex::Complex;
use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Position of angle `x` on the counterclockwise arc starting at `from`,
/// in `[0, 2π)`.
pub fn arc_offset<T: Real>(from: T, x: T) -> T {
    let tau = T::lit(TAU);
    let mut d = (x - from) % tau;
    if d < T::zero() {
        d = d + tau;
    }
    if d >= tau {
        d = d - tau;
    }
    d
}

/// `x` in the half-open counterclockwise arc `[a, b)`.
pub fn in_arc<T: Real>(a: T, b: T, x: T) -> bool {
    arc_offset(a, x) < arc_offset(a, b)
}

/// Box `[a,b]×[c,d]` of geodesics: four counterclockwise points on the
/// unit circle, given by angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeodesicBox<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// Orientation-preserving disk automorphism `z ↦ e^{iθ}(z − w)/(1 − w̄z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskMobius<T> {
    pub theta: T,
    pub w: Complex<T>,
}

impl<T: Real> DiskMobius<T> {
    pub fn new(theta: T, w: Complex<T>) -> Result<Self> {
        if w.norm() >= T::one() {
            return invalid("Möbius centre must lie in the open disk");
        }
        Ok(Self { theta, w })
    }

    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        let rot = Complex::from_polar(T::one(), self.theta);
        rot * (z - self.w) / (Complex::new(T::one(), T::zero()) - self.w.conj() * z)
    }

    /// Image of the boundary point at angle `x`, as an angle.
    pub fn apply_angle(&self, x: T) -> T {
        self.apply(Complex::from_polar(T::one(), x)).arg()
    }
}

impl<T: Real> GeodesicBox<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let tiny = T::lit(1e-14);
        let (ob, oc, od) = (arc_offset(a, b), arc_offset(a, c), arc_offset(a, d));
        if ob <= tiny || oc - ob <= tiny || od - oc <= tiny || T::lit(TAU) - od <= tiny {
            return invalid("box corners must be distinct and counterclockwise");
        }
        Ok(Self { a, b, c, d })
    }

    /// The box `(1, i, −1, −i)`, of Liouville measure `log 2`.
    pub fn standard() -> Self {
        let q = T::lit(std::f64::consts::FRAC_PI_2);
        Self {
            a: T::zero(),
            b: q,
            c: q + q,
            d: q + q + q,
        }
    }

    pub fn corners(&self) -> [Complex<T>; 4] {
        [self.a, self.b, self.c, self.d].map(|t| Complex::from_polar(T::one(), t))
    }

    /// Cross-ratio `(a−c)(b−d)/((a−d)(b−c))`, real and greater than one.
    pub fn cross_ratio(&self) -> T {
        T::one() + self.cross_ratio_excess()
    }

    /// `cross_ratio − 1 = |(a−b)(c−d)/((a−d)(b−c))|`, from chord lengths.
    pub fn cross_ratio_excess(&self) -> T {
        let chord = |x: T, y: T| ((x - y) * T::lit(0.5)).sin().abs();
        chord(self.a, self.b) * chord(self.c, self.d)
            / (chord(self.a, self.d) * chord(self.b, self.c))
    }

    /// Liouville measure of the box.
    pub fn liouville(&self) -> T {
        self.cross_ratio_excess().ln_1p()
    }

    /// Geodesic with endpoints `(x, y)` (either order) lies in the box,
    /// using half-open arcs.
    pub fn contains(&self, x: T, y: T) -> bool {
        (in_arc(self.a, self.b, x) && in_arc(self.c, self.d, y))
            || (in_arc(self.a, self.b, y) && in_arc(self.c, self.d, x))
    }

    pub fn transport(&self, m: &DiskMobius<T>) -> Result<Self> {
        Self::new(
            m.apply_angle(self.a),
            m.apply_angle(self.b),
            m.apply_angle(self.c),
            m.apply_angle(self.d),
        )
    }

    /// Box with corners at angles symmetric about the real axis: arcs
    /// `[−α, α]` and `[π − α, π + α]`.
    pub fn symmetric(alpha: T) -> Result<Self> {
        let pi = T::lit(std::f64::consts::PI);
        Self::new(-alpha, alpha, pi - alpha, pi + alpha)
    }
}

/// Liouville measure of a box.
pub fn liouville<T: Real>(b: &GeodesicBox<T>) -> T {
    b.liouville()
}
