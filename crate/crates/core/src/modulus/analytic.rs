use std::f64::consts::PI;

use crate::currents::GeodesicBox;
use crate::error::{invalid, Result};
use crate::flat_geometry::domain::check_slit_rectangle;
use crate::flat_geometry::BoundarySet;
use crate::scalar::{Coord, Real};

fn agm<T: Real>(mut a: T, mut b: T) -> T {
    for _ in 0..64 {
        let m = (a + b) * T::lit(0.5);
        let g = (a * b).sqrt();
        if (a - b).abs() <= T::epsilon() * a {
            return m;
        }
        a = m;
        b = g;
    }
    a
}

/// Modulus of a quadrilateral whose vertices have cross-ratio `λ > 1`,
/// for the family joining the sides `[a,b]` and `[c,d]`.
pub fn quadrilateral_modulus<T: Real>(lambda: T) -> Result<T> {
    quadrilateral_modulus_excess(lambda - T::one())
}

/// [`quadrilateral_modulus`] in terms of `μ = λ − 1 > 0`.
pub fn quadrilateral_modulus_excess<T: Real>(mu: T) -> Result<T> {
    if !(mu > T::zero()) || !mu.is_finite() {
        return invalid("cross-ratio must exceed one");
    }
    let two = T::lit(2.0);
    // Upper half-plane vertices −1/k, −1, 1, 1/k with k = 1/s.
    let s1 = two * mu + two * ((T::one() + mu) * mu).sqrt();
    let s = T::one() + s1;
    let k = T::one() / s;
    let kp = (s1 / s * (T::one() + k)).sqrt();
    // K(k')/(2K(k)) with K(m) = π/(2·agm(1, √(1−m²))).
    Ok(agm(T::one(), kp) / (two * agm(T::one(), k)))
}

/// Modulus of the curves in the disk joining the arcs `[a,b]` and `[c,d]`.
pub fn disk_box_modulus<T: Real>(b: &GeodesicBox<T>) -> Result<T> {
    let checked = GeodesicBox::new(b.a, b.b, b.c, b.d)?;
    quadrilateral_modulus_excess(checked.cross_ratio_excess())
}

/// Cross-ratio excess `μ = λ − 1` of the quadrilaterals of modulus `m`.
pub fn excess_for_modulus<T: Real>(m: T) -> Result<T> {
    if !(m > T::zero()) || !m.is_finite() {
        return invalid("modulus must be positive");
    }
    // The modulus increases with μ; bisect on log μ.
    let bound = T::lit(700.0);
    let (mut lo, mut hi) = (-bound, bound);
    if quadrilateral_modulus_excess(lo.exp())? >= m || quadrilateral_modulus_excess(hi.exp())? <= m
    {
        return invalid("modulus outside the representable range");
    }
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if quadrilateral_modulus_excess(mid.exp())? < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(((lo + hi) * T::lit(0.5)).exp())
}

/// Liouville measure of any disk box of modulus `m`.
pub fn liouville_for_modulus<T: Real>(m: T) -> Result<T> {
    Ok(excess_for_modulus(m)?.ln_1p())
}

/// Symmetric box whose disk modulus equals `m`.
pub fn disk_box_with_modulus<T: Real>(m: T) -> Result<GeodesicBox<T>> {
    // Symmetric arcs [−α, α], [π−α, π+α] have cross-ratio sec²α = 1 + μ.
    let alpha = excess_for_modulus(m)?.sqrt().atan();
    GeodesicBox::symmetric(alpha)
}

/// `mod(Γ_box) − L(box)/π − (2/π) log 4`.
pub fn mod_liouville_gap<T: Real>(b: &GeodesicBox<T>) -> Result<T> {
    let pi = T::lit(PI);
    Ok(disk_box_modulus(b)? - b.liouville() / pi - T::lit(2.0 / PI * 4f64.ln()))
}

/// Upper bound `π(1 + 1/(2Δ))²` for the modulus of curves joining two
/// continua at relative distance `Δ`.
pub fn reldist_bound_from_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return invalid("relative distance must be positive");
    }
    let t = 1.0 + 0.5 / delta;
    Ok(PI * t * t)
}

/// Relative distance `dist(E,F) / min(diam E, diam F)`.
pub fn relative_distance<C: Coord>(e: &BoundarySet<C>, f: &BoundarySet<C>) -> Result<f64> {
    let (de, df) = (e.diameter(), f.diameter());
    if de <= 0.0 || df <= 0.0 {
        return invalid("continua need positive diameter");
    }
    Ok(e.dist_sq(f).to_f64().sqrt() / de.min(df))
}

/// Bound on the plane modulus of curves joining `e` to `f`.
pub fn reldist_bound<C: Coord>(e: &BoundarySet<C>, f: &BoundarySet<C>) -> Result<f64> {
    reldist_bound_from_delta(relative_distance(e, f)?)
}

/// `(c/a, c/a + 1/(2N))`, the bounds for the family joining the parts of
/// the vertical sides below the slit feet of a slit rectangle.
pub fn slit_bounds<C: Coord>(a: &C, b: &C, c: &C, n: usize) -> Result<(C, C)> {
    // Same preconditions as the slit rectangle itself.
    check_slit_rectangle(a, b, c, n)?;
    let lo = c.clone() / a.clone();
    let hi = lo.clone() + C::from_ratio(1, 2 * n as i64);
    Ok((lo, hi))
}
