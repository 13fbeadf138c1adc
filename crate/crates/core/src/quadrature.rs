//! One-dimensional adaptive quadrature.

use num_complex::Complex;

use crate::scalar::Real;

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: usize = 48;

/// Values that can be integrated: reals and complex numbers.
pub trait Integrand<T: Real>: Copy + std::ops::Add<Output = Self> {
    fn zero() -> Self;
    fn scale(self, w: T) -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> Integrand<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn scale(self, w: T) -> Self {
        self * w
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Integrand<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn scale(self, w: T) -> Self {
        self * w
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// 15-point Kronrod estimate and the embedded 7-point Gauss error.
fn gk15<T: Real, V: Integrand<T>>(f: &impl Fn(T) -> V, a: T, b: T) -> (V, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut k = fc.scale(T::lit(WGK[7]));
    let mut g = fc.scale(T::lit(WG[3]));
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        k = k + pair.scale(T::lit(WGK[j]));
        if j % 2 == 1 {
            g = g + pair.scale(T::lit(WG[j / 2]));
        }
    }
    let k = k.scale(half);
    let g = g.scale(half);
    let err = (k + g.scale(-T::one())).magnitude();
    (k, err)
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` until the
/// embedded error estimate is below `max(atol, rtol·|I|)`.
pub fn integrate<T: Real, V: Integrand<T>>(f: impl Fn(T) -> V, a: T, b: T, rtol: T, atol: T) -> V {
    if a == b {
        return V::zero();
    }
    let (whole, err) = gk15(&f, a, b);
    let tol = atol.max(rtol * whole.magnitude());
    refine(&f, a, b, whole, err, tol, 0)
}

fn refine<T: Real, V: Integrand<T>>(
    f: &impl Fn(T) -> V,
    a: T,
    b: T,
    whole: V,
    err: T,
    tol: T,
    depth: usize,
) -> V {
    if err <= tol || depth >= MAX_DEPTH {
        return whole;
    }
    let m = (a + b) * T::lit(0.5);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    let sub = tol * T::lit(0.5);
    refine(
        f,
        a,
        m,
        l,
        el,
        sub.max(T::epsilon() * l.magnitude()),
        depth + 1,
    ) + refine(
        f,
        m,
        b,
        r,
        er,
        sub.max(T::epsilon() * r.magnitude()),
        depth + 1,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v: f64 = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-14, 0.0);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let v: f64 = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 1e-14);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn complex_and_f32() {
        let v = integrate(
            |t: f64| Complex::new(0.0, t).exp(),
            0.0,
            std::f64::consts::PI,
            1e-12,
            0.0,
        );
        assert!((v - Complex::new(0.0, 2.0)).norm() < 1e-12);
        let w: f32 = integrate(|x: f32| x * x, 0.0, 3.0, 1e-5, 0.0);
        assert!((w - 9.0).abs() < 1e-4);
    }
}
