//! Polynomial quadratic differentials `φ(z) dz²` on the unit disk.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::quadrature::integrate;
use crate::scalar::Real;

/// Distance to a zero below which paths are rejected.
pub const NEAR_ZERO: f64 = 1e-6;

/// Polynomial `φ(z) = Σ c_k z^k`, nonzero.
#[derive(Debug)]
pub struct PolynomialQD<T: Real> {
    coeffs: Vec<Complex<T>>,
    l1: OnceLock<T>,
    roots: OnceLock<Vec<(Complex<T>, usize)>>,
}

impl<T: Real> Clone for PolynomialQD<T> {
    fn clone(&self) -> Self {
        Self {
            coeffs: self.coeffs.clone(),
            l1: self.l1.clone(),
            roots: self.roots.clone(),
        }
    }
}

impl<T: Real> PartialEq for PolynomialQD<T> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<T: Real> PolynomialQD<T> {
    /// Trailing zero coefficients are dropped; the zero polynomial is
    /// rejected.
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.norm() == T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return invalid("zero quadratic differential");
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return invalid("non-finite coefficient");
        }
        Ok(Self {
            coeffs,
            l1: OnceLock::new(),
            roots: OnceLock::new(),
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| Complex::new(T::lit(c), T::zero()))
                .collect(),
        )
    }

    /// `φ ≡ c`.
    pub fn constant(c: T) -> Self {
        Self::new(vec![Complex::new(c, T::zero())]).expect("nonzero constant")
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `c·φ`.
    pub fn scaled(&self, c: Complex<T>) -> Result<Self> {
        Self::new(self.coeffs.iter().map(|&a| a * c).collect())
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let zero = Complex::new(T::zero(), T::zero());
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    fn derivative_coeffs(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * T::of_usize(k))
            .collect()
    }

    /// Zeros inside the open unit disk, with multiplicity.
    pub fn zeros(&self) -> &[(Complex<T>, usize)] {
        self.roots.get_or_init(|| {
            all_roots(&self.coeffs)
                .into_iter()
                .filter(|(z, _)| z.norm() < T::one())
                .collect()
        })
    }

    /// Distance from `z` to the nearest zero in the disk.
    pub fn zero_distance(&self, z: Complex<T>) -> T {
        self.zeros()
            .iter()
            .map(|(r, _)| (z - r).norm())
            .fold(T::infinity(), T::min)
    }

    /// `∬_𝔻 |φ| dx dy`, cached.
    pub fn l1_norm(&self) -> T {
        *self.l1.get_or_init(|| {
            let tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0));
            let two_pi = T::PI() + T::PI();
            integrate(
                |r: T| {
                    let ring: T = integrate(
                        |t: T| self.eval(Complex::from_polar(r, t)).norm(),
                        T::zero(),
                        two_pi,
                        tol,
                        T::zero(),
                    );
                    ring * r
                },
                T::zero(),
                T::one(),
                tol,
                T::zero(),
            )
        })
    }

    /// `∫_curve |φ|^{1/2} |dz|` along a polyline.
    pub fn phi_length(&self, curve: &[Complex<T>]) -> T {
        let tol = T::lit(1e-12).max(T::epsilon() * T::lit(100.0));
        curve
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let d = b - a;
                let len = d.norm();
                let v: T = integrate(
                    |t: T| self.eval(a + d * t).norm().sqrt(),
                    T::zero(),
                    T::one(),
                    tol,
                    tol * T::lit(1e-3),
                );
                v * len
            })
            .fold(T::zero(), |acc, v| acc + v)
    }

    /// Natural parameter `w = ∫_path √φ dz`, continuing the principal
    /// square root at `base` along the polyline `path` (which starts at
    /// `base`).
    pub fn natural_parameter(&self, base: Complex<T>, path: &[Complex<T>]) -> Result<Complex<T>> {
        let Some(&first) = path.first() else {
            return invalid("empty path");
        };
        let scale = T::one().max(base.norm());
        if (first - base).norm() > T::lit(1e-12) * scale {
            return invalid("path must start at the base point");
        }
        let near = T::lit(NEAR_ZERO);
        for w in path.windows(2) {
            for (r, _) in self.zeros() {
                let d = point_segment_distance(*r, w[0], w[1]);
                if d < near {
                    return Err(Error::NearSingularity {
                        distance: d.as_f64(),
                    });
                }
            }
        }
        let mut branch = BranchState::new(self, base)?;
        let mut total = Complex::new(T::zero(), T::zero());
        for w in path.windows(2) {
            total = total + branch.integrate_to(self, w[1]);
        }
        Ok(total)
    }
}

fn point_segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a) * d.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (p - (a + d * t)).norm()
}

/// Square root of `v` closest to `reference`.
pub(crate) fn nearest_sqrt<T: Real>(v: Complex<T>, reference: Complex<T>) -> Complex<T> {
    let s = v.sqrt();
    if (s - reference).norm_sqr() <= (s + reference).norm_sqr() {
        s
    } else {
        -s
    }
}

/// Cursor carrying a continuous determination of `√φ` along a path.
#[derive(Clone, Debug)]
pub struct BranchState<T: Real> {
    pub point: Complex<T>,
    pub sqrt_value: Complex<T>,
    pub steps: usize,
}

const MAX_ARG_STEP: f64 = std::f64::consts::FRAC_PI_4;

impl<T: Real> BranchState<T> {
    /// Principal determination at a regular point.
    pub fn new(qd: &PolynomialQD<T>, z: Complex<T>) -> Result<Self> {
        let v = qd.eval(z);
        if v.norm() == T::zero() {
            return invalid("branch base point is a zero of the differential");
        }
        Ok(Self {
            point: z,
            sqrt_value: v.sqrt(),
            steps: 0,
        })
    }

    /// Moves the cursor to `z` along the straight segment, subdividing so
    /// that `arg φ` changes by less than `π/4` per step.
    pub fn advance(&mut self, qd: &PolynomialQD<T>, z: Complex<T>) {
        let _ = self.walk(qd, z, false);
    }

    /// Moves to `z` and returns `∫ √φ dz` over the segment.
    pub fn integrate_to(&mut self, qd: &PolynomialQD<T>, z: Complex<T>) -> Complex<T> {
        self.walk(qd, z, true)
    }

    fn walk(&mut self, qd: &PolynomialQD<T>, z: Complex<T>, integrate_it: bool) -> Complex<T> {
        let mut total = Complex::new(T::zero(), T::zero());
        let mut stack = vec![z];
        let limit = T::lit(MAX_ARG_STEP);
        while let Some(target) = stack.pop() {
            let a = self.point;
            let va = qd.eval(a);
            let vb = qd.eval(target);
            let vm = qd.eval((a + target) * T::lit(0.5));
            let arg_ok = |p: Complex<T>, q: Complex<T>| {
                let r = q / p;
                r.re.is_finite() && r.im.atan2(r.re).abs() < limit
            };
            let small = (target - a).norm() < T::epsilon() * T::lit(16.0);
            if !small && !(arg_ok(va, vm) && arg_ok(vm, vb)) {
                stack.push(target);
                stack.push((a + target) * T::lit(0.5));
                continue;
            }
            if integrate_it {
                let ref0 = self.sqrt_value;
                let d = target - a;
                let tol = T::lit(1e-12).max(T::epsilon() * T::lit(100.0));
                let piece: Complex<T> = integrate(
                    |t: T| nearest_sqrt(qd.eval(a + d * t), ref0),
                    T::zero(),
                    T::one(),
                    tol,
                    tol * T::lit(1e-3),
                );
                total = total + piece * d;
            }
            self.sqrt_value = nearest_sqrt(vb, self.sqrt_value);
            self.point = target;
            self.steps += 1;
        }
        total
    }
}

/// All complex roots of the polynomial with coefficients `c_0..c_d`,
/// clustered by multiplicity.
pub(crate) fn all_roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<(Complex<T>, usize)> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    // Work in f64 for the simultaneous iteration.
    let c: Vec<Complex<f64>> = coeffs
        .iter()
        .map(|z| Complex::new(z.re.as_f64(), z.im.as_f64()))
        .collect();
    let mut roots = aberth(&c);
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    // Cluster roots that belong to a multiple root.
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let tol = 1e-5 * scale;
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let mut members = vec![i];
        used[i] = true;
        let mut grew = true;
        while grew {
            grew = false;
            for j in 0..n {
                if !used[j] && members.iter().any(|&m| (roots[m] - roots[j]).norm() < tol) {
                    used[j] = true;
                    members.push(j);
                    grew = true;
                }
            }
        }
        let m = members.len();
        let centroid = members.iter().map(|&k| roots[k]).sum::<Complex<f64>>() / m as f64;
        let polished = polish(&c, centroid, m);
        out.push((Complex::new(T::lit(polished.re), T::lit(polished.im)), m));
    }
    out
}

fn horner(c: &[Complex<f64>], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let lead = c[n];
    // Cauchy-type radius for the initial circle.
    let radius = c[..n]
        .iter()
        .map(|a| (a / lead).norm())
        .fold(0.0, f64::max)
        .max(1e-3)
        .min(1e3);
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex::from_polar(0.5 * radius + 0.1, t)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Newton polish of a root of multiplicity `m` on the `(m-1)`-th
/// derivative, where it is simple.
fn polish(c: &[Complex<f64>], z0: Complex<f64>, m: usize) -> Complex<f64> {
    let mut d: Vec<Complex<f64>> = c.to_vec();
    for _ in 1..m {
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| a * k as f64)
            .collect();
    }
    let mut z = z0;
    for _ in 0..50 {
        let (p, dp) = horner(&d, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

impl<T: Real> PolynomialQD<T> {
    /// Coefficients of `φ'`.
    pub fn derivative(&self) -> Vec<Complex<T>> {
        Self::derivative_coeffs(&self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn evaluation() {
        let one = PolynomialQD::<f64>::constant(1.0);
        assert_eq!(one.eval(c(0.3, 0.1)), c(1.0, 0.0));
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(z.eval(c(0.0, 0.0)), c(0.0, 0.0));
        let z2 = PolynomialQD::<f64>::from_real(&[0.0, 0.0, 1.0]).unwrap();
        assert!((z2.eval(c(0.5, 0.0)) - c(0.25, 0.0)).norm() < 1e-15);
        assert!(PolynomialQD::<f64>::from_real(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn zeros_with_multiplicity() {
        assert!(PolynomialQD::<f64>::constant(1.0).zeros().is_empty());
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(z.zeros().len(), 1);
        assert_eq!(z.zeros()[0].1, 1);
        let q = PolynomialQD::<f64>::from_real(&[-0.25, 0.0, 1.0]).unwrap();
        let mut zs: Vec<f64> = q.zeros().iter().map(|(r, _)| r.re).collect();
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((zs[0] + 0.5).abs() < 1e-12 && (zs[1] - 0.5).abs() < 1e-12);
        // Triple root inside the disk; the root at 2 is dropped.
        let cubic = PolynomialQD::<f64>::new(expand(&[
            c(0.3, 0.1),
            c(0.3, 0.1),
            c(0.3, 0.1),
            c(2.0, 0.0),
        ]))
        .unwrap();
        let zs = cubic.zeros();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].1, 3);
        assert!((zs[0].0 - c(0.3, 0.1)).norm() < 1e-10);
    }

    fn expand(roots: &[C]) -> Vec<C> {
        let mut p = vec![c(1.0, 0.0)];
        for &r in roots {
            let mut q = vec![c(0.0, 0.0); p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                q[k + 1] += a;
                q[k] -= a * r;
            }
            p = q;
        }
        p
    }

    #[test]
    fn natural_parameter_examples() {
        let one = PolynomialQD::<f64>::constant(1.0);
        let w = one
            .natural_parameter(c(0.0, 0.0), &[c(0.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!((w - c(0.5, 0.0)).norm() < 1e-14);
        let four = PolynomialQD::<f64>::constant(4.0);
        let w = four
            .natural_parameter(c(0.0, 0.0), &[c(0.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!((w - c(1.0, 0.0)).norm() < 1e-14);
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        let w = z
            .natural_parameter(c(0.25, 0.0), &[c(0.25, 0.0), c(0.81, 0.0)])
            .unwrap();
        let exact = 2.0 / 3.0 * (0.81f64.powf(1.5) - 0.25f64.powf(1.5));
        assert!((w.re - exact).abs() < 1e-12 && w.im.abs() < 1e-14);
        let err = z.natural_parameter(c(-0.5, 0.0), &[c(-0.5, 0.0), c(0.5, 0.0)]);
        assert!(matches!(err, Err(Error::NearSingularity { .. })));
    }

    #[test]
    fn branch_closes_around_even_winding() {
        // z^2 has a double zero at 0: one loop has even winding for √φ.
        let z2 = PolynomialQD::<f64>::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let n = 64;
        let path: Vec<C> = (0..=n)
            .map(|k| C::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let w = z2.natural_parameter(path[0], &path).unwrap();
        assert!(w.norm() < 1e-8);
    }

    #[test]
    fn lengths_and_norms() {
        let z = PolynomialQD::<f64>::from_real(&[0.0, 1.0]).unwrap();
        let l = z.phi_length(&[c(0.0, 0.0), c(0.64, 0.0)]);
        assert!((l - 2.0 / 3.0 * 0.64f64.powf(1.5)).abs() < 1e-9);
        let four = PolynomialQD::<f64>::constant(4.0);
        assert!((four.phi_length(&[c(0.0, 0.0), c(0.3, 0.4)]) - 1.0).abs() < 1e-13);
        let pi = std::f64::consts::PI;
        assert!((PolynomialQD::<f64>::constant(1.0).l1_norm() - pi).abs() < 1e-10);
        assert!((four.l1_norm() - 4.0 * pi).abs() < 1e-9);
        assert!((z.l1_norm() - 2.0 * pi / 3.0).abs() < 1e-8);
    }

    #[test]
    fn f32_evaluation() {
        let q = PolynomialQD::<f32>::from_real(&[1.0, 2.0]).unwrap();
        assert!((q.eval(Complex::new(0.5f32, 0.0)) - Complex::new(2.0f32, 0.0)).norm() < 1e-6);
        assert!((PolynomialQD::<f32>::constant(1.0).l1_norm() - std::f32::consts::PI).abs() < 1e-4);
    }
}
