//! Scalar abstractions.
//!
//! Two families of scalars appear in this crate. [`Real`] covers the
//! floating-point types used by every numerical routine (quadrature, ODE
//! tracing, linear solves). [`Coord`] covers geometric coordinates of flat
//! slit domains, which may be exact rationals so that dyadic comb geometry
//! is classified without rounding.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_rational::Ratio;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the type cannot represent
    /// finite `f64` values at all, which never happens for `f32`/`f64`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational coordinate.
pub type Exact = Ratio<i64>;

/// Geometric coordinate of a flat domain.
///
/// Implemented for `f64` (approximate predicates) and [`Exact`]
/// (exact predicates on dyadic and other rational data).
pub trait Coord:
    Clone + PartialOrd + Num + Signed + Debug + Display + Send + Sync + 'static
{
    fn to_f64(&self) -> f64;

    /// `p / q` in this coordinate type.
    fn from_ratio(p: i64, q: i64) -> Self;

    /// Returns `Some(n)` when `self / unit` is (numerically) the integer `n`.
    fn div_to_int(&self, unit: &Self) -> Option<i64>;

    /// Equality used by geometric predicates (exact for rationals, a tiny
    /// absolute tolerance for floats).
    fn same(&self, other: &Self) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn min_of(a: &Self, b: &Self) -> Self {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn max_of(a: &Self, b: &Self) -> Self {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

const FLOAT_COORD_TOL: f64 = 1e-12;

impl Coord for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }

    fn div_to_int(&self, unit: &Self) -> Option<i64> {
        let q = self / unit;
        let n = q.round();
        if (q - n).abs() <= 1e-9 * q.abs().max(1.0) {
            Some(n as i64)
        } else {
            None
        }
    }

    fn same(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_COORD_TOL * self.abs().max(other.abs()).max(1.0)
    }
}

impl Coord for Exact {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Ratio::new(p, q)
    }

    fn div_to_int(&self, unit: &Self) -> Option<i64> {
        if unit.is_zero() {
            return None;
        }
        let q = self / unit;
        if q.is_integer() {
            Some(q.to_integer())
        } else {
            None
        }
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }
}

/// Parses `"p/q"`, `"p/2^q"`, `"2^-q"`, integers and finite decimals
/// (`"0.0625"`) into an exact rational.
pub fn parse_exact(s: &str) -> Option<Exact> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_exact(num)?;
        let d = parse_exact(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(n / d);
    }
    if let Some((base, exp)) = s.split_once('^') {
        let b: i64 = base.trim().parse().ok()?;
        let e: i32 = exp.trim().parse().ok()?;
        if b == 0 || e.unsigned_abs() > 62 {
            return None;
        }
        let p = Ratio::from_integer(b).pow(e.abs());
        return Some(if e < 0 { p.recip() } else { p });
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    if frac_part.len() > 17 {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = digits.parse().ok()?;
    let denom = 10_i64.checked_pow(frac_part.len() as u32)?;
    let r = Ratio::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Formats an exact rational as a decimal string when it terminates,
/// otherwise as `p/q`.
pub fn format_exact(x: &Exact) -> String {
    let mut d = *x.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return format!("{}/{}", x.numer(), x.denom());
    }
    let places = twos.max(fives);
    let scale = 10_i128.pow(places);
    let scaled = *x.numer() as i128 * scale / *x.denom() as i128;
    if places == 0 {
        return scaled.to_string();
    }
    let neg = scaled < 0;
    let mag = scaled.unsigned_abs();
    let int = mag / scale as u128;
    let frac = mag % scale as u128;
    format!(
        "{}{}.{:0width$}",
        if neg { "-" } else { "" },
        int,
        frac,
        width = places as usize
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_dyadic_forms() {
        assert_eq!(parse_exact("1/512"), Some(Ratio::new(1, 512)));
        assert_eq!(parse_exact("3/2^4"), Some(Ratio::new(3, 16)));
        assert_eq!(parse_exact("2^-8"), Some(Ratio::new(1, 256)));
        assert_eq!(parse_exact("0.0625"), Some(Ratio::new(1, 16)));
        assert_eq!(parse_exact("-1.5"), Some(Ratio::new(-3, 2)));
        assert_eq!(parse_exact("7"), Some(Ratio::from_integer(7)));
        assert_eq!(parse_exact("x"), None);
        assert_eq!(parse_exact("1/0"), None);
    }

    #[test]
    fn formats_terminating_decimals() {
        assert_eq!(format_exact(&Ratio::new(1, 1024)), "0.0009765625");
        assert_eq!(format_exact(&Ratio::new(-3, 2)), "-1.5");
        assert_eq!(format_exact(&Ratio::new(1, 3)), "1/3");
        assert_eq!(format_exact(&Ratio::from_integer(2)), "2");
        for s in ["0.0009765625", "-1.5", "2", "0.75"] {
            assert_eq!(format_exact(&parse_exact(s).unwrap()), s);
        }
    }

    #[test]
    fn grid_alignment() {
        let h = Ratio::new(1, 64);
        assert_eq!(Ratio::new(3, 16).div_to_int(&h), Some(12));
        assert_eq!(Ratio::new(1, 128).div_to_int(&h), None);
        assert_eq!(0.1875_f64.div_to_int(&(1.0 / 64.0)), Some(12));
    }
}
