//! Scalar backends: exact rationals and `f64`, behind one [`Real`] trait.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::Neg;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Default relative tolerance of the float backend.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Ordered real scalar used for charge values.
///
/// The exact backend ignores every tolerance argument.
pub trait Real: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static {
    const EXACT: bool;

    fn from_rational(q: &Rational) -> Self;
    fn from_i64(n: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn floor_i64(&self) -> i64;
    fn abs_val(&self) -> Self;
    /// The exact value, for the exact backend only.
    fn to_rational(&self) -> Option<Rational>;

    /// Sign with `|x| <= tol` counted as zero (float backend only).
    fn sign(&self, tol: f64) -> Ordering;

    fn is_zero_tol(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Equal
    }
    fn is_pos(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Greater
    }
    fn is_neg(&self, tol: f64) -> bool {
        self.sign(tol) == Ordering::Less
    }
}

impl Real for Rational {
    const EXACT: bool = true;

    fn from_rational(q: &Rational) -> Self {
        *q
    }
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn floor_i64(&self) -> i64 {
        self.floor().to_integer() as i64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_rational(&self) -> Option<Rational> {
        Some(*self)
    }
    fn sign(&self, _tol: f64) -> Ordering {
        self.cmp(&Rational::zero())
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &Rational) -> Self {
        Real::to_f64(q)
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn floor_i64(&self) -> i64 {
        self.floor() as i64
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_rational(&self) -> Option<Rational> {
        None
    }
    fn sign(&self, tol: f64) -> Ordering {
        if self.abs() <= tol {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n as i128, d as i128)
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

/// `p/q` with `q >= 1`; integers keep the `/1`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Rounds to 12 significant digits so float output is stable across platforms.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Exact square root of a nonnegative rational, when it exists.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = isqrt(*q.numer())?;
    let d = isqrt(*q.denom())?;
    Some(Rational::new(n, d))
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

pub fn cx<R: Real>(re: R, im: R) -> Complex<R> {
    Complex::new(re, im)
}

pub fn complex_to_f64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// `im(z * conj(w))`, positive when `z` is counterclockwise from `w`.
pub fn cross<R: Real>(z: &Complex<R>, w: &Complex<R>) -> R {
    z.im.clone() * w.re.clone() - z.re.clone() * w.im.clone()
}

/// `re(z * conj(w))`.
pub fn dot<R: Real>(z: &Complex<R>, w: &Complex<R>) -> R {
    z.re.clone() * w.re.clone() + z.im.clone() * w.im.clone()
}

pub fn norm_sqr<R: Real>(z: &Complex<R>) -> R {
    dot(z, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_format_round_trip() {
        let q = rat(-7, 21);
        assert_eq!(format_rational(&q), "-1/3");
        assert_eq!(parse_rational("-1/3").unwrap(), q);
        assert_eq!(parse_rational("4").unwrap(), rint(4));
        assert_eq!(format_rational(&rint(4)), "4/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(rational_sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn float_sign_tolerance() {
        assert_eq!(1e-12f64.sign(1e-9), Ordering::Equal);
        assert_eq!((-1e-6f64).sign(1e-9), Ordering::Less);
        assert_eq!(rat(1, 1_000_000_000_000).sign(1.0), Ordering::Greater);
    }

    #[test]
    fn sig12() {
        assert_eq!(round_sig12(0.1 + 0.2), 0.3);
        assert_eq!(round_sig12(0.0), 0.0);
    }
}
