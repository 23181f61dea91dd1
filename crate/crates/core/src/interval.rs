//! Closed real intervals with outward-rounded endpoints.
//!
//! Rounding is emulated rather than obtained by switching the FPU rounding
//! mode. Every primitive first computes the round-to-nearest result and then
//! recovers the exact rounding error with an error-free transformation
//! (TwoSum for addition, a fused multiply-add residual for products, quotients
//! and square roots). The endpoint is moved one ulp outward only when that
//! error points inward, so exactly representable results stay exact. Nothing
//! touches global floating point state, which keeps evaluation safe on any
//! number of threads.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{DomainError, Error, Result};

/// Below this magnitude an FMA residual may itself be rounded (the exact
/// error term can fall into the subnormal range), so the helpers inflate
/// unconditionally instead of trusting the residual sign.
const EXACT_RESIDUAL_FLOOR: f64 = 1.0e-290;

/// Directed rounding of the basic operations on `f64`.
pub mod round {
    use super::EXACT_RESIDUAL_FLOOR;

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        (s, err)
    }

    #[inline]
    pub fn add_down(a: f64, b: f64) -> f64 {
        let (s, err) = two_sum(a, b);
        if s.is_infinite() {
            return if s > 0.0 && a.is_finite() && b.is_finite() {
                f64::MAX
            } else {
                s
            };
        }
        if err < 0.0 {
            s.next_down()
        } else {
            s
        }
    }

    #[inline]
    pub fn add_up(a: f64, b: f64) -> f64 {
        let (s, err) = two_sum(a, b);
        if s.is_infinite() {
            return if s < 0.0 && a.is_finite() && b.is_finite() {
                f64::MIN
            } else {
                s
            };
        }
        if err > 0.0 {
            s.next_up()
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_down(a: f64, b: f64) -> f64 {
        add_down(a, -b)
    }

    #[inline]
    pub fn sub_up(a: f64, b: f64) -> f64 {
        add_up(a, -b)
    }

    /// Returns `(p, err)` with `p = RN(a*b)` and `err = a*b - p` exactly, or
    /// `None` when the residual cannot be trusted.
    #[inline]
    fn two_prod(a: f64, b: f64) -> Option<(f64, f64)> {
        let p = a * b;
        if p == 0.0 && (a == 0.0 || b == 0.0) {
            return Some((0.0, 0.0));
        }
        if !p.is_finite() || p.abs() < EXACT_RESIDUAL_FLOOR {
            return None;
        }
        Some((p, a.mul_add(b, -p)))
    }

    #[inline]
    pub fn mul_down(a: f64, b: f64) -> f64 {
        match two_prod(a, b) {
            Some((p, err)) if err < 0.0 => p.next_down(),
            Some((p, _)) => p,
            None => {
                let p = a * b;
                if p == f64::INFINITY {
                    f64::MAX
                } else {
                    p.next_down()
                }
            }
        }
    }

    #[inline]
    pub fn mul_up(a: f64, b: f64) -> f64 {
        match two_prod(a, b) {
            Some((p, err)) if err > 0.0 => p.next_up(),
            Some((p, _)) => p,
            None => {
                let p = a * b;
                if p == f64::NEG_INFINITY {
                    f64::MIN
                } else {
                    p.next_up()
                }
            }
        }
    }

    /// Sign of `RN(a/b) - a/b`, or `None` when the residual is unreliable.
    #[inline]
    fn div_excess(a: f64, b: f64) -> (f64, Option<f64>) {
        let q = a / b;
        if q == 0.0 && a == 0.0 {
            return (q, Some(0.0));
        }
        if !q.is_finite() || q.abs() < EXACT_RESIDUAL_FLOOR || a.abs() < EXACT_RESIDUAL_FLOOR {
            return (q, None);
        }
        // q*b - a has the sign of (q - a/b) * b
        let r = q.mul_add(b, -a);
        (q, Some(if b > 0.0 { r } else { -r }))
    }

    #[inline]
    pub fn div_down(a: f64, b: f64) -> f64 {
        match div_excess(a, b) {
            (q, Some(e)) if e > 0.0 => q.next_down(),
            (q, Some(_)) => q,
            (q, None) => q.next_down(),
        }
    }

    #[inline]
    pub fn div_up(a: f64, b: f64) -> f64 {
        match div_excess(a, b) {
            (q, Some(e)) if e < 0.0 => q.next_up(),
            (q, Some(_)) => q,
            (q, None) => q.next_up(),
        }
    }

    /// `x` must be nonnegative.
    #[inline]
    pub fn sqrt_down(x: f64) -> f64 {
        let r = x.sqrt();
        if r == 0.0 {
            return 0.0;
        }
        if x < EXACT_RESIDUAL_FLOOR || r.is_infinite() {
            return r.next_down().max(0.0);
        }
        if r.mul_add(r, -x) > 0.0 {
            r.next_down()
        } else {
            r
        }
    }

    #[inline]
    pub fn sqrt_up(x: f64) -> f64 {
        let r = x.sqrt();
        if x == 0.0 {
            return 0.0;
        }
        if x < EXACT_RESIDUAL_FLOOR {
            return r.next_up();
        }
        if r.mul_add(r, -x) < 0.0 {
            r.next_up()
        } else {
            r
        }
    }

    /// `base^n` rounded toward -inf, for `base >= 0`.
    pub(super) fn pow_nonneg_down(base: f64, n: u32) -> f64 {
        (1..n).fold(base, |acc, _| mul_down(acc, base))
    }

    pub(super) fn pow_nonneg_up(base: f64, n: u32) -> f64 {
        (1..n).fold(base, |acc, _| mul_up(acc, base))
    }
}

/// A closed interval `[lo, hi]` of finite reals.
#[derive(Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    /// Degenerate interval `[x, x]`. Panics on a non-finite `x`.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "interval endpoint must be finite, got {x}");
        Interval { lo: x, hi: x }
    }

    /// Smallest floating point interval containing the rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (a, b) = (num as f64, den as f64);
        Interval {
            lo: round::div_down(a, b),
            hi: round::div_up(a, b),
        }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Upper bound on the width.
    pub fn width(&self) -> f64 {
        round::sub_up(self.hi, self.lo)
    }

    pub fn mid(&self) -> f64 {
        let m = 0.5 * self.lo + 0.5 * self.hi;
        m.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && 0.0 <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Largest absolute value of any member.
    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Smallest absolute value of any member.
    pub fn mig(&self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    /// Square root of `self ∩ [0, ∞)`.
    ///
    /// A lower endpoint below zero is clamped to zero. If the whole interval
    /// lies below `-eps` the radicand is genuinely negative and a
    /// [`DomainError`] is returned; an interval inside `[-eps, 0)` yields
    /// `[0, 0]`.
    pub fn sqrt_clamped(self, eps: f64) -> std::result::Result<Interval, DomainError> {
        if self.hi < -eps {
            return Err(DomainError("square root of a negative interval"));
        }
        let lo = self.lo.max(0.0);
        let hi = self.hi.max(0.0);
        Ok(Interval {
            lo: round::sqrt_down(lo),
            hi: round::sqrt_up(hi),
        })
    }

    /// `self^n` for `n >= 1`. Even powers of an interval straddling zero
    /// start exactly at zero.
    pub fn pow_int(self, n: u32) -> Interval {
        assert!(n >= 1, "exponent must be positive");
        if n == 1 {
            return self;
        }
        if n.is_multiple_of(2) {
            let (lo_abs, hi_abs) = (self.mig(), self.mag());
            Interval {
                lo: round::pow_nonneg_down(lo_abs, n),
                hi: round::pow_nonneg_up(hi_abs, n),
            }
        } else {
            let down = |x: f64| {
                if x >= 0.0 {
                    round::pow_nonneg_down(x, n)
                } else {
                    -round::pow_nonneg_up(-x, n)
                }
            };
            let up = |x: f64| {
                if x >= 0.0 {
                    round::pow_nonneg_up(x, n)
                } else {
                    -round::pow_nonneg_down(-x, n)
                }
            };
            Interval {
                lo: down(self.lo),
                hi: up(self.hi),
            }
        }
    }

    /// `1/self`, defined only when zero is excluded. Used by derivative
    /// evaluation of square roots.
    pub fn recip(self) -> std::result::Result<Interval, DomainError> {
        if self.contains_zero() {
            return Err(DomainError("reciprocal of an interval containing zero"));
        }
        Ok(Interval {
            lo: round::div_down(1.0, self.hi),
            hi: round::div_up(1.0, self.lo),
        })
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.16e}, {:.16e}]", self.lo, self.hi)
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Interval::point(x)
    }
}

impl Add for Interval {
    type Output = Interval;
    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::add_down(self.lo, rhs.lo),
            hi: round::add_up(self.hi, rhs.hi),
        }
    }
}

impl Sub for Interval {
    type Output = Interval;
    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval {
            lo: round::sub_down(self.lo, rhs.hi),
            hi: round::sub_up(self.hi, rhs.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    #[inline]
    fn neg(self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b, c, d) = (self.lo, self.hi, rhs.lo, rhs.hi);
        // Sign-case dispatch keeps the common nonnegative case to two products.
        if a >= 0.0 && c >= 0.0 {
            return Interval {
                lo: round::mul_down(a, c),
                hi: round::mul_up(b, d),
            };
        }
        let lo = round::mul_down(a, c)
            .min(round::mul_down(a, d))
            .min(round::mul_down(b, c))
            .min(round::mul_down(b, d));
        let hi = round::mul_up(a, c)
            .max(round::mul_up(a, d))
            .max(round::mul_up(b, c))
            .max(round::mul_up(b, d));
        Interval { lo, hi }
    }
}

/// A box: one interval per coordinate.
pub type IntervalBox = Vec<Interval>;

/// Largest coordinate width of a box.
pub fn box_width(b: &[Interval]) -> f64 {
    b.iter().map(Interval::width).fold(0.0, f64::max)
}

pub fn box_mid(b: &[Interval]) -> Vec<f64> {
    b.iter().map(Interval::mid).collect()
}

pub fn box_hull(a: &[Interval], b: &[Interval]) -> IntervalBox {
    a.iter().zip(b).map(|(x, y)| x.hull(y)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn exact_integer_sum() {
        assert_eq!(iv(1.0, 2.0) + iv(3.0, 4.0), iv(4.0, 6.0));
    }

    #[test]
    fn symmetric_product() {
        assert_eq!(iv(-1.0, 1.0) * iv(-1.0, 1.0), iv(-1.0, 1.0));
    }

    #[test]
    fn additive_identity() {
        let a = iv(0.1, 0.7);
        assert_eq!(Interval::ZERO + a, a);
    }

    #[test]
    fn inexact_sum_is_widened_outward() {
        let s = Interval::point(0.1) + Interval::point(0.2);
        assert!(s.lo() < s.hi());
        assert_eq!(s.lo().next_up(), s.hi());
        assert!(s.contains(0.1 + 0.2));
    }

    #[test]
    fn construction_rejects_bad_endpoints() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(f64::NEG_INFINITY, 0.0).is_err());
    }

    #[test]
    fn sqrt_of_exact_squares() {
        assert_eq!(iv(0.25, 1.0).sqrt_clamped(0.0).unwrap(), iv(0.5, 1.0));
    }

    #[test]
    fn sqrt_clamps_rounding_dip() {
        let r = iv(-1e-18, 4.0).sqrt_clamped(1e-12).unwrap();
        assert_eq!(r.lo(), 0.0);
        assert!(r.hi() >= 2.0 && r.hi() <= 2.0f64.next_up());
    }

    #[test]
    fn sqrt_rejects_negative_radicand() {
        assert!(iv(-1.0, -0.5).sqrt_clamped(1e-12).is_err());
    }

    #[test]
    fn sqrt_of_two_brackets_true_root() {
        let r = Interval::point(2.0).sqrt_clamped(0.0).unwrap();
        assert!(r.lo() < r.hi());
        // r.lo^2 <= 2 <= r.hi^2 checked with exact residuals
        assert!(r.lo().mul_add(r.lo(), -2.0) <= 0.0);
        assert!(r.hi().mul_add(r.hi(), -2.0) >= 0.0);
    }

    #[test]
    fn even_power_straddling_zero() {
        assert_eq!(iv(-2.0, 1.0).pow_int(2), iv(0.0, 4.0));
    }

    #[test]
    fn cube_of_half() {
        let c = Interval::point(0.5).pow_int(3);
        assert!(c.contains(0.125));
        assert!(c.lo() >= 0.125f64.next_down() && c.hi() <= 0.125f64.next_up());
    }

    #[test]
    fn fourth_power() {
        assert_eq!(iv(1.0, 2.0).pow_int(4), iv(1.0, 16.0));
    }

    #[test]
    fn odd_power_of_negative_interval() {
        assert_eq!(iv(-2.0, -1.0).pow_int(3), iv(-8.0, -1.0));
        assert_eq!(iv(-2.0, 3.0).pow_int(3), iv(-8.0, 27.0));
    }

    #[test]
    fn ratio_encloses_fraction() {
        let r = Interval::ratio(1, 3);
        assert!(r.lo() < r.hi());
        assert!(3.0 * r.lo() <= 1.0 && 3.0 * r.hi() >= 1.0);
        assert_eq!(Interval::ratio(27, 4), Interval::point(6.75));
        assert_eq!(Interval::ratio(-3, 2), Interval::point(-1.5));
    }

    #[test]
    fn recip_excludes_zero() {
        assert!(iv(-1.0, 1.0).recip().is_err());
        assert_eq!(iv(2.0, 4.0).recip().unwrap(), iv(0.25, 0.5));
        assert_eq!(iv(-4.0, -2.0).recip().unwrap(), iv(-0.5, -0.25));
    }

    #[test]
    fn directed_helpers_bracket_exact_results() {
        // 1/10 is not representable; the two roundings must straddle it.
        let lo = round::div_down(1.0, 10.0);
        let hi = round::div_up(1.0, 10.0);
        assert_eq!(lo.next_up(), hi);
        assert!(round::mul_down(lo, 10.0) <= 1.0);
        assert!(round::mul_up(hi, 10.0) >= 1.0);
    }
}
