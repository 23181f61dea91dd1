//! Expression trees for the bound functions, evaluable as real points,
//! intervals, and forward-mode dual numbers over either.
//!
//! All four evaluation modes share [`Expr::eval`], which is generic over the
//! [`Scalar`] trait. Derivatives come from [`Dual`], and the interval gradient
//! used for pruning is the same dual transform instantiated over
//! [`Interval`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::DomainError;
use crate::interval::Interval;

/// Slack allowed below zero for a guarded radicand before it counts as
/// genuinely negative.
pub const RADICAND_EPS: f64 = 1e-12;

/// A numeric constant with both its nearest `f64` and a rigorous enclosure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant {
    value: f64,
    enclosure: Interval,
}

impl Constant {
    pub fn int(n: i64) -> Self {
        let value = n as f64;
        assert_eq!(
            value as i64, n,
            "integer constant not exactly representable"
        );
        Constant {
            value,
            enclosure: Interval::point(value),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Constant {
            value: num as f64 / den as f64,
            enclosure: Interval::ratio(num, den),
        }
    }

    /// An exactly representable binary value, e.g. `0.5`.
    pub fn exact(value: f64) -> Self {
        Constant {
            value,
            enclosure: Interval::point(value),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn enclosure(&self) -> Interval {
        self.enclosure
    }
}

/// Number systems an [`Expr`] can be evaluated in.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn constant(c: &Constant) -> Self;

    fn powi(self, n: u32) -> Self;

    /// Square root. A guarded radicand may dip to `-RADICAND_EPS` through
    /// rounding and is clamped at zero; anything else negative is an error.
    fn sqrt(self, guarded: bool) -> Result<Self, DomainError>;
}

/// Scalars that can carry a derivative part.
pub trait DualBase: Scalar {
    fn from_u32(n: u32) -> Self;

    fn recip(self) -> Result<Self, DomainError>;
}

impl Scalar for f64 {
    fn constant(c: &Constant) -> Self {
        c.value
    }

    fn powi(self, n: u32) -> Self {
        f64::powi(self, n as i32)
    }

    fn sqrt(self, guarded: bool) -> Result<Self, DomainError> {
        let eps = if guarded { RADICAND_EPS } else { 0.0 };
        if self < -eps || self.is_nan() {
            return Err(DomainError("square root of a negative number"));
        }
        Ok(self.max(0.0).sqrt())
    }
}

impl DualBase for f64 {
    fn from_u32(n: u32) -> Self {
        n as f64
    }

    fn recip(self) -> Result<Self, DomainError> {
        if self == 0.0 {
            Err(DomainError(
                "derivative of sqrt is singular at a zero radicand",
            ))
        } else {
            Ok(1.0 / self)
        }
    }
}

impl Scalar for Interval {
    fn constant(c: &Constant) -> Self {
        c.enclosure
    }

    fn powi(self, n: u32) -> Self {
        self.pow_int(n)
    }

    fn sqrt(self, guarded: bool) -> Result<Self, DomainError> {
        if guarded {
            self.sqrt_clamped(RADICAND_EPS)
        } else if self.lo() < 0.0 {
            Err(DomainError(
                "square root of an interval reaching below zero",
            ))
        } else {
            self.sqrt_clamped(0.0)
        }
    }
}

impl DualBase for Interval {
    fn from_u32(n: u32) -> Self {
        Interval::point(n as f64)
    }

    fn recip(self) -> Result<Self, DomainError> {
        Interval::recip(self)
    }
}

/// First-order dual number `value + deriv·ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub deriv: T,
}

impl<T: DualBase> Dual<T> {
    pub fn variable(value: T) -> Self {
        Dual {
            value,
            deriv: T::from_u32(1),
        }
    }

    pub fn constant_value(value: T) -> Self {
        Dual {
            value,
            deriv: T::from_u32(0),
        }
    }
}

impl<T: DualBase> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }
}

impl<T: DualBase> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }
}

impl<T: DualBase> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }
}

impl<T: DualBase> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }
}

impl<T: DualBase> Scalar for Dual<T> {
    fn constant(c: &Constant) -> Self {
        Dual::constant_value(T::constant(c))
    }

    fn powi(self, n: u32) -> Self {
        if n == 0 {
            return Dual::constant_value(T::from_u32(1));
        }
        let lower = if n == 1 {
            T::from_u32(1)
        } else {
            self.value.powi(n - 1)
        };
        Dual {
            value: self.value.powi(n),
            deriv: T::from_u32(n) * lower * self.deriv,
        }
    }

    fn sqrt(self, guarded: bool) -> Result<Self, DomainError> {
        let root = self.value.sqrt(guarded)?;
        let inv = (root + root).recip()?;
        Ok(Dual {
            value: root,
            deriv: self.deriv * inv,
        })
    }
}

/// Expression tree over variables `x` (index 0) and `y` (index 1).
#[derive(Clone, PartialEq)]
pub enum Expr {
    Const(Constant),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `guarded` marks a radicand that is nonnegative on the domain but whose
    /// enclosure may dip below zero through rounding.
    Sqrt {
        arg: Box<Expr>,
        guarded: bool,
    },
}

impl Expr {
    pub fn var(index: usize) -> Expr {
        Expr::Var(index)
    }

    pub fn x() -> Expr {
        Expr::Var(0)
    }

    pub fn y() -> Expr {
        Expr::Var(1)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Constant::int(n))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(Constant::ratio(num, den))
    }

    /// `(num/den)·√radicand` with an exact integer radicand, e.g. `2/√5` is
    /// `ratio_sqrt(2, 5, 5)`.
    pub fn ratio_sqrt(num: i64, den: i64, radicand: i64) -> Expr {
        Expr::ratio(num, den)
            * Expr::Sqrt {
                arg: Box::new(Expr::int(radicand)),
                guarded: false,
            }
    }

    pub fn powi(self, n: u32) -> Expr {
        assert!((1..=4).contains(&n), "only powers 1..=4 are supported");
        Expr::Pow(Box::new(self), n)
    }

    /// Square root of a domain radicand.
    pub fn radical(self) -> Expr {
        Expr::Sqrt {
            arg: Box::new(self),
            guarded: true,
        }
    }

    /// One more than the largest variable index, or zero for a constant.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.arity().max(b.arity()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.arity(),
            Expr::Sqrt { arg, .. } => arg.arity(),
        }
    }

    /// Arguments of every square root node, outermost first.
    pub fn radicands(&self) -> Vec<&Expr> {
        let mut out = Vec::new();
        self.collect_radicands(&mut out);
        out
    }

    fn collect_radicands<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect_radicands(out);
                b.collect_radicands(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_radicands(out),
            Expr::Sqrt { arg, .. } => {
                out.push(arg);
                arg.collect_radicands(out);
            }
        }
    }

    /// Evaluates the expression in any [`Scalar`] system.
    ///
    /// Panics if a variable index is out of range for `vars`.
    pub fn eval<S: Scalar>(&self, vars: &[S]) -> Result<S, DomainError> {
        Ok(match self {
            Expr::Const(c) => S::constant(c),
            Expr::Var(i) => vars[*i],
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Pow(a, n) => a.eval(vars)?.powi(*n),
            Expr::Sqrt { arg, guarded } => arg.eval(vars)?.sqrt(*guarded)?,
        })
    }

    pub fn eval_point(&self, p: &[f64]) -> Result<f64, DomainError> {
        self.eval(p)
    }

    pub fn eval_interval(&self, b: &[Interval]) -> Result<Interval, DomainError> {
        self.eval(b)
    }

    /// Partial derivative with respect to variable `var` at `p`.
    pub fn eval_derivative(&self, p: &[f64], var: usize) -> Result<f64, DomainError> {
        let seeded: Vec<Dual<f64>> = p
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if i == var {
                    Dual::variable(v)
                } else {
                    Dual::constant_value(v)
                }
            })
            .collect();
        Ok(self.eval(&seeded)?.deriv)
    }

    /// Enclosure of every partial derivative over the box `b`.
    ///
    /// Fails whenever some radicand's enclosure touches zero, since the square
    /// root is not differentiable there.
    pub fn gradient_interval(&self, b: &[Interval]) -> Result<Vec<Interval>, DomainError> {
        (0..b.len())
            .map(|var| {
                let seeded: Vec<Dual<Interval>> = b
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        if i == var {
                            Dual::variable(v)
                        } else {
                            Dual::constant_value(v)
                        }
                    })
                    .collect();
                Ok(self.eval(&seeded)?.deriv)
            })
            .collect()
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", c.value),
            Expr::Var(0) => write!(f, "x"),
            Expr::Var(1) => write!(f, "y"),
            Expr::Var(i) => write!(f, "v{i}"),
            Expr::Add(a, b) => write!(f, "({a:?} + {b:?})"),
            Expr::Sub(a, b) => write!(f, "({a:?} - {b:?})"),
            Expr::Mul(a, b) => write!(f, "{a:?}*{b:?}"),
            Expr::Neg(a) => write!(f, "-{a:?}"),
            Expr::Pow(a, n) => write!(f, "{a:?}^{n}"),
            Expr::Sqrt { arg, .. } => write!(f, "sqrt({arg:?})"),
        }
    }
}

macro_rules! expr_binop {
    ($tr:ident, $method:ident, $variant:ident) => {
        impl $tr for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$variant(Box::new(self), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, Add);
expr_binop!(Sub, sub, Sub);
expr_binop!(Mul, mul, Mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}
