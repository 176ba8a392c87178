//! Forward-mode automatic differentiation.
//!
//! Geometry code is written once against the [`Scalar`] trait and evaluated
//! with plain `f64`, with [`Dual`] (value and gradient) or with [`Jet`]
//! (value, gradient and Hessian). Curvature needs two derivatives of the
//! metric, which a single [`Jet`] evaluation provides exactly.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number type that geometry code is generic over.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;

    /// Real part (the value with all derivative information dropped).
    fn re(&self) -> f64;

    /// Compose with a univariate function `f` known through second order
    /// at `self.re()`: `f = value`, `df = f'`, `d2f = f''`.
    fn chain(self, value: f64, df: f64, d2f: f64) -> Self;

    fn sqrt(self) -> Self {
        let v = self.re().sqrt();
        self.chain(v, 0.5 / v, -0.25 / (v * v * v))
    }

    fn sin(self) -> Self {
        let (s, c) = self.re().sin_cos();
        self.chain(s, c, -s)
    }

    fn cos(self) -> Self {
        let (s, c) = self.re().sin_cos();
        self.chain(c, -s, -c)
    }

    fn ln(self) -> Self {
        let v = self.re();
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    fn exp(self) -> Self {
        let e = self.re().exp();
        self.chain(e, e, e)
    }

    fn powf(self, p: f64) -> Self {
        let v = self.re();
        if p == 0.0 {
            return Self::cst(1.0);
        }
        self.chain(
            v.powf(p),
            p * v.powf(p - 1.0),
            p * (p - 1.0) * v.powf(p - 2.0),
        )
    }

    fn powi(self, n: i32) -> Self {
        let v = self.re();
        if n == 0 {
            return Self::cst(1.0);
        }
        let nf = n as f64;
        self.chain(
            v.powi(n),
            nf * v.powi(n - 1),
            nf * (nf - 1.0) * v.powi(n - 2),
        )
    }

    fn recip(self) -> Self {
        let v = self.re();
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl Scalar for f64 {
    #[inline]
    fn cst(v: f64) -> Self {
        v
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn chain(self, value: f64, _df: f64, _d2f: f64) -> Self {
        value
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powf(self, p: f64) -> Self {
        f64::powf(self, p)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// First-order dual number over `N` independent variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<const N: usize> {
    pub val: f64,
    pub grad: [f64; N],
}

impl<const N: usize> Dual<N> {
    pub fn constant(val: f64) -> Self {
        Self { val, grad: [0.0; N] }
    }

    /// Independent variable number `i`.
    pub fn var(val: f64, i: usize) -> Self {
        let mut grad = [0.0; N];
        grad[i] = 1.0;
        Self { val, grad }
    }

    /// Seed a whole point: coordinate `i` becomes variable `i`.
    pub fn seed(x: &[f64; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::var(x[i], i))
    }
}

impl<const N: usize> Add for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self {
            val: self.val + o.val,
            grad: std::array::from_fn(|i| self.grad[i] + o.grad[i]),
        }
    }
}

impl<const N: usize> Sub for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self {
            val: self.val - o.val,
            grad: std::array::from_fn(|i| self.grad[i] - o.grad[i]),
        }
    }
}

impl<const N: usize> Mul for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self {
            val: self.val * o.val,
            grad: std::array::from_fn(|i| self.grad[i] * o.val + self.val * o.grad[i]),
        }
    }
}

impl<const N: usize> Div for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = 1.0 / o.val;
        let val = self.val * inv;
        Self {
            val,
            grad: std::array::from_fn(|i| (self.grad[i] - val * o.grad[i]) * inv),
        }
    }
}

impl<const N: usize> Neg for Dual<N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            val: -self.val,
            grad: self.grad.map(|g| -g),
        }
    }
}

impl<const N: usize> Add<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: f64) -> Self {
        self.val += o;
        self
    }
}

impl<const N: usize> Sub<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: f64) -> Self {
        self.val -= o;
        self
    }
}

impl<const N: usize> Mul<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Self {
            val: self.val * o,
            grad: self.grad.map(|g| g * o),
        }
    }
}

impl<const N: usize> Div<f64> for Dual<N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<const N: usize> Scalar for Dual<N> {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn re(&self) -> f64 {
        self.val
    }
    #[inline]
    fn chain(self, value: f64, df: f64, _d2f: f64) -> Self {
        Self {
            val: value,
            grad: self.grad.map(|g| df * g),
        }
    }
}

/// Second-order jet over `N` variables: value, gradient and full Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    pub val: f64,
    pub grad: [f64; N],
    pub hess: [[f64; N]; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(val: f64) -> Self {
        Self {
            val,
            grad: [0.0; N],
            hess: [[0.0; N]; N],
        }
    }

    pub fn var(val: f64, i: usize) -> Self {
        let mut j = Self::constant(val);
        j.grad[i] = 1.0;
        j
    }

    pub fn seed(x: &[f64; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::var(x[i], i))
    }
}

/// A univariate jet carries `(f, f', f'')`; used for radial profiles.
pub type Jet1 = Jet<1>;

impl Jet<1> {
    pub fn triple(&self) -> [f64; 3] {
        [self.val, self.grad[0], self.hess[0][0]]
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self {
            val: self.val + o.val,
            grad: std::array::from_fn(|i| self.grad[i] + o.grad[i]),
            hess: std::array::from_fn(|i| std::array::from_fn(|j| self.hess[i][j] + o.hess[i][j])),
        }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self {
            val: self.val - o.val,
            grad: std::array::from_fn(|i| self.grad[i] - o.grad[i]),
            hess: std::array::from_fn(|i| std::array::from_fn(|j| self.hess[i][j] - o.hess[i][j])),
        }
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a, b) = (self.val, o.val);
        Self {
            val: a * b,
            grad: std::array::from_fn(|i| self.grad[i] * b + a * o.grad[i]),
            hess: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    self.hess[i][j] * b
                        + a * o.hess[i][j]
                        + self.grad[i] * o.grad[j]
                        + self.grad[j] * o.grad[i]
                })
            }),
        }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, o: f64) -> Self {
        self.val += o;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: f64) -> Self {
        self.val -= o;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    #[inline]
    fn mul(self, o: f64) -> Self {
        Self {
            val: self.val * o,
            grad: self.grad.map(|g| g * o),
            hess: self.hess.map(|row| row.map(|h| h * o)),
        }
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    #[inline]
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn re(&self) -> f64 {
        self.val
    }
    #[inline]
    fn chain(self, value: f64, df: f64, d2f: f64) -> Self {
        Self {
            val: value,
            grad: self.grad.map(|g| df * g),
            hess: std::array::from_fn(|i| {
                std::array::from_fn(|j| d2f * self.grad[i] * self.grad[j] + df * self.hess[i][j])
            }),
        }
    }
}
