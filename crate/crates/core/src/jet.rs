//! Truncated Taylor arithmetic of fixed order 3.
//!
//! A [`Jet`] carries the value and first three derivatives of a scalar
//! function at one point, stored as Taylor coefficients `[f, f', f''/2!,
//! f'''/3!]`. Arithmetic on jets propagates derivatives through products,
//! quotients, square roots and exponentials exactly (up to roundoff), which
//! keeps operator compositions and residual checks free of finite-difference
//! truncation error.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of Taylor coefficients carried by a [`Jet`] (value + 3 derivatives).
pub const JET_LEN: usize = 4;

const FACTORIAL: [f64; JET_LEN] = [1.0, 1.0, 2.0, 6.0];

/// Value and derivatives of order 1..3 at a point, as Taylor coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    c: [f64; JET_LEN],
}

impl Jet {
    /// The constant function `c`.
    pub fn constant(c: f64) -> Self {
        Jet {
            c: [c, 0.0, 0.0, 0.0],
        }
    }

    /// The identity function evaluated at `x`.
    pub fn variable(x: f64) -> Self {
        Jet {
            c: [x, 1.0, 0.0, 0.0],
        }
    }

    /// Build a jet from `[f, f', f'', f''']`.
    pub fn from_derivatives(d: [f64; JET_LEN]) -> Self {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = d[k] / FACTORIAL[k];
        }
        Jet { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative, `k <= 3`.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * FACTORIAL[k]
    }

    pub fn derivatives(&self) -> [f64; JET_LEN] {
        let mut d = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            d[k] = self.c[k] * FACTORIAL[k];
        }
        d
    }

    /// Reciprocal; the value must be nonzero.
    pub fn recip(&self) -> Self {
        Jet::constant(1.0) / *self
    }

    /// Square root; the value must be positive.
    pub fn sqrt(&self) -> Self {
        let a = &self.c;
        let mut s = [0.0; JET_LEN];
        s[0] = a[0].sqrt();
        let half = 0.5 / s[0];
        s[1] = a[1] * half;
        s[2] = (a[2] - s[1] * s[1]) * half;
        s[3] = (a[3] - 2.0 * s[1] * s[2]) * half;
        Jet { c: s }
    }

    /// Exponential of the jet.
    pub fn exp(&self) -> Self {
        let a = &self.c;
        let mut e = [0.0; JET_LEN];
        e[0] = a[0].exp();
        for k in 1..JET_LEN {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Jet { c: e }
    }

    /// Absolute value; the value must be nonzero (the sign is then locally
    /// constant and |f| is smooth).
    pub fn abs(&self) -> Self {
        if self.c[0] >= 0.0 {
            *self
        } else {
            -*self
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = self.c[k] + rhs.c[k];
        }
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = self.c[k] - rhs.c[k];
        }
        Jet { c }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let (a, b) = (&self.c, &rhs.c);
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = 0.0;
            for i in 0..=k {
                acc += a[i] * b[k - i];
            }
            c[k] = acc;
        }
        Jet { c }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let (a, b) = (&self.c, &rhs.c);
        let mut q = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            let mut acc = a[k];
            for i in 0..k {
                acc -= q[i] * b[k - i];
            }
            q[k] = acc / b[0];
        }
        Jet { c: q }
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        let mut c = [0.0; JET_LEN];
        for k in 0..JET_LEN {
            c[k] = -self.c[k];
        }
        Jet { c }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut c = self.c;
        c[0] += rhs;
        Jet { c }
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self + (-rhs)
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        let mut c = self.c;
        for v in c.iter_mut() {
            *v *= rhs;
        }
        Jet { c }
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        Jet::constant(self) / rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule() {
        // (x² · x)''' = 6 at any point
        let x = Jet::variable(1.7);
        let cubic = x * x * x;
        assert_relative_eq!(cubic.value(), 1.7f64.powi(3), max_relative = 1e-15);
        assert_relative_eq!(cubic.derivative(1), 3.0 * 1.7f64.powi(2), max_relative = 1e-15);
        assert_relative_eq!(cubic.derivative(2), 6.0 * 1.7, max_relative = 1e-15);
        assert_relative_eq!(cubic.derivative(3), 6.0, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_derivatives() {
        // E = e^{-x²}: E' = -2xE, E'' = (4x²-2)E, E''' = (12x-8x³)E
        let x0 = 0.8;
        let x = Jet::variable(x0);
        let e = (-(x * x)).exp();
        let ev = (-x0 * x0).exp();
        assert_relative_eq!(e.value(), ev, max_relative = 1e-15);
        assert_relative_eq!(e.derivative(1), -2.0 * x0 * ev, max_relative = 1e-14);
        assert_relative_eq!(e.derivative(2), (4.0 * x0 * x0 - 2.0) * ev, max_relative = 1e-14);
        assert_relative_eq!(
            e.derivative(3),
            (12.0 * x0 - 8.0 * x0.powi(3)) * ev,
            max_relative = 1e-14
        );
    }

    #[test]
    fn quotient_and_sqrt_invert_multiplication() {
        let x = Jet::variable(0.37);
        let a = (x * x + 1.5) * (-x).exp();
        let b = x * x * x - 2.0 * x + 3.0;
        let q = a / b;
        let back = q * b;
        for k in 0..JET_LEN {
            assert_relative_eq!(back.derivative(k), a.derivative(k), max_relative = 1e-13);
        }
        let s = a.abs().sqrt();
        let sq = s * s;
        for k in 0..JET_LEN {
            assert_relative_eq!(sq.derivative(k), a.abs().derivative(k), max_relative = 1e-13);
        }
    }

    #[test]
    fn abs_of_negative_flips_sign() {
        let x = Jet::variable(-2.0);
        let a = x.abs();
        assert_eq!(a.value(), 2.0);
        assert_eq!(a.derivative(1), -1.0);
    }
}
