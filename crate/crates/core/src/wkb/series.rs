//! Complex power series truncated at a fixed order.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `c₀ + c₁x + … + c_J x^J`; every operation is exact modulo `x^{J+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    c: Vec<Complex64>,
}

impl TruncatedSeries {
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order + 1, Complex64::new(0.0, 0.0));
        TruncatedSeries { c: coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&v| Complex64::new(v, 0.0)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The identity series `x`.
    pub fn x(order: usize) -> Self {
        Self::from_real(&[0.0, 1.0], order)
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.c.get(k).copied().unwrap_or_default()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        TruncatedSeries {
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * x + v)
    }

    /// Termwise derivative; the top coefficient becomes zero.
    pub fn derivative(&self) -> Self {
        let j = self.order();
        let c = (1..=j).map(|k| self.c[k] * k as f64).collect();
        Self::new(c, j)
    }

    /// Antiderivative with constant term `c0`; the `x^{J+1}` term is dropped.
    pub fn integrate(&self, c0: Complex64) -> Self {
        let j = self.order();
        let mut c = vec![c0];
        c.extend((0..j).map(|k| self.c[k] / (k + 1) as f64));
        Self::new(c, j)
    }

    pub fn recip(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0.norm() == 0.0 {
            return Err(Error::InputInvalid("reciprocal of a series with zero constant term".into()));
        }
        let j = self.order();
        let mut r = vec![Complex64::new(0.0, 0.0); j + 1];
        r[0] = 1.0 / c0;
        for k in 1..=j {
            let s: Complex64 = (1..=k).map(|i| self.c[i] * r[k - i]).sum();
            r[k] = -s / c0;
        }
        Ok(TruncatedSeries { c: r })
    }

    /// Square root with the principal branch at `x = 0`.
    pub fn sqrt(&self) -> Result<Self> {
        let c0 = self.c[0];
        if c0.norm() == 0.0 {
            return Err(Error::InputInvalid("square root of a series with zero constant term".into()));
        }
        self.sqrt_with_leading(c0.sqrt())
    }

    /// Square root whose constant term is the given root of `c₀`.
    pub fn sqrt_with_leading(&self, s0: Complex64) -> Result<Self> {
        if s0.norm() == 0.0 {
            return Err(Error::InputInvalid("square root needs a non-zero leading term".into()));
        }
        let j = self.order();
        let mut s = vec![Complex64::new(0.0, 0.0); j + 1];
        s[0] = s0;
        for k in 1..=j {
            let cross: Complex64 = (1..k).map(|i| s[i] * s[k - i]).sum();
            s[k] = (self.c[k] - cross) / (2.0 * s0);
        }
        Ok(TruncatedSeries { c: s })
    }

    /// `self(inner(x))` for an inner series without constant term.
    pub fn compose(&self, inner: &TruncatedSeries) -> Result<Self> {
        if inner.c[0].norm() != 0.0 {
            return Err(Error::InputInvalid("composition needs inner(0) = 0".into()));
        }
        let j = self.order().min(inner.order());
        let mut out = Self::zero(j);
        let mut power = Self::constant(Complex64::new(1.0, 0.0), j);
        let inner = Self::new(inner.c.clone(), j);
        for k in 0..=j {
            out = &out + &power.scale(self.c[k]);
            power = &power * &inner;
        }
        Ok(out)
    }

    /// `exp` of a series (its constant term enters as a factor).
    pub fn exp(&self) -> Self {
        let j = self.order();
        let mut e = vec![Complex64::new(0.0, 0.0); j + 1];
        e[0] = self.c[0].exp();
        // e' = f' e
        for k in 1..=j {
            let s: Complex64 = (1..=k).map(|i| self.c[i] * i as f64 * e[k - i]).sum();
            e[k] = s / k as f64;
        }
        TruncatedSeries { c: e }
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, o: &TruncatedSeries) -> TruncatedSeries {
        let j = self.order().min(o.order());
        TruncatedSeries {
            c: (0..=j).map(|k| self.c[k] + o.c[k]).collect(),
        }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, o: &TruncatedSeries) -> TruncatedSeries {
        let j = self.order().min(o.order());
        TruncatedSeries {
            c: (0..=j).map(|k| self.c[k] - o.c[k]).collect(),
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, o: &TruncatedSeries) -> TruncatedSeries {
        let j = self.order().min(o.order());
        TruncatedSeries {
            c: (0..=j).map(|k| (0..=k).map(|i| self.c[i] * o.c[k - i]).sum()).collect(),
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
