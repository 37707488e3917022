//! Coefficient rings shared by the rewriting engine, the Verma module and the
//! linear algebra: exact symbolic scalars, exact values at a rational `s`,
//! and complex doubles at a root of unity.

use std::fmt::Debug;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qscalar::{GaussRat, QScalar};

/// Absolute threshold under which a complex coefficient counts as zero.
pub const COMPLEX_ZERO: f64 = 1e-13;

pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self>;
    /// Magnitude used for pivoting and residual reports.
    fn magnitude(&self) -> f64;
}

impl Coeff for QScalar {
    fn zero() -> Self {
        QScalar::zero()
    }
    fn one() -> Self {
        QScalar::one()
    }
    fn from_i64(n: i64) -> Self {
        QScalar::from_int(n)
    }
    fn is_zero(&self) -> bool {
        QScalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        self.checked_div(o)
    }
    fn magnitude(&self) -> f64 {
        if QScalar::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
}

impl Coeff for GaussRat {
    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn from_i64(n: i64) -> Self {
        GaussRat::from_int(n)
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }
    fn magnitude(&self) -> f64 {
        self.to_complex().norm()
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.norm() < COMPLEX_ZERO
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self> {
        if o.norm() < COMPLEX_ZERO {
            return Err(Error::DivisionByZero);
        }
        Ok(self / o)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

/// The value of `[2] = q + q^{-1}` in each ring, given `s = q^{1/2}`.
pub trait QTwo: Coeff {
    fn q_two(s: &Self) -> Result<Self>;
}

impl QTwo for QScalar {
    fn q_two(_s: &Self) -> Result<Self> {
        Ok(QScalar::bracket_int(2))
    }
}

impl QTwo for GaussRat {
    fn q_two(s: &Self) -> Result<Self> {
        let q = s * s;
        Ok(&q + &q.inv()?)
    }
}

impl QTwo for Complex64 {
    fn q_two(s: &Self) -> Result<Self> {
        let q = s * s;
        Ok(q + Coeff::div(&Complex64::one(), &q)?)
    }
}

/// Specialize a symbolic scalar into a coefficient ring at `s`.
pub trait FromQScalar: Coeff {
    fn specialize(x: &QScalar, s: &Self) -> Result<Self>;
}

impl FromQScalar for QScalar {
    fn specialize(x: &QScalar, _s: &Self) -> Result<Self> {
        Ok(x.clone())
    }
}

impl FromQScalar for GaussRat {
    fn specialize(x: &QScalar, s: &Self) -> Result<Self> {
        x.eval_exact(s)
    }
}

impl FromQScalar for Complex64 {
    fn specialize(x: &QScalar, s: &Self) -> Result<Self> {
        x.eval_s(*s)
    }
}
