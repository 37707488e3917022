//! Exact scalars: the fraction field of Laurent polynomials in `s = q^{1/2}`
//! and optional weight variables, over the Gaussian rationals.

pub mod gauss;
pub mod poly;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use gauss::GaussRat;
pub use poly::{Mono, Poly, Var, MAX_RANK, NVARS};

use crate::error::{Error, Result};

pub const POLE_TOL: f64 = 1e-12;

/// Element of the fraction field, kept in canonical form:
/// the denominator has nonnegative exponents with minimum zero in every
/// variable, leading (lexicographically largest) coefficient one, and no
/// nonunit factor in common with the numerator.
#[derive(Clone, PartialEq, Eq)]
pub struct QScalar {
    num: Poly,
    den: Poly,
}

impl Hash for QScalar {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.num.hash(h);
        self.den.hash(h);
    }
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

/// Choice of primitive root: `q = exp(2 pi i j / ell)` and
/// `s = exp(pi i j / ell)`, so that `s^ell = -1` whenever `ell` is even.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootBranch {
    pub j: i64,
}

impl Default for RootBranch {
    fn default() -> Self {
        RootBranch { j: 1 }
    }
}

impl RootBranch {
    pub fn s_value(&self, ell: i64) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::PI * self.j as f64 / ell as f64)
    }
}

fn twice_integer(n: &BigRational, what: &str) -> Result<i32> {
    let t = n * BigRational::from_integer(2.into());
    if !t.is_integer() {
        return Err(Error::Domain(format!(
            "{what}: argument {n} is not a half-integer"
        )));
    }
    t.to_integer()
        .to_i32()
        .ok_or_else(|| Error::Domain(format!("{what}: argument {n} too large")))
}

impl QScalar {
    pub fn from_parts(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(canonical(num, den))
    }

    pub fn zero() -> Self {
        QScalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        QScalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        QScalar::from_gauss(GaussRat::from_int(n))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        QScalar::from_gauss(GaussRat::from_ratio(p, q))
    }

    pub fn from_rational(r: &BigRational) -> Self {
        QScalar::from_gauss(GaussRat::real(r.clone()))
    }

    pub fn from_gauss(c: GaussRat) -> Self {
        QScalar {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        QScalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn i() -> Self {
        QScalar::from_gauss(GaussRat::i())
    }

    pub fn var(v: Var) -> Self {
        QScalar::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        QScalar::from_poly(Poly::var_pow(v, e))
    }

    /// `s^k = q^{k/2}`.
    pub fn s_pow(k: i32) -> Self {
        QScalar::var_pow(Var::S, k)
    }

    /// `q^x` for half-integer `x`.
    pub fn q_pow(x: &BigRational) -> Result<Self> {
        Ok(QScalar::s_pow(twice_integer(x, "q_pow")?))
    }

    pub fn q() -> Self {
        QScalar::s_pow(2)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<GaussRat> {
        let n = self.num.as_constant()?;
        let d = self.den.as_constant()?;
        Some(&n / &d)
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    pub fn uses_var(&self, v: Var) -> bool {
        self.num.uses_var(v) || self.den.uses_var(v)
    }

    /// True when the only variable is `s`.
    pub fn is_univariate(&self) -> bool {
        (1..NVARS).all(|i| !self.num.uses_slot(i) && !self.den.uses_slot(i))
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(canonical(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QScalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn checked_div(&self, o: &QScalar) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn scale(&self, c: &GaussRat) -> QScalar {
        if c.is_zero() {
            return QScalar::zero();
        }
        QScalar {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// `[n] = (q^n - q^{-n})/(q - q^{-1})` for half-integer `n`.
    pub fn bracket(n: &BigRational) -> Result<Self> {
        let k = twice_integer(n, "bracket")?;
        Ok(bracket_s(k))
    }

    pub fn bracket_int(n: i64) -> Self {
        bracket_s(2 * n as i32)
    }

    /// `[n]_+ = i (q^n + q^{-n})/(q - q^{-1})`.
    pub fn bracket_plus(n: &BigRational) -> Result<Self> {
        let k = twice_integer(n, "bracket_plus")?;
        Ok(bracket_plus_s(k))
    }

    /// `{k} = q^k + q^{-k}`.
    pub fn curly(k: &BigRational) -> Result<Self> {
        let k = twice_integer(k, "curly")?;
        Ok(QScalar::from_poly(
            Poly::var_pow(Var::S, k).add(&Poly::var_pow(Var::S, -k)),
        ))
    }

    /// `[lambda_i + shift]` with `q^{lambda_i}` the formal variable `t_i`.
    pub fn bracket_sym(i: usize, shift: &BigRational) -> Result<Self> {
        let k = twice_integer(shift, "bracket_sym")?;
        let num = tq(i, k, 1).sub(&tq(i, -k, -1));
        Ok(canonical(num, q_minus_qinv()))
    }

    /// `[lambda_i + shift]_+` with `q^{lambda_i} = t_i`.
    pub fn bracket_plus_sym(i: usize, shift: &BigRational) -> Result<Self> {
        let k = twice_integer(shift, "bracket_plus_sym")?;
        let num = tq(i, k, 1).add(&tq(i, -k, -1)).scale(&GaussRat::i());
        Ok(canonical(num, q_minus_qinv()))
    }

    /// `{lambda_i + shift}` with `q^{lambda_i} = t_i`.
    pub fn curly_sym(i: usize, shift: &BigRational) -> Result<Self> {
        let k = twice_integer(shift, "curly_sym")?;
        Ok(QScalar::from_poly(tq(i, k, 1).add(&tq(i, -k, -1))))
    }

    /// `q^{lambda_i + shift} - q^{-lambda_i - shift}`.
    pub fn curly_minus_sym(i: usize, shift: &BigRational) -> Result<Self> {
        let k = twice_integer(shift, "curly_minus_sym")?;
        Ok(QScalar::from_poly(tq(i, k, 1).sub(&tq(i, -k, -1))))
    }

    /// Evaluate at a complex value of `s`; fails on weight variables or poles.
    pub fn eval_s(&self, s: Complex64) -> Result<Complex64> {
        self.require_univariate()?;
        let mut pt = [Complex64::new(1.0, 0.0); NVARS];
        pt[0] = s;
        let d = self.den.eval_complex(&pt);
        if d.norm() < POLE_TOL {
            return Err(Error::Pole(format!("denominator vanishes at s={s}")));
        }
        Ok(self.num.eval_complex(&pt) / d)
    }

    pub fn eval_at_root(&self, ell: i64, branch: RootBranch) -> Result<Complex64> {
        if ell < 1 {
            return Err(Error::Domain(format!("root order {ell} must be positive")));
        }
        self.eval_s(branch.s_value(ell))
    }

    fn require_univariate(&self) -> Result<()> {
        if !self.is_univariate() {
            return Err(Error::Domain(format!(
                "unsubstituted weight variables in {self}"
            )));
        }
        Ok(())
    }

    /// Exact value at a rational (or Gaussian rational) `s`.
    pub fn eval_exact(&self, s: &GaussRat) -> Result<GaussRat> {
        self.require_univariate()?;
        let d = eval_poly_s(&self.den, s)?;
        if d.is_zero() {
            return Err(Error::Pole(format!("denominator vanishes at s={s}")));
        }
        Ok(&eval_poly_s(&self.num, s)? / &d)
    }

    /// Substitute a scalar for one variable.
    pub fn subst(&self, v: Var, value: &QScalar) -> Result<QScalar> {
        let n = subst_poly(&self.num, v, value)?;
        let d = subst_poly(&self.den, v, value)?;
        n.checked_div(&d)
    }

    /// Map every term's coefficient through complex conjugation, keeping the
    /// variables fixed.
    pub fn conj_coeffs(&self) -> QScalar {
        canonical(
            self.num.map_coeffs(GaussRat::conj),
            self.den.map_coeffs(GaussRat::conj),
        )
    }

    /// Reduce the numerator modulo `x_i^2 = [2] w_i x_i - w_i^2 + 1` for
    /// every abstract weight pair. The denominator must be free of `x`.
    pub fn reduce_weight_relation(&self) -> Result<QScalar> {
        for i in 1..=MAX_RANK {
            if self.den.uses_var(Var::X(i)) {
                return Err(Error::Domain(
                    "weight relation reduction needs an x-free denominator".into(),
                ));
            }
        }
        let mut num = self.num.clone();
        for i in 1..=MAX_RANK {
            num = reduce_x(&num, i);
        }
        Ok(canonical(num, self.den.clone()))
    }
}

fn q_minus_qinv() -> Poly {
    Poly::var_pow(Var::S, 2).sub(&Poly::var_pow(Var::S, -2))
}

/// `t_i^{sign} s^{k}`
fn tq(i: usize, k: i32, sign: i32) -> Poly {
    let mut m = [0; NVARS];
    m[Var::T(i).slot()] = sign;
    m[0] = k;
    Poly::monomial(m, GaussRat::one())
}

fn bracket_s(k: i32) -> QScalar {
    if k == 0 {
        return QScalar::zero();
    }
    if k % 2 == 0 {
        // [n] = q^{n-1} + q^{n-3} + ... + q^{1-n}
        let n = k / 2;
        let mut p = Poly::zero();
        for j in 0..n.abs() {
            p.add_term(
                {
                    let mut m = [0; NVARS];
                    m[0] = 2 * (n.abs() - 1 - 2 * j);
                    m
                },
                &GaussRat::one(),
            );
        }
        let q = QScalar::from_poly(p);
        return if n < 0 { -q } else { q };
    }
    canonical(
        Poly::var_pow(Var::S, k).sub(&Poly::var_pow(Var::S, -k)),
        q_minus_qinv(),
    )
}

fn bracket_plus_s(k: i32) -> QScalar {
    canonical(
        Poly::var_pow(Var::S, k)
            .add(&Poly::var_pow(Var::S, -k))
            .scale(&GaussRat::i()),
        q_minus_qinv(),
    )
}

fn eval_poly_s(p: &Poly, s: &GaussRat) -> Result<GaussRat> {
    let mut acc = GaussRat::zero();
    for (m, c) in p.terms() {
        acc += &(c * &s.pow(m[0] as i64)?);
    }
    Ok(acc)
}

fn subst_poly(p: &Poly, v: Var, value: &QScalar) -> Result<QScalar> {
    let slot = v.slot();
    let mut acc = QScalar::zero();
    for (e, c) in p.coeffs_in(slot) {
        let term = QScalar::from_poly(c) * value.pow(e as i64)?;
        acc += &term;
    }
    Ok(acc)
}

fn reduce_x(p: &Poly, i: usize) -> Poly {
    let xs = Var::X(i).slot();
    if p.degree(xs) < 2 {
        return p.clone();
    }
    let w = Poly::var_pow(Var::W(i), 1);
    let x = Poly::var_pow(Var::X(i), 1);
    let two = Poly::var_pow(Var::S, 2).add(&Poly::var_pow(Var::S, -2));
    // x^2 -> [2] w x - w^2 + 1
    let repl = two.mul(&w).mul(&x).sub(&w.mul(&w)).add(&Poly::one());
    let mut out = Poly::zero();
    for (e, c) in p.coeffs_in(xs) {
        let mut term = c;
        let mut e = e;
        while e >= 2 {
            term = term.mul(&repl);
            e -= 2;
        }
        if e == 1 {
            term = term.mul(&x);
        }
        out = out.add(&term);
    }
    if out.degree(xs) >= 2 {
        reduce_x(&out, i)
    } else {
        out
    }
}

fn canonical(num: Poly, den: Poly) -> QScalar {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return QScalar::zero();
    }
    let (den, dshift) = den.to_nonneg();
    let neg: Mono = std::array::from_fn(|i| -dshift[i]);
    let mut num = num.shift(&neg);
    let mut den = den;
    if let Some(c) = den.as_constant() {
        let inv = c.inv().expect("nonzero");
        return QScalar {
            num: num.scale(&inv),
            den: Poly::one(),
        };
    }
    let (nn, nshift) = num.to_nonneg();
    let g = poly::gcd(&nn, &den);
    if !g.is_one() {
        num = nn.exact_div(&g).expect("gcd divides").shift(&nshift);
        den = den.exact_div(&g).expect("gcd divides");
    }
    let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
    if !lc.is_one() {
        let inv = lc.inv().expect("nonzero");
        num = num.scale(&inv);
        den = den.scale(&inv);
    }
    if let Some(c) = den.as_constant() {
        let inv = c.inv().expect("nonzero");
        num = num.scale(&inv);
        den = Poly::one();
    }
    QScalar { num, den }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, o: &QScalar) -> QScalar {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return QScalar {
                    num: self.num.add(&o.num),
                    den: Poly::one(),
                };
            }
            return canonical(self.num.add(&o.num), self.den.clone());
        }
        if o.den.is_one() {
            return canonical(self.num.add(&o.num.mul(&self.den)), self.den.clone());
        }
        if self.den.is_one() {
            return canonical(o.num.add(&self.num.mul(&o.den)), o.den.clone());
        }
        let g = poly::gcd(&self.den, &o.den);
        let a = self.den.exact_div(&g).expect("gcd divides");
        let b = o.den.exact_div(&g).expect("gcd divides");
        canonical(self.num.mul(&b).add(&o.num.mul(&a)), self.den.mul(&b))
    }
}

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, o: &QScalar) -> QScalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, o: &QScalar) -> QScalar {
        if self.is_zero() || o.is_zero() {
            return QScalar::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return QScalar {
                num: self.num.mul(&o.num),
                den: Poly::one(),
            };
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        // cross-cancel before multiplying
        let (a, d) = cancel(&self.num, &o.den);
        let (c, b) = cancel(&o.num, &self.den);
        canonical(a.mul(&c), b.mul(&d))
    }
}

/// Remove the common factor of a Laurent numerator and a canonical denominator.
fn cancel(num: &Poly, den: &Poly) -> (Poly, Poly) {
    if den.is_one() {
        return (num.clone(), den.clone());
    }
    let (nn, sh) = num.to_nonneg();
    let g = poly::gcd(&nn, den);
    if g.is_one() {
        return (num.clone(), den.clone());
    }
    (
        nn.exact_div(&g).expect("gcd divides").shift(&sh),
        den.exact_div(&g).expect("gcd divides"),
    )
}

impl<'a> Div<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn div(self, o: &QScalar) -> QScalar {
        self.checked_div(o).expect("division by zero scalar")
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<QScalar> for &'a QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                self.$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
owned_ops!(Div, div);

impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, o: &QScalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, o: &QScalar) {
        *self = &*self * o;
    }
}

impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::from_int(n)
    }
}

pub(crate) fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (m, c) in p.terms().rev() {
        let (sign, c) = if c.is_negative() {
            ('-', -c)
        } else {
            ('+', c.clone())
        };
        out.push(sign);
        out.push('(');
        out.push_str(&c.to_string());
        out.push(')');
        for (slot, &e) in m.iter().enumerate() {
            if e != 0 {
                out.push('*');
                out.push_str(&Var::from_slot(slot).name());
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
    out
}

fn parse_poly(text: &str) -> Result<Poly> {
    let t: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |why: &str| Error::Parse(format!("{why} in polynomial {text:?}"));
    if t.iter().collect::<String>() == "0" {
        return Ok(Poly::zero());
    }
    let mut p = Poly::zero();
    let mut i = 0;
    while i < t.len() {
        let sign = match t[i] {
            '+' => 1,
            '-' => -1,
            _ => return Err(bad("expected sign")),
        };
        i += 1;
        if t.get(i) != Some(&'(') {
            return Err(bad("expected '('"));
        }
        let close = t[i..]
            .iter()
            .position(|&c| c == ')')
            .ok_or_else(|| bad("unclosed '('"))?
            + i;
        let coeff: String = t[i + 1..close].iter().collect();
        let mut c = GaussRat::parse(&coeff)?;
        if sign < 0 {
            c = -c;
        }
        i = close + 1;
        let mut m = [0; NVARS];
        while t.get(i) == Some(&'*') {
            i += 1;
            let start = i;
            while i < t.len() && t[i] != '^' {
                i += 1;
            }
            let name: String = t[start..i].iter().collect();
            let v = Var::parse(&name).ok_or_else(|| bad("unknown variable"))?;
            i += 1;
            let estart = i;
            if i < t.len() && t[i] == '-' {
                i += 1;
            }
            while i < t.len() && t[i].is_ascii_digit() {
                i += 1;
            }
            let e: i32 = t[estart..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| bad("bad exponent"))?;
            m[v.slot()] += e;
        }
        p.add_term(m, &c);
    }
    Ok(p)
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", format_poly(&self.num), format_poly(&self.den))
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QScalar({self})")
    }
}

impl FromStr for QScalar {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        let mut depth = 0i32;
        let mut split = None;
        for (i, c) in text.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                '/' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let (n, d) = match split {
            Some(i) => (&text[..i], &text[i + 1..]),
            None => (text, "+(1+0i)"),
        };
        let num = parse_poly(n)?;
        let den = parse_poly(d)?;
        QScalar::from_parts(num, den)
    }
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a rational written as `p`, `p/q`, or a terminating decimal.
pub fn rational(text: &str) -> Result<BigRational> {
    gauss::parse_rational(text)
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

pub fn fmt_rat(r: &BigRational) -> String {
    gauss::fmt_rational(r)
}

/// Value of a rational as f64.
pub fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_half_integer(r: &BigRational) -> bool {
    let t = r * rat_int(2);
    t.is_integer() && !r.is_integer()
}

pub fn rat_abs(r: &BigRational) -> BigRational {
    r.abs()
}

pub fn rat_is_one(r: &BigRational) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(p: i64, q: i64) -> BigRational {
        rat(p, q)
    }

    #[test]
    fn bracket_examples() {
        assert!(QScalar::bracket(&br(0, 1)).unwrap().is_zero());
        let two = QScalar::bracket(&br(2, 1)).unwrap();
        assert_eq!(two, QScalar::s_pow(2) + QScalar::s_pow(-2));
        // [1/2] = 1/(s + s^{-1}), checked by clearing the denominator
        let half = QScalar::bracket(&br(1, 2)).unwrap();
        let prod = &half * &(QScalar::s_pow(1) + QScalar::s_pow(-1));
        assert!(prod.is_one());
        assert!(QScalar::bracket(&br(1, 3)).is_err());
    }

    #[test]
    fn bracket_plus_zero() {
        let bp = QScalar::bracket_plus(&br(0, 1)).unwrap();
        let expect = QScalar::from_gauss(GaussRat::from_int(2) * GaussRat::i())
            / (QScalar::q() - QScalar::s_pow(-2));
        assert_eq!(bp, expect);
    }

    #[test]
    fn curly_is_bracket_difference() {
        for k in [0i64, 1, 3] {
            let c = QScalar::curly(&rat_int(k)).unwrap();
            let d = QScalar::bracket_int(k + 1) - QScalar::bracket_int(k - 1);
            assert_eq!(c, d);
        }
    }

    #[test]
    fn string_round_trip() {
        let x = QScalar::bracket_plus(&br(3, 2)).unwrap() * QScalar::var(Var::T(2))
            / (QScalar::var(Var::W(1)) + QScalar::from_ratio(3, 7));
        let s = x.to_string();
        let y: QScalar = s.parse().unwrap();
        assert_eq!(x, y);
        assert_eq!(y.to_string(), s);
        assert_eq!("0/+(1+0i)".parse::<QScalar>().unwrap(), QScalar::zero());
    }

    #[test]
    fn root_of_unity_values() {
        let ell = 6;
        let b = QScalar::bracket_int(ell);
        let v = b.eval_at_root(ell, RootBranch::default()).unwrap();
        assert!(v.norm() < 1e-12);
        let pole = QScalar::one() / (QScalar::q() - QScalar::s_pow(-2));
        assert!(matches!(
            pole.eval_at_root(1, RootBranch::default()),
            Err(Error::Pole(_))
        ));
        let t = QScalar::var(Var::T(1));
        assert!(matches!(
            t.eval_at_root(3, RootBranch::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn weight_relation_reduction() {
        let w = QScalar::var(Var::W(1));
        let x = QScalar::var(Var::X(1));
        let two = QScalar::bracket_int(2);
        let rel = &w * &w - &(&two * &(&w * &x)) + &x * &x - QScalar::one();
        assert!(rel.reduce_weight_relation().unwrap().is_zero());
        let cubed = &x * &(&x * &x);
        let r = cubed.reduce_weight_relation().unwrap();
        assert!(r.num().degree(Var::X(1).slot()) <= 1);
    }

    #[test]
    fn symbolic_bracket_specializes() {
        let b = QScalar::bracket_sym(1, &br(-1, 1)).unwrap();
        let at = b.subst(Var::T(1), &QScalar::s_pow(6)).unwrap();
        assert_eq!(at, QScalar::bracket_int(2));
    }
}
