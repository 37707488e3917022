//! Sparse multivariate Laurent polynomials over the Gaussian rationals.
//!
//! Variable slots: `s` is slot 0, then `t1..t4`, `w1..w4`, `x1..x4`.
//! Monomials compare lexicographically on the exponent array, so `s` is the
//! most significant variable.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::gauss::GaussRat;

pub const NVARS: usize = 13;
pub const MAX_RANK: usize = 4;

pub type Mono = [i32; NVARS];

pub const ONE_MONO: Mono = [0; NVARS];

/// A named variable slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    S,
    /// `t_i = q^{lambda_i}` (1-based index).
    T(usize),
    /// abstract `m_i`
    W(usize),
    /// abstract `ñ_i`
    X(usize),
}

impl Var {
    pub fn slot(self) -> usize {
        match self {
            Var::S => 0,
            Var::T(i) => {
                assert!((1..=MAX_RANK).contains(&i), "t index out of range");
                i
            }
            Var::W(i) => {
                assert!((1..=MAX_RANK).contains(&i), "w index out of range");
                MAX_RANK + i
            }
            Var::X(i) => {
                assert!((1..=MAX_RANK).contains(&i), "x index out of range");
                2 * MAX_RANK + i
            }
        }
    }

    pub fn from_slot(slot: usize) -> Var {
        match slot {
            0 => Var::S,
            i if i <= MAX_RANK => Var::T(i),
            i if i <= 2 * MAX_RANK => Var::W(i - MAX_RANK),
            i => Var::X(i - 2 * MAX_RANK),
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::S => "s".into(),
            Var::T(i) => format!("t{i}"),
            Var::W(i) => format!("w{i}"),
            Var::X(i) => format!("x{i}"),
        }
    }

    pub fn parse(name: &str) -> Option<Var> {
        if name == "s" {
            return Some(Var::S);
        }
        let (head, idx) = name.split_at(1);
        let i: usize = idx.parse().ok()?;
        if !(1..=MAX_RANK).contains(&i) {
            return None;
        }
        match head {
            "t" => Some(Var::T(i)),
            "w" => Some(Var::W(i)),
            "x" => Some(Var::X(i)),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, GaussRat>,
}

fn mono_add(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] += b[i];
    }
    r
}

fn mono_sub(a: &Mono, b: &Mono) -> Mono {
    let mut r = *a;
    for i in 0..NVARS {
        r[i] -= b[i];
    }
    r
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(GaussRat::one())
    }

    pub fn constant(c: GaussRat) -> Self {
        Poly::monomial(ONE_MONO, c)
    }

    pub fn monomial(m: Mono, c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var_pow(v: Var, e: i32) -> Self {
        let mut m = ONE_MONO;
        m[v.slot()] = e;
        Poly::monomial(m, GaussRat::one())
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &GaussRat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<GaussRat> {
        match self.terms.len() {
            0 => Some(GaussRat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (*m == ONE_MONO).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Single term `c * x^m`, if it is one.
    pub fn as_monomial(&self) -> Option<(Mono, GaussRat)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((*m, c.clone()))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Mono, c: &GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c);
        }
        r
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, &-c);
        }
        r
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &GaussRat) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn shift(&self, by: &Mono) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (mono_add(m, by), c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return o.shift(m).scale(c);
        }
        if o.terms.len() == 1 {
            let (m, c) = o.terms.iter().next().unwrap();
            return self.shift(m).scale(c);
        }
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(mono_add(m1, m2), &(c1 * c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Lexicographically largest term.
    pub fn leading(&self) -> Option<(&Mono, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn min_exps(&self) -> Mono {
        let mut r = [i32::MAX; NVARS];
        for m in self.terms.keys() {
            for i in 0..NVARS {
                r[i] = r[i].min(m[i]);
            }
        }
        if self.terms.is_empty() {
            return ONE_MONO;
        }
        r
    }

    pub fn degree(&self, slot: usize) -> i32 {
        self.terms.keys().map(|m| m[slot]).max().unwrap_or(0)
    }

    pub fn uses_slot(&self, slot: usize) -> bool {
        self.terms.keys().any(|m| m[slot] != 0)
    }

    pub fn uses_var(&self, v: Var) -> bool {
        self.uses_slot(v.slot())
    }

    /// Shift so every variable has minimum exponent zero; returns the shift applied.
    pub fn to_nonneg(&self) -> (Poly, Mono) {
        let mn = self.min_exps();
        let neg = mono_sub(&ONE_MONO, &mn);
        (self.shift(&neg), mn)
    }

    /// Coefficients with respect to `slot`, as polynomials free of that slot.
    pub fn coeffs_in(&self, slot: usize) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut mm = *m;
            let e = mm[slot];
            mm[slot] = 0;
            out.entry(e).or_default().terms.insert(mm, c.clone());
        }
        out
    }

    fn coeff_at(&self, slot: usize, e: i32) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            if m[slot] == e {
                let mut mm = *m;
                mm[slot] = 0;
                r.terms.insert(mm, c.clone());
            }
        }
        r
    }

    /// Divide by the lexicographically leading coefficient.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) if !c.is_one() => {
                let inv = c.inv().expect("nonzero");
                self.scale(&inv)
            }
            _ => self.clone(),
        }
    }

    /// Exact division of polynomials with nonnegative exponents.
    pub fn exact_div(&self, b: &Poly) -> Option<Poly> {
        if b.is_zero() {
            return None;
        }
        if let Some((m, c)) = b.as_monomial() {
            let inv = c.inv().ok()?;
            let neg = mono_sub(&ONE_MONO, &m);
            let q = self.shift(&neg).scale(&inv);
            if q.terms.keys().any(|mm| mm.iter().any(|&e| e < 0)) {
                return None;
            }
            return Some(q);
        }
        let (bm, bc) = b.leading().map(|(m, c)| (*m, c.clone()))?;
        let binv = bc.inv().ok()?;
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading().map(|(m, c)| (*m, c.clone())) {
            let d = mono_sub(&rm, &bm);
            if d.iter().any(|&e| e < 0) {
                return None;
            }
            let k = &rc * &binv;
            q.add_term(d, &k);
            r = r.sub(&b.shift(&d).scale(&k));
        }
        Some(q)
    }

    /// Evaluate with the variable slots sent to complex numbers.
    pub fn eval_complex(&self, point: &[Complex64; NVARS]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for i in 0..NVARS {
                if m[i] != 0 {
                    t *= point[i].powi(m[i]);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn map_coeffs(&self, f: impl Fn(&GaussRat) -> GaussRat) -> Poly {
        let mut r = Poly::zero();
        for (m, c) in &self.terms {
            r.add_term(*m, &f(c));
        }
        r
    }
}

/// Greatest common divisor of two Laurent polynomials, up to units
/// (monomials and constants). The result has nonnegative exponents, minimum
/// exponent zero in every variable, and leading coefficient one.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.to_nonneg().0.monic();
    }
    if b.is_zero() {
        return a.to_nonneg().0.monic();
    }
    gcd_nonneg(&a.to_nonneg().0, &b.to_nonneg().0)
}

fn main_slot(a: &Poly, b: &Poly) -> Option<usize> {
    (0..NVARS).rev().find(|&i| a.uses_slot(i) || b.uses_slot(i))
}

fn gcd_nonneg(a: &Poly, b: &Poly) -> Poly {
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let Some(v) = main_slot(a, b) else {
        return Poly::one();
    };
    if !a.uses_slot(v) {
        return gcd_nonneg(a, &content(b, v));
    }
    if !b.uses_slot(v) {
        return gcd_nonneg(&content(a, v), b);
    }
    let ca = content(a, v);
    let cb = content(b, v);
    let g = gcd_nonneg(&ca, &cb);
    let mut p = a.exact_div(&ca).expect("content divides");
    let mut r = b.exact_div(&cb).expect("content divides");
    if p.degree(v) < r.degree(v) {
        std::mem::swap(&mut p, &mut r);
    }
    loop {
        let rem = prem(&p, &r, v);
        if rem.is_zero() {
            break;
        }
        if !rem.uses_slot(v) {
            return g;
        }
        p = r;
        r = primitive(&rem, v);
    }
    g.mul(&primitive(&r, v)).monic()
}

fn content(a: &Poly, v: usize) -> Poly {
    let mut g: Option<Poly> = None;
    for (_, c) in a.coeffs_in(v) {
        let c = c.to_nonneg().0;
        g = Some(match g {
            None => c.monic(),
            Some(g) => gcd_nonneg(&g, &c),
        });
        if g.as_ref().is_some_and(|g| g.is_one()) {
            break;
        }
    }
    g.unwrap_or_else(Poly::one)
}

fn primitive(a: &Poly, v: usize) -> Poly {
    let c = content(a, v);
    a.exact_div(&c)
        .expect("content divides")
        .to_nonneg()
        .0
        .monic()
}

/// Pseudo-remainder of `a` by `b` in the variable slot `v`.
fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree(v);
    let lb = b.coeff_at(v, db);
    let mut r = a.clone();
    while !r.is_zero() && r.degree(v) >= db {
        let dr = r.degree(v);
        let lr = r.coeff_at(v, dr);
        let mut sh = ONE_MONO;
        sh[v] = dr - db;
        r = r.mul(&lb).sub(&b.mul(&lr).shift(&sh));
    }
    r
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(e: i32) -> Poly {
        Poly::var_pow(Var::S, e)
    }

    fn t(e: i32) -> Poly {
        Poly::var_pow(Var::T(1), e)
    }

    fn c(n: i64) -> Poly {
        Poly::constant(GaussRat::from_int(n))
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = s(1).add(&c(1));
        let g = s(1).sub(&c(1));
        let h = s(2).add(&t(1)).add(&c(3));
        let a = f.mul(&h);
        let b = g.mul(&h).mul(&t(1).add(&c(2)));
        assert_eq!(gcd(&a, &b), h.monic());
    }

    #[test]
    fn gcd_coprime_is_one() {
        let a = s(2).add(&c(1));
        let b = s(1).add(&t(1));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_ignores_monomial_units() {
        let a = s(-3).mul(&s(2).sub(&c(1)));
        let b = s(5).mul(&s(1).sub(&c(1)));
        assert_eq!(gcd(&a, &b), s(1).sub(&c(1)));
    }

    #[test]
    fn exact_division() {
        let a = s(1).add(&t(1));
        let b = s(1).sub(&t(2)).add(&c(4));
        let p = a.mul(&b);
        assert_eq!(p.exact_div(&a).unwrap(), b);
        assert!(p.exact_div(&s(1).add(&c(7))).is_none());
    }
}
