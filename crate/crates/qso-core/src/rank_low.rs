//! Closed forms for ranks one and two: the sequences `m_j`, the
//! coefficients `α_{j-1,j}` of the so3 weight basis, the polynomials `P_n`,
//! the finite so3 quotients and the explicit so4 action on weight vectors.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{relation_residuals, Matrix};
use crate::qscalar::{rat_int, QScalar, Var};
use crate::ring::{Coeff, FromQScalar, QTwo};
use crate::verma::{ModuleVector, VermaModule};
use crate::weights::{FormalWeight, Kind};

/// A weight coordinate `λ`: either the formal `q^λ = t_i` or a value.
#[derive(Clone, Debug, PartialEq)]
pub enum Lam {
    Sym(usize),
    Val(BigRational),
}

fn q_minus_qinv() -> QScalar {
    &QScalar::s_pow(2) - &QScalar::s_pow(-2)
}

impl Lam {
    /// `q^{c λ + shift}`.
    pub fn q_pow(&self, c: i64, shift: &BigRational) -> Result<QScalar> {
        match self {
            Lam::Sym(i) => Ok(&QScalar::var_pow(Var::T(*i), c as i32) * &QScalar::q_pow(shift)?),
            Lam::Val(l) => QScalar::q_pow(&(l * rat_int(c) + shift)),
        }
    }

    fn pair(&self, c: i64, shift: &BigRational) -> Result<(QScalar, QScalar)> {
        Ok((self.q_pow(c, shift)?, self.q_pow(-c, &-shift)?))
    }

    /// `[c λ + shift]`
    pub fn bracket(&self, c: i64, shift: &BigRational) -> Result<QScalar> {
        let (a, b) = self.pair(c, shift)?;
        (&a - &b).checked_div(&q_minus_qinv())
    }

    /// `[c λ + shift]_+`
    pub fn bracket_plus(&self, c: i64, shift: &BigRational) -> Result<QScalar> {
        let (a, b) = self.pair(c, shift)?;
        (&(&a + &b) * &QScalar::i()).checked_div(&q_minus_qinv())
    }

    /// `{c λ + shift}`
    pub fn curly(&self, c: i64, shift: &BigRational) -> Result<QScalar> {
        let (a, b) = self.pair(c, shift)?;
        Ok(&a + &b)
    }

    /// `q^{c λ + shift} - q^{-c λ - shift}`
    pub fn curly_minus(&self, c: i64, shift: &BigRational) -> Result<QScalar> {
        let (a, b) = self.pair(c, shift)?;
        Ok(&a - &b)
    }

    /// The weight value `[λ + shift]` or `sign [λ + shift]_+`.
    pub fn weight_value(&self, kind: Kind, sign: i8, shift: &BigRational) -> Result<QScalar> {
        match kind {
            Kind::Classical => self.bracket(1, shift),
            Kind::Nonclassical => {
                let v = self.bracket_plus(1, shift)?;
                Ok(if sign < 0 { -v } else { v })
            }
        }
    }
}

/// `[x]` or `sign [x]_+` for a concrete coordinate.
pub fn weight_value(kind: Kind, sign: i8, x: &BigRational) -> Result<QScalar> {
    Lam::Val(x.clone()).weight_value(kind, sign, &BigRational::zero())
}

/// The sequence `m_{j+1} = [2] m_j - m_{j-1}` seeded by `m_0, m_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    pub m0: QScalar,
    pub m1: QScalar,
}

impl WeightSequence {
    pub fn new(m0: QScalar, m1: QScalar) -> Self {
        WeightSequence { m0, m1 }
    }

    /// Rejects seeds with `m_1^2 - [2] m_0 m_1 + m_0^2 != 1`.
    pub fn checked(m0: QScalar, m1: QScalar) -> Result<Self> {
        let ws = WeightSequence::new(m0, m1);
        if !ws.seed_residual().is_zero() {
            return Err(Error::Domain(
                "m_1 is not a root of x^2 - [2] m x + m^2 - 1".into(),
            ));
        }
        Ok(ws)
    }

    /// `m = [λ]`, `m_1 = [λ - 1]`, or the signed `[ ]_+` variant.
    pub fn standard(kind: Kind, lam: &Lam, sign: i8) -> Result<Self> {
        Ok(WeightSequence::new(
            lam.weight_value(kind, sign, &BigRational::zero())?,
            lam.weight_value(kind, sign, &-BigRational::one())?,
        ))
    }

    pub fn seed_residual(&self) -> QScalar {
        let two = QScalar::bracket_int(2);
        &(&(&self.m1 * &self.m1) - &(&(&two * &self.m0) * &self.m1))
            + &(&(&self.m0 * &self.m0) - &QScalar::one())
    }

    /// `m_j = [j] m_1 - [j-1] m_0`, any integer `j`.
    pub fn m(&self, j: i64) -> QScalar {
        &(&QScalar::bracket_int(j) * &self.m1) - &(&QScalar::bracket_int(j - 1) * &self.m0)
    }

    /// `α_{j-1,j}` for `j >= 1`.
    pub fn alpha(&self, j: i64) -> Result<QScalar> {
        if j < 1 {
            return Err(Error::Domain(format!("α_(j-1,j) needs j >= 1, got {j}")));
        }
        let num = &(&self.m0 * &self.m(-1)) - &(&self.m(j - 1) * &self.m(j));
        let den = &(&self.m(j - 1) - &self.m(j + 1)) * &(&self.m(j - 2) - &self.m(j));
        if den.is_zero() {
            return Err(Error::SingularWeight {
                j,
                detail: "vanishing denominator in α_(j-1,j)".into(),
            });
        }
        num.checked_div(&den)
    }

    /// `P_k` as coefficients by ascending degree:
    /// `P_0 = 1`, `P_1 = x`, `P_{n+1} = x P_n - α_{n-1,n} P_{n-1}`.
    pub fn p_polynomial(&self, k: usize) -> Result<Vec<QScalar>> {
        let mut prev = vec![QScalar::one()];
        if k == 0 {
            return Ok(prev);
        }
        let mut cur = vec![QScalar::zero(), QScalar::one()];
        for nn in 1..k {
            let a = self.alpha(nn as i64)?;
            let mut next = vec![QScalar::zero(); nn + 2];
            for (d, c) in cur.iter().enumerate() {
                next[d + 1] = &next[d + 1] + c;
            }
            for (d, c) in prev.iter().enumerate() {
                next[d] = &next[d] - &(&a * c);
            }
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }
}

/// Closed forms of `α_{j-1,j}` for `m = [λ]` (classical) and `m = ±[λ]_+`.
pub fn alpha_closed(kind: Kind, lam: &Lam, j: i64) -> Result<QScalar> {
    if j < 1 {
        return Err(Error::Domain(format!("α_(j-1,j) needs j >= 1, got {j}")));
    }
    let num = &lam.bracket(2, &rat_int(1 - j))? * &QScalar::bracket_int(j);
    let (a, b) = match kind {
        Kind::Classical => (lam.curly(1, &rat_int(-j))?, lam.curly(1, &rat_int(1 - j))?),
        Kind::Nonclassical => (
            lam.curly_minus(1, &rat_int(-j))?,
            lam.curly_minus(1, &rat_int(1 - j))?,
        ),
    };
    let den = &a * &b;
    if den.is_zero() {
        return Err(Error::SingularWeight {
            j,
            detail: "vanishing denominator in the closed form".into(),
        });
    }
    num.checked_div(&den)
}

/// The so3 weight basis `v_0, ..., v_{size-1}`: `B_1 v_j = m_j v_j`,
/// `B_2 v_j = v_{j+1} + α_{j-1,j} v_{j-1}`. Columns hold images.
#[derive(Clone, Debug)]
pub struct So3Rep {
    pub seq: WeightSequence,
    pub dim: usize,
    /// true when `α_{dim-1,dim} = 0`, so the span is a quotient module.
    pub finite: bool,
    /// `alphas[j-1] = α_{j-1,j}` for `j = 1..dim`.
    pub alphas: Vec<QScalar>,
    pub b1: Matrix<QScalar>,
    pub b2: Matrix<QScalar>,
}

impl So3Rep {
    pub fn weight_basis(seq: WeightSequence, size: usize) -> Result<Self> {
        let mut alphas = Vec::with_capacity(size);
        for j in 1..=size as i64 {
            alphas.push(seq.alpha(j)?);
        }
        So3Rep::from_alphas(seq, size, alphas)
    }

    fn from_alphas(seq: WeightSequence, size: usize, alphas: Vec<QScalar>) -> Result<Self> {
        let diag: Vec<QScalar> = (0..size as i64).map(|j| seq.m(j)).collect();
        let b1 = Matrix::diagonal(&diag);
        let mut b2 = Matrix::zeros(size, size);
        for j in 0..size {
            if j + 1 < size {
                b2.set(j + 1, j, QScalar::one());
            }
            if j >= 1 {
                b2.set(j - 1, j, alphas[j - 1].clone());
            }
        }
        let finite = alphas
            .get(size.saturating_sub(1))
            .is_some_and(|a| a.is_zero());
        Ok(So3Rep {
            seq,
            dim: size,
            finite,
            alphas,
            b1,
            b2,
        })
    }

    pub fn matrices(&self) -> Vec<Matrix<QScalar>> {
        vec![self.b1.clone(), self.b2.clone()]
    }

    /// Relation residuals restricted to the first `cols` columns; a cubic
    /// word moves at most three steps, so `cols <= dim - 3` is exact for
    /// truncations of the infinite module.
    pub fn relation_residuals(&self, cols: usize) -> Result<Vec<QScalar>> {
        let res = relation_residuals(&self.matrices(), &QScalar::bracket_int(2))?;
        let mut out = Vec::new();
        for (_, m) in res {
            for j in 0..cols.min(self.dim) {
                for i in 0..self.dim {
                    if !m.get(i, j).is_zero() {
                        out.push(m.get(i, j).clone());
                    }
                }
            }
        }
        Ok(out)
    }

    /// Squares `d_j^2 = prod_{i<j} α_{i,i+1}` of the diagonal conjugator
    /// making `B_2` symmetric.
    pub fn conjugator_squares(&self) -> Vec<QScalar> {
        let mut out = vec![QScalar::one()];
        for j in 1..self.dim {
            let next = &out[j - 1] * &self.alphas[j - 1];
            out.push(next);
        }
        out
    }

    /// Symmetrize at a numeric `s`: `w_j = v_j / d_j` with
    /// `d_{j+1} = d_j sqrt(α_{j,j+1})` (principal roots).
    pub fn symmetrize_at(&self, s: Complex64) -> Result<Symmetrized> {
        let mut d = vec![Complex64::new(1.0, 0.0)];
        let mut off = Vec::new();
        let mut flagged = Vec::new();
        for j in 1..self.dim {
            let a = self.alphas[j - 1].eval_s(s)?;
            if a.im.abs() > 1e-12 || a.re < 0.0 {
                flagged.push(j);
            }
            let r = a.sqrt();
            off.push(r);
            let next = d[j - 1] * r;
            d.push(next);
        }
        let b1 = self.b1.map(|x| x.eval_s(s))?;
        let mut b2 = Matrix::zeros(self.dim, self.dim);
        for (j, r) in off.iter().enumerate() {
            b2.set(j + 1, j, *r);
            b2.set(j, j + 1, *r);
        }
        Ok(Symmetrized {
            b1,
            b2,
            conjugator: d,
            flagged,
        })
    }
}

/// Numeric symmetric form of an so3 representation.
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub b1: Matrix<Complex64>,
    pub b2: Matrix<Complex64>,
    /// `v_j = d_j w_j`
    pub conjugator: Vec<Complex64>,
    /// Indices `j` with `α_{j-1,j}` not a nonnegative real.
    pub flagged: Vec<usize>,
}

/// A summand `L_±` of a nonclassical so3 quotient.
#[derive(Clone, Debug)]
pub struct So3Summand {
    pub sign: i8,
    /// Basis vectors `v_j ± c_j v_{2λ-j}` in the weight basis.
    pub basis: Vec<Vec<QScalar>>,
    pub b1: Matrix<QScalar>,
    pub b2: Matrix<QScalar>,
}

#[derive(Clone, Debug)]
pub struct So3Quotient {
    pub kind: Kind,
    pub lam: BigRational,
    pub sign: i8,
    pub rep: So3Rep,
    pub split: Vec<So3Summand>,
}

/// The `(2λ+1)`-dimensional quotient of the so3 Verma module with
/// `m = [λ]` (classical) or `m = sign [λ]_+` (nonclassical, `λ ∈ 1/2 + Z`),
/// with the splitting `L_+ ⊕ L_-` in the nonclassical case.
pub fn so3_finite_quotient(kind: Kind, lam: &BigRational, sign: i8) -> Result<So3Quotient> {
    if lam.is_negative() || !(lam * rat_int(2)).is_integer() {
        return Err(Error::Precondition(format!(
            "so3 quotient needs λ in (1/2)Z, λ >= 0; got {lam}"
        )));
    }
    if kind == Kind::Nonclassical && lam.is_integer() {
        return Err(Error::Precondition(format!(
            "nonclassical so3 quotient needs λ in 1/2 + Z; got {lam}"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain("sign must be +-1".into()));
    }
    let size = (lam * rat_int(2)).to_integer().to_usize().unwrap_or(0) + 1;
    let l = Lam::Val(lam.clone());
    let seq = WeightSequence::standard(kind, &l, sign)?;
    let mut alphas = Vec::with_capacity(size);
    for j in 1..=size as i64 {
        alphas.push(seq.alpha(j)?);
    }
    if !alphas[size - 1].is_zero() {
        return Err(Error::Domain(format!(
            "α_(2λ,2λ+1) does not vanish for λ = {lam}"
        )));
    }
    if let Some(j) = alphas[..size - 1].iter().position(|a| a.is_zero()) {
        return Err(Error::Domain(format!(
            "α_(j-1,j) vanishes early at j = {}",
            j + 1
        )));
    }
    let rep = So3Rep::from_alphas(seq, size, alphas)?;
    let split = if kind == Kind::Nonclassical {
        nonclassical_so3_split(&rep, lam)?
    } else {
        Vec::new()
    };
    Ok(So3Quotient {
        kind,
        lam: lam.clone(),
        sign,
        rep,
        split,
    })
}

/// Split the nonclassical quotient with `λ = r + 1/2`. In the symmetric
/// normalization `L_±` has basis `w_j ± w_{2λ-j}`; pulled back to the
/// weight basis this is `v_j ± c_j v_{2λ-j}` with
/// `c_j = 1 / (σ prod_{i=j}^{r-1} α_{i,i+1})` and `σ^2 = α_{r,r+1}`.
fn nonclassical_so3_split(rep: &So3Rep, lam: &BigRational) -> Result<Vec<So3Summand>> {
    let r = (lam - BigRational::new(1.into(), 2.into()))
        .to_integer()
        .to_usize()
        .unwrap_or(0);
    let dim = rep.dim;
    let sigma = (&QScalar::i() * &QScalar::bracket_int(r as i64 + 1))
        .checked_div(&(&QScalar::s_pow(1) - &QScalar::s_pow(-1)))?;
    if &sigma * &sigma != rep.alphas[r] {
        return Err(Error::Domain(
            "middle coefficient has no square root σ".into(),
        ));
    }
    let mut c = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let mut p = sigma.clone();
        for i in j..r {
            p = &p * &rep.alphas[i];
        }
        c.push(p.inv()?);
    }
    let mut out = Vec::new();
    for sign in [1i8, -1] {
        let basis: Vec<Vec<QScalar>> = (0..=r)
            .map(|j| {
                let mut v = vec![QScalar::zero(); dim];
                v[j] = QScalar::one();
                let cj = if sign > 0 { c[j].clone() } else { -&c[j] };
                v[dim - 1 - j] = &v[dim - 1 - j] + &cj;
                v
            })
            .collect();
        let b1 = rep.b1.restrict(&basis, 0.0)?;
        let b2 = rep.b2.restrict(&basis, 0.0)?;
        out.push(So3Summand {
            sign,
            basis,
            b1,
            b2,
        });
    }
    Ok(out)
}

/// The mixed basis of the Verma module with `m = [r]_+`, `r` a positive
/// integer: `v_0..v_r`, `v'_{r+j} = v_{r+j} + (prod_{i=1}^j α_{r-i,r-i+1}) v_{r-j}`
/// for `1 <= j <= r`, then `v_{2r+1}, ...`.
#[derive(Clone, Debug)]
pub struct IntegerNonclassical {
    pub r: usize,
    pub size: usize,
    pub b1: Matrix<QScalar>,
    pub b2: Matrix<QScalar>,
    /// `B_2 v_{2r+1} = v_{2r+2} - β v_0`
    pub beta: QScalar,
}

/// Computed for generic `λ` and specialized at `q^λ = q^r`; the poles of
/// the individual `α` cancel in the mixed basis.
pub fn so3_nonclassical_integer_vectors(r: i64) -> Result<IntegerNonclassical> {
    if r <= 0 {
        return Err(Error::Precondition(format!(
            "needs a positive integer r, got {r}"
        )));
    }
    let ru = r as usize;
    let size = 2 * ru + 3;
    let lam = Lam::Sym(1);
    let seq = WeightSequence::standard(Kind::Nonclassical, &lam, 1)?;
    let generic = So3Rep::weight_basis(seq, size)?;
    let mut prods = vec![QScalar::one()];
    for j in 1..=ru {
        let p = &prods[j - 1] * &generic.alphas[ru - j];
        prods.push(p);
    }
    // C has columns v'_{r+j}; (C - 1)^2 = 0, so C^{-1} = 2 - C.
    let mut cm = Matrix::<QScalar>::identity(size);
    let mut cinv = Matrix::<QScalar>::identity(size);
    for j in 1..=ru {
        cm.set(ru - j, ru + j, prods[j].clone());
        cinv.set(ru - j, ru + j, -&prods[j]);
    }
    let b2 = cinv.mul(&generic.b2)?.mul(&cm)?;
    let b1 = cinv.mul(&generic.b1)?.mul(&cm)?;
    let at = QScalar::q_pow(&rat_int(r))?;
    let spec = |m: &Matrix<QScalar>| m.map(|x| x.subst(Var::T(1), &at));
    let b2 = spec(&b2)?;
    let b1 = spec(&b1)?;
    let beta = -b2.get(0, 2 * ru + 1);
    Ok(IntegerNonclassical {
        r: ru,
        size,
        b1,
        b2,
        beta,
    })
}

/// so4 weight vectors `v_μ`, `μ = λ - r_1 α_1 - r_2 α_2`, keyed by `(r_1, r_2)`.
pub type So4Vector = BTreeMap<(u32, u32), QScalar>;

/// The so4 Verma module in its weight basis.
#[derive(Clone, Debug)]
pub struct So4Rep {
    pub kind: Kind,
    pub lam: [Lam; 2],
    pub signs: [i8; 2],
}

impl So4Rep {
    /// `λ` given by the formal variables `t_1, t_2`.
    pub fn symbolic(kind: Kind, signs: [i8; 2]) -> Self {
        So4Rep {
            kind,
            lam: [Lam::Sym(1), Lam::Sym(2)],
            signs,
        }
    }

    pub fn concrete(lam: &FormalWeight) -> Result<Self> {
        if lam.rank() != 2 {
            return Err(Error::Domain("so4 weights have two coordinates".into()));
        }
        Ok(So4Rep {
            kind: lam.kind,
            lam: [
                Lam::Val(lam.coords[0].clone()),
                Lam::Val(lam.coords[1].clone()),
            ],
            signs: [lam.signs[0], lam.signs[1]],
        })
    }

    /// `μ - λ` for the index `(r_1, r_2)`.
    pub fn mu_shift(r1: u32, r2: u32) -> (BigRational, BigRational) {
        let (a, b) = (r1 as i64, r2 as i64);
        (rat_int(-a - b), rat_int(a - b))
    }

    fn curl(&self, i: usize, shift: &BigRational) -> Result<QScalar> {
        match self.kind {
            Kind::Classical => self.lam[i].curly(1, shift),
            Kind::Nonclassical => self.lam[i].curly_minus(1, shift),
        }
    }

    /// Eigenvalues of `B_1` and `B_3` on `v_μ`.
    pub fn cartan(&self, r1: u32, r2: u32) -> Result<(QScalar, QScalar)> {
        let (d1, d2) = So4Rep::mu_shift(r1, r2);
        Ok((
            self.lam[0].weight_value(self.kind, self.signs[0], &d1)?,
            self.lam[1].weight_value(self.kind, self.signs[1], &d2)?,
        ))
    }

    fn denominator(&self, r1: u32, r2: u32) -> Result<(QScalar, QScalar)> {
        let (d1, d2) = So4Rep::mu_shift(r1, r2);
        let c1 = self.curl(0, &d1)?;
        let c1p = self.curl(0, &(&d1 + rat_int(1)))?;
        let c2 = self.curl(1, &d2)?;
        if c1.is_zero() || c1p.is_zero() || c2.is_zero() {
            return Err(Error::SingularWeight {
                j: (r1 + r2) as i64,
                detail: format!("so4 denominator vanishes at (r1, r2) = ({r1}, {r2})"),
            });
        }
        Ok((&(&c1 * &c1p) * &c2, c2))
    }

    /// `(a_{μ,α_1}, a_{μ,α_2})`: coefficients of `v_{μ+α_1}`, `v_{μ+α_2}` in `B_2 v_μ`.
    pub fn raising(&self, r1: u32, r2: u32) -> Result<(QScalar, QScalar)> {
        let (den, _) = self.denominator(r1, r2)?;
        let (a, b) = (r1 as i64, r2 as i64);
        let n1 = &(&(&self.curl(0, &rat_int(1 - a))? * &self.curl(1, &rat_int(a))?)
            * &QScalar::bracket_int(a))
            * &self.lam_diff_bracket(-1, 1 - a)?;
        let n2 = &(&(&self.curl(0, &rat_int(1 - b))? * &self.curl(1, &rat_int(-b))?)
            * &QScalar::bracket_int(b))
            * &self.lam_diff_bracket(1, 1 - b)?;
        let mut a1 = n1.checked_div(&den)?;
        let a2 = -n2.checked_div(&den)?;
        if self.kind == Kind::Nonclassical {
            a1 = -a1;
        }
        Ok((a1, a2))
    }

    /// `[λ_1 + c λ_2 + shift]`
    fn lam_diff_bracket(&self, c: i64, shift: i64) -> Result<QScalar> {
        let a = &self.lam[0].q_pow(1, &rat_int(shift))?
            * &self.lam[1].q_pow(c, &BigRational::zero())?;
        let b = &self.lam[0].q_pow(-1, &rat_int(-shift))?
            * &self.lam[1].q_pow(-c, &BigRational::zero())?;
        (&a - &b).checked_div(&q_minus_qinv())
    }

    /// Coefficient `1/{μ_2}` of `v_{μ-α_1}` (and minus that of `v_{μ-α_2}`).
    pub fn lowering(&self, r1: u32, r2: u32) -> Result<QScalar> {
        let (_, c2) = self.denominator(r1, r2)?;
        c2.inv()
    }

    pub fn act_basis(&self, gen: u8, r1: u32, r2: u32) -> Result<So4Vector> {
        let mut out = So4Vector::new();
        match gen {
            1 | 3 => {
                let (e1, e3) = self.cartan(r1, r2)?;
                out.insert((r1, r2), if gen == 1 { e1 } else { e3 });
            }
            2 => {
                let (a1, a2) = self.raising(r1, r2)?;
                let low = self.lowering(r1, r2)?;
                if r1 > 0 {
                    out.insert((r1 - 1, r2), a1);
                }
                if r2 > 0 {
                    out.insert((r1, r2 - 1), a2);
                }
                out.insert((r1 + 1, r2), low.clone());
                out.insert((r1, r2 + 1), -low);
            }
            _ => return Err(Error::Domain(format!("so4 has no generator B{gen}"))),
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn act(&self, gen: u8, v: &So4Vector) -> Result<So4Vector> {
        let mut out = So4Vector::new();
        for (&(r1, r2), c) in v {
            for (k, x) in self.act_basis(gen, r1, r2)? {
                let e = out.entry(k).or_insert_with(QScalar::zero);
                *e = &*e + &(c * &x);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn apply(&self, word: &[u8], v: &So4Vector) -> Result<So4Vector> {
        let mut cur = v.clone();
        for &g in word.iter().rev() {
            cur = self.act(g, &cur)?;
        }
        Ok(cur)
    }

    /// Every defining relation applied to `v_μ`; all entries must vanish.
    pub fn relation_residuals(&self, r1: u32, r2: u32) -> Result<Vec<So4Vector>> {
        let two = QScalar::bracket_int(2);
        let mut v = So4Vector::new();
        v.insert((r1, r2), QScalar::one());
        let mut out = Vec::new();
        for (i, j) in [(1u8, 2u8), (2, 1), (3, 2), (2, 3)] {
            let mut acc = self.apply(&[i, i, j], &v)?;
            add_into(&mut acc, &self.apply(&[i, j, i], &v)?, &-&two);
            add_into(&mut acc, &self.apply(&[j, i, i], &v)?, &QScalar::one());
            add_into(&mut acc, &self.apply(&[j], &v)?, &-QScalar::one());
            out.push(acc);
        }
        let mut acc = self.apply(&[1, 3], &v)?;
        add_into(&mut acc, &self.apply(&[3, 1], &v)?, &-QScalar::one());
        out.push(acc);
        Ok(out)
    }

    /// Matrices of `B_1, B_2, B_3` on the window `r_1 <= r1max`, `r_2 <= r2max`,
    /// dropping images outside the window.
    pub fn window(
        &self,
        r1max: u32,
        r2max: u32,
    ) -> Result<(Vec<(u32, u32)>, Vec<Matrix<QScalar>>)> {
        let idx: Vec<(u32, u32)> = (0..=r1max)
            .flat_map(|a| (0..=r2max).map(move |b| (a, b)))
            .collect();
        let pos: BTreeMap<(u32, u32), usize> =
            idx.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let d = idx.len();
        let mut mats = Vec::new();
        for g in 1..=3u8 {
            let mut m = Matrix::zeros(d, d);
            for (col, &(a, b)) in idx.iter().enumerate() {
                for (k, x) in self.act_basis(g, a, b)? {
                    if let Some(&row) = pos.get(&k) {
                        m.set(row, col, x);
                    }
                }
            }
            mats.push(m);
        }
        Ok((idx, mats))
    }
}

fn add_into(acc: &mut So4Vector, v: &So4Vector, c: &QScalar) {
    for (k, x) in v {
        let e = acc.entry(*k).or_insert_with(QScalar::zero);
        *e = &*e + &(c * x);
    }
    acc.retain(|_, c| !c.is_zero());
}

/// The vector `v_{s_i.λ}` of a standard Verma module of `so_n`, built in
/// the rank-two (or rank-one) subalgebra attached to the simple root `α_i`
/// (1-based). Returns the vector and its number of factors.
pub fn reflection_vector<C: QTwo + FromQScalar>(
    verma: &mut VermaModule<C>,
    s: &C,
    lam: &FormalWeight,
    i: usize,
) -> Result<ModuleVector<C>> {
    let n = verma.n();
    let k = n / 2;
    if lam.rank() != k || i == 0 || i > k {
        return Err(Error::Domain(format!("no simple root α_{i} for so_{n}")));
    }
    let sp = |x: &QScalar| C::specialize(x, s);
    let val =
        |c: usize, x: BigRational| -> Result<C> { sp(&weight_value(lam.kind, lam.signs[c], &x)?) };
    let degree = |x: BigRational| -> Result<usize> {
        if !x.is_integer() || x.is_negative() {
            return Err(Error::Precondition(format!(
                "(λ, α_{i}) + 1 = {x} is not a positive integer"
            )));
        }
        Ok(x.to_integer().to_usize().unwrap_or(0))
    };
    let mut v = verma.highest_vector();
    if n % 2 == 1 && i == k {
        // so3 pair (B_{n-2}, B_{n-1}): P_{2λ_k+1}(B_{n-1}) v_0.
        let deg = degree(&lam.coords[k - 1] * rat_int(2) + rat_int(1))?;
        let l = Lam::Val(lam.coords[k - 1].clone());
        let seq = WeightSequence::standard(lam.kind, &l, lam.signs[k - 1])?;
        let p = seq.p_polynomial(deg)?;
        let g = (n - 1) as u8;
        let mut acc = ModuleVector::<C>::zero();
        let mut power = v.clone();
        for (d, c) in p.iter().enumerate() {
            if d > 0 {
                power = verma.act(g, &power)?;
            }
            if !c.is_zero() {
                acc = acc.add(&power.scale(&sp(c)?));
            }
        }
        return Ok(acc);
    }
    let (even, odd, deg, plus) = if n.is_multiple_of(2) && i == k {
        let d = degree(&lam.coords[k - 2] + &lam.coords[k - 1] + rat_int(1))?;
        ((n - 2) as u8, (n - 1) as u8, d, false)
    } else {
        let d = degree(&lam.coords[i - 1] - &lam.coords[i] + rat_int(1))?;
        ((2 * i) as u8, (2 * i + 1) as u8, d, true)
    };
    let target = if plus { i } else { k - 1 };
    for r in 1..=deg as i64 {
        let shift = if plus { rat_int(r - 2) } else { rat_int(2 - r) };
        let c = val(target, &lam.coords[target] + shift)?;
        let w = verma.act(even, &v)?;
        v = verma.act(odd, &w)?.sub(&w.scale(&c));
    }
    Ok(v)
}

/// `v_{s_i.λ}` for so4 (`i ∈ {1, 2}`), in the even-factor Verma basis.
pub fn so4_highest_weight_vector<C: QTwo + FromQScalar>(
    verma: &mut VermaModule<C>,
    s: &C,
    lam: &FormalWeight,
    i: usize,
) -> Result<ModuleVector<C>> {
    if verma.n() != 4 {
        return Err(Error::Domain(
            "so4_highest_weight_vector needs n = 4".into(),
        ));
    }
    reflection_vector(verma, s, lam, i)
}

/// `(tr B_1, tr B_2)` of a module given by its generator matrices.
pub fn trace_signature<C: Coeff>(b1: &Matrix<C>, b2: &Matrix<C>) -> (C, C) {
    (b1.trace(), b2.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, GaussRat};
    use crate::verma::HighestWeightData;
    use crate::weights::dot_action;
    use crate::weights::WeylElement;

    #[test]
    fn sequence_examples() {
        let l = Lam::Sym(1);
        let ws = WeightSequence::standard(Kind::Classical, &l, 1).unwrap();
        assert!(ws.seed_residual().is_zero());
        for j in -3..6 {
            assert_eq!(ws.m(j), QScalar::bracket_sym(1, &rat_int(-j)).unwrap());
        }
        let wp = WeightSequence::standard(Kind::Nonclassical, &l, 1).unwrap();
        for j in -2..5 {
            assert_eq!(wp.m(j), QScalar::bracket_plus_sym(1, &rat_int(-j)).unwrap());
        }
        // m_{-1} = [k+2] m_k - [k+1] m_{k+1} at k = 0
        let alt = &(&QScalar::bracket_int(2) * &ws.m0) - &ws.m1;
        assert_eq!(ws.m(-1), alt);
    }

    #[test]
    fn alpha_seed_and_classical_one() {
        let ws = WeightSequence::standard(Kind::Classical, &Lam::Val(rat_int(1)), 1).unwrap();
        let a01 = ws.alpha(1).unwrap();
        assert_eq!(a01, ws.m0.checked_div(&(&ws.m0 - &ws.m(2))).unwrap());
        assert_eq!(a01, QScalar::from_ratio(1, 2));
        assert!(ws.alpha(3).unwrap().is_zero());
        assert!(ws.alpha(0).is_err());
    }

    #[test]
    fn alpha_recursion() {
        let ws = WeightSequence::standard(Kind::Classical, &Lam::Sym(1), 1).unwrap();
        for j in 1..6i64 {
            let lhs = &(&ws.m(j + 2) - &ws.m(j)) * &ws.alpha(j + 1).unwrap();
            let rhs = &(&(&ws.m(j) - &ws.m(j - 2)) * &ws.alpha(j).unwrap()) - &ws.m(j);
            assert_eq!(lhs, rhs, "j = {j}");
        }
    }

    #[test]
    fn closed_form_small() {
        for kind in [Kind::Classical, Kind::Nonclassical] {
            let ws = WeightSequence::standard(kind, &Lam::Sym(1), 1).unwrap();
            for j in 1..4 {
                assert_eq!(
                    alpha_closed(kind, &Lam::Sym(1), j).unwrap(),
                    ws.alpha(j).unwrap()
                );
            }
        }
        assert!(alpha_closed(Kind::Classical, &Lam::Sym(1), 0).is_err());
    }

    #[test]
    fn p_polynomial_gives_weight_vectors() {
        let q = so3_finite_quotient(Kind::Classical, &rat_int(1), 1).unwrap();
        let p2 = q.rep.seq.p_polynomial(2).unwrap();
        assert_eq!(p2, vec![-&q.rep.alphas[0], QScalar::zero(), QScalar::one()]);
        let b2 = &q.rep.b2;
        let b2sq = b2.mul(b2).unwrap();
        let e0 = vec![QScalar::one(), QScalar::zero(), QScalar::zero()];
        let v2: Vec<QScalar> = b2sq
            .mul_vec(&e0)
            .iter()
            .zip(&e0)
            .map(|(a, b)| a + &(&p2[0] * b))
            .collect();
        assert_eq!(v2, vec![QScalar::zero(), QScalar::zero(), QScalar::one()]);
    }

    #[test]
    fn so3_quotients() {
        let q = so3_finite_quotient(Kind::Classical, &rat_int(1), 1).unwrap();
        assert_eq!(q.rep.dim, 3);
        assert_eq!(
            q.rep.b1,
            Matrix::diagonal(&[QScalar::one(), QScalar::zero(), -QScalar::one()])
        );
        assert!(q.rep.relation_residuals(3).unwrap().is_empty());
        let z = so3_finite_quotient(Kind::Classical, &rat_int(0), 1).unwrap();
        assert_eq!(z.rep.dim, 1);
        assert!(z.rep.b1.is_zero() && z.rep.b2.is_zero());
        let nc = so3_finite_quotient(Kind::Nonclassical, &rat(5, 2), -1).unwrap();
        assert_eq!(nc.rep.dim, 6);
        assert!(nc.rep.relation_residuals(6).unwrap().is_empty());
        assert_eq!(nc.split.len(), 2);
        for part in &nc.split {
            assert_eq!(part.b1.rows(), 3);
            let res = relation_residuals(
                &[part.b1.clone(), part.b2.clone()],
                &QScalar::bracket_int(2),
            )
            .unwrap();
            assert!(res.iter().all(|(_, m)| m.is_zero()));
        }
        let t0 = nc.split[0].b2.trace();
        let t1 = nc.split[1].b2.trace();
        assert_eq!(t0, -&t1);
        assert!(!t0.is_zero());
        assert!(so3_finite_quotient(Kind::Nonclassical, &rat_int(2), 1).is_err());
    }

    #[test]
    fn symmetrize_keeps_b1_and_squares() {
        let q = so3_finite_quotient(Kind::Classical, &rat_int(1), 1).unwrap();
        let s = Complex64::new(1.3, 0.0);
        let sym = q.rep.symmetrize_at(s).unwrap();
        assert!(sym.flagged.is_empty());
        let b2 = q.rep.b2.map(|x| x.eval_s(s)).unwrap();
        let lhs = b2.mul(&b2).unwrap();
        let rhs = sym.b2.mul(&sym.b2).unwrap();
        for i in 0..3 {
            assert!((lhs.get(i, i) - rhs.get(i, i)).norm() < 1e-12);
        }
        assert_eq!(sym.b2.get(0, 1), sym.b2.get(1, 0));
        assert!((sym.b2.get(0, 1).re - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn integer_nonclassical_vectors() {
        for r in 1..=2 {
            let iv = so3_nonclassical_integer_vectors(r).unwrap();
            let ru = iv.r;
            assert!(!iv.beta.is_zero());
            // B_2 v_r = v'_{r+1}
            for i in 0..iv.size {
                let expect = if i == ru + 1 {
                    QScalar::one()
                } else {
                    QScalar::zero()
                };
                assert_eq!(iv.b2.get(i, ru), &expect);
            }
            assert!(iv.b2.get(2 * ru + 2, 2 * ru + 1).is_one());
        }
        assert!(so3_nonclassical_integer_vectors(0).is_err());
    }

    #[test]
    fn so4_lowest_examples() {
        let rep = So4Rep::symbolic(Kind::Classical, [1, 1]);
        let v = rep.act_basis(2, 0, 0).unwrap();
        let low = QScalar::curly_sym(2, &rat_int(0)).unwrap().inv().unwrap();
        assert_eq!(v.get(&(1, 0)), Some(&low));
        assert_eq!(v.get(&(0, 1)), Some(&-&low));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn so4_relations_small_window() {
        for (kind, signs) in [(Kind::Classical, [1, 1]), (Kind::Nonclassical, [1, -1])] {
            let rep = So4Rep::symbolic(kind, signs);
            for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                for res in rep.relation_residuals(a, b).unwrap() {
                    assert!(res.is_empty(), "{kind} ({a},{b}): {res:?}");
                }
            }
        }
    }

    #[test]
    fn so4_highest_weight_vectors_at_two() {
        let lam = FormalWeight::classical(vec![rat_int(1), rat_int(0)]);
        let s = GaussRat::from_int(2);
        let hw = HighestWeightData::standard(4, &lam)
            .unwrap()
            .specialize(&s)
            .unwrap();
        let mut vm = VermaModule::new(hw, &s).unwrap();
        for i in 1..=2 {
            let v = so4_highest_weight_vector(&mut vm, &s, &lam, i).unwrap();
            assert!(!v.is_zero());
            let w = dot_action(&WeylElement::simple_reflection(4, i).unwrap(), &lam).unwrap();
            let m = w.q_weight().unwrap();
            let nt = w.standard_ntilde().unwrap();
            for (j, odd) in [1u8, 3].iter().enumerate() {
                let e = m[j].eval_exact(&s).unwrap();
                assert_eq!(vm.act(*odd, &v).unwrap(), v.scale(&e));
            }
            let b2v = vm.act(2, &v).unwrap();
            let e = nt[0].eval_exact(&s).unwrap();
            assert_eq!(vm.act(1, &b2v).unwrap(), b2v.scale(&e));
        }
    }
}
