//! Verma modules `V_{m,ñ}`: the quotient of the algebra by the left ideal
//! generated by `B_{2i-1} - m_i` and `B_{2i-1} B_{2i} - ñ_i B_{2i}`.
//!
//! Vectors are linear combinations of ordered products whose factors
//! `B_{k,r}` all have even `r`. The generator action is computed by
//! reducing `B_a b` in the algebra and then clearing every factor with odd
//! `r` against the ideal, working from the right.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::freealg::{bnk, compare, factors, AlgebraElement, NormalMonomial, Rewriter, Word};
use crate::linalg::Matrix;
use crate::qscalar::{GaussRat, QScalar, Var};
use crate::ring::{Coeff, FromQScalar, QTwo};
use crate::weights::{FormalWeight, Kind};

/// Vector in a Verma module, keyed by ordered products with even factors.
pub type ModuleVector<C> = AlgebraElement<C>;

/// Per-generator caps: at most `caps[i]` occurrences of `B_{2i+2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation(pub Vec<u32>);

impl Truncation {
    pub fn uniform(n: usize, cap: u32) -> Self {
        Truncation(vec![cap; (n - 1) / 2])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HighestWeightData<C> {
    pub n: usize,
    pub m: Vec<C>,
    pub ntilde: Vec<C>,
    pub weight: Option<FormalWeight>,
    pub standard: bool,
}

fn counts(n: usize) -> (usize, usize) {
    (n / 2, (n - 1) / 2)
}

impl<C: Coeff> HighestWeightData<C> {
    pub fn new(n: usize, m: Vec<C>, ntilde: Vec<C>) -> Result<Self> {
        let (km, kn) = counts(n);
        if n < 3 || m.len() != km || ntilde.len() != kn {
            return Err(Error::Domain(format!(
                "so_{n} needs {km} values m_i and {kn} values ñ_i"
            )));
        }
        Ok(HighestWeightData {
            n,
            m,
            ntilde,
            weight: None,
            standard: false,
        })
    }
}

impl HighestWeightData<QScalar> {
    /// Abstract `m_i = w_i`, `ñ_i = x_i`.
    pub fn abstract_weights(n: usize) -> Result<Self> {
        let (km, kn) = counts(n);
        HighestWeightData::new(
            n,
            (1..=km).map(|i| QScalar::var(Var::W(i))).collect(),
            (1..=kn).map(|i| QScalar::var(Var::X(i))).collect(),
        )
    }

    /// `m_i = [lambda_i]`, `ñ_i = [lambda_i - 1]` (or the `[ ]_+` variants
    /// with signs) for a given weight, without dominance requirements.
    pub fn from_weight(n: usize, lam: &FormalWeight) -> Result<Self> {
        let (_, kn) = counts(n);
        if lam.rank() != n / 2 {
            return Err(Error::Domain("weight rank does not match n".into()));
        }
        let m = lam.q_weight()?;
        let mut nt = lam.standard_ntilde()?;
        nt.truncate(kn);
        let mut hw = HighestWeightData::new(n, m, nt)?;
        hw.weight = Some(lam.clone());
        Ok(hw)
    }

    /// Standard Verma module of a regularly dominant weight.
    pub fn standard(n: usize, lam: &FormalWeight) -> Result<Self> {
        if !lam.is_regularly_dominant(n) {
            return Err(Error::Precondition(format!(
                "{lam} is not regularly dominant for so_{n}"
            )));
        }
        let mut hw = Self::from_weight(n, lam)?;
        hw.standard = true;
        Ok(hw)
    }

    /// Weight with coordinates `q^{lambda_i} = t_i`.
    pub fn symbolic_weight(n: usize, kind: Kind, signs: &[i8]) -> Result<Self> {
        let (km, kn) = counts(n);
        let zero = num_rational::BigRational::from_integer(0.into());
        let mone = num_rational::BigRational::from_integer((-1).into());
        let mut m = Vec::new();
        let mut nt = Vec::new();
        for i in 1..=km {
            let sg = signs.get(i - 1).copied().unwrap_or(1);
            let (a, b) = match kind {
                Kind::Classical => (
                    QScalar::bracket_sym(i, &zero)?,
                    QScalar::bracket_sym(i, &mone)?,
                ),
                Kind::Nonclassical => (
                    QScalar::bracket_plus_sym(i, &zero)?,
                    QScalar::bracket_plus_sym(i, &mone)?,
                ),
            };
            let f = if sg < 0 {
                -QScalar::one()
            } else {
                QScalar::one()
            };
            m.push(&a * &f);
            if i <= kn {
                nt.push(&b * &f);
            }
        }
        HighestWeightData::new(n, m, nt)
    }

    /// `m_i^2 - [2] m_i ñ_i + ñ_i^2 - 1` for each `i`; all zero when the
    /// basis theorem applies.
    pub fn basis_condition(&self) -> Vec<QScalar> {
        let two = QScalar::bracket_int(2);
        self.m
            .iter()
            .zip(&self.ntilde)
            .map(|(m, t)| m * m - &two * &(m * t) + t * t - QScalar::one())
            .collect()
    }

    pub fn specialize<D: FromQScalar>(&self, s: &D) -> Result<HighestWeightData<D>> {
        Ok(HighestWeightData {
            n: self.n,
            m: self
                .m
                .iter()
                .map(|x| D::specialize(x, s))
                .collect::<Result<_>>()?,
            ntilde: self
                .ntilde
                .iter()
                .map(|x| D::specialize(x, s))
                .collect::<Result<_>>()?,
            weight: self.weight.clone(),
            standard: self.standard,
        })
    }
}

type Key = (u8, u8, Word);

/// A Verma module over a coefficient ring, with memoized action.
pub struct VermaModule<C: Coeff> {
    hw: HighestWeightData<C>,
    rw: Rewriter<C>,
    act_memo: HashMap<(u8, Word), Arc<ModuleVector<C>>>,
    t_memo: HashMap<Key, Arc<ModuleVector<C>>>,
    busy: HashSet<Key>,
}

impl<C: QTwo> VermaModule<C> {
    /// `s` is the value of `q^{1/2}` in the ring (the variable itself for
    /// symbolic scalars).
    pub fn new(hw: HighestWeightData<C>, s: &C) -> Result<Self> {
        let two = C::q_two(s)?;
        Ok(VermaModule {
            rw: Rewriter::new(hw.n, two)?,
            hw,
            act_memo: HashMap::new(),
            t_memo: HashMap::new(),
            busy: HashSet::new(),
        })
    }
}

impl<C: Coeff> VermaModule<C> {
    pub fn n(&self) -> usize {
        self.hw.n
    }

    pub fn highest_weight(&self) -> &HighestWeightData<C> {
        &self.hw
    }

    pub fn rewriter(&mut self) -> &mut Rewriter<C> {
        &mut self.rw
    }

    fn two(&self) -> C {
        self.rw.two().clone()
    }

    /// `B_a` applied to a basis word.
    pub fn act_basis(&mut self, a: u8, b: &Word) -> Result<Arc<ModuleVector<C>>> {
        let key = (a, b.clone());
        if let Some(v) = self.act_memo.get(&key) {
            return Ok(v.clone());
        }
        let mut u = vec![a];
        u.extend_from_slice(&b.0);
        let v = Arc::new(self.ideal_reduce(&u)?);
        self.act_memo.insert(key, v.clone());
        Ok(v)
    }

    pub fn act(&mut self, a: u8, v: &ModuleVector<C>) -> Result<ModuleVector<C>> {
        if a == 0 || a as usize >= self.hw.n {
            return Err(Error::Domain(format!(
                "no generator B_{a} in so_{}",
                self.hw.n
            )));
        }
        let mut out = ModuleVector::zero();
        for (b, c) in v.terms() {
            let img = self.act_basis(a, b)?;
            for (w, cw) in img.terms() {
                out.add_term(w.clone(), &c.mul(cw));
            }
        }
        Ok(out)
    }

    /// Apply a word (rightmost letter first).
    pub fn apply_word(&mut self, letters: &[u8], v: &ModuleVector<C>) -> Result<ModuleVector<C>> {
        let mut v = v.clone();
        for &a in letters.iter().rev() {
            v = self.act(a, &v)?;
        }
        Ok(v)
    }

    pub fn apply_element(
        &mut self,
        e: &AlgebraElement<C>,
        v: &ModuleVector<C>,
    ) -> Result<ModuleVector<C>> {
        let mut out = ModuleVector::zero();
        for (w, c) in e.terms() {
            let img = self.apply_word(&w.0, v)?;
            out = out.add(&img.scale(c));
        }
        Ok(out)
    }

    pub fn highest_vector(&self) -> ModuleVector<C> {
        ModuleVector::one()
    }

    /// Image of a word applied to the highest weight vector.
    pub fn ideal_reduce(&mut self, u: &[u8]) -> Result<ModuleVector<C>> {
        let nf = self.rw.normal_form_word(u)?;
        let mut out = ModuleVector::zero();
        for (w, c) in nf.terms() {
            let fs = factors(&w.0);
            let Some(idx) = fs.iter().rposition(|f| f.1 % 2 == 1) else {
                out.add_term(w.clone(), c);
                continue;
            };
            let (t, l, st) = fs[idx];
            let mut pre: Vec<u8> = w.0[..st].to_vec();
            pre.extend((l + 1..=t).rev());
            let y_start = st + (t - l) as usize + 1;
            let y = Word(w.0[y_start..].to_vec());
            let base = self.t1(l, &y)?;
            let img = self.apply_word(&pre, &base)?;
            for (w2, c2) in img.terms() {
                out.add_term(w2.clone(), &c.mul(c2));
            }
        }
        Ok(out)
    }

    pub fn reduce_element(&mut self, e: &AlgebraElement<C>) -> Result<ModuleVector<C>> {
        let mut out = ModuleVector::zero();
        for (w, c) in e.terms() {
            let img = self.ideal_reduce(&w.0)?;
            out = out.add(&img.scale(c));
        }
        Ok(out)
    }

    fn enter(&mut self, key: &Key) -> Result<Option<Arc<ModuleVector<C>>>> {
        if let Some(v) = self.t_memo.get(key) {
            return Ok(Some(v.clone()));
        }
        if !self.busy.insert(key.clone()) {
            return Err(Error::Domain(format!(
                "module reduction cycles at B_{} on {}",
                key.1, key.2
            )));
        }
        Ok(None)
    }

    fn leave(&mut self, key: Key, v: ModuleVector<C>) -> Arc<ModuleVector<C>> {
        self.busy.remove(&key);
        let v = Arc::new(v);
        self.t_memo.insert(key, v.clone());
        v
    }

    fn first_factor(y: &Word) -> (u8, u8, Word) {
        let fs = factors(&y.0);
        let (t, k, _) = fs[0];
        let rest = Word(y.0[(t - k) as usize + 1..].to_vec());
        (t + 1, k, rest)
    }

    fn combine(&mut self, parts: Vec<(Vec<u8>, C, ModuleVector<C>)>) -> Result<ModuleVector<C>> {
        let mut out = ModuleVector::zero();
        for (word, c, v) in parts {
            let img = self.apply_word(&word, &v)?;
            out = out.add(&img.scale(&c));
        }
        Ok(out)
    }

    /// `B_r Y 1` for odd `r` and a basis word `Y`.
    fn t1(&mut self, r: u8, y: &Word) -> Result<ModuleVector<C>> {
        let key = (1, r, y.clone());
        if let Some(v) = self.enter(&key)? {
            return Ok(v.as_ref().clone());
        }
        let one = C::one();
        let res = if y.is_empty() {
            ModuleVector::monomial(Word::empty(), self.hw.m[(r as usize - 1) / 2].clone())
        } else {
            let (n, k, yp) = Self::first_factor(y);
            let g = bnk(n, k);
            if r > n {
                let v = self.t1(r, &yp)?;
                self.apply_word(&g, &v)?
            } else if r == n {
                // B_r B_{n,k} = B_{n+1,k} has an even lower end
                let mut u = vec![r];
                u.extend_from_slice(&y.0);
                self.ideal_reduce(&u)?
            } else if r + 2 <= k {
                let v = self.t1(r, &yp)?;
                self.apply_word(&g, &v)?
            } else if r + 1 == k {
                let v = self.t2(r, &yp)?;
                self.apply_word(&bnk(n, k + 1), &v)?
            } else if r + 1 == n {
                let v = self.t1(r, &yp)?;
                let mut w2 = bnk(n - 1, k);
                w2.push(n - 1);
                let mut tail = bnk(n - 1, k);
                tail.extend_from_slice(&yp.0);
                let extra = self.ideal_reduce(&tail)?;
                let mut out = self.combine(vec![(g, self.two(), v.clone()), (w2, one.neg(), v)])?;
                out = out.add(&extra);
                out
            } else {
                let v = self.t1(r, &yp)?;
                let mid = self.apply_word(&bnk(n, r + 1), &v)?;
                let mut w2 = bnk(r, k);
                w2.push(r);
                let mut w3 = vec![r];
                w3.extend(bnk(r, k));
                w3.extend(bnk(n, r + 2));
                let t2 = self.t2(r, &yp)?;
                self.combine(vec![
                    (g, one.clone(), v),
                    (w2, one.neg(), mid),
                    (w3, one, t2),
                ])?
            }
        };
        Ok(self.leave(key, res).as_ref().clone())
    }

    /// `B_r B_{r+1} Y 1` for odd `r` and a basis word `Y`.
    fn t2(&mut self, r: u8, y: &Word) -> Result<ModuleVector<C>> {
        let key = (2, r, y.clone());
        if let Some(v) = self.enter(&key)? {
            return Ok(v.as_ref().clone());
        }
        let one = C::one();
        let two = self.two();
        let res = if y.is_empty() {
            ModuleVector::monomial(
                Word(vec![r + 1]),
                self.hw.ntilde[(r as usize - 1) / 2].clone(),
            )
        } else {
            let (n, k, yp) = Self::first_factor(y);
            let g = bnk(n, k);
            if k >= r + 3 {
                let v = self.t2(r, &yp)?;
                self.apply_word(&g, &v)?
            } else if k == r + 2 {
                let v = self.t1(r + 2, &yp)?;
                let mut w = bnk(n, r + 3);
                w.extend([r, r + 1]);
                self.apply_word(&w, &v)?
            } else if k == r + 1 {
                if n == r + 2 {
                    self.sq(r, &yp)?
                } else {
                    let v1 = self.t1(r + 2, &yp)?;
                    let sq = self.sq(r, &yp)?;
                    let o = self.combine(vec![
                        (vec![r, r + 1, r + 1], one.clone(), v1.clone()),
                        (vec![r + 2], one.clone(), sq),
                        (vec![r], one.neg(), v1),
                    ])?;
                    let o = self.apply_word(&bnk(n, r + 3), &o)?;
                    div_all(&o, &two)?
                }
            } else if n >= r + 3 {
                let low = bnk(r, k);
                let v = self.t1(r + 2, &yp)?;
                let mut wa = vec![r, r + 1, r + 1, r];
                wa.extend_from_slice(&low);
                let mut wb = vec![r, r];
                wb.extend_from_slice(&low);
                let mut b0 = bnk(r + 1, k);
                b0.extend_from_slice(&yp.0);
                let b0 = Word(b0);
                let t1 = self.t1(r, &b0)?;
                let t2 = self.t2(r, &b0)?;
                let z = self.combine(vec![
                    (vec![], one.clone(), t1.clone()),
                    (vec![r + 1], two.clone(), t2),
                    (vec![r + 1, r + 1], one.neg(), t1),
                ])?;
                let o = self.combine(vec![
                    (wa, one.clone(), v.clone()),
                    (wb, one.neg(), v),
                    (vec![r + 2], one, z),
                ])?;
                let o = self.apply_word(&bnk(n, r + 3), &o)?;
                div_all(&o, &two)?
            } else {
                let mut u = vec![r + 1];
                u.extend_from_slice(&y.0);
                let base = self.ideal_reduce(&u)?;
                let mut out = ModuleVector::zero();
                for (b, c) in base.terms() {
                    let v = self.t1(r, b)?;
                    out = out.add(&v.scale(c));
                }
                out
            }
        };
        Ok(self.leave(key, res).as_ref().clone())
    }

    /// `B_r B_{r+1}^2 Z 1`.
    fn sq(&mut self, r: u8, z: &Word) -> Result<ModuleVector<C>> {
        let one = C::one();
        let t1 = self.t1(r, z)?;
        let t2 = self.t2(r, z)?;
        self.combine(vec![
            (vec![], one.clone(), t1.clone()),
            (vec![r + 1], self.two(), t2),
            (vec![r + 1, r + 1], one.neg(), t1),
        ])
    }

    /// Matrix of `B_a` on the given basis words; fails if the image leaves
    /// their span.
    pub fn matrix_on(&mut self, a: u8, basis: &[Word]) -> Result<Matrix<C>> {
        let index: HashMap<&Word, usize> = basis.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut m = Matrix::zeros(basis.len(), basis.len());
        for (j, b) in basis.iter().enumerate() {
            let img = self.act_basis(a, b)?;
            for (w, c) in img.terms() {
                let Some(&i) = index.get(w) else {
                    return Err(Error::Domain(format!(
                        "B_{a} maps {b} outside the truncation (to {w})"
                    )));
                };
                m.set(i, j, c.clone());
            }
        }
        Ok(m)
    }

    /// Matrix of `B_{2i-1}` on a truncation.
    pub fn cartan_matrix(&mut self, i: usize, trunc: &Truncation) -> Result<Matrix<C>> {
        if i == 0 || 2 * i > self.hw.n {
            return Err(Error::Domain(format!(
                "no Cartan generator B_{}",
                2 * i - 1
            )));
        }
        let basis = truncation_basis(self.hw.n, trunc);
        self.matrix_on((2 * i - 1) as u8, &basis)
    }

    /// `r . b` for every defining relation `r` and basis word `b`.
    pub fn relation_residuals(&mut self, basis: &[Word]) -> Result<Vec<ModuleVector<C>>> {
        let rels = crate::freealg::relations(self.hw.n, &self.two());
        let mut out = Vec::new();
        for b in basis {
            let v = ModuleVector::word(b.clone());
            for r in &rels {
                out.push(self.apply_element(r, &v)?);
            }
        }
        Ok(out)
    }
}

fn div_all<C: Coeff>(v: &ModuleVector<C>, d: &C) -> Result<ModuleVector<C>> {
    v.map_coeffs(|c| c.div(d))
}

/// Number of occurrences of `B_{2i}` in a word, for each `i`.
pub fn even_counts(n: usize, w: &Word) -> Vec<u32> {
    let mut c = vec![0; (n - 1) / 2];
    for &a in &w.0 {
        if a % 2 == 0 {
            c[a as usize / 2 - 1] += 1;
        }
    }
    c
}

/// Ordered products with even factors and at most `caps[i]` letters
/// `B_{2i+2}`, by length and then the presentation order.
pub fn truncation_basis(n: usize, trunc: &Truncation) -> Vec<Word> {
    let caps = &trunc.0;
    let mut facs = Vec::new();
    for k in 3..=n as u8 {
        for r in (2..k).step_by(2) {
            facs.push((k, r));
        }
    }
    let mut out = Vec::new();
    let mut cnt = vec![0u32; (n - 1) / 2];
    fn rec(
        i: usize,
        facs: &[(u8, u8)],
        caps: &[u32],
        word: &mut Vec<u8>,
        cnt: &mut Vec<u32>,
        out: &mut Vec<Word>,
    ) {
        if i == facs.len() {
            out.push(Word(word.clone()));
            return;
        }
        let (k, r) = facs[i];
        let f = bnk(k, r);
        let len0 = word.len();
        let cnt0 = cnt.clone();
        loop {
            rec(i + 1, facs, caps, word, cnt, out);
            word.extend_from_slice(&f);
            let mut over = false;
            for &a in &f {
                if a % 2 == 0 {
                    let j = a as usize / 2 - 1;
                    cnt[j] += 1;
                    if cnt[j] > caps.get(j).copied().unwrap_or(0) {
                        over = true;
                    }
                }
            }
            if over {
                break;
            }
        }
        word.truncate(len0);
        *cnt = cnt0;
    }
    let mut word = Vec::new();
    rec(0, &facs, caps, &mut word, &mut cnt, &mut out);
    out.sort_by(compare);
    out
}

pub fn to_monomial(w: &Word) -> NormalMonomial {
    NormalMonomial::from_word(w).expect("basis words are ordered products")
}

/// Specialization points tried in turn for `s = q^{1/2}`.
pub const Q0_RETRY: [i64; 4] = [2, 3, 5, 7];

/// Dimension of the joint generalized eigenspace of the Cartan generators
/// for the weight `mu`, on a truncation, at a rational specialization.
pub fn weight_multiplicity(
    hw: &HighestWeightData<QScalar>,
    mu: &FormalWeight,
    trunc: &Truncation,
    q0: Option<&GaussRat>,
) -> Result<usize> {
    let tries: Vec<GaussRat> = match q0 {
        Some(s) => vec![s.clone()],
        None => Q0_RETRY.iter().map(|&k| GaussRat::from_int(k)).collect(),
    };
    let target = mu.q_weight()?;
    let mut last = None;
    for s in tries {
        match multiplicity_at(hw, &target, trunc, &s) {
            Ok(d) => return Ok(d),
            Err(e @ (Error::Pole(_) | Error::DivisionByZero)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::Pole("no specialization point".into())))
}

fn multiplicity_at(
    hw: &HighestWeightData<QScalar>,
    target: &[QScalar],
    trunc: &Truncation,
    s: &GaussRat,
) -> Result<usize> {
    let hws = hw.specialize(s)?;
    let mut vm = VermaModule::new(hws, s)?;
    let basis = truncation_basis(hw.n, trunc);
    let mut space: Vec<Vec<GaussRat>> = (0..basis.len())
        .map(|i| {
            let mut v = vec![GaussRat::zero(); basis.len()];
            v[i] = GaussRat::one();
            v
        })
        .collect();
    for (i, mu) in target.iter().enumerate() {
        if space.is_empty() {
            break;
        }
        let mu = mu.eval_exact(s)?;
        let full = vm.matrix_on((2 * i + 1) as u8, &basis)?;
        let restricted = full.restrict(&space, 0.0)?;
        let inner = restricted.generalized_eigenspace(&mu, 0.0)?;
        let k = Matrix::from_cols(basis.len(), &space);
        space = inner.iter().map(|c| k.mul_vec(c)).collect();
    }
    Ok(space.len())
}
