//! Words in the generators `B_1..B_{n-1}`, linear combinations of words, and
//! reduction to ordered products of descending strings
//! `B_{k,r} = B_{k-1} B_{k-2} ... B_r`.
//!
//! Rewriting runs with respect to the degree-lexicographic order (length
//! first, then left to right with the larger letter larger). Its standard
//! words are exactly the ordered products
//! `B_{2,1}^{e(2,1)} B_{3,1}^{e(3,1)} B_{3,2}^{e(3,2)} ...`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qscalar::QScalar;
use crate::ring::Coeff;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: &[u8]) -> Self {
        Word(letters.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        for &a in &self.0 {
            if a == 0 || a as usize >= n {
                return Err(Error::Domain(format!(
                    "generator B_{a} does not exist in so_{n}"
                )));
            }
        }
        Ok(())
    }
}

impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.len().cmp(&o.0.len()).then_with(|| self.0.cmp(&o.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|a| format!("B{a}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The letters of `B_{n,k} = B_{n-1} ... B_k`; empty when `k >= n`.
pub fn bnk(n: u8, k: u8) -> Vec<u8> {
    if k >= n {
        return Vec::new();
    }
    (k..n).rev().collect()
}

/// Ordering used when presenting monomials: shorter words first, and for
/// equal lengths, reading from the right, the word with the larger letter at
/// the first difference is the smaller one.
pub fn compare(a: &Word, b: &Word) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.0.iter().rev().zip(b.0.iter().rev()) {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// Finite linear combination of words.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<C> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> Default for AlgebraElement<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> fmt::Debug for AlgebraElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

impl<C: Coeff> AlgebraElement<C> {
    pub fn zero() -> Self {
        AlgebraElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(w, C::one())
    }

    pub fn monomial(w: Word, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(w, &c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, C)>) -> Self {
        let mut e = Self::zero();
        for (w, c) in terms {
            e.add_term(w, &c);
        }
        e
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
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

    pub fn leading(&self) -> Option<(&Word, &C)> {
        self.terms.last_key_value()
    }

    pub fn add_term(&mut self, w: Word, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = x.add(c);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in &o.terms {
            r.add_term(w.clone(), &c.neg());
        }
        r
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut r = Self::zero();
        for (w, c) in &self.terms {
            r.add_term(w.clone(), &c.mul(k));
        }
        r
    }

    /// Concatenation product.
    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                r.add_term(a.concat(b), &x.mul(y));
            }
        }
        r
    }

    fn pop_last(&mut self) -> Option<(Word, C)> {
        self.terms.pop_last()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> Result<D>) -> Result<AlgebraElement<D>> {
        let mut r = AlgebraElement::zero();
        for (w, c) in &self.terms {
            r.add_term(w.clone(), &f(c)?);
        }
        Ok(r)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    word: Vec<u8>,
    coeff: QScalar,
}

#[derive(Serialize, Deserialize)]
struct ElementJson {
    terms: Vec<TermJson>,
}

impl Serialize for AlgebraElement<QScalar> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElementJson {
            terms: self
                .terms
                .iter()
                .map(|(w, c)| TermJson {
                    word: w.0.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraElement<QScalar> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ElementJson::deserialize(d)?;
        Ok(AlgebraElement::from_terms(
            j.terms.into_iter().map(|t| (Word(t.word), t.coeff)),
        ))
    }
}

/// Which exchange relation a rewrite uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `B_b B_a -> B_a B_b` for `a < b - 1`.
    Commute,
    /// `B_{i+1} B_i B_i -> [2] B_i B_{i+1} B_i - B_i B_i B_{i+1} + B_{i+1}`.
    ExchangeA { i: u8 },
    /// `B_{i+1} B_{i+1} B_i -> [2] B_{i+1} B_i B_{i+1} - B_i B_{i+1}^2 + B_i`.
    Cubic { i: u8 },
    /// `B_{n,k} B_r` for `k < r < n - 1`, with `n = r + 2`.
    ExchangeB { n: u8, k: u8, r: u8 },
    /// `B_{n,k} B_{n,k-1}` for `2 <= k <= n - 2`.
    Reorder { n: u8, k: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub start: usize,
    pub end: usize,
    pub rule: Rule,
}

/// Split a word into maximal descending runs `(top, low, start)`.
pub fn factors(w: &[u8]) -> Vec<(u8, u8, usize)> {
    let mut out = Vec::new();
    if w.is_empty() {
        return out;
    }
    let (mut top, mut low, mut st) = (w[0], w[0], 0);
    for (i, &a) in w.iter().enumerate().skip(1) {
        if a + 1 == low {
            low = a;
            continue;
        }
        out.push((top, low, st));
        top = a;
        low = a;
        st = i;
    }
    out.push((top, low, st));
    out
}

/// Leftmost obstruction to `w` being an ordered product, or `None`.
pub fn find_violation(w: &[u8]) -> Option<Violation> {
    if w.is_empty() {
        return None;
    }
    let mut facs: Vec<(u8, u8, usize)> = Vec::new();
    let (mut top, mut low, mut st) = (w[0], w[0], 0usize);
    for i in 1..w.len() {
        let a = w[i];
        if a + 1 == low {
            low = a;
            continue;
        }
        if a >= top {
            facs.push((top, low, st));
            top = a;
            low = a;
            st = i;
            continue;
        }
        if a + 1 < low {
            return Some(Violation {
                start: i - 1,
                end: i + 1,
                rule: Rule::Commute,
            });
        }
        if a == low {
            return Some(Violation {
                start: i - 2,
                end: i + 1,
                rule: Rule::ExchangeA { i: low },
            });
        }
        // low < a < top: the tail B_{a+1} ... B_low B_a
        let s = i - (a + 2 - low) as usize;
        return Some(Violation {
            start: s,
            end: i + 1,
            rule: Rule::ExchangeB {
                n: a + 2,
                k: low,
                r: a,
            },
        });
    }
    facs.push((top, low, st));
    for pair in facs.windows(2) {
        let (t1, l1, s1) = pair[0];
        let (t2, l2, s2) = pair[1];
        if t2 == t1 && l2 < l1 {
            let end = s2 + (t1 - (l1 - 1)) as usize + 1;
            let rule = if l1 == t1 {
                Rule::Cubic { i: t1 - 1 }
            } else {
                Rule::Reorder { n: t1 + 1, k: l1 }
            };
            return Some(Violation {
                start: s1,
                end,
                rule,
            });
        }
    }
    None
}

pub fn is_normal(w: &[u8]) -> bool {
    find_violation(w).is_none()
}

type Terms<C> = Vec<(Vec<u8>, C)>;

/// Reduction engine for one `n` over one coefficient ring.
pub struct Rewriter<C: Coeff> {
    n: usize,
    two: C,
    budget: u64,
    reorder_memo: HashMap<(u8, u8), Arc<Terms<C>>>,
    in_progress: HashSet<(u8, u8)>,
    steps: u64,
}

impl<C: Coeff> Rewriter<C> {
    /// `two` is the value of `[2] = q + q^{-1}` in the coefficient ring.
    pub fn new(n: usize, two: C) -> Result<Self> {
        if !(3..=255).contains(&n) {
            return Err(Error::Domain(format!("so_{n}: need n >= 3")));
        }
        Ok(Rewriter {
            n,
            two,
            budget: DEFAULT_BUDGET,
            reorder_memo: HashMap::new(),
            in_progress: HashSet::new(),
            steps: 0,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn two(&self) -> &C {
        &self.two
    }

    /// Rewrite steps taken since construction.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Right-hand side of the rule applied to the violating segment.
    pub fn rule_rhs(&mut self, rule: Rule, seg: &[u8]) -> Result<Terms<C>> {
        let one = C::one();
        let m1 = one.neg();
        Ok(match rule {
            Rule::Commute => vec![(vec![seg[1], seg[0]], one)],
            Rule::ExchangeA { i } => vec![
                (vec![i, i + 1, i], self.two.clone()),
                (vec![i, i, i + 1], m1),
                (vec![i + 1], one),
            ],
            Rule::Cubic { i } => vec![
                (vec![i + 1, i, i + 1], self.two.clone()),
                (vec![i, i + 1, i + 1], m1),
                (vec![i], one),
            ],
            Rule::ExchangeB { n, k, r } => {
                let mut a = vec![r];
                a.extend(bnk(n, k));
                let mut b = vec![r - 1, r];
                b.extend(bnk(n, r + 1));
                b.push(r);
                b.extend(bnk(r - 1, k));
                let mut c = vec![r, r - 1, r];
                c.extend(bnk(n, r + 1));
                c.extend(bnk(r - 1, k));
                vec![(a, one), (b, C::one()), (c, m1)]
            }
            Rule::Reorder { n, k } => self.reorder(n, k)?.as_ref().clone(),
        })
    }

    /// `B_k B_{n,l}` moved past as `B_{n,l} B_k + ...`, unreduced.
    fn reorder_raw(&self, n: u8, k: u8, l: u8) -> AlgebraElement<C> {
        let mut r = AlgebraElement::zero();
        if k + 1 == n {
            let mut a = bnk(n, l);
            a.push(n - 1);
            r.add_term(Word(a), &self.two);
            let mut b = bnk(n - 1, l);
            b.extend([n - 1, n - 1]);
            r.add_term(Word(b), &C::one().neg());
            r.add_term(Word(bnk(n - 1, l)), &C::one());
            return r;
        }
        for (w, c) in self.reorder_raw(n, k + 1, l).terms() {
            let mut v = w.0.clone();
            v.push(k);
            r.add_term(Word(v), c);
        }
        let mut head = bnk(n, k + 1);
        head.extend(bnk(n, k + 2));
        let mut a = head.clone();
        a.push(k);
        a.extend(bnk(k, l));
        a.extend([k, k + 1]);
        r.add_term(Word(a), &C::one());
        let mut b = head;
        b.extend(bnk(k, l));
        b.extend([k, k + 1, k]);
        r.add_term(Word(b), &C::one().neg());
        r
    }

    /// Reduced expansion of `B_{n,k} B_{n,k-1}` into words below it.
    fn reorder(&mut self, n: u8, k: u8) -> Result<Arc<Terms<C>>> {
        if let Some(r) = self.reorder_memo.get(&(n, k)) {
            return Ok(r.clone());
        }
        if !self.in_progress.insert((n, k)) {
            return Err(Error::Domain(format!(
                "reordering B_{{{n},{k}}} B_{{{n},{}}} refers to itself",
                k - 1
            )));
        }
        let mut lhs = bnk(n, k);
        lhs.extend(bnk(n, k - 1));
        let lhs = Word(lhs);
        let mut work = self.reorder_raw(n, k, k - 1);
        let mut out = AlgebraElement::zero();
        let mut c_self = C::zero();
        while let Some((w, c)) = work.pop_last() {
            if w == lhs {
                c_self = c_self.add(&c);
                continue;
            }
            if w < lhs {
                out.add_term(w, &c);
                continue;
            }
            let v = find_violation(&w.0).ok_or_else(|| {
                Error::Domain(format!("reordering produced a normal word {w} above {lhs}"))
            })?;
            let rhs = self.rule_rhs(v.rule, &w.0[v.start..v.end])?;
            for (u, cu) in rhs {
                work.add_term(Word(splice(&w.0, v.start, v.end, &u)), &c.mul(&cu));
            }
        }
        self.in_progress.remove(&(n, k));
        let denom = C::one().sub(&c_self);
        let mut terms = Vec::with_capacity(out.len());
        for (w, c) in out.terms() {
            terms.push((w.0.clone(), c.div(&denom)?));
        }
        let r = Arc::new(terms);
        self.reorder_memo.insert((n, k), r.clone());
        Ok(r)
    }

    /// One rewrite on the largest non-normal word, at its leftmost
    /// violation. `None` when every word is already normal.
    pub fn rewrite_step(&mut self, e: &AlgebraElement<C>) -> Result<Option<AlgebraElement<C>>> {
        let target = e
            .terms()
            .rev()
            .find_map(|(w, c)| find_violation(&w.0).map(|v| (w.clone(), c.clone(), v)));
        let Some((w, c, v)) = target else {
            return Ok(None);
        };
        let mut r = e.clone();
        r.terms.remove(&w);
        for (u, cu) in self.rule_rhs(v.rule, &w.0[v.start..v.end])? {
            let nw = Word(splice(&w.0, v.start, v.end, &u));
            assert!(nw < w, "rewrite did not decrease: {w} -> {nw}");
            r.add_term(nw, &c.mul(&cu));
        }
        Ok(Some(r))
    }

    pub fn normal_form(&mut self, e: &AlgebraElement<C>) -> Result<AlgebraElement<C>> {
        for w in e.terms.keys() {
            w.check(self.n)?;
        }
        let mut work = e.clone();
        let mut out = AlgebraElement::zero();
        let mut local = 0u64;
        while let Some((w, c)) = work.pop_last() {
            let Some(v) = find_violation(&w.0) else {
                out.add_term(w, &c);
                continue;
            };
            local += 1;
            self.steps += 1;
            if local > self.budget {
                return Err(Error::Budget {
                    budget: self.budget,
                    stuck: w.to_string(),
                });
            }
            for (u, cu) in self.rule_rhs(v.rule, &w.0[v.start..v.end])? {
                let nw = Word(splice(&w.0, v.start, v.end, &u));
                assert!(nw < w, "rewrite did not decrease: {w} -> {nw}");
                work.add_term(nw, &c.mul(&cu));
            }
        }
        Ok(out)
    }

    pub fn normal_form_word(&mut self, w: &[u8]) -> Result<AlgebraElement<C>> {
        self.normal_form(&AlgebraElement::word(Word::new(w)))
    }

    /// Every rule instance available in `so_n`, as (rule, left side, right side).
    pub fn rule_instances(&mut self) -> Result<Vec<(Rule, Word, AlgebraElement<C>)>> {
        let n = self.n as u8;
        let mut lhs: Vec<(Rule, Vec<u8>)> = Vec::new();
        for b in 1..n {
            for a in 1..b.saturating_sub(1) {
                lhs.push((Rule::Commute, vec![b, a]));
            }
        }
        for i in 1..n - 1 {
            lhs.push((Rule::ExchangeA { i }, vec![i + 1, i, i]));
            lhs.push((Rule::Cubic { i }, vec![i + 1, i + 1, i]));
        }
        for r in 2..n - 1 {
            for k in 1..r {
                let mut w = bnk(r + 2, k);
                w.push(r);
                lhs.push((Rule::ExchangeB { n: r + 2, k, r }, w));
            }
        }
        for m in 4..=n {
            for k in 2..m - 1 {
                let mut w = bnk(m, k);
                w.extend(bnk(m, k - 1));
                lhs.push((Rule::Reorder { n: m, k }, w));
            }
        }
        let mut out = Vec::new();
        for (rule, w) in lhs {
            let rhs = self.rule_rhs(rule, &w)?;
            out.push((
                rule,
                Word(w),
                AlgebraElement::from_terms(rhs.into_iter().map(|(u, c)| (Word(u), c))),
            ));
        }
        Ok(out)
    }

    /// The defining relations as elements that must vanish:
    /// `B_i^2 B_j - [2] B_i B_j B_i + B_j B_i^2 - B_j` for `|i-j| = 1`
    /// and `B_i B_j - B_j B_i` for `|i-j| > 1`.
    pub fn defining_relations(&self) -> Vec<AlgebraElement<C>> {
        relations(self.n, &self.two)
    }
}

pub fn relations<C: Coeff>(n: usize, two: &C) -> Vec<AlgebraElement<C>> {
    let mut out = Vec::new();
    let one = C::one();
    for i in 1..n as u8 {
        for j in 1..n as u8 {
            if i.abs_diff(j) == 1 {
                out.push(AlgebraElement::from_terms([
                    (Word(vec![i, i, j]), one.clone()),
                    (Word(vec![i, j, i]), two.neg()),
                    (Word(vec![j, i, i]), one.clone()),
                    (Word(vec![j]), one.neg()),
                ]));
            } else if i + 1 < j {
                out.push(AlgebraElement::from_terms([
                    (Word(vec![i, j]), one.clone()),
                    (Word(vec![j, i]), one.neg()),
                ]));
            }
        }
    }
    out
}

fn splice(w: &[u8], s: usize, e: usize, mid: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(w.len() - (e - s) + mid.len());
    v.extend_from_slice(&w[..s]);
    v.extend_from_slice(mid);
    v.extend_from_slice(&w[e..]);
    v
}

/// Exponent table `e(k, r)` of an ordered product of the `B_{k,r}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMonomial {
    exps: BTreeMap<(u8, u8), u32>,
}

impl NormalMonomial {
    pub fn one() -> Self {
        NormalMonomial {
            exps: BTreeMap::new(),
        }
    }

    pub fn from_exponents(exps: impl IntoIterator<Item = ((u8, u8), u32)>) -> Result<Self> {
        let mut m = NormalMonomial::one();
        for ((k, r), e) in exps {
            if r == 0 || r >= k {
                return Err(Error::Domain(format!("no factor B_{{{k},{r}}}")));
            }
            if e > 0 {
                *m.exps.entry((k, r)).or_insert(0) += e;
            }
        }
        Ok(m)
    }

    /// `None` unless `w` is an ordered product.
    pub fn from_word(w: &Word) -> Option<Self> {
        if !is_normal(&w.0) {
            return None;
        }
        let mut m = NormalMonomial::one();
        for (top, low, _) in factors(&w.0) {
            *m.exps.entry((top + 1, low)).or_insert(0) += 1;
        }
        Some(m)
    }

    pub fn to_word(&self) -> Word {
        let mut v = Vec::new();
        for (&(k, r), &e) in &self.exps {
            for _ in 0..e {
                v.extend(bnk(k, r));
            }
        }
        Word(v)
    }

    pub fn exponent(&self, k: u8, r: u8) -> u32 {
        self.exps.get(&(k, r)).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&(u8, u8), &u32)> {
        self.exps.iter()
    }

    /// True when every factor `B_{k,r}` has even `r`.
    pub fn is_even(&self) -> bool {
        self.exps.keys().all(|&(_, r)| r % 2 == 0)
    }
}

impl fmt::Display for NormalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .exps
            .iter()
            .map(|(&(k, r), &e)| {
                if e == 1 {
                    format!("B({k},{r})")
                } else {
                    format!("B({k},{r})^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::QScalar;

    fn w(v: &[u8]) -> Word {
        Word::new(v)
    }

    fn rw(n: usize) -> Rewriter<QScalar> {
        Rewriter::new(n, QScalar::bracket_int(2)).unwrap()
    }

    #[test]
    fn presentation_order() {
        assert_eq!(compare(&w(&[2, 2, 2]), &w(&[1, 2, 2])), Ordering::Less);
        assert_eq!(compare(&w(&[2, 1, 1]), &w(&[1, 1, 1])), Ordering::Less);
        assert_eq!(compare(&w(&[2, 1]), &w(&[2, 1, 1])), Ordering::Less);
    }

    #[test]
    fn exchange_a_in_so3() {
        let mut r = rw(3);
        let nf = r.normal_form_word(&[2, 1, 1]).unwrap();
        let two = QScalar::bracket_int(2);
        let want = AlgebraElement::from_terms([
            (w(&[1, 2, 1]), two),
            (w(&[1, 1, 2]), -QScalar::one()),
            (w(&[2]), QScalar::one()),
        ]);
        assert_eq!(nf, want);
    }

    #[test]
    fn distant_commutation() {
        let mut r = rw(5);
        assert_eq!(
            r.normal_form_word(&[3, 1]).unwrap(),
            AlgebraElement::word(w(&[1, 3]))
        );
    }

    #[test]
    fn ordered_products_are_fixed() {
        let mut r = rw(5);
        for v in [&[2u8, 1][..], &[1, 2], &[3, 4, 3], &[2, 1, 3, 2, 1, 3]] {
            assert!(is_normal(v), "{v:?}");
            assert_eq!(r.normal_form_word(v).unwrap(), AlgebraElement::word(w(v)));
        }
    }

    #[test]
    fn relations_reduce_to_zero() {
        for n in 3..=5 {
            let mut r = rw(n);
            for rel in r.defining_relations() {
                assert!(r.normal_form(&rel).unwrap().is_zero(), "n={n} {rel:?}");
            }
        }
    }

    #[test]
    fn monomial_round_trip() {
        let m = NormalMonomial::from_exponents([((3, 1), 2), ((4, 2), 1), ((2, 1), 1)]).unwrap();
        let word = m.to_word();
        assert_eq!(word, w(&[1, 2, 1, 2, 1, 3, 2]));
        assert_eq!(NormalMonomial::from_word(&word), Some(m));
        assert_eq!(
            NormalMonomial::from_word(&w(&[1, 2, 1, 1])).map(|m| m.to_word()),
            None
        );
    }

    #[test]
    fn budget_is_enforced() {
        let mut r = rw(4).with_budget(1);
        let e = r.normal_form_word(&[3, 2, 1, 3, 2, 1, 1]);
        assert!(matches!(e, Err(Error::Budget { .. })));
    }

    #[test]
    fn json_round_trip() {
        let e = AlgebraElement::from_terms([
            (w(&[1, 2]), QScalar::bracket_int(2)),
            (w(&[]), QScalar::from_ratio(1, 3)),
        ]);
        let s = serde_json::to_string(&e).unwrap();
        let back: AlgebraElement<QScalar> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
