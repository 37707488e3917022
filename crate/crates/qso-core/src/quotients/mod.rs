//! Finite-dimensional quotients `V_m / I(λ)` of standard Verma modules,
//! their characters, the nonclassical splitting, the so3 classification and
//! baby Verma modules at roots of unity.

mod baby;
mod echelon;
mod modular;
mod module;
mod split;

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::Value;

pub use baby::{baby_verma, BabyOptions};
pub use echelon::{Echelon, SparseVec};
use modular::{agrees, lift, residues, Fp2, Residues, PRIMES};
pub use module::{FiniteModule, Matrices, RelationReport, RelationResidual};
pub use split::{
    classify_so3, cyclicity_probe, intertwiner, nonclassical_split, submodule_closure,
    So3Classification, SplitReport,
};

use crate::error::{Error, Result};
use crate::freealg::{compare, Word};
use crate::linalg::Matrix;
use crate::qscalar::{rat_int, GaussRat};
use crate::rank_low::{reflection_vector, weight_value};
use crate::ring::{Coeff, FromQScalar, QTwo};
use crate::verma::{
    even_counts, truncation_basis, HighestWeightData, ModuleVector, Truncation, VermaModule,
};
use crate::weights::{
    dot_action, rank, simple_roots, weyl_character, weyl_dimension, FormalWeight, Kind, RVec,
    WeylElement,
};

/// Weights with multiplicities. Nonclassical characters are folded: the
/// Cartan eigenvalue `ε[μ_i]_+` does not see the sign of `μ_i`, so weights
/// are recorded with `|μ_i|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub kind: Kind,
    pub signs: Vec<i8>,
    pub mult: BTreeMap<RVec, usize>,
}

fn fold(mu: &[BigRational]) -> RVec {
    mu.iter().map(|x| x.abs()).collect()
}

impl Character {
    /// The character of the irreducible classical module with highest
    /// weight `lam` (folded when `lam` is nonclassical).
    pub fn weyl(n: usize, lam: &FormalWeight) -> Result<Character> {
        let full = weyl_character(n, &lam.coords)?;
        let mult = match lam.kind {
            Kind::Classical => full,
            Kind::Nonclassical => {
                let mut m = BTreeMap::new();
                for (mu, c) in full {
                    *m.entry(fold(&mu)).or_insert(0) += c;
                }
                m
            }
        };
        Ok(Character {
            kind: lam.kind,
            signs: lam.signs.clone(),
            mult,
        })
    }

    pub fn dimension(&self) -> usize {
        self.mult.values().sum()
    }

    /// Invariance under the simple reflections (classical), or under
    /// coordinate permutations (folded nonclassical).
    pub fn is_weyl_symmetric(&self, n: usize) -> Result<bool> {
        let k = rank(n);
        for i in 1..=k {
            let w = WeylElement::simple_reflection(n, i)?;
            for (mu, c) in &self.mult {
                let mut image = w.apply(mu);
                if self.kind == Kind::Nonclassical {
                    image = fold(&image);
                }
                if self.mult.get(&image) != Some(c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Multiplicities divided by `d`, if they all divide.
    pub fn divided(&self, d: usize) -> Option<Character> {
        if d == 0 || self.mult.values().any(|c| c % d != 0) {
            return None;
        }
        let mut out = self.clone();
        out.mult.values_mut().for_each(|c| *c /= d);
        Some(out)
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .mult
            .iter()
            .map(|(mu, c)| {
                let w = FormalWeight {
                    kind: self.kind,
                    coords: mu.clone(),
                    signs: self.signs.clone(),
                };
                serde_json::json!({ "weight": w, "mult": c })
            })
            .collect();
        Value::Array(entries)
    }
}

/// The vectors `v_{s_i.λ}` (with their weights `s_i.λ`) generating `I(λ)`.
pub fn ideal_generators<C: QTwo + FromQScalar>(
    verma: &mut VermaModule<C>,
    s: &C,
    lam: &FormalWeight,
) -> Result<Vec<(FormalWeight, ModuleVector<C>)>> {
    let n = verma.n();
    if !lam.is_regularly_dominant(n) {
        return Err(Error::Precondition(format!(
            "{lam} is not regularly dominant for so_{n}"
        )));
    }
    let mut out = Vec::new();
    for i in 1..=rank(n) {
        let w = dot_action(&WeylElement::simple_reflection(n, i)?, lam)?;
        out.push((w, reflection_vector(verma, s, lam, i)?));
    }
    Ok(out)
}

/// Quotient basis words and generator matrices.
pub(crate) struct TruncatedQuotient<C> {
    pub basis: Vec<Word>,
    pub mats: Vec<Matrix<C>>,
}

pub(crate) enum Attempt<C> {
    Done(TruncatedQuotient<C>),
    /// Some word of `W_{c+1}` is not reduced into `W_c`.
    NeedCap,
}

/// Quotient of the truncation `W_c` by the submodule generated by `gens`.
///
/// The submodule is spanned inside `W_{c+margin}` (`margin >= 1`) by closing the
/// generators under the action (images leaving the ambient truncation are
/// dropped). Columns are ordered so that pivots prefer words outside `W_c`;
/// the remaining words of `W_c` form the quotient basis.
pub(crate) fn truncated_quotient<C: Coeff>(
    verma: &mut VermaModule<C>,
    gens: &[ModuleVector<C>],
    caps: &[u32],
    margin: u32,
    tol: f64,
) -> Result<Attempt<C>> {
    let n = verma.n();
    let amb_caps: Vec<u32> = caps.iter().map(|c| c + margin.max(1)).collect();
    let mut amb = truncation_basis(n, &Truncation(amb_caps));
    let region = |w: &Word| -> u8 {
        let cnt = even_counts(n, w);
        if cnt.iter().zip(caps).all(|(a, c)| a <= c) {
            2
        } else if cnt.iter().zip(caps).all(|(a, c)| *a <= c + 1) {
            1
        } else {
            0
        }
    };
    let mut keyed: Vec<(u8, Word)> = amb.drain(..).map(|w| (region(&w), w)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| compare(&b.1, &a.1)));
    let index: HashMap<&Word, usize> = keyed.iter().enumerate().map(|(i, (_, w))| (w, i)).collect();
    let sparse = |v: &ModuleVector<C>| -> Option<SparseVec<C>> {
        let mut out = SparseVec::new();
        for (w, c) in v.terms() {
            out.insert(*index.get(w)?, c.clone());
        }
        Some(out)
    };

    let mut ech = Echelon::new(tol);
    let mut queue = VecDeque::new();
    for g in gens {
        let Some(x) = sparse(g) else {
            return Ok(Attempt::NeedCap);
        };
        if ech.insert(x)? {
            queue.push_back(g.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for a in 1..n as u8 {
            let y = verma.act(a, &x)?;
            if let Some(sy) = sparse(&y) {
                if ech.insert(sy)? {
                    queue.push_back(y);
                }
            }
        }
    }

    let mut qcols = Vec::new();
    for (i, (r, _)) in keyed.iter().enumerate() {
        match r {
            1 if !ech.is_pivot(i) => return Ok(Attempt::NeedCap),
            2 if !ech.is_pivot(i) => qcols.push(i),
            _ => {}
        }
    }
    qcols.sort_by(|a, b| compare(&keyed[*a].1, &keyed[*b].1));
    let qpos: HashMap<usize, usize> = qcols.iter().enumerate().map(|(p, c)| (*c, p)).collect();
    let basis: Vec<Word> = qcols.iter().map(|c| keyed[*c].1.clone()).collect();
    let d = basis.len();
    let mut mats = Vec::with_capacity(n - 1);
    for a in 1..n as u8 {
        let mut m = Matrix::zeros(d, d);
        for (j, w) in basis.iter().enumerate() {
            let img = verma.act_basis(a, w)?;
            let sv = sparse(&img)
                .ok_or_else(|| Error::Domain(format!("B_{a} {w} left the ambient truncation")))?;
            for (col, c) in ech.reduce(sv) {
                let Some(&i) = qpos.get(&col) else {
                    return Ok(Attempt::NeedCap);
                };
                m.set(i, j, c);
            }
        }
        mats.push(m);
    }
    Ok(Attempt::Done(TruncatedQuotient { basis, mats }))
}

/// Coordinates of `v` in the basis of simple roots.
fn root_coordinates(n: usize, v: &[BigRational]) -> Result<Vec<BigRational>> {
    let simple = simple_roots(n)?;
    let k = simple.len();
    let cols: Vec<Vec<GaussRat>> = simple
        .iter()
        .map(|a| a.iter().map(|x| GaussRat::real(x.clone())).collect())
        .collect();
    let m = Matrix::from_cols(k, &cols);
    let b: Vec<GaussRat> = v.iter().map(|x| GaussRat::real(x.clone())).collect();
    Ok(m.solve(&b, 0.0)?.into_iter().map(|x| x.re).collect())
}

/// Initial uniform cap: the largest simple-root coefficient of `λ - μ`
/// over the Weyl orbit of `λ`.
fn initial_cap(n: usize, lam: &[BigRational]) -> Result<u32> {
    let mut best = BigRational::zero();
    for w in WeylElement::all(n)? {
        let mu = w.apply(lam);
        let diff: RVec = lam.iter().zip(&mu).map(|(a, b)| a - b).collect();
        for c in root_coordinates(n, &diff)? {
            if c > best {
                best = c;
            }
        }
    }
    Ok(best.ceil().to_integer().to_u32().unwrap_or(u32::MAX).max(1))
}

#[derive(Clone, Debug)]
pub struct QuotientOptions {
    /// Specialization point for `s = q^{1/2}`.
    pub s: GaussRat,
    pub max_dim: usize,
    /// Extra attempts after the first.
    pub retries: u32,
    /// Cap override (uniform per even generator).
    pub cap: Option<u32>,
    /// Levels of the ambient truncation beyond `W_c`.
    pub margin: u32,
}

impl Default for QuotientOptions {
    fn default() -> Self {
        QuotientOptions {
            s: GaussRat::from_int(2),
            max_dim: 512,
            retries: 4,
            cap: None,
            margin: 2,
        }
    }
}

fn attempt_mod<const P: u64>(
    n: usize,
    lam: &FormalWeight,
    s: &GaussRat,
    caps: &[u32],
    margin: u32,
) -> Result<Option<Residues>> {
    let sp = Fp2::<P>::from_gauss(s)?;
    let hw = HighestWeightData::standard(n, lam)?.specialize(&sp)?;
    let mut verma = VermaModule::new(hw, &sp)?;
    let gens: Vec<ModuleVector<Fp2<P>>> = ideal_generators(&mut verma, &sp, lam)?
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    match truncated_quotient(&mut verma, &gens, caps, margin, 0.0)? {
        Attempt::NeedCap => Ok(None),
        Attempt::Done(q) => Ok(Some(residues::<P>(q.basis, &q.mats)?)),
    }
}

type Runner = fn(usize, &FormalWeight, &GaussRat, &[u32], u32) -> Result<Option<Residues>>;

const RUNNERS: [Runner; 8] = [
    attempt_mod::<{ PRIMES[0] }>,
    attempt_mod::<{ PRIMES[1] }>,
    attempt_mod::<{ PRIMES[2] }>,
    attempt_mod::<{ PRIMES[3] }>,
    attempt_mod::<{ PRIMES[4] }>,
    attempt_mod::<{ PRIMES[5] }>,
    attempt_mod::<{ PRIMES[6] }>,
    attempt_mod::<{ PRIMES[7] }>,
];

fn unlucky(e: &Error) -> bool {
    matches!(e, Error::DivisionByZero | Error::Pole(_))
}

/// `V_m / I(λ)` for a regularly dominant `λ`, exact at `opts.s`.
///
/// The truncated quotient is computed modulo several primes and lifted to
/// Gaussian rationals; the lifted module is then checked exactly against
/// the defining relations and the Weyl character, and its dimension
/// against the Weyl dimension.
pub fn weyl_quotient(n: usize, lam: &FormalWeight, opts: &QuotientOptions) -> Result<FiniteModule> {
    if !lam.is_regularly_dominant(n) {
        return Err(Error::Precondition(format!(
            "{lam} is not regularly dominant for so_{n}"
        )));
    }
    let expected = weyl_dimension(n, &lam.coords)?;
    if expected > BigInt::from(opts.max_dim) {
        return Err(Error::Precondition(format!(
            "Weyl dimension {expected} exceeds the bound {}",
            opts.max_dim
        )));
    }
    let expected = expected.to_usize().unwrap_or(usize::MAX);
    let s = &opts.s;
    // reject specializations where the weights themselves have poles
    HighestWeightData::standard(n, lam)?.specialize(s)?;
    let kk = (n - 1) / 2;
    let mut cap = match opts.cap {
        Some(c) => c,
        None => initial_cap(n, &lam.coords)?,
    };
    let mut margin = opts.margin;
    let mut last = String::new();
    let mut first = None;
    let mut lead = 0;
    for _ in 0..=opts.retries {
        let caps = vec![cap; kk];
        let r = loop {
            match RUNNERS[lead](n, lam, s, &caps, margin) {
                Err(e) if unlucky(&e) && lead + 1 < RUNNERS.len() => lead += 1,
                r => break r?,
            }
        };
        match r {
            None => {
                last = format!("cap {cap} does not close");
                cap += 1;
            }
            Some(q) if q.basis.len() > expected => {
                last = format!(
                    "dimension {} exceeds {expected} at cap {cap}, margin {margin}",
                    q.basis.len()
                );
                margin += 1;
            }
            Some(q) if q.basis.len() < expected => {
                return Err(Error::Domain(format!(
                    "quotient of dimension {} is smaller than the Weyl dimension {expected}",
                    q.basis.len()
                )));
            }
            Some(q) => {
                first = Some(q);
                break;
            }
        }
    }
    let Some(first) = first else {
        return Err(Error::Budget {
            budget: opts.retries as u64 + 1,
            stuck: format!("quotient for {lam} in so_{n}: {last}"),
        });
    };
    let caps = vec![cap; kk];
    let mut res = vec![first];
    for runner in &RUNNERS[lead + 1..] {
        let r = match runner(n, lam, s, &caps, margin) {
            Err(e) if unlucky(&e) => continue,
            r => r?,
        };
        let Some(r) = r.filter(|r| r.basis == res[0].basis) else {
            continue;
        };
        if let Some(exact) = lift(&res).filter(|ex| agrees(ex, &r)) {
            let m = FiniteModule::new(
                n,
                Some(lam.clone()),
                res[0].basis.iter().map(|w| w.to_string()).collect(),
                Matrices::Exact {
                    s: s.clone(),
                    b: exact,
                },
                format!("weyl_quotient cap={cap} margin={margin}"),
            )?;
            certify(&m, lam)?;
            return Ok(m);
        }
        res.push(r);
    }
    Err(Error::Budget {
        budget: RUNNERS.len() as u64,
        stuck: format!(
            "entries of the quotient for {lam} did not lift from {} primes",
            res.len()
        ),
    })
}

fn certify(m: &FiniteModule, lam: &FormalWeight) -> Result<()> {
    let rep = m.relation_report(0.0)?;
    if !rep.exact_zero {
        return Err(Error::Tolerance(format!(
            "relations fail on the quotient (max residual {})",
            rep.max_residual
        )));
    }
    let ch = character_of(m)?;
    if ch != Character::weyl(m.n, lam)? {
        return Err(Error::Domain(
            "quotient character differs from the Weyl character".into(),
        ));
    }
    Ok(())
}

fn identity_basis(d: usize) -> Vec<Vec<GaussRat>> {
    (0..d)
        .map(|i| {
            let mut v = vec![GaussRat::zero(); d];
            v[i] = GaussRat::one();
            v
        })
        .collect()
}

/// Character of an exactly specialized module whose highest weight is
/// known, by iterated joint eigenspaces of `B_1, B_3, ...`.
pub fn character_of(m: &FiniteModule) -> Result<Character> {
    let hw = m
        .highest_weight
        .as_ref()
        .ok_or_else(|| Error::Precondition("character needs the module's highest weight".into()))?;
    let (s, b) = m.exact().ok_or_else(|| {
        Error::Precondition("character needs an exact rational specialization".into())
    })?;
    let k = hw.rank();
    let d = m.dim();
    let bound = hw
        .coords
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(BigRational::zero);
    let frac = &hw.coords[0] - hw.coords[0].floor();
    let mut cands = Vec::new();
    let mut x = -&bound;
    while x <= bound {
        if hw.kind == Kind::Classical || x.is_positive() {
            cands.push(x.clone());
        }
        x += rat_int(1);
    }
    debug_assert!(cands.iter().all(|c| (c - &frac).is_integer()));
    let mut values: Vec<Vec<GaussRat>> = Vec::with_capacity(k);
    for i in 0..k {
        let vals = cands
            .iter()
            .map(|x| weight_value(hw.kind, hw.signs[i], x)?.eval_exact(s))
            .collect::<Result<Vec<_>>>()?;
        for a in 0..vals.len() {
            if vals[a + 1..].contains(&vals[a]) {
                return Err(Error::Precondition(format!(
                    "distinct weights collide at s = {s}; choose another specialization"
                )));
            }
        }
        values.push(vals);
    }
    let mut spaces: Vec<(RVec, Vec<Vec<GaussRat>>)> = vec![(Vec::new(), identity_basis(d))];
    for (i, vals) in values.iter().enumerate() {
        let full = &b[2 * i];
        let mut next = Vec::new();
        for (prefix, basis) in spaces {
            let restricted = full.restrict(&basis, 0.0)?;
            let kmat = Matrix::from_cols(d, &basis);
            let mut found = 0;
            for (x, v) in cands.iter().zip(vals) {
                let ker = restricted.shift(v).kernel(0.0)?;
                if ker.is_empty() {
                    continue;
                }
                found += ker.len();
                let mut p = prefix.clone();
                p.push(x.clone());
                next.push((p, ker.iter().map(|c| kmat.mul_vec(c)).collect()));
            }
            if found != basis.len() {
                return Err(Error::Precondition(format!(
                    "B_{} is not diagonalizable with weights of {hw}",
                    2 * i + 1
                )));
            }
        }
        spaces = next;
    }
    let mut mult = BTreeMap::new();
    for (mu, basis) in spaces {
        mult.insert(mu, basis.len());
    }
    Ok(Character {
        kind: hw.kind,
        signs: hw.signs.clone(),
        mult,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;

    fn cw(c: &[(i64, i64)]) -> FormalWeight {
        FormalWeight::classical(c.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    fn nw(c: &[(i64, i64)]) -> FormalWeight {
        FormalWeight::nonclassical(
            c.iter().map(|&(p, q)| rat(p, q)).collect(),
            vec![1; c.len()],
        )
        .unwrap()
    }

    #[test]
    fn so3_quotients_have_dimension_two_lambda_plus_one() {
        for (p, q) in [(0, 1), (1, 2), (1, 1), (3, 2)] {
            let m = weyl_quotient(3, &cw(&[(p, q)]), &QuotientOptions::default()).unwrap();
            assert_eq!(m.dim() as i64, 2 * p / q + 1);
        }
        let m = weyl_quotient(3, &cw(&[(1, 1)]), &QuotientOptions::default()).unwrap();
        let ch = character_of(&m).unwrap();
        assert_eq!(ch.mult.len(), 3);
        assert!(ch.mult.values().all(|&c| c == 1));
    }

    #[test]
    fn so3_nonclassical_quotient() {
        let m = weyl_quotient(3, &nw(&[(3, 2)]), &QuotientOptions::default()).unwrap();
        assert_eq!(m.dim(), 4);
        let ch = character_of(&m).unwrap();
        assert_eq!(ch.mult.get(&vec![rat(1, 2)]), Some(&2));
    }

    #[test]
    fn so5_vector_representation() {
        let lam = cw(&[(1, 1), (0, 1)]);
        let mut verma = VermaModule::new(
            HighestWeightData::standard(5, &lam)
                .unwrap()
                .specialize(&GaussRat::from_int(2))
                .unwrap(),
            &GaussRat::from_int(2),
        )
        .unwrap();
        let gens = ideal_generators(&mut verma, &GaussRat::from_int(2), &lam).unwrap();
        assert_eq!(gens.len(), 2);
        assert_eq!(gens[1].0.coords, vec![rat(1, 1), rat(-1, 1)]);
        let m = weyl_quotient(5, &lam, &QuotientOptions::default()).unwrap();
        assert_eq!(m.dim(), 5);
        assert!(character_of(&m).unwrap().is_weyl_symmetric(5).unwrap());
    }

    #[test]
    fn rejects_non_dominant() {
        let e = weyl_quotient(4, &cw(&[(0, 1), (1, 1)]), &QuotientOptions::default());
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
