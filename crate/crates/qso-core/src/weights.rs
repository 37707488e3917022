//! Weight lattice of `so_n`, Weyl group as signed permutations, dot action,
//! Weyl dimension, and formal weights that keep `[mu]_+` and `[-mu]_+` apart.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qscalar::{fmt_rat, rat, rat_int, rational, QScalar};

pub type RVec = Vec<BigRational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Classical,
    Nonclassical,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Classical => "classical",
            Kind::Nonclassical => "nonclassical",
        })
    }
}

pub fn rank(n: usize) -> usize {
    n / 2
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("so_{n}: need n >= 3")));
    }
    Ok(())
}

fn unit(k: usize, i: usize) -> RVec {
    (0..k)
        .map(|j| if j == i { rat_int(1) } else { rat_int(0) })
        .collect()
}

fn vadd(a: &[BigRational], b: &[BigRational]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn vsub(a: &[BigRational], b: &[BigRational]) -> RVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vscale(a: &[BigRational], c: &BigRational) -> RVec {
    a.iter().map(|x| x * c).collect()
}

pub fn inner(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Simple roots: `eps_i - eps_{i+1}`, then `eps_k` (n odd) or
/// `eps_{k-1} + eps_k` (n even).
pub fn simple_roots(n: usize) -> Result<Vec<RVec>> {
    check_n(n)?;
    let k = rank(n);
    let mut out = Vec::with_capacity(k);
    for i in 0..k.saturating_sub(1) {
        out.push(vsub(&unit(k, i), &unit(k, i + 1)));
    }
    if n % 2 == 1 {
        out.push(unit(k, k - 1));
    } else {
        out.push(vadd(&unit(k, k - 2), &unit(k, k - 1)));
    }
    Ok(out)
}

pub fn positive_roots(n: usize) -> Result<Vec<RVec>> {
    check_n(n)?;
    let k = rank(n);
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            out.push(vsub(&unit(k, i), &unit(k, j)));
            out.push(vadd(&unit(k, i), &unit(k, j)));
        }
        if n % 2 == 1 {
            out.push(unit(k, i));
        }
    }
    Ok(out)
}

/// Half the sum of the positive roots.
pub fn rho(n: usize) -> Result<RVec> {
    let k = rank(n);
    let mut r = vec![BigRational::zero(); k];
    for a in positive_roots(n)? {
        r = vadd(&r, &a);
    }
    Ok(vscale(&r, &rat(1, 2)))
}

/// Signed permutation `eps_i -> signs[i] * eps_{perm[i]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub n: usize,
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        let k = rank(n);
        WeylElement {
            n,
            perm: (0..k).collect(),
            signs: vec![1; k],
        }
    }

    pub fn new(n: usize, perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let k = rank(n);
        let mut seen = vec![false; k];
        if perm.len() != k || signs.len() != k {
            return Err(Error::Domain("Weyl element has wrong rank".into()));
        }
        for &p in &perm {
            if p >= k || seen[p] {
                return Err(Error::Domain("not a permutation".into()));
            }
            seen[p] = true;
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("signs must be +-1".into()));
        }
        if n.is_multiple_of(2) && signs.iter().filter(|&&s| s < 0).count() % 2 == 1 {
            return Err(Error::Domain(
                "n even: an even number of sign changes is required".into(),
            ));
        }
        Ok(WeylElement { n, perm, signs })
    }

    /// Simple reflection for the `i`-th simple root (1-based).
    pub fn simple_reflection(n: usize, i: usize) -> Result<Self> {
        check_n(n)?;
        let k = rank(n);
        if i == 0 || i > k {
            return Err(Error::Domain(format!("no simple root {i} for so_{n}")));
        }
        let mut w = WeylElement::identity(n);
        if i < k {
            w.perm.swap(i - 1, i);
        } else if n % 2 == 1 {
            w.signs[k - 1] = -1;
        } else {
            w.perm.swap(k - 2, k - 1);
            w.signs[k - 2] = -1;
            w.signs[k - 1] = -1;
        }
        Ok(w)
    }

    pub fn apply(&self, v: &[BigRational]) -> RVec {
        let mut out = vec![BigRational::zero(); v.len()];
        for i in 0..v.len() {
            out[self.perm[i]] = if self.signs[i] < 0 {
                -v[i].clone()
            } else {
                v[i].clone()
            };
        }
        out
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let k = self.perm.len();
        let mut perm = vec![0; k];
        let mut signs = vec![1; k];
        for i in 0..k {
            let j = other.perm[i];
            perm[i] = self.perm[j];
            signs[i] = other.signs[i] * self.signs[j];
        }
        WeylElement {
            n: self.n,
            perm,
            signs,
        }
    }

    /// All elements of the Weyl group.
    pub fn all(n: usize) -> Result<Vec<WeylElement>> {
        check_n(n)?;
        let k = rank(n);
        let mut perms = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for p in &perms {
                for j in 0..k {
                    if !p.contains(&j) {
                        let mut q = p.clone();
                        q.push(j);
                        next.push(q);
                    }
                }
            }
            perms = next;
        }
        let mut out = Vec::new();
        for p in perms {
            for mask in 0..(1u32 << k) {
                let signs: Vec<i8> = (0..k)
                    .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                    .collect();
                if let Ok(w) = WeylElement::new(n, p.clone(), signs) {
                    out.push(w);
                }
            }
        }
        Ok(out)
    }
}

/// Formal weight: coordinates, kind, and per-coordinate signs for the
/// nonclassical values `signs[i] * [coords[i]]_+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalWeight {
    pub kind: Kind,
    pub coords: RVec,
    pub signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct WeightJson {
    kind: Kind,
    coords: Vec<String>,
    signs: Vec<i8>,
}

impl Serialize for FormalWeight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightJson {
            kind: self.kind,
            coords: self.coords.iter().map(fmt_rat).collect(),
            signs: self.signs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalWeight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = WeightJson::deserialize(d)?;
        let coords = j
            .coords
            .iter()
            .map(|c| rational(c))
            .collect::<Result<RVec>>()
            .map_err(serde::de::Error::custom)?;
        FormalWeight::with_signs(j.kind, coords, j.signs).map_err(serde::de::Error::custom)
    }
}

impl FormalWeight {
    pub fn classical(coords: RVec) -> Self {
        let k = coords.len();
        FormalWeight {
            kind: Kind::Classical,
            coords,
            signs: vec![1; k],
        }
    }

    pub fn nonclassical(coords: RVec, signs: Vec<i8>) -> Result<Self> {
        FormalWeight::with_signs(Kind::Nonclassical, coords, signs)
    }

    pub fn with_signs(kind: Kind, coords: RVec, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != coords.len() {
            return Err(Error::Domain("signs and coords differ in length".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Domain("signs must be +-1".into()));
        }
        if kind == Kind::Classical && signs.iter().any(|&s| s != 1) {
            return Err(Error::Domain("classical weights carry no signs".into()));
        }
        for c in &coords {
            if !(c * rat_int(2)).is_integer() {
                return Err(Error::Domain(format!(
                    "coordinate {c} is not a half-integer"
                )));
            }
        }
        Ok(FormalWeight {
            kind,
            coords,
            signs,
        })
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// Eigenvalues of `B_1, B_3, ...`.
    pub fn q_weight(&self) -> Result<Vec<QScalar>> {
        self.coords
            .iter()
            .zip(&self.signs)
            .map(|(c, &s)| match self.kind {
                Kind::Classical => QScalar::bracket(c),
                Kind::Nonclassical => {
                    let v = QScalar::bracket_plus(c)?;
                    Ok(if s < 0 { -v } else { v })
                }
            })
            .collect()
    }

    /// The companion values `ñ_i = [lambda_i - 1]` (resp. `±[lambda_i - 1]_+`)
    /// of a standard Verma module.
    pub fn standard_ntilde(&self) -> Result<Vec<QScalar>> {
        let shifted = FormalWeight {
            kind: self.kind,
            coords: self.coords.iter().map(|c| c - rat_int(1)).collect(),
            signs: self.signs.clone(),
        };
        shifted.q_weight()
    }

    pub fn shifted(&self, by: &[BigRational]) -> FormalWeight {
        FormalWeight {
            kind: self.kind,
            coords: vadd(&self.coords, by),
            signs: self.signs.clone(),
        }
    }

    pub fn is_dominant_integral(&self, n: usize) -> bool {
        is_dominant_integral(n, &self.coords)
    }

    /// Dominant integral, and all coordinates in `1/2 + Z` when nonclassical.
    pub fn is_regularly_dominant(&self, n: usize) -> bool {
        if !self.is_dominant_integral(n) {
            return false;
        }
        match self.kind {
            Kind::Classical => true,
            Kind::Nonclassical => self.coords.iter().all(|c| !c.is_integer()),
        }
    }
}

impl fmt::Display for FormalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .zip(&self.signs)
            .map(|(c, &s)| match self.kind {
                Kind::Classical => format!("[{}]", fmt_rat(c)),
                Kind::Nonclassical => {
                    format!("{}[{}]+", if s < 0 { "-" } else { "" }, fmt_rat(c))
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `w.lambda = w(lambda + rho) - rho`; kind and signs are kept.
pub fn dot_action(w: &WeylElement, lam: &FormalWeight) -> Result<FormalWeight> {
    if w.perm.len() != lam.rank() {
        return Err(Error::Domain("rank mismatch in dot action".into()));
    }
    let r = rho(w.n)?;
    let moved = vsub(&w.apply(&vadd(&lam.coords, &r)), &r);
    Ok(FormalWeight {
        kind: lam.kind,
        coords: moved,
        signs: lam.signs.clone(),
    })
}

pub fn is_dominant_integral(n: usize, lam: &[BigRational]) -> bool {
    let k = rank(n);
    if lam.len() != k || k == 0 {
        return false;
    }
    let two = rat_int(2);
    let all_int = lam.iter().all(|c| c.is_integer());
    let all_half = lam
        .iter()
        .all(|c| !c.is_integer() && (c * &two).is_integer());
    if !(all_int || all_half) {
        return false;
    }
    for i in 0..k - 1 {
        let next = if i + 1 == k - 1 && n.is_multiple_of(2) {
            lam[i + 1].abs()
        } else {
            lam[i + 1].clone()
        };
        if lam[i] < next {
            return false;
        }
    }
    if n % 2 == 1 {
        !lam[k - 1].is_negative()
    } else {
        true
    }
}

/// `prod_{alpha > 0} (lambda + rho, alpha) / (rho, alpha)`.
pub fn weyl_dimension(n: usize, lam: &[BigRational]) -> Result<BigInt> {
    check_n(n)?;
    if !is_dominant_integral(n, lam) {
        return Err(Error::Precondition(format!(
            "weight {:?} is not dominant integral for so_{n}",
            lam.iter().map(fmt_rat).collect::<Vec<_>>()
        )));
    }
    let r = rho(n)?;
    let lr = vadd(lam, &r);
    let mut acc = BigRational::one();
    for a in positive_roots(n)? {
        acc = acc * inner(&lr, &a) / inner(&r, &a);
    }
    if !acc.is_integer() {
        return Err(Error::Domain("Weyl dimension is not an integer".into()));
    }
    Ok(acc.to_integer())
}

/// Weights and multiplicities of the irreducible `so_n` module with highest
/// weight `lam` (Freudenthal's formula).
pub fn weyl_character(n: usize, lam: &[BigRational]) -> Result<BTreeMap<RVec, usize>> {
    weyl_dimension(n, lam)?;
    let simple = simple_roots(n)?;
    let pos = positive_roots(n)?;
    let r = rho(n)?;
    let bound = lam[0].abs();
    let inside = |mu: &[BigRational]| mu.iter().all(|x| x.abs() <= bound);
    let lr = vadd(lam, &r);
    let top = inner(&lr, &lr);
    let mut mult: BTreeMap<RVec, BigRational> = BTreeMap::new();
    mult.insert(lam.to_vec(), BigRational::one());
    let mut level = vec![lam.to_vec()];
    while !level.is_empty() {
        let mut next: Vec<RVec> = Vec::new();
        for mu in &level {
            for a in &simple {
                let nu = vsub(mu, a);
                if inside(&nu) && !next.contains(&nu) {
                    next.push(nu);
                }
            }
        }
        for mu in &next {
            let mr = vadd(mu, &r);
            let den = &top - inner(&mr, &mr);
            let mut acc = BigRational::zero();
            for a in &pos {
                let mut nu = vadd(mu, a);
                while inside(&nu) {
                    if let Some(m) = mult.get(&nu) {
                        acc += m * inner(&nu, a);
                    }
                    nu = vadd(&nu, a);
                }
            }
            let m = if den.is_zero() {
                BigRational::zero()
            } else {
                acc * rat_int(2) / den
            };
            mult.insert(mu.clone(), m);
        }
        next.retain(|mu| !mult[mu].is_zero());
        level = next;
    }
    let mut out = BTreeMap::new();
    for (mu, m) in mult {
        if m.is_zero() {
            continue;
        }
        if !m.is_integer() || m.is_negative() {
            return Err(Error::Domain(format!("non-integral multiplicity {m}")));
        }
        let c = m.to_integer().to_usize().unwrap_or(0);
        out.insert(mu, c);
    }
    Ok(out)
}

/// Parse comma-separated rationals.
pub fn parse_coords(text: &str) -> Result<RVec> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| rational(s.trim()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[(i64, i64)]) -> RVec {
        xs.iter().map(|&(p, q)| rat(p, q)).collect()
    }

    #[test]
    fn simple_roots_conventions() {
        assert_eq!(simple_roots(3).unwrap(), vec![v(&[(1, 1)])]);
        assert_eq!(
            simple_roots(4).unwrap(),
            vec![v(&[(1, 1), (-1, 1)]), v(&[(1, 1), (1, 1)])]
        );
        assert_eq!(
            simple_roots(5).unwrap(),
            vec![v(&[(1, 1), (-1, 1)]), v(&[(0, 1), (1, 1)])]
        );
        assert!(simple_roots(2).is_err());
    }

    #[test]
    fn dot_action_so4() {
        let lam = FormalWeight::classical(v(&[(3, 1), (1, 1)]));
        let a = simple_roots(4).unwrap();
        let s1 = WeylElement::simple_reflection(4, 1).unwrap();
        let s2 = WeylElement::simple_reflection(4, 2).unwrap();
        let r1 = rat_int(3 - 1);
        let r2 = rat_int(3 + 1);
        let want1 = vsub(&lam.coords, &vscale(&a[0], &(r1 + rat_int(1))));
        let want2 = vsub(&lam.coords, &vscale(&a[1], &(r2 + rat_int(1))));
        assert_eq!(dot_action(&s1, &lam).unwrap().coords, want1);
        assert_eq!(dot_action(&s2, &lam).unwrap().coords, want2);
        let id = WeylElement::identity(4);
        assert_eq!(dot_action(&id, &lam).unwrap(), lam);
    }

    #[test]
    fn weyl_group_orders() {
        assert_eq!(WeylElement::all(3).unwrap().len(), 2);
        assert_eq!(WeylElement::all(4).unwrap().len(), 4);
        assert_eq!(WeylElement::all(5).unwrap().len(), 8);
        assert_eq!(WeylElement::all(6).unwrap().len(), 24);
    }

    #[test]
    fn dimensions() {
        assert_eq!(weyl_dimension(3, &v(&[(3, 2)])).unwrap(), BigInt::from(4));
        assert_eq!(
            weyl_dimension(5, &v(&[(1, 2), (1, 2)])).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            weyl_dimension(4, &v(&[(1, 1), (0, 1)])).unwrap(),
            BigInt::from(4)
        );
        assert_eq!(
            weyl_dimension(5, &v(&[(1, 1), (0, 1)])).unwrap(),
            BigInt::from(5)
        );
        assert!(weyl_dimension(5, &v(&[(0, 1), (1, 1)])).is_err());
    }

    #[test]
    fn q_weight_distinguishes_formal_signs() {
        let a = FormalWeight::nonclassical(v(&[(3, 2)]), vec![1]).unwrap();
        let b = FormalWeight::nonclassical(v(&[(-3, 2)]), vec![1]).unwrap();
        assert_eq!(a.q_weight().unwrap(), b.q_weight().unwrap());
        assert_ne!(a, b);
    }

    #[test]
    fn json_shape() {
        let a = FormalWeight::nonclassical(v(&[(1, 2), (-1, 2)]), vec![1, -1]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"nonclassical","coords":["1/2","-1/2"],"signs":[1,-1]}"#
        );
        let b: FormalWeight = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn freudenthal_matches_dimension_and_vector_rep() {
        let ch = weyl_character(5, &v(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(ch.len(), 5);
        assert!(ch.values().all(|&m| m == 1));
        assert!(ch.contains_key(&v(&[(0, 1), (-1, 1)])));
        for (n, lam) in [
            (3, v(&[(3, 1)])),
            (4, v(&[(2, 1), (1, 1)])),
            (4, v(&[(3, 2), (-1, 2)])),
            (5, v(&[(1, 1), (1, 1)])),
            (5, v(&[(3, 2), (1, 2)])),
            (6, v(&[(1, 1), (1, 1), (0, 1)])),
            (7, v(&[(2, 1), (1, 1), (0, 1)])),
        ] {
            let ch = weyl_character(n, &lam).unwrap();
            let total: usize = ch.values().sum();
            assert_eq!(
                BigInt::from(total),
                weyl_dimension(n, &lam).unwrap(),
                "{n} {lam:?}"
            );
            for w in WeylElement::all(n).unwrap() {
                for (mu, m) in &ch {
                    assert_eq!(ch.get(&w.apply(mu)), Some(m));
                }
            }
        }
    }
}
