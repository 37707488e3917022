//! Splitting of nonclassical quotients, intertwiners and the so3
//! classification.

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::echelon::{Echelon, SparseVec};
use super::module::{FiniteModule, Matrices};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qscalar::{rat, rat_int, GaussRat, QScalar};
use crate::rank_low::{so3_finite_quotient, weight_value};
use crate::ring::Coeff;
use crate::weights::{FormalWeight, Kind};

fn to_sparse<C: Coeff>(v: &[C]) -> SparseVec<C> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Smallest subspace containing `start` and invariant under `gens`.
/// Basis of the smallest subspace containing `start` and stable under `gens`.
pub fn submodule_closure<C: Coeff>(
    gens: &[&Matrix<C>],
    start: &[Vec<C>],
    tol: f64,
) -> Result<Vec<Vec<C>>> {
    let mut ech = Echelon::new(tol);
    let mut out = Vec::new();
    let mut queue: Vec<Vec<C>> = start.to_vec();
    while let Some(v) = queue.pop() {
        if !ech.insert(to_sparse(&v))? {
            continue;
        }
        for g in gens {
            queue.push(g.mul_vec(&v));
        }
        out.push(v);
    }
    Ok(out)
}

/// Basis of `span(a) ∩ span(b)`; both inputs are linearly independent.
fn intersect(a: &[Vec<GaussRat>], b: &[Vec<GaussRat>], d: usize) -> Result<Vec<Vec<GaussRat>>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let mut cols: Vec<Vec<GaussRat>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| x.neg()).collect()));
    let m = Matrix::from_cols(d, &cols);
    let am = Matrix::from_cols(d, a);
    let mut out = Vec::new();
    for k in m.kernel(0.0)? {
        out.push(am.mul_vec(&k[..a.len()]));
    }
    Ok(out)
}

/// `T` with `T a_j = b_j T` for all `j` and `T` invertible, if one exists.
pub fn intertwiner(
    a: &[Matrix<GaussRat>],
    b: &[Matrix<GaussRat>],
) -> Result<Option<Matrix<GaussRat>>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Domain(
            "intertwiner needs matching generator lists".into(),
        ));
    }
    let d = a[0].rows();
    if b[0].rows() != d {
        return Ok(None);
    }
    let mut rows = Vec::new();
    for (aj, bj) in a.iter().zip(b) {
        for p in 0..d {
            for q in 0..d {
                let mut row = vec![GaussRat::zero(); d * d];
                for r in 0..d {
                    // (T a)_{pq} - (b T)_{pq}
                    row[p * d + r] = row[p * d + r].add(aj.get(r, q));
                    row[r * d + q] = row[r * d + q].sub(bj.get(p, r));
                }
                rows.push(row);
            }
        }
    }
    let ker = Matrix::from_rows(rows)?.kernel(0.0)?;
    if ker.is_empty() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for attempt in 0..8 {
        let mut t = vec![GaussRat::zero(); d * d];
        for (i, k) in ker.iter().enumerate() {
            let c = if attempt == 0 {
                GaussRat::from_int(i as i64 + 1)
            } else {
                GaussRat::from_int(rng.random_range(-9..=9))
            };
            for (x, y) in t.iter_mut().zip(k) {
                *x = x.add(&c.mul(y));
            }
        }
        let tm = Matrix::from_rows(t.chunks(d).map(|r| r.to_vec()).collect())?;
        if tm.rank(0.0)? == d {
            return Ok(Some(tm));
        }
    }
    Ok(None)
}

/// Result of splitting a nonclassical module.
#[derive(Clone, Debug)]
pub struct SplitReport {
    pub summands: Vec<FiniteModule>,
    /// Sign pattern of each summand, one entry per so3 pair `(B_{2i-1}, B_{2i})`.
    pub patterns: Vec<Vec<i8>>,
    /// `tr B_{2i}` on each summand.
    pub even_traces: Vec<Vec<GaussRat>>,
    pub distinct_signatures: bool,
    /// Every pair of summands is intertwined after flipping the signs of the
    /// `B_{2i}` where their patterns differ.
    pub intertwined: bool,
}

/// `i[r+1]/(s - s^{-1})`.
fn sigma(r: i64, s: &GaussRat) -> Result<GaussRat> {
    let x = QScalar::i() * QScalar::bracket_int(r + 1) / (QScalar::s_pow(1) - QScalar::s_pow(-1));
    x.eval_exact(s)
}

/// Decomposition of a nonclassical module into `2^{⌊(n-1)/2⌋}` summands.
///
/// For each pair `(B_{2i-1}, B_{2i})`, `B_{2i}` compressed to the
/// `±[1/2]_+`-eigenspace of `B_{2i-1}` has eigenvalues `±i[r+1]/(s-s^{-1})`;
/// the pair-submodules generated by the two sign classes are intersected
/// over all pairs.
pub fn nonclassical_split(m: &FiniteModule) -> Result<SplitReport> {
    let hw = m
        .highest_weight
        .as_ref()
        .filter(|w| w.kind == Kind::Nonclassical)
        .ok_or_else(|| Error::Precondition("splitting needs a nonclassical module".into()))?;
    let (s, b) = m.exact().ok_or_else(|| {
        Error::Precondition("splitting needs an exact rational specialization".into())
    })?;
    let d = m.dim();
    let pairs = (m.n - 1) / 2;
    let half = rat(1, 2);
    let mut parts: Vec<[Vec<Vec<GaussRat>>; 2]> = Vec::new();
    for i in 1..=pairs {
        let odd = &b[2 * i - 2];
        let even = &b[2 * i - 1];
        let c = weight_value(Kind::Nonclassical, hw.signs[i - 1], &half)?.eval_exact(s)?;
        let shifted = odd.shift(&c);
        let e = shifted.kernel(0.0)?;
        let f = Matrix::span_basis(&shifted.transpose().to_rows(), d, 0.0)?;
        let mut cols = e.clone();
        cols.extend(f);
        let t = Matrix::from_cols(d, &cols);
        if t.rank(0.0)? != d {
            return Err(Error::Precondition(format!(
                "B_{} is not diagonalizable",
                2 * i - 1
            )));
        }
        let mut ccols = Vec::new();
        for v in &e {
            let x = t.solve(&even.mul_vec(v), 0.0)?;
            ccols.push(x[..e.len()].to_vec());
        }
        let cm = Matrix::from_cols(e.len(), &ccols);
        let em = Matrix::from_cols(d, &e);
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for r in 0..d as i64 {
            let sg = sigma(r, s)?;
            for k in cm.shift(&sg).kernel(0.0)? {
                plus.push(em.mul_vec(&k));
            }
            for k in cm.shift(&sg.neg()).kernel(0.0)? {
                minus.push(em.mul_vec(&k));
            }
        }
        if plus.len() + minus.len() != e.len() {
            return Err(Error::Precondition(format!(
                "B_{} on the [1/2]+ eigenspace has unexpected eigenvalues",
                2 * i
            )));
        }
        let gens = [odd, even];
        parts.push([
            submodule_closure(&gens, &plus, 0.0)?,
            submodule_closure(&gens, &minus, 0.0)?,
        ]);
    }

    let count = 1usize << pairs;
    if !d.is_multiple_of(count) {
        return Err(Error::Domain(format!(
            "dimension {d} is not divisible by {count}"
        )));
    }
    let mut summands = Vec::new();
    let mut patterns = Vec::new();
    let mut even_traces = Vec::new();
    for code in 0..count {
        let pattern: Vec<i8> = (0..pairs)
            .map(|i| {
                if code >> (pairs - 1 - i) & 1 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        let mut space = parts[0][usize::from(pattern[0] < 0)].clone();
        for i in 1..pairs {
            space = intersect(&space, &parts[i][usize::from(pattern[i] < 0)], d)?;
        }
        if space.len() != d / count {
            return Err(Error::Domain(format!(
                "summand {pattern:?} has dimension {}, expected {}",
                space.len(),
                d / count
            )));
        }
        let mats = b
            .iter()
            .map(|x| x.restrict(&space, 0.0))
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::Domain(format!("summand {pattern:?} is not invariant")))?;
        even_traces.push(
            (1..=pairs)
                .map(|i| mats[2 * i - 1].trace())
                .collect::<Vec<_>>(),
        );
        let tag: String = pattern
            .iter()
            .map(|&p| if p > 0 { '+' } else { '-' })
            .collect();
        summands.push(FiniteModule::new(
            m.n,
            Some(hw.clone()),
            (0..space.len()).map(|j| format!("{tag}{j}")).collect(),
            Matrices::Exact {
                s: s.clone(),
                b: mats,
            },
            format!("nonclassical_split {tag}"),
        )?);
        patterns.push(pattern);
    }
    let mut distinct = true;
    for a in 0..count {
        for c in a + 1..count {
            distinct &= even_traces[a] != even_traces[c];
        }
    }
    let mut intertwined = true;
    for a in 0..count {
        for c in a + 1..count {
            let (_, ma) = summands[a].exact().expect("exact");
            let (_, mc) = summands[c].exact().expect("exact");
            let flipped: Vec<Matrix<GaussRat>> = mc
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let gen = j + 1;
                    if gen % 2 == 0 && patterns[a][gen / 2 - 1] != patterns[c][gen / 2 - 1] {
                        x.scale(&GaussRat::from_int(-1))
                    } else {
                        x.clone()
                    }
                })
                .collect();
            intertwined &= intertwiner(ma, &flipped)?.is_some();
        }
    }
    Ok(SplitReport {
        summands,
        patterns,
        even_traces,
        distinct_signatures: distinct,
        intertwined,
    })
}

/// Does a random vector generate the whole module? Exact for rational
/// specializations, tolerance `1e-8` otherwise.
pub fn cyclicity_probe(m: &FiniteModule, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = m.dim();
    let mut ints: Vec<i64> = (0..d).map(|_| rng.random_range(-3..=3)).collect();
    if ints.iter().all(|&x| x == 0) && d > 0 {
        ints[0] = 1;
    }
    match &m.matrices {
        Matrices::Exact { b, .. } => {
            let v: Vec<GaussRat> = ints.iter().map(|&x| GaussRat::from_int(x)).collect();
            let gens: Vec<&Matrix<GaussRat>> = b.iter().collect();
            Ok(submodule_closure(&gens, &[v], 0.0)?.len() == d)
        }
        _ => {
            let b = m.complex_matrices()?;
            let v: Vec<Complex64> = ints
                .iter()
                .map(|&x| Complex64::new(x as f64, 0.0))
                .collect();
            let gens: Vec<&Matrix<Complex64>> = b.iter().collect();
            Ok(submodule_closure(&gens, &[v], 1e-8)?.len() == d)
        }
    }
}

#[derive(Clone, Debug)]
pub struct So3Classification {
    pub modules: Vec<FiniteModule>,
    /// `(tr B_1, tr B_2)` for each module.
    pub signatures: Vec<(GaussRat, GaussRat)>,
    pub distinct: bool,
}

/// The five simple so3 modules of dimension `k`: the classical
/// `λ = (k-1)/2` and the summands `L_±` of the nonclassical `λ = k - 1/2`
/// quotients with `m = ±[λ]_+`.
pub fn classify_so3(k: usize, s: &GaussRat) -> Result<So3Classification> {
    if k == 0 {
        return Err(Error::Precondition("dimension must be at least 1".into()));
    }
    let ki = k as i64;
    let mut modules = Vec::new();
    let lam_c: BigRational = rat(ki - 1, 2);
    let q = so3_finite_quotient(Kind::Classical, &lam_c, 1)?;
    let b = q.rep.matrices();
    modules.push(
        FiniteModule::new(
            3,
            Some(FormalWeight::classical(vec![lam_c])),
            (0..k).map(|j| format!("v{j}")).collect(),
            Matrices::Symbolic { b },
            "classify_so3 classical",
        )?
        .specialize_exact(s)?,
    );
    let lam_n: BigRational = rat_int(ki) - rat(1, 2);
    for sign in [1i8, -1] {
        let q = so3_finite_quotient(Kind::Nonclassical, &lam_n, sign)?;
        for part in &q.split {
            let tag = format!(
                "classify_so3 m={}[{}]+ L{}",
                if sign > 0 { "+" } else { "-" },
                crate::qscalar::fmt_rat(&lam_n),
                if part.sign > 0 { "+" } else { "-" }
            );
            modules.push(
                FiniteModule::new(
                    3,
                    Some(FormalWeight::nonclassical(vec![lam_n.clone()], vec![sign])?),
                    (0..k).map(|j| format!("w{j}")).collect(),
                    Matrices::Symbolic {
                        b: vec![part.b1.clone(), part.b2.clone()],
                    },
                    tag,
                )?
                .specialize_exact(s)?,
            );
        }
    }
    if let Some(bad) = modules.iter().find(|m| m.dim() != k) {
        return Err(Error::Domain(format!(
            "{} has dimension {}, expected {k}",
            bad.provenance,
            bad.dim()
        )));
    }
    let signatures: Vec<(GaussRat, GaussRat)> = modules
        .iter()
        .map(|m| {
            let (_, b) = m.exact().expect("specialized");
            (b[0].trace(), b[1].trace())
        })
        .collect();
    let mut distinct = true;
    for a in 0..signatures.len() {
        for c in a + 1..signatures.len() {
            distinct &= signatures[a] != signatures[c];
        }
    }
    Ok(So3Classification {
        modules,
        signatures,
        distinct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotients::{weyl_quotient, QuotientOptions};

    fn two() -> GaussRat {
        GaussRat::from_int(2)
    }

    #[test]
    fn five_modules_per_dimension() {
        for k in 1..=3 {
            let c = classify_so3(k, &two()).unwrap();
            assert_eq!(c.modules.len(), 5);
            assert!(c.distinct, "k = {k}");
            for m in &c.modules {
                assert!(m.relation_report(0.0).unwrap().exact_zero);
            }
        }
    }

    #[test]
    fn so3_split_of_five_halves() {
        let lam = FormalWeight::nonclassical(vec![rat(5, 2)], vec![1]).unwrap();
        let m = weyl_quotient(3, &lam, &QuotientOptions::default()).unwrap();
        let r = nonclassical_split(&m).unwrap();
        assert_eq!(r.summands.len(), 2);
        assert!(r.summands.iter().all(|x| x.dim() == 3));
        assert!(r.distinct_signatures && r.intertwined);
    }

    #[test]
    fn classical_input_is_rejected() {
        let c = classify_so3(2, &two()).unwrap();
        assert!(matches!(
            nonclassical_split(&c.modules[0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn intertwiner_of_a_module_with_itself() {
        let c = classify_so3(3, &two()).unwrap();
        let (_, b) = c.modules[0].exact().unwrap();
        assert!(intertwiner(b, b).unwrap().is_some());
        let (_, b2) = c.modules[1].exact().unwrap();
        assert!(intertwiner(b, b2).unwrap().is_none());
        assert!(cyclicity_probe(&c.modules[0], 1).unwrap());
    }
}
