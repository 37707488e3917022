//! Deciding whether two finite-dimensional modules agree, by Cartan spectra
//! and highest-weight vectors.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::torus::{by_value, fmt_complex, highest_weight_vectors};
use crate::error::{Error, Result};
use crate::linalg::{cluster, Matrix};
use crate::quotients::{intertwiner, FiniteModule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Match,
    Mismatch,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "match",
            Verdict::Mismatch => "mismatch",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug)]
pub struct MatchReport {
    pub verdict: Verdict,
    pub reason: String,
    /// Eigenvalues with multiplicity of a fixed generic combination of the
    /// Cartan generators.
    pub spectrum_a: Vec<(Complex64, usize)>,
    pub spectrum_b: Vec<(Complex64, usize)>,
}

impl MatchReport {
    fn new(verdict: Verdict, reason: impl Into<String>) -> Self {
        MatchReport {
            verdict,
            reason: reason.into(),
            spectrum_a: Vec::new(),
            spectrum_b: Vec::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        let spec = |s: &[(Complex64, usize)]| {
            s.iter()
                .map(|(v, m)| json!({"value": fmt_complex(*v), "multiplicity": m}))
                .collect::<Vec<_>>()
        };
        json!({
            "verdict": self.verdict.to_string(),
            "reason": self.reason,
            "spectrum_a": spec(&self.spectrum_a),
            "spectrum_b": spec(&self.spectrum_b),
        })
    }
}

fn cartan_spectrum(b: &[Matrix<Complex64>], coeffs: &[f64]) -> Result<Vec<(Complex64, usize)>> {
    let d = b[0].rows();
    let mut c = Matrix::zeros(d, d);
    for (k, w) in coeffs.iter().enumerate() {
        c = c.add(&b[2 * k].scale(&Complex64::new(*w, 0.0)))?;
    }
    let mut s = cluster(&c.eigenvalues()?, 1e-6);
    s.sort_by(|x, y| by_value(&x.0, &y.0));
    Ok(s)
}

fn same_multiset(a: &[(Complex64, usize)], b: &[(Complex64, usize)], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter()
            .all(|(v, m)| b.iter().any(|(w, k)| k == m && (v - w).norm() <= tol))
}

/// `B_1`-eigenvalues of highest-weight vectors of an so3 module, with the
/// dimension of the space of such vectors.
pub fn highest_weight_inventory(m: &FiniteModule, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    if m.n != 3 {
        return Err(Error::Precondition(format!(
            "highest-weight inventories are computed for so3 (got n = {})",
            m.n
        )));
    }
    let q = m
        .q_value()
        .ok_or_else(|| Error::Precondition("symbolic module: specialize it first".into()))?;
    let b = m.complex_matrices()?;
    let vecs = highest_weight_vectors(&b[0], &b[1], q + q.inv(), tol)?;
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for (mu, _) in cluster(&vecs.iter().map(|(mu, _)| *mu).collect::<Vec<_>>(), 1e-6) {
        let group: Vec<Vec<Complex64>> = vecs
            .iter()
            .filter(|(v, _)| (v - mu).norm() < 1e-6)
            .map(|(_, x)| x.clone())
            .collect();
        out.push((mu, Matrix::from_rows(group)?.rank(tol)?));
    }
    out.sort_by(|x, y| by_value(&x.0, &y.0));
    Ok(out)
}

/// Compare two modules of the same `so_n` at the same `q`.
pub fn match_by_character(
    a: &FiniteModule,
    b: &FiniteModule,
    tol: f64,
    seed: u64,
) -> Result<MatchReport> {
    if a.n != b.n {
        return Ok(MatchReport::new(
            Verdict::Mismatch,
            format!("different algebras: so_{} and so_{}", a.n, b.n),
        ));
    }
    let (Some(qa), Some(qb)) = (a.q_value(), b.q_value()) else {
        return Ok(MatchReport::new(
            Verdict::Inconclusive,
            "symbolic module: specialize both modules first",
        ));
    };
    if (qa - qb).norm() > 1e-9 {
        return Ok(MatchReport::new(
            Verdict::Inconclusive,
            format!("different q: {} and {}", fmt_complex(qa), fmt_complex(qb)),
        ));
    }
    if a.dim() != b.dim() {
        return Ok(MatchReport::new(
            Verdict::Mismatch,
            format!("dimensions {} and {}", a.dim(), b.dim()),
        ));
    }
    let ma = a.complex_matrices()?;
    let mb = b.complex_matrices()?;
    if a.dim() == 0 {
        return Ok(MatchReport::new(Verdict::Match, "both modules are zero"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..a.n / 2).map(|_| rng.random_range(1.0..2.0)).collect();
    let sa = cartan_spectrum(&ma, &coeffs)?;
    let sb = cartan_spectrum(&mb, &coeffs)?;
    let mut report = MatchReport::new(Verdict::Inconclusive, "");
    report.spectrum_a = sa.clone();
    report.spectrum_b = sb.clone();
    if !same_multiset(&sa, &sb, 1e-6) {
        report.verdict = Verdict::Mismatch;
        report.reason = "Cartan spectra differ".into();
        return Ok(report);
    }
    if let (Some((s1, ea)), Some((s2, eb))) = (a.exact(), b.exact()) {
        if s1 == s2 {
            let found = intertwiner(ea, eb)?.is_some();
            report.verdict = if found {
                Verdict::Match
            } else {
                Verdict::Mismatch
            };
            report.reason = if found {
                "exact intertwiner found".into()
            } else {
                "Cartan spectra agree but no invertible intertwiner exists".into()
            };
            return Ok(report);
        }
    }
    if a.n != 3 {
        report.reason = "Cartan spectra agree; no highest-weight inventory for n > 3".into();
        return Ok(report);
    }
    let ia = highest_weight_inventory(a, tol)?;
    let ib = highest_weight_inventory(b, tol)?;
    if same_multiset(&ia, &ib, 1e-6) {
        report.verdict = Verdict::Match;
        report.reason = "Cartan spectra and highest-weight vectors agree".into();
    } else {
        report.verdict = Verdict::Mismatch;
        report.reason = "highest-weight vectors differ".into();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, RootBranch};
    use crate::quotients::Matrices;
    use crate::rank_low::so3_finite_quotient;
    use crate::specialize::{qtorus_build, qtorus_decompose_so3, TorusVariant};
    use crate::weights::{FormalWeight, Kind};

    fn so3_at_root(lam: i64, ell: i64) -> FiniteModule {
        let q = so3_finite_quotient(Kind::Classical, &rat(lam, 1), 1).unwrap();
        FiniteModule::new(
            3,
            Some(FormalWeight::classical(vec![rat(lam, 1)])),
            (0..q.rep.dim).map(|j| format!("v_{j}")).collect(),
            Matrices::Symbolic {
                b: q.rep.matrices(),
            },
            "so3",
        )
        .unwrap()
        .specialize_root(ell, RootBranch::default())
        .unwrap()
    }

    #[test]
    fn torus_summand_matches_finite_quotient() {
        let rep = qtorus_build(3, 4, TorusVariant::Plus, 1, RootBranch::default(), 1e-9).unwrap();
        let d = qtorus_decompose_so3(&rep, 1e-9).unwrap();
        let three = d.summands.iter().find(|s| s.dim == 3).unwrap();
        let r = match_by_character(&three.module, &so3_at_root(1, 4), 1e-9, 7).unwrap();
        assert_eq!(r.verdict, Verdict::Match, "{}", r.reason);
        let one = d.summands.iter().find(|s| s.dim == 1).unwrap();
        let r = match_by_character(&one.module, &so3_at_root(1, 4), 1e-9, 7).unwrap();
        assert_eq!(r.verdict, Verdict::Mismatch);
    }

    #[test]
    fn self_match_and_dimension_mismatch() {
        let a = so3_at_root(2, 11);
        assert_eq!(
            match_by_character(&a, &a, 1e-9, 1).unwrap().verdict,
            Verdict::Match
        );
        let b = so3_at_root(1, 11);
        assert_eq!(
            match_by_character(&a, &b, 1e-9, 1).unwrap().verdict,
            Verdict::Mismatch
        );
        let c = so3_at_root(2, 13);
        assert_eq!(
            match_by_character(&a, &c, 1e-9, 1).unwrap().verdict,
            Verdict::Inconclusive
        );
    }
}
