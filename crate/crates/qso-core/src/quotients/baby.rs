//! Baby Verma modules: quotients of Verma modules with generic weights at a
//! primitive root of unity by the submodules generated at `v_{λ-ℓα_i}`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::module::{FiniteModule, Matrices};
use super::{truncated_quotient, Attempt};
use crate::error::{Error, Result};
use crate::qscalar::{fmt_rat, rat_int, RootBranch};
use crate::ring::Coeff;
use crate::specialize::RootOfUnity;
use crate::verma::{HighestWeightData, ModuleVector, VermaModule};
use crate::weights::Kind;

#[derive(Clone, Debug)]
pub struct BabyOptions {
    pub ell: i64,
    pub branch: RootBranch,
    /// Coefficients `a_i` of the generators `a_i v_λ + v_{λ-ℓα_i}`.
    pub a: Vec<Complex64>,
    /// Rank tolerance.
    pub tol: f64,
}

impl BabyOptions {
    pub fn new(ell: i64) -> Self {
        BabyOptions {
            ell,
            branch: RootBranch::default(),
            a: Vec::new(),
            tol: 1e-8,
        }
    }
}

/// Baby Verma module of `so_3` or `so_4` of dimension `ℓ^d`, `d` the number
/// of positive roots, at `s = exp(πij/ℓ)`.
pub fn baby_verma(
    n: usize,
    kind: Kind,
    lam: &[BigRational],
    signs: &[i8],
    opts: &BabyOptions,
) -> Result<FiniteModule> {
    if n != 3 && n != 4 {
        return Err(Error::Precondition(format!(
            "baby Verma modules are built for n = 3, 4 only (got {n})"
        )));
    }
    let k = n / 2;
    if lam.len() != k || signs.len() != k {
        return Err(Error::Domain(format!(
            "so_{n} needs {k} coordinates and signs"
        )));
    }
    if let Some(x) = lam.iter().find(|x| (*x * rat_int(4)).is_integer()) {
        return Err(Error::Precondition(format!(
            "coordinate {} lies in Z/4; baby Verma modules need generic weights",
            fmt_rat(x)
        )));
    }
    if opts.ell < 2 {
        return Err(Error::Precondition("ℓ must be at least 2".into()));
    }
    if !opts.a.is_empty() && opts.a.len() != k {
        return Err(Error::Domain(format!("a-vector needs {k} entries")));
    }
    let ell = opts.ell as usize;
    let rv = RootOfUnity::new(opts.ell, opts.branch)?;
    let s = opts.branch.s_value(opts.ell);
    let x: Vec<f64> = lam.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    let val = |i: usize, shift: f64| rv.weight(kind, signs[i], x[i] + shift);
    let m: Vec<Complex64> = (0..k).map(|i| val(i, 0.0)).collect();
    let nt: Vec<Complex64> = (0..(n - 1) / 2).map(|i| val(i, -1.0)).collect();
    let mut verma = VermaModule::new(HighestWeightData::new(n, m, nt)?, &s)?;
    let v0 = verma.highest_vector();

    let mut gens: Vec<ModuleVector<Complex64>> = Vec::new();
    if n == 3 {
        // v_{j+1} = B_2 v_j - α_{j-1,j} v_{j-1}
        let mj = |j: i64| val(0, -(j as f64));
        let alpha = |j: i64| -> Result<Complex64> {
            let num = mj(0) * mj(-1) - mj(j - 1) * mj(j);
            let den = (mj(j - 1) - mj(j + 1)) * (mj(j - 2) - mj(j));
            num.div(&den)
        };
        let mut prev = ModuleVector::zero();
        let mut cur = v0.clone();
        for j in 0..ell as i64 {
            let mut next = verma.act(2, &cur)?;
            if j > 0 {
                next = next.sub(&prev.scale(&alpha(j)?));
            }
            prev = cur;
            cur = next;
        }
        gens.push(cur);
    } else {
        for i in 1..=2 {
            let mut v = v0.clone();
            for r in 1..=ell as i64 {
                let shift = if i == 1 {
                    (r - 2) as f64
                } else {
                    (2 - r) as f64
                };
                let c = val(1, shift);
                let w = verma.act(2, &v)?;
                v = verma.act(3, &w)?.sub(&w.scale(&c));
            }
            gens.push(v);
        }
    }
    for (g, a) in gens.iter_mut().zip(&opts.a) {
        *g = g.add(&v0.scale(a));
    }

    let d = if n == 3 { 1 } else { 2 };
    let expected = ell.pow(d);
    let mut cap = if n == 3 { ell - 1 } else { 2 * ell - 2 } as u32;
    for _ in 0..3 {
        match truncated_quotient(&mut verma, &gens, &[cap], 3, opts.tol)? {
            Attempt::NeedCap => cap += 1,
            Attempt::Done(q) => {
                if q.basis.len() != expected {
                    return Err(Error::Tolerance(format!(
                        "numerical rank ambiguity: quotient dimension {} instead of {expected}",
                        q.basis.len()
                    )));
                }
                let coords: Vec<String> = lam.iter().map(fmt_rat).collect();
                return FiniteModule::new(
                    n,
                    None,
                    q.basis.iter().map(|w| w.to_string()).collect(),
                    Matrices::Numeric {
                        ell: opts.ell,
                        branch: opts.branch,
                        b: q.mats,
                    },
                    format!("baby_verma {kind} λ=({})", coords.join(", ")),
                );
            }
        }
    }
    Err(Error::Budget {
        budget: 3,
        stuck: format!("baby Verma truncation did not close at cap {cap}"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cluster;
    use crate::qscalar::rat;

    #[test]
    fn so3_baby_verma_has_dimension_ell() {
        let m = baby_verma(3, Kind::Classical, &[rat(1, 3)], &[1], &BabyOptions::new(5)).unwrap();
        assert_eq!(m.dim(), 5);
        assert!(m.relation_report(1e-9).unwrap().ok());
        let b = m.complex_matrices().unwrap();
        let ev = b[0].eigenvalues().unwrap();
        assert_eq!(cluster(&ev, 1e-6).len(), 5);
    }

    #[test]
    fn so4_baby_verma_has_dimension_ell_squared() {
        let m = baby_verma(
            4,
            Kind::Classical,
            &[rat(2, 3), rat(1, 5)],
            &[1, 1],
            &BabyOptions::new(3),
        )
        .unwrap();
        assert_eq!(m.dim(), 9);
        assert!(m.relation_report(1e-9).unwrap().ok());
    }

    #[test]
    fn a_vector_family() {
        let mut o = BabyOptions::new(4);
        o.a = vec![Complex64::new(0.5, -1.0)];
        let m = baby_verma(3, Kind::Classical, &[rat(2, 7)], &[1], &o).unwrap();
        assert_eq!(m.dim(), 4);
        assert!(m.relation_report(1e-9).unwrap().ok());
    }

    #[test]
    fn quarter_integers_are_rejected() {
        let e = baby_verma(3, Kind::Classical, &[rat(3, 4)], &[1], &BabyOptions::new(5));
        assert!(matches!(e, Err(Error::Precondition(_))));
    }
}
