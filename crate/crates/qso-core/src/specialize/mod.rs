//! Root-of-unity numerics: q-torus representations, their highest-weight
//! decomposition, Gram norms and comparison of modules by character.

mod gram;
mod matching;
mod torus;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qscalar::RootBranch;
use crate::weights::Kind;

pub use gram::{gram_analysis, so3_gram_exact, so4_alpha1_string, GramOptions, GramReport};
pub use matching::{highest_weight_inventory, match_by_character, MatchReport, Verdict};
pub use torus::{
    label_string, qtorus_build, qtorus_decompose_so3, selfadjoint_residual, QTorusRep,
    TorusDecomposition, TorusSummand, TorusVariant,
};

/// `q = exp(2 pi i j / ell)` with real powers `q^x = exp(2 pi i j x / ell)`,
/// matching `s = q^{1/2}` of [`RootBranch`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootOfUnity {
    pub ell: i64,
    pub branch: RootBranch,
}

impl RootOfUnity {
    pub fn new(ell: i64, branch: RootBranch) -> Result<Self> {
        if ell < 2 {
            return Err(Error::Precondition(format!(
                "ℓ must be at least 2 (got {ell})"
            )));
        }
        let r = RootOfUnity { ell, branch };
        if r.q_minus().norm() < 1e-12 {
            return Err(Error::Precondition(format!(
                "q - 1/q vanishes for ℓ = {ell}, j = {}",
                branch.j
            )));
        }
        Ok(r)
    }

    pub fn q_pow(&self, x: f64) -> Complex64 {
        let arg = 2.0 * std::f64::consts::PI * self.branch.j as f64 * x / self.ell as f64;
        Complex64::from_polar(1.0, arg)
    }

    pub fn q(&self) -> Complex64 {
        self.q_pow(1.0)
    }

    pub fn s(&self) -> Complex64 {
        self.q_pow(0.5)
    }

    pub fn q_minus(&self) -> Complex64 {
        self.q_pow(1.0) - self.q_pow(-1.0)
    }

    /// `[2] = q + 1/q`
    pub fn two(&self) -> Complex64 {
        self.q_pow(1.0) + self.q_pow(-1.0)
    }

    pub fn bracket(&self, x: f64) -> Complex64 {
        (self.q_pow(x) - self.q_pow(-x)) / self.q_minus()
    }

    pub fn bracket_plus(&self, x: f64) -> Complex64 {
        Complex64::i() * (self.q_pow(x) + self.q_pow(-x)) / self.q_minus()
    }

    pub fn curly(&self, x: f64) -> Complex64 {
        self.q_pow(x) + self.q_pow(-x)
    }

    /// `[x]` or `sign [x]_+`.
    pub fn weight(&self, kind: Kind, sign: i8, x: f64) -> Complex64 {
        match kind {
            Kind::Classical => self.bracket(x),
            Kind::Nonclassical => self.bracket_plus(x) * f64::from(sign),
        }
    }
}

/// `|[λ]_+ - [λ + ℓ/4]|` at an even `ℓ`.
pub fn plus_shift_residual(lam: f64, root: &RootOfUnity) -> Result<f64> {
    if root.ell % 2 != 0 {
        return Err(Error::Precondition(format!(
            "[λ]+ = [λ + ℓ/4] needs an even ℓ (got {})",
            root.ell
        )));
    }
    let shift = root.ell as f64 / 4.0;
    Ok((root.bracket_plus(lam) - root.bracket(lam + shift)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, QScalar};

    #[test]
    fn root_values_match_symbolic_evaluation() {
        let r = RootOfUnity::new(7, RootBranch { j: 3 }).unwrap();
        let x = QScalar::bracket_plus(&rat(5, 2)).unwrap();
        let v = x.eval_at_root(7, r.branch).unwrap();
        assert!((v - r.bracket_plus(2.5)).norm() < 1e-12);
        let y = QScalar::bracket(&rat(-3, 2))
            .unwrap()
            .eval_at_root(7, r.branch)
            .unwrap();
        assert!((y - r.bracket(-1.5)).norm() < 1e-12);
    }

    #[test]
    fn plus_shift_identity() {
        let r = RootOfUnity::new(10, RootBranch::default()).unwrap();
        for lam in [0.0, 0.3, 1.5, -2.25, 7.0] {
            assert!(plus_shift_residual(lam, &r).unwrap() < 1e-12);
        }
        let odd = RootOfUnity::new(5, RootBranch::default()).unwrap();
        assert!(plus_shift_residual(0.5, &odd).is_err());
    }
}
