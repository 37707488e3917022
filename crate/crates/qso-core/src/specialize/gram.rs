//! Norms of weight vectors under an invariant bilinear form at a root of
//! unity, propagated from `||v_0||^2 = 1` along weight strings.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde_json::{json, Value};

use super::torus::fmt_complex;
use super::RootOfUnity;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::qscalar::{rat_f64, rat_int, QScalar, RootBranch};
use crate::rank_low::{Lam, So3Rep, So4Rep, WeightSequence};
use crate::weights::{FormalWeight, Kind};

#[derive(Clone, Debug)]
pub struct GramOptions {
    pub ell: i64,
    pub branch: RootBranch,
    /// Length of the so3 string, or the minimal so4 window side.
    pub depth: usize,
    /// Norms below this are reported as zero.
    pub tol: f64,
    /// Orthogonality tolerance of the zero-norm certificate.
    pub orth_tol: f64,
}

impl GramOptions {
    pub fn new(ell: i64) -> Self {
        GramOptions {
            ell,
            branch: RootBranch::default(),
            depth: 8,
            tol: 1e-9,
            orth_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GramReport {
    pub n: usize,
    pub lam: FormalWeight,
    pub ell: i64,
    pub labels: Vec<String>,
    /// `||v||^2`; `None` where the recursion hits a flagged denominator.
    pub norms: Vec<Option<Complex64>>,
    /// Indices into `labels` of vectors with vanishing norm.
    pub zero_norm: Vec<usize>,
    pub flagged: Vec<(String, String)>,
    /// `max |(B_i v, w) - (v, B_i w)|` over the computed basis, per generator.
    pub residuals: Vec<f64>,
    /// `(i, ||v_{s_i.λ}||^2)`.
    pub reflection_norms: Vec<(usize, Option<Complex64>)>,
    /// Largest disagreement between two recursion paths to the same weight.
    pub path_discrepancy: f64,
    /// Largest `|(v, w)|` of a zero-norm vector against the window.
    pub zero_orthogonality: f64,
    /// Zero-norm vectors are orthogonal to the window within `orth_tol`.
    pub zero_certified: bool,
    /// so3 only: `(j, α_{j-1,j})` where `m_j = ±[0]_+`; for a unitary
    /// quotient this is `||B_2 v_j||^2 / ||v_j||^2`.
    pub zero_plus: Vec<(usize, Complex64)>,
}

impl GramReport {
    pub fn norm_of(&self, label: &str) -> Option<Complex64> {
        let i = self.labels.iter().position(|l| l == label)?;
        self.norms[i]
    }

    pub fn to_json(&self) -> Value {
        let c = |z: &Complex64| json!([z.re, z.im]);
        json!({
            "n": self.n,
            "highest_weight": serde_json::to_value(&self.lam).unwrap_or(Value::Null),
            "ell": self.ell,
            "form": "bilinear",
            "vectors": self.labels.iter().zip(&self.norms).map(|(l, g)| json!({
                "label": l,
                "norm2": g.as_ref().map(c),
            })).collect::<Vec<_>>(),
            "zero_norm": self.zero_norm.iter().map(|&i| self.labels[i].clone()).collect::<Vec<_>>(),
            "flagged": self.flagged.iter().map(|(l, r)| json!({"label": l, "reason": r})).collect::<Vec<_>>(),
            "residuals": self.residuals,
            "reflection_norms": self.reflection_norms.iter().map(|(i, g)| json!({
                "i": i,
                "norm2": g.as_ref().map(c),
            })).collect::<Vec<_>>(),
            "path_discrepancy": self.path_discrepancy,
            "zero_orthogonality": self.zero_orthogonality,
            "zero_certified": self.zero_certified,
            "zero_plus": self.zero_plus.iter().map(|(j, r)| json!({"j": j, "ratio": fmt_complex(*r)})).collect::<Vec<_>>(),
        })
    }
}

fn check_unitary_range(n: usize, lam: &FormalWeight, ell: i64) -> Result<()> {
    let k = n / 2;
    if lam.rank() != k {
        return Err(Error::Domain(format!(
            "so_{n} weights have {k} coordinates"
        )));
    }
    let two = rat_int(2);
    let all_int = lam.coords.iter().all(|c| c.is_integer());
    let all_half = lam
        .coords
        .iter()
        .all(|c| (c * &two).is_integer() && !c.is_integer());
    if !all_int && !all_half {
        return Err(Error::Precondition(
            "λ must have all coordinates integral or all in 1/2 + Z".into(),
        ));
    }
    let quarter = BigRational::new(ell.into(), 4.into());
    let c = &lam.coords;
    let mut ok = c[0] <= quarter;
    for i in 1..k {
        ok &= c[i - 1] >= c[i];
    }
    ok &= if n.is_multiple_of(2) {
        k < 2 || c[k - 2] >= c[k - 1].abs()
    } else {
        !c[k - 1].is_negative()
    };
    if !ok {
        return Err(Error::Precondition(format!(
            "λ = {lam} is outside ℓ/4 >= λ_1 >= ... >= |λ_k| for ℓ = {ell}"
        )));
    }
    Ok(())
}

/// Norms of the weight vectors of the so3 or so4 Verma module with highest
/// weight `λ` at `q = exp(2 pi i j/ℓ)`, for the invariant form making all
/// generators self-adjoint.
pub fn gram_analysis(n: usize, lam: &FormalWeight, opts: &GramOptions) -> Result<GramReport> {
    let root = RootOfUnity::new(opts.ell, opts.branch)?;
    check_unitary_range(n, lam, opts.ell)?;
    match n {
        3 => gram_so3(lam, &root, opts),
        4 => gram_so4(lam, &root, opts),
        _ => Err(Error::Precondition(format!(
            "Gram recursions are available for n = 3, 4 (got {n})"
        ))),
    }
}

fn eval(x: &QScalar, root: &RootOfUnity) -> Result<Complex64> {
    x.eval_at_root(root.ell, root.branch)
}

fn gram_so3(lam: &FormalWeight, root: &RootOfUnity, opts: &GramOptions) -> Result<GramReport> {
    let l = Lam::Val(lam.coords[0].clone());
    let seq = WeightSequence::standard(lam.kind, &l, lam.signs[0])?;
    let depth = opts.depth.max(2);
    let zero_plus_value = root.bracket_plus(0.0);
    let mut labels = Vec::new();
    let mut norms: Vec<Option<Complex64>> = Vec::new();
    let mut alphas = Vec::new();
    let mut flagged = Vec::new();
    let mut zero_plus = Vec::new();
    let mut g = Some(Complex64::new(1.0, 0.0));
    for j in 0..depth {
        labels.push(format!("v_{j}"));
        if j > 0 && g.is_some() {
            let a = seq.alpha(j as i64).and_then(|a| eval(&a, root));
            match a {
                Ok(a) => {
                    alphas.push(a);
                    g = g.map(|x| x * a);
                    let m = eval(&seq.m(j as i64), root)?;
                    if (m - zero_plus_value).norm() < 1e-9 || (m + zero_plus_value).norm() < 1e-9 {
                        zero_plus.push((j, a));
                    }
                }
                Err(e) => {
                    flagged.push((format!("v_{j}"), e.to_string()));
                    g = None;
                }
            }
        }
        norms.push(g);
    }
    // Numeric B_1, B_2 on the computed part of the string.
    let len = 1 + alphas.len();
    let mut b2 = Matrix::zeros(len, len);
    for j in 0..len {
        if j + 1 < len {
            b2.set(j + 1, j, Complex64::new(1.0, 0.0));
            b2.set(j, j + 1, alphas[j]);
        }
    }
    let known: Vec<Complex64> = norms[..len].iter().map(|x| x.unwrap_or_default()).collect();
    let res2 = bilinear_residual(&b2, &known);
    let zero_norm: Vec<usize> = (0..len).filter(|&i| known[i].norm() <= opts.tol).collect();
    let zero_orthogonality = zero_norm
        .iter()
        .map(|&i| known[i].norm())
        .fold(0.0, f64::max);
    let two_lam = &lam.coords[0] * rat_int(2) + rat_int(1);
    let refl = two_lam
        .to_integer()
        .to_usize()
        .filter(|_| two_lam.is_integer())
        .map(|j| norms.get(j).copied().flatten());
    Ok(GramReport {
        n: 3,
        lam: lam.clone(),
        ell: root.ell,
        labels,
        norms,
        zero_norm,
        flagged,
        residuals: vec![0.0, res2],
        reflection_norms: vec![(1, refl.flatten())],
        path_discrepancy: 0.0,
        zero_orthogonality,
        zero_certified: zero_orthogonality <= opts.orth_tol,
        zero_plus,
    })
}

/// `max |(G M - M^T G)_{xy}|` for diagonal `G`.
fn bilinear_residual(m: &Matrix<Complex64>, g: &[Complex64]) -> f64 {
    let mut worst: f64 = 0.0;
    for x in 0..m.rows() {
        for y in 0..m.cols() {
            let r = g[x] * m.get(x, y) - m.get(y, x) * g[y];
            worst = worst.max(r.norm());
        }
    }
    worst
}

fn gram_so4(lam: &FormalWeight, root: &RootOfUnity, opts: &GramOptions) -> Result<GramReport> {
    let rep = So4Rep::concrete(lam)?;
    let (l1, l2) = (&lam.coords[0], &lam.coords[1]);
    let int = |x: BigRational| x.to_integer().to_u32().unwrap_or(0);
    let d1 = int(l1 - l2);
    let d2 = int(l1 + l2);
    let r1max = (opts.depth as u32).max(d1 + 1);
    let r2max = (opts.depth as u32).max(d2 + 1);
    let nodes: Vec<(u32, u32)> = {
        let mut v: Vec<(u32, u32)> = (0..=r1max)
            .flat_map(|a| (0..=r2max).map(move |b| (a, b)))
            .collect();
        v.sort_by_key(|&(a, b)| (a + b, a));
        v
    };
    let pos: BTreeMap<(u32, u32), usize> = nodes.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let label = |(a, b): (u32, u32)| format!("v({a},{b})");
    let mut flagged = Vec::new();
    let dim = nodes.len();
    let mut b2 = Matrix::zeros(dim, dim);
    // entries with a pole at this root; the rest of their column stays usable
    let mut poles: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (col, &(a, b)) in nodes.iter().enumerate() {
        let image = match rep.act_basis(2, a, b) {
            Ok(img) => img,
            Err(e) => {
                flagged.push((label((a, b)), e.to_string()));
                for row in 0..dim {
                    poles.insert((row, col));
                }
                continue;
            }
        };
        for (k, x) in image {
            let Some(&row) = pos.get(&k) else { continue };
            match eval(&x, root) {
                Ok(v) => b2.set(row, col, v),
                Err(e) => {
                    if poles.insert((row, col)) {
                        flagged.push((
                            label((a, b)),
                            format!("{} -> {}: {e}", label((a, b)), label(k)),
                        ));
                    }
                }
            }
        }
    }

    let mut norms: Vec<Option<Complex64>> = vec![None; dim];
    norms[0] = Some(Complex64::new(1.0, 0.0));
    let mut discrepancy: f64 = 0.0;
    for (y, &(a, b)) in nodes.iter().enumerate().skip(1) {
        let mut found: Vec<Complex64> = Vec::new();
        let parents = [(a > 0).then(|| (a - 1, b)), (b > 0).then(|| (a, b - 1))];
        for p in parents.into_iter().flatten() {
            let x = pos[&p];
            let Some(gx) = norms[x] else { continue };
            if poles.contains(&(y, x)) || poles.contains(&(x, y)) {
                continue;
            }
            // g_y M[y,x] = g_x M[x,y]
            let down = *b2.get(y, x);
            if down.norm() <= opts.tol {
                continue;
            }
            found.push(gx * b2.get(x, y) / down);
        }
        if let Some(&first) = found.first() {
            for other in &found[1..] {
                discrepancy = discrepancy.max((other - first).norm() / first.norm().max(1.0));
            }
            norms[y] = Some(first);
        } else if !flagged.iter().any(|(l, _)| *l == label((a, b))) {
            flagged.push((
                label((a, b)),
                "no recursion path avoids a flagged denominator".into(),
            ));
        }
    }

    let known: Vec<Complex64> = norms.iter().map(|x| x.unwrap_or_default()).collect();
    let defined: Vec<usize> = (0..dim).filter(|&i| norms[i].is_some()).collect();
    let mut res2: f64 = 0.0;
    for &x in &defined {
        for &y in &defined {
            if poles.contains(&(x, y)) || poles.contains(&(y, x)) {
                continue;
            }
            let r = known[x] * b2.get(x, y) - b2.get(y, x) * known[y];
            res2 = res2.max(r.norm());
        }
    }
    let zero_norm: Vec<usize> = defined
        .iter()
        .copied()
        .filter(|&i| known[i].norm() <= opts.tol)
        .collect();
    let zero_orthogonality = zero_norm
        .iter()
        .map(|&i| known[i].norm())
        .fold(0.0, f64::max);
    let refl = vec![
        (1, pos.get(&(d1 + 1, 0)).and_then(|&i| norms[i])),
        (2, pos.get(&(0, d2 + 1)).and_then(|&i| norms[i])),
    ];
    Ok(GramReport {
        n: 4,
        lam: lam.clone(),
        ell: root.ell,
        labels: nodes.iter().map(|&k| label(k)).collect(),
        norms,
        zero_norm,
        flagged,
        residuals: vec![0.0, res2, 0.0],
        reflection_norms: refl,
        path_discrepancy: discrepancy,
        zero_orthogonality,
        zero_certified: zero_orthogonality <= opts.orth_tol,
        zero_plus: Vec::new(),
    })
}

/// Norms along the `α_1`-string `μ = λ - r α_1`, `r = 0..=(λ, α_1) + 1`,
/// from the closed recursion
/// `||v_{μ-α_1}||^2 = {λ_2+r} / {λ_1-r-1} [r+1] [λ_1-λ_2-r] ||v_μ||^2`
/// (classical weights).
pub fn so4_alpha1_string(lam: &FormalWeight, root: &RootOfUnity) -> Result<Vec<Option<Complex64>>> {
    if lam.kind != Kind::Classical || lam.rank() != 2 {
        return Err(Error::Precondition("needs a classical so4 weight".into()));
    }
    let (l1, l2) = (rat_f64(&lam.coords[0]), rat_f64(&lam.coords[1]));
    let steps = (&lam.coords[0] - &lam.coords[1])
        .to_integer()
        .to_usize()
        .unwrap_or(0);
    let mut out = vec![Some(Complex64::new(1.0, 0.0))];
    for r in 0..=steps {
        let r = r as f64;
        let den = root.curly(l1 - r - 1.0);
        let prev = out.last().copied().flatten();
        let next = if den.norm() < 1e-12 {
            None
        } else {
            prev.map(|g| {
                g * root.curly(l2 + r) / den * root.bracket(r + 1.0) * root.bracket(l1 - l2 - r)
            })
        };
        out.push(next);
    }
    Ok(out)
}

/// The diagonal form `||v_j||^2 = prod α_{i,i+1}` on the symbolic so3
/// weight basis and whether it makes `B_1, B_2` self-adjoint exactly on the
/// first `size - 1` columns.
pub fn so3_gram_exact(kind: Kind, sign: i8, size: usize) -> Result<(Vec<QScalar>, bool)> {
    let seq = WeightSequence::standard(kind, &Lam::Sym(1), sign)?;
    let rep = So3Rep::weight_basis(seq, size)?;
    let g = rep.conjugator_squares();
    let mut zero = true;
    // G B = B^T G entrywise; the last column is cut off by the truncation
    for b in rep.matrices() {
        for x in 0..size {
            for y in 0..size.saturating_sub(1) {
                let (bxy, byx) = (b.get(x, y), b.get(y, x));
                if bxy.is_zero() && byx.is_zero() {
                    continue;
                }
                zero &= (&g[x] * bxy - byx * &g[y]).is_zero();
            }
        }
    }
    for j in 1..size {
        let step = g[j].checked_div(&g[j - 1])?;
        zero &= (&step - &rep.alphas[j - 1]).is_zero();
    }
    Ok((g, zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;

    fn so4(a: i64, b: i64) -> FormalWeight {
        FormalWeight::classical(vec![rat_int(a), rat_int(b)])
    }

    #[test]
    fn so3_norm_recursion_is_exact() {
        for kind in [Kind::Classical, Kind::Nonclassical] {
            let (g, ok) = so3_gram_exact(kind, 1, 5).unwrap();
            assert!(ok);
            assert!(g[0].is_one());
        }
    }

    #[test]
    fn so3_classical_zero_at_reflection() {
        let lam = FormalWeight::classical(vec![rat(3, 2)]);
        let r = gram_analysis(3, &lam, &GramOptions::new(8)).unwrap();
        let (_, g) = r.reflection_norms[0];
        assert!(g.unwrap().norm() < 1e-9);
        assert!(r.zero_norm.contains(&4));
        assert!(r.norm_of("v_3").unwrap().norm() > 1e-6);
        assert!(r.residuals.iter().all(|x| *x < 1e-9));
    }

    #[test]
    fn so3_zero_plus_ratio() {
        let ell = 8;
        let lam = FormalWeight::classical(vec![rat(ell, 4)]);
        let mut o = GramOptions::new(ell);
        o.depth = ell as usize;
        let r = gram_analysis(3, &lam, &o).unwrap();
        let root = RootOfUnity::new(ell, RootBranch::default()).unwrap();
        let want = -2.0 / (root.q_minus() * root.q_minus());
        let hit = r
            .zero_plus
            .iter()
            .find(|(j, _)| *j == ell as usize / 2)
            .unwrap();
        assert!((hit.1 - want).norm() < 1e-9, "{:?} vs {want}", hit.1);
    }

    #[test]
    fn so4_reflection_norms_vanish() {
        let lam = so4(2, 1);
        let r = gram_analysis(4, &lam, &GramOptions::new(12)).unwrap();
        for (_, g) in &r.reflection_norms {
            assert!(g.unwrap().norm() <= 1e-9, "{g:?}");
        }
        assert!(r.path_discrepancy < 1e-8);
        assert!(r.residuals[1] < 1e-8);
        let root = RootOfUnity::new(12, RootBranch::default()).unwrap();
        let oracle = so4_alpha1_string(&lam, &root).unwrap();
        for (k, want) in oracle.iter().enumerate() {
            let got = r.norm_of(&format!("v({k},0)")).unwrap();
            assert!((got - want.unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn outside_unitary_range_is_rejected() {
        assert!(matches!(
            gram_analysis(4, &so4(3, 1), &GramOptions::new(8)),
            Err(Error::Precondition(_))
        ));
        assert!(gram_analysis(5, &so4(1, 0), &GramOptions::new(8)).is_err());
    }
}
