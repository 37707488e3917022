//! q-torus representations at a primitive root of unity and the
//! decomposition of their so3 versions into highest-weight summands.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::RootOfUnity;
use crate::error::{Error, Result};
use crate::linalg::{cluster, relation_residuals, Matrix};
use crate::qscalar::{fmt_rat, rat, RootBranch};
use crate::quotients::{submodule_closure, FiniteModule, Matrices};
use crate::weights::{FormalWeight, Kind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorusVariant {
    /// `b_j = ± sqrt(-1) (u_j + u_j^{-1}) / (q - q^{-1})`
    Plus,
    /// `b_j = (u_j + u_j^{-1}) / (q - q^{-1})`
    Real,
}

impl fmt::Display for TorusVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TorusVariant::Plus => "plus",
            TorusVariant::Real => "real",
        })
    }
}

impl FromStr for TorusVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(TorusVariant::Plus),
            "real" => Ok(TorusVariant::Real),
            _ => Err(Error::Domain(format!("unknown q-torus variant {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QTorusRep {
    pub n: usize,
    pub ell: i64,
    pub branch: RootBranch,
    pub variant: TorusVariant,
    pub sign: i8,
    /// Index tuples `(i_1, ..., i_k)` of the basis vectors `v(i)`.
    pub indices: Vec<Vec<usize>>,
    pub u: Vec<Matrix<Complex64>>,
    pub b: Vec<Matrix<Complex64>>,
    /// `ε` in `B_i^2 B_j - [2] B_i B_j B_i + B_j B_i^2 = ε B_j`, the sign
    /// the matrices actually satisfy.
    pub relation_sign: i8,
    /// Largest residual of `u_i u_{i+1} = q u_{i+1} u_i` and the distant
    /// commutations.
    pub torus_residual: f64,
    /// Residual of the cubic relations with right-hand side `ε B_j`.
    pub relation_residual: f64,
    /// Residual of the defining relations (`ε = 1`).
    pub standard_residual: f64,
}

fn max_entry(m: &Matrix<Complex64>) -> f64 {
    m.max_magnitude()
}

/// The q-torus representation of `so_n` on `ℓ^{(n-1)/2}` basis vectors. For
/// even `n` the construction for `n + 1` is restricted to `B_1..B_{n-1}`.
pub fn qtorus_build(
    n: usize,
    ell: i64,
    variant: TorusVariant,
    sign: i8,
    branch: RootBranch,
    tol: f64,
) -> Result<QTorusRep> {
    if n < 3 {
        return Err(Error::Precondition(format!(
            "q-torus needs n >= 3 (got {n})"
        )));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain("sign must be +1 or -1".into()));
    }
    let root = RootOfUnity::new(ell, branch)?;
    let odd = if n % 2 == 1 { n } else { n + 1 };
    let k = (odd - 1) / 2;
    let l = ell as usize;
    let dim = l
        .checked_pow(k as u32)
        .filter(|d| *d <= 4096)
        .ok_or_else(|| Error::Precondition(format!("ℓ^{k} is too large for dense matrices")))?;
    let indices: Vec<Vec<usize>> = (0..dim)
        .map(|mut x| {
            let mut t = vec![0; k];
            for slot in t.iter_mut().rev() {
                *slot = x % l;
                x /= l;
            }
            t
        })
        .collect();
    let pos = |t: &[usize]| t.iter().fold(0, |acc, &i| acc * l + i);

    let q = root.q();
    let mut u = Vec::with_capacity(odd - 1);
    let mut uinv = Vec::with_capacity(odd - 1);
    for g in 1..odd {
        let mut m = Matrix::zeros(dim, dim);
        let mut mi = Matrix::zeros(dim, dim);
        for (col, t) in indices.iter().enumerate() {
            if g % 2 == 1 {
                let e = root.q_pow(t[(g - 1) / 2] as f64);
                m.set(col, col, e);
                mi.set(col, col, e.inv());
            } else {
                let s = g / 2 - 1;
                let mut t2 = t.clone();
                t2[s] = (t2[s] + 1) % l;
                if s + 1 < k {
                    t2[s + 1] = (t2[s + 1] + l - 1) % l;
                }
                let row = pos(&t2);
                m.set(row, col, Complex64::new(1.0, 0.0));
                mi.set(col, row, Complex64::new(1.0, 0.0));
            }
        }
        u.push(m);
        uinv.push(mi);
    }

    let mut torus_residual: f64 = 0.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            let r = if j == i + 1 {
                u[i].mul(&u[j])?.sub(&u[j].mul(&u[i])?.scale(&q))?
            } else {
                u[i].mul(&u[j])?.sub(&u[j].mul(&u[i])?)?
            };
            torus_residual = torus_residual.max(max_entry(&r));
        }
    }

    let pre = match variant {
        TorusVariant::Plus => Complex64::i() / root.q_minus(),
        TorusVariant::Real => root.q_minus().inv(),
    } * f64::from(sign);
    let b: Vec<Matrix<Complex64>> = u
        .iter()
        .zip(&uinv)
        .take(n - 1)
        .map(|(a, ai)| a.add(ai).map(|m| m.scale(&pre)))
        .collect::<Result<_>>()?;
    u.truncate(n - 1);

    let relation_sign = match variant {
        TorusVariant::Plus => 1,
        TorusVariant::Real => -1,
    };
    let (standard_residual, relation_residual) = cubic_residuals(&b, &root.two(), relation_sign)?;
    if torus_residual > tol || relation_residual > tol {
        return Err(Error::Tolerance(format!(
            "q-torus relations fail: torus residual {torus_residual:.3e}, cubic residual {relation_residual:.3e}"
        )));
    }
    Ok(QTorusRep {
        n,
        ell,
        branch,
        variant,
        sign,
        indices,
        u,
        b,
        relation_sign,
        torus_residual,
        relation_residual,
        standard_residual,
    })
}

/// Max residuals of the relations with right-hand side `B_j` and `eps B_j`.
fn cubic_residuals(b: &[Matrix<Complex64>], two: &Complex64, eps: i8) -> Result<(f64, f64)> {
    let mut standard: f64 = 0.0;
    let mut signed: f64 = 0.0;
    for ((i, j), r) in relation_residuals(b, two)? {
        standard = standard.max(max_entry(&r));
        if i.abs_diff(j) == 1 && eps != 1 {
            let shift = b[j - 1].scale(&Complex64::new(f64::from(1 - eps), 0.0));
            signed = signed.max(max_entry(&r.add(&shift)?));
        } else {
            signed = signed.max(max_entry(&r));
        }
    }
    Ok((standard, signed))
}

impl QTorusRep {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn to_module(&self) -> Result<FiniteModule> {
        let basis = self
            .indices
            .iter()
            .map(|t| {
                let parts: Vec<String> = t.iter().map(|i| i.to_string()).collect();
                format!("v({})", parts.join(","))
            })
            .collect();
        FiniteModule::new(
            self.n,
            None,
            basis,
            Matrices::Numeric {
                ell: self.ell,
                branch: self.branch,
                b: self.b.clone(),
            },
            format!(
                "qtorus {} sign={} ell={}",
                self.variant,
                if self.sign > 0 { "+" } else { "-" },
                self.ell
            ),
        )
    }
}

/// `max_i ||G B_i - B_i^* G||` for the diagonal metric `G = diag(metric)`.
pub fn selfadjoint_residual(m: &FiniteModule, metric: &[f64]) -> Result<f64> {
    if metric.len() != m.dim() {
        return Err(Error::Domain(format!(
            "metric has {} entries for dimension {}",
            metric.len(),
            m.dim()
        )));
    }
    if metric.iter().any(|x| !(*x > 0.0) || !x.is_finite()) {
        return Err(Error::Precondition(
            "metric must be strictly positive".into(),
        ));
    }
    let g = Matrix::diagonal(
        &metric
            .iter()
            .map(|x| Complex64::new(*x, 0.0))
            .collect::<Vec<_>>(),
    );
    let mut worst: f64 = 0.0;
    for b in m.complex_matrices()? {
        let r = g.mul(&b)?.sub(&b.adjoint().mul(&g)?)?;
        worst = worst.max(max_entry(&r));
    }
    Ok(worst)
}

#[derive(Clone, Debug)]
pub struct TorusSummand {
    pub dim: usize,
    /// `B_1`-eigenvalue of the generating highest-weight vector.
    pub highest_value: Complex64,
    /// Weights `[x]`, `±[x]_+` with `0 <= x <= ℓ/2` taking that value.
    pub labels: Vec<FormalWeight>,
    /// Basis of the summand in the q-torus basis.
    pub basis: Vec<Vec<Complex64>>,
    pub module: FiniteModule,
}

#[derive(Clone, Debug)]
pub struct TorusDecomposition {
    pub summands: Vec<TorusSummand>,
    /// The summands span the whole representation.
    pub complete: bool,
    pub note: String,
}

impl TorusDecomposition {
    pub fn dims(&self) -> Vec<usize> {
        self.summands.iter().map(|s| s.dim).collect()
    }
}

/// Weights `[x]`, `[x]_+`, `-[x]_+` with `x ∈ {0, 1/2, ..., ℓ/2}` equal to `v`.
pub(crate) fn weight_labels(v: Complex64, root: &RootOfUnity, tol: f64) -> Vec<FormalWeight> {
    let mut out = Vec::new();
    let close = |w: Complex64| (w - v).norm() <= tol * v.norm().max(1.0);
    for h in 0..=root.ell {
        let x = h as f64 / 2.0;
        let c = vec![rat(h, 2)];
        if close(root.bracket(x)) {
            out.push(FormalWeight::classical(c.clone()));
        }
        for sign in [1i8, -1] {
            if close(root.bracket_plus(x) * f64::from(sign)) {
                if let Ok(w) = FormalWeight::nonclassical(c.clone(), vec![sign]) {
                    out.push(w);
                }
            }
        }
    }
    out
}

/// Highest-weight vectors of an so3 module given by `B_1, B_2`: `v` with
/// `B_1 v = μ v` and either `B_2 v = 0` (`μ = 0`) or `B_2 v` a weight
/// vector of weight `μ'` with `μ'^2 - [2] μ μ' + μ^2 = 1`, i.e. `v`
/// generates a quotient of a Verma module.
pub(crate) fn highest_weight_vectors(
    b1: &Matrix<Complex64>,
    b2: &Matrix<Complex64>,
    two: Complex64,
    tol: f64,
) -> Result<Vec<(Complex64, Vec<Complex64>)>> {
    let d = b1.rows();
    let values: Vec<Complex64> = cluster(&b1.eigenvalues()?, 1e-6)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    let mut out = Vec::new();
    for &mu in &values {
        let space = b1.shift(&mu).kernel(tol)?;
        if space.is_empty() {
            continue;
        }
        let e = Matrix::from_cols(d, &space);
        let b2e = b2.mul(&e)?;
        let lift = |c: &[Complex64]| e.mul_vec(c);
        if mu.norm() <= tol {
            for c in b2e.kernel(tol)? {
                out.push((mu, lift(&c)));
            }
        }
        for &nu in &values {
            let seed = nu * nu - two * mu * nu + mu * mu - Complex64::new(1.0, 0.0);
            if seed.norm() > 1e-7 * (1.0 + mu.norm() + nu.norm()).powi(2) {
                continue;
            }
            for c in b1.shift(&nu).mul(&b2e)?.kernel(tol)? {
                let v = lift(&c);
                let image = b2.mul_vec(&v);
                if image.iter().map(|x| x.norm()).fold(0.0, f64::max) > tol {
                    out.push((mu, v));
                }
            }
        }
    }
    Ok(out)
}

/// Order of preference among generating vectors: larger real part first.
pub(crate) fn by_value(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    let key = |z: &Complex64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    key(b).cmp(&key(a))
}

/// Split an so3 q-torus representation into the submodules generated by its
/// highest-weight vectors.
pub fn qtorus_decompose_so3(rep: &QTorusRep, tol: f64) -> Result<TorusDecomposition> {
    if rep.n != 3 {
        return Err(Error::Precondition(format!(
            "decomposition is implemented for so3 (got n = {})",
            rep.n
        )));
    }
    let root = RootOfUnity::new(rep.ell, rep.branch)?;
    let d = rep.dim();
    let (b1, b2) = (&rep.b[0], &rep.b[1]);
    let mut cands = highest_weight_vectors(b1, b2, root.two(), tol)?;
    cands.sort_by(|a, b| by_value(&a.0, &b.0));

    let mut span: Vec<Vec<Complex64>> = Vec::new();
    let mut summands = Vec::new();
    for (mu, v) in cands {
        let sub = submodule_closure(&[b1, b2], &[v], tol)?;
        let mut all = span.clone();
        all.extend(sub.iter().cloned());
        if Matrix::from_rows(all.clone())?.rank(tol)? != span.len() + sub.len() {
            continue;
        }
        span = all;
        let mats = vec![b1.restrict(&sub, tol)?, b2.restrict(&sub, tol)?];
        let labels = weight_labels(mu, &root, 1e-8);
        let module = FiniteModule::new(
            3,
            labels.first().cloned(),
            (0..sub.len()).map(|i| format!("w{i}")).collect(),
            Matrices::Numeric {
                ell: rep.ell,
                branch: rep.branch,
                b: mats,
            },
            format!("qtorus summand μ={}", fmt_complex(mu)),
        )?;
        summands.push(TorusSummand {
            dim: sub.len(),
            highest_value: mu,
            labels,
            basis: sub,
            module,
        });
    }
    let covered: usize = summands.iter().map(|s| s.dim).sum();
    let note = if summands.is_empty() {
        "no highest-weight vector".to_string()
    } else if covered == d {
        format!("direct sum of {} highest-weight modules", summands.len())
    } else {
        format!("highest-weight submodules cover {covered} of {d} dimensions")
    };
    Ok(TorusDecomposition {
        summands,
        complete: covered == d,
        note,
    })
}

pub(crate) fn fmt_complex(z: Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im)
}

/// `[x]` or `±[x]+`.
pub fn label_string(w: &FormalWeight) -> String {
    let c: Vec<String> = w.coords.iter().map(fmt_rat).collect();
    match w.kind {
        Kind::Classical => format!("[{}]", c.join(",")),
        Kind::Nonclassical => format!(
            "{}[{}]+",
            if w.signs.first().copied().unwrap_or(1) < 0 {
                "-"
            } else {
                ""
            },
            c.join(",")
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(n: usize, ell: i64, variant: TorusVariant, sign: i8) -> QTorusRep {
        qtorus_build(n, ell, variant, sign, RootBranch::default(), 1e-9).unwrap()
    }

    #[test]
    fn dimensions_and_torus_relations() {
        assert_eq!(build(3, 5, TorusVariant::Plus, 1).dim(), 5);
        let r = build(5, 3, TorusVariant::Plus, -1);
        assert_eq!(r.dim(), 9);
        assert_eq!(r.b.len(), 4);
        assert!(r.torus_residual < 1e-12);
        let q = RootOfUnity::new(3, RootBranch::default()).unwrap().q();
        let lhs = r.u[0].mul(&r.u[1]).unwrap();
        let rhs = r.u[1].mul(&r.u[0]).unwrap().scale(&q);
        assert!(lhs.sub(&rhs).unwrap().max_magnitude() < 1e-12);
        assert_eq!(build(4, 3, TorusVariant::Plus, 1).b.len(), 3);
    }

    #[test]
    fn plus_variant_satisfies_defining_relations() {
        for (n, ell) in [(3, 4), (3, 5), (3, 6), (5, 3)] {
            for sign in [1, -1] {
                let r = build(n, ell, TorusVariant::Plus, sign);
                assert!(r.standard_residual < 1e-9, "{n} {ell}");
                let m = r.to_module().unwrap();
                assert!(m.relation_report(1e-9).unwrap().ok());
            }
        }
    }

    #[test]
    fn real_variant_has_opposite_sign() {
        let r = build(3, 6, TorusVariant::Real, 1);
        assert_eq!(r.relation_sign, -1);
        assert!(r.relation_residual < 1e-9);
        assert!(r.standard_residual > 1.0);
    }

    #[test]
    fn decomposition_examples() {
        let d = qtorus_decompose_so3(&build(3, 4, TorusVariant::Plus, 1), 1e-9).unwrap();
        let mut dims = d.dims();
        dims.sort();
        assert_eq!(dims, vec![1, 3]);
        assert!(d.complete);
        let names: Vec<Vec<String>> = d
            .summands
            .iter()
            .map(|s| s.labels.iter().map(label_string).collect())
            .collect();
        assert!(names.iter().any(|l| l.contains(&"[2]".to_string())));
        assert!(names.iter().any(|l| l.contains(&"[1]".to_string())));

        let d = qtorus_decompose_so3(&build(3, 5, TorusVariant::Plus, 1), 1e-9).unwrap();
        assert_eq!(d.dims(), vec![3, 2]);
        let l3: Vec<String> = d.summands[0].labels.iter().map(label_string).collect();
        let l2: Vec<String> = d.summands[1].labels.iter().map(label_string).collect();
        assert!(l3.contains(&"-[5/2]+".to_string()), "{l3:?}");
        assert!(l2.contains(&"-[3/2]+".to_string()), "{l2:?}");

        let d = qtorus_decompose_so3(&build(3, 6, TorusVariant::Real, 1), 1e-9).unwrap();
        assert!(d.summands.is_empty());
    }

    #[test]
    fn plus_variant_is_self_adjoint() {
        let m = build(3, 5, TorusVariant::Plus, 1).to_module().unwrap();
        assert!(selfadjoint_residual(&m, &[1.0; 5]).unwrap() < 1e-9);
        assert!(selfadjoint_residual(&m, &[1.0, 2.0, 3.0, 1.0, 5.0]).unwrap() > 1e-3);
        assert!(selfadjoint_residual(&m, &[1.0, 0.0, 1.0, 1.0, 1.0]).is_err());
    }
}
