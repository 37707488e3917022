//! Finite-dimensional modules given by generator matrices, with their JSON
//! and CSV forms.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{relation_residuals, Matrix};
use crate::qscalar::gauss::fmt_rational;
use crate::qscalar::{GaussRat, QScalar, RootBranch};
use crate::ring::{Coeff, QTwo};
use crate::weights::{FormalWeight, Kind};

/// Generator matrices `B_1, ..., B_{n-1}` over one of the supported fields.
#[derive(Clone, Debug, PartialEq)]
pub enum Matrices {
    /// Exact, at a rational specialization `s = q^{1/2}`.
    Exact {
        s: GaussRat,
        b: Vec<Matrix<GaussRat>>,
    },
    /// Floating point, at `s = exp(pi i j / ell)`.
    Numeric {
        ell: i64,
        branch: RootBranch,
        b: Vec<Matrix<Complex64>>,
    },
    Symbolic {
        b: Vec<Matrix<QScalar>>,
    },
}

impl Matrices {
    pub fn len(&self) -> usize {
        match self {
            Matrices::Exact { b, .. } => b.len(),
            Matrices::Numeric { b, .. } => b.len(),
            Matrices::Symbolic { b } => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn size(&self) -> Option<usize> {
        match self {
            Matrices::Exact { b, .. } => b.first().map(|m| m.rows()),
            Matrices::Numeric { b, .. } => b.first().map(|m| m.rows()),
            Matrices::Symbolic { b } => b.first().map(|m| m.rows()),
        }
    }

    fn shapes_ok(&self) -> bool {
        fn ok<C: Coeff>(b: &[Matrix<C>]) -> bool {
            b.iter().all(|m| m.is_square() && m.rows() == b[0].rows())
        }
        match self {
            Matrices::Exact { b, .. } => ok(b),
            Matrices::Numeric { b, .. } => ok(b),
            Matrices::Symbolic { b } => ok(b),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteModule {
    pub n: usize,
    pub highest_weight: Option<FormalWeight>,
    /// One label per basis vector.
    pub basis: Vec<String>,
    pub matrices: Matrices,
    /// Which construction produced the module.
    pub provenance: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationResidual {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub field: String,
    pub tolerance: f64,
    pub max_residual: f64,
    pub exact_zero: bool,
    pub residuals: Vec<RelationResidual>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

fn report<C: Coeff>(b: &[Matrix<C>], two: &C, field: String, tol: f64) -> Result<RelationReport> {
    let mut residuals = Vec::new();
    let mut max: f64 = 0.0;
    let mut exact_zero = true;
    for ((i, j), r) in relation_residuals(b, two)? {
        let residual = r.max_magnitude();
        exact_zero &= r.is_zero();
        max = max.max(residual);
        residuals.push(RelationResidual { i, j, residual });
    }
    Ok(RelationReport {
        field,
        tolerance: tol,
        max_residual: max,
        exact_zero,
        residuals,
    })
}

fn field_label(m: &Matrices) -> String {
    match m {
        Matrices::Exact { s, .. } => {
            if s.is_real() {
                format!("rational@s={}", fmt_rational(&s.re))
            } else {
                format!("rational@s={s}")
            }
        }
        Matrices::Numeric { ell, branch, .. } => {
            if branch.j == 1 {
                format!("complex@ell={ell}")
            } else {
                format!("complex@ell={ell},j={}", branch.j)
            }
        }
        Matrices::Symbolic { .. } => "symbolic".into(),
    }
}

enum FieldTag {
    Exact(GaussRat),
    Numeric(i64, RootBranch),
    Symbolic,
}

fn parse_field(text: &str) -> Result<FieldTag> {
    let bad = || Error::Parse(format!("unknown field {text:?}"));
    if text == "symbolic" {
        return Ok(FieldTag::Symbolic);
    }
    if let Some(s) = text.strip_prefix("rational@s=") {
        return Ok(FieldTag::Exact(GaussRat::parse(s)?));
    }
    if let Some(rest) = text.strip_prefix("complex@ell=") {
        let (ell, j) = match rest.split_once(",j=") {
            Some((a, b)) => (a, b.parse().map_err(|_| bad())?),
            None => (rest, 1),
        };
        let ell = ell.parse().map_err(|_| bad())?;
        return Ok(FieldTag::Numeric(ell, RootBranch { j }));
    }
    Err(bad())
}

fn matrix_json<C: Coeff>(m: &Matrix<C>, entry: impl Fn(&C) -> Value) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(&entry).collect()))
            .collect(),
    )
}

fn matrix_from_json<C: Coeff>(v: &Value, entry: impl Fn(&Value) -> Result<C>) -> Result<Matrix<C>> {
    let bad = || Error::Parse("matrix must be an array of rows".into());
    let rows = v.as_array().ok_or_else(bad)?;
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let r = r.as_array().ok_or_else(bad)?;
        out.push(r.iter().map(&entry).collect::<Result<Vec<C>>>()?);
    }
    if out.is_empty() {
        return Ok(Matrix::zeros(0, 0));
    }
    Matrix::from_rows(out).map_err(|e| Error::Parse(e.to_string()))
}

fn complex_json(z: &Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}

fn complex_from_json(v: &Value) -> Result<Complex64> {
    let bad = || Error::Parse(format!("complex entry must be [re, im], got {v}"));
    let a = v.as_array().ok_or_else(bad)?;
    if a.len() != 2 {
        return Err(bad());
    }
    let re = a[0].as_f64().ok_or_else(bad)?;
    let im = a[1].as_f64().ok_or_else(bad)?;
    Ok(Complex64::new(re, im))
}

fn str_entry(v: &Value) -> Result<&str> {
    v.as_str()
        .ok_or_else(|| Error::Parse(format!("expected a string entry, got {v}")))
}

fn gauss_json(x: &GaussRat) -> Value {
    if x.is_real() {
        Value::String(fmt_rational(&x.re))
    } else {
        Value::String(x.to_string())
    }
}

fn cell(z: &Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

impl FiniteModule {
    pub fn new(
        n: usize,
        highest_weight: Option<FormalWeight>,
        basis: Vec<String>,
        matrices: Matrices,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if n < 3 || matrices.len() != n - 1 {
            return Err(Error::Domain(format!(
                "so_{n} needs {} generator matrices, got {}",
                n.saturating_sub(1),
                matrices.len()
            )));
        }
        if !matrices.shapes_ok() {
            return Err(Error::Domain("generator matrices differ in size".into()));
        }
        let dim = matrices.size().unwrap_or(0);
        if basis.len() != dim {
            return Err(Error::Domain(format!(
                "{} basis labels for dimension {dim}",
                basis.len()
            )));
        }
        Ok(FiniteModule {
            n,
            highest_weight,
            basis,
            matrices,
            provenance: provenance.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn field(&self) -> String {
        field_label(&self.matrices)
    }

    pub fn kind(&self) -> Option<Kind> {
        self.highest_weight.as_ref().map(|w| w.kind)
    }

    pub fn exact(&self) -> Option<(&GaussRat, &[Matrix<GaussRat>])> {
        match &self.matrices {
            Matrices::Exact { s, b } => Some((s, b)),
            _ => None,
        }
    }

    /// Generator matrices as complex floating point (symbolic modules are
    /// rejected).
    pub fn complex_matrices(&self) -> Result<Vec<Matrix<Complex64>>> {
        match &self.matrices {
            Matrices::Exact { b, .. } => b.iter().map(|m| m.map(|x| Ok(x.to_complex()))).collect(),
            Matrices::Numeric { b, .. } => Ok(b.clone()),
            Matrices::Symbolic { .. } => Err(Error::Precondition(
                "symbolic module: specialize it first".into(),
            )),
        }
    }

    /// Value of `q = s^2` as a complex number.
    pub fn q_value(&self) -> Option<Complex64> {
        match &self.matrices {
            Matrices::Exact { s, .. } => Some(s.to_complex() * s.to_complex()),
            Matrices::Numeric { ell, branch, .. } => {
                let s = branch.s_value(*ell);
                Some(s * s)
            }
            Matrices::Symbolic { .. } => None,
        }
    }

    pub fn specialize_exact(&self, s: &GaussRat) -> Result<FiniteModule> {
        let Matrices::Symbolic { b } = &self.matrices else {
            return Err(Error::Precondition("module is already specialized".into()));
        };
        let b = b
            .iter()
            .map(|m| m.map(|x| x.eval_exact(s)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.matrices = Matrices::Exact { s: s.clone(), b };
        Ok(out)
    }

    pub fn specialize_root(&self, ell: i64, branch: RootBranch) -> Result<FiniteModule> {
        let Matrices::Symbolic { b } = &self.matrices else {
            return Err(Error::Precondition("module is already specialized".into()));
        };
        let b = b
            .iter()
            .map(|m| m.map(|x| x.eval_at_root(ell, branch)))
            .collect::<Result<Vec<_>>>()?;
        let mut out = self.clone();
        out.matrices = Matrices::Numeric { ell, branch, b };
        Ok(out)
    }

    /// Residuals of all defining relations.
    pub fn relation_report(&self, tol: f64) -> Result<RelationReport> {
        let field = self.field();
        match &self.matrices {
            Matrices::Exact { s, b } => report(b, &GaussRat::q_two(s)?, field, tol),
            Matrices::Numeric { ell, branch, b } => {
                let s = branch.s_value(*ell);
                report(b, &Complex64::q_two(&s)?, field, tol)
            }
            Matrices::Symbolic { b } => report(b, &QScalar::bracket_int(2), field, tol),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut mats = Map::new();
        let rows: Vec<Value> = match &self.matrices {
            Matrices::Exact { b, .. } => b.iter().map(|m| matrix_json(m, gauss_json)).collect(),
            Matrices::Numeric { b, .. } => b.iter().map(|m| matrix_json(m, complex_json)).collect(),
            Matrices::Symbolic { b } => b
                .iter()
                .map(|m| matrix_json(m, |x| Value::String(x.to_string())))
                .collect(),
        };
        for (i, m) in rows.into_iter().enumerate() {
            mats.insert(format!("B{}", i + 1), m);
        }
        let mut o = Map::new();
        o.insert("n".into(), self.n.into());
        o.insert("dim".into(), self.dim().into());
        o.insert(
            "highest_weight".into(),
            serde_json::to_value(&self.highest_weight).unwrap_or(Value::Null),
        );
        o.insert("field".into(), self.field().into());
        o.insert("provenance".into(), self.provenance.clone().into());
        o.insert(
            "basis".into(),
            Value::Array(
                self.basis
                    .iter()
                    .map(|b| Value::String(b.clone()))
                    .collect(),
            ),
        );
        o.insert("matrices".into(), Value::Object(mats));
        Value::Object(o)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize")
    }

    pub fn from_json(v: &Value) -> Result<FiniteModule> {
        let bad = |what: &str| Error::Parse(format!("module JSON: missing or bad {what}"));
        let o = v.as_object().ok_or_else(|| bad("object"))?;
        let n = o.get("n").and_then(Value::as_u64).ok_or_else(|| bad("n"))? as usize;
        let dim = o
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| bad("dim"))? as usize;
        let hw = match o.get("highest_weight") {
            None | Some(Value::Null) => None,
            Some(w) => Some(
                serde_json::from_value::<FormalWeight>(w.clone())
                    .map_err(|e| Error::Parse(format!("highest_weight: {e}")))?,
            ),
        };
        let field = o
            .get("field")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("field"))?;
        let provenance = o
            .get("provenance")
            .and_then(Value::as_str)
            .unwrap_or("input")
            .to_string();
        let mats = o
            .get("matrices")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("matrices"))?;
        if n < 3 {
            return Err(bad("n"));
        }
        let mut raw = Vec::with_capacity(n - 1);
        for i in 1..n {
            raw.push(
                mats.get(&format!("B{i}"))
                    .ok_or_else(|| bad(&format!("B{i}")))?,
            );
        }
        let matrices = match parse_field(field)? {
            FieldTag::Exact(s) => Matrices::Exact {
                s,
                b: raw
                    .iter()
                    .map(|m| matrix_from_json(m, |x| GaussRat::parse(str_entry(x)?)))
                    .collect::<Result<_>>()?,
            },
            FieldTag::Numeric(ell, branch) => Matrices::Numeric {
                ell,
                branch,
                b: raw
                    .iter()
                    .map(|m| matrix_from_json(m, complex_from_json))
                    .collect::<Result<_>>()?,
            },
            FieldTag::Symbolic => Matrices::Symbolic {
                b: raw
                    .iter()
                    .map(|m| matrix_from_json(m, |x| str_entry(x)?.parse::<QScalar>()))
                    .collect::<Result<_>>()?,
            },
        };
        let basis = match o.get("basis").and_then(Value::as_array) {
            Some(a) => a
                .iter()
                .map(|x| x.as_str().map(String::from).ok_or_else(|| bad("basis")))
                .collect::<Result<Vec<_>>>()?,
            None => (0..dim).map(|i| format!("e{i}")).collect(),
        };
        let m = FiniteModule::new(n, hw, basis, matrices, provenance)
            .map_err(|e| Error::Parse(e.to_string()))?;
        if m.dim() != dim {
            return Err(bad("dim"));
        }
        Ok(m)
    }

    pub fn from_json_str(text: &str) -> Result<FiniteModule> {
        let v: Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("module JSON: {e}")))?;
        FiniteModule::from_json(&v)
    }

    /// CSV of the matrix of `B_gen` (1-based); numeric fields only.
    pub fn csv(&self, gen: usize) -> Result<String> {
        if gen == 0 || gen >= self.n {
            return Err(Error::Domain(format!(
                "no generator B_{gen} in so_{}",
                self.n
            )));
        }
        let rows: Vec<Vec<String>> = match &self.matrices {
            Matrices::Exact { b, .. } => b[gen - 1]
                .to_rows()
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|x| gauss_json(x).as_str().unwrap_or("").to_string())
                        .collect()
                })
                .collect(),
            Matrices::Numeric { b, .. } => b[gen - 1]
                .to_rows()
                .iter()
                .map(|r| r.iter().map(cell).collect())
                .collect(),
            Matrices::Symbolic { .. } => {
                return Err(Error::Precondition(
                    "CSV output needs a numeric specialization".into(),
                ))
            }
        };
        let mut out = String::new();
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussRat {
        GaussRat::from_int(n)
    }

    fn toy() -> FiniteModule {
        let z = Matrix::zeros(1, 1);
        FiniteModule::new(
            3,
            None,
            vec!["1".into()],
            Matrices::Exact {
                s: g(2),
                b: vec![z.clone(), z],
            },
            "trivial",
        )
        .unwrap()
    }

    #[test]
    fn trivial_module_satisfies_relations() {
        let r = toy().relation_report(0.0).unwrap();
        assert!(r.exact_zero && r.ok());
        assert_eq!(r.residuals.len(), 2);
    }

    #[test]
    fn json_round_trip_is_stable() {
        let mut m = toy();
        m.matrices = Matrices::Exact {
            s: g(2),
            b: vec![
                Matrix::from_rows(vec![vec![GaussRat::from_ratio(3, 2)]]).unwrap(),
                Matrix::from_rows(vec![vec![GaussRat::i()]]).unwrap(),
            ],
        };
        let text = m.to_json_string();
        let back = FiniteModule::from_json_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json_string(), text);
        assert!(text.contains("\"field\": \"rational@s=2\""));
    }

    #[test]
    fn numeric_json_and_csv() {
        let mut m = toy();
        m.matrices = Matrices::Numeric {
            ell: 5,
            branch: RootBranch::default(),
            b: vec![
                Matrix::from_rows(vec![vec![Complex64::new(0.1, -2.0)]]).unwrap(),
                Matrix::from_rows(vec![vec![Complex64::new(1.0 / 3.0, 0.0)]]).unwrap(),
            ],
        };
        let text = m.to_json_string();
        assert_eq!(
            FiniteModule::from_json_str(&text).unwrap().to_json_string(),
            text
        );
        assert_eq!(m.csv(1).unwrap(), "0.1-2i\n");
        assert!(m.field() == "complex@ell=5");
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(
            FiniteModule::from_json_str("{}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            FiniteModule::from_json_str("{\"n\":3,\"dim\":1,\"field\":\"mod7\",\"matrices\":{}}"),
            Err(Error::Parse(_))
        ));
    }
}
