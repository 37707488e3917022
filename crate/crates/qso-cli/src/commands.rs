use std::fs;
use std::path::Path;

use qso_core::linalg::Matrix;
use qso_core::qscalar::{fmt_rat, GaussRat, QScalar, RootBranch, Var};
use qso_core::quotients::{
    baby_verma, character_of, classify_so3, nonclassical_split, weyl_quotient, BabyOptions,
    Character, FiniteModule, Matrices, QuotientOptions,
};
use qso_core::rank_low::{so3_finite_quotient, Lam, So3Rep, So4Rep, WeightSequence};
use qso_core::specialize::{
    gram_analysis, label_string, match_by_character, qtorus_build, qtorus_decompose_so3,
    GramOptions, TorusVariant,
};
use qso_core::verma::{truncation_basis, HighestWeightData, Truncation, VermaModule};
use qso_core::weights::{parse_coords, weyl_dimension, FormalWeight, Kind, RVec};
use qso_core::{Error, Result};
use serde_json::{json, Value};

use crate::args::{Command, KindArg, SpecArgs, VariantArg, WeightArgs};

/// Result of a subcommand: a JSON document, the module it describes (for
/// CSV output), and the exit status.
pub struct Outcome {
    pub json: Value,
    pub module: Option<FiniteModule>,
    pub code: i32,
}

impl Outcome {
    fn value(json: Value) -> Self {
        Outcome {
            json,
            module: None,
            code: 0,
        }
    }

    fn module(m: FiniteModule) -> Self {
        Outcome {
            json: m.to_json(),
            module: Some(m),
            code: 0,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn kind_of(k: KindArg) -> (Kind, i8) {
    match k {
        KindArg::Classical => (Kind::Classical, 1),
        KindArg::NcPlus => (Kind::Nonclassical, 1),
        KindArg::NcMinus => (Kind::Nonclassical, -1),
    }
}

fn parse_signs(text: &str) -> Result<Vec<i8>> {
    text.split(',')
        .map(|s| match s.trim() {
            "+" | "+1" | "1" => Ok(1),
            "-" | "-1" => Ok(-1),
            o => Err(usage(format!("bad sign {o:?}; use + or -"))),
        })
        .collect()
}

fn weight(kind: KindArg, coords: RVec, signs: Option<&str>) -> Result<FormalWeight> {
    let (kind, sign) = kind_of(kind);
    let signs = match signs {
        Some(s) => parse_signs(s)?,
        None => vec![sign; coords.len()],
    };
    FormalWeight::with_signs(kind, coords, signs)
}

fn weight_from(w: &WeightArgs) -> Result<FormalWeight> {
    weight(w.kind, parse_coords(&w.lambda)?, w.signs.as_deref())
}

fn is_formal(lambda: &str) -> bool {
    let t = lambda.trim();
    t == "t"
        || t.split(',')
            .all(|x| x.trim().starts_with('t') && !x.trim().is_empty())
}

fn gauss(text: &str) -> Result<GaussRat> {
    GaussRat::parse(text).map_err(|e| usage(format!("--q-rational / QSO_Q0: {e}")))
}

fn read_module(path: &Path) -> Result<FiniteModule> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    FiniteModule::from_json_str(&text)
}

/// Specialize a symbolic module as requested.
fn specialize(m: FiniteModule, spec: &SpecArgs) -> Result<FiniteModule> {
    if spec.symbolic {
        return Ok(m);
    }
    match spec.ell {
        Some(ell) => m.specialize_root(ell, RootBranch { j: spec.branch }),
        None => m.specialize_exact(&gauss(&spec.q_rational)?),
    }
}

fn qscalar_matrix(m: &Matrix<QScalar>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect()))
            .collect(),
    )
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::So3 {
            lambda,
            kind,
            size,
            spec,
        } => so3(lambda, *kind, *size, spec),
        Command::So4 {
            lambda,
            kind,
            signs,
            trunc,
            spec,
        } => so4(lambda, *kind, signs.as_deref(), trunc, spec),
        Command::Verma {
            n,
            lambda,
            kind,
            signs,
            truncation,
            no_check,
        } => verma(*n, lambda, *kind, signs.as_deref(), truncation, !no_check),
        Command::Quotient {
            n,
            weight,
            q_rational,
            cap,
            margin,
            max_dim,
        } => {
            let lam = weight_from(weight)?;
            let opts = QuotientOptions {
                s: gauss(q_rational)?,
                cap: *cap,
                margin: *margin,
                max_dim: *max_dim,
                ..QuotientOptions::default()
            };
            Ok(Outcome::module(weyl_quotient(*n, &lam, &opts)?))
        }
        Command::Split {
            input,
            n,
            lambda,
            signs,
            q_rational,
        } => {
            let m = match (input, n, lambda) {
                (Some(p), _, _) => read_module(p)?,
                (None, Some(n), Some(l)) => {
                    let lam = weight(KindArg::NcPlus, parse_coords(l)?, signs.as_deref())?;
                    let opts = QuotientOptions {
                        s: gauss(q_rational)?,
                        ..QuotientOptions::default()
                    };
                    weyl_quotient(*n, &lam, &opts)?
                }
                _ => return Err(usage("split needs --input, or --n with --lambda")),
            };
            split(&m)
        }
        Command::ClassifySo3 { dim, q_rational } => {
            let c = classify_so3(*dim, &gauss(q_rational)?)?;
            Ok(Outcome::value(json!({
                "dim": dim,
                "count": c.modules.len(),
                "distinct": c.distinct,
                "signatures": c.signatures.iter()
                    .map(|(a, b)| json!([a.to_string(), b.to_string()]))
                    .collect::<Vec<_>>(),
                "modules": c.modules.iter().map(FiniteModule::to_json).collect::<Vec<_>>(),
            })))
        }
        Command::Baby {
            n,
            ell,
            weight,
            branch,
            tol,
        } => {
            // generic weights are arbitrary rationals, not half-integers
            let coords = parse_coords(&weight.lambda)?;
            let (kind, sign) = kind_of(weight.kind);
            let signs = match &weight.signs {
                Some(t) => parse_signs(t)?,
                None => vec![sign; coords.len()],
            };
            let mut opts = BabyOptions::new(*ell);
            opts.branch = RootBranch { j: *branch };
            opts.tol = *tol;
            Ok(Outcome::module(baby_verma(
                *n, kind, &coords, &signs, &opts,
            )?))
        }
        Command::Qtorus {
            n,
            ell,
            variant,
            sign,
            branch,
            decompose,
            tol,
        } => qtorus(*n, *ell, *variant, sign, *branch, *decompose, *tol),
        Command::Gram {
            n,
            weight,
            ell,
            branch,
            depth,
            tol,
        } => {
            let lam = weight_from(weight)?;
            let mut opts = GramOptions::new(*ell);
            opts.branch = RootBranch { j: *branch };
            opts.tol = *tol;
            if let Some(d) = depth {
                opts.depth = *d;
            }
            Ok(Outcome::value(gram_analysis(*n, &lam, &opts)?.to_json()))
        }
        Command::Verify { input, tol } => {
            let m = read_module(input)?;
            let r = m.relation_report(*tol)?;
            let code = if r.ok() { 0 } else { 3 };
            let json = serde_json::to_value(&r).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(Outcome {
                json,
                module: None,
                code,
            })
        }
        Command::Character {
            input,
            n,
            lambda,
            kind,
            signs,
        } => match (input, n, lambda) {
            (Some(p), _, _) => {
                let m = read_module(p)?;
                let c = character_of(&m)?;
                Ok(Outcome::value(character_json(&c, m.n, None)?))
            }
            (None, Some(n), Some(l)) => {
                let lam = weight(*kind, parse_coords(l)?, signs.as_deref())?;
                let c = Character::weyl(*n, &lam)?;
                let d = weyl_dimension(*n, &lam.coords)?;
                Ok(Outcome::value(character_json(&c, *n, Some(d.to_string()))?))
            }
            _ => Err(usage("character needs --input, or --n with --lambda")),
        },
        Command::Match { a, b, seed, tol } => {
            let r = match_by_character(&read_module(a)?, &read_module(b)?, *tol, *seed)?;
            Ok(Outcome::value(r.to_json()))
        }
    }
}

fn character_json(c: &Character, n: usize, weyl_dim: Option<String>) -> Result<Value> {
    let mut v = json!({
        "dimension": c.dimension(),
        "weyl_symmetric": c.is_weyl_symmetric(n)?,
        "weights": c.to_json(),
    });
    if let Some(d) = weyl_dim {
        v["weyl_dimension"] = Value::String(d);
    }
    Ok(v)
}

fn so3(lambda: &str, kind: KindArg, size: usize, spec: &SpecArgs) -> Result<Outcome> {
    let (k, sign) = kind_of(kind);
    let m = if is_formal(lambda) {
        let seq = WeightSequence::standard(k, &Lam::Sym(1), sign)?;
        let rep = So3Rep::weight_basis(seq, size)?;
        FiniteModule::new(
            3,
            None,
            (0..size).map(|j| format!("v_{j}")).collect(),
            Matrices::Symbolic { b: rep.matrices() },
            "so3 weight basis, formal λ, truncated",
        )?
    } else {
        let coords = parse_coords(lambda)?;
        let [lam] = coords.as_slice() else {
            return Err(usage("so3 takes a single λ"));
        };
        let q = so3_finite_quotient(k, lam, sign)?;
        FiniteModule::new(
            3,
            Some(FormalWeight::with_signs(k, vec![lam.clone()], vec![sign])?),
            (0..q.rep.dim).map(|j| format!("v_{j}")).collect(),
            Matrices::Symbolic {
                b: q.rep.matrices(),
            },
            format!("so3 quotient λ={}", fmt_rat(lam)),
        )?
    };
    Ok(Outcome::module(specialize(m, spec)?))
}

fn so4(
    lambda: &str,
    kind: KindArg,
    signs: Option<&str>,
    trunc: &str,
    spec: &SpecArgs,
) -> Result<Outcome> {
    let caps = parse_caps(trunc)?;
    let [r1, r2] = caps.as_slice() else {
        return Err(usage("--trunc takes R1,R2"));
    };
    let (rep, hw) = if is_formal(lambda) {
        let (k, sign) = kind_of(kind);
        let s = match signs {
            Some(t) => parse_signs(t)?,
            None => vec![sign; 2],
        };
        let [a, b] = s.as_slice() else {
            return Err(usage("so4 takes two signs"));
        };
        (So4Rep::symbolic(k, [*a, *b]), None)
    } else {
        let lam = weight(kind, parse_coords(lambda)?, signs)?;
        (So4Rep::concrete(&lam)?, Some(lam))
    };
    let (idx, mats) = rep.window(*r1, *r2)?;
    let m = FiniteModule::new(
        4,
        hw,
        idx.iter().map(|(a, b)| format!("v({a},{b})")).collect(),
        Matrices::Symbolic { b: mats },
        format!("so4 weight basis window r1<={r1}, r2<={r2}"),
    )?;
    Ok(Outcome::module(specialize(m, spec)?))
}

fn parse_caps(text: &str) -> Result<Vec<u32>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| usage(format!("bad cap {x:?}")))
        })
        .collect()
}

fn verma(
    n: usize,
    lambda: &str,
    kind: KindArg,
    signs: Option<&str>,
    truncation: &str,
    check: bool,
) -> Result<Outcome> {
    if n < 3 {
        return Err(Error::Domain(format!("so_{n}: n must be at least 3")));
    }
    let hw = match lambda.trim() {
        "abstract" => HighestWeightData::abstract_weights(n)?,
        l if is_formal(l) => {
            let (k, sign) = kind_of(kind);
            let s = match signs {
                Some(t) => parse_signs(t)?,
                None => vec![sign; n / 2],
            };
            HighestWeightData::symbolic_weight(n, k, &s)?
        }
        l => HighestWeightData::from_weight(n, &weight(kind, parse_coords(l)?, signs)?)?,
    };
    let mut caps = parse_caps(truncation)?;
    let want = (n - 1) / 2;
    if caps.len() == 1 && want > 1 {
        caps = vec![caps[0]; want];
    }
    if caps.len() != want {
        return Err(usage(format!("so_{n} needs {want} truncation caps")));
    }
    let trunc = Truncation(caps.clone());
    let basis = truncation_basis(n, &trunc);
    let weight_json = serde_json::to_value(&hw.weight).unwrap_or(Value::Null);
    let m_json: Vec<String> = hw.m.iter().map(ToString::to_string).collect();
    let nt_json: Vec<String> = hw.ntilde.iter().map(ToString::to_string).collect();
    let mut vm = VermaModule::new(hw, &QScalar::var(Var::S))?;
    let mut cartan = serde_json::Map::new();
    for i in 1..=n / 2 {
        cartan.insert(
            format!("B{}", 2 * i - 1),
            qscalar_matrix(&vm.cartan_matrix(i, &trunc)?),
        );
    }
    let mut out = json!({
        "n": n,
        "highest_weight": weight_json,
        "m": m_json,
        "ntilde": nt_json,
        "truncation": caps,
        "dim": basis.len(),
        "basis": basis.iter().map(|w| w.letters().to_vec()).collect::<Vec<_>>(),
        "field": "symbolic",
        "cartan": cartan,
    });
    if check {
        // free m_i, ñ_i are tied by m_i^2 - [2] m_i ñ_i + ñ_i^2 = 1
        let mut zero = true;
        for r in vm.relation_residuals(&basis)? {
            for (_, c) in r.terms() {
                zero &= c.reduce_weight_relation()?.is_zero();
            }
        }
        out["relations_exact_zero"] = Value::Bool(zero);
    }
    Ok(Outcome::value(out))
}

fn split(m: &FiniteModule) -> Result<Outcome> {
    let r = nonclassical_split(m)?;
    Ok(Outcome::value(json!({
        "count": r.summands.len(),
        "dims": r.summands.iter().map(FiniteModule::dim).collect::<Vec<_>>(),
        "patterns": r.patterns,
        "even_traces": r.even_traces.iter()
            .map(|t| t.iter().map(ToString::to_string).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "distinct_signatures": r.distinct_signatures,
        "intertwined": r.intertwined,
        "summands": r.summands.iter().map(FiniteModule::to_json).collect::<Vec<_>>(),
    })))
}

fn complex_json(z: num_complex::Complex64) -> Value {
    json!([z.re, z.im])
}

fn qtorus(
    n: usize,
    ell: i64,
    variant: VariantArg,
    sign: &str,
    branch: i64,
    decompose: bool,
    tol: f64,
) -> Result<Outcome> {
    let sign = match sign.trim() {
        "+" | "+1" | "1" => 1,
        "-" | "-1" => -1,
        o => return Err(usage(format!("bad sign {o:?}; use + or -"))),
    };
    let variant = match variant {
        VariantArg::Plus => TorusVariant::Plus,
        VariantArg::Real => TorusVariant::Real,
    };
    let rep = qtorus_build(n, ell, variant, sign, RootBranch { j: branch }, tol)?;
    let module = rep.to_module()?;
    let mut out = json!({
        "n": n,
        "ell": ell,
        "variant": variant.to_string(),
        "sign": sign,
        "dim": rep.dim(),
        "relation_sign": rep.relation_sign,
        "torus_residual": rep.torus_residual,
        "relation_residual": rep.relation_residual,
        "standard_residual": rep.standard_residual,
        "module": module.to_json(),
    });
    if decompose {
        let d = qtorus_decompose_so3(&rep, tol)?;
        out["decomposition"] = json!({
            "dims": d.dims(),
            "complete": d.complete,
            "note": d.note,
            "summands": d.summands.iter().map(|s| json!({
                "dim": s.dim,
                "highest_value": complex_json(s.highest_value),
                "labels": s.labels.iter().map(label_string).collect::<Vec<_>>(),
                "module": s.module.to_json(),
            })).collect::<Vec<_>>(),
        });
    }
    Ok(Outcome {
        json: out,
        module: Some(module),
        code: 0,
    })
}
