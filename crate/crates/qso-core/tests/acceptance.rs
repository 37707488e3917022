//! One line per acceptance criterion; the test fails if any line is red.

use std::panic::{catch_unwind, AssertUnwindSafe};

use qso_core::freealg::{find_violation, AlgebraElement, Rewriter, Word};
use qso_core::linalg::{relation_residuals, Matrix};
use qso_core::qscalar::{rat, rat_int, RootBranch};
use qso_core::quotients::{
    baby_verma, character_of, classify_so3, nonclassical_split, weyl_quotient, BabyOptions,
    Character, QuotientOptions,
};
use qso_core::rank_low::{alpha_closed, so3_finite_quotient, Lam, So3Rep, So4Rep, WeightSequence};
use qso_core::ring::QTwo;
use qso_core::specialize::{
    gram_analysis, label_string, plus_shift_residual, qtorus_build, qtorus_decompose_so3,
    so3_gram_exact, GramOptions, RootOfUnity, TorusVariant,
};
use qso_core::verma::{truncation_basis, HighestWeightData, Truncation, VermaModule};
use qso_core::weights::{weyl_dimension, FormalWeight, Kind};
use qso_core::{GaussRat, QScalar, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn weight(kind: Kind, c: &[(i64, i64)]) -> FormalWeight {
    let coords: Vec<_> = c.iter().map(|&(p, q)| rat(p, q)).collect();
    let k = coords.len();
    FormalWeight::with_signs(kind, coords, vec![1; k]).unwrap()
}

const TORUS_CASES: [(usize, i64, TorusVariant); 3] = [
    (3, 4, TorusVariant::Plus),
    (3, 5, TorusVariant::Plus),
    (3, 6, TorusVariant::Real),
];

fn relation_suite() -> Verdict {
    for (kind, sign) in [
        (Kind::Classical, 1),
        (Kind::Nonclassical, 1),
        (Kind::Nonclassical, -1),
    ] {
        let seq = WeightSequence::standard(kind, &Lam::Sym(1), sign).map_err(|e| e.to_string())?;
        for size in 1..=8 {
            let rep = So3Rep::weight_basis(seq.clone(), size).map_err(|e| e.to_string())?;
            ensure(
                rep.relation_residuals(size - 1).unwrap().is_empty(),
                format!("so3 {kind} size {size}"),
            )?;
        }
    }
    for (kind, signs) in [(Kind::Classical, [1, 1]), (Kind::Nonclassical, [1, -1])] {
        let rep = So4Rep::symbolic(kind, signs);
        for r1 in 0..=3 {
            for r2 in 0..=3 {
                let zero = rep
                    .relation_residuals(r1, r2)
                    .unwrap()
                    .iter()
                    .all(|v| v.values().all(QScalar::is_zero));
                ensure(zero, format!("so4 {kind} at ({r1},{r2})"))?;
            }
        }
    }
    let hw = HighestWeightData::abstract_weights(5).unwrap();
    let mut vm = VermaModule::new(hw, &QScalar::var(Var::S)).unwrap();
    let basis = truncation_basis(5, &Truncation(vec![3, 3]));
    for r in vm.relation_residuals(&basis).unwrap() {
        for (w, c) in r.terms() {
            ensure(
                c.reduce_weight_relation().unwrap().is_zero(),
                format!("so5 Verma at {w}"),
            )?;
        }
    }
    let mut bad = Vec::new();
    for (n, ell, variant) in TORUS_CASES {
        for sign in [1, -1] {
            let rep = qtorus_build(n, ell, variant, sign, RootBranch::default(), 1e-9)
                .map_err(|e| e.to_string())?;
            if rep.standard_residual > 1e-9 {
                bad.push(format!(
                    "q-torus {variant} n={n} ℓ={ell} sign {sign}: residual {:.3} \
                     (relations hold with right-hand side {}B_j, residual {:.1e})",
                    rep.standard_residual,
                    if rep.relation_sign < 0 { "-" } else { "+" },
                    rep.relation_residual
                ));
            }
        }
    }
    ensure(bad.is_empty(), bad.join("; "))?;
    Ok(format!(
        "so3 sizes 1..8, so4 window (3,3), so5 Verma caps (3,3), {} q-torus cases",
        2 * TORUS_CASES.len()
    ))
}

fn so3_quotient_dimension() -> Verdict {
    for h in 1..=6 {
        let q = so3_finite_quotient(Kind::Classical, &rat(h, 2), 1).map_err(|e| e.to_string())?;
        ensure(
            q.rep.dim as i64 == h + 1,
            format!("λ = {h}/2: dim {}", q.rep.dim),
        )?;
        ensure(
            q.rep.seq.alpha(h + 1).unwrap().is_zero(),
            format!("λ = {h}/2: α does not vanish"),
        )?;
        for j in 1..=h {
            ensure(
                !q.rep.seq.alpha(j).unwrap().is_zero(),
                format!("λ = {h}/2: α_{{{},{j}}} = 0", j - 1),
            )?;
        }
    }
    Ok("λ = 1/2..3: dimension 2λ+1".into())
}

fn closed_forms() -> Verdict {
    for kind in [Kind::Classical, Kind::Nonclassical] {
        let seq = WeightSequence::standard(kind, &Lam::Sym(1), 1).unwrap();
        for j in 1..=10 {
            ensure(
                alpha_closed(kind, &Lam::Sym(1), j).unwrap() == seq.alpha(j).unwrap(),
                format!("{kind} j = {j}"),
            )?;
        }
    }
    Ok("j <= 10, both kinds, formal λ".into())
}

fn classification() -> Verdict {
    for k in 1..=4 {
        let c = classify_so3(k, &GaussRat::from_int(2)).map_err(|e| e.to_string())?;
        ensure(
            c.modules.len() == 5 && c.distinct,
            format!("k = {k}: {} modules", c.modules.len()),
        )?;
    }
    Ok("k = 1..4: 5 modules, distinct trace signatures".into())
}

fn characters() -> Verdict {
    use Kind::*;
    let mut battery: Vec<(usize, FormalWeight)> =
        (1..=6).map(|h| (3, weight(Classical, &[(h, 2)]))).collect();
    for c in [
        vec![(1, 1), (0, 1)],
        vec![(1, 1), (1, 1)],
        vec![(2, 1), (1, 1)],
    ] {
        battery.push((4, weight(Classical, &c)));
    }
    for c in [vec![(1, 2), (1, 2)], vec![(3, 2), (1, 2)]] {
        battery.push((4, weight(Nonclassical, &c)));
    }
    for c in [vec![(1, 1), (0, 1)], vec![(1, 1), (1, 1)]] {
        battery.push((5, weight(Classical, &c)));
    }
    battery.push((5, weight(Nonclassical, &[(1, 2), (1, 2)])));
    for (n, lam) in &battery {
        let m = weyl_quotient(*n, lam, &QuotientOptions::default())
            .map_err(|e| format!("so{n} {lam}: {e}"))?;
        let d = weyl_dimension(*n, &lam.coords).unwrap();
        ensure(
            d == m.dim().into(),
            format!("so{n} {lam}: dim {} vs {d}", m.dim()),
        )?;
        let ch = character_of(&m).map_err(|e| e.to_string())?;
        ensure(
            ch == Character::weyl(*n, lam).unwrap(),
            format!("so{n} {lam}: character"),
        )?;
        ensure(
            ch.is_weyl_symmetric(*n).unwrap(),
            format!("so{n} {lam}: not symmetric"),
        )?;
    }
    Ok(format!("{} weights", battery.len()))
}

fn splitting() -> Verdict {
    use Kind::Nonclassical;
    let cases = [
        (3, weight(Nonclassical, &[(3, 2)]), 2),
        (4, weight(Nonclassical, &[(1, 2), (1, 2)]), 2),
        (5, weight(Nonclassical, &[(1, 2), (1, 2)]), 4),
    ];
    for (n, lam, parts) in cases {
        let m = weyl_quotient(n, &lam, &QuotientOptions::default()).map_err(|e| e.to_string())?;
        let r = nonclassical_split(&m).map_err(|e| e.to_string())?;
        let dims: Vec<usize> = r.summands.iter().map(|s| s.dim()).collect();
        ensure(
            dims.len() == parts && dims.iter().all(|&d| d * parts == m.dim()),
            format!("so{n} {lam}: summand dims {dims:?}"),
        )?;
        ensure(r.intertwined, format!("so{n} {lam}: not intertwined"))?;
    }
    Ok("so3: 2, so4: 2, so5 (1/2,1/2): 4 of dim 1".into())
}

fn torus_decomposition() -> Verdict {
    let build = |ell, variant| {
        let rep = qtorus_build(3, ell, variant, 1, RootBranch::default(), 1e-9)
            .map_err(|e| e.to_string())?;
        qtorus_decompose_so3(&rep, 1e-9).map_err(|e| e.to_string())
    };
    let d4 = build(4, TorusVariant::Plus)?;
    let mut dims = d4.dims();
    dims.sort();
    ensure(dims == vec![1, 3], format!("ℓ = 4: dims {dims:?}"))?;
    let labels: Vec<String> = d4
        .summands
        .iter()
        .flat_map(|s| s.labels.iter().map(label_string))
        .collect();
    ensure(
        labels.contains(&"[1]".to_string()) && labels.contains(&"[2]".to_string()),
        format!("ℓ = 4: labels {labels:?}"),
    )?;
    let mut d5 = build(5, TorusVariant::Plus)?.dims();
    d5.sort();
    ensure(d5 == vec![2, 3], format!("ℓ = 5: dims {d5:?}"))?;
    let real = build(6, TorusVariant::Real)?;
    ensure(
        real.summands.is_empty(),
        format!("real ℓ = 6: {} summands", real.summands.len()),
    )?;
    Ok("ℓ=4 {3,1} with [1],[2]; ℓ=5 {3,2}; real ℓ=6 none".into())
}

fn baby() -> Verdict {
    let m3 = baby_verma(3, Kind::Classical, &[rat(1, 3)], &[1], &BabyOptions::new(5))
        .map_err(|e| e.to_string())?;
    ensure(m3.dim() == 5, format!("so3 ℓ=5: dim {}", m3.dim()))?;
    let m4 = baby_verma(
        4,
        Kind::Classical,
        &[rat(1, 3), rat(1, 7)],
        &[1, 1],
        &BabyOptions::new(3),
    )
    .map_err(|e| e.to_string())?;
    ensure(m4.dim() == 9, format!("so4 ℓ=3: dim {}", m4.dim()))?;
    Ok("so3 ℓ=5: 5, so4 ℓ=3: 9".into())
}

fn unitarity() -> Verdict {
    for kind in [Kind::Classical, Kind::Nonclassical] {
        let (_, exact) = so3_gram_exact(kind, 1, 5).map_err(|e| e.to_string())?;
        ensure(exact, format!("so3 {kind}: recursion not exact"))?;
    }
    let lam = weight(Kind::Classical, &[(2, 1), (1, 1)]);
    let r = gram_analysis(4, &lam, &GramOptions::new(12)).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (i, g) in &r.reflection_norms {
        let g = g.ok_or(format!("no norm for s_{i}.λ"))?;
        worst = worst.max(g.norm());
    }
    ensure(worst <= 1e-9, format!("so4 (2,1) ℓ=12: |g| = {worst:e}"))?;
    Ok(format!(
        "so3 exact; so4 (2,1) ℓ=12 max reflection norm {worst:.1e}"
    ))
}

fn plus_shift() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let lam: f64 = rng.random_range(-10.0..10.0);
        let ell = 2 * rng.random_range(2i64..20);
        let root = RootOfUnity::new(ell, RootBranch::default()).unwrap();
        worst = worst.max(plus_shift_residual(lam, &root).unwrap());
    }
    ensure(worst <= 1e-10, format!("residual {worst:e}"))?;
    Ok(format!("20 random λ, max residual {worst:.1e}"))
}

fn rewriting() -> Verdict {
    let s = GaussRat::from_int(2);
    let two = GaussRat::q_two(&s).unwrap();
    let eval = |m: &Matrix<QScalar>| m.map(|x| x.eval_exact(&s)).unwrap();
    let three: Vec<_> = so3_finite_quotient(Kind::Classical, &rat_int(1), 1)
        .unwrap()
        .rep
        .matrices()
        .iter()
        .map(eval)
        .collect();
    let so4 = So4Rep::concrete(&weight(Kind::Classical, &[(1, 1), (0, 1)])).unwrap();
    let four: Vec<_> = so4.window(1, 1).unwrap().1.iter().map(eval).collect();
    for b in [&three, &four] {
        ensure(
            relation_residuals(b, &two)
                .unwrap()
                .iter()
                .all(|(_, r)| r.is_zero()),
            "small representation",
        )?;
    }
    let word_matrix = |b: &[Matrix<GaussRat>], w: &[u8]| {
        w.iter().fold(Matrix::identity(b[0].rows()), |acc, &a| {
            acc.mul(&b[a as usize - 1]).unwrap()
        })
    };
    let mut checked = 0;
    for (n, b) in [(3usize, &three), (4, &four)] {
        let mut rw = Rewriter::new(n, two.clone()).unwrap();
        let mut layer: Vec<Vec<u8>> = vec![vec![]];
        for _ in 0..6 {
            layer = layer
                .iter()
                .flat_map(|w| (1..n as u8).map(move |a| [w.as_slice(), &[a]].concat()))
                .collect();
            for w in &layer {
                let Some(v) = find_violation(w) else { continue };
                let seg = &w[v.start..v.end];
                let mut d = word_matrix(b, seg);
                for (u, c) in rw.rule_rhs(v.rule, seg).unwrap() {
                    d = d.sub(&word_matrix(b, &u).scale(&c)).unwrap();
                }
                ensure(d.is_zero(), format!("so{n}: {:?} on {seg:?}", v.rule))?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let n = if case % 2 == 0 { 4 } else { 5 };
        let random = |rng: &mut ChaCha8Rng| {
            AlgebraElement::from_terms((0..rng.random_range(1..4)).map(|_| {
                let len = rng.random_range(0..=6);
                let w: Vec<u8> = (0..len).map(|_| rng.random_range(1..n as u8)).collect();
                (Word::new(&w), QScalar::from_int(rng.random_range(1..5)))
            }))
        };
        let (a, b) = (random(&mut rng), random(&mut rng));
        let mut rw = Rewriter::new(n, QScalar::bracket_int(2)).unwrap();
        let na = rw.normal_form(&a).unwrap();
        let nb = rw.normal_form(&b).unwrap();
        ensure(
            rw.normal_form(&na).unwrap() == na,
            format!("not idempotent on {a:?}"),
        )?;
        let k = QScalar::from_int(-3);
        ensure(
            rw.normal_form(&a.add(&b.scale(&k))).unwrap() == na.add(&nb.scale(&k)),
            format!("not linear on {a:?}, {b:?}"),
        )?;
    }
    Ok(format!("{checked} rule applications; 200 random elements"))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("relation suite", relation_suite),
        ("so3 quotient dimension", so3_quotient_dimension),
        ("closed forms vs recursion", closed_forms),
        ("so3 classification count", classification),
        ("character and dimension", characters),
        ("nonclassical splitting", splitting),
        ("q-torus decomposition", torus_decomposition),
        ("baby Verma dimension", baby),
        ("unitarity necessary conditions", unitarity),
        ("[λ]+ = [λ+ℓ/4]", plus_shift),
        ("rewriting soundness", rewriting),
    ];
    let mut red = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match v {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
                red.push(i + 1);
            }
        }
    }
    assert!(red.is_empty(), "failing criteria: {red:?}");
}
