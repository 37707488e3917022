use std::collections::HashSet;

use proptest::prelude::*;
use qso_core::freealg::{find_violation, AlgebraElement, Rewriter, Rule, Word};
use qso_core::linalg::Matrix;
use qso_core::qscalar::{rat, rat_int};
use qso_core::rank_low::{so3_finite_quotient, So4Rep};
use qso_core::ring::QTwo;
use qso_core::weights::{FormalWeight, Kind};
use qso_core::{GaussRat, QScalar};

fn points() -> Vec<GaussRat> {
    vec![GaussRat::from_int(2), GaussRat::real(rat(5, 3))]
}

fn three_dim(s: &GaussRat) -> Vec<Matrix<GaussRat>> {
    let q = so3_finite_quotient(Kind::Classical, &rat_int(1), 1).unwrap();
    q.rep
        .matrices()
        .iter()
        .map(|m| m.map(|x| x.eval_exact(s)).unwrap())
        .collect()
}

/// so4, λ = (1,0): the window `r1, r2 <= 1` is the finite quotient.
fn four_dim(s: &GaussRat) -> Vec<Matrix<GaussRat>> {
    let rep = So4Rep::concrete(&FormalWeight::classical(vec![rat_int(1), rat_int(0)])).unwrap();
    let (idx, mats) = rep.window(1, 1).unwrap();
    assert_eq!(idx.len(), 4);
    mats.iter()
        .map(|m| m.map(|x| x.eval_exact(s)).unwrap())
        .collect()
}

fn word_matrix(b: &[Matrix<GaussRat>], w: &[u8]) -> Matrix<GaussRat> {
    let mut acc = Matrix::identity(b[0].rows());
    for &a in w {
        acc = acc.mul(&b[a as usize - 1]).unwrap();
    }
    acc
}

fn all_words(letters: u8, max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for a in 1..=letters {
                let mut v: Vec<u8> = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn rule_tag(r: Rule) -> &'static str {
    match r {
        Rule::Commute => "commute",
        Rule::ExchangeA { .. } => "exchange-a",
        Rule::Cubic { .. } => "cubic",
        Rule::ExchangeB { .. } => "exchange-b",
        Rule::Reorder { .. } => "reorder",
    }
}

#[test]
fn representations_satisfy_relations() {
    for s in points() {
        let two = GaussRat::q_two(&s).unwrap();
        for b in [three_dim(&s), four_dim(&s)] {
            for ((i, j), r) in qso_core::linalg::relation_residuals(&b, &two).unwrap() {
                assert!(r.is_zero(), "relation ({i},{j}) fails at s = {s}");
            }
        }
    }
}

#[test]
fn every_rule_annihilates_the_small_representations() {
    let mut seen = HashSet::new();
    for s in points() {
        let two = GaussRat::q_two(&s).unwrap();
        for (n, b) in [(3usize, three_dim(&s)), (4, four_dim(&s))] {
            let mut rw = Rewriter::new(n, two.clone()).unwrap();
            for w in all_words(n as u8 - 1, 6) {
                let Some(v) = find_violation(&w) else {
                    continue;
                };
                let seg = &w[v.start..v.end];
                let mut diff = word_matrix(&b, seg);
                for (u, c) in rw.rule_rhs(v.rule, seg).unwrap() {
                    diff = diff.sub(&word_matrix(&b, &u).scale(&c)).unwrap();
                }
                assert!(diff.is_zero(), "so_{n}: {:?} on {seg:?} at s = {s}", v.rule);
                seen.insert(rule_tag(v.rule));
            }
        }
    }
    for tag in ["commute", "exchange-a", "cubic", "exchange-b", "reorder"] {
        assert!(seen.contains(tag), "rule {tag} never exercised");
    }
}

#[test]
fn normal_forms_agree_with_representations() {
    let s = GaussRat::from_int(2);
    let two = GaussRat::q_two(&s).unwrap();
    let b = four_dim(&s);
    let mut rw = Rewriter::new(4, two).unwrap();
    for w in all_words(3, 5) {
        let nf = rw.normal_form_word(&w).unwrap();
        let mut m = Matrix::zeros(4, 4);
        for (u, c) in nf.terms() {
            m = m.add(&word_matrix(&b, &u.0).scale(c)).unwrap();
        }
        assert_eq!(m, word_matrix(&b, &w), "{w:?}");
    }
}

fn element(n: usize) -> impl Strategy<Value = AlgebraElement<QScalar>> {
    let word = prop::collection::vec(1..n as u8, 0..=6);
    prop::collection::vec((word, -3i64..=3), 1..4).prop_map(|terms| {
        AlgebraElement::from_terms(
            terms
                .into_iter()
                .filter(|(_, c)| *c != 0)
                .map(|(w, c)| (Word::new(&w), QScalar::from_int(c))),
        )
    })
}

fn so4_or_so5(
) -> impl Strategy<Value = (usize, AlgebraElement<QScalar>, AlgebraElement<QScalar>, i64)> {
    prop_oneof![Just(4usize), Just(5usize)]
        .prop_flat_map(|n| (Just(n), element(n), element(n), -4i64..=4))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn normal_form_is_idempotent_and_linear((n, a, b, k) in so4_or_so5()) {
        let mut rw = Rewriter::new(n, QScalar::bracket_int(2)).unwrap();
        let na = rw.normal_form(&a).unwrap();
        prop_assert_eq!(&rw.normal_form(&na).unwrap(), &na);
        let nb = rw.normal_form(&b).unwrap();
        let c = QScalar::from_int(k);
        let combo = a.add(&b.scale(&c));
        prop_assert_eq!(rw.normal_form(&combo).unwrap(), na.add(&nb.scale(&c)));
    }
}
