use qso_core::qscalar::rat;
use qso_core::quotients::{
    character_of, nonclassical_split, weyl_quotient, Character, QuotientOptions,
};
use qso_core::weights::{FormalWeight, Kind};

fn weight(kind: Kind, c: &[(i64, i64)]) -> FormalWeight {
    let coords = c.iter().map(|&(p, q)| rat(p, q)).collect::<Vec<_>>();
    let k = coords.len();
    FormalWeight::with_signs(kind, coords, vec![1; k]).unwrap()
}

fn check(n: usize, lam: &FormalWeight) {
    let t = std::time::Instant::now();
    let m = weyl_quotient(n, lam, &QuotientOptions::default()).unwrap();
    let ch = character_of(&m).unwrap();
    assert_eq!(ch, Character::weyl(n, lam).unwrap());
    assert!(ch.is_weyl_symmetric(n).unwrap());
    eprintln!(
        "so{n} {lam}: dim {} [{}] in {:?}",
        m.dim(),
        m.provenance,
        t.elapsed()
    );
}

#[test]
fn so4_battery() {
    use Kind::*;
    for (kind, c) in [
        (Classical, vec![(1, 1), (0, 1)]),
        (Classical, vec![(1, 1), (1, 1)]),
        (Classical, vec![(2, 1), (1, 1)]),
        (Nonclassical, vec![(1, 2), (1, 2)]),
        (Nonclassical, vec![(3, 2), (1, 2)]),
    ] {
        check(4, &weight(kind, &c));
    }
}

#[test]
fn so5_battery() {
    use Kind::*;
    for (kind, c) in [
        (Classical, vec![(1, 1), (0, 1)]),
        (Classical, vec![(1, 1), (1, 1)]),
        (Nonclassical, vec![(1, 2), (1, 2)]),
        (Nonclassical, vec![(3, 2), (1, 2)]),
    ] {
        check(5, &weight(kind, &c));
    }
}

#[test]
fn so5_nonclassical_splits_into_four() {
    let lam = weight(Kind::Nonclassical, &[(1, 2), (1, 2)]);
    let m = weyl_quotient(5, &lam, &QuotientOptions::default()).unwrap();
    let r = nonclassical_split(&m).unwrap();
    assert_eq!(r.summands.len(), 4);
    assert!(r.summands.iter().all(|s| s.dim() == 1));
    assert!(r.distinct_signatures && r.intertwined);
}
