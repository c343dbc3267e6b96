mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{oracle_combine, q, random_bpa, rng, Atoms, Bpa};
use metaconflict::{combine, combine_many, DsError, Frame, Mass, MassFunction, Rational, Subset};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn frame(atoms: usize) -> Arc<Frame> {
    Arc::new(Frame::new((0..atoms).map(|i| format!("x{i}"))).unwrap())
}

fn to_mass<M: Mass>(frame: &Arc<Frame>, bpa: &Bpa) -> MassFunction<M> {
    let focals = bpa
        .iter()
        .map(|(s, m)| (Subset::from_indices(s.iter().copied()), convert::<M>(m)));
    MassFunction::new(frame.clone(), focals).unwrap()
}

fn convert<M: Mass>(m: &Rational) -> M {
    M::parse(&format!("{}/{}", m.numer(), m.denom())).unwrap()
}

fn as_map(m: &MassFunction<Rational>) -> BTreeMap<Atoms, Rational> {
    m.focals().map(|(s, v)| (s.indices().collect(), v.clone())).collect()
}

fn assert_close(a: &MassFunction<f64>, b: &MassFunction<f64>, tol: f64) {
    let keys: std::collections::BTreeSet<Subset> = a.focals().chain(b.focals()).map(|(s, _)| s).collect();
    for s in keys {
        assert!(
            (a.mass(s) - b.mass(s)).abs() <= tol,
            "{s:?}: {} vs {}",
            a.mass(s),
            b.mass(s)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn combine_agrees_with_double_loop(seed in any::<u64>(), atoms in 1usize..=6) {
        let mut r = rng(seed);
        let (a, b) = (random_bpa(&mut r, atoms), random_bpa(&mut r, atoms));
        let f = frame(atoms);
        let got = combine(&to_mass::<Rational>(&f, &a), &to_mass::<Rational>(&f, &b));
        match oracle_combine(&a, &b) {
            None => prop_assert_eq!(got, Err(DsError::TotalConflict)),
            Some((joint, k)) => {
                let got = got.unwrap();
                prop_assert_eq!(as_map(&got), joint);
                prop_assert_eq!(got.conflict().clone(), k);
            }
        }
    }

    #[test]
    fn masses_normalize_and_bel_below_pls(seed in any::<u64>(), atoms in 1usize..=6) {
        let mut r = rng(seed);
        let f = frame(atoms);
        let a = to_mass::<f64>(&f, &random_bpa(&mut r, atoms));
        let b = to_mass::<f64>(&f, &random_bpa(&mut r, atoms));
        if let Ok(m) = combine(&a, &b) {
            prop_assert!((m.total() - 1.0).abs() <= 1e-9);
            for bits in 1u128..(1 << atoms) {
                let s = Subset::from_bits(bits);
                let (bel, pls) = (m.belief(s), m.plausibility(s));
                prop_assert!(-1e-12 <= bel && bel <= pls + 1e-12 && pls <= 1.0 + 1e-12, "{bel} {pls}");
            }
        }
        let alpha = r_alpha(seed);
        let d = a.discount(alpha).unwrap();
        prop_assert!((d.total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn combine_is_commutative_and_associative(seed in any::<u64>(), atoms in 1usize..=5) {
        let mut r = rng(seed);
        let f = frame(atoms);
        let ms: Vec<MassFunction<Rational>> = (0..3).map(|_| to_mass(&f, &random_bpa(&mut r, atoms))).collect();
        let ab = combine(&ms[0], &ms[1]);
        let ba = combine(&ms[1], &ms[0]);
        prop_assert_eq!(&ab, &ba);
        let left = ab.and_then(|ab| combine(&ab, &ms[2]));
        let right = combine(&ms[1], &ms[2]).and_then(|bc| combine(&ms[0], &bc));
        match (left, right) {
            (Ok(l), Ok(r)) => prop_assert_eq!(as_map(&l), as_map(&r)),
            (l, r) => prop_assert!(l.is_err() && r.is_err()),
        }
    }

    #[test]
    fn fold_order_does_not_matter(seed in any::<u64>(), atoms in 1usize..=5) {
        let mut r = rng(seed);
        let f = frame(atoms);
        let ms: Vec<MassFunction<f64>> = (0..3).map(|_| to_mass(&f, &random_bpa(&mut r, atoms))).collect();
        let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let results: Vec<_> = orders
            .iter()
            .map(|o| combine_many(&[ms[o[0]].clone(), ms[o[1]].clone(), ms[o[2]].clone()]))
            .collect();
        if results.iter().all(|r| r.is_ok()) {
            let first = results[0].as_ref().unwrap();
            for other in &results[1..] {
                let other = other.as_ref().unwrap();
                assert_close(first, other, 1e-9);
                prop_assert!((first.conflict() - other.conflict()).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn discounting_composes(seed in any::<u64>(), a in 0i64..=10, b in 0i64..=10) {
        let mut r = rng(seed);
        let f = frame(4);
        let m = to_mass::<Rational>(&f, &random_bpa(&mut r, 4));
        let (a, b) = (q(a, 10), q(b, 10));
        let twice = m.discount(a.clone()).unwrap().discount(b.clone()).unwrap();
        let once = m.discount(a * b).unwrap();
        prop_assert_eq!(as_map(&twice), as_map(&once));
    }
}

fn r_alpha(seed: u64) -> f64 {
    (seed % 101) as f64 / 100.0
}

#[test]
fn vacuous_is_neutral() {
    let f = frame(3);
    let mut r = rng(9);
    let m = to_mass::<Rational>(&f, &random_bpa(&mut r, 3));
    let v = MassFunction::vacuous(f);
    let c = combine(&m, &v).unwrap();
    assert_eq!(as_map(&c), as_map(&m));
    assert!(c.conflict().is_zero());
}

#[test]
fn discount_by_zero_is_vacuous_and_by_one_is_identity() {
    let f = frame(3);
    let mut r = rng(4);
    let m = to_mass::<Rational>(&f, &random_bpa(&mut r, 3));
    assert!(m.discount(Rational::zero()).unwrap().is_vacuous());
    assert_eq!(as_map(&m.discount(Rational::one()).unwrap()), as_map(&m));
    assert!(m.discount(q(3, 2)).is_err());
}
