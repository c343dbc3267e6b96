#![allow(dead_code)]

//! Independent reference implementations used as test oracles. They work on
//! explicit `BTreeSet` atom sets and plain recursion, sharing no code with
//! the library beyond its public types.

use std::collections::{BTreeMap, BTreeSet};

use metaconflict::document::{EvidenceDoc, EvidenceDocument, FocalDoc, MassLiteral};
use metaconflict::partition::DomainDistribution;
use metaconflict::{EvidenceSet, Rational};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Atoms = BTreeSet<usize>;
pub type Bpa = Vec<(Atoms, Rational)>;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random bpa on `atoms` atoms with 1..=4 focal elements and masses that are
/// multiples of 1/total.
pub fn random_bpa(rng: &mut ChaCha8Rng, atoms: usize) -> Bpa {
    let focals = rng.gen_range(1..=4);
    let weights: Vec<i64> = (0..focals).map(|_| rng.gen_range(1..=9)).collect();
    let total: i64 = weights.iter().sum();
    weights
        .into_iter()
        .map(|w| {
            let mut set = Atoms::new();
            while set.is_empty() {
                set = (0..atoms).filter(|_| rng.gen_bool(0.5)).collect();
            }
            (set, q(w, total))
        })
        .collect()
}

/// Dempster's rule by an explicit double loop over focal pairs. Returns the
/// normalized focal masses and the conflict, or `None` on total conflict.
pub fn oracle_combine(a: &Bpa, b: &Bpa) -> Option<(BTreeMap<Atoms, Rational>, Rational)> {
    let mut joint: BTreeMap<Atoms, Rational> = BTreeMap::new();
    let mut conflict = Rational::zero();
    for (x, mx) in a {
        for (y, my) in b {
            let z: Atoms = x.intersection(y).copied().collect();
            let w = mx * my;
            if z.is_empty() {
                conflict += w;
            } else {
                *joint.entry(z).or_insert_with(Rational::zero) += w;
            }
        }
    }
    if conflict.is_one() {
        return None;
    }
    let norm = Rational::one() - &conflict;
    let joint = joint
        .into_iter()
        .filter(|(_, m)| !m.is_zero())
        .map(|(s, m)| (s, m / &norm))
        .collect();
    Some((joint, conflict))
}

/// All set partitions of `0..n` as lists of blocks.
pub fn oracle_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for smaller in oracle_partitions(n - 1) {
        for b in 0..smaller.len() {
            let mut p = smaller.clone();
            p[b].push(n - 1);
            out.push(p);
        }
        let mut p = smaller;
        p.push(vec![n - 1]);
        out.push(p);
    }
    out
}

/// Focal elements of evidence `q` as explicit sets of joint atoms.
pub fn explicit_focals(set: &EvidenceSet<Rational>, q: usize) -> Bpa {
    let frame = set.frame();
    set.evidence(q)
        .focals
        .iter()
        .map(|(prop, m)| (frame.rectangle(*prop).indices().collect(), m.clone()))
        .collect()
}

/// Mass of all focal combinations of `members` whose intersection is empty.
pub fn oracle_conflict(set: &EvidenceSet<Rational>, members: &[usize]) -> Rational {
    fn walk(bpas: &[Bpa], depth: usize, acc: Option<Atoms>, weight: Rational, out: &mut Rational) {
        if let Some(a) = &acc {
            if a.is_empty() {
                *out += weight;
                return;
            }
        }
        if depth == bpas.len() {
            return;
        }
        for (s, m) in &bpas[depth] {
            let next = match &acc {
                None => s.clone(),
                Some(a) => a.intersection(s).copied().collect(),
            };
            walk(bpas, depth + 1, Some(next), &weight * m, out);
        }
    }
    let bpas: Vec<Bpa> = members.iter().map(|&q| explicit_focals(set, q)).collect();
    let mut out = Rational::zero();
    walk(&bpas, 0, None, Rational::one(), &mut out);
    out
}

pub fn oracle_mcf(
    set: &EvidenceSet<Rational>,
    blocks: &[Vec<usize>],
    prior: &DomainDistribution<Rational>,
) -> Rational {
    let mut keep = prior.mass(blocks.len());
    for b in blocks {
        keep *= Rational::one() - oracle_conflict(set, b);
    }
    Rational::one() - keep
}

/// Random evidence document over `actions` × `events` with `n` evidences.
/// Every evidence keeps positive mass on the whole frame, so no cluster is
/// ever in total conflict.
pub fn random_document(rng: &mut ChaCha8Rng, n: usize, actions: usize, events: usize) -> EvidenceDocument {
    let action_labels: Vec<String> = (0..actions).map(|a| format!("a{a}")).collect();
    let event_labels: Vec<String> = (0..events).map(|e| format!("E{e}")).collect();
    let pick = |rng: &mut ChaCha8Rng, labels: &[String]| -> Vec<String> {
        loop {
            let chosen: Vec<String> = labels.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if !chosen.is_empty() {
                return chosen;
            }
        }
    };
    let evidences = (0..n)
        .map(|i| {
            let informative = rng.gen_range(1..=2);
            let weights: Vec<i64> = (0..=informative).map(|_| rng.gen_range(1..=9)).collect();
            let total: i64 = weights.iter().sum();
            let mut focals: Vec<FocalDoc> = weights[..informative]
                .iter()
                .map(|w| FocalDoc {
                    actions: Some(pick(rng, &action_labels)),
                    events: Some(pick(rng, &event_labels)),
                    mass: MassLiteral::Text(format!("{w}/{total}")),
                })
                .collect();
            focals.push(FocalDoc {
                actions: None,
                events: None,
                mass: MassLiteral::Text(format!("{}/{total}", weights[informative])),
            });
            EvidenceDoc {
                id: format!("e{i}"),
                focals,
                metadata: BTreeMap::new(),
            }
        })
        .collect();
    EvidenceDocument {
        description: None,
        actions: action_labels,
        events: event_labels,
        evidences,
        domain_prior: BTreeMap::from([(1, MassLiteral::Text("1".into()))]),
    }
}

/// Random prior on `1..=max` with some counts left at zero mass.
pub fn random_prior_doc(rng: &mut ChaCha8Rng, max: usize) -> BTreeMap<usize, MassLiteral> {
    let mut counts: Vec<usize> = (1..=max).collect();
    counts.shuffle(rng);
    let keep = rng.gen_range(1..=max);
    let weights: Vec<(usize, i64)> = counts[..keep].iter().map(|&c| (c, rng.gen_range(1..=9))).collect();
    let total: i64 = weights.iter().map(|(_, w)| w).sum();
    weights
        .into_iter()
        .map(|(c, w)| (c, MassLiteral::Text(format!("{w}/{total}"))))
        .collect()
}

/// A random instance with `n` evidences and a random prior on `1..=max_count`.
pub fn random_instance(seed: u64, n: usize, max_count: usize) -> EvidenceDocument {
    let mut rng = rng(seed);
    let actions = rng.gen_range(2..=3);
    let events = rng.gen_range(1..=3);
    let mut doc = random_document(&mut rng, n, actions, events);
    doc.domain_prior = random_prior_doc(&mut rng, max_count);
    doc
}
