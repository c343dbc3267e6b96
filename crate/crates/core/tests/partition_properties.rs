mod common;

use common::{oracle_conflict, oracle_mcf, oracle_partitions, random_instance, rng};
use metaconflict::document::{parse_evidence_file, serialize_evidence_file};
use metaconflict::partition::{
    brute_force, brute_force_by_blocks, CandidateStatus, DomainDistribution, Optimizer, SearchOptions,
};
use metaconflict::{metaconflict, Evidence, EvidenceSet, JointProp, Partition, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn rational_instance(seed: u64, n: usize, max_count: usize) -> (EvidenceSet<Rational>, DomainDistribution<Rational>) {
    random_instance(seed, n, max_count).build().unwrap()
}

fn float_instance(seed: u64, n: usize, max_count: usize) -> (EvidenceSet<f64>, DomainDistribution<f64>) {
    random_instance(seed, n, max_count).build().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cluster_conflict_matches_explicit_enumeration(seed in any::<u64>(), n in 1usize..=5) {
        let (set, _) = rational_instance(seed, n, n);
        let all: Vec<usize> = (0..n).collect();
        prop_assert_eq!(set.same_event_conflict(&all), oracle_conflict(&set, &all));
    }

    #[test]
    fn brute_force_matches_recursive_enumeration(seed in any::<u64>(), n in 1usize..=6) {
        let (set, prior) = rational_instance(seed, n, n);
        let mut best_by_r: Vec<Option<Rational>> = vec![None; n + 1];
        for blocks in oracle_partitions(n) {
            let mcf = oracle_mcf(&set, &blocks, &prior);
            let slot = &mut best_by_r[blocks.len()];
            if slot.as_ref().is_none_or(|b| mcf < *b) {
                *slot = Some(mcf);
            }
        }
        let by_blocks = brute_force_by_blocks(&set, &prior, n).unwrap();
        for r in 1..=n {
            let (partition, report) = by_blocks[r].as_ref().unwrap();
            prop_assert_eq!(partition.cluster_count(), r);
            prop_assert_eq!(Some(report.mcf.clone()), best_by_r[r].clone());
            prop_assert_eq!(&metaconflict(&set, partition, &prior).mcf, &report.mcf);
        }
        let global = best_by_r.iter().flatten().min().unwrap().clone();
        prop_assert_eq!(brute_force(&set, &prior, n).unwrap().1.mcf, global);
    }

    #[test]
    fn splitting_dominates_when_prior_rises(seed in any::<u64>(), n in 2usize..=6) {
        let (set, prior) = rational_instance(seed, n, n);
        let by_blocks = brute_force_by_blocks(&set, &prior, n).unwrap();
        let best = |r: usize| by_blocks[r].as_ref().unwrap().1.mcf.clone();
        for j in 1..=n {
            for r in j + 1..=n {
                if prior.mass(j) < prior.mass(r) {
                    prop_assert!(best(r) < best(j), "r={} j={}", r, j);
                }
                if best(r) < Rational::one() - prior.mass(j) {
                    prop_assert!(best(j) > best(r));
                }
                if best(j) < Rational::one() - prior.mass(r) {
                    prop_assert!(best(r) > best(j));
                }
            }
        }
    }

    #[test]
    fn mcf_ignores_labels_and_order(seed in any::<u64>(), n in 1usize..=6) {
        let (set, prior) = rational_instance(seed, n, n);
        let mut r = rng(seed ^ 0x5eed);
        let clusters = r.gen_range(1..=n);
        let mut labels: Vec<usize> = (0..n).map(|i| if i < clusters { i } else { r.gen_range(0..clusters) }).collect();
        labels.shuffle(&mut r);
        let base = metaconflict(&set, &Partition::new(labels.clone()).unwrap(), &prior).mcf;

        let mut relabel: Vec<usize> = (0..clusters).collect();
        relabel.shuffle(&mut r);
        let renamed: Vec<usize> = labels.iter().map(|&c| relabel[c]).collect();
        prop_assert_eq!(&metaconflict(&set, &Partition::new(renamed).unwrap(), &prior).mcf, &base);

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut r);
        let permuted = EvidenceSet::new(
            set.frame().clone(),
            order.iter().map(|&i| set.evidence(i).clone()).collect(),
        ).unwrap();
        let moved: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        prop_assert_eq!(&metaconflict(&permuted, &Partition::new(moved).unwrap(), &prior).mcf, &base);
    }

    #[test]
    fn descent_strictly_decreases(seed in any::<u64>(), n in 2usize..=8) {
        let (set, prior) = rational_instance(seed, n, n);
        let opt = Optimizer::new(&set, &prior);
        let clusters = 1 + (seed as usize) % n;
        let run = opt.descend(&opt.random_partition(clusters, seed, 0));
        for pair in run.trace.windows(2) {
            prop_assert!(pair[1] < pair[0]);
        }
        prop_assert_eq!(run.partition.cluster_count(), clusters);
        prop_assert_eq!(run.trace.last().unwrap(), &run.report.mcf);
        for (_, _, mcf) in opt.neighbour_mcfs(&run.partition) {
            prop_assert!(mcf >= run.report.mcf);
        }
    }

    #[test]
    fn pruning_is_sound(seed in any::<u64>(), n in 1usize..=8) {
        let (set, prior) = float_instance(seed, n, n);
        let opt = Optimizer::new(&set, &prior);
        let options = SearchOptions { restarts: 4, seed, prune: true, parallel: false };
        let pruned = opt.search(&options).unwrap();
        let full = opt.search(&SearchOptions { prune: false, ..options }).unwrap();
        prop_assert_eq!(pruned.report.mcf, full.report.mcf);
        for c in &pruned.candidates {
            if let CandidateStatus::Pruned = c.status {
                prop_assert!(1.0 - c.prior_mass > pruned.report.mcf);
            }
        }
    }

    #[test]
    fn parallel_and_sequential_agree(seed in any::<u64>(), n in 1usize..=9) {
        let (set, prior) = float_instance(seed, n, n);
        let options = SearchOptions { restarts: 3, seed, prune: true, parallel: false };
        let seq = Optimizer::new(&set, &prior).search(&options).unwrap();
        let par = Optimizer::new(&set, &prior).search(&SearchOptions { parallel: true, ..options }).unwrap();
        prop_assert_eq!(seq.partition, par.partition);
        prop_assert_eq!(seq.report.mcf.to_bits(), par.report.mcf.to_bits());
    }

    #[test]
    fn same_event_conflict_is_permutation_invariant(seed in any::<u64>(), n in 1usize..=5) {
        let (set, _) = rational_instance(seed, n, 1);
        let mut members: Vec<usize> = (0..n).collect();
        let k = set.same_event_conflict(&members);
        members.shuffle(&mut rng(seed));
        let masses: Vec<_> = members.iter().map(|&i| set.mass_function(i)).collect();
        prop_assert_eq!(metaconflict::evidence::same_event_conflict(masses), k);
    }

    #[test]
    fn contradictory_evidence_raises_conflict(seed in any::<u64>(), n in 1usize..=4) {
        let (set, _) = rational_instance(seed, n, 1);
        let members: Vec<usize> = (0..n).collect();
        let k = set.same_event_conflict(&members);
        let combined = set.combined(&members).unwrap();
        let frame = set.frame();
        let full_actions = frame.actions().full();
        let narrow = combined
            .focals()
            .map(|(s, _)| frame.project_actions(s))
            .find(|a| *a != full_actions);
        if let Some(actions) = narrow {
            let opposite = JointProp { actions: frame.actions().complement(actions), events: frame.events().full() };
            let mut evidences = set.evidences().to_vec();
            evidences.push(Evidence::new("contra", vec![(opposite, Rational::one())]));
            let extended = EvidenceSet::new(frame.clone(), evidences).unwrap();
            let all: Vec<usize> = (0..=n).collect();
            prop_assert!(extended.same_event_conflict(&all) > k);
        }
    }

    #[test]
    fn document_round_trip_is_canonical(seed in any::<u64>(), n in 1usize..=6) {
        let (set, prior) = rational_instance(seed, n, n);
        let text = serialize_evidence_file(&set, &prior);
        let (set2, prior2) = parse_evidence_file::<Rational>(&text).unwrap();
        prop_assert_eq!(serialize_evidence_file(&set2, &prior2), text);
    }
}

#[test]
fn single_evidence_is_one_cluster() {
    let (set, _) = rational_instance(3, 1, 1);
    let prior = DomainDistribution::<Rational>::certain(1);
    let (p, report) = brute_force(&set, &prior, 1).unwrap();
    assert_eq!(p.cluster_count(), 1);
    assert!(report.mcf.is_zero());
    assert!(set.same_event_conflict(&[0]).is_zero());
}

#[test]
fn brute_force_guard_rail() {
    let (set, prior) = float_instance(1, 13, 3);
    assert!(brute_force(&set, &prior, 3).is_err());
}
