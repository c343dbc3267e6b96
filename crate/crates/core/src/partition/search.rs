use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{domain_conflict, ConflictCache, ConflictReport, DomainDistribution, Partition, PartitionError};
use crate::evidence::EvidenceSet;
use crate::mass::Mass;

/// Below this many candidate moves per step, moves are evaluated sequentially.
const PARALLEL_MOVES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Skip cluster counts that cannot beat the best metaconflict so far.
    pub prune: bool,
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            restarts: 10,
            seed: 0,
            prune: true,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CandidateStatus<M> {
    Explored {
        best: ConflictReport<M>,
        partition: Partition,
    },
    /// `Mcf* < 1 − m(E_r)`, so no partition into `r` clusters can win.
    Pruned,
    /// No prior support for this count; the metaconflict is identically one.
    Unsupported,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate<M> {
    pub clusters: usize,
    pub prior_mass: M,
    pub status: CandidateStatus<M>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<M> {
    pub partition: Partition,
    pub report: ConflictReport<M>,
    /// Candidate cluster counts in exploration order.
    pub candidates: Vec<Candidate<M>>,
}

/// Result of one steepest-descent run.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent<M> {
    pub partition: Partition,
    pub report: ConflictReport<M>,
    /// Metaconflict after each accepted move, starting with the initial value.
    pub trace: Vec<M>,
}

/// Metaconflict minimizer over one evidence set and prior, sharing a
/// cluster-conflict cache across all descents.
pub struct Optimizer<'a, M> {
    evidences: &'a EvidenceSet<M>,
    prior: &'a DomainDistribution<M>,
    cache: ConflictCache<M>,
    parallel: bool,
}

struct MoveEval<M> {
    evidence: usize,
    dest: usize,
    report: ConflictReport<M>,
}

impl<'a, M: Mass> Optimizer<'a, M> {
    pub fn new(evidences: &'a EvidenceSet<M>, prior: &'a DomainDistribution<M>) -> Self {
        Optimizer {
            evidences,
            prior,
            cache: ConflictCache::new(),
            parallel: true,
        }
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn evidences(&self) -> &'a EvidenceSet<M> {
        self.evidences
    }

    pub fn prior(&self) -> &'a DomainDistribution<M> {
        self.prior
    }

    pub fn cache(&self) -> &ConflictCache<M> {
        &self.cache
    }

    pub fn cluster_conflict(&self, members: &[usize]) -> M {
        self.cache.conflict(self.evidences, members)
    }

    pub fn report(&self, partition: &Partition) -> ConflictReport<M> {
        let per_cluster = partition
            .clusters()
            .iter()
            .map(|members| self.cluster_conflict(members))
            .collect();
        ConflictReport::from_conflicts(per_cluster, domain_conflict(self.prior, partition.cluster_count()))
    }

    fn evaluate_move(
        &self,
        clusters: &[Vec<usize>],
        current: &ConflictReport<M>,
        evidence: usize,
        home: usize,
        dest: usize,
    ) -> MoveEval<M> {
        let without: Vec<usize> = clusters[home].iter().copied().filter(|&q| q != evidence).collect();
        let mut with = clusters[dest].clone();
        let pos = with.partition_point(|&q| q < evidence);
        with.insert(pos, evidence);
        let mut per_cluster = current.per_cluster.clone();
        per_cluster[home] = self.cluster_conflict(&without);
        per_cluster[dest] = self.cluster_conflict(&with);
        MoveEval {
            evidence,
            dest,
            report: ConflictReport::from_conflicts(per_cluster, current.domain.clone()),
        }
    }

    /// Every legal single-evidence transfer, ordered by (evidence, destination).
    fn neighbours(&self, partition: &Partition, current: &ConflictReport<M>) -> Vec<MoveEval<M>> {
        let clusters = partition.clusters();
        let r = partition.cluster_count();
        let moves: Vec<(usize, usize, usize)> = (0..partition.len())
            .flat_map(|q| {
                let home = partition.cluster_of(q);
                let movable = clusters[home].len() > 1;
                (0..r).filter(move |&d| movable && d != home).map(move |d| (q, home, d))
            })
            .collect();
        if self.parallel && moves.len() >= PARALLEL_MOVES {
            moves
                .par_iter()
                .map(|&(q, home, d)| self.evaluate_move(&clusters, current, q, home, d))
                .collect()
        } else {
            moves
                .iter()
                .map(|&(q, home, d)| self.evaluate_move(&clusters, current, q, home, d))
                .collect()
        }
    }

    /// Metaconflicts of every single-move neighbour of `partition`.
    pub fn neighbour_mcfs(&self, partition: &Partition) -> Vec<(usize, usize, M)> {
        let current = self.report(partition);
        self.neighbours(partition, &current)
            .into_iter()
            .map(|m| (m.evidence, m.dest, m.report.mcf))
            .collect()
    }

    /// Steepest descent over single-evidence transfers with the number of
    /// clusters held fixed. Ties go to the lowest evidence index, then the
    /// lowest destination cluster.
    pub fn descend(&self, start: &Partition) -> Descent<M> {
        let mut partition = start.clone();
        let mut report = self.report(&partition);
        let mut trace = vec![report.mcf.clone()];
        loop {
            let mut best: Option<MoveEval<M>> = None;
            for candidate in self.neighbours(&partition, &report) {
                let threshold = best.as_ref().map_or(&report.mcf, |b| &b.report.mcf);
                if candidate.report.mcf < *threshold {
                    best = Some(candidate);
                }
            }
            let Some(step) = best else { break };
            partition = partition
                .with_move(step.evidence, step.dest)
                .expect("neighbour moves never empty a cluster");
            report = step.report;
            trace.push(report.mcf.clone());
        }
        Descent {
            partition,
            report,
            trace,
        }
    }

    /// Seeded random partition into exactly `clusters` non-empty clusters.
    pub fn random_partition(&self, clusters: usize, seed: u64, restart: usize) -> Partition {
        let n = self.evidences.len();
        debug_assert!(clusters >= 1 && clusters <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((clusters as u64) << 32) | restart as u64);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut assignment = vec![0; n];
        for (slot, &q) in order.iter().enumerate() {
            assignment[q] = if slot < clusters {
                slot
            } else {
                rng.gen_range(0..clusters)
            };
        }
        Partition::new(assignment).expect("every cluster receives a seed evidence")
    }

    /// Best partition into exactly `clusters` clusters over `restarts` seeded starts.
    pub fn best_for(&self, clusters: usize, restarts: usize, seed: u64) -> Descent<M> {
        let mut best: Option<Descent<M>> = None;
        for restart in 0..restarts {
            let start = self.random_partition(clusters, seed, restart);
            let run = self.descend(&start);
            if best.as_ref().is_none_or(|b| run.report.mcf < b.report.mcf) {
                best = Some(run);
            }
        }
        best.expect("restarts >= 1")
    }

    /// Searches over cluster counts in decreasing order of prior mass (ties
    /// to the smaller count), skipping counts whose domain conflict alone
    /// already exceeds the best metaconflict found.
    pub fn search(&self, options: &SearchOptions) -> Result<SearchOutcome<M>, PartitionError> {
        if options.restarts == 0 {
            return Err(PartitionError::NoRestarts);
        }
        let n = self.evidences.len();
        if !(1..=n).any(|r| !self.prior.mass(r).is_zero()) {
            return Err(PartitionError::NoFeasibleR(n));
        }
        let mut order: Vec<usize> = (1..=n).collect();
        order.sort_by(|&a, &b| {
            self.prior
                .mass(b)
                .partial_cmp(&self.prior.mass(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });

        let mut best: Option<(Partition, ConflictReport<M>)> = None;
        let mut candidates = Vec::with_capacity(order.len());
        for r in order {
            let prior_mass = self.prior.mass(r);
            let status = if prior_mass.is_zero() && options.prune {
                CandidateStatus::Unsupported
            } else if options.prune
                && best
                    .as_ref()
                    .is_some_and(|(_, b)| b.mcf < domain_conflict(self.prior, r))
            {
                CandidateStatus::Pruned
            } else {
                let run = self.best_for(r, options.restarts, options.seed);
                if best.as_ref().is_none_or(|(_, b)| run.report.mcf < b.mcf) {
                    best = Some((run.partition.clone(), run.report.clone()));
                }
                CandidateStatus::Explored {
                    best: run.report,
                    partition: run.partition,
                }
            };
            candidates.push(Candidate {
                clusters: r,
                prior_mass,
                status,
            });
        }
        let (partition, report) = best.expect("at least one supported count is explored");
        Ok(SearchOutcome {
            partition,
            report,
            candidates,
        })
    }
}

/// Steepest-descent local search from `start`; see [`Optimizer::descend`].
pub fn local_search<M: Mass>(
    evidences: &EvidenceSet<M>,
    start: &Partition,
    prior: &DomainDistribution<M>,
) -> Partition {
    Optimizer::new(evidences, prior).descend(start).partition
}

/// Full metaconflict search with pruning; see [`Optimizer::search`].
pub fn search<M: Mass>(
    evidences: &EvidenceSet<M>,
    prior: &DomainDistribution<M>,
    restarts: usize,
    seed: u64,
) -> Result<SearchOutcome<M>, PartitionError> {
    let options = SearchOptions {
        restarts,
        seed,
        ..SearchOptions::default()
    };
    Optimizer::new(evidences, prior).search(&options)
}
