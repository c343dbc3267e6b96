//! Partitioning evidences into clusters by minimizing the metaconflict.
//!
//! Each cluster's internal conflict `c_i` and the domain conflict `c₀`
//! between the number of clusters and the prior are metalevel evidences
//! against the partition being adequate. Their combination gives
//!
//! ```text
//! Mcf = 1 − (1 − c₀) · Π (1 − c_i)
//! ```
//!
//! which [`search`] minimizes with steepest-descent local search over
//! single-evidence transfers, pruning cluster counts that provably cannot
//! beat the best partition found so far. [`brute_force`] is an exhaustive
//! reference used for testing.

mod brute;
mod cache;
mod search;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::evidence::EvidenceSet;
use crate::mass::Mass;

pub use brute::{brute_force, brute_force_by_blocks, BRUTE_FORCE_LIMIT};
pub use cache::ConflictCache;
pub use search::{local_search, search, Candidate, CandidateStatus, Descent, Optimizer, SearchOptions, SearchOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid partition: {0}")]
    Invalid(String),
    #[error("no cluster count between 1 and {0} has prior support")]
    NoFeasibleR(usize),
    #[error("{0} evidences exceed the exhaustive search limit of {BRUTE_FORCE_LIMIT}")]
    TooLarge(usize),
    #[error("domain distribution: {0}")]
    Domain(String),
    #[error("restarts must be at least 1")]
    NoRestarts,
}

/// Prior masses `m(E_i)` on "there are exactly `i` clusters".
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDistribution<M> {
    masses: BTreeMap<usize, M>,
}

impl<M: Mass> DomainDistribution<M> {
    pub fn new<I: IntoIterator<Item = (usize, M)>>(masses: I) -> Result<Self, PartitionError> {
        let mut out: BTreeMap<usize, M> = BTreeMap::new();
        let mut total = M::zero();
        for (count, mass) in masses {
            if mass < M::zero() || mass > M::one() {
                return Err(PartitionError::Domain(format!(
                    "mass {} for count {count} is outside [0, 1]",
                    mass.to_f64()
                )));
            }
            total = total + mass.clone();
            let entry = out.entry(count).or_insert_with(M::zero);
            *entry = entry.clone() + mass;
        }
        if !total.approx_eq(&M::one()) {
            return Err(PartitionError::Domain(format!("masses sum to {}", total.to_f64())));
        }
        out.retain(|_, m| !m.is_zero());
        Ok(DomainDistribution { masses: out })
    }

    /// All mass on one count.
    pub fn certain(count: usize) -> Self {
        DomainDistribution {
            masses: BTreeMap::from([(count, M::one())]),
        }
    }

    /// Equal mass on each of `counts`.
    pub fn uniform<I: IntoIterator<Item = usize>>(counts: I) -> Self {
        let counts: Vec<usize> = counts.into_iter().collect();
        let share = M::from_ratio(1, counts.len() as u64);
        DomainDistribution {
            masses: counts.into_iter().map(|c| (c, share.clone())).collect(),
        }
    }

    /// `m(E_count)`, zero when absent.
    pub fn mass(&self, count: usize) -> M {
        self.masses.get(&count).cloned().unwrap_or_else(M::zero)
    }

    /// Counts with positive mass, ascending.
    pub fn support(&self) -> impl Iterator<Item = (usize, &M)> + '_ {
        self.masses.iter().map(|(c, m)| (*c, m))
    }

    pub fn max_count(&self) -> usize {
        self.masses.keys().next_back().copied().unwrap_or(0)
    }
}

/// `c₀ = Σ_{i≠r} m(E_i) = 1 − m(E_r)`.
pub fn domain_conflict<M: Mass>(prior: &DomainDistribution<M>, r: usize) -> M {
    M::one() - prior.mass(r)
}

/// `1 − (1 − c₀) · Π (1 − c_i)`, product taken in cluster order.
pub fn mcf_from_conflicts<M: Mass>(domain: &M, per_cluster: &[M]) -> M {
    let plausibility = per_cluster
        .iter()
        .fold(M::one() - domain.clone(), |acc, c| acc * (M::one() - c.clone()));
    M::one() - plausibility
}

/// Assignment of evidences (by index) to clusters `0..r`, all non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    clusters: usize,
}

impl Partition {
    pub fn new(assignment: Vec<usize>) -> Result<Self, PartitionError> {
        if assignment.is_empty() {
            return Err(PartitionError::Invalid("no evidences".into()));
        }
        let clusters = assignment.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; clusters];
        for &c in &assignment {
            seen[c] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(PartitionError::Invalid(format!("cluster {empty} is empty")));
        }
        Ok(Partition { assignment, clusters })
    }

    /// Builds a partition from explicit member lists.
    pub fn from_clusters(n: usize, clusters: &[Vec<usize>]) -> Result<Self, PartitionError> {
        let mut assignment = vec![usize::MAX; n];
        for (k, members) in clusters.iter().enumerate() {
            if members.is_empty() {
                return Err(PartitionError::Invalid(format!("cluster {k} is empty")));
            }
            for &q in members {
                if q >= n {
                    return Err(PartitionError::Invalid(format!("evidence {q} out of range")));
                }
                if assignment[q] != usize::MAX {
                    return Err(PartitionError::Invalid(format!("evidence {q} assigned twice")));
                }
                assignment[q] = k;
            }
        }
        if let Some(q) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(PartitionError::Invalid(format!("evidence {q} unassigned")));
        }
        Partition::new(assignment)
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of clusters `r`.
    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, evidence: usize) -> usize {
        self.assignment[evidence]
    }

    /// Sorted member lists, indexed by cluster.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.clusters];
        for (q, &c) in self.assignment.iter().enumerate() {
            out[c].push(q);
        }
        out
    }

    pub fn members(&self, cluster: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&q| self.assignment[q] == cluster)
            .collect()
    }

    pub fn cluster_size(&self, cluster: usize) -> usize {
        self.assignment.iter().filter(|&&c| c == cluster).count()
    }

    /// Moves one evidence to an existing cluster. Fails if that would empty
    /// its current cluster.
    pub fn with_move(&self, evidence: usize, dest: usize) -> Result<Partition, PartitionError> {
        if dest >= self.clusters {
            return Err(PartitionError::Invalid(format!("cluster {dest} does not exist")));
        }
        let src = self.assignment[evidence];
        if src != dest && self.cluster_size(src) == 1 {
            return Err(PartitionError::Invalid(format!(
                "moving {evidence} would empty cluster {src}"
            )));
        }
        let mut assignment = self.assignment.clone();
        assignment[evidence] = dest;
        Ok(Partition {
            assignment,
            clusters: self.clusters,
        })
    }

    /// Relabels clusters by order of first appearance.
    pub fn canonical(&self) -> Partition {
        let mut relabel = vec![usize::MAX; self.clusters];
        let mut next = 0;
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                if relabel[c] == usize::MAX {
                    relabel[c] = next;
                    next += 1;
                }
                relabel[c]
            })
            .collect();
        Partition {
            assignment,
            clusters: self.clusters,
        }
    }

    /// Same grouping, regardless of cluster labels.
    pub fn same_grouping(&self, other: &Partition) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Per-cluster conflicts, domain conflict and the resulting metaconflict.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictReport<M> {
    pub per_cluster: Vec<M>,
    pub domain: M,
    pub mcf: M,
}

impl<M: Mass> ConflictReport<M> {
    pub fn from_conflicts(per_cluster: Vec<M>, domain: M) -> Self {
        let mcf = mcf_from_conflicts(&domain, &per_cluster);
        ConflictReport {
            per_cluster,
            domain,
            mcf,
        }
    }

    /// `Pls(AdP) = 1 − Mcf`.
    pub fn plausibility(&self) -> M {
        M::one() - self.mcf.clone()
    }
}

/// Metaconflict of `partition`, recomputing every cluster conflict.
pub fn metaconflict<M: Mass>(
    evidences: &EvidenceSet<M>,
    partition: &Partition,
    prior: &DomainDistribution<M>,
) -> ConflictReport<M> {
    let per_cluster = partition
        .clusters()
        .iter()
        .map(|members| evidences.same_event_conflict(members))
        .collect();
    ConflictReport::from_conflicts(per_cluster, domain_conflict(prior, partition.cluster_count()))
}
