use super::{domain_conflict, mcf_from_conflicts, ConflictReport, DomainDistribution, Partition, PartitionError};
use crate::ds::{combine, MassFunction};
use crate::evidence::EvidenceSet;
use crate::mass::Mass;

/// Largest evidence set [`brute_force`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Conflict of every subset of the evidences, indexed by bitmask. Each entry
/// folds the members in index order, exactly like
/// [`EvidenceSet::same_event_conflict`].
fn subset_conflicts<M: Mass>(evidences: &EvidenceSet<M>) -> Vec<M> {
    let n = evidences.len();
    let size = 1usize << n;
    let mut combined: Vec<Option<MassFunction<M>>> = vec![None; size];
    let mut survive: Vec<M> = vec![M::one(); size];
    for mask in 1..size {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let rest = mask & !(1 << top);
        let m = evidences.mass_function(top);
        if rest == 0 {
            combined[mask] = Some(m.clone());
            continue;
        }
        match &combined[rest] {
            Some(acc) => match combine(acc, m) {
                Ok(next) => {
                    survive[mask] = survive[rest].clone() * (M::one() - next.conflict().clone());
                    combined[mask] = Some(next);
                }
                Err(_) => survive[mask] = M::zero(),
            },
            None => survive[mask] = M::zero(),
        }
    }
    survive.into_iter().map(|s| M::one() - s).collect()
}

struct Enumerator<'a, M> {
    conflicts: &'a [M],
    prior: &'a DomainDistribution<M>,
    r_max: usize,
    labels: Vec<usize>,
    blocks: Vec<usize>,
    best: Vec<Option<(Vec<usize>, ConflictReport<M>)>>,
}

impl<M: Mass> Enumerator<'_, M> {
    /// Restricted growth strings in lexicographic order, so the first
    /// minimum found is the canonical tie-break winner.
    fn visit(&mut self, q: usize) {
        if q == self.labels.len() {
            let r = self.blocks.len();
            let per_cluster: Vec<M> = self.blocks.iter().map(|&mask| self.conflicts[mask].clone()).collect();
            let domain = domain_conflict(self.prior, r);
            let mcf = mcf_from_conflicts(&domain, &per_cluster);
            let slot = &mut self.best[r];
            if slot.as_ref().is_none_or(|(_, b)| mcf < b.mcf) {
                *slot = Some((
                    self.labels.clone(),
                    ConflictReport {
                        per_cluster,
                        domain,
                        mcf,
                    },
                ));
            }
            return;
        }
        for block in 0..self.blocks.len() {
            self.labels[q] = block;
            self.blocks[block] |= 1 << q;
            self.visit(q + 1);
            self.blocks[block] &= !(1 << q);
        }
        if self.blocks.len() < self.r_max {
            self.labels[q] = self.blocks.len();
            self.blocks.push(1 << q);
            self.visit(q + 1);
            self.blocks.pop();
        }
    }
}

/// Best partition and its report, if any partition was enumerated.
pub type BestPartition<M> = Option<(Partition, ConflictReport<M>)>;

/// Minimum-metaconflict partition for each exact number of clusters
/// `1..=r_max` (index `r` of the result; index 0 is always `None`).
pub fn brute_force_by_blocks<M: Mass>(
    evidences: &EvidenceSet<M>,
    prior: &DomainDistribution<M>,
    r_max: usize,
) -> Result<Vec<BestPartition<M>>, PartitionError> {
    let n = evidences.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(PartitionError::TooLarge(n));
    }
    let r_max = r_max.min(n);
    let conflicts = subset_conflicts(evidences);
    let mut walker = Enumerator {
        conflicts: &conflicts,
        prior,
        r_max,
        labels: vec![0; n],
        blocks: Vec::new(),
        best: vec![None; r_max + 1],
    };
    walker.visit(0);
    Ok(walker
        .best
        .into_iter()
        .map(|slot| slot.map(|(labels, report)| (Partition::new(labels).expect("restricted growth string"), report)))
        .collect())
}

/// Global metaconflict minimum over all partitions with `1..=r_max`
/// clusters. Ties go to the smallest canonical encoding.
pub fn brute_force<M: Mass>(
    evidences: &EvidenceSet<M>,
    prior: &DomainDistribution<M>,
    r_max: usize,
) -> Result<(Partition, ConflictReport<M>), PartitionError> {
    let by_blocks = brute_force_by_blocks(evidences, prior, r_max)?;
    let mut best: Option<(Partition, ConflictReport<M>)> = None;
    for (partition, report) in by_blocks.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some((bp, br)) => report.mcf < br.mcf || (report.mcf == br.mcf && partition.assignment() < bp.assignment()),
        };
        if better {
            best = Some((partition, report));
        }
    }
    best.ok_or_else(|| PartitionError::Invalid("no partitions enumerated".into()))
}
