//! Posterior distribution over the number of clusters.
//!
//! Every (discounted) evidence in a cluster supports that the cluster exists.
//! The per-cluster existence supports are combined into a bpa over "there are
//! at least `r` clusters", which is then combined with the prior.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ds::{combine_many, DsError, MassFunction};
use crate::mass::Mass;
use crate::partition::DomainDistribution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PosteriorError {
    #[error("no discounted evidences for cluster {0}")]
    EmptyCluster(usize),
    #[error("total conflict between the prior and the cluster-count evidence")]
    TotalConflict,
    #[error(transparent)]
    Ds(#[from] DsError),
}

/// Simple support for "cluster `cluster` is a real, non-empty cluster".
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceEvidence<M> {
    pub cluster: usize,
    pub support: M,
}

impl<M: Mass> ExistenceEvidence<M> {
    pub fn residual(&self) -> M {
        M::one() - self.support.clone()
    }
}

/// `m(|χ| ≥ r)` for `r = 0..=n`; the `r = 0` cell is the whole count frame.
#[derive(Debug, Clone, PartialEq)]
pub struct CountsBpa<M> {
    pub masses: Vec<M>,
}

impl<M: Mass> CountsBpa<M> {
    pub fn vacuous() -> Self {
        CountsBpa { masses: vec![M::one()] }
    }

    /// `m(|χ| ≥ r)`, zero beyond the last cluster.
    pub fn at_least(&self, r: usize) -> M {
        self.masses.get(r).cloned().unwrap_or_else(M::zero)
    }

    pub fn max_count(&self) -> usize {
        self.masses.len() - 1
    }

    pub fn total(&self) -> M {
        self.masses.iter().fold(M::zero(), |acc, m| acc + m.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDistribution<M> {
    pub probabilities: BTreeMap<usize, M>,
    /// Conflict between prior and counts evidence.
    pub conflict: M,
}

impl<M: Mass> PosteriorDistribution<M> {
    pub fn probability(&self, count: usize) -> M {
        self.probabilities.get(&count).cloned().unwrap_or_else(M::zero)
    }
}

/// `1 − Π_q m_q(Θ) / (1 − k)`: how much the cluster's combined evidence
/// supports anything other than the whole frame. Clamped to `[0, 1]`.
pub fn existence_support<M: Mass>(
    cluster: usize,
    discounted: &[MassFunction<M>],
) -> Result<ExistenceEvidence<M>, PosteriorError> {
    if discounted.is_empty() {
        return Err(PosteriorError::EmptyCluster(cluster));
    }
    let combined = match combine_many(discounted) {
        Ok(m) => m,
        Err(DsError::TotalConflict) => return Err(PosteriorError::TotalConflict),
        Err(e) => return Err(e.into()),
    };
    let theta = discounted.iter().fold(M::one(), |acc, m| acc * m.theta_mass());
    let raw = M::one() - theta / (M::one() - combined.conflict().clone());
    let support = raw.clone().clamp_unit();
    if support != raw {
        log::warn!(
            "existence support {} for cluster {cluster} clamped to {}",
            raw.to_f64(),
            support.to_f64()
        );
    }
    Ok(ExistenceEvidence { cluster, support })
}

/// Scales the existence support by `1 − Π_q against_q`, the chance that not
/// every member was placed in the cluster by mistake.
pub fn falsity_discount_existence<M: Mass>(ev: &ExistenceEvidence<M>, member_against: &[M]) -> ExistenceEvidence<M> {
    if member_against.is_empty() {
        return ev.clone();
    }
    let all_out = member_against.iter().fold(M::one(), |acc, a| acc * a.clone());
    ExistenceEvidence {
        cluster: ev.cluster,
        support: ev.support.clone() * (M::one() - all_out),
    }
}

/// Combines independent existence supports and groups the resulting
/// conjunctions by length: `m(|χ| ≥ r)` is the probability that exactly `r`
/// of the supports hold.
pub fn counts_bpa<M: Mass>(existences: &[ExistenceEvidence<M>]) -> CountsBpa<M> {
    let mut masses = vec![M::one()];
    for ev in existences {
        let s = ev.support.clone();
        let miss = M::one() - s.clone();
        let mut next = vec![M::zero(); masses.len() + 1];
        for (r, m) in masses.iter().enumerate() {
            next[r] = next[r].clone() + m.clone() * miss.clone();
            next[r + 1] = next[r + 1].clone() + m.clone() * s.clone();
        }
        masses = next;
    }
    CountsBpa { masses }
}

/// Dempster combination of a Bayesian prior on the number of clusters with
/// the counts bpa, where `m(|χ| ≥ r)` sits on `{E_r, …, E_N}`.
pub fn posterior<M: Mass>(
    prior: &DomainDistribution<M>,
    counts: &CountsBpa<M>,
) -> Result<PosteriorDistribution<M>, PosteriorError> {
    let mut weights = BTreeMap::new();
    let mut total = M::zero();
    for (count, p) in prior.support() {
        let upper = count.min(counts.max_count());
        let plausibility = (0..=upper).fold(M::zero(), |acc, r| acc + counts.at_least(r));
        let w = p.clone() * plausibility;
        total = total + w.clone();
        weights.insert(count, w);
    }
    if total.is_zero() || (M::one() - total.clone()).is_total() {
        return Err(PosteriorError::TotalConflict);
    }
    let probabilities = weights.into_iter().map(|(c, w)| (c, w / total.clone())).collect();
    Ok(PosteriorDistribution {
        probabilities,
        conflict: M::one() - total,
    })
}
