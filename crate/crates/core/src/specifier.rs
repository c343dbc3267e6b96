//! Specifying which cluster each evidence belongs to.
//!
//! Moving one evidence out of its cluster, or into another one, changes
//! cluster and domain conflicts. Each change is read as a simple support
//! function on a frame of clusters: mostly "this evidence is not in cluster
//! `k`", and in one case "it is in its home cluster". Combining them gives a
//! belief/plausibility of membership for every cluster; the mass that falls on
//! the empty set (the evidence fits nowhere) is its falsity.

use std::sync::Arc;

use thiserror::Error;

use crate::ds::{combine_many, DsError, MassFunction};
use crate::evidence::EvidenceSet;
use crate::frame::{Frame, Subset};
use crate::mass::Mass;
use crate::partition::{domain_conflict, DomainDistribution, Optimizer, Partition};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecifyError {
    #[error("conflict values violate the precondition of {0}")]
    Domain(&'static str),
    #[error("evidence `{0}` conflicts with every cluster")]
    TotalConflict(String),
    #[error("evidence index {0} is not in the partition")]
    UnknownEvidence(usize),
    #[error(transparent)]
    Ds(#[from] DsError),
}

/// How an increase in domain conflict is read when a lone evidence leaves
/// its cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingletonSupport {
    /// `m(e_q ∈ χ_i) = c₀ / c₀*`.
    #[default]
    Printed,
    /// `m(e_q ∈ χ_i) = 1 − c₀ / c₀*`.
    Complement,
}

/// Domain-conflict evidence from moving a lone evidence to another cluster.
#[derive(Debug, Clone, PartialEq)]
pub enum SingletonEffect<M> {
    AgainstHome(M),
    ForHome(M),
    Nothing,
}

/// `(c_i − c_i*) / (1 − c_i*)`: support that `e_q ∉ χ_i` from the drop in
/// conflict when it is taken out of `χ_i`.
pub fn mass_out<M: Mass>(c: &M, c_star: &M) -> Result<M, SpecifyError> {
    if *c_star < M::zero() || c_star > c || *c_star >= M::one() || *c > M::one() {
        return Err(SpecifyError::Domain("mass_out"));
    }
    Ok((c.clone() - c_star.clone()) / (M::one() - c_star.clone()))
}

/// `(c_k* − c_k) / (1 − c_k)`: support that `e_q ∉ χ_k + {e_q}` from the rise
/// in conflict when it is brought into `χ_k`.
pub fn mass_in<M: Mass>(c: &M, c_star: &M) -> Result<M, SpecifyError> {
    if *c < M::zero() || c > c_star || *c_star > M::one() || *c >= M::one() {
        return Err(SpecifyError::Domain("mass_in"));
    }
    Ok((c_star.clone() - c.clone()) / (M::one() - c.clone()))
}

/// `(c₀* − c₀) / (1 − c₀)`: support that `e_q` does not belong in a new
/// cluster of its own.
pub fn mass_new_subset<M: Mass>(c0: &M, c0_star: &M) -> Result<M, SpecifyError> {
    if *c0 < M::zero() || c0 > c0_star || *c0_star > M::one() || *c0 >= M::one() {
        return Err(SpecifyError::Domain("mass_new_subset"));
    }
    Ok((c0_star.clone() - c0.clone()) / (M::one() - c0.clone()))
}

/// Domain-conflict change when a lone evidence leaves its cluster `χ_i`.
///
/// A decrease gives `(c₀ − c₀*) / (1 − c₀*)` against `χ_i`; an increase gives
/// support for `χ_i` according to `mode`.
pub fn mass_singleton_source<M: Mass>(
    c0: &M,
    c0_star: &M,
    mode: SingletonSupport,
) -> Result<SingletonEffect<M>, SpecifyError> {
    if c0 == c0_star {
        return Ok(SingletonEffect::Nothing);
    }
    if c0_star < c0 {
        if *c0_star >= M::one() {
            return Err(SpecifyError::Domain("mass_singleton_source"));
        }
        let against = (c0.clone() - c0_star.clone()) / (M::one() - c0_star.clone());
        return Ok(SingletonEffect::AgainstHome(against));
    }
    if c0_star.is_zero() {
        return Err(SpecifyError::Domain("mass_singleton_source"));
    }
    let ratio = c0.clone() / c0_star.clone();
    Ok(SingletonEffect::ForHome(match mode {
        SingletonSupport::Printed => ratio,
        SingletonSupport::Complement => M::one() - ratio,
    }))
}

/// Membership evidence for one evidence `e_q` over the clusters of a partition.
///
/// Vectors are indexed by cluster; when `fresh` is set, index `clusters`
/// stands for a new cluster `χ_{n+1}` holding `e_q` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipAssessment<M> {
    pub evidence: usize,
    pub evidence_id: String,
    pub home: usize,
    pub clusters: usize,
    pub fresh: bool,
    /// Simple-support masses for `e_q ∉ χ_j`.
    pub against: Vec<M>,
    /// Support for `e_q ∈ χ_home`, only from a lone evidence raising the
    /// domain conflict when it leaves.
    pub for_home: Option<M>,
    pub bel: Vec<M>,
    pub pls: Vec<M>,
    /// Conflict of combining the membership evidence.
    pub falsity: M,
    /// `Pls_k / Σ_j Pls_j`.
    pub credibility: Vec<M>,
    pub combined: MassFunction<M>,
}

impl<M: Mass> MembershipAssessment<M> {
    pub fn frame_size(&self) -> usize {
        self.clusters + usize::from(self.fresh)
    }

    /// Whether a nonzero support for the home cluster entered the combination.
    pub fn has_home_support(&self) -> bool {
        self.for_home.as_ref().is_some_and(|b| !b.is_zero())
    }

    /// Discount factor for using this evidence in cluster `k`:
    /// `(1 − falsity) · credibility_k`.
    pub fn alpha(&self, cluster: usize) -> M {
        (M::one() - self.falsity.clone()) * self.credibility[cluster].clone()
    }

    /// Mass against the evidence's own cluster.
    pub fn against_home(&self) -> M {
        self.against[self.home].clone()
    }
}

/// Labels of the membership frame: `c1..cn`, plus `new` for `χ_{n+1}`.
pub fn membership_frame(clusters: usize, fresh: bool) -> Frame {
    let mut labels: Vec<String> = (1..=clusters).map(|k| format!("c{k}")).collect();
    if fresh {
        labels.push("new".into());
    }
    Frame::new(labels).expect("cluster labels are unique and non-empty")
}

/// Membership assessment of evidence `q`, reusing `optimizer`'s conflict cache.
pub fn assess_with<M: Mass>(
    optimizer: &Optimizer<'_, M>,
    partition: &Partition,
    q: usize,
    mode: SingletonSupport,
) -> Result<MembershipAssessment<M>, SpecifyError> {
    if q >= partition.len() {
        return Err(SpecifyError::UnknownEvidence(q));
    }
    let evidences = optimizer.evidences();
    let prior = optimizer.prior();
    let n = partition.cluster_count();
    let home = partition.cluster_of(q);
    let clusters = partition.clusters();
    let fresh = clusters[home].len() > 1;
    let c0 = domain_conflict(prior, n);

    let mut against = vec![M::zero(); n + usize::from(fresh)];
    let mut for_home = None;

    if fresh {
        let c_home = optimizer.cluster_conflict(&clusters[home]);
        let rest: Vec<usize> = clusters[home].iter().copied().filter(|&e| e != q).collect();
        let c_rest = M::min_of(optimizer.cluster_conflict(&rest), c_home.clone());
        if c_rest < M::one() {
            against[home] = mass_out(&c_home, &c_rest)?;
        }
        let c0_star = domain_conflict(prior, n + 1);
        if c0_star > c0 {
            against[n] = mass_new_subset(&c0, &c0_star)?;
        }
    } else if n > 1 {
        let c0_star = domain_conflict(prior, n - 1);
        match mass_singleton_source(&c0, &c0_star, mode)? {
            SingletonEffect::AgainstHome(a) => against[home] = a,
            SingletonEffect::ForHome(b) => for_home = Some(b),
            SingletonEffect::Nothing => {}
        }
    }

    for (k, members) in clusters.iter().enumerate() {
        if k == home {
            continue;
        }
        let c_k = optimizer.cluster_conflict(members);
        if c_k >= M::one() {
            continue;
        }
        let mut joined = members.clone();
        joined.insert(joined.partition_point(|&e| e < q), q);
        let c_joined = optimizer.cluster_conflict(&joined);
        let c_joined = if c_joined < c_k { c_k.clone() } else { c_joined };
        against[k] = mass_in(&c_k, &c_joined)?;
    }

    let frame = Arc::new(membership_frame(n, fresh));
    let id = evidences.evidence(q).id.clone();
    let mut supports = vec![MassFunction::vacuous(frame.clone())];
    for (j, a) in against.iter().enumerate() {
        if !a.is_zero() {
            let target = frame.complement(Subset::singleton(j));
            if target.is_empty() {
                return Err(SpecifyError::TotalConflict(id));
            }
            supports.push(MassFunction::simple_support(frame.clone(), target, a.clone())?);
        }
    }
    if let Some(b) = for_home.as_ref().filter(|b| !b.is_zero()) {
        supports.push(MassFunction::simple_support(
            frame.clone(),
            Subset::singleton(home),
            b.clone(),
        )?);
    }
    let combined = match combine_many(&supports) {
        Ok(m) => m,
        Err(DsError::TotalConflict) => return Err(SpecifyError::TotalConflict(id)),
        Err(e) => return Err(e.into()),
    };

    let size = n + usize::from(fresh);
    let bel: Vec<M> = (0..size).map(|k| combined.belief(Subset::singleton(k))).collect();
    let pls: Vec<M> = (0..size).map(|k| combined.plausibility(Subset::singleton(k))).collect();
    let total = pls.iter().fold(M::zero(), |acc, p| acc + p.clone());
    let credibility = pls.iter().map(|p| p.clone() / total.clone()).collect();

    Ok(MembershipAssessment {
        evidence: q,
        evidence_id: id,
        home,
        clusters: n,
        fresh,
        against,
        for_home,
        bel,
        pls,
        falsity: combined.conflict().clone(),
        credibility,
        combined,
    })
}

/// Membership assessment of evidence `q` under `partition`.
pub fn assess<M: Mass>(
    evidences: &EvidenceSet<M>,
    partition: &Partition,
    prior: &DomainDistribution<M>,
    q: usize,
    mode: SingletonSupport,
) -> Result<MembershipAssessment<M>, SpecifyError> {
    assess_with(&Optimizer::new(evidences, prior), partition, q, mode)
}

/// The evidence discounted for use in each existing cluster `k` by
/// `α_k = (1 − falsity) · credibility_k`.
pub fn credibility_and_discount<M: Mass>(
    assessment: &MembershipAssessment<M>,
    evidences: &EvidenceSet<M>,
) -> Result<Vec<MassFunction<M>>, SpecifyError> {
    let m = evidences.mass_function(assessment.evidence);
    (0..assessment.clusters)
        .map(|k| m.discount(assessment.alpha(k)).map_err(SpecifyError::from))
        .collect()
}
