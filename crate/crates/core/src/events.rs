//! Metalevel assignment of clusters to real-world events.
//!
//! Each cluster's combined evidence, projected onto the event coordinate,
//! says which events the cluster may refer to. These per-cluster bpas are
//! combined on the frame of cluster → event mappings under the restriction
//! that no event is referred to by two clusters: a joint focal element whose
//! event sets admit no injective choice is conflict.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ds::{DsError, MassFunction};
use crate::evidence::EvidenceSet;
use crate::frame::{Frame, Subset};
use crate::mass::Mass;

/// Largest number of clusters [`assign`] will enumerate.
pub const MAX_ASSIGN_CLUSTERS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssignError {
    #[error("{0} clusters exceed the assignment limit of {MAX_ASSIGN_CLUSTERS}")]
    TooManyClusters(usize),
    #[error("no cluster-to-event assignment is consistent with the evidence")]
    TotalConflict,
    #[error("cluster bpas are over different event frames")]
    FrameMismatch,
    #[error("no clusters to assign")]
    Empty,
    #[error(transparent)]
    Ds(#[from] DsError),
}

/// A cluster's evidence about which events it refers to.
#[derive(Debug, Clone, PartialEq)]
pub struct EventEvidence<M> {
    pub cluster: usize,
    pub bpa: MassFunction<M>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<M> {
    pub events: Arc<Frame>,
    /// Normalized joint focal elements: one event set per cluster.
    pub focals: Vec<(Vec<Subset>, M)>,
    pub conflict: M,
    /// `plausibility[i][e]`: some consistent mapping sends cluster `i` to event `e`.
    pub plausibility: Vec<Vec<M>>,
    /// `belief[i][e]`: every consistent mapping sends cluster `i` to event `e`.
    pub belief: Vec<Vec<M>>,
    /// Preferred event per cluster; `None` when no event is left for it.
    pub preferred: Vec<Option<usize>>,
}

/// Combines the cluster's evidences on the joint frame and marginalizes each
/// focal element onto its event part.
pub fn project_events<M: Mass>(
    evidences: &EvidenceSet<M>,
    cluster: usize,
    members: &[usize],
) -> Result<EventEvidence<M>, DsError> {
    let joint = evidences.frame();
    let combined = evidences.combined(members)?;
    let events = Arc::new(joint.events().clone());
    let mut focal: BTreeMap<Subset, M> = BTreeMap::new();
    for (subset, mass) in combined.focals() {
        let e = joint.project_events(subset);
        let entry = focal.entry(e).or_insert_with(M::zero);
        *entry = entry.clone() + mass.clone();
    }
    Ok(EventEvidence {
        cluster,
        bpa: MassFunction::from_parts(events, focal, combined.conflict().clone()),
    })
}

/// Whether the sets admit a system of distinct representatives, i.e. an
/// injective choice of one event per cluster.
pub fn has_distinct_representatives(sets: &[Subset]) -> bool {
    fn augment(i: usize, sets: &[Subset], owner: &mut BTreeMap<usize, usize>, seen: &mut Subset) -> bool {
        for e in sets[i].indices() {
            if seen.contains(e) {
                continue;
            }
            *seen = seen.union(Subset::singleton(e));
            let free = match owner.get(&e).copied() {
                None => true,
                Some(j) => augment(j, sets, owner, seen),
            };
            if free {
                owner.insert(e, i);
                return true;
            }
        }
        false
    }
    let mut owner = BTreeMap::new();
    (0..sets.len()).all(|i| {
        let mut seen = Subset::EMPTY;
        augment(i, sets, &mut owner, &mut seen)
    })
}

/// Whether some injective choice sends cluster `i` to event `e`.
fn can_map(sets: &[Subset], i: usize, e: usize) -> bool {
    if !sets[i].contains(e) {
        return false;
    }
    let pinned = Subset::singleton(e);
    let rest: Vec<Subset> = sets
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, s)| s.difference(pinned))
        .collect();
    has_distinct_representatives(&rest)
}

struct Walker<'a, M> {
    bpas: Vec<Vec<(Subset, &'a M)>>,
    chosen: Vec<Subset>,
    focals: Vec<(Vec<Subset>, M)>,
    conflict: M,
}

impl<M: Mass> Walker<'_, M> {
    fn visit(&mut self, depth: usize, weight: M) {
        if !has_distinct_representatives(&self.chosen) {
            // every completion is conflicting, and the remaining masses sum to one
            self.conflict = self.conflict.clone() + weight;
            return;
        }
        if depth == self.bpas.len() {
            self.focals.push((self.chosen.clone(), weight));
            return;
        }
        for k in 0..self.bpas[depth].len() {
            let (subset, mass) = self.bpas[depth][k];
            self.chosen.push(subset);
            self.visit(depth + 1, weight.clone() * mass.clone());
            self.chosen.pop();
        }
    }
}

/// Combines the per-cluster event bpas under event exclusivity.
pub fn assign<M: Mass>(event_evidences: &[EventEvidence<M>]) -> Result<Assignment<M>, AssignError> {
    let first = event_evidences.first().ok_or(AssignError::Empty)?;
    if event_evidences.len() > MAX_ASSIGN_CLUSTERS {
        return Err(AssignError::TooManyClusters(event_evidences.len()));
    }
    let events = first.bpa.frame().clone();
    if event_evidences.iter().any(|ev| **ev.bpa.frame() != *events) {
        return Err(AssignError::FrameMismatch);
    }
    let mut walker = Walker {
        bpas: event_evidences.iter().map(|ev| ev.bpa.focals().collect()).collect(),
        chosen: Vec::new(),
        focals: Vec::new(),
        conflict: M::zero(),
    };
    walker.visit(0, M::one());
    let Walker { focals, conflict, .. } = walker;
    if focals.is_empty() || conflict.is_total() {
        return Err(AssignError::TotalConflict);
    }
    let norm = M::one() - conflict.clone();
    let focals: Vec<(Vec<Subset>, M)> = focals.into_iter().map(|(sets, m)| (sets, m / norm.clone())).collect();

    let clusters = event_evidences.len();
    let width = events.len();
    let mut plausibility = vec![vec![M::zero(); width]; clusters];
    let mut belief = vec![vec![M::zero(); width]; clusters];
    for (sets, mass) in &focals {
        for i in 0..clusters {
            let reachable: Vec<usize> = sets[i].indices().filter(|&e| can_map(sets, i, e)).collect();
            for &e in &reachable {
                plausibility[i][e] = plausibility[i][e].clone() + mass.clone();
            }
            if let [only] = reachable[..] {
                belief[i][only] = belief[i][only].clone() + mass.clone();
            }
        }
    }

    let preferred = preferred_mapping(&plausibility);
    Ok(Assignment {
        events,
        focals,
        conflict,
        plausibility,
        belief,
        preferred,
    })
}

/// Greedy injective mapping by decreasing marginal plausibility; ties go to
/// the lower cluster index, then the lower event index.
fn preferred_mapping<M: Mass>(plausibility: &[Vec<M>]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(usize, usize)> = plausibility
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(move |(e, _)| (i, e))
        })
        .collect();
    pairs.sort_by(|&(i, e), &(j, f)| {
        plausibility[j][f]
            .partial_cmp(&plausibility[i][e])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
            .then(e.cmp(&f))
    });
    let mut preferred = vec![None; plausibility.len()];
    let mut taken = Subset::EMPTY;
    for (i, e) in pairs {
        if preferred[i].is_none() && !taken.contains(e) {
            preferred[i] = Some(e);
            taken = taken.union(Subset::singleton(e));
        }
    }
    preferred
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn events() -> Arc<Frame> {
        Arc::new(Frame::new(["E1", "E2"]).unwrap())
    }

    fn ev(cluster: usize, focals: Vec<(Subset, Rational)>) -> EventEvidence<Rational> {
        EventEvidence {
            cluster,
            bpa: MassFunction::new(events(), focals).unwrap(),
        }
    }

    #[test]
    fn distinct_representatives() {
        let s = |v: &[usize]| Subset::from_indices(v.iter().copied());
        assert!(has_distinct_representatives(&[s(&[0]), s(&[1])]));
        assert!(!has_distinct_representatives(&[s(&[0]), s(&[0])]));
        assert!(!has_distinct_representatives(&[s(&[0, 1]), s(&[0, 1]), s(&[0, 1])]));
        assert!(has_distinct_representatives(&[s(&[0, 1]), s(&[0]), s(&[1, 2])]));
        assert!(has_distinct_representatives(&[]));
    }

    #[test]
    fn certain_disjoint_clusters() {
        let e1 = Subset::singleton(0);
        let e2 = Subset::singleton(1);
        let a = assign(&[ev(0, vec![(e1, q(1, 1))]), ev(1, vec![(e2, q(1, 1))])]).unwrap();
        assert_eq!(a.conflict, q(0, 1));
        assert_eq!(a.preferred, vec![Some(0), Some(1)]);
        assert_eq!(a.belief[0][0], q(1, 1));
    }

    #[test]
    fn shared_certain_event_is_total_conflict() {
        let e1 = Subset::singleton(0);
        let r = assign(&[ev(0, vec![(e1, q(1, 1))]), ev(1, vec![(e1, q(1, 1))])]);
        assert_eq!(r, Err(AssignError::TotalConflict));
    }

    #[test]
    fn partial_overlap() {
        let e1 = Subset::singleton(0);
        let full = events().full();
        let a = assign(&[
            ev(0, vec![(e1, q(3, 5)), (full, q(2, 5))]),
            ev(1, vec![(e1, q(1, 2)), (full, q(1, 2))]),
        ])
        .unwrap();
        assert_eq!(a.conflict, q(3, 10));
        assert_eq!(a.preferred, vec![Some(0), Some(1)]);
        assert_eq!(a.plausibility[0][0], q(5, 7));
        assert_eq!(a.plausibility[1][1], q(5, 7));
        assert_eq!(a.plausibility[1][0], q(4, 7));
    }

    #[test]
    fn guard_rail() {
        let full = events().full();
        let many: Vec<_> = (0..7).map(|i| ev(i, vec![(full, q(1, 1))])).collect();
        assert_eq!(assign(&many), Err(AssignError::TooManyClusters(7)));
        assert_eq!(assign::<Rational>(&[]), Err(AssignError::Empty));
    }
}
