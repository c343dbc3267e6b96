use std::collections::HashMap;

use parking_lot::RwLock;

use crate::evidence::EvidenceSet;
use crate::mass::Mass;

/// Cluster conflicts memoized by cluster content (sorted member indices).
///
/// Values do not depend on the order clusters were visited in, so cached and
/// fresh evaluations are bit-identical.
#[derive(Debug, Default)]
pub struct ConflictCache<M> {
    entries: RwLock<HashMap<Vec<usize>, M>>,
}

impl<M: Mass> ConflictCache<M> {
    pub fn new() -> Self {
        ConflictCache {
            entries: RwLock::new(HashMap::new()),
        }
    }

    /// Conflict of the cluster `members`, which must be sorted.
    pub fn conflict(&self, evidences: &EvidenceSet<M>, members: &[usize]) -> M {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        if let Some(c) = self.entries.read().get(members) {
            return c.clone();
        }
        let c = evidences.same_event_conflict(members);
        self.entries.write().insert(members.to_vec(), c.clone());
        c
    }

    pub fn len(&self) -> usize {
        self.entries.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.read().is_empty()
    }
}
