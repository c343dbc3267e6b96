//! Evidences over a joint action × event frame.
//!
//! A proposition has an action part (what is claimed) and an event part (which
//! event the claim is about). Joint propositions are rectangles in the product
//! frame, so two propositions conflict when either coordinate is disjoint.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::ds::{combine, DsError, MassFunction};
use crate::frame::{Frame, FrameError, Subset, MAX_ATOMS};
use crate::mass::Mass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvidenceError {
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("joint frame of {0} action-event pairs exceeds {MAX_ATOMS}")]
    JointTooLarge(usize),
    #[error("evidence `{0}`: {1}")]
    Mass(String, DsError),
    #[error("evidence `{0}` has an empty action or event part")]
    EmptyPart(String),
    #[error("evidence `{0}` has no focal elements")]
    NoFocals(String),
    #[error("duplicate evidence id `{0}`")]
    DuplicateId(String),
    #[error("evidence set is empty")]
    Empty,
}

/// The product of an action frame and an event frame.
#[derive(Debug, Clone, PartialEq)]
pub struct JointFrame {
    actions: Frame,
    events: Frame,
    product: Arc<Frame>,
}

/// A joint proposition: an action part and an event part, both non-empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointProp {
    pub actions: Subset,
    pub events: Subset,
}

impl JointFrame {
    pub fn new(actions: Frame, events: Frame) -> Result<Self, EvidenceError> {
        let size = actions.len() * events.len();
        if size > MAX_ATOMS {
            return Err(EvidenceError::JointTooLarge(size));
        }
        let mut atoms = Vec::with_capacity(size);
        for a in actions.atoms() {
            for e in events.atoms() {
                atoms.push(format!("{a}@{e}"));
            }
        }
        let product = Arc::new(Frame::new(atoms)?);
        Ok(JointFrame {
            actions,
            events,
            product,
        })
    }

    pub fn actions(&self) -> &Frame {
        &self.actions
    }

    pub fn events(&self) -> &Frame {
        &self.events
    }

    /// The product frame the evidences' mass functions live on.
    pub fn product(&self) -> &Arc<Frame> {
        &self.product
    }

    pub fn full(&self) -> JointProp {
        JointProp {
            actions: self.actions.full(),
            events: self.events.full(),
        }
    }

    /// Rectangle `actions × events` as a subset of the product frame.
    pub fn rectangle(&self, prop: JointProp) -> Subset {
        let width = self.events.len();
        let mut bits = Subset::EMPTY;
        for a in prop.actions.indices() {
            for e in prop.events.indices() {
                bits = bits.union(Subset::singleton(a * width + e));
            }
        }
        bits
    }

    /// Recovers both coordinates of a product subset. Exact for rectangles.
    pub fn split(&self, subset: Subset) -> JointProp {
        JointProp {
            actions: self.project_actions(subset),
            events: self.project_events(subset),
        }
    }

    pub fn project_events(&self, subset: Subset) -> Subset {
        let width = self.events.len();
        Subset::from_indices(subset.indices().map(|i| i % width))
    }

    pub fn project_actions(&self, subset: Subset) -> Subset {
        let width = self.events.len();
        Subset::from_indices(subset.indices().map(|i| i / width))
    }
}

/// An identified, possibly nonspecific, piece of evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Evidence<M> {
    pub id: String,
    pub focals: Vec<(JointProp, M)>,
    pub metadata: BTreeMap<String, String>,
}

impl<M: Mass> Evidence<M> {
    pub fn new(id: impl Into<String>, focals: Vec<(JointProp, M)>) -> Self {
        Evidence {
            id: id.into(),
            focals,
            metadata: BTreeMap::new(),
        }
    }

    pub fn mass_function(&self, frame: &JointFrame) -> Result<MassFunction<M>, EvidenceError> {
        if self.focals.is_empty() {
            return Err(EvidenceError::NoFocals(self.id.clone()));
        }
        for (prop, _) in &self.focals {
            if prop.actions.is_empty() || prop.events.is_empty() {
                return Err(EvidenceError::EmptyPart(self.id.clone()));
            }
        }
        let focals = self.focals.iter().map(|(prop, m)| (frame.rectangle(*prop), m.clone()));
        MassFunction::new(frame.product().clone(), focals).map_err(|e| EvidenceError::Mass(self.id.clone(), e))
    }
}

/// The set χ of all evidences, with their mass functions on the joint frame.
#[derive(Debug, Clone)]
pub struct EvidenceSet<M> {
    frame: JointFrame,
    evidences: Vec<Evidence<M>>,
    masses: Vec<MassFunction<M>>,
}

impl<M: Mass> EvidenceSet<M> {
    pub fn new(frame: JointFrame, evidences: Vec<Evidence<M>>) -> Result<Self, EvidenceError> {
        if evidences.is_empty() {
            return Err(EvidenceError::Empty);
        }
        for (i, e) in evidences.iter().enumerate() {
            if evidences[..i].iter().any(|o| o.id == e.id) {
                return Err(EvidenceError::DuplicateId(e.id.clone()));
            }
        }
        let masses = evidences
            .iter()
            .map(|e| e.mass_function(&frame))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvidenceSet {
            frame,
            evidences,
            masses,
        })
    }

    pub fn frame(&self) -> &JointFrame {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.evidences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.evidences.is_empty()
    }

    pub fn evidences(&self) -> &[Evidence<M>] {
        &self.evidences
    }

    pub fn evidence(&self, index: usize) -> &Evidence<M> {
        &self.evidences[index]
    }

    pub fn mass_function(&self, index: usize) -> &MassFunction<M> {
        &self.masses[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.evidences.iter().position(|e| e.id == id)
    }

    /// Conflict of combining the evidences at `members` as if they all
    /// referred to the same event.
    pub fn same_event_conflict(&self, members: &[usize]) -> M {
        same_event_conflict(members.iter().map(|&i| &self.masses[i]))
    }

    /// Dempster combination of the evidences at `members`.
    pub fn combined(&self, members: &[usize]) -> Result<MassFunction<M>, DsError> {
        let ms: Vec<MassFunction<M>> = members.iter().map(|&i| self.masses[i].clone()).collect();
        crate::ds::combine_many(&ms)
    }
}

/// Conflict `k` of combining all of `masses`; one when they are fully
/// incompatible, zero for a single evidence.
pub fn same_event_conflict<'a, M, I>(masses: I) -> M
where
    M: Mass,
    I: IntoIterator<Item = &'a MassFunction<M>>,
{
    let mut iter = masses.into_iter();
    let Some(first) = iter.next() else {
        return M::zero();
    };
    let mut acc = first.clone();
    let mut survive = M::one();
    for m in iter {
        match combine(&acc, m) {
            Ok(next) => {
                survive = survive * (M::one() - next.conflict().clone());
                acc = next;
            }
            Err(_) => return M::one(),
        }
    }
    M::one() - survive
}
