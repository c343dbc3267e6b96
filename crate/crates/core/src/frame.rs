//! Frames of discernment and their subsets.

use std::fmt;

use thiserror::Error;

/// Maximum number of atoms in a frame; subsets are stored as a `u128` bitset.
pub const MAX_ATOMS: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("a frame needs at least one atom")]
    Empty,
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("frame has {0} atoms, at most {MAX_ATOMS} are supported")]
    TooLarge(usize),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
}

/// A subset of some frame, as a bitset over the frame's atom order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(u128);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u128) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    pub fn singleton(index: usize) -> Self {
        debug_assert!(index < MAX_ATOMS);
        Subset(1u128 << index)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(Subset::EMPTY, |acc, i| acc.union(Subset::singleton(i)))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, index: usize) -> bool {
        index < MAX_ATOMS && self.0 >> index & 1 == 1
    }

    pub fn intersect(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    /// Atom indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

/// An ordered, immutable set of labelled atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    atoms: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(atoms: I) -> Result<Self, FrameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(FrameError::Empty);
        }
        if atoms.len() > MAX_ATOMS {
            return Err(FrameError::TooLarge(atoms.len()));
        }
        for (i, atom) in atoms.iter().enumerate() {
            if atoms[..i].contains(atom) {
                return Err(FrameError::DuplicateAtom(atom.clone()));
            }
        }
        Ok(Frame { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// The whole frame, Θ.
    pub fn full(&self) -> Subset {
        if self.atoms.len() == MAX_ATOMS {
            Subset(u128::MAX)
        } else {
            Subset((1u128 << self.atoms.len()) - 1)
        }
    }

    pub fn contains_subset(&self, subset: Subset) -> bool {
        subset.is_subset_of(self.full())
    }

    pub fn complement(&self, subset: Subset) -> Subset {
        self.full().difference(subset)
    }

    pub fn subset<S: AsRef<str>>(&self, atoms: &[S]) -> Result<Subset, FrameError> {
        atoms.iter().try_fold(Subset::EMPTY, |acc, atom| {
            let atom = atom.as_ref();
            self.index_of(atom)
                .map(|i| acc.union(Subset::singleton(i)))
                .ok_or_else(|| FrameError::UnknownAtom(atom.to_string()))
        })
    }

    pub fn labels(&self, subset: Subset) -> Vec<&str> {
        subset
            .indices()
            .filter_map(|i| self.atoms.get(i).map(String::as_str))
            .collect()
    }
}
