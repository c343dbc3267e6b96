//! Mass functions, Dempster's rule, belief, plausibility and discounting.
//!
//! A [`MassFunction`] is a normalized basic probability assignment over the
//! subsets of a [`Frame`]. Combining two of them with [`combine`] keeps the
//! mass that fell on the empty set as the result's `conflict`, since that
//! quantity drives the whole clustering machinery downstream.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::frame::{Frame, Subset};
use crate::mass::Mass;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DsError {
    #[error("mass functions are defined over different frames")]
    FrameMismatch,
    #[error("mass assigned to the empty set")]
    EmptyFocal,
    #[error("focal element is not a subset of the frame")]
    OutOfFrame,
    #[error("mass {0} is outside [0, 1]")]
    MassOutOfRange(f64),
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("total conflict: the evidences are fully incompatible")]
    TotalConflict,
    #[error("cannot combine an empty sequence of mass functions")]
    EmptySequence,
    #[error("discount factor {0} is outside [0, 1]")]
    InvalidDiscount(f64),
}

/// A normalized basic probability assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction<M> {
    frame: Arc<Frame>,
    focal: BTreeMap<Subset, M>,
    conflict: M,
}

impl<M: Mass> MassFunction<M> {
    /// Builds a mass function from focal elements. Duplicate subsets are
    /// merged and zero masses dropped; the masses must sum to one.
    pub fn new<I>(frame: Arc<Frame>, focals: I) -> Result<Self, DsError>
    where
        I: IntoIterator<Item = (Subset, M)>,
    {
        let mut focal: BTreeMap<Subset, M> = BTreeMap::new();
        let mut total = M::zero();
        for (subset, mass) in focals {
            if mass < M::zero() || mass > M::one() {
                return Err(DsError::MassOutOfRange(mass.to_f64()));
            }
            if mass.is_zero() {
                continue;
            }
            if subset.is_empty() {
                return Err(DsError::EmptyFocal);
            }
            if !frame.contains_subset(subset) {
                return Err(DsError::OutOfFrame);
            }
            total = total + mass.clone();
            accumulate(&mut focal, subset, mass);
        }
        if !total.approx_eq(&M::one()) {
            return Err(DsError::NotNormalized(total.to_f64()));
        }
        Ok(MassFunction {
            frame,
            focal,
            conflict: M::zero(),
        })
    }

    /// All mass on the whole frame.
    pub fn vacuous(frame: Arc<Frame>) -> Self {
        let mut focal = BTreeMap::new();
        focal.insert(frame.full(), M::one());
        MassFunction {
            frame,
            focal,
            conflict: M::zero(),
        }
    }

    /// `{target: mass, Θ: 1 − mass}`.
    pub fn simple_support(frame: Arc<Frame>, target: Subset, mass: M) -> Result<Self, DsError> {
        let theta = frame.full();
        let rest = M::one() - mass.clone();
        Self::new(frame, [(target, mass), (theta, rest)])
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    /// Focal elements in bitset order.
    pub fn focals(&self) -> impl Iterator<Item = (Subset, &M)> + '_ {
        self.focal.iter().map(|(s, m)| (*s, m))
    }

    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    pub fn mass(&self, subset: Subset) -> M {
        self.focal.get(&subset).cloned().unwrap_or_else(M::zero)
    }

    pub fn theta_mass(&self) -> M {
        self.mass(self.frame.full())
    }

    /// Mass that fell on the empty set before normalization.
    pub fn conflict(&self) -> &M {
        &self.conflict
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal.contains_key(&self.frame.full())
    }

    pub fn belief(&self, subset: Subset) -> M {
        self.focal
            .iter()
            .filter(|(b, _)| b.is_subset_of(subset))
            .fold(M::zero(), |acc, (_, m)| acc + m.clone())
    }

    pub fn plausibility(&self, subset: Subset) -> M {
        self.focal
            .iter()
            .filter(|(b, _)| b.intersects(subset))
            .fold(M::zero(), |acc, (_, m)| acc + m.clone())
    }

    /// Shafer discounting: informative focals are scaled by `alpha` and the
    /// remainder moves to Θ.
    pub fn discount(&self, alpha: M) -> Result<Self, DsError> {
        if alpha < M::zero() || alpha > M::one() {
            return Err(DsError::InvalidDiscount(alpha.to_f64()));
        }
        let theta = self.frame.full();
        let mut focal = BTreeMap::new();
        for (subset, mass) in &self.focal {
            if *subset != theta {
                let scaled = mass.clone() * alpha.clone();
                if !scaled.is_zero() {
                    focal.insert(*subset, scaled);
                }
            }
        }
        let theta_mass = M::one() - alpha * (M::one() - self.theta_mass());
        if !theta_mass.is_zero() {
            focal.insert(theta, theta_mass);
        }
        Ok(MassFunction {
            frame: self.frame.clone(),
            focal,
            conflict: self.conflict.clone(),
        })
    }

    /// Sum of all focal masses (one, up to rounding).
    pub fn total(&self) -> M {
        self.focal.values().fold(M::zero(), |acc, m| acc + m.clone())
    }

    /// Re-expresses the masses in another numeric type.
    pub fn convert<N: Mass>(&self) -> MassFunction<N> {
        MassFunction {
            frame: self.frame.clone(),
            focal: self
                .focal
                .iter()
                .map(|(s, m)| (*s, N::from_f64(m.to_f64()).unwrap_or_else(N::zero)))
                .collect(),
            conflict: N::from_f64(self.conflict.to_f64()).unwrap_or_else(N::zero),
        }
    }

    pub(crate) fn from_parts(frame: Arc<Frame>, focal: BTreeMap<Subset, M>, conflict: M) -> Self {
        MassFunction { frame, focal, conflict }
    }
}

/// A simple support function: `mass` on `target`, the rest on Θ.
#[derive(Debug, Clone, PartialEq)]
pub struct SimpleSupport<M> {
    pub frame: Arc<Frame>,
    pub target: Subset,
    pub mass: M,
}

impl<M: Mass> SimpleSupport<M> {
    pub fn to_mass_function(&self) -> Result<MassFunction<M>, DsError> {
        MassFunction::simple_support(self.frame.clone(), self.target, self.mass.clone())
    }
}

fn accumulate<M: Mass>(focal: &mut BTreeMap<Subset, M>, subset: Subset, mass: M) {
    match focal.get_mut(&subset) {
        Some(existing) => *existing = existing.clone() + mass,
        None => {
            focal.insert(subset, mass);
        }
    }
}

fn same_frame(a: &Frame, b: &Frame) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// Dempster's rule of combination.
///
/// The returned mass function carries this step's conflict `k`.
pub fn combine<M: Mass>(a: &MassFunction<M>, b: &MassFunction<M>) -> Result<MassFunction<M>, DsError> {
    if !same_frame(&a.frame, &b.frame) {
        return Err(DsError::FrameMismatch);
    }
    let mut joint: BTreeMap<Subset, M> = BTreeMap::new();
    let mut conflict = M::zero();
    for (sa, ma) in &a.focal {
        for (sb, mb) in &b.focal {
            let product = ma.clone() * mb.clone();
            let meet = sa.intersect(*sb);
            if meet.is_empty() {
                conflict = conflict + product;
            } else {
                accumulate(&mut joint, meet, product);
            }
        }
    }
    if conflict.is_total() || joint.is_empty() {
        return Err(DsError::TotalConflict);
    }
    let norm = M::one() - conflict.clone();
    let theta = a.frame.full();
    let mut focal = BTreeMap::new();
    let mut pruned = M::zero();
    for (subset, mass) in joint {
        let value = mass / norm.clone();
        if value.is_negligible() && subset != theta {
            pruned = pruned + value;
        } else {
            focal.insert(subset, value);
        }
    }
    if !pruned.is_zero() {
        accumulate(&mut focal, theta, pruned);
    }
    Ok(MassFunction {
        frame: a.frame.clone(),
        focal,
        conflict,
    })
}

/// Left fold of [`combine`]. The result's conflict is the accumulated
/// `1 − Π(1 − k_step)`, i.e. the mass on ∅ of the unnormalized joint.
pub fn combine_many<M: Mass>(ms: &[MassFunction<M>]) -> Result<MassFunction<M>, DsError> {
    let (first, rest) = ms.split_first().ok_or(DsError::EmptySequence)?;
    let mut acc = first.clone();
    let mut survive = M::one() - first.conflict.clone();
    for m in rest {
        acc = combine(&acc, m)?;
        survive = survive * (M::one() - acc.conflict.clone());
    }
    acc.conflict = M::one() - survive;
    Ok(acc)
}
