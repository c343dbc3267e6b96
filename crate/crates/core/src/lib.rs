//! Clustering and specification of nonspecific evidence in Dempster-Shafer
//! theory.
//!
//! Evidences whose event part does not say which real-world event they are
//! about are partitioned into clusters, one per event, by minimizing the
//! metaconflict of the partition ([`partition`]). Each evidence's membership
//! in every cluster is then assessed from how conflicts change when it is
//! moved ([`specifier`]), a posterior over the number of clusters is derived
//! ([`posterior`]), and clusters are matched to events ([`events`]).
//!
//! All numerical code is generic over [`Mass`], implemented for `f64` and for
//! exact rationals ([`Rational`]).

pub mod document;
pub mod ds;
pub mod events;
pub mod evidence;
pub mod frame;
pub mod mass;
pub mod partition;
pub mod pipeline;
pub mod posterior;
pub mod scenario;
pub mod specifier;

pub use ds::{combine, combine_many, DsError, MassFunction, SimpleSupport};
pub use evidence::{Evidence, EvidenceSet, JointFrame, JointProp};
pub use frame::{Frame, Subset};
pub use mass::{Mass, Rational};
pub use partition::{metaconflict, ConflictReport, DomainDistribution, Partition};
