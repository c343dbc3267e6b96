//! Synthetic multi-target report scenarios.
//!
//! Each target `t` has its own event `E_t` and a signature action `A_t`
//! (say, the sector it operates in). A report about `t` claims `A_t` with
//! some mass, about an event part that always includes `E_t` and, when the
//! report is nonspecific, some other events as well. Noisy reports claim a
//! wrong action. The first report of every target is specific, so every
//! target has at least one report that names its event alone.
//!
//! Ground-truth labels are returned separately from the document.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{EvidenceDoc, EvidenceDocument, FocalDoc, MassLiteral};
use crate::frame::MAX_ATOMS;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub targets: usize,
    pub reports_per_target: usize,
    /// Probability that a report's event part covers more than one event.
    pub nonspecificity: f64,
    /// Probability that a report claims another target's action.
    pub noise: f64,
    /// Range of the reported mass, in hundredths.
    pub mass_percent: (u32, u32),
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec {
            targets: 3,
            reports_per_target: 4,
            nonspecificity: 0.3,
            noise: 0.0,
            mass_percent: (50, 90),
        }
    }
}

impl ScenarioSpec {
    fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |m: String| Err(ScenarioError::Invalid(m));
        if self.targets == 0 {
            return fail("at least one target is required".into());
        }
        if self.targets * self.targets > MAX_ATOMS {
            return fail(format!("{} targets exceed the joint frame capacity", self.targets));
        }
        if self.reports_per_target == 0 {
            return fail("at least one report per target is required".into());
        }
        for (name, p) in [("nonspecificity", self.nonspecificity), ("noise", self.noise)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} {p} is not a probability"));
            }
        }
        let (lo, hi) = self.mass_percent;
        if lo == 0 || lo > hi || hi > 99 {
            return fail(format!("mass range {lo}..{hi} must lie within 1..99"));
        }
        Ok(())
    }
}

/// Evidence id → index of the target it was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub labels: BTreeMap<String, usize>,
    /// Event label of each target.
    pub events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub document: EvidenceDocument,
    pub truth: GroundTruth,
}

pub fn generate_scenario(spec: &ScenarioSpec, seed: u64) -> Result<Scenario, ScenarioError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.targets;
    let actions: Vec<String> = (1..=k).map(|t| format!("A{t}")).collect();
    let events: Vec<String> = (1..=k).map(|t| format!("E{t}")).collect();

    let mut reports: Vec<(usize, EvidenceDoc)> = Vec::new();
    for t in 0..k {
        for j in 0..spec.reports_per_target {
            let action = if k > 1 && rng.gen_bool(spec.noise) {
                (t + rng.gen_range(1..k)) % k
            } else {
                t
            };
            let mut event_part = vec![events[t].clone()];
            if j > 0 && k > 1 && rng.gen_bool(spec.nonspecificity) {
                let mut others: Vec<usize> = (0..k).filter(|&e| e != t).filter(|_| rng.gen_bool(0.5)).collect();
                if others.is_empty() {
                    others.push((t + rng.gen_range(1..k)) % k);
                }
                event_part.extend(others.into_iter().map(|e| events[e].clone()));
                event_part.sort();
            }
            let percent = rng.gen_range(spec.mass_percent.0..=spec.mass_percent.1);
            let focals = vec![
                FocalDoc {
                    actions: Some(vec![actions[action].clone()]),
                    events: Some(event_part),
                    mass: MassLiteral::Text(format!("0.{percent:02}")),
                },
                FocalDoc {
                    actions: None,
                    events: None,
                    mass: MassLiteral::Text(format!("0.{:02}", 100 - percent)),
                },
            ];
            reports.push((
                t,
                EvidenceDoc {
                    id: String::new(),
                    focals,
                    metadata: BTreeMap::new(),
                },
            ));
        }
    }
    reports.shuffle(&mut rng);

    let width = reports.len().to_string().len();
    let mut labels = BTreeMap::new();
    let evidences = reports
        .into_iter()
        .enumerate()
        .map(|(i, (t, mut doc))| {
            doc.id = format!("r{:0width$}", i + 1);
            doc.metadata.insert("time".into(), (i + 1).to_string());
            labels.insert(doc.id.clone(), t);
            doc
        })
        .collect();

    Ok(Scenario {
        document: EvidenceDocument {
            description: Some(format!(
                "synthetic scenario: {k} targets x {} reports, seed {seed}",
                spec.reports_per_target
            )),
            actions,
            events: events.clone(),
            evidences,
            domain_prior: BTreeMap::from([(k, MassLiteral::Text("1".into()))]),
        },
        truth: GroundTruth { labels, events },
    })
}
