//! JSON evidence documents.
//!
//! ```json
//! {
//!   "actions": ["B", "R"],
//!   "events": ["E1", "E2"],
//!   "evidences": [
//!     {"id": "e1", "focals": [
//!       {"actions": ["B"], "events": ["E1"], "mass": "0.8"},
//!       {"mass": "0.2"}
//!     ]}
//!   ],
//!   "domain_prior": {"2": "1"}
//! }
//! ```
//!
//! A focal element that omits `actions` or `events` covers that whole
//! coordinate. Masses are decimal or `p/q` strings so they parse exactly;
//! plain JSON numbers are accepted too.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ds::DsError;
use crate::evidence::{Evidence, EvidenceError, EvidenceSet, JointFrame, JointProp};
use crate::frame::{Frame, FrameError};
use crate::mass::Mass;
use crate::partition::DomainDistribution;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("evidence `{id}`: masses sum to {sum}, expected 1")]
    Mass { id: String, sum: f64 },
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Schema(e.to_string())
    }
}

impl From<FrameError> for DocumentError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::UnknownAtom(a) => DocumentError::UnknownAtom(a),
            other => DocumentError::Schema(other.to_string()),
        }
    }
}

impl From<EvidenceError> for DocumentError {
    fn from(e: EvidenceError) -> Self {
        match e {
            EvidenceError::Frame(f) => f.into(),
            EvidenceError::Mass(id, DsError::NotNormalized(sum)) => DocumentError::Mass { id, sum },
            other => DocumentError::Schema(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MassLiteral {
    Text(String),
    Number(serde_json::Number),
}

impl MassLiteral {
    fn parse<M: Mass>(&self) -> Result<M, DocumentError> {
        let text = match self {
            MassLiteral::Text(s) => s.clone(),
            MassLiteral::Number(n) => n.to_string(),
        };
        M::parse(&text).ok_or_else(|| DocumentError::Schema(format!("invalid mass `{text}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<String>>,
    pub mass: MassLiteral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceDoc {
    pub id: String,
    pub focals: Vec<FocalDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub actions: Vec<String>,
    pub events: Vec<String>,
    pub evidences: Vec<EvidenceDoc>,
    pub domain_prior: BTreeMap<usize, MassLiteral>,
}

impl EvidenceDocument {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("documents always serialize");
        out.push('\n');
        out
    }

    /// Validates the document and builds the evidence set and prior.
    pub fn build<M: Mass>(&self) -> Result<(EvidenceSet<M>, DomainDistribution<M>), DocumentError> {
        if self.evidences.is_empty() {
            return Err(DocumentError::Schema("evidence list is empty".into()));
        }
        if self.domain_prior.is_empty() {
            return Err(DocumentError::Schema("domain_prior is empty".into()));
        }
        let frame = JointFrame::new(Frame::new(self.actions.clone())?, Frame::new(self.events.clone())?)?;
        let mut evidences = Vec::with_capacity(self.evidences.len());
        for doc in &self.evidences {
            if doc.focals.is_empty() {
                return Err(DocumentError::Schema(format!("evidence `{}` has no focals", doc.id)));
            }
            let mut focals = Vec::with_capacity(doc.focals.len());
            for focal in &doc.focals {
                let actions = match &focal.actions {
                    Some(list) => frame.actions().subset(list)?,
                    None => frame.actions().full(),
                };
                let events = match &focal.events {
                    Some(list) => frame.events().subset(list)?,
                    None => frame.events().full(),
                };
                focals.push((JointProp { actions, events }, focal.mass.parse::<M>()?));
            }
            let mut evidence = Evidence::new(doc.id.clone(), focals);
            evidence.metadata = doc.metadata.clone();
            evidences.push(evidence);
        }
        let set = EvidenceSet::new(frame, evidences)?;
        let prior = self
            .domain_prior
            .iter()
            .map(|(count, mass)| mass.parse::<M>().map(|m| (*count, m)))
            .collect::<Result<Vec<_>, _>>()?;
        let prior = DomainDistribution::new(prior).map_err(|e| DocumentError::Schema(e.to_string()))?;
        Ok((set, prior))
    }

    /// Canonical document for an evidence set: every focal lists both parts
    /// explicitly and masses are written losslessly.
    pub fn from_set<M: Mass>(set: &EvidenceSet<M>, prior: &DomainDistribution<M>) -> Self {
        let frame = set.frame();
        let names = |f: &Frame, s| f.labels(s).into_iter().map(String::from).collect();
        EvidenceDocument {
            description: None,
            actions: frame.actions().atoms().to_vec(),
            events: frame.events().atoms().to_vec(),
            evidences: set
                .evidences()
                .iter()
                .map(|e| EvidenceDoc {
                    id: e.id.clone(),
                    focals: e
                        .focals
                        .iter()
                        .map(|(prop, m)| FocalDoc {
                            actions: Some(names(frame.actions(), prop.actions)),
                            events: Some(names(frame.events(), prop.events)),
                            mass: MassLiteral::Text(m.to_text()),
                        })
                        .collect(),
                    metadata: e.metadata.clone(),
                })
                .collect(),
            domain_prior: prior
                .support()
                .map(|(c, m)| (c, MassLiteral::Text(m.to_text())))
                .collect(),
        }
    }
}

/// Parses a JSON evidence document into an evidence set and a prior.
pub fn parse_evidence_file<M: Mass>(text: &str) -> Result<(EvidenceSet<M>, DomainDistribution<M>), DocumentError> {
    EvidenceDocument::from_json(text)?.build()
}

pub fn load_evidence_file<M: Mass>(path: &Path) -> Result<(EvidenceSet<M>, DomainDistribution<M>), DocumentError> {
    let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_evidence_file(&text)
}

/// Canonical JSON text for an evidence set and prior.
pub fn serialize_evidence_file<M: Mass>(set: &EvidenceSet<M>, prior: &DomainDistribution<M>) -> String {
    EvidenceDocument::from_set(set, prior).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mass::Rational;

    const BAKER: &str = include_str!("../fixtures/baker_street.json");

    #[test]
    fn parses_baker_street() {
        let (set, prior) = parse_evidence_file::<Rational>(BAKER).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(prior.mass(2), Rational::from_integer(1.into()));
        assert_eq!(prior.support().count(), 1);
    }

    #[test]
    fn rejects_empty_evidence_list() {
        let doc = r#"{"actions":["A"],"events":["E"],"evidences":[],"domain_prior":{"1":"1"}}"#;
        assert!(matches!(parse_evidence_file::<f64>(doc), Err(DocumentError::Schema(_))));
    }

    #[test]
    fn rejects_unnormalized_masses() {
        let doc = r#"{"actions":["A","B"],"events":["E"],"evidences":[
            {"id":"x","focals":[{"actions":["A"],"mass":"0.8"},{"mass":"0.3"}]}],
            "domain_prior":{"1":"1"}}"#;
        assert!(matches!(
            parse_evidence_file::<Rational>(doc),
            Err(DocumentError::Mass { ref id, .. }) if id == "x"
        ));
    }

    #[test]
    fn rejects_unknown_atoms() {
        let doc = r#"{"actions":["A"],"events":["E"],"evidences":[
            {"id":"x","focals":[{"events":["F"],"mass":"1"}]}],
            "domain_prior":{"1":"1"}}"#;
        assert!(matches!(parse_evidence_file::<f64>(doc), Err(DocumentError::UnknownAtom(a)) if a == "F"));
    }

    #[test]
    fn rejects_malformed_documents() {
        for doc in [
            "not json",
            r#"{"actions":["A"],"events":["E"],"evidences":[{"id":"x","focals":[{"mass":"1"}]}],"domain_prior":{}}"#,
            r#"{"actions":["A"],"events":["E"],"evidences":[{"id":"x","focals":[{"mass":"zero"}]}],"domain_prior":{"1":"1"}}"#,
            r#"{"actions":["A"],"events":["E"],"evidences":[{"id":"x","focals":[]}],"domain_prior":{"1":"1"}}"#,
            r#"{"actions":["A"],"events":["E"],"evidences":[{"id":"x","focals":[{"mass":"1"}]}],"domain_prior":{"1":"0.5"}}"#,
            r#"{"actions":[],"events":["E"],"evidences":[{"id":"x","focals":[{"mass":"1"}]}],"domain_prior":{"1":"1"}}"#,
            r#"{"actions":["A"],"events":["E"],"evidences":[{"id":"x","focals":[{"mass":"1"}],"extra":1}],"domain_prior":{"1":"1"}}"#,
        ] {
            assert!(
                matches!(parse_evidence_file::<f64>(doc), Err(DocumentError::Schema(_))),
                "{doc}"
            );
        }
    }

    #[test]
    fn accepts_numeric_masses() {
        let doc = r#"{"actions":["A","B"],"events":["E"],"evidences":[
            {"id":"x","focals":[{"actions":["A"],"mass":0.25},{"mass":0.75}]}],
            "domain_prior":{"1":1}}"#;
        let (set, _) = parse_evidence_file::<Rational>(doc).unwrap();
        assert_eq!(set.evidence(0).focals[0].1, Rational::new(1.into(), 4.into()));
    }

    #[test]
    fn canonical_form_is_stable() {
        let (set, prior) = parse_evidence_file::<Rational>(BAKER).unwrap();
        let once = serialize_evidence_file(&set, &prior);
        let (set2, prior2) = parse_evidence_file::<Rational>(&once).unwrap();
        assert_eq!(serialize_evidence_file(&set2, &prior2), once);
        assert_eq!(prior, prior2);
        assert_eq!(set.evidences(), set2.evidences());
    }
}
