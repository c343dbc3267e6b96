//! End-to-end analysis driven by the command line: partition, specify,
//! derive the posterior over the number of clusters, and assign clusters to
//! events. Reports are JSON with floats rounded to 12 significant digits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::document::{load_evidence_file, DocumentError};
use crate::ds::MassFunction;
use crate::events::{assign, project_events, AssignError};
use crate::evidence::EvidenceSet;
use crate::partition::{CandidateStatus, DomainDistribution, Optimizer, PartitionError, SearchOptions, SearchOutcome};
use crate::posterior::{
    counts_bpa, existence_support, falsity_discount_existence, posterior, CountsBpa, ExistenceEvidence,
    PosteriorDistribution, PosteriorError,
};
use crate::scenario::{generate_scenario, ScenarioError, ScenarioSpec};
use crate::specifier::{assess_with, MembershipAssessment, SingletonSupport, SpecifyError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Input(#[from] DocumentError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("infeasible: {0}")]
    Infeasible(PartitionError),
    #[error("total conflict: {0}")]
    TotalConflict(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl PipelineError {
    /// 2 input error, 3 infeasible, 4 total conflict, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Input(_) | PipelineError::Config(_) | PipelineError::Scenario(_) => 2,
            PipelineError::Infeasible(_) => 3,
            PipelineError::TotalConflict(_) => 4,
            PipelineError::Output { .. } => 1,
        }
    }
}

impl From<SpecifyError> for PipelineError {
    fn from(e: SpecifyError) -> Self {
        PipelineError::TotalConflict(e.to_string())
    }
}

impl From<PosteriorError> for PipelineError {
    fn from(e: PosteriorError) -> Self {
        PipelineError::TotalConflict(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Partition,
    Specify,
    Posterior,
    Pipeline,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub restarts: usize,
    pub seed: u64,
    pub singleton_support: SingletonSupport,
    pub out: Option<PathBuf>,
    pub tables: Option<PathBuf>,
    pub summary: bool,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            restarts: 20,
            seed: 0,
            singleton_support: SingletonSupport::Printed,
            out: None,
            tables: None,
            summary: false,
        }
    }
}

/// Typed results of every stage that ran.
pub struct Analysis {
    pub evidences: EvidenceSet<f64>,
    pub prior: DomainDistribution<f64>,
    pub search: SearchOutcome<f64>,
    pub membership: Option<Vec<MembershipAssessment<f64>>>,
    pub existence: Option<Vec<ExistenceEvidence<f64>>>,
    pub counts: Option<CountsBpa<f64>>,
    pub posterior: Option<PosteriorDistribution<f64>>,
    pub assignment: Option<Result<crate::events::Assignment<f64>, AssignError>>,
}

pub fn analyze(config: &RunConfig, stage: Stage) -> Result<Analysis, PipelineError> {
    if config.restarts == 0 {
        return Err(PipelineError::Config("restarts must be at least 1".into()));
    }
    let (evidences, prior) = load_evidence_file::<f64>(&config.input)?;
    let optimizer = Optimizer::new(&evidences, &prior);
    let options = SearchOptions {
        restarts: config.restarts,
        seed: config.seed,
        prune: true,
        parallel: true,
    };
    let search = optimizer.search(&options).map_err(PipelineError::Infeasible)?;
    let mut analysis = Analysis {
        evidences: evidences.clone(),
        prior: prior.clone(),
        search,
        membership: None,
        existence: None,
        counts: None,
        posterior: None,
        assignment: None,
    };
    if stage == Stage::Partition {
        return Ok(analysis);
    }

    let partition = analysis.search.partition.clone();
    let membership = (0..evidences.len())
        .map(|q| assess_with(&optimizer, &partition, q, config.singleton_support))
        .collect::<Result<Vec<_>, _>>()?;

    if stage >= Stage::Posterior {
        let clusters = partition.clusters();
        let mut existence = Vec::with_capacity(clusters.len());
        for (k, members) in clusters.iter().enumerate() {
            let discounted: Vec<MassFunction<f64>> = members
                .iter()
                .map(|&q| evidences.mass_function(q).discount(membership[q].alpha(k)))
                .collect::<Result<_, _>>()
                .map_err(SpecifyError::from)?;
            let support = existence_support(k, &discounted)?;
            let against: Vec<f64> = members.iter().map(|&q| membership[q].against_home()).collect();
            existence.push(falsity_discount_existence(&support, &against));
        }
        let counts = counts_bpa(&existence);
        analysis.posterior = Some(posterior(&prior, &counts)?);
        analysis.existence = Some(existence);
        analysis.counts = Some(counts);
    }

    if stage >= Stage::Pipeline {
        let projected = partition
            .clusters()
            .iter()
            .enumerate()
            .map(|(k, members)| project_events(&evidences, k, members))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| PipelineError::TotalConflict(e.to_string()))?;
        analysis.assignment = Some(assign(&projected));
    }
    analysis.membership = Some(membership);
    Ok(analysis)
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

fn cluster_label(k: usize) -> String {
    format!("c{}", k + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub input: String,
    pub restarts: usize,
    pub seed: u64,
    pub singleton_support: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterRow {
    pub cluster: String,
    pub members: Vec<String>,
    pub conflict: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRow {
    pub clusters: usize,
    pub prior_mass: f64,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mcf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSection {
    pub clusters: Vec<ClusterRow>,
    pub domain_conflict: f64,
    pub mcf: f64,
    pub candidates: Vec<CandidateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipCell {
    pub cluster: String,
    pub against: f64,
    pub bel: f64,
    pub pls: f64,
    pub credibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipRow {
    pub evidence: String,
    pub home: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub for_home: Option<f64>,
    pub falsity: f64,
    pub clusters: Vec<MembershipCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExistenceRow {
    pub cluster: String,
    pub support: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountRow {
    pub at_least: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorRow {
    pub count: usize,
    pub prior: f64,
    pub posterior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSection {
    pub existence: Vec<ExistenceRow>,
    pub counts: Vec<CountRow>,
    pub conflict: f64,
    pub distribution: Vec<PosteriorRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventCell {
    pub event: String,
    pub bel: f64,
    pub pls: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentRow {
    pub cluster: String,
    pub event: Option<String>,
    pub events: Vec<EventCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssignmentSection {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conflict: Option<f64>,
    pub clusters: Vec<AssignmentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub evidences: usize,
    pub partition: PartitionSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<MembershipRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<PosteriorSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<AssignmentSection>,
}

impl Report {
    pub fn from_analysis(config: &RunConfig, analysis: &Analysis) -> Self {
        let ids: Vec<String> = analysis.evidences.evidences().iter().map(|e| e.id.clone()).collect();
        let search = &analysis.search;
        let partition = PartitionSection {
            clusters: search
                .partition
                .clusters()
                .iter()
                .enumerate()
                .map(|(k, members)| ClusterRow {
                    cluster: cluster_label(k),
                    members: members.iter().map(|&q| ids[q].clone()).collect(),
                    conflict: round12(search.report.per_cluster[k]),
                })
                .collect(),
            domain_conflict: round12(search.report.domain),
            mcf: round12(search.report.mcf),
            candidates: search
                .candidates
                .iter()
                .map(|c| {
                    let (status, mcf) = match &c.status {
                        CandidateStatus::Explored { best, .. } => ("explored", Some(round12(best.mcf))),
                        CandidateStatus::Pruned => ("pruned", None),
                        CandidateStatus::Unsupported => ("unsupported", None),
                    };
                    CandidateRow {
                        clusters: c.clusters,
                        prior_mass: round12(c.prior_mass),
                        status: status.into(),
                        mcf,
                    }
                })
                .collect(),
        };

        let membership = analysis.membership.as_ref().map(|rows| {
            rows.iter()
                .map(|a| MembershipRow {
                    evidence: a.evidence_id.clone(),
                    home: cluster_label(a.home),
                    for_home: a.for_home.map(round12),
                    falsity: round12(a.falsity),
                    clusters: (0..a.frame_size())
                        .map(|k| MembershipCell {
                            cluster: if k == a.clusters {
                                "new".into()
                            } else {
                                cluster_label(k)
                            },
                            against: round12(a.against[k]),
                            bel: round12(a.bel[k]),
                            pls: round12(a.pls[k]),
                            credibility: round12(a.credibility[k]),
                        })
                        .collect(),
                })
                .collect()
        });

        let posterior = match (&analysis.existence, &analysis.counts, &analysis.posterior) {
            (Some(existence), Some(counts), Some(post)) => Some(PosteriorSection {
                existence: existence
                    .iter()
                    .map(|e| ExistenceRow {
                        cluster: cluster_label(e.cluster),
                        support: round12(e.support),
                    })
                    .collect(),
                counts: counts
                    .masses
                    .iter()
                    .enumerate()
                    .map(|(r, m)| CountRow {
                        at_least: r,
                        mass: round12(*m),
                    })
                    .collect(),
                conflict: round12(post.conflict),
                distribution: analysis
                    .prior
                    .support()
                    .map(|(count, p)| PosteriorRow {
                        count,
                        prior: round12(*p),
                        posterior: round12(post.probability(count)),
                    })
                    .collect(),
            }),
            _ => None,
        };

        let assignment = analysis.assignment.as_ref().map(|result| match result {
            Ok(a) => AssignmentSection {
                status: "ok".into(),
                note: None,
                conflict: Some(round12(a.conflict)),
                clusters: (0..a.preferred.len())
                    .map(|i| AssignmentRow {
                        cluster: cluster_label(i),
                        event: a.preferred[i].map(|e| a.events.atoms()[e].clone()),
                        events: a
                            .events
                            .atoms()
                            .iter()
                            .enumerate()
                            .map(|(e, label)| EventCell {
                                event: label.clone(),
                                bel: round12(a.belief[i][e]),
                                pls: round12(a.plausibility[i][e]),
                            })
                            .collect(),
                    })
                    .collect(),
            },
            Err(e) => AssignmentSection {
                status: match e {
                    AssignError::TotalConflict => "total-conflict".into(),
                    _ => "skipped".into(),
                },
                note: Some(e.to_string()),
                conflict: matches!(e, AssignError::TotalConflict).then_some(1.0),
                clusters: Vec::new(),
            },
        });

        Report {
            tool: ToolInfo {
                name: env!("CARGO_PKG_NAME").into(),
                version: env!("CARGO_PKG_VERSION").into(),
            },
            config: ConfigEcho {
                input: config.input.display().to_string(),
                restarts: config.restarts,
                seed: config.seed,
                singleton_support: match config.singleton_support {
                    SingletonSupport::Printed => "printed".into(),
                    SingletonSupport::Complement => "complement".into(),
                },
            },
            evidences: ids.len(),
            partition,
            membership,
            posterior,
            assignment,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports always serialize");
        out.push('\n');
        out
    }

    /// Aligned-column human summary.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let p = &self.partition;
        let _ = writeln!(
            out,
            "{} evidences, {} clusters, Mcf = {}",
            self.evidences,
            p.clusters.len(),
            p.mcf
        );
        let _ = writeln!(out, "{:<8} {:>12}  members", "cluster", "conflict");
        for c in &p.clusters {
            let _ = writeln!(out, "{:<8} {:>12}  {}", c.cluster, c.conflict, c.members.join(" "));
        }
        if let Some(rows) = &self.membership {
            let _ = writeln!(
                out,
                "\n{:<10} {:<6} {:>10}  plausibility by cluster",
                "evidence", "home", "falsity"
            );
            for r in rows {
                let pls: Vec<String> = r.clusters.iter().map(|c| format!("{}={}", c.cluster, c.pls)).collect();
                let _ = writeln!(
                    out,
                    "{:<10} {:<6} {:>10}  {}",
                    r.evidence,
                    r.home,
                    r.falsity,
                    pls.join(" ")
                );
            }
        }
        if let Some(post) = &self.posterior {
            let _ = writeln!(out, "\n{:<6} {:>12} {:>12}", "count", "prior", "posterior");
            for r in &post.distribution {
                let _ = writeln!(out, "{:<6} {:>12} {:>12}", r.count, r.prior, r.posterior);
            }
        }
        if let Some(a) = &self.assignment {
            let _ = writeln!(out, "\nassignment: {}", a.status);
            for r in &a.clusters {
                let _ = writeln!(out, "{:<8} -> {}", r.cluster, r.event.as_deref().unwrap_or("-"));
            }
        }
        out
    }

    /// Writes `mcf_by_clusters.csv` and, when present, `posterior.csv`.
    pub fn write_tables(&self, dir: &Path) -> Result<(), PipelineError> {
        let fail = |path: &Path, e: &dyn std::fmt::Display| PipelineError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        std::fs::create_dir_all(dir).map_err(|e| fail(dir, &e))?;
        let path = dir.join("mcf_by_clusters.csv");
        let mut w = csv::Writer::from_path(&path).map_err(|e| fail(&path, &e))?;
        w.write_record(["clusters", "prior_mass", "status", "mcf"])
            .map_err(|e| fail(&path, &e))?;
        for row in &self.partition.candidates {
            let mcf = row.mcf.map(|m| format!("{m:?}")).unwrap_or_default();
            w.write_record([
                row.clusters.to_string(),
                format!("{:?}", row.prior_mass),
                row.status.clone(),
                mcf,
            ])
            .map_err(|e| fail(&path, &e))?;
        }
        w.flush().map_err(|e| fail(&path, &e))?;
        if let Some(post) = &self.posterior {
            let path = dir.join("posterior.csv");
            let mut w = csv::Writer::from_path(&path).map_err(|e| fail(&path, &e))?;
            for row in &post.distribution {
                w.serialize(row).map_err(|e| fail(&path, &e))?;
            }
            w.flush().map_err(|e| fail(&path, &e))?;
        }
        Ok(())
    }
}

/// Runs the stages up to `stage` and builds the report.
pub fn run(config: &RunConfig, stage: Stage) -> Result<Report, PipelineError> {
    let analysis = analyze(config, stage)?;
    Ok(Report::from_analysis(config, &analysis))
}

pub fn cmd_partition(config: &RunConfig) -> Result<Report, PipelineError> {
    run(config, Stage::Partition)
}

pub fn cmd_specify(config: &RunConfig) -> Result<Report, PipelineError> {
    run(config, Stage::Specify)
}

pub fn cmd_posterior(config: &RunConfig) -> Result<Report, PipelineError> {
    run(config, Stage::Posterior)
}

pub fn cmd_pipeline(config: &RunConfig) -> Result<Report, PipelineError> {
    run(config, Stage::Pipeline)
}

/// Writes a generated scenario to `out` and its ground truth next to it as
/// `<stem>.truth.json`. Returns the truth file path.
pub fn cmd_generate(spec: &ScenarioSpec, seed: u64, out: &Path) -> Result<PathBuf, PipelineError> {
    let scenario = generate_scenario(spec, seed)?;
    let truth_path = truth_path(out);
    let write = |path: &Path, text: String| {
        std::fs::write(path, text).map_err(|e| PipelineError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    };
    write(out, scenario.document.to_json())?;
    let mut truth = serde_json::to_string_pretty(&scenario.truth).expect("truth always serializes");
    truth.push('\n');
    write(&truth_path, truth)?;
    Ok(truth_path)
}

/// `scenario.json` → `scenario.truth.json`.
pub fn truth_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.truth.json"))
}
