//! Instance ingestion and serialization: the instance JSON schema, edge-list
//! files, trace CSVs, run artifacts, and the constructive instance
//! generators.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::market::{
    BuildError, Desirability, HouseScoring, HouseSpec, Instance, InstanceSpec, Matching,
};
use crate::metrics::{gamma, partition_metrics, PartitionMetrics};
use crate::oracle;
use crate::solvers::{SolveTrace, TerminationReason};
use crate::stability::is_two_sided_exchange_stable;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("generator self-check failed: {0}")]
    SelfCheckFailed(String),
}

/// House entry of the instance JSON: `{id, quota, D}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseEntry {
    pub id: u32,
    pub quota: usize,
    #[serde(rename = "D")]
    pub desirability: f64,
}

/// `"objective"` or a per-student table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DesirabilitySpec {
    Mode(DesirabilityMode),
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DesirabilityMode {
    Objective,
}

impl DesirabilitySpec {
    pub fn objective() -> Self {
        Self::Mode(DesirabilityMode::Objective)
    }
}

/// `"zero"` or a per-student score table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScoringSpec {
    Mode(ScoringMode),
    Table(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoringMode {
    Zero,
}

impl ScoringSpec {
    pub fn zero() -> Self {
        Self::Mode(ScoringMode::Zero)
    }
}

/// Serializable description of an instance; the single source of truth a
/// pipeline runs from. Field order is the canonical JSON order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub students: usize,
    pub houses: Vec<HouseEntry>,
    pub edges: Vec<(usize, usize, f64)>,
    pub desirability: DesirabilitySpec,
    pub scoring: ScoringSpec,
    pub seed: u64,
}

impl InstanceConfig {
    /// Validates and builds the padded runtime instance.
    pub fn build(&self) -> Result<Instance, BuildError> {
        let houses = self
            .houses
            .iter()
            .map(|h| HouseSpec::new(h.id, h.quota, h.desirability))
            .collect();
        let desirability = match &self.desirability {
            DesirabilitySpec::Mode(DesirabilityMode::Objective) => Desirability::Objective,
            DesirabilitySpec::Table(table) => Desirability::Subjective(table.clone()),
        };
        let scoring = match &self.scoring {
            ScoringSpec::Mode(ScoringMode::Zero) => HouseScoring::Zero,
            ScoringSpec::Table(table) => HouseScoring::Additive(table.clone()),
        };
        Instance::build(InstanceSpec {
            students: self.students,
            houses,
            edges: self.edges.clone(),
            desirability,
            scoring,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Canonical byte form used for hashing and for saved files.
    pub fn to_pretty_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("config serializes");
        out.push('\n');
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        Ok(fs::write(path, self.to_pretty_json())?)
    }

    /// Hex SHA-256 of the compact JSON form; identifies the instance in run
    /// artifacts.
    pub fn hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(compact.as_bytes()))
    }
}

/// How directional duplicates in an edge-list file are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MergePolicy {
    #[default]
    Max,
    Min,
    Sum,
    Mean,
}

/// Result of loading an edge-list file: node ids compacted to a dense range,
/// directional duplicates merged, self-loops dropped.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub node_count: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub self_loops_dropped: usize,
    pub duplicates_merged: usize,
}

/// Parses whitespace-separated `u v [w]` lines; `#` lines are comments and a
/// missing weight means 1.0.
pub fn parse_edge_list<R: BufRead>(reader: R, policy: MergePolicy) -> Result<EdgeListLoad, IoError> {
    let mut raw: Vec<(u64, u64, f64)> = Vec::new();
    let mut self_loops = 0usize;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let u: u64 = parse_field(fields.next(), line_no, "source node")?;
        let v: u64 = parse_field(fields.next(), line_no, "target node")?;
        let w: f64 = match fields.next() {
            Some(tok) => tok.parse().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("bad weight `{tok}`"),
            })?,
            None => 1.0,
        };
        if fields.next().is_some() {
            return Err(IoError::Parse {
                line: line_no,
                message: "too many fields".into(),
            });
        }
        if !w.is_finite() {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("non-finite weight {w}"),
            });
        }
        if w < 0.0 {
            return Err(IoError::NegativeWeight {
                line: line_no,
                weight: w,
            });
        }
        if u == v {
            self_loops += 1;
            continue;
        }
        raw.push((u, v, w));
    }

    // compact node ids to 0..n in ascending id order
    let mut ids: Vec<u64> = raw.iter().flat_map(|&(u, v, _)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index_of = |id: u64| ids.binary_search(&id).expect("id collected above");

    let mut merged: std::collections::BTreeMap<(usize, usize), (f64, u32)> =
        std::collections::BTreeMap::new();
    let mut duplicates = 0usize;
    for (u, v, w) in raw {
        let (a, b) = (index_of(u), index_of(v));
        let key = (a.min(b), a.max(b));
        merged
            .entry(key)
            .and_modify(|(acc, count)| {
                duplicates += 1;
                *count += 1;
                match policy {
                    MergePolicy::Max => *acc = acc.max(w),
                    MergePolicy::Min => *acc = acc.min(w),
                    MergePolicy::Sum | MergePolicy::Mean => *acc += w,
                }
            })
            .or_insert((w, 1));
    }
    let edges = merged
        .into_iter()
        .map(|((u, v), (acc, count))| {
            let w = match policy {
                MergePolicy::Mean => acc / count as f64,
                _ => acc,
            };
            (u, v, w)
        })
        .collect();
    Ok(EdgeListLoad {
        node_count: ids.len(),
        edges,
        self_loops_dropped: self_loops,
        duplicates_merged: duplicates,
    })
}

fn parse_field(token: Option<&str>, line: usize, what: &str) -> Result<u64, IoError> {
    let token = token.ok_or_else(|| IoError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    token.parse().map_err(|_| IoError::Parse {
        line,
        message: format!("bad {what} `{token}`"),
    })
}

pub fn load_edge_list(path: &Path, policy: MergePolicy) -> Result<EdgeListLoad, IoError> {
    let file = fs::File::open(path)?;
    parse_edge_list(std::io::BufReader::new(file), policy)
}

/// Writes the trace table as `iter,welfare,potential,accepted` rows with
/// round-trip-exact float formatting.
pub fn write_trace_csv<W: Write>(mut out: W, trace: &SolveTrace) -> std::io::Result<()> {
    writeln!(out, "iter,welfare,potential,accepted")?;
    for record in &trace.records {
        writeln!(
            out,
            "{},{},{},{}",
            record.iteration, record.welfare, record.potential, record.accepted
        )?;
    }
    Ok(())
}

pub fn save_trace_csv(path: &Path, trace: &SolveTrace) -> Result<(), IoError> {
    let mut buffer = Vec::new();
    write_trace_csv(&mut buffer, trace)?;
    Ok(fs::write(path, buffer)?)
}

/// A matching on disk, tied to its instance by hash.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingRecord {
    pub schema_version: u32,
    pub instance_hash: String,
    pub assignment: Vec<usize>,
}

impl MatchingRecord {
    pub fn new(config: &InstanceConfig, matching: &Matching) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            instance_hash: config.hash(),
            assignment: matching.assignment().to_vec(),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Summary record of one solver run, reproducible from the hash, seed, and
/// configuration it carries.
#[derive(Debug, Clone, Serialize)]
pub struct RunArtifacts {
    pub schema_version: u32,
    pub instance_hash: String,
    pub seed: u64,
    pub algorithm: String,
    pub iterations: u64,
    pub evaluations: u64,
    pub terminated: TerminationReason,
    pub final_welfare: f64,
    pub final_potential: f64,
    pub best_welfare: f64,
    pub final_assignment: Vec<usize>,
    pub metrics: PartitionMetrics,
}

impl RunArtifacts {
    pub fn new(
        config: &InstanceConfig,
        inst: &Instance,
        algorithm: &str,
        seed: u64,
        matching: &Matching,
        trace: &SolveTrace,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            instance_hash: config.hash(),
            seed,
            algorithm: algorithm.to_string(),
            iterations: trace.records.len() as u64 - 1,
            evaluations: trace.evaluations,
            terminated: trace.terminated,
            final_welfare: crate::market::social_welfare(inst, matching),
            final_potential: crate::market::potential(inst, matching),
            best_welfare: trace.best_welfare,
            final_assignment: matching.assignment().to_vec(),
            metrics: partition_metrics(inst, matching),
        }
    }
}

/// Four students on a path, two zero-value houses of quota 2. The matching
/// pairing the path's endpoints' edges has welfare 2 and is exchange-stable,
/// while the optimal matching captures the heavy middle edge for welfare
/// `k`, so the exact price of anarchy is `k / 2`.
pub fn generate_unbounded_poa(k: f64) -> Result<InstanceConfig, GeneratorError> {
    if k.is_nan() || k <= 2.0 {
        return Err(GeneratorError::InvalidParameter(format!(
            "k must exceed 2, got {k}"
        )));
    }
    let config = InstanceConfig {
        students: 4,
        houses: vec![
            HouseEntry {
                id: 0,
                quota: 2,
                desirability: 0.0,
            },
            HouseEntry {
                id: 1,
                quota: 2,
                desirability: 0.0,
            },
        ],
        edges: vec![(0, 1, 0.5), (1, 2, k / 2.0), (2, 3, 0.5)],
        desirability: DesirabilitySpec::objective(),
        scoring: ScoringSpec::zero(),
        seed: 0,
    };
    let inst = config.build().expect("constructed config is valid");
    let summary = oracle::exact_extremes(&inst, oracle::DEFAULT_ENUMERATION_CAP)
        .expect("4 students are enumerable");
    if (summary.max_welfare - k).abs() > 1e-9 {
        return Err(GeneratorError::SelfCheckFailed(format!(
            "optimal welfare {} differs from k = {k}",
            summary.max_welfare
        )));
    }
    let bad = Matching::from_assignment(&inst, vec![0, 0, 1, 1]).expect("quota-exact");
    if !is_two_sided_exchange_stable(&inst, &bad).stable {
        return Err(GeneratorError::SelfCheckFailed(
            "the endpoint pairing is not stable".into(),
        ));
    }
    let bad_welfare = crate::market::social_welfare(&inst, &bad);
    if (bad_welfare - 2.0).abs() > 1e-9 {
        return Err(GeneratorError::SelfCheckFailed(format!(
            "stable pairing has welfare {bad_welfare}, expected 2"
        )));
    }
    if (summary.exact_poa - k / 2.0).abs() > 1e-9 {
        return Err(GeneratorError::SelfCheckFailed(format!(
            "exact price of anarchy {} differs from k/2",
            summary.exact_poa
        )));
    }
    Ok(config)
}

/// Hub column index of the tight grid construction.
pub fn tight_hub_column(m: usize) -> usize {
    m / 2
}

/// Row-major student grid: `m * m` clusters of `k` students; rows map to
/// houses under the horizontal matching.
pub fn tight_horizontal_assignment(m: usize, k: usize) -> Vec<usize> {
    (0..m * m * k).map(|s| s / (m * k)).collect()
}

/// Columns map to houses under the vertical matching.
pub fn tight_vertical_assignment(m: usize, k: usize) -> Vec<usize> {
    (0..m * m * k).map(|s| (s / k) % m).collect()
}

/// Grid instance on which the simple price-of-anarchy bound is tight: `m`
/// houses of quota `m * k`, an `m x m` grid of k-student clusters, each hub
/// cluster's students joined to every same-row student outside the cluster,
/// and the hub column's house worth `k + 1` while the rest are worthless.
///
/// The horizontal (row) matching captures every edge; the vertical (column)
/// matching cuts every edge yet is exchange-stable because the hub students
/// will not give up the valuable house.
pub fn generate_tight_example(m: usize, k: usize) -> Result<InstanceConfig, GeneratorError> {
    if m < 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "m must be at least 2, got {m}"
        )));
    }
    if k <= 2 {
        return Err(GeneratorError::InvalidParameter(format!(
            "k must exceed 2, got {k}"
        )));
    }
    let hub = tight_hub_column(m);
    let cluster = |row: usize, col: usize| -> std::ops::Range<usize> {
        let base = (row * m + col) * k;
        base..base + k
    };
    let mut edges = Vec::with_capacity(m * (m - 1) * k * k);
    for row in 0..m {
        for a in cluster(row, hub) {
            for col in 0..m {
                if col == hub {
                    continue;
                }
                for b in cluster(row, col) {
                    edges.push((a, b, 1.0));
                }
            }
        }
    }
    let houses = (0..m)
        .map(|h| HouseEntry {
            id: h as u32,
            quota: m * k,
            desirability: if h == hub { (k + 1) as f64 } else { 0.0 },
        })
        .collect();
    let config = InstanceConfig {
        students: m * m * k,
        houses,
        edges,
        desirability: DesirabilitySpec::objective(),
        scoring: ScoringSpec::zero(),
        seed: 0,
    };

    let inst = config.build().expect("constructed config is valid");
    let expected_edges = (m * (m - 1) * k * k) as f64;
    if (inst.network().total_weight() - expected_edges).abs() > 1e-9 {
        return Err(GeneratorError::SelfCheckFailed(format!(
            "edge weight {} differs from m(m-1)k^2 = {expected_edges}",
            inst.network().total_weight()
        )));
    }
    let horizontal = Matching::from_assignment(&inst, tight_horizontal_assignment(m, k))
        .expect("rows fill quotas");
    if gamma(&inst, &horizontal) != 1.0 {
        return Err(GeneratorError::SelfCheckFailed(
            "horizontal matching does not capture every edge".into(),
        ));
    }
    let vertical = Matching::from_assignment(&inst, tight_vertical_assignment(m, k))
        .expect("columns fill quotas");
    if gamma(&inst, &vertical) != 0.0 {
        return Err(GeneratorError::SelfCheckFailed(
            "vertical matching should cut every edge".into(),
        ));
    }
    if !is_two_sided_exchange_stable(&inst, &vertical).stable {
        return Err(GeneratorError::SelfCheckFailed(
            "vertical matching is not stable".into(),
        ));
    }
    Ok(config)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightModel {
    Unit,
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DesirabilityModel {
    Zero,
    UniformReal { lo: f64, hi: f64 },
    UniformInt { max: u32 },
    /// Per-student table, drawn uniformly.
    SubjectiveUniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScoringModel {
    Zero,
    AdditiveUniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuotaRule {
    /// Quotas sum exactly to the student count, remainder to early houses.
    EqualSplit,
    Explicit(Vec<usize>),
}

/// Parameters of the seeded random-instance generator.
#[derive(Debug, Clone)]
pub struct RandomInstanceSpec {
    pub students: usize,
    pub houses: usize,
    pub seed: u64,
    pub edge_probability: f64,
    pub weights: WeightModel,
    pub desirability: DesirabilityModel,
    pub scoring: ScoringModel,
    pub quotas: QuotaRule,
}

/// Erdos-Renyi style instance, fully determined by the spec's seed. Draw
/// order is fixed: edges, then house values, then score tables.
pub fn generate_random_instance(spec: &RandomInstanceSpec) -> InstanceConfig {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.students;
    let m = spec.houses;

    let quotas: Vec<usize> = match &spec.quotas {
        QuotaRule::Explicit(q) => q.clone(),
        QuotaRule::EqualSplit => {
            let base = n / m;
            let remainder = n % m;
            (0..m).map(|h| base + usize::from(h < remainder)).collect()
        }
    };

    let mut edges = Vec::new();
    for s in 0..n {
        for t in (s + 1)..n {
            if !rng.random_bool(spec.edge_probability) {
                continue;
            }
            let w = match spec.weights {
                WeightModel::Unit => 1.0,
                WeightModel::Uniform { lo, hi } => rng.random_range(lo..hi),
            };
            edges.push((s, t, w));
        }
    }

    let mut house_values = vec![0.0; m];
    let mut desirability = DesirabilitySpec::objective();
    match spec.desirability {
        DesirabilityModel::Zero => {}
        DesirabilityModel::UniformReal { lo, hi } => {
            for v in &mut house_values {
                *v = rng.random_range(lo..hi);
            }
        }
        DesirabilityModel::UniformInt { max } => {
            for v in &mut house_values {
                *v = rng.random_range(0..=max) as f64;
            }
        }
        DesirabilityModel::SubjectiveUniform { lo, hi } => {
            let table = (0..n)
                .map(|_| (0..m).map(|_| rng.random_range(lo..hi)).collect())
                .collect();
            desirability = DesirabilitySpec::Table(table);
        }
    }

    let scoring = match spec.scoring {
        ScoringModel::Zero => ScoringSpec::zero(),
        ScoringModel::AdditiveUniform { lo, hi } => ScoringSpec::Table(
            (0..n)
                .map(|_| (0..m).map(|_| rng.random_range(lo..hi)).collect())
                .collect(),
        ),
    };

    InstanceConfig {
        students: n,
        houses: quotas
            .into_iter()
            .enumerate()
            .map(|(h, quota)| HouseEntry {
                id: h as u32,
                quota,
                desirability: house_values[h],
            })
            .collect(),
        edges,
        desirability,
        scoring,
        seed: spec.seed,
    }
}
