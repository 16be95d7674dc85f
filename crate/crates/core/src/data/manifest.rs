use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::dataset::Dataset;
use super::labels::LabelSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "IS")]
    Intrinsic,
    #[serde(rename = "ES-eliminate")]
    ExtrinsicEliminate,
    #[serde(rename = "ES-relabel")]
    ExtrinsicRelabel,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Intrinsic => "IS",
            Strategy::ExtrinsicEliminate => "ES-eliminate",
            Strategy::ExtrinsicRelabel => "ES-relabel",
        })
    }
}

/// Decision rule for extrinsic reannotation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelabelMode {
    /// All k neighbours share one label that differs from the instance's own.
    #[default]
    Strict,
    /// Neighbours carrying the instance's own label are discarded first; the
    /// remainder must be non-empty and unanimous.
    Pseudocode,
}

impl FromStr for RelabelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(RelabelMode::Strict),
            "pseudocode" => Ok(RelabelMode::Pseudocode),
            other => Err(Error::InvalidArgument(format!("unknown relabel mode `{other}`"))),
        }
    }
}

impl fmt::Display for RelabelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RelabelMode::Strict => "strict",
            RelabelMode::Pseudocode => "pseudocode",
        })
    }
}

/// Which audited instances an extrinsic detector examines.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Negative-labeled instances only.
    #[default]
    Neg,
    /// Every instance regardless of label.
    All,
}

impl Scope {
    pub fn admits(self, ls: &LabelSpace, relation: &str) -> bool {
        match self {
            Scope::Neg => ls.is_negative_name(relation),
            Scope::All => true,
        }
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg" => Ok(Scope::Neg),
            "all" => Ok(Scope::All),
            other => Err(Error::InvalidArgument(format!("unknown scope `{other}`"))),
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Neg => "neg",
            Scope::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub strategy: Strategy,
    pub k: usize,
    /// Where the seeds (IS) or clean anchors (ES) came from.
    pub seed_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<RelabelMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<Scope>,
    /// Free-text note on which model representation was used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<String>,
}

impl Provenance {
    pub fn new(strategy: Strategy, k: usize, seed_source: impl Into<String>) -> Self {
        Provenance {
            strategy,
            k,
            seed_source: seed_source.into(),
            mode: None,
            scope: None,
            representation: None,
        }
    }
}

/// Ids to eliminate and labels to reassign, as emitted by one detector run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseManifest {
    pub eliminate: IndexSet<String>,
    pub relabel: IndexMap<String, String>,
    pub provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    eliminate: Vec<String>,
    relabel: IndexMap<String, String>,
    provenance: Provenance,
}

impl NoiseManifest {
    pub fn new(provenance: Provenance) -> Self {
        NoiseManifest {
            eliminate: IndexSet::new(),
            relabel: IndexMap::new(),
            provenance,
        }
    }

    /// Union of eliminated and relabeled ids, eliminated first.
    pub fn detected(&self) -> IndexSet<&str> {
        self.eliminate
            .iter()
            .map(String::as_str)
            .chain(self.relabel.keys().map(String::as_str))
            .collect()
    }

    /// Structural invariants, plus label membership when a label space is given.
    pub fn validate(&self, ls: Option<&LabelSpace>) -> Result<()> {
        match self.provenance.strategy {
            Strategy::Intrinsic => {
                let keys: HashSet<&String> = self.relabel.keys().collect();
                let elim: HashSet<&String> = self.eliminate.iter().collect();
                if keys != elim {
                    return Err(Error::Manifest(
                        "IS manifest: relabel keys must equal the eliminate set".into(),
                    ));
                }
            }
            Strategy::ExtrinsicEliminate if !self.relabel.is_empty() => {
                return Err(Error::Manifest("ES-eliminate manifest carries relabel entries".into()));
            }
            Strategy::ExtrinsicRelabel if !self.eliminate.is_empty() => {
                return Err(Error::Manifest("ES-relabel manifest carries eliminate entries".into()));
            }
            _ => {}
        }
        if self.provenance.k == 0 {
            return Err(Error::Manifest("provenance k must be at least 1".into()));
        }
        if let Some(ls) = ls {
            for (id, label) in &self.relabel {
                if !ls.contains(label) {
                    return Err(Error::Manifest(format!(
                        "relabel target `{label}` for `{id}` is not in the label space"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks the manifest against the dataset it audits.
    pub fn validate_against(&self, dataset: &Dataset) -> Result<()> {
        self.validate(Some(dataset.label_space()))?;
        for id in self.detected() {
            if !dataset.contains(id) {
                return Err(Error::UnknownId(id.to_string()));
            }
        }
        if self.provenance.strategy == Strategy::ExtrinsicRelabel {
            for (id, label) in &self.relabel {
                let current = &dataset.get(id).expect("checked above").relation;
                if current == label {
                    return Err(Error::Manifest(format!(
                        "ES-relabel entry `{id}` reassigns its current label `{label}`"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let file: ManifestFile = serde_json::from_slice(bytes).map_err(|e| Error::Manifest(e.to_string()))?;
        let mut eliminate = IndexSet::with_capacity(file.eliminate.len());
        for id in file.eliminate {
            if !eliminate.insert(id) {
                let dup = eliminate.last().cloned().unwrap_or_default();
                return Err(Error::Manifest(format!(
                    "eliminate lists an id more than once (near `{dup}`)"
                )));
            }
        }
        let m = NoiseManifest {
            eliminate,
            relabel: file.relabel,
            provenance: file.provenance,
        };
        m.validate(None)?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        let file = ManifestFile {
            eliminate: self.eliminate.iter().cloned().collect(),
            relabel: self.relabel.clone(),
            provenance: self.provenance.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("manifest serialization is infallible");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }
}

pub fn write_manifest(m: &NoiseManifest, path: &Path) -> Result<()> {
    m.validate(None)?;
    fs::write(path, m.to_json()).map_err(|e| Error::io(path, e))
}

/// Reads and validates a manifest. Relabel targets are checked against
/// `ls` when one is supplied.
pub fn read_manifest(path: &Path, ls: Option<&LabelSpace>) -> Result<NoiseManifest> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let m = NoiseManifest::from_slice(&bytes).map_err(|e| e.in_file(path))?;
    m.validate(ls).map_err(|e| e.in_file(path))?;
    Ok(m)
}
