use serde::{Deserialize, Serialize};

use crate::data::LabelSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub id: String,
    /// Gold label; never the negative label.
    pub label: String,
}

/// False-negative predictions: positive gold, negative prediction.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSet {
    pub seeds: Vec<Seed>,
}

impl SeedSet {
    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }
}

pub fn extract_seeds<S: AsRef<str>>(gold: &[S], pred: &[S], ids: &[S], ls: &LabelSpace) -> Result<SeedSet> {
    if gold.len() != pred.len() || gold.len() != ids.len() {
        return Err(Error::LengthMismatch {
            expected: gold.len(),
            found: if pred.len() != gold.len() {
                pred.len()
            } else {
                ids.len()
            },
        });
    }
    let mut seeds = Vec::new();
    for ((g, p), id) in gold.iter().zip(pred).zip(ids) {
        let (g, p) = (g.as_ref(), p.as_ref());
        ls.require(g)?;
        ls.require(p)?;
        if !ls.is_negative_name(g) && ls.is_negative_name(p) {
            seeds.push(Seed {
                id: id.as_ref().to_string(),
                label: g.to_string(),
            });
        }
    }
    Ok(SeedSet { seeds })
}
