use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_NEGATIVE: &str = "no_relation";

/// Ordered label names with one designated negative label.
///
/// A label's index is its position in the list and never changes for the
/// lifetime of the value.
#[derive(Debug, Clone)]
pub struct LabelSpace {
    labels: Vec<String>,
    negative: usize,
    index: HashMap<String, usize>,
}

impl PartialEq for LabelSpace {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.negative == other.negative
    }
}

impl Eq for LabelSpace {}

impl LabelSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>, negative: &str) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, name) in labels.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::LabelSpace(format!("label {i} is empty")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::LabelSpace(format!("label `{name}` listed twice")));
            }
        }
        let negative = *index
            .get(negative)
            .ok_or_else(|| Error::LabelSpace(format!("negative label `{negative}` is not in the label list")))?;
        Ok(LabelSpace {
            labels,
            negative,
            index,
        })
    }

    /// Parses the plain-text label file: one label per line, with an optional
    /// leading `negative=<name>` line. Blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty()).peekable();
        let mut negative = DEFAULT_NEGATIVE.to_string();
        if let Some(first) = lines.peek() {
            if let Some(name) = first.strip_prefix("negative=") {
                negative = name.trim().to_string();
                lines.next();
            }
        }
        LabelSpace::new(lines, &negative)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        LabelSpace::parse(&text).map_err(|e| e.in_file(path))
    }

    /// Serialized form accepted by [`LabelSpace::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("negative={}\n", self.negative_name());
        for l in &self.labels {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn name(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Like [`index_of`](Self::index_of) but an unknown name is an error.
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn negative_index(&self) -> usize {
        self.negative
    }

    pub fn negative_name(&self) -> &str {
        &self.labels[self.negative]
    }

    pub fn is_negative(&self, index: usize) -> bool {
        index == self.negative
    }

    pub fn is_negative_name(&self, name: &str) -> bool {
        name == self.negative_name()
    }

    /// Indices of every non-negative label, in order.
    pub fn positives(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels.len()).filter(move |&i| i != self.negative)
    }

    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.require(n.as_ref())).collect()
    }
}
