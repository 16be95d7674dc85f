use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::labels::LabelSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidArgument(format!("unknown split `{other}`"))),
        }
    }
}

/// One labeled sentence with a subject and object span. Spans are inclusive
/// token ranges, exactly as in the source schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: String,
    pub tokens: Vec<String>,
    pub subj_span: (usize, usize),
    pub obj_span: (usize, usize),
    pub subj_type: String,
    pub obj_type: String,
    pub relation: String,
    pub split: Split,
    /// Source fields outside the core schema, kept in source order so that
    /// rewritten files carry them through untouched.
    pub extra: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    relation: String,
    token: Vec<String>,
    subj_start: usize,
    subj_end: usize,
    obj_start: usize,
    obj_end: usize,
    subj_type: String,
    obj_type: String,
    #[serde(flatten)]
    extra: Map<String, Value>,
}

impl Instance {
    fn from_record(r: Record, split: Split) -> Self {
        Instance {
            id: r.id,
            tokens: r.token,
            subj_span: (r.subj_start, r.subj_end),
            obj_span: (r.obj_start, r.obj_end),
            subj_type: r.subj_type,
            obj_type: r.obj_type,
            relation: r.relation,
            split,
            extra: r.extra,
        }
    }

    fn to_record(&self) -> Record {
        Record {
            id: self.id.clone(),
            relation: self.relation.clone(),
            token: self.tokens.clone(),
            subj_start: self.subj_span.0,
            subj_end: self.subj_span.1,
            obj_start: self.obj_span.0,
            obj_end: self.obj_span.1,
            subj_type: self.subj_type.clone(),
            obj_type: self.obj_type.clone(),
            extra: self.extra.clone(),
        }
    }

    /// One JSON line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("record serialization is infallible")
    }

    fn check(&self, ls: &LabelSpace) -> Result<()> {
        let n = self.tokens.len();
        for (name, (start, end)) in [("subj", self.subj_span), ("obj", self.obj_span)] {
            if start > end || end >= n {
                return Err(Error::InvalidArgument(format!(
                    "instance `{}`: {name} span ({start}, {end}) outside {n} tokens",
                    self.id
                )));
            }
        }
        ls.require(&self.relation)?;
        Ok(())
    }
}

/// An ordered collection of instances across one or more splits, all
/// labeled within a single label space.
#[derive(Debug, Clone)]
pub struct Dataset {
    label_space: LabelSpace,
    instances: Vec<Instance>,
    index: HashMap<String, usize>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.label_space == other.label_space && self.instances == other.instances
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub positive: usize,
    pub negative: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: Counts,
    pub dev: Counts,
    pub test: Counts,
}

impl SplitCounts {
    pub fn get(&self, split: Split) -> &Counts {
        match split {
            Split::Train => &self.train,
            Split::Dev => &self.dev,
            Split::Test => &self.test,
        }
    }

    fn get_mut(&mut self, split: Split) -> &mut Counts {
        match split {
            Split::Train => &mut self.train,
            Split::Dev => &mut self.dev,
            Split::Test => &mut self.test,
        }
    }
}

impl Dataset {
    pub fn new(label_space: LabelSpace, instances: Vec<Instance>) -> Result<Self> {
        let mut index = HashMap::with_capacity(instances.len());
        for (i, inst) in instances.iter().enumerate() {
            inst.check(&label_space)?;
            if index.insert(inst.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(inst.id.clone()));
            }
        }
        Ok(Dataset {
            label_space,
            instances,
            index,
        })
    }

    pub fn empty(label_space: LabelSpace) -> Self {
        Dataset {
            label_space,
            instances: Vec::new(),
            index: HashMap::new(),
        }
    }

    /// Parses one split from bytes. Accepts JSON Lines or a single JSON
    /// array of records.
    pub fn parse(bytes: &[u8], split: Split, label_space: &LabelSpace) -> Result<Self> {
        let instances = parse_instances(bytes, split, label_space)?;
        let mut index = HashMap::with_capacity(instances.len());
        for (i, (line, inst)) in instances.iter().enumerate() {
            if index.insert(inst.id.clone(), i).is_some() {
                return Err(Error::Record {
                    line: *line,
                    source: Box::new(Error::DuplicateId(inst.id.clone())),
                });
            }
        }
        Ok(Dataset {
            label_space: label_space.clone(),
            instances: instances.into_iter().map(|(_, inst)| inst).collect(),
            index,
        })
    }

    /// Appends `other`'s instances. Ids must stay unique across both.
    pub fn extend(&mut self, other: Dataset) -> Result<()> {
        if other.label_space != self.label_space {
            return Err(Error::LabelSpace(
                "cannot merge datasets over different label spaces".into(),
            ));
        }
        for inst in other.instances {
            if self.index.contains_key(&inst.id) {
                return Err(Error::DuplicateId(inst.id));
            }
            self.index.insert(inst.id.clone(), self.instances.len());
            self.instances.push(inst);
        }
        Ok(())
    }

    pub fn label_space(&self) -> &LabelSpace {
        &self.label_space
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Instance> {
        self.index.get(id).map(|&i| &self.instances[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Label index of instance `i`.
    pub fn label_of(&self, i: usize) -> usize {
        self.label_space
            .index_of(&self.instances[i].relation)
            .expect("relations are validated on construction")
    }

    pub fn is_negative(&self, i: usize) -> bool {
        self.label_space.is_negative_name(&self.instances[i].relation)
    }

    pub fn splits(&self) -> Vec<Split> {
        Split::ALL
            .into_iter()
            .filter(|s| self.instances.iter().any(|i| i.split == *s))
            .collect()
    }

    pub fn split_counts(&self) -> SplitCounts {
        let mut counts = SplitCounts::default();
        for inst in &self.instances {
            let c = counts.get_mut(inst.split);
            c.total += 1;
            if self.label_space.is_negative_name(&inst.relation) {
                c.negative += 1;
            } else {
                c.positive += 1;
            }
        }
        counts
    }

    /// JSON Lines serialization of one split (or all instances when `split`
    /// is `None`), in dataset order.
    pub fn to_jsonl(&self, split: Option<Split>) -> String {
        let mut out = String::new();
        for inst in self.instances.iter().filter(|i| split.is_none_or(|s| i.split == s)) {
            out.push_str(&inst.to_json_line());
            out.push('\n');
        }
        out
    }

    pub fn write_split(&self, split: Split, path: &Path) -> Result<()> {
        fs::write(path, self.to_jsonl(Some(split))).map_err(|e| Error::io(path, e))
    }

    pub fn into_parts(self) -> (LabelSpace, Vec<Instance>) {
        (self.label_space, self.instances)
    }
}

fn parse_instances(bytes: &[u8], split: Split, ls: &LabelSpace) -> Result<Vec<(usize, Instance)>> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        Error::Malformed {
            line,
            message: "invalid UTF-8".into(),
        }
    })?;
    let finish = |line: usize, record: Record| -> Result<(usize, Instance)> {
        let inst = Instance::from_record(record, split);
        inst.check(ls).map_err(|e| Error::Record {
            line,
            source: Box::new(e),
        })?;
        Ok((line, inst))
    };

    if text.trim_start().starts_with('[') {
        let values: Vec<Value> = serde_json::from_str(text).map_err(|e| Error::Malformed {
            line: e.line(),
            message: e.to_string(),
        })?;
        return values
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let record: Record = serde_json::from_value(v).map_err(|e| Error::Malformed {
                    line: i + 1,
                    message: format!("array record {}: {e}", i + 1),
                })?;
                finish(i + 1, record)
            })
            .collect();
    }

    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(line).map_err(|e| Error::Malformed {
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(finish(i + 1, record)?);
    }
    Ok(out)
}

/// Loads one split file.
pub fn load_dataset(path: &Path, split: Split, label_space: &LabelSpace) -> Result<Dataset> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Dataset::parse(&bytes, split, label_space).map_err(|e| e.in_file(path))
}

/// Loads several split files into one dataset, in the order given.
pub fn load_splits(files: &[(Split, &Path)], label_space: &LabelSpace) -> Result<Dataset> {
    let mut data = Dataset::empty(label_space.clone());
    for &(split, path) in files {
        let part = load_dataset(path, split, label_space)?;
        data.extend(part).map_err(|e| e.in_file(path))?;
    }
    Ok(data)
}
