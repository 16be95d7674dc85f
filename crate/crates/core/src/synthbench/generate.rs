use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Instance, LabelSpace, Split, DEFAULT_NEGATIVE};
use crate::detect::CleanSubset;
use crate::error::{Error, Result};
use crate::vecstore::EmbeddingSet;

/// Parameters of a synthetic benchmark generation.
///
/// Every positive class is a Gaussian cloud around its own mean direction;
/// negatives are clouds around further mean directions. All means lie on the
/// unit sphere, pairwise at least `class_separation · σ` apart, where `σ` is
/// the root-mean-square distance of a point from its cloud's mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub n_positive_classes: usize,
    pub per_class: usize,
    pub n_negatives: usize,
    pub dim: usize,
    pub class_separation: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidArgument("synthetic dim must be at least 2".into()));
        }
        if !(self.class_separation > 0.0 && self.class_separation.is_finite()) {
            return Err(Error::InvalidArgument("class separation must be positive".into()));
        }
        Ok(())
    }

    fn negative_centers(&self) -> usize {
        if self.n_negatives == 0 {
            return 0;
        }
        let free = (2 * self.dim).saturating_sub(self.n_positive_classes);
        free.min(self.n_negatives.div_ceil(self.per_class.max(1))).max(1)
    }
}

/// A generated dataset with its representation and geometry record.
#[derive(Debug, Clone)]
pub struct SynthData {
    pub dataset: Dataset,
    pub embeddings: EmbeddingSet,
    /// Radial within-cloud standard deviation.
    pub sigma: f64,
    /// Unit mean direction of each positive class, by label index.
    pub class_means: Vec<Vec<f64>>,
}

pub fn class_label(c: usize) -> String {
    format!("synth:c{c:02}")
}

pub fn synth_label_space(n_classes: usize) -> LabelSpace {
    LabelSpace::new(
        (0..n_classes).map(class_label).chain([DEFAULT_NEGATIVE.to_string()]),
        DEFAULT_NEGATIVE,
    )
    .expect("generated labels are unique")
}

fn placeholder(id: String, relation: String) -> Instance {
    Instance {
        id,
        tokens: ["SUBJ", "relates", "to", "OBJ"].map(String::from).to_vec(),
        subj_span: (0, 0),
        obj_span: (3, 3),
        subj_type: "ENTITY".into(),
        obj_type: "ENTITY".into(),
        relation,
        split: Split::Train,
        extra: Default::default(),
    }
}

/// Mean direction `i` of the orthoplex: `+e_i` for `i < dim`, then `-e_{i-dim}`.
fn orthoplex(i: usize, dim: usize) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    if i < dim {
        v[i] = 1.0;
    } else {
        v[i - dim] = -1.0;
    }
    v
}

pub fn generate(spec: &SynthSpec) -> Result<SynthData> {
    spec.validate()?;
    let n_neg_centers = spec.negative_centers();
    let n_centers = spec.n_positive_classes + n_neg_centers;
    if n_centers > 2 * spec.dim {
        return Err(Error::Infeasible(format!(
            "{} positive classes plus {} negative cloud(s) need {n_centers} mean directions; the orthoplex \
             packing in dim {} provides at most {} directions at pairwise distance >= sqrt(2)",
            spec.n_positive_classes,
            n_neg_centers,
            spec.dim,
            2 * spec.dim
        )));
    }
    // orthoplex directions are pairwise >= sqrt(2) apart
    let sigma = std::f64::consts::SQRT_2 / spec.class_separation;
    let per_coord = sigma / (spec.dim as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ls = synth_label_space(spec.n_positive_classes);
    let total = spec.n_positive_classes * spec.per_class + spec.n_negatives;
    let mut instances = Vec::with_capacity(total);
    let mut rows: Vec<f32> = Vec::with_capacity(total * spec.dim);
    let mut ids = Vec::with_capacity(total);

    let mut emit = |center: &[f64], label: String, rng: &mut ChaCha8Rng| {
        let id = format!("syn-{:06}", ids.len());
        for &m in center {
            let z: f64 = rng.sample(StandardNormal);
            rows.push((m + per_coord * z) as f32);
        }
        instances.push(placeholder(id.clone(), label));
        ids.push(id);
    };

    let class_means: Vec<Vec<f64>> = (0..spec.n_positive_classes).map(|c| orthoplex(c, spec.dim)).collect();
    for (c, mean) in class_means.iter().enumerate() {
        for _ in 0..spec.per_class {
            emit(mean, class_label(c), &mut rng);
        }
    }
    let neg_means: Vec<Vec<f64>> = (0..n_neg_centers)
        .map(|j| orthoplex(spec.n_positive_classes + j, spec.dim))
        .collect();
    for i in 0..spec.n_negatives {
        emit(&neg_means[i % n_neg_centers], DEFAULT_NEGATIVE.to_string(), &mut rng);
    }

    let dataset = Dataset::new(ls, instances)?;
    let embeddings = EmbeddingSet::new(ids, spec.dim, rows)?;
    Ok(SynthData {
        dataset,
        embeddings,
        sigma,
        class_means,
    })
}

/// Disjoint partition of a generated set.
#[derive(Debug, Clone)]
pub struct BenchSplit {
    pub audited: Dataset,
    pub audited_embeddings: EmbeddingSet,
    pub clean: CleanSubset,
    /// Held out for downstream scoring; may be empty.
    pub eval: Dataset,
    pub eval_embeddings: EmbeddingSet,
}

/// Stratified partition: within each label, a seeded shuffle assigns
/// `round(n · clean_fraction)` instances to the clean subset and
/// `round(n · eval_fraction)` to the evaluation slice; the rest are audited.
/// Every part keeps generation order.
pub fn partition(data: &SynthData, clean_fraction: f64, eval_fraction: f64, seed: u64) -> Result<BenchSplit> {
    if !(0.0..=1.0).contains(&clean_fraction)
        || !(0.0..=1.0).contains(&eval_fraction)
        || clean_fraction + eval_fraction > 1.0
    {
        return Err(Error::InvalidArgument(format!(
            "holdout fractions {clean_fraction} + {eval_fraction} must lie in [0, 1]"
        )));
    }
    let d = &data.dataset;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c1ea);
    // 0 = audited, 1 = clean, 2 = eval
    let mut part = vec![0u8; d.len()];
    for label in 0..d.label_space().len() {
        let mut members: Vec<usize> = (0..d.len()).filter(|&i| d.label_of(i) == label).collect();
        members.shuffle(&mut rng);
        let n = members.len() as f64;
        let n_clean = (n * clean_fraction).round() as usize;
        let n_eval = ((n * eval_fraction).round() as usize).min(members.len() - n_clean);
        for &i in &members[..n_clean] {
            part[i] = 1;
        }
        for &i in &members[n_clean..n_clean + n_eval] {
            part[i] = 2;
        }
    }
    let pick = |p: u8| -> Result<(Dataset, EmbeddingSet)> {
        let instances: Vec<Instance> = (0..d.len())
            .filter(|&i| part[i] == p)
            .map(|i| d.instances()[i].clone())
            .collect();
        let ids: Vec<&str> = instances.iter().map(|i| i.id.as_str()).collect();
        let emb = data.embeddings.select(&ids)?;
        Ok((Dataset::new(d.label_space().clone(), instances)?, emb))
    };
    let (audited, audited_embeddings) = pick(0)?;
    let (clean, clean_embeddings) = pick(1)?;
    let (eval, eval_embeddings) = pick(2)?;
    Ok(BenchSplit {
        audited,
        audited_embeddings,
        clean: CleanSubset::new(clean, &clean_embeddings)?,
        eval,
        eval_embeddings,
    })
}
