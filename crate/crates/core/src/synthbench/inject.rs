use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, NoiseManifest};
use crate::error::{Error, Result};

/// Ground truth for injected noise: each flipped id and its original label.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionLedger {
    pub noise_rate: f64,
    pub flipped: IndexMap<String, String>,
}

impl InjectionLedger {
    pub fn len(&self) -> usize {
        self.flipped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidArgument(format!("injection ledger: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        InjectionLedger::from_slice(&bytes).map_err(|e| e.in_file(path))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("ledger serialization is infallible");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Flips exactly `round(rate · n_positive)` uniformly chosen positives to the
/// negative label. Embeddings are not involved.
pub fn inject_false_negatives(d: &Dataset, rate: f64, seed: u64) -> Result<(Dataset, InjectionLedger)> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument(format!("noise rate {rate} outside [0, 1]")));
    }
    let positives: Vec<usize> = (0..d.len()).filter(|&i| !d.is_negative(i)).collect();
    let n_flip = (rate * positives.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: HashSet<usize> = rand::seq::index::sample(&mut rng, positives.len(), n_flip)
        .into_iter()
        .map(|j| positives[j])
        .collect();

    let neg = d.label_space().negative_name().to_string();
    let mut ledger = InjectionLedger {
        noise_rate: rate,
        flipped: IndexMap::with_capacity(n_flip),
    };
    let instances = d
        .instances()
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let mut inst = inst.clone();
            if chosen.contains(&i) {
                ledger
                    .flipped
                    .insert(inst.id.clone(), std::mem::replace(&mut inst.relation, neg.clone()));
            }
            inst
        })
        .collect();
    Ok((Dataset::new(d.label_space().clone(), instances)?, ledger))
}

/// Detection quality of one manifest against injected ground truth.
/// Undefined ratios (empty denominators) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub injected: usize,
    pub detected: usize,
    pub true_positive: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    /// Detected-and-injected ids that carry a relabel entry.
    pub relabel_evaluated: usize,
    /// Share of those whose relabel target is the original label.
    pub label_accuracy: Option<f64>,
}

pub fn evaluate_detection(ledger: &InjectionLedger, m: &NoiseManifest) -> DetectionReport {
    let detected = m.detected();
    let hits: Vec<&str> = detected
        .iter()
        .copied()
        .filter(|id| ledger.flipped.contains_key(*id))
        .collect();
    let relabeled: Vec<&str> = hits.iter().copied().filter(|id| m.relabel.contains_key(*id)).collect();
    let correct = relabeled
        .iter()
        .filter(|id| m.relabel[**id] == ledger.flipped[**id])
        .count();
    let ratio = |a: usize, b: usize| (b > 0).then(|| a as f64 / b as f64);
    DetectionReport {
        injected: ledger.len(),
        detected: detected.len(),
        true_positive: hits.len(),
        precision: ratio(hits.len(), detected.len()),
        recall: ratio(hits.len(), ledger.len()),
        relabel_evaluated: relabeled.len(),
        label_accuracy: ratio(correct, relabeled.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Instance, LabelSpace, Provenance, Split, Strategy};

    fn positives(n: usize) -> Dataset {
        let ls = LabelSpace::new(["A", "B", "N"], "N").unwrap();
        let instances = (0..n)
            .map(|i| Instance {
                id: format!("p{i}"),
                tokens: vec!["a".into(), "b".into()],
                subj_span: (0, 0),
                obj_span: (1, 1),
                subj_type: "X".into(),
                obj_type: "Y".into(),
                relation: if i % 2 == 0 { "A" } else { "B" }.into(),
                split: Split::Train,
                extra: Default::default(),
            })
            .collect();
        Dataset::new(ls, instances).unwrap()
    }

    #[test]
    fn rate_bounds() {
        let d = positives(100);
        let (same, ledger) = inject_false_negatives(&d, 0.0, 1).unwrap();
        assert_eq!(same, d);
        assert!(ledger.is_empty());

        let (noisy, ledger) = inject_false_negatives(&d, 0.1, 1).unwrap();
        assert_eq!(ledger.len(), 10);
        assert_eq!(noisy.split_counts().train.negative, 10);
        for (id, orig) in &ledger.flipped {
            assert_eq!(noisy.get(id).unwrap().relation, "N");
            assert_eq!(&d.get(id).unwrap().relation, orig);
        }

        let (all, _) = inject_false_negatives(&d, 1.0, 1).unwrap();
        assert_eq!(all.split_counts().train.positive, 0);
        assert!(inject_false_negatives(&d, 1.5, 1).is_err());
    }

    fn ledger(ids: &[&str]) -> InjectionLedger {
        InjectionLedger {
            noise_rate: 0.1,
            flipped: ids.iter().map(|s| (s.to_string(), "A".to_string())).collect(),
        }
    }

    #[test]
    fn set_arithmetic() {
        let mut m = NoiseManifest::new(Provenance::new(Strategy::ExtrinsicEliminate, 5, "x"));
        m.eliminate.extend(["b", "c", "d"].map(String::from));
        let r = evaluate_detection(&ledger(&["a", "b", "c"]), &m);
        assert_eq!(r.precision, Some(2.0 / 3.0));
        assert_eq!(r.recall, Some(2.0 / 3.0));
        assert_eq!(r.label_accuracy, None);

        let mut exact = NoiseManifest::new(Provenance::new(Strategy::ExtrinsicEliminate, 5, "x"));
        exact.eliminate.extend(["a", "b", "c"].map(String::from));
        let r = evaluate_detection(&ledger(&["a", "b", "c"]), &exact);
        assert_eq!((r.precision, r.recall), (Some(1.0), Some(1.0)));

        let empty = NoiseManifest::new(Provenance::new(Strategy::ExtrinsicEliminate, 5, "x"));
        let r = evaluate_detection(&ledger(&["a"]), &empty);
        assert_eq!((r.precision, r.recall), (None, Some(0.0)));
    }

    #[test]
    fn label_accuracy_over_relabels() {
        let mut m = NoiseManifest::new(Provenance::new(Strategy::ExtrinsicRelabel, 5, "x"));
        m.relabel.insert("a".into(), "A".into());
        m.relabel.insert("b".into(), "B".into());
        m.relabel.insert("z".into(), "A".into());
        let r = evaluate_detection(&ledger(&["a", "b"]), &m);
        assert_eq!(r.relabel_evaluated, 2);
        assert_eq!(r.label_accuracy, Some(0.5));
    }
}
