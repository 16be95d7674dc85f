//! Independent reference implementations and random fixtures shared by the
//! integration tests. Nothing here calls into the engine's kNN, scorer or
//! detectors.
#![allow(dead_code)]

use std::collections::HashMap;

use noiseaudit::data::{Instance, LabelSpace, Split};
use noiseaudit::detect::{CleanSubset, RelabelMode, Scope};
use noiseaudit::metrics::ScoreCounts;
use noiseaudit::vecstore::EmbeddingSet;
use noiseaudit::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- kNN

/// All stored rows scored in f64, fully sorted, truncated to `k`.
pub fn knn_oracle(query: &[f32], corpus: &EmbeddingSet, k: usize) -> Vec<(usize, f64)> {
    let qn = query.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
    let mut all: Vec<(usize, f64)> = (0..corpus.len())
        .map(|i| {
            let r = corpus.row(i);
            let mut dot = 0.0f64;
            let mut rr = 0.0f64;
            for j in 0..r.len() {
                dot += f64::from(query[j]) * f64::from(r[j]);
                rr += f64::from(r[j]) * f64::from(r[j]);
            }
            (i, dot / (qn * rr.sqrt()))
        })
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

// ---------------------------------------------------------------- scorer

pub fn score_oracle(gold: &[&str], pred: &[&str], negative: &str) -> ScoreCounts {
    let mut c = ScoreCounts::default();
    for (g, p) in gold.iter().zip(pred) {
        c.total += 1;
        if g == p {
            c.correct += 1;
        }
        if *g == negative {
            c.gold_negative += 1;
            if *p == negative {
                c.correct_negative += 1;
            }
        } else {
            c.gold_positive += 1;
        }
        if *p != negative {
            c.predicted_positive += 1;
            if g == p {
                c.correct_positive += 1;
            }
        }
    }
    c
}

/// (precision, recall, f1) with the official scorer's empty-denominator rules.
pub fn prf_oracle(c: &ScoreCounts) -> (f64, f64, f64) {
    let p = if c.predicted_positive == 0 {
        1.0
    } else {
        c.correct_positive as f64 / c.predicted_positive as f64
    };
    let r = if c.gold_positive == 0 {
        0.0
    } else {
        c.correct_positive as f64 / c.gold_positive as f64
    };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

// ---------------------------------------------------------------- detectors

/// Intrinsic strategy, straight-line. Returns eliminate ids in insertion
/// order and the final relabel of each.
pub fn intrinsic_oracle(
    seeds: &[(String, String)],
    seed_emb: &EmbeddingSet,
    pool: &EmbeddingSet,
    k: usize,
) -> (Vec<String>, HashMap<String, String>) {
    let mut order = Vec::new();
    let mut best: HashMap<String, (f64, String)> = HashMap::new();
    for (id, label) in seeds {
        let q = seed_emb.get(id).unwrap();
        for (j, sim) in knn_oracle(q, pool, k) {
            let nid = pool.ids()[j].clone();
            match best.get(&nid) {
                None => {
                    order.push(nid.clone());
                    best.insert(nid, (sim, label.clone()));
                }
                Some((s, _)) if sim > *s => {
                    best.insert(nid, (sim, label.clone()));
                }
                Some(_) => {}
            }
        }
    }
    let relabel = best.into_iter().map(|(id, (_, l))| (id, l)).collect();
    (order, relabel)
}

fn clean_labels(audited_row: &[f32], clean: &CleanSubset, k: usize) -> Vec<String> {
    knn_oracle(audited_row, &clean.embeddings, k)
        .into_iter()
        .map(|(j, _)| clean.dataset.instances()[j].relation.clone())
        .collect()
}

fn in_scope(scope: Scope, ls: &LabelSpace, rel: &str) -> bool {
    match scope {
        Scope::Neg => ls.is_negative_name(rel),
        Scope::All => true,
    }
}

pub fn eliminate_oracle(
    audited: &Dataset,
    emb: &EmbeddingSet,
    clean: &CleanSubset,
    k: usize,
    scope: Scope,
) -> Vec<String> {
    let mut out = Vec::new();
    for inst in audited.instances() {
        if !in_scope(scope, audited.label_space(), &inst.relation) {
            continue;
        }
        let labels = clean_labels(emb.get(&inst.id).unwrap(), clean, k);
        let mut same = 0;
        for l in &labels {
            if *l == inst.relation {
                same += 1;
            }
        }
        if same == 0 {
            out.push(inst.id.clone());
        }
    }
    out
}

pub fn relabel_oracle(
    audited: &Dataset,
    emb: &EmbeddingSet,
    clean: &CleanSubset,
    k: usize,
    scope: Scope,
    mode: RelabelMode,
) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for inst in audited.instances() {
        if !in_scope(scope, audited.label_space(), &inst.relation) {
            continue;
        }
        let mut labels = clean_labels(emb.get(&inst.id).unwrap(), clean, k);
        if mode == RelabelMode::Pseudocode {
            labels.retain(|l| *l != inst.relation);
        }
        if labels.is_empty() {
            continue;
        }
        let first = labels[0].clone();
        let unanimous = labels.iter().all(|l| *l == first);
        if unanimous && first != inst.relation {
            out.push((inst.id.clone(), first));
        }
    }
    out
}

// ---------------------------------------------------------------- fixtures

pub fn instance(id: &str, relation: &str, split: Split) -> Instance {
    Instance {
        id: id.into(),
        tokens: vec!["e1".into(), "and".into(), "e2".into()],
        subj_span: (0, 0),
        obj_span: (2, 2),
        subj_type: "PERSON".into(),
        obj_type: "ORGANIZATION".into(),
        relation: relation.into(),
        split,
        extra: Default::default(),
    }
}

pub fn micro_labels() -> LabelSpace {
    LabelSpace::new(["A", "B", "C", "N"], "N").unwrap()
}

/// Small-integer coordinates, so duplicate points and exact similarity
/// ties are common.
pub fn grid_rows(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<f32> {
    let mut rows = Vec::with_capacity(n * dim);
    for _ in 0..n {
        loop {
            let row: Vec<f32> = (0..dim).map(|_| rng.random_range(-2i32..=2) as f32).collect();
            if row.iter().any(|&x| x != 0.0) {
                rows.extend(row);
                break;
            }
        }
    }
    rows
}

pub fn random_labels(rng: &mut ChaCha8Rng, ls: &LabelSpace, n: usize) -> Vec<String> {
    (0..n)
        .map(|_| {
            // about half negatives
            if rng.random_bool(0.5) {
                ls.negative_name().to_string()
            } else {
                let pos: Vec<usize> = ls.positives().collect();
                ls.name(pos[rng.random_range(0..pos.len())]).to_string()
            }
        })
        .collect()
}

pub struct Micro {
    pub audited: Dataset,
    pub audited_emb: EmbeddingSet,
    pub clean: CleanSubset,
}

/// An audited set and a disjoint clean set, totalling at most 50 points.
pub fn micro(seed: u64) -> Micro {
    let mut r = rng(seed);
    let ls = micro_labels();
    let dim = r.random_range(2..=3);
    let n_aud = r.random_range(4..=30);
    let n_clean = r.random_range(3..=50 - n_aud);

    let aud_ids: Vec<String> = (0..n_aud).map(|i| format!("a{i}")).collect();
    let labels = random_labels(&mut r, &ls, n_aud);
    let rows = grid_rows(&mut r, n_aud, dim);
    let audited = Dataset::new(
        ls.clone(),
        aud_ids
            .iter()
            .zip(&labels)
            .map(|(id, l)| instance(id, l, Split::Train))
            .collect(),
    )
    .unwrap();
    let audited_emb = EmbeddingSet::new(aud_ids, dim, rows).unwrap();

    let clean_ids: Vec<String> = (0..n_clean).map(|i| format!("c{i}")).collect();
    let labels = random_labels(&mut r, &ls, n_clean);
    let rows = grid_rows(&mut r, n_clean, dim);
    let clean_ds = Dataset::new(
        ls,
        clean_ids
            .iter()
            .zip(&labels)
            .map(|(id, l)| instance(id, l, Split::Test))
            .collect(),
    )
    .unwrap();
    let clean_emb = EmbeddingSet::new(clean_ids, dim, rows).unwrap();
    Micro {
        audited,
        audited_emb,
        clean: CleanSubset::new(clean_ds, &clean_emb).unwrap(),
    }
}

/// Gaussian rows with optional exact duplicates.
pub fn gaussian_corpus(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> EmbeddingSet {
    let mut rows: Vec<f32> = Vec::with_capacity(n * dim);
    for i in 0..n {
        if i > 0 && rng.random_bool(0.05) {
            let j = rng.random_range(0..i);
            let copy = rows[j * dim..(j + 1) * dim].to_vec();
            rows.extend(copy);
        } else {
            rows.extend((0..dim).map(|_| rng.sample::<f32, _>(rand_distr::StandardNormal)));
        }
    }
    let ids = (0..n).map(|i| format!("r{i}")).collect();
    EmbeddingSet::new(ids, dim, rows).unwrap()
}
