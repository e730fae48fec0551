//! A linear maximum-margin classifier for candidate URLs.
//!
//! Ten features in, one bit out: does this URL invoke the API? The model
//! is a plain linear SVM trained by subgradient descent on the hinge loss
//! with L2 regularization (the Pegasos schedule). Training is written out
//! by hand rather than delegated to a library so that results are
//! bit-reproducible: a fixed seed drives the only source of randomness
//! (example shuffling), and identical inputs yield byte-identical model
//! files.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Page;
use crate::harvest::{self, FeatureVector, ProbeResult, FEATURE_ORDER};
use crate::{Error, Result};

pub const DEFAULT_EPOCHS: usize = 200;
pub const DEFAULT_REG: f64 = 0.01;
pub const DEFAULT_SEED: u64 = 42;

/// A trained linear model plus the feature standardization it was trained
/// under. Prediction applies the stored standardization to raw features —
/// callers never pre-scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub feature_order: Vec<String>,
}

impl LinearModel {
    /// Decision value for raw features; > 0 means "API call".
    fn decision(&self, features: FeatureVector) -> f64 {
        let x = features.to_array();
        let mut z = self.bias;
        for (d, &xd) in x.iter().enumerate() {
            z += self.weights[d] * (xd - self.means[d]) / self.scales[d];
        }
        z
    }

    /// Serialize deterministically (fixed field order, two-space indent,
    /// trailing newline).
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<LinearModel> {
        let model: LinearModel =
            serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &FsPath) -> Result<LinearModel> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
        LinearModel::from_json(&text)
    }

    pub fn save(&self, path: &FsPath) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        let n = FEATURE_ORDER.len();
        if self.weights.len() != n || self.means.len() != n || self.scales.len() != n {
            return Err(Error::Model(format!(
                "expected {n} dimensions, found {}/{}/{}",
                self.weights.len(),
                self.means.len(),
                self.scales.len()
            )));
        }
        if self.scales.iter().any(|s| *s <= 0.0) {
            return Err(Error::Model("feature scales must be strictly positive".into()));
        }
        if self.feature_order != FEATURE_ORDER {
            return Err(Error::Model(
                "model feature order does not match this build's feature order".into(),
            ));
        }
        Ok(())
    }
}

/// One training observation.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub features: FeatureVector,
    /// True = the URL is a web API call.
    pub label: bool,
}

/// Train a linear SVM.
///
/// Features are standardized (mean 0, unit scale; constant dimensions get
/// scale 1 so they contribute nothing). The weight vector follows the
/// Pegasos update: learning rate `1/(reg·t)`, L2 shrink every step, hinge
/// subgradient on margin violations. The bias rides along unregularized.
pub fn train(
    examples: &[LabeledExample],
    epochs: usize,
    reg: f64,
    seed: u64,
) -> Result<LinearModel> {
    if epochs == 0 || reg <= 0.0 {
        return Err(Error::InvalidInput(
            "training needs epochs ≥ 1 and a positive regularization strength".into(),
        ));
    }
    let n = examples.len();
    let positives = examples.iter().filter(|e| e.label).count();
    if positives == 0 || positives == n {
        return Err(Error::SingleClass);
    }
    let dims = FEATURE_ORDER.len();

    let raw: Vec<[f64; 10]> = examples.iter().map(|e| e.features.to_array()).collect();
    let mut means = vec![0.0; dims];
    for x in &raw {
        for d in 0..dims {
            means[d] += x[d];
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut scales = vec![0.0; dims];
    for x in &raw {
        for d in 0..dims {
            let c = x[d] - means[d];
            scales[d] += c * c;
        }
    }
    for s in &mut scales {
        *s = (*s / n as f64).sqrt();
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let xs: Vec<Vec<f64>> = raw
        .iter()
        .map(|x| (0..dims).map(|d| (x[d] - means[d]) / scales[d]).collect())
        .collect();
    let ys: Vec<f64> = examples
        .iter()
        .map(|e| if e.label { 1.0 } else { -1.0 })
        .collect();

    let mut w = vec![0.0; dims];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: u64 = 0;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let lr = 1.0 / (reg * t as f64);
            let mut z = b;
            for (d, wd) in w.iter().enumerate() {
                z += wd * xs[i][d];
            }
            let violated = ys[i] * z < 1.0;
            let shrink = 1.0 - lr * reg;
            for wd in &mut w {
                *wd *= shrink;
            }
            if violated {
                for (d, wd) in w.iter_mut().enumerate() {
                    *wd += lr * ys[i] * xs[i][d];
                }
                b += lr * ys[i];
            }
        }
    }

    Ok(LinearModel {
        weights: w,
        bias: b,
        means,
        scales,
        feature_order: FEATURE_ORDER.iter().map(|s| s.to_string()).collect(),
    })
}

/// True iff the model scores the (raw) features strictly above zero.
pub fn predict(model: &LinearModel, features: FeatureVector) -> bool {
    model.decision(features) > 0.0
}

/// Deterministic stratified fold assignment: positives and negatives are
/// shuffled separately by one seeded generator and dealt round-robin.
/// Falls back to an unstratified deal (with a warning) when there are
/// fewer positives than folds.
fn fold_assignments(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let n = labels.len();
    let mut assignment = vec![0usize; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positives: Vec<usize> = (0..n).filter(|&i| labels[i]).collect();
    if positives.len() < folds {
        log::warn!(
            "only {} positive examples for {folds} folds; using unstratified folds",
            positives.len()
        );
        let mut all: Vec<usize> = (0..n).collect();
        all.shuffle(&mut rng);
        for (i, &idx) in all.iter().enumerate() {
            assignment[idx] = i % folds;
        }
        return assignment;
    }
    let negatives: Vec<usize> = (0..n).filter(|&i| !labels[i]).collect();
    let mut pos = positives;
    let mut neg = negatives;
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    for (i, &idx) in pos.iter().enumerate() {
        assignment[idx] = i % folds;
    }
    for (i, &idx) in neg.iter().enumerate() {
        assignment[idx] = i % folds;
    }
    assignment
}

/// K-fold cross-validation with the default training parameters.
///
/// Returns `(accuracy, f1)` pooled over all held-out folds; F1 is the
/// harmonic mean of precision and recall for the positive class.
pub fn cross_validate(
    examples: &[LabeledExample],
    folds: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if folds < 2 {
        return Err(Error::InvalidInput("cross-validation needs at least 2 folds".into()));
    }
    if examples.len() < folds {
        return Err(Error::InvalidInput(format!(
            "cannot split {} examples into {folds} folds",
            examples.len()
        )));
    }
    let labels: Vec<bool> = examples.iter().map(|e| e.label).collect();
    let assignment = fold_assignments(&labels, folds, seed);

    let mut correct = 0usize;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for fold in 0..folds {
        let train_set: Vec<LabeledExample> = examples
            .iter()
            .zip(&assignment)
            .filter(|(_, &a)| a != fold)
            .map(|(e, _)| e.clone())
            .collect();
        let model = train(&train_set, DEFAULT_EPOCHS, DEFAULT_REG, seed)?;
        for (example, _) in examples.iter().zip(&assignment).filter(|(_, &a)| a == fold) {
            let predicted = predict(&model, example.features);
            if predicted == example.label {
                correct += 1;
            }
            match (predicted, example.label) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
    }
    let total = examples.len();
    let accuracy = correct as f64 / total as f64;
    let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
    let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok((accuracy, f1))
}

/// Join a labels CSV (`page,url,label`) against the candidates harvested
/// from the corpus pages. `page` is the file path relative to the corpus
/// directory; a row labels every occurrence context of that URL on that
/// page. Rows that match no candidate are reported as warnings — typos in
/// hand-written label files are otherwise painful to spot.
pub fn load_labeled_examples(pages: &[Page], labels_path: &FsPath) -> Result<Vec<LabeledExample>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(labels_path)
        .map_err(|e| Error::Labels(format!("cannot read {}: {e}", labels_path.display())))?;
    {
        let headers = reader
            .headers()
            .map_err(|e| Error::Labels(e.to_string()))?;
        let expected = ["page", "url", "label"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Labels(format!(
                "expected header page,url,label, found {:?}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
    }
    let mut labels: BTreeMap<(String, String), bool> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Labels(e.to_string()))?;
        if record.len() != 3 {
            return Err(Error::Labels(format!("malformed row: {record:?}")));
        }
        let label = match &record[2] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Labels(format!(
                    "label must be 0 or 1, found {other:?}"
                )))
            }
        };
        labels.insert((record[0].to_string(), record[1].to_string()), label);
    }
    if labels.is_empty() {
        return Err(Error::Labels("label file contains no rows".into()));
    }

    let mut matched: BTreeMap<(String, String), bool> = BTreeMap::new();
    let mut examples = Vec::new();
    for page in pages {
        let rel = page
            .url
            .strip_prefix("file:///")
            .unwrap_or(&page.url)
            .to_string();
        for candidate in harvest::extract_candidates(page) {
            let key = (rel.clone(), candidate.raw.clone());
            let Some(&label) = labels.get(&key) else {
                continue;
            };
            matched.insert(key, true);
            examples.push(LabeledExample {
                features: harvest::featurize(&candidate, ProbeResult::NotProbed),
                label,
            });
        }
    }
    for key in labels.keys() {
        if !matched.contains_key(key) {
            log::warn!("label row matched no candidate: {},{}", key.0, key.1);
        }
    }
    if examples.is_empty() {
        return Err(Error::Labels(
            "no label row matched any harvested candidate".into(),
        ));
    }
    Ok(examples)
}
