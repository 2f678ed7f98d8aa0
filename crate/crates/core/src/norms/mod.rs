//! Glasgow Norm ratings and the embedding-based regressors.
//!
//! One single-hidden-layer MLP is trained per dimension on PCA-reduced word
//! vectors against ratings normalized to [0, 1]. Known words resolve by
//! lookup; unseen words go through the trained model.

pub mod mlp;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{embed, fit_pca, project, EmbeddingTable, Projection, SubwordModel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::stats;
use mlp::{Mlp, MlpGradients};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// The three rated dimensions this pipeline uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormKind {
    Imag,
    Cnc,
    Val,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::Imag, NormKind::Cnc, NormKind::Val];

    pub fn label(self) -> &'static str {
        match self {
            NormKind::Imag => "IMAG",
            NormKind::Cnc => "CNC",
            NormKind::Val => "VAL",
        }
    }

    pub fn from_label(label: &str) -> Option<NormKind> {
        match label.to_ascii_uppercase().as_str() {
            "IMAG" => Some(NormKind::Imag),
            "CNC" => Some(NormKind::Cnc),
            "VAL" => Some(NormKind::Val),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        match self {
            NormKind::Imag => 0,
            NormKind::Cnc => 1,
            NormKind::Val => 2,
        }
    }
}

impl std::fmt::Display for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A rated dimension together with its rating-scale bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormDimension<T> {
    pub kind: NormKind,
    pub scale_min: T,
    pub scale_max: T,
}

impl<T: Real> NormDimension<T> {
    /// Rating-scale defaults: [1, 7] for IMAG/CNC, [1, 9] for VAL.
    pub fn with_default_bounds(kind: NormKind) -> Self {
        let scale_max = match kind {
            NormKind::Imag | NormKind::Cnc => T::real(7.0),
            NormKind::Val => T::real(9.0),
        };
        NormDimension {
            kind,
            scale_min: T::one(),
            scale_max,
        }
    }
}

/// Map raw ratings linearly onto [0, 1].
pub fn normalize<T: Real>(raw: T, d: &NormDimension<T>) -> Result<T> {
    if raw < d.scale_min || raw > d.scale_max {
        return Err(Error::Stats(format!(
            "rating {raw} outside [{}, {}] for {}",
            d.scale_min, d.scale_max, d.kind
        )));
    }
    Ok((raw - d.scale_min) / (d.scale_max - d.scale_min))
}

/// Word-to-rating table for the three dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct NormDataset<T> {
    entries: BTreeMap<String, [T; 3]>,
    dims: [NormDimension<T>; 3],
}

impl<T: Real> NormDataset<T> {
    pub fn from_entries(
        entries: BTreeMap<String, [T; 3]>,
        dims: [NormDimension<T>; 3],
    ) -> Result<Self> {
        for (word, ratings) in &entries {
            for (dim, raw) in dims.iter().zip(ratings) {
                normalize(*raw, dim)
                    .map_err(|e| Error::Stats(format!("word {word:?}: {e}")))?;
            }
        }
        Ok(NormDataset { entries, dims })
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn sorted_words(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn rating(&self, word: &str, kind: NormKind) -> Option<T> {
        self.entries.get(word).map(|r| r[kind.slot()])
    }

    pub fn dimension(&self, kind: NormKind) -> &NormDimension<T> {
        &self.dims[kind.slot()]
    }

    /// Replace the scale bounds with the observed per-dimension min/max.
    pub fn with_observed_bounds(mut self) -> Self {
        for kind in NormKind::ALL {
            let slot = kind.slot();
            let mut lo = T::infinity();
            let mut hi = T::neg_infinity();
            for ratings in self.entries.values() {
                lo = lo.min(ratings[slot]);
                hi = hi.max(ratings[slot]);
            }
            if lo < hi {
                self.dims[slot].scale_min = lo;
                self.dims[slot].scale_max = hi;
            }
        }
        self
    }
}

/// Which file columns hold the word and the three mean ratings.
#[derive(Clone, Debug)]
pub struct ColumnMap {
    pub word: String,
    pub imag: String,
    pub cnc: String,
    pub val: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            word: "word".into(),
            imag: "imag".into(),
            cnc: "cnc".into(),
            val: "val".into(),
        }
    }
}

/// Load a ratings file (CSV with a header row). Words are lowercased with
/// any parenthetical sense marker stripped ("bar (pub)" keys as "bar");
/// the first occurrence of a word wins. Rows with an empty word cell are
/// skipped.
pub fn load_glasgow<T: Real>(path: &Path, columns: &ColumnMap) -> Result<NormDataset<T>> {
    let dims = [
        NormDimension::with_default_bounds(NormKind::Imag),
        NormDimension::with_default_bounds(NormKind::Cnc),
        NormDimension::with_default_bounds(NormKind::Val),
    ];
    let norms_err = |msg: String| Error::Norms {
        path: path.to_path_buf(),
        msg,
    };

    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| norms_err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| norms_err(e.to_string()))?.clone();
    let find = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| norms_err(format!("missing column {name:?}")))
    };
    let word_col = find(&columns.word)?;
    let rating_cols = [find(&columns.imag)?, find(&columns.cnc)?, find(&columns.val)?];

    let mut entries: BTreeMap<String, [T; 3]> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| norms_err(e.to_string()))?;
        let row = record.position().map_or(0, |p| p.line());
        let raw_word = record.get(word_col).unwrap_or("").trim();
        if raw_word.is_empty() {
            continue;
        }
        let word = raw_word
            .split('(')
            .next()
            .unwrap_or(raw_word)
            .trim()
            .to_lowercase();
        if word.is_empty() || entries.contains_key(&word) {
            continue;
        }
        let mut ratings = [T::zero(); 3];
        for (slot, &col) in rating_cols.iter().enumerate() {
            let cell = record
                .get(col)
                .ok_or_else(|| norms_err(format!("row {row}: missing rating cell")))?
                .trim();
            let value: f64 = cell.parse().map_err(|_| {
                norms_err(format!("row {row}: unparseable rating {cell:?}"))
            })?;
            let value = T::real(value);
            normalize(value, &dims[slot])
                .map_err(|e| norms_err(format!("row {row}: {e}")))?;
            ratings[slot] = value;
        }
        entries.insert(word, ratings);
    }
    NormDataset::from_entries(entries, dims)
}

/// Deterministic 8:1:1 partition of a word list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

pub fn split_811(words: &[String], seed: u64) -> Result<Split> {
    let n = words.len();
    if n < 10 {
        return Err(Error::Stats(format!("need at least 10 words to split, got {n}")));
    }
    let mut shuffled = words.to_vec();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);
    let n_train = n * 8 / 10;
    let n_dev = n / 10;
    let dev_end = n_train + n_dev;
    Ok(Split {
        train: shuffled[..n_train].to_vec(),
        dev: shuffled[n_train..dev_end].to_vec(),
        test: shuffled[dev_end..].to_vec(),
    })
}

/// Training hyperparameters.
#[derive(Clone, Debug)]
pub struct Hyper {
    /// PCA target dimension fed to the MLP.
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Epochs without dev improvement before stopping.
    pub patience: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            input_dim: 100,
            hidden_dim: 64,
            batch_size: 32,
            learning_rate: 0.05,
            max_epochs: 500,
            patience: 25,
        }
    }
}

/// A trained per-dimension regressor with its projection and provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormModel<T> {
    pub dimension: NormDimension<T>,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub train_seed: u64,
    pub projection: Projection<T>,
    pub mlp: Mlp<T>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile<T> {
    format_version: u32,
    model: NormModel<T>,
}

pub fn model_file_name(kind: NormKind) -> String {
    format!("{}.json", kind.label().to_lowercase())
}

pub fn save_model<T: Real + Serialize>(model: &NormModel<T>, path: &Path) -> Result<()> {
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_string_pretty(&file).expect("model serializes");
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model<T: Real + for<'de> Deserialize<'de>>(path: &Path) -> Result<NormModel<T>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: ModelFile<T> = serde_json::from_str(&raw).map_err(|e| Error::Model {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::Model {
            path: path.to_path_buf(),
            msg: format!("unsupported format version {}", file.format_version),
        });
    }
    Ok(file.model)
}

/// Dev-set state recorded whenever early stopping accepts a new best epoch.
#[derive(Clone, Copy, Debug)]
pub struct Checkpoint<T> {
    pub epoch: usize,
    pub dev_pearson: T,
    pub dev_mse: T,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub model: NormModel<T>,
    /// Words per subset dropped because no vector was derivable.
    pub dropped: [usize; 3],
    pub checkpoints: Vec<Checkpoint<T>>,
    pub epochs_run: usize,
}

fn projected_samples<T: Real>(
    words: &[String],
    dataset: &NormDataset<T>,
    table: &EmbeddingTable<T>,
    sw: Option<&SubwordModel<T>>,
    projection: &Projection<T>,
    dim: &NormDimension<T>,
) -> Result<(Vec<(Vec<T>, T)>, usize)> {
    let mut samples = Vec::with_capacity(words.len());
    let mut dropped = 0usize;
    for word in words {
        let Some(vector) = embed(word, table, sw) else {
            dropped += 1;
            continue;
        };
        let raw = dataset
            .rating(word, dim.kind)
            .ok_or_else(|| Error::Train(format!("word {word:?} missing from dataset")))?;
        samples.push((project(&vector, projection)?, normalize(raw, dim)?));
    }
    Ok((samples, dropped))
}

/// Train the MLP regressor for one dimension.
///
/// The 8:1:1 split covers the full sorted vocabulary; words with no
/// derivable vector are dropped per subset afterwards. The PCA projection is
/// fit on the vectors of every embeddable vocabulary word. Early stopping
/// accepts a checkpoint when the dev Pearson improves without raising the
/// dev loss, and stops after `patience` epochs without an accepted
/// improvement; when the dev set is unusable (fewer than 3 evaluable pairs
/// or constant values) training runs to `max_epochs` and keeps the final
/// weights.
pub fn train<T: Real>(
    dataset: &NormDataset<T>,
    table: &EmbeddingTable<T>,
    sw: Option<&SubwordModel<T>>,
    kind: NormKind,
    hyper: &Hyper,
    seed: u64,
) -> Result<TrainOutcome<T>> {
    let words = dataset.sorted_words();
    let split = split_811(&words, seed)?;

    let mut vocab_vectors = Vec::new();
    for word in &words {
        if let Some(vector) = embed(word, table, sw) {
            vocab_vectors.push(vector);
        }
    }
    if vocab_vectors.is_empty() {
        return Err(Error::Train("no vocabulary word is embeddable".into()));
    }
    let projection = fit_pca(&vocab_vectors, hyper.input_dim)?;

    let dim = *dataset.dimension(kind);
    let (train_set, dropped_train) =
        projected_samples(&split.train, dataset, table, sw, &projection, &dim)?;
    let (dev_set, dropped_dev) =
        projected_samples(&split.dev, dataset, table, sw, &projection, &dim)?;
    let (_, dropped_test) =
        projected_samples(&split.test, dataset, table, sw, &projection, &dim)?;
    if train_set.is_empty() {
        return Err(Error::Train("training set empty after OOV drops".into()));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut mlp = Mlp::init(hyper.input_dim, hyper.hidden_dim, &mut rng);
    let mut grads = MlpGradients::zeros(hyper.input_dim, hyper.hidden_dim);
    let lr = T::real(hyper.learning_rate);

    let dev_metrics = |mlp: &Mlp<T>| -> Option<(T, T)> {
        if dev_set.len() < 3 {
            return None;
        }
        let preds: Vec<T> = dev_set.iter().map(|(x, _)| mlp.forward(x)).collect();
        let targets: Vec<T> = dev_set.iter().map(|(_, t)| *t).collect();
        let r = stats::pearson(&preds, &targets).ok()?;
        let mse = preds
            .iter()
            .zip(&targets)
            .map(|(p, t)| (*p - *t) * (*p - *t))
            .sum::<T>()
            / T::real(dev_set.len() as f64);
        Some((r, mse))
    };

    let mut indices: Vec<usize> = (0..train_set.len()).collect();
    let mut best: Option<(Mlp<T>, Checkpoint<T>)> = None;
    let mut checkpoints = Vec::new();
    let mut stale_epochs = 0usize;
    let mut epochs_run = 0usize;

    for epoch in 0..hyper.max_epochs {
        epochs_run = epoch + 1;
        indices.shuffle(&mut rng);
        for batch in indices.chunks(hyper.batch_size) {
            grads.reset();
            for &i in batch {
                let (x, t) = &train_set[i];
                mlp.accumulate_gradients(x, *t, &mut grads);
            }
            mlp.apply_gradients(&grads, lr / T::real(batch.len() as f64));
        }

        if let Some((dev_r, dev_mse)) = dev_metrics(&mlp) {
            let accepted = best.as_ref().map_or(true, |(_, prev)| {
                dev_r > prev.dev_pearson && dev_mse <= prev.dev_mse
            });
            if accepted {
                let checkpoint = Checkpoint {
                    epoch,
                    dev_pearson: dev_r,
                    dev_mse,
                };
                best = Some((mlp.clone(), checkpoint));
                checkpoints.push(checkpoint);
                stale_epochs = 0;
            } else {
                stale_epochs += 1;
                if stale_epochs > hyper.patience {
                    break;
                }
            }
        }
    }

    let final_mlp = best.map(|(m, _)| m).unwrap_or(mlp);
    Ok(TrainOutcome {
        model: NormModel {
            dimension: dim,
            input_dim: hyper.input_dim,
            hidden_dim: hyper.hidden_dim,
            train_seed: seed,
            projection,
            mlp: final_mlp,
        },
        dropped: [dropped_train, dropped_dev, dropped_test],
        checkpoints,
        epochs_run,
    })
}

/// Pearson correlation between model predictions and normalized ground
/// truth over a word list (typically the held-out test split).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult<T> {
    pub kind: NormKind,
    pub n_test: usize,
    pub pearson_r: T,
}

pub fn evaluate<T: Real>(
    model: &NormModel<T>,
    dataset: &NormDataset<T>,
    table: &EmbeddingTable<T>,
    sw: Option<&SubwordModel<T>>,
    words: &[String],
) -> Result<EvalResult<T>> {
    let mut preds = Vec::new();
    let mut targets = Vec::new();
    for word in words {
        let Some(vector) = embed(word, table, sw) else {
            continue;
        };
        let Some(raw) = dataset.rating(word, model.dimension.kind) else {
            continue;
        };
        preds.push(model.mlp.forward(&project(&vector, &model.projection)?));
        targets.push(normalize(raw, &model.dimension)?);
    }
    if preds.len() < 3 {
        return Err(Error::Stats(format!(
            "fewer than 3 evaluable pairs ({} found)",
            preds.len()
        )));
    }
    Ok(EvalResult {
        kind: model.dimension.kind,
        n_test: preds.len(),
        pearson_r: stats::pearson(&preds, &targets)?,
    })
}

/// Where a predicted value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ValueSource {
    Lookup,
    Model,
}

impl std::fmt::Display for ValueSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ValueSource::Lookup => "lookup",
            ValueSource::Model => "model",
        })
    }
}

/// Normalized value for a word: dataset lookup when known, model inference
/// otherwise, `None` when the word is also not embeddable.
pub fn predict_value<T: Real>(
    word: &str,
    dataset: &NormDataset<T>,
    model: &NormModel<T>,
    table: &EmbeddingTable<T>,
    sw: Option<&SubwordModel<T>>,
) -> Option<(T, ValueSource)> {
    if let Some(raw) = dataset.rating(word, model.dimension.kind) {
        let value = normalize(raw, &model.dimension).ok()?;
        return Some((value, ValueSource::Lookup));
    }
    let vector = embed(word, table, sw)?;
    let projected = project(&vector, &model.projection).ok()?;
    Some((model.mlp.forward(&projected), ValueSource::Model))
}
