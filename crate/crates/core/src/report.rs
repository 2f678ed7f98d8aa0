//! Deterministic report assembly and serialization.
//!
//! All row sets are sorted by their natural keys and floats are printed
//! with six significant digits, so reruns with identical inputs and seeds
//! produce byte-identical files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::WorkRecord;
use crate::embed::{EmbeddingTable, SubwordModel};
use crate::error::{Error, Result};
use crate::extract::ColorHit;
use crate::lexicon::default_lexicon;
use crate::norms::{normalize, predict_value, NormDataset, NormKind, NormModel};
use crate::stats::{self, Era};

/// Pseudo-dimension label for normalized-frequency trends, alongside the
/// three norm labels.
pub const FREQ_DIMENSION: &str = "FREQ";

#[derive(Clone, Debug, PartialEq)]
pub struct TrendRow {
    pub color: String,
    /// IMAG, CNC, VAL, or FREQ.
    pub dimension: String,
    pub n: usize,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub p: Option<f64>,
    pub stars: String,
    /// Skip reason when the trend could not be computed.
    pub note: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerWorkRow {
    pub work_id: String,
    pub year: i32,
    pub color: String,
    pub dimension: String,
    pub avg: f64,
    pub n_nouns: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyRow {
    pub work_id: String,
    pub year: i32,
    pub color: String,
    pub freq: f64,
    /// Empty when the frequency is zero.
    pub log10_freq: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EraNounRow {
    pub color: String,
    pub era: Era,
    pub rank: usize,
    pub lemma: String,
    pub work_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRow {
    pub color: String,
    pub author: String,
    pub lemma: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool_version: String,
    pub seed: u64,
    pub era_top_k: usize,
    pub work_count: usize,
    pub hit_count: usize,
    /// Input name -> sha256 digest.
    pub inputs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportBundle {
    pub trends: Vec<TrendRow>,
    pub per_work: Vec<PerWorkRow>,
    pub frequencies: Vec<FrequencyRow>,
    pub era_nouns: Vec<EraNounRow>,
    pub projections: Vec<ProjectionRow>,
    pub run_meta: RunMeta,
}

pub struct AnalyzeInputs<'a> {
    pub catalog: &'a [WorkRecord],
    pub hits: &'a [ColorHit],
    /// One model per norm dimension.
    pub models: &'a [NormModel<f64>],
    pub dataset: &'a NormDataset<f64>,
    pub table: Option<&'a EmbeddingTable<f64>>,
    pub subwords: Option<&'a SubwordModel<f64>>,
}

pub struct AnalyzeConfig {
    pub seed: u64,
    pub era_top_k: usize,
    /// When set together with `author_color`, projections are emitted.
    pub author_pair: Option<(String, String)>,
    pub author_color: Option<String>,
    /// Input name -> sha256 digest, recorded in run_meta.
    pub input_digests: BTreeMap<String, String>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            seed: 42,
            era_top_k: 5,
            author_pair: None,
            author_color: None,
            input_digests: BTreeMap::new(),
        }
    }
}

fn dimension_sort_key(dimension: &str) -> usize {
    match dimension {
        "IMAG" => 0,
        "CNC" => 1,
        "VAL" => 2,
        FREQ_DIMENSION => 3,
        _ => 4,
    }
}

fn model_for(models: &[NormModel<f64>], kind: NormKind) -> Result<&NormModel<f64>> {
    models
        .iter()
        .find(|m| m.dimension.kind == kind)
        .ok_or_else(|| Error::Stats(format!("no model for dimension {kind}")).at_stage("analyze"))
}

/// Run every color x dimension analysis over the extracted hits.
///
/// Colors with insufficient samples keep their trend row with a skip note
/// instead of vanishing. Frequency rows require ingested token counts.
pub fn run_analyze(inputs: &AnalyzeInputs<'_>, cfg: &AnalyzeConfig) -> Result<ReportBundle> {
    let models: [&NormModel<f64>; 3] = [
        model_for(inputs.models, NormKind::Imag)?,
        model_for(inputs.models, NormKind::Cnc)?,
        model_for(inputs.models, NormKind::Val)?,
    ];

    let mut colors: BTreeSet<String> = default_lexicon().colors().map(str::to_string).collect();
    colors.extend(inputs.hits.iter().map(|h| h.color.clone()));

    let mut works: Vec<&WorkRecord> = inputs.catalog.iter().collect();
    works.sort_by(|a, b| (a.year, &a.work_id).cmp(&(b.year, &b.work_id)));

    let mut grouped: HashMap<(&str, &str), Vec<&ColorHit>> = HashMap::new();
    for hit in inputs.hits {
        grouped
            .entry((hit.work_id.as_str(), hit.color.as_str()))
            .or_default()
            .push(hit);
    }

    // memoized per-lemma values for the three dimensions
    let mut value_cache: HashMap<String, [Option<f64>; 3]> = HashMap::new();
    let mut value_of = |lemma: &str, slot: usize| -> Option<f64> {
        if let Some(hit) = value_cache.get(lemma) {
            return hit[slot];
        }
        let mut values = [None; 3];
        for (i, model) in models.iter().enumerate() {
            values[i] = match inputs.table {
                Some(table) => predict_value(lemma, inputs.dataset, model, table, inputs.subwords)
                    .map(|(v, _)| v),
                None => inputs
                    .dataset
                    .rating(lemma, model.dimension.kind)
                    .and_then(|raw| normalize(raw, &model.dimension).ok()),
            };
        }
        value_cache.insert(lemma.to_string(), values);
        values[slot]
    };

    let mut trends = Vec::new();
    let mut per_work = Vec::new();

    for color in &colors {
        for (slot, model) in models.iter().enumerate() {
            let label = model.dimension.kind.label().to_string();
            let mut samples: Vec<(i32, f64)> = Vec::new();
            for work in &works {
                let Some(hits) = grouped.get(&(work.work_id.as_str(), color.as_str())) else {
                    continue;
                };
                let Some(out) = stats::work_color_average(hits, |l| value_of(l, slot)) else {
                    continue;
                };
                per_work.push(PerWorkRow {
                    work_id: work.work_id.clone(),
                    year: work.year,
                    color: color.clone(),
                    dimension: label.clone(),
                    avg: out.avg,
                    n_nouns: out.n_nouns,
                });
                samples.push((work.year, out.avg));
            }
            trends.push(trend_row(color, &label, &samples));
        }
    }

    // normalized frequencies need token counts from ingested parses
    let counted_works: Vec<&&WorkRecord> = works.iter().filter(|w| w.token_count > 0).collect();
    let mut frequencies = Vec::new();
    for color in &colors {
        if counted_works.is_empty() {
            trends.push(TrendRow {
                color: color.clone(),
                dimension: FREQ_DIMENSION.into(),
                n: 0,
                r: None,
                t: None,
                p: None,
                stars: String::new(),
                note: "skipped: token counts unavailable".into(),
            });
            continue;
        }
        let mut samples: Vec<(i32, f64)> = Vec::new();
        for work in &counted_works {
            let count = grouped
                .get(&(work.work_id.as_str(), color.as_str()))
                .map_or(0, |h| h.len() as u64);
            let freq: f64 = stats::normalized_frequency(count, work.token_count)?;
            frequencies.push(FrequencyRow {
                work_id: work.work_id.clone(),
                year: work.year,
                color: color.clone(),
                freq,
                log10_freq: (freq > 0.0).then(|| freq.log10()),
            });
            samples.push((work.year, freq));
        }
        trends.push(trend_row(color, FREQ_DIMENSION, &samples));
    }

    let mut era_nouns = Vec::new();
    for color in &colors {
        for era in Era::ALL {
            let top = stats::era_top_nouns(inputs.hits, inputs.catalog, color, era, cfg.era_top_k);
            for (i, noun) in top.into_iter().enumerate() {
                era_nouns.push(EraNounRow {
                    color: color.clone(),
                    era,
                    rank: i + 1,
                    lemma: noun.lemma,
                    work_count: noun.work_count,
                });
            }
        }
    }

    let mut projections = Vec::new();
    if let (Some((a, b)), Some(color)) = (&cfg.author_pair, &cfg.author_color) {
        let table = inputs.table.ok_or_else(|| {
            Error::Stats("author projection requires an embedding table".into())
                .at_stage("analyze")
        })?;
        let points =
            stats::author_projection(inputs.hits, inputs.catalog, table, (a, b), color)
                .map_err(|e| e.at_stage("author projection"))?;
        projections.extend(points.into_iter().map(|p| ProjectionRow {
            color: color.clone(),
            author: p.author,
            lemma: p.lemma,
            x: p.x,
            y: p.y,
        }));
    }

    trends.sort_by(|a, b| {
        (&a.color, dimension_sort_key(&a.dimension))
            .cmp(&(&b.color, dimension_sort_key(&b.dimension)))
    });
    per_work.sort_by(|a, b| {
        (a.year, &a.work_id, &a.color, dimension_sort_key(&a.dimension)).cmp(&(
            b.year,
            &b.work_id,
            &b.color,
            dimension_sort_key(&b.dimension),
        ))
    });
    frequencies.sort_by(|a, b| (a.year, &a.work_id, &a.color).cmp(&(b.year, &b.work_id, &b.color)));
    era_nouns.sort_by(|a, b| (&a.color, a.era, a.rank).cmp(&(&b.color, b.era, b.rank)));
    projections.sort_by(|a, b| (&a.color, &a.author, &a.lemma).cmp(&(&b.color, &b.author, &b.lemma)));

    Ok(ReportBundle {
        trends,
        per_work,
        frequencies,
        era_nouns,
        projections,
        run_meta: RunMeta {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            era_top_k: cfg.era_top_k,
            work_count: inputs.catalog.len(),
            hit_count: inputs.hits.len(),
            inputs: cfg.input_digests.clone(),
        },
    })
}

fn trend_row(color: &str, dimension: &str, samples: &[(i32, f64)]) -> TrendRow {
    let base = TrendRow {
        color: color.to_string(),
        dimension: dimension.to_string(),
        n: samples.len(),
        r: None,
        t: None,
        p: None,
        stars: String::new(),
        note: String::new(),
    };
    if samples.len() < 3 {
        return TrendRow {
            note: format!("skipped: only {} work(s) with data", samples.len()),
            ..base
        };
    }
    match stats::color_trend(samples) {
        Ok(out) => TrendRow {
            r: Some(out.r),
            t: Some(out.t),
            p: Some(out.p),
            stars: out.stars.to_string(),
            ..base
        },
        Err(e) => TrendRow {
            note: format!("skipped: {e}"),
            ..base
        },
    }
}

/// Format with six-significant-digit fixed notation (round half to even).
pub fn format_significant(value: f64, digits: usize) -> String {
    assert!(digits > 0);
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return format!("{:.*}", digits, 0.0);
    }
    let exponent = value.abs().log10().floor() as i32;
    let decimals = digits as i32 - 1 - exponent;
    if decimals >= 0 {
        format!("{:.*}", decimals as usize, value)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (value / scale).round_ties_even() * scale)
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(String::new, |v| format_significant(v, 6))
}

/// File names emitted by `write_reports`, in write order.
pub const REPORT_FILES: [&str; 6] = [
    "trends.csv",
    "per_work.csv",
    "frequencies.csv",
    "era_nouns.csv",
    "projections.csv",
    "run_meta.json",
];

/// Write the six report files into `dir` (created if needed). Writes are
/// atomic via a temp file rename, and rewriting an unchanged bundle leaves
/// identical bytes.
pub fn write_reports(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut written = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let tmp = dir.join(format!(".tmp.{name}"));
        let target = dir.join(name);
        fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))?;
        written.push(target);
        Ok(())
    };

    let mut trends = csv_writer();
    write_row(&mut trends, ["color", "dimension", "n", "r", "t", "p", "stars", "note"])?;
    for row in &bundle.trends {
        write_row(
            &mut trends,
            [
                row.color.as_str(),
                &row.dimension,
                &row.n.to_string(),
                &fmt_opt(row.r),
                &fmt_opt(row.t),
                &fmt_opt(row.p),
                &row.stars,
                &row.note,
            ],
        )?;
    }
    emit("trends.csv", finish(trends))?;

    let mut per_work = csv_writer();
    write_row(&mut per_work, ["work_id", "year", "color", "dimension", "avg", "n_nouns"])?;
    for row in &bundle.per_work {
        write_row(
            &mut per_work,
            [
                row.work_id.as_str(),
                &row.year.to_string(),
                &row.color,
                &row.dimension,
                &format_significant(row.avg, 6),
                &row.n_nouns.to_string(),
            ],
        )?;
    }
    emit("per_work.csv", finish(per_work))?;

    let mut freqs = csv_writer();
    write_row(&mut freqs, ["work_id", "year", "color", "freq", "log10_freq"])?;
    for row in &bundle.frequencies {
        write_row(
            &mut freqs,
            [
                row.work_id.as_str(),
                &row.year.to_string(),
                &row.color,
                &format_significant(row.freq, 6),
                &fmt_opt(row.log10_freq),
            ],
        )?;
    }
    emit("frequencies.csv", finish(freqs))?;

    let mut eras = csv_writer();
    write_row(&mut eras, ["color", "era", "rank", "lemma", "work_count"])?;
    for row in &bundle.era_nouns {
        write_row(
            &mut eras,
            [
                row.color.as_str(),
                &row.era.to_string(),
                &row.rank.to_string(),
                &row.lemma,
                &row.work_count.to_string(),
            ],
        )?;
    }
    emit("era_nouns.csv", finish(eras))?;

    emit("projections.csv", projections_csv(&bundle.projections)?)?;

    let mut meta = serde_json::to_string_pretty(&bundle.run_meta).expect("meta serializes");
    meta.push('\n');
    emit("run_meta.json", meta.into_bytes())?;

    Ok(written)
}

fn projections_csv(rows: &[ProjectionRow]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    write_row(&mut w, ["color", "author", "lemma", "x", "y"])?;
    for row in rows {
        write_row(
            &mut w,
            [
                row.color.as_str(),
                &row.author,
                &row.lemma,
                &format_significant(row.x, 6),
                &format_significant(row.y, 6),
            ],
        )?;
    }
    Ok(finish(w))
}

/// Write a standalone projections.csv into `dir` (the `compare-authors`
/// output).
pub fn write_projections(rows: &[ProjectionRow], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = dir.join(".tmp.projections.csv");
    let target = dir.join("projections.csv");
    fs::write(&tmp, projections_csv(rows)?).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| Error::io(&target, e))?;
    Ok(target)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().from_writer(Vec::new())
}

fn write_row<const N: usize>(w: &mut csv::Writer<Vec<u8>>, fields: [&str; N]) -> Result<()> {
    w.write_record(fields)
        .map_err(|e| Error::Stats(format!("csv encoding failed: {e}")))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer flushes")
}

/// Hex sha256 of a file, for run provenance.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
