//! Color-noun dependency pair extraction.
//!
//! Sentences are pre-filtered for lexicon lemmas, then each head-dependent
//! pair is kept when one side lemma-matches a color term and the other side
//! is a noun or proper noun. Both orientations of an edge are evaluated, so
//! a color term acting as head and as dependent both count.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conllu::{dependency_edges, Sentence, Token};
use crate::error::{Error, Result};
use crate::lexicon::ColorLexicon;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorRole {
    Head,
    Dependent,
}

impl std::fmt::Display for ColorRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ColorRole::Head => "head",
            ColorRole::Dependent => "dependent",
        })
    }
}

/// One extracted (color term, partner noun) dependency pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorHit {
    pub work_id: String,
    pub sent_id: String,
    /// Canonical color from the lexicon.
    pub color: String,
    /// The lemma that matched the lexicon (may be a synonym).
    pub color_surface_lemma: String,
    /// Whether the color term was the head or the dependent of the edge.
    pub color_role: ColorRole,
    pub partner_lemma: String,
    /// NOUN or PROPN.
    pub partner_upos: String,
    pub deprel: String,
}

fn is_nounish(upos: &str) -> bool {
    upos == "NOUN" || upos == "PROPN"
}

/// True iff any token lemma of the sentence matches the lexicon.
pub fn prefilter_sentence(sentence: &Sentence, lex: &ColorLexicon) -> bool {
    sentence
        .tokens
        .iter()
        .any(|t| lex.match_color(&t.lemma).is_some())
}

fn hit_from(
    work_id: &str,
    sent_id: &str,
    color: &str,
    color_token: &Token,
    role: ColorRole,
    partner: &Token,
    deprel: &str,
) -> ColorHit {
    ColorHit {
        work_id: work_id.to_string(),
        sent_id: sent_id.to_string(),
        color: color.to_string(),
        color_surface_lemma: color_token.lemma.clone(),
        color_role: role,
        partner_lemma: partner.lemma.clone(),
        partner_upos: partner.upos.clone(),
        deprel: deprel.to_string(),
    }
}

/// Run the pair filter over all sentences of one work.
///
/// Per-sentence duplicate hits (equal on every field) collapse to one;
/// repeats across sentences are kept. Output order follows sentence order,
/// then dependent-token order within a sentence.
pub fn extract_hits(
    work_id: &str,
    sentences: &[Sentence],
    lex: &ColorLexicon,
) -> Vec<ColorHit> {
    let mut hits = Vec::new();
    for sentence in sentences {
        if !prefilter_sentence(sentence, lex) {
            continue;
        }
        let mut sentence_hits: Vec<ColorHit> = Vec::new();
        for (head, dep, rel) in dependency_edges(sentence) {
            if let Some(color) = lex.match_color(&dep.lemma) {
                if is_nounish(&head.upos) {
                    sentence_hits.push(hit_from(
                        work_id,
                        &sentence.sent_id,
                        color,
                        dep,
                        ColorRole::Dependent,
                        head,
                        rel,
                    ));
                }
            }
            if let Some(color) = lex.match_color(&head.lemma) {
                if is_nounish(&dep.upos) {
                    sentence_hits.push(hit_from(
                        work_id,
                        &sentence.sent_id,
                        color,
                        head,
                        ColorRole::Head,
                        dep,
                        rel,
                    ));
                }
            }
        }
        // collapse exact duplicates within the sentence, keeping first
        let mut seen = Vec::new();
        for hit in sentence_hits {
            if !seen.contains(&hit) {
                seen.push(hit);
            }
        }
        hits.extend(seen);
    }
    hits
}

/// Raw occurrence counts per canonical color (no deduplication). Colors of
/// the lexicon with no hits are reported with count zero.
pub fn count_color_occurrences(hits: &[ColorHit], lex: &ColorLexicon) -> BTreeMap<String, u64> {
    let mut counts: BTreeMap<String, u64> = lex.colors().map(|c| (c.to_string(), 0)).collect();
    for hit in hits {
        *counts.entry(hit.color.clone()).or_insert(0) += 1;
    }
    counts
}

/// Write hits as one JSON record per line.
pub fn write_hits(hits: &[ColorHit], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for hit in hits {
        serde_json::to_writer(&mut out, hit).expect("hit serializes");
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a hits file written by `write_hits`.
pub fn read_hits(path: &Path) -> Result<Vec<ColorHit>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hits = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let hit: ColorHit = serde_json::from_str(&line).map_err(|e| Error::Stats(format!(
            "{}:{}: malformed hit record: {e}",
            path.display(),
            idx + 1
        )))?;
        hits.push(hit);
    }
    Ok(hits)
}

/// Re-checkable predicate: does a hit satisfy all three filter steps?
pub fn hit_is_valid(hit: &ColorHit, lex: &ColorLexicon) -> bool {
    lex.match_color(&hit.color_surface_lemma) == Some(hit.color.as_str())
        && is_nounish(&hit.partner_upos)
}
