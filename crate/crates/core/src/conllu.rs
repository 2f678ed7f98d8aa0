//! CoNLL-U dependency-parse ingestion.
//!
//! Consumes the standard 10-column tab-separated format. Multiword range
//! lines (`1-2`) and empty nodes (`8.1`) are skipped, enhanced dependencies
//! are ignored; only ID/FORM/LEMMA/UPOS/HEAD/DEPREL are retained.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// 1-based position within the sentence.
    pub index: usize,
    pub surface: String,
    /// Lowercased at load time; `_` falls back to the lowercased surface.
    pub lemma: String,
    pub upos: String,
    /// 0 means root.
    pub head: usize,
    pub deprel: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub sent_id: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Tokens whose universal POS counts as a word (not PUNCT or SYM).
    pub fn word_count(&self) -> u64 {
        self.tokens
            .iter()
            .filter(|t| t.upos != "PUNCT" && t.upos != "SYM")
            .count() as u64
    }
}

/// One dependency edge: governing token, dependent token, relation label.
pub type Edge<'a> = (&'a Token, &'a Token, &'a str);

/// All head-dependent pairs of a sentence, one per non-root token, in token
/// order.
pub fn dependency_edges(sentence: &Sentence) -> Vec<Edge<'_>> {
    sentence
        .tokens
        .iter()
        .filter(|t| t.head != 0)
        .map(|t| (&sentence.tokens[t.head - 1], t, t.deprel.as_str()))
        .collect()
}

/// Word tokens across all sentences, used to fill `WorkRecord::token_count`.
pub fn word_token_count(sentences: &[Sentence]) -> u64 {
    sentences.iter().map(Sentence::word_count).sum()
}

pub fn parse_conllu(path: &Path) -> Result<Vec<Sentence>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu_str(path, &text)
}

/// Parse CoNLL-U text; `path` is used only for error messages.
pub fn parse_conllu_str(path: &Path, text: &str) -> Result<Vec<Sentence>> {
    let mut sentences = Vec::new();
    // (token, source line) pairs for the sentence being assembled
    let mut pending: Vec<(Token, usize)> = Vec::new();
    let mut sent_id: Option<String> = None;

    let err = |line: usize, msg: String| Error::Conllu {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let flush = |pending: &mut Vec<(Token, usize)>,
                     sent_id: &mut Option<String>,
                     sentences: &mut Vec<Sentence>|
     -> Result<()> {
        if pending.is_empty() {
            return Ok(());
        }
        let n = pending.len();
        for (i, (token, line)) in pending.iter().enumerate() {
            if token.index != i + 1 {
                return Err(err(
                    *line,
                    format!("token id {} breaks 1..{n} contiguity", token.index),
                ));
            }
            if token.head > n {
                return Err(err(
                    *line,
                    format!("head {} out of range for {n}-token sentence", token.head),
                ));
            }
            if token.head == token.index {
                return Err(err(*line, format!("token {} heads itself", token.index)));
            }
        }
        let id = sent_id
            .take()
            .unwrap_or_else(|| (sentences.len() + 1).to_string());
        sentences.push(Sentence {
            sent_id: id,
            tokens: pending.drain(..).map(|(t, _)| t).collect(),
        });
        Ok(())
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.is_empty() {
            flush(&mut pending, &mut sent_id, &mut sentences)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    sent_id = Some(value.trim().to_string());
                }
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(
                line_no,
                format!("expected 10 tab-separated columns, found {}", cols.len()),
            ));
        }
        let id = cols[0];
        // multiword ranges ("1-2") and empty nodes ("8.1")
        if id.contains('-') || id.contains('.') {
            continue;
        }
        let index: usize = id
            .parse()
            .map_err(|_| err(line_no, format!("non-numeric token id {id:?}")))?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(line_no, format!("non-numeric head {:?}", cols[6])))?;
        let surface = cols[1].to_string();
        let lemma = if cols[2] == "_" {
            surface.to_lowercase()
        } else {
            cols[2].to_lowercase()
        };
        pending.push((
            Token {
                index,
                surface,
                lemma,
                upos: cols[3].to_string(),
                head,
                deprel: cols[7].to_string(),
            },
            line_no,
        ));
    }
    flush(&mut pending, &mut sent_id, &mut sentences)?;
    Ok(sentences)
}

/// Serialize sentences back to CoNLL-U with the retained fields; used for
/// round-trip checks and fixture generation.
pub fn to_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&format!("# sent_id = {}\n", s.sent_id));
        for t in &s.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_\n",
                t.index, t.surface, t.lemma, t.upos, t.head, t.deprel
            ));
        }
        out.push('\n');
    }
    out
}
