//! Work catalog, raw text retrieval, and boilerplate stripping.

use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

pub const CATALOG_HEADER: [&str; 5] = ["work_id", "gutenberg_id", "author", "title", "year"];
pub const DEFAULT_MIRROR: &str = "https://www.gutenberg.org";

/// One literary work from the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkRecord {
    pub work_id: String,
    pub gutenberg_id: u64,
    pub author: String,
    pub title: String,
    /// Publication year (CE), in [1000, 2100].
    pub year: i32,
    /// Word tokens (UPOS not PUNCT/SYM); zero until parses are ingested.
    pub token_count: u64,
}

/// Load the work catalog from a CSV file with the fixed header
/// `work_id,gutenberg_id,author,title,year`. Row numbers in errors are
/// 1-based and count the header row.
pub fn load_catalog(path: &Path) -> Result<Vec<WorkRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, 1, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, 1, e))?;
    if headers.iter().collect::<Vec<_>>() != CATALOG_HEADER {
        return Err(Error::Catalog {
            path: path.to_path_buf(),
            row: 1,
            msg: format!(
                "expected header {:?}, found {:?}",
                CATALOG_HEADER.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let data_err = |row: u64, msg: String| Error::Catalog {
        path: path.to_path_buf(),
        row,
        msg,
    };

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for result in reader.records() {
        let record = result.map_err(|e| csv_error(path, 0, e))?;
        let row = record.position().map_or(0, |p| p.line());
        if record.len() != 5 {
            return Err(data_err(row, format!("expected 5 columns, found {}", record.len())));
        }
        let work_id = record[0].trim().to_string();
        if work_id.is_empty() {
            return Err(data_err(row, "empty work_id".into()));
        }
        if !seen.insert(work_id.clone()) {
            return Err(data_err(row, format!("duplicate work_id {work_id:?}")));
        }
        let gutenberg_id: u64 = record[1]
            .trim()
            .parse()
            .map_err(|_| data_err(row, format!("unparseable gutenberg_id {:?}", &record[1])))?;
        if gutenberg_id == 0 {
            return Err(data_err(row, "gutenberg_id must be positive".into()));
        }
        let year: i32 = record[4]
            .trim()
            .parse()
            .map_err(|_| data_err(row, format!("unparseable year {:?}", &record[4])))?;
        if !(1000..=2100).contains(&year) {
            return Err(data_err(row, format!("year {year} outside [1000, 2100]")));
        }
        records.push(WorkRecord {
            work_id,
            gutenberg_id,
            author: record[2].to_string(),
            title: record[3].to_string(),
            year,
            token_count: 0,
        });
    }
    Ok(records)
}

/// Serialize a catalog back to CSV (round-trip counterpart of `load_catalog`).
pub fn write_catalog(records: &[WorkRecord], path: &Path) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, 0, e))?;
    writer
        .write_record(CATALOG_HEADER)
        .map_err(|e| csv_error(path, 0, e))?;
    for r in records {
        writer
            .write_record([
                r.work_id.as_str(),
                &r.gutenberg_id.to_string(),
                &r.author,
                &r.title,
                &r.year.to_string(),
            ])
            .map_err(|e| csv_error(path, 0, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn csv_error(path: &Path, row: u64, e: csv::Error) -> Error {
    if let csv::ErrorKind::Io(_) = e.kind() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::io(path, io);
        }
        unreachable!()
    }
    Error::Catalog {
        path: path.to_path_buf(),
        row,
        msg: e.to_string(),
    }
}

/// Boilerplate-stripped text plus whether the start/end markers were found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CleanedText {
    pub text: String,
    pub markers_found: bool,
}

/// Strip Project Gutenberg boilerplate: keep the span strictly between the
/// first line containing `*** START OF` and the first subsequent line
/// containing `*** END OF`. Without a complete marker pair the input passes
/// through unchanged, which also makes cleaning idempotent. An END marker
/// ahead of any START marker is malformed.
pub fn clean_gutenberg_text(raw: &str) -> Result<CleanedText> {
    const START: &str = "*** START OF";
    const END: &str = "*** END OF";

    let lines: Vec<&str> = raw.lines().collect();
    let start = lines.iter().position(|l| l.contains(START));
    let first_end = lines.iter().position(|l| l.contains(END));

    let passthrough = || {
        Ok(CleanedText {
            text: raw.to_string(),
            markers_found: false,
        })
    };
    let Some(s) = start else {
        return match first_end {
            Some(e) => Err(Error::Boilerplate(format!(
                "END marker on line {} with no START marker",
                e + 1
            ))),
            None => passthrough(),
        };
    };
    if let Some(e) = first_end {
        if e < s {
            return Err(Error::Boilerplate(format!(
                "END marker on line {} precedes START marker on line {}",
                e + 1,
                s + 1
            )));
        }
    }
    match lines[s + 1..].iter().position(|l| l.contains(END)) {
        Some(rel) => Ok(CleanedText {
            text: lines[s + 1..s + 1 + rel].join("\n"),
            markers_found: true,
        }),
        // START that never closes: pass through
        None => passthrough(),
    }
}

/// The two URL patterns tried by `fetch_text`, in order.
pub fn candidate_urls(gutenberg_id: u64, mirror_base: &str) -> [String; 2] {
    let base = mirror_base.trim_end_matches('/');
    [
        format!("{base}/files/{gutenberg_id}/{gutenberg_id}-0.txt"),
        format!("{base}/cache/epub/{gutenberg_id}/pg{gutenberg_id}.txt"),
    ]
}

/// Fetch the raw e-book text, trying both Gutenberg URL patterns once each.
pub fn fetch_text(gutenberg_id: u64, mirror_base: &str) -> Result<String> {
    if gutenberg_id == 0 {
        return Err(Error::InvalidGutenbergId(0));
    }
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(60))
        .build()
        .map_err(|e| Error::Fetch {
            gutenberg_id,
            attempts: vec![("<client setup>".into(), e.to_string())],
        })?;

    let mut attempts = Vec::new();
    for url in candidate_urls(gutenberg_id, mirror_base) {
        match client.get(&url).send() {
            Ok(resp) if resp.status().is_success() => {
                return resp.text().map_err(|e| Error::Fetch {
                    gutenberg_id,
                    attempts: vec![(url.clone(), format!("body read failed: {e}"))],
                });
            }
            Ok(resp) => attempts.push((url, format!("HTTP {}", resp.status().as_u16()))),
            Err(e) => attempts.push((url, e.to_string())),
        }
    }
    Err(Error::Fetch {
        gutenberg_id,
        attempts,
    })
}
