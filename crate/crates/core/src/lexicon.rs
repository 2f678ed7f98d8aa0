//! Canonical color terms and their synonyms.
//!
//! Matching is exact lemma equality against lowercase entries; there is no
//! substring or fuzzy matching ("reddish" does not match "red").

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// The ten canonical colors with their curated synonym sets.
const DEFAULT_TABLE: &[(&str, &[&str])] = &[
    (
        "red",
        &[
            "cardinal", "coral", "crimson", "maroon", "burgundy", "flaming", "scarlet", "fuchsia",
        ],
    ),
    (
        "green",
        &["emerald", "olive", "aquamarine", "beryl", "jade", "lime"],
    ),
    ("black", &["ebony", "jet", "obsidian", "onyx", "inky"]),
    (
        "white",
        &[
            "alabaster",
            "ashen",
            "blanched",
            "bleached",
            "cadaverous",
            "doughy",
            "pale",
            "pallid",
            "pasty",
            "ivory",
            "pearly",
            "beige",
        ],
    ),
    (
        "blue",
        &[
            "azure", "indigo", "sapphire", "cerulean", "cobalt", "turquoise", "teal",
        ],
    ),
    ("brown", &["amber", "khaki", "tan", "umber", "hazel"]),
    ("gray", &["grey"]),
    ("yellow", &[]),
    ("pink", &["rosy", "blush", "magenta"]),
    (
        "purple",
        &[
            "lavender",
            "lilac",
            "mauve",
            "periwinkle",
            "plum",
            "violet",
            "amethyst",
        ],
    ),
];

/// Mapping of canonical color terms to synonym lemma sets.
///
/// Immutable after construction; each entry set contains the canonical term
/// itself, and no lemma belongs to two colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorLexicon {
    entries: BTreeMap<String, BTreeSet<String>>,
    by_lemma: HashMap<String, String>,
}

impl ColorLexicon {
    /// Build a lexicon from `color -> synonyms` pairs, validating invariants.
    ///
    /// Entries are lowercased; the canonical term is added to its own set.
    pub fn from_entries<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<T>)>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let mut entries: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (color, synonyms) in pairs {
            let color = color.as_ref().trim().to_lowercase();
            if color.is_empty() {
                return Err(Error::Lexicon("empty color name".into()));
            }
            let set = entries.entry(color.clone()).or_default();
            set.insert(color);
            for syn in synonyms {
                let syn = syn.as_ref().trim().to_lowercase();
                if syn.is_empty() {
                    return Err(Error::Lexicon("empty synonym lemma".into()));
                }
                set.insert(syn);
            }
        }

        let mut by_lemma = HashMap::new();
        for (color, set) in &entries {
            for lemma in set {
                if let Some(other) = by_lemma.insert(lemma.clone(), color.clone()) {
                    if &other != color {
                        return Err(Error::Lexicon(format!(
                            "lemma {lemma:?} listed under both {other:?} and {color:?}"
                        )));
                    }
                }
            }
        }
        Ok(ColorLexicon { entries, by_lemma })
    }

    /// Canonical color for a lowercase lemma, if the lemma is in the table.
    pub fn match_color(&self, lemma: &str) -> Option<&str> {
        self.by_lemma.get(lemma).map(String::as_str)
    }

    /// Canonical colors in sorted order.
    pub fn colors(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Synonym set (canonical term included) for a color.
    pub fn synonyms(&self, color: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(color)
    }

    pub fn color_count(&self) -> usize {
        self.entries.len()
    }

    pub fn lemma_count(&self) -> usize {
        self.by_lemma.len()
    }

    /// Serialize as the override file format: `{"color": ["synonym", ...]}`
    /// with the canonical term omitted from its own array.
    pub fn to_json_pretty(&self) -> String {
        let out: BTreeMap<&str, Vec<&str>> = self
            .entries
            .iter()
            .map(|(color, set)| {
                let syns = set
                    .iter()
                    .filter(|l| *l != color)
                    .map(String::as_str)
                    .collect();
                (color.as_str(), syns)
            })
            .collect();
        serde_json::to_string_pretty(&out).expect("string map serializes")
    }
}

/// The embedded ten-color lexicon.
pub fn default_lexicon() -> ColorLexicon {
    ColorLexicon::from_entries(
        DEFAULT_TABLE
            .iter()
            .map(|(color, syns)| (*color, syns.to_vec())),
    )
    .expect("default table is valid")
}

/// Load a lexicon override file: a JSON object mapping each canonical color
/// to an array of synonyms. Replaces the default wholesale.
pub fn load_lexicon(path: &Path) -> Result<ColorLexicon> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: BTreeMap<String, Vec<String>> = serde_json::from_str(&raw)
        .map_err(|e| Error::Lexicon(format!("{}: {e}", path.display())))?;
    ColorLexicon::from_entries(parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_has_ten_colors() {
        let lex = default_lexicon();
        assert_eq!(lex.color_count(), 10);
        let colors: Vec<_> = lex.colors().collect();
        assert!(colors.contains(&"yellow"));
    }

    #[test]
    fn canonical_terms_match_themselves() {
        let lex = default_lexicon();
        for color in lex.colors() {
            assert_eq!(lex.match_color(color), Some(color));
        }
    }

    #[test]
    fn every_synonym_maps_to_its_row() {
        let lex = default_lexicon();
        for (color, syns) in DEFAULT_TABLE {
            for syn in *syns {
                assert_eq!(lex.match_color(syn), Some(*color), "synonym {syn}");
            }
        }
    }

    #[test]
    fn table_spot_checks() {
        let lex = default_lexicon();
        assert_eq!(lex.match_color("grey"), Some("gray"));
        assert_eq!(lex.match_color("sapphire"), Some("blue"));
        assert_eq!(lex.match_color("yellow"), Some("yellow"));
        assert!(lex.synonyms("yellow").unwrap().len() == 1);
        assert_eq!(lex.match_color("crimson"), Some("red"));
    }

    #[test]
    fn non_entries_do_not_match() {
        let lex = default_lexicon();
        assert_eq!(lex.match_color("reddish"), None);
        assert_eq!(lex.match_color(""), None);
    }

    #[test]
    fn override_replaces_wholesale() {
        let lex = ColorLexicon::from_entries([("red", vec!["scarlet"])]).unwrap();
        assert_eq!(lex.color_count(), 1);
        assert_eq!(lex.match_color("scarlet"), Some("red"));
        assert_eq!(lex.match_color("red"), Some("red"));
        assert_eq!(lex.match_color("blue"), None);
    }

    #[test]
    fn duplicate_lemma_across_colors_rejected() {
        let err = ColorLexicon::from_entries([("red", vec!["scarlet"]), ("pink", vec!["scarlet"])])
            .unwrap_err();
        assert!(err.to_string().contains("scarlet"));
    }

    #[test]
    fn empty_color_name_rejected() {
        assert!(ColorLexicon::from_entries([("", vec!["x"])]).is_err());
    }

    #[test]
    fn dump_round_trips_default() {
        let lex = default_lexicon();
        let json = lex.to_json_pretty();
        let parsed: BTreeMap<String, Vec<String>> = serde_json::from_str(&json).unwrap();
        let again = ColorLexicon::from_entries(parsed).unwrap();
        assert_eq!(lex, again);
    }
}
