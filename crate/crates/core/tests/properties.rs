//! Cross-module property tests.

use std::path::PathBuf;

use proptest::prelude::*;

use colorlit_core::conllu::{parse_conllu_str, Sentence, Token};
use colorlit_core::corpus::clean_gutenberg_text;
use colorlit_core::extract::{extract_hits, ColorHit};
use colorlit_core::lexicon::ColorLexicon;
use colorlit_core::stats;

fn arbitrary_sentence() -> impl Strategy<Value = Sentence> {
    let lemmas = proptest::sample::select(vec![
        "red", "blue", "grey", "sapphire", "pale", "jet", "eye", "dress", "sea", "face", "walk",
        "slowly", "the",
    ]);
    let upos = proptest::sample::select(vec!["NOUN", "PROPN", "VERB", "ADJ", "ADV", "DET"]);
    proptest::collection::vec((lemmas, upos), 1..8).prop_flat_map(|tokens| {
        let n = tokens.len();
        // one head choice per token: 0 (root) or another token
        proptest::collection::vec(0..=n, n).prop_map(move |heads| {
            let tokens = tokens
                .iter()
                .zip(&heads)
                .enumerate()
                .map(|(i, ((lemma, upos), head))| {
                    let index = i + 1;
                    let head = if *head == index { 0 } else { *head };
                    Token {
                        index,
                        surface: lemma.to_string(),
                        lemma: lemma.to_string(),
                        upos: upos.to_string(),
                        head,
                        deprel: "dep".into(),
                    }
                })
                .collect();
            Sentence {
                sent_id: "s".into(),
                tokens,
            }
        })
    })
}

fn small_lexicon() -> ColorLexicon {
    ColorLexicon::from_entries([("red", vec![]), ("gray", vec!["grey"])]).unwrap()
}

fn big_lexicon() -> ColorLexicon {
    ColorLexicon::from_entries([
        ("red", vec!["pale"]),
        ("gray", vec!["grey", "jet"]),
        ("blue", vec!["sapphire"]),
    ])
    .unwrap()
}

proptest! {
    #[test]
    fn cleaning_is_idempotent(raw in "(?s).{0,300}") {
        if let Ok(once) = clean_gutenberg_text(&raw) {
            let twice = clean_gutenberg_text(&once.text).unwrap();
            prop_assert_eq!(&once.text, &twice.text);
        }
    }

    #[test]
    fn cleaning_idempotent_with_markers(
        before in "[a-z \n]{0,40}",
        body in "[a-z \n]{0,60}",
        after in "[a-z \n]{0,40}",
    ) {
        let raw = format!(
            "{before}\n*** START OF THE EBOOK ***\n{body}\n*** END OF THE EBOOK ***\n{after}"
        );
        let once = clean_gutenberg_text(&raw).unwrap();
        prop_assert!(once.markers_found);
        prop_assert_eq!(&once.text, &body);
        let twice = clean_gutenberg_text(&once.text).unwrap();
        prop_assert_eq!(&once.text, &twice.text);
    }

    #[test]
    fn pearson_symmetry_and_affine_invariance(
        pairs in proptest::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 3..40),
        scale in 0.1..5.0f64,
        shift in -20.0..20.0f64,
    ) {
        let xs: Vec<f64> = pairs.iter().map(|(x, _)| *x).collect();
        let ys: Vec<f64> = pairs.iter().map(|(_, y)| *y).collect();
        let Ok(base) = stats::pearson(&xs, &ys) else {
            return Ok(()); // constant input, undefined correlation
        };
        let swapped = stats::pearson(&ys, &xs).unwrap();
        prop_assert!((base - swapped).abs() < 1e-12);

        let mapped: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        let affine = stats::pearson(&mapped, &ys).unwrap();
        prop_assert!((base - affine).abs() < 1e-12, "affine map changed r: {} vs {}", base, affine);
    }

    #[test]
    fn growing_the_lexicon_never_loses_hits(sentences in proptest::collection::vec(arbitrary_sentence(), 0..6)) {
        let small = extract_hits("w", &sentences, &small_lexicon());
        let big = extract_hits("w", &sentences, &big_lexicon());
        for hit in &small {
            prop_assert!(big.contains(hit), "hit lost when lexicon grew: {:?}", hit);
        }
        prop_assert!(big.len() >= small.len());
    }

    #[test]
    fn hits_invariant_under_sentence_reordering(
        sentences in proptest::collection::vec(arbitrary_sentence(), 0..6),
        seed in 0..1000u64,
    ) {
        // distinct sent_ids so reordered hits can be matched back up
        let sentences: Vec<Sentence> = sentences
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                s.sent_id = format!("s{i}");
                s
            })
            .collect();
        let lex = big_lexicon();
        let base = extract_hits("w", &sentences, &lex);

        let mut reordered = sentences.clone();
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        reordered.shuffle(&mut rand_chacha::ChaCha20Rng::seed_from_u64(seed));
        let shuffled = extract_hits("w", &reordered, &lex);

        prop_assert_eq!(base.len(), shuffled.len());
        let key = |h: &ColorHit| {
            (
                h.sent_id.clone(),
                h.color.clone(),
                h.color_surface_lemma.clone(),
                h.color_role,
                h.partner_lemma.clone(),
                h.deprel.clone(),
            )
        };
        let mut a: Vec<_> = base.iter().map(key).collect();
        let mut b: Vec<_> = shuffled.iter().map(key).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn parse_serialize_round_trip(sentences in proptest::collection::vec(arbitrary_sentence(), 0..5)) {
        // normalize sent_ids the way the serializer does
        let sentences: Vec<Sentence> = sentences
            .into_iter()
            .enumerate()
            .map(|(i, mut s)| {
                s.sent_id = (i + 1).to_string();
                s
            })
            .collect();
        let text = colorlit_core::conllu::to_conllu(&sentences);
        let parsed = parse_conllu_str(&PathBuf::from("prop.conllu"), &text).unwrap();
        prop_assert_eq!(sentences, parsed);
    }

    #[test]
    fn edge_count_is_tokens_minus_roots(sentences in proptest::collection::vec(arbitrary_sentence(), 0..6)) {
        for s in &sentences {
            let roots = s.tokens.iter().filter(|t| t.head == 0).count();
            prop_assert_eq!(
                colorlit_core::conllu::dependency_edges(s).len(),
                s.tokens.len() - roots
            );
        }
    }

    #[test]
    fn p_value_stays_in_unit_interval(r in -1.0..=1.0f64, n in 3..60usize) {
        let p = stats::p_two_sided(r, n).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert_eq!(stats::stars(p), stats::stars(p));
    }
}

#[test]
fn p_value_monotone_in_r_and_n() {
    for n in [4, 6, 10, 30, 100] {
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let r = 0.05 * k as f64;
            let p = stats::p_two_sided(r, n).unwrap();
            assert!(p <= last + 1e-15, "p not decreasing in |r| at n={n}, r={r}");
            last = p;
        }
    }
    for r in [0.2, 0.5, 0.8] {
        let mut last = f64::INFINITY;
        for n in 4..60 {
            let p = stats::p_two_sided(r, n).unwrap();
            assert!(p <= last + 1e-15, "p not decreasing in n at r={r}, n={n}");
            last = p;
        }
    }
}

#[test]
fn embed_returns_stored_rows_exactly() {
    let pairs: Vec<(String, Vec<f64>)> = (0..50)
        .map(|i| {
            let f = i as f64;
            (format!("w{i}"), vec![f * 0.1, 1.0 - f * 0.02, (f * 7.0) % 3.0])
        })
        .collect();
    let table = colorlit_core::embed::EmbeddingTable::from_pairs(3, pairs.clone()).unwrap();
    for (word, vec) in &pairs {
        assert_eq!(
            colorlit_core::embed::embed(word, &table, None).as_deref(),
            Some(vec.as_slice())
        );
    }
}

#[test]
fn author_projection_invariant_to_hit_order() {
    use colorlit_core::corpus::WorkRecord;
    use colorlit_core::extract::ColorRole;

    let catalog = vec![
        WorkRecord {
            work_id: "wa".into(),
            gutenberg_id: 1,
            author: "First Author".into(),
            title: "t".into(),
            year: 1850,
            token_count: 0,
        },
        WorkRecord {
            work_id: "wb".into(),
            gutenberg_id: 2,
            author: "Second Author".into(),
            title: "t".into(),
            year: 1900,
            token_count: 0,
        },
    ];
    let table = colorlit_core::embed::EmbeddingTable::from_pairs(
        3,
        [
            ("hair", vec![0.9, 0.1, 0.0]),
            ("beard", vec![0.8, 0.2, 0.1]),
            ("cheese", vec![0.1, 0.9, 0.3]),
            ("soup", vec![0.05, 0.85, 0.4]),
        ],
    )
    .unwrap();
    let hit = |work: &str, lemma: &str| ColorHit {
        work_id: work.into(),
        sent_id: "s".into(),
        color: "yellow".into(),
        color_surface_lemma: "yellow".into(),
        color_role: ColorRole::Dependent,
        partner_lemma: lemma.into(),
        partner_upos: "NOUN".into(),
        deprel: "amod".into(),
    };
    let hits = vec![
        hit("wa", "hair"),
        hit("wa", "beard"),
        hit("wb", "cheese"),
        hit("wb", "soup"),
        hit("wb", "cheese"),
    ];
    let mut reversed = hits.clone();
    reversed.reverse();

    let a = stats::author_projection(&hits, &catalog, &table, ("First Author", "Second Author"), "yellow").unwrap();
    let b = stats::author_projection(&reversed, &catalog, &table, ("First Author", "Second Author"), "yellow").unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 4);
}
