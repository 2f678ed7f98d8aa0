//! Correlation statistics, significance testing, and corpus aggregates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::corpus::WorkRecord;
use crate::embed::{fit_pca, project, EmbeddingTable};
use crate::error::{Error, Result};
use crate::extract::ColorHit;
use crate::scalar::Real;

/// Pearson correlation with its two-sided significance test.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationResult<T> {
    pub n: usize,
    pub r: T,
    /// Student-t statistic with n-2 degrees of freedom; infinite when |r| = 1.
    pub t: T,
    pub p: T,
    pub stars: &'static str,
}

/// Publication era buckets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Era {
    Pre1800,
    /// 1800 through 1899.
    Mid,
    Post1900,
}

impl Era {
    pub const ALL: [Era; 3] = [Era::Pre1800, Era::Mid, Era::Post1900];
}

impl std::fmt::Display for Era {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Era::Pre1800 => "pre-1800",
            Era::Mid => "1800-1899",
            Era::Post1900 => "post-1900",
        })
    }
}

pub fn era_of(year: i32) -> Era {
    if year < 1800 {
        Era::Pre1800
    } else if year < 1900 {
        Era::Mid
    } else {
        Era::Post1900
    }
}

/// Pearson product-moment correlation of two equal-length series.
pub fn pearson<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::Stats(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len();
    if n < 3 {
        return Err(Error::Stats(format!("need at least 3 samples, got {n}")));
    }
    let nf = T::real(n as f64);
    let mean_x = xs.iter().copied().sum::<T>() / nf;
    let mean_y = ys.iter().copied().sum::<T>() / nf;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::Stats("constant series has undefined correlation".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Two-sided p-value for a Pearson r under the Student-t test with
/// df = n - 2. `|r| = 1` yields p = 0.
pub fn p_two_sided<T: Real>(r: T, n: usize) -> Result<T> {
    if n < 3 {
        return Err(Error::Stats(format!("need n >= 3 for significance, got {n}")));
    }
    if r.abs() > T::one() {
        return Err(Error::Stats(format!("correlation {r} outside [-1, 1]")));
    }
    if r.abs() == T::one() {
        return Ok(T::zero());
    }
    let df = T::real((n - 2) as f64);
    let t = r * (df / (T::one() - r * r)).sqrt();
    // P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    let x = df / (df + t * t);
    incomplete_beta_reg(df / T::real(2.0), T::real(0.5), x)
}

/// t statistic for a Pearson r at sample size n (infinite when |r| = 1).
pub fn t_statistic<T: Real>(r: T, n: usize) -> T {
    if r.abs() == T::one() {
        return r.signum() * T::infinity();
    }
    let df = T::real((n - 2) as f64);
    r * (df / (T::one() - r * r)).sqrt()
}

/// Significance marker: `***` p < 0.001, `**` p < 0.05, `*` p < 0.1.
pub fn stars<T: Real>(p: T) -> &'static str {
    if p < T::real(0.001) {
        "***"
    } else if p < T::real(0.05) {
        "**"
    } else if p < T::real(0.1) {
        "*"
    } else {
        ""
    }
}

/// Pearson r, t statistic, two-sided p, and stars in one call.
pub fn correlation_with_p<T: Real>(xs: &[T], ys: &[T]) -> Result<CorrelationResult<T>> {
    let r = pearson(xs, ys)?;
    let p = p_two_sided(r, xs.len())?;
    Ok(CorrelationResult {
        n: xs.len(),
        r,
        t: t_statistic(r, xs.len()),
        p,
        stars: stars(p),
    })
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function (Lanczos approximation, g = 7).
pub fn ln_gamma<T: Real>(z: T) -> T {
    let half = T::real(0.5);
    if z < half {
        // reflection for small arguments
        let pi = T::real(std::f64::consts::PI);
        return (pi / (pi * z).sin()).ln() - ln_gamma(T::one() - z);
    }
    let z = z - T::one();
    let mut acc = T::real(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += T::real(c) / (z + T::real(i as f64));
    }
    let t = z + T::real(LANCZOS_G) + half;
    let two_pi = T::real(2.0 * std::f64::consts::PI);
    (two_pi).sqrt().ln() + (z + half) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta function I_x(a, b), evaluated by the
/// continued-fraction expansion (modified Lentz method).
pub fn incomplete_beta_reg<T: Real>(a: T, b: T, x: T) -> Result<T> {
    if a <= T::zero() || b <= T::zero() {
        return Err(Error::Stats("incomplete beta requires a, b > 0".into()));
    }
    if x < T::zero() || x > T::one() {
        return Err(Error::Stats(format!("incomplete beta argument {x} outside [0, 1]")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    // use the expansion on the side that converges fast
    let symmetric = x >= (a + T::one()) / (a + b + T::real(2.0));
    let value = if symmetric {
        T::one() - front * beta_continued_fraction(b, a, T::one() - x) / b
    } else {
        front * beta_continued_fraction(a, b, x) / a
    };
    Ok(value.max(T::zero()).min(T::one()))
}

fn beta_continued_fraction<T: Real>(a: T, b: T, x: T) -> T {
    let max_iter = 300;
    let eps = T::epsilon();
    let fpmin = T::real(1e-30);

    let qab = a + b;
    let qap = a + T::one();
    let qam = a - T::one();
    let mut c = T::one();
    let mut d = T::one() - qab * x / qap;
    if d.abs() < fpmin {
        d = fpmin;
    }
    d = T::one() / d;
    let mut h = d;
    for m in 1..=max_iter {
        let mf = T::real(m as f64);
        let m2 = T::real(2.0 * m as f64);
        // even step
        let aa = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = T::one() + aa * d;
        if d.abs() < fpmin {
            d = fpmin;
        }
        c = T::one() + aa / c;
        if c.abs() < fpmin {
            c = fpmin;
        }
        d = T::one() / d;
        h = h * d * c;
        // odd step
        let aa = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = T::one() + aa * d;
        if d.abs() < fpmin {
            d = fpmin;
        }
        c = T::one() + aa / c;
        if c.abs() < fpmin {
            c = fpmin;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < eps {
            break;
        }
    }
    h
}

/// Deduplicated per-work average of partner-noun values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DedupAverage<T> {
    pub avg: T,
    /// Distinct partner lemmas that contributed a value.
    pub n_nouns: usize,
}

/// Average a value function over the distinct partner lemmas of hits from a
/// single (work, color) group. Lemmas with no resolvable value are skipped;
/// returns `None` when nothing resolves.
pub fn work_color_average<T, F>(hits: &[&ColorHit], mut value: F) -> Option<DedupAverage<T>>
where
    T: Real,
    F: FnMut(&str) -> Option<T>,
{
    let lemmas: BTreeSet<&str> = hits.iter().map(|h| h.partner_lemma.as_str()).collect();
    let mut sum = T::zero();
    let mut n = 0usize;
    for lemma in lemmas {
        if let Some(v) = value(lemma) {
            sum += v;
            n += 1;
        }
    }
    (n > 0).then(|| DedupAverage {
        avg: sum / T::real(n as f64),
        n_nouns: n,
    })
}

/// Year-vs-average trend for one color and dimension: samples are
/// (year, per-work average) pairs for works where the color is present.
pub fn color_trend<T: Real>(samples: &[(i32, T)]) -> Result<CorrelationResult<T>> {
    let xs: Vec<T> = samples.iter().map(|(y, _)| T::real(*y as f64)).collect();
    let ys: Vec<T> = samples.iter().map(|(_, v)| *v).collect();
    correlation_with_p(&xs, &ys)
}

/// A lemma ranked by the number of distinct works containing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopNoun {
    pub lemma: String,
    pub work_count: usize,
}

/// Most frequent partner nouns of a color within an era, counting each
/// lemma once per work. Ties break lexicographically.
pub fn era_top_nouns(
    hits: &[ColorHit],
    catalog: &[WorkRecord],
    color: &str,
    era: Era,
    k: usize,
) -> Vec<TopNoun> {
    let era_works: HashMap<&str, ()> = catalog
        .iter()
        .filter(|w| era_of(w.year) == era)
        .map(|w| (w.work_id.as_str(), ()))
        .collect();

    let mut per_work: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for hit in hits {
        if hit.color == color && era_works.contains_key(hit.work_id.as_str()) {
            per_work
                .entry(hit.work_id.as_str())
                .or_default()
                .insert(hit.partner_lemma.as_str());
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for lemmas in per_work.values() {
        for lemma in lemmas {
            *counts.entry(lemma).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked
        .into_iter()
        .take(k)
        .map(|(lemma, work_count)| TopNoun {
            lemma: lemma.to_string(),
            work_count,
        })
        .collect()
}

/// Raw per-work color frequency: hit count over word-token count.
pub fn normalized_frequency<T: Real>(hit_count: u64, token_count: u64) -> Result<T> {
    if token_count == 0 {
        return Err(Error::Stats("token count is zero".into()));
    }
    Ok(T::real(hit_count as f64) / T::real(token_count as f64))
}

/// One lemma placed in the shared 2-d projection of an author comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct AuthorProjectionPoint<T> {
    pub lemma: String,
    pub author: String,
    pub x: T,
    pub y: T,
}

/// Project the deduplicated partner nouns of two authors for one color into
/// a shared 2-d space. Lemmas without an exact table vector are discarded
/// (no subword fallback).
pub fn author_projection<T: Real>(
    hits: &[ColorHit],
    catalog: &[WorkRecord],
    table: &EmbeddingTable<T>,
    authors: (&str, &str),
    color: &str,
) -> Result<Vec<AuthorProjectionPoint<T>>> {
    let works_of = |author: &str| -> Result<BTreeSet<&str>> {
        let works: BTreeSet<&str> = catalog
            .iter()
            .filter(|w| w.author == author)
            .map(|w| w.work_id.as_str())
            .collect();
        if works.is_empty() {
            return Err(Error::Stats(format!("author {author:?} not in catalog")));
        }
        Ok(works)
    };
    let works_a = works_of(authors.0)?;
    let works_b = works_of(authors.1)?;

    let lemmas_for = |works: &BTreeSet<&str>| -> BTreeSet<&str> {
        hits.iter()
            .filter(|h| h.color == color && works.contains(h.work_id.as_str()))
            .map(|h| h.partner_lemma.as_str())
            .filter(|l| table.get(l).is_some())
            .collect()
    };
    let lemmas_a = lemmas_for(&works_a);
    let lemmas_b = lemmas_for(&works_b);

    let union: BTreeSet<&str> = lemmas_a.union(&lemmas_b).copied().collect();
    if union.len() < 3 {
        return Err(Error::Stats(format!(
            "fewer than 3 embeddable lemmas for color {color:?} ({} found)",
            union.len()
        )));
    }

    let rows: Vec<Vec<T>> = union
        .iter()
        .map(|l| table.get(l).expect("filtered to table words").to_vec())
        .collect();
    let projection = fit_pca(&rows, 2)?;
    let coords: HashMap<&str, (T, T)> = union
        .iter()
        .zip(&rows)
        .map(|(lemma, row)| {
            let p = project(row, &projection).expect("row has table dim");
            (*lemma, (p[0], p[1]))
        })
        .collect();

    let mut points = Vec::new();
    for (author, lemmas) in [(authors.0, &lemmas_a), (authors.1, &lemmas_b)] {
        for lemma in lemmas {
            let (x, y) = coords[lemma];
            points.push(AuthorProjectionPoint {
                lemma: lemma.to_string(),
                author: author.to_string(),
                x,
                y,
            });
        }
    }
    Ok(points)
}
