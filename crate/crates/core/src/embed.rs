//! Word vectors, subword composition for unseen words, and PCA reduction.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// In-memory word vector table loaded from a text `.vec` file.
#[derive(Clone, Debug)]
pub struct EmbeddingTable<T> {
    dim: usize,
    vectors: HashMap<String, Vec<T>>,
}

impl<T: Real> EmbeddingTable<T> {
    pub fn from_pairs<I, S>(dim: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<T>)>,
        S: Into<String>,
    {
        let mut vectors = HashMap::new();
        for (word, vec) in pairs {
            let word = word.into();
            if vec.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: vec.len(),
                });
            }
            if vectors.insert(word.clone(), vec).is_some() {
                return Err(Error::Stats(format!("duplicate word {word:?}")));
            }
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn get(&self, word: &str) -> Option<&[T]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vectors.contains_key(word)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Load a text vector file: header `count dim`, then `word v1 .. v_dim` rows.
pub fn load_vec<T: Real>(path: &Path) -> Result<EmbeddingTable<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file_err = |line: usize, msg: String| Error::VecFile {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| file_err(1, "empty file".into()))?;
    let mut parts = header.split_whitespace();
    let count: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| file_err(1, format!("malformed header {header:?}")))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| file_err(1, format!("malformed header {header:?}")))?;
    if dim == 0 {
        return Err(file_err(1, "dimension must be positive".into()));
    }

    let mut vectors: HashMap<String, Vec<T>> = HashMap::with_capacity(count);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts
            .next()
            .ok_or_else(|| file_err(line_no, "missing word".into()))?
            .to_string();
        let mut vec = Vec::with_capacity(dim);
        for part in parts {
            let v: f64 = part
                .parse()
                .map_err(|_| file_err(line_no, format!("unparseable value {part:?}")))?;
            vec.push(T::real(v));
        }
        if vec.len() != dim {
            return Err(file_err(
                line_no,
                format!("expected {dim} values, found {}", vec.len()),
            ));
        }
        if vectors.insert(word.clone(), vec).is_some() {
            return Err(file_err(line_no, format!("duplicate word {word:?}")));
        }
    }
    if vectors.len() != count {
        return Err(file_err(
            1,
            format!("header declares {count} entries, file has {}", vectors.len()),
        ));
    }
    Ok(EmbeddingTable { dim, vectors })
}

/// Hashed character n-gram bucket vectors for composing unseen words.
#[derive(Clone, Debug)]
pub struct SubwordModel<T> {
    bucket_count: u32,
    n_min: usize,
    n_max: usize,
    dim: usize,
    buckets: HashMap<u32, Vec<T>>,
}

impl<T: Real> SubwordModel<T> {
    pub fn new(
        bucket_count: u32,
        n_min: usize,
        n_max: usize,
        dim: usize,
        buckets: HashMap<u32, Vec<T>>,
    ) -> Result<Self> {
        if bucket_count == 0 {
            return Err(Error::Stats("bucket count must be positive".into()));
        }
        if !(3 <= n_min && n_min <= n_max) {
            return Err(Error::Stats(format!(
                "need 3 <= n_min <= n_max, got {n_min}..{n_max}"
            )));
        }
        for (idx, vec) in &buckets {
            if *idx >= bucket_count {
                return Err(Error::Stats(format!("bucket index {idx} out of range")));
            }
            if vec.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: vec.len(),
                });
            }
        }
        Ok(SubwordModel {
            bucket_count,
            n_min,
            n_max,
            dim,
            buckets,
        })
    }

    pub fn bucket_count(&self) -> u32 {
        self.bucket_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_range(&self) -> (usize, usize) {
        (self.n_min, self.n_max)
    }

    /// Bucket vector by index; absent buckets are zero.
    fn bucket(&self, idx: u32) -> Option<&[T]> {
        self.buckets.get(&idx).map(Vec::as_slice)
    }
}

/// Load a subword export file: header `bucket_count n_min n_max dim`, then
/// sparse `bucket_index v1 .. v_dim` rows (absent buckets are zero).
pub fn load_subwords<T: Real>(path: &Path) -> Result<SubwordModel<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file_err = |line: usize, msg: String| Error::VecFile {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| file_err(1, "empty file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(file_err(1, format!("malformed header {header:?}")));
    }
    let parse_field = |i: usize| -> Result<usize> {
        fields[i]
            .parse()
            .map_err(|_| file_err(1, format!("malformed header field {:?}", fields[i])))
    };
    let bucket_count = parse_field(0)? as u32;
    let n_min = parse_field(1)?;
    let n_max = parse_field(2)?;
    let dim = parse_field(3)?;

    let mut buckets = HashMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let bucket: u32 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| file_err(line_no, "unparseable bucket index".into()))?;
        let mut vec = Vec::with_capacity(dim);
        for part in parts {
            let v: f64 = part
                .parse()
                .map_err(|_| file_err(line_no, format!("unparseable value {part:?}")))?;
            vec.push(T::real(v));
        }
        if vec.len() != dim {
            return Err(file_err(
                line_no,
                format!("expected {dim} values, found {}", vec.len()),
            ));
        }
        if buckets.insert(bucket, vec).is_some() {
            return Err(file_err(line_no, format!("duplicate bucket {bucket}")));
        }
    }
    SubwordModel::new(bucket_count, n_min, n_max, dim, buckets)
}

/// 32-bit FNV-1a hash.
pub fn fnv1a32(bytes: &[u8]) -> u32 {
    let mut h: u32 = 2_166_136_261;
    for &b in bytes {
        h ^= b as u32;
        h = h.wrapping_mul(16_777_619);
    }
    h
}

/// Character n-grams of the bracket-wrapped word, all lengths in
/// `[n_min, n_max]`, in position order. Each occurrence counts.
pub fn char_ngrams(word: &str, n_min: usize, n_max: usize) -> Vec<String> {
    let wrapped: Vec<char> = format!("<{word}>").chars().collect();
    let mut grams = Vec::new();
    for n in n_min..=n_max.min(wrapped.len()) {
        for start in 0..=wrapped.len() - n {
            grams.push(wrapped[start..start + n].iter().collect());
        }
    }
    grams
}

/// Compose a vector as the mean of the word's table vector (when present)
/// and the hashed bucket vector of every character n-gram.
pub fn compose_subword_vector<T: Real>(
    word: &str,
    table: &EmbeddingTable<T>,
    sw: &SubwordModel<T>,
) -> Result<Vec<T>> {
    if word.is_empty() {
        return Err(Error::Oov(String::new()));
    }
    if sw.dim != table.dim {
        return Err(Error::Dimension {
            expected: table.dim,
            got: sw.dim,
        });
    }
    let mut sum = vec![T::zero(); table.dim];
    let mut parts = 0usize;
    if let Some(vec) = table.get(word) {
        for (s, v) in sum.iter_mut().zip(vec) {
            *s += *v;
        }
        parts += 1;
    }
    for gram in char_ngrams(word, sw.n_min, sw.n_max) {
        let idx = fnv1a32(gram.as_bytes()) % sw.bucket_count;
        if let Some(vec) = sw.bucket(idx) {
            for (s, v) in sum.iter_mut().zip(vec) {
                *s += *v;
            }
        }
        parts += 1;
    }
    if parts == 0 {
        return Err(Error::Oov(word.to_string()));
    }
    let scale = T::one() / T::real(parts as f64);
    for s in &mut sum {
        *s *= scale;
    }
    Ok(sum)
}

/// Vector for a word: exact lookup when no subword model is given, subword
/// composition otherwise. `None` when no vector is derivable.
pub fn embed<T: Real>(
    word: &str,
    table: &EmbeddingTable<T>,
    sw: Option<&SubwordModel<T>>,
) -> Option<Vec<T>> {
    match sw {
        None => table.get(word).map(<[T]>::to_vec),
        Some(sw) => compose_subword_vector(word, table, sw).ok(),
    }
}

/// Mean-centered orthonormal projection onto the top-k principal axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projection<T> {
    pub mean: Vec<T>,
    /// k axes, each of input length; row j is the j-th principal axis.
    pub basis: Vec<Vec<T>>,
    pub k: usize,
}

/// Fit a PCA projection on row vectors via eigen-decomposition of the
/// sample covariance. Axis signs are fixed so each axis' largest-magnitude
/// entry is positive.
pub fn fit_pca<T: Real>(rows: &[Vec<T>], k: usize) -> Result<Projection<T>> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::Stats("PCA needs at least one row".into()));
    }
    let dim = rows[0].len();
    for row in rows {
        if row.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: row.len(),
            });
        }
    }
    if k < 1 || k > m.min(dim) {
        return Err(Error::Stats(format!(
            "k = {k} outside [1, min(m={m}, dim={dim})]"
        )));
    }

    let mf = T::real(m as f64);
    let mut mean = vec![T::zero(); dim];
    for row in rows {
        for (s, v) in mean.iter_mut().zip(row) {
            *s += *v;
        }
    }
    for s in &mut mean {
        *s /= mf;
    }

    let denom = T::real(if m > 1 { (m - 1) as f64 } else { 1.0 });
    let mut cov = vec![vec![T::zero(); dim]; dim];
    let mut centered = vec![T::zero(); dim];
    for row in rows {
        for (c, (v, mu)) in centered.iter_mut().zip(row.iter().zip(&mean)) {
            *c = *v - *mu;
        }
        for i in 0..dim {
            let ci = centered[i];
            for j in i..dim {
                cov[i][j] += ci * centered[j];
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }

    let (eigvals, eigvecs) = jacobi_eigh(&cov);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigvals[b].partial_cmp(&eigvals[a]).expect("finite eigenvalues"));

    let mut basis = Vec::with_capacity(k);
    for &col in order.iter().take(k) {
        let mut axis: Vec<T> = (0..dim).map(|row| eigvecs[row][col]).collect();
        let mut max_idx = 0;
        for (i, v) in axis.iter().enumerate() {
            if v.abs() > axis[max_idx].abs() {
                max_idx = i;
            }
        }
        if axis[max_idx] < T::zero() {
            for v in &mut axis {
                *v = -*v;
            }
        }
        basis.push(axis);
    }
    Ok(Projection { mean, basis, k })
}

/// Project a vector: basis^T (v - mean).
pub fn project<T: Real>(v: &[T], p: &Projection<T>) -> Result<Vec<T>> {
    if v.len() != p.mean.len() {
        return Err(Error::Dimension {
            expected: p.mean.len(),
            got: v.len(),
        });
    }
    Ok(p.basis
        .iter()
        .map(|axis| {
            axis.iter()
                .zip(v.iter().zip(&p.mean))
                .map(|(a, (x, mu))| *a * (*x - *mu))
                .sum()
        })
        .collect())
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvector matrix with eigenvectors as columns).
fn jacobi_eigh<T: Real>(matrix: &[Vec<T>]) -> (Vec<T>, Vec<Vec<T>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<T>> = matrix.to_vec();
    let mut v = vec![vec![T::zero(); n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    if n < 2 {
        return (a.iter().enumerate().map(|(i, r)| r[i]).collect(), v);
    }

    let frob: T = matrix
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| *x * *x)
        .sum::<T>()
        .sqrt();
    let threshold = frob * T::epsilon();

    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p][p];
                let aqq = a[q][q];
                let tau = (aqq - app) / (T::real(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = T::zero();
                a[q][p] = T::zero();
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[p][k] = a[k][p];
                        a[k][q] = s * akp + c * akq;
                        a[q][k] = a[k][q];
                    }
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}
