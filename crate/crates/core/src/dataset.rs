//! Labeled embedding datasets and their on-disk formats.
//!
//! Embeddings live in a little-endian binary file:
//!
//! ```text
//! "NRK1" | u32 N | u32 m | N*m f32, row-major
//! ```
//!
//! Labels live in a UTF-8 TSV with one `id<TAB>label` row per embedding row,
//! in the same order. Labels that all parse as non-negative integers are used
//! as class indices directly; otherwise they are treated as names and
//! densified in order of first appearance.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"NRK1";
const HEADER_LEN: usize = 12;

/// N instance vectors of dimension m with one given (possibly noisy) label each.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingDataset {
    ids: Vec<String>,
    dim: usize,
    vectors: Vec<f32>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    index: HashMap<String, usize>,
}

impl EmbeddingDataset {
    /// Builds a dataset, enforcing every structural invariant.
    ///
    /// `vectors` is row-major with `ids.len()` rows of `dim` components.
    /// `class_names.len()` is the class count C and must be at least 2.
    pub fn new(
        ids: Vec<String>,
        dim: usize,
        vectors: Vec<f32>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n = ids.len();
        if n == 0 {
            return Err(Error::Empty("dataset has no rows".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidParam("embedding dimension must be >= 1".into()));
        }
        if vectors.len() != n * dim {
            return Err(Error::DimensionMismatch {
                expected: n * dim,
                found: vectors.len(),
            });
        }
        if labels.len() != n {
            return Err(Error::RowCountMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        if class_names.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "at least 2 classes required, found {}",
                class_names.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::UnknownLabel(bad.to_string()));
        }
        if let Some(row) = vectors
            .chunks_exact(dim)
            .position(|r| r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite { row });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Self {
            ids,
            dim,
            vectors,
            labels,
            class_names,
            index,
        })
    }

    /// Same as [`EmbeddingDataset::new`] with class names `"0".."C-1"`.
    pub fn with_class_count(
        ids: Vec<String>,
        dim: usize,
        vectors: Vec<f32>,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let names = (0..num_classes).map(|c| c.to_string()).collect();
        Self::new(ids, dim, vectors, labels, names)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_name(&self, c: usize) -> &str {
        &self.class_names[c]
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.vectors.chunks_exact(self.dim)
    }

    /// Row-major backing storage.
    pub fn as_flat(&self) -> &[f32] {
        &self.vectors
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Instance indices grouped by given label; entry `c` lists class `c`.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.num_classes()];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    /// Number of classes that own at least one instance.
    pub fn nonempty_classes(&self) -> usize {
        let mut seen = vec![false; self.num_classes()];
        for &l in &self.labels {
            seen[l] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut ids = Vec::with_capacity(indices.len());
        let mut vectors = Vec::with_capacity(indices.len() * self.dim);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            ids.push(self.ids[i].clone());
            vectors.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Self::new(ids, self.dim, vectors, labels, self.class_names.clone())
    }

    /// A copy with the given labels replaced.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Self::new(
            self.ids.clone(),
            self.dim,
            self.vectors.clone(),
            labels,
            self.class_names.clone(),
        )
    }

    /// Scales every row to unit Euclidean norm.
    ///
    /// Norms are computed in double precision. A zero-norm row is an error.
    pub fn l2_normalize(&self) -> Result<Self> {
        let mut vectors = Vec::with_capacity(self.vectors.len());
        for (row, x) in self.rows().enumerate() {
            let norm = x
                .iter()
                .map(|&v| f64::from(v) * f64::from(v))
                .sum::<f64>()
                .sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroNorm { row });
            }
            vectors.extend(x.iter().map(|&v| (f64::from(v) / norm) as f32));
        }
        Self::new(
            self.ids.clone(),
            self.dim,
            vectors,
            self.labels.clone(),
            self.class_names.clone(),
        )
    }
}

/// Reads the binary embedding file, returning `(N, m, row-major values)`.
pub fn read_embeddings(path: &Path) -> Result<(usize, usize, Vec<f32>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_embeddings(&bytes).map_err(|e| match e {
        Error::Format { message, .. } => Error::format(path.display().to_string(), message),
        other => other,
    })
}

pub(crate) fn decode_embeddings(bytes: &[u8]) -> Result<(usize, usize, Vec<f32>)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format("embeddings", "malformed header: file too short"));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::format("embeddings", "magic mismatch: expected \"NRK1\""));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if n == 0 {
        return Err(Error::Empty("embedding header declares N = 0".into()));
    }
    if m == 0 {
        return Err(Error::format("embeddings", "malformed header: m = 0"));
    }
    let payload = &bytes[HEADER_LEN..];
    let expected = n
        .checked_mul(m)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::format("embeddings", "malformed header: N*m overflows"))?;
    if payload.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: payload.len(),
        });
    }
    let values: Vec<f32> = payload
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    if let Some(row) = values
        .chunks_exact(m)
        .position(|r| r.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFinite { row });
    }
    Ok((n, m, values))
}

pub(crate) fn encode_embeddings(n: usize, m: usize, values: &[f32]) -> Result<Vec<u8>> {
    let to_u32 = |v: usize, what: &str| {
        u32::try_from(v).map_err(|_| Error::InvalidParam(format!("{what} = {v} exceeds u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + values.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&to_u32(n, "N")?.to_le_bytes());
    out.extend_from_slice(&to_u32(m, "m")?.to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Writes the embedding matrix of `ds` in the binary format.
pub fn save_embeddings(path: &Path, ds: &EmbeddingDataset) -> Result<()> {
    let bytes = encode_embeddings(ds.len(), ds.dim(), ds.as_flat())?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Writes `id<TAB>class_name` rows for every instance.
pub fn save_labels(path: &Path, ds: &EmbeddingDataset) -> Result<()> {
    write_lines(path, ds.ids().iter().zip(ds.labels()).map(|(id, &l)| {
        format!("{id}\t{}", ds.class_name(l))
    }))
}

/// Reads raw `(id, label)` rows from a label TSV.
pub fn read_label_rows(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ctx = path.display().to_string();
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (id, label) = line.split_once('\t').ok_or_else(|| {
            Error::format(&ctx, format!("line {}: expected id<TAB>label", lineno + 1))
        })?;
        if id.is_empty() || label.is_empty() || label.contains('\t') {
            return Err(Error::format(
                &ctx,
                format!("line {}: expected id<TAB>label", lineno + 1),
            ));
        }
        rows.push((id.to_string(), label.to_string()));
    }
    Ok(rows)
}

/// Maps raw label strings to class indices.
///
/// With `classes` given, every label must name one of them. Otherwise
/// all-integer labels are used as indices and anything else is densified in
/// first-appearance order.
pub fn densify_labels(
    raw: &[String],
    classes: Option<&[String]>,
) -> Result<(Vec<usize>, Vec<String>)> {
    if let Some(classes) = classes {
        let lookup: HashMap<&str, usize> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let labels = raw
            .iter()
            .map(|r| {
                lookup
                    .get(r.as_str())
                    .copied()
                    .ok_or_else(|| Error::UnknownLabel(r.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((labels, classes.to_vec()));
    }

    let numeric: Option<Vec<usize>> = raw.iter().map(|r| r.parse::<usize>().ok()).collect();
    if let Some(labels) = numeric {
        let c = labels.iter().max().map_or(0, |&m| m + 1);
        let names = (0..c).map(|i| i.to_string()).collect();
        return Ok((labels, names));
    }

    let mut names: Vec<String> = Vec::new();
    let mut lookup: HashMap<&str, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(raw.len());
    for r in raw {
        let next = names.len();
        let idx = *lookup.entry(r.as_str()).or_insert(next);
        if idx == next {
            names.push(r.clone());
        }
        labels.push(idx);
    }
    Ok((labels, names))
}

/// Loads and validates an embedding file plus its label TSV.
pub fn load_dataset(embedding_path: &Path, label_path: &Path) -> Result<EmbeddingDataset> {
    load_dataset_with_classes(embedding_path, label_path, None)
}

/// Like [`load_dataset`], resolving labels against an explicit class list.
pub fn load_dataset_with_classes(
    embedding_path: &Path,
    label_path: &Path,
    classes: Option<&[String]>,
) -> Result<EmbeddingDataset> {
    let (n, m, values) = read_embeddings(embedding_path)?;
    let rows = read_label_rows(label_path)?;
    if rows.len() != n {
        return Err(Error::RowCountMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    let (ids, raw): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
    let (labels, names) = densify_labels(&raw, classes)?;
    EmbeddingDataset::new(ids, m, values, labels, names)
}

/// Reads a class list file: one class name per line.
pub fn read_class_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

pub(crate) fn write_lines<I, S>(path: &Path, lines: I) -> Result<()>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        w.write_all(line.as_ref().as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
