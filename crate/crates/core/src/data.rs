//! Dataset ingestion, label normalization, feature scaling and splitting.
//!
//! Two text formats are supported: delimited rows with one label column, and the
//! sparse `label idx:val ...` format with 1-based ascending indices. IDX decoding
//! for the MNIST files is included for building the digit benchmarks.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: Array2<f64>,
    y: Array1<f64>,
    feature_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>, feature_names: Option<Vec<String>>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidCount(format!(
                "dataset must have at least one row and one feature (got {} x {})",
                x.nrows(),
                x.ncols()
            )));
        }
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        if let Some(names) = &feature_names {
            if names.len() != x.ncols() {
                return Err(Error::DimensionMismatch {
                    expected: x.ncols(),
                    found: names.len(),
                });
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset features"));
        }
        if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidLabel(bad));
        }
        Ok(Dataset { x, y, feature_names })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn into_parts(self) -> (Array2<f64>, Array1<f64>) {
        (self.x, self.y)
    }

    /// Rows `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.n(),
            });
        }
        Dataset::new(
            self.x.select(Axis(0), indices),
            self.y.select(Axis(0), indices),
            self.feature_names.clone(),
        )
    }

    /// Number of samples labelled −1 and +1.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&v| v > 0.0).count();
        (self.n() - pos, pos)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelimitedOptions {
    /// Zero-based label column; `None` means the last column.
    pub label_column: Option<usize>,
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for DelimitedOptions {
    fn default() -> Self {
        DelimitedOptions {
            label_column: None,
            delimiter: b',',
            has_header: false,
        }
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn parse_field(path: &Path, line: usize, column: usize, raw: &str) -> Result<f64> {
    let s = raw.trim();
    if s.is_empty() {
        return Err(Error::MissingValue {
            path: path.to_path_buf(),
            line,
            column,
        });
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message: format!("non-finite value {s:?}"),
        }),
        Err(_) => Err(Error::Parse {
            path: path.to_path_buf(),
            line,
            column,
            message: format!("cannot parse {s:?} as a number"),
        }),
    }
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line() as usize);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

fn numeric_label(raw: &str) -> Option<f64> {
    raw.trim().replace('\u{2212}', "-").parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Map raw label strings onto ±1.
///
/// Labels already in {−1, +1} are kept. Otherwise exactly two distinct values are
/// required and the smaller one becomes −1; values are compared numerically when
/// they all parse as numbers, lexicographically otherwise.
pub fn normalize_labels(path: &Path, raw: &[String]) -> Result<Array1<f64>> {
    let distinct: BTreeSet<&str> = raw.iter().map(|s| s.trim()).collect();
    let not_binary = |found| Error::NotBinary {
        path: path.to_path_buf(),
        found,
    };
    if distinct.len() > 2 {
        return Err(not_binary(distinct.len()));
    }
    let numeric: Option<Vec<f64>> = raw.iter().map(|s| numeric_label(s)).collect();
    if let Some(values) = &numeric {
        if values.iter().all(|&v| v == 1.0 || v == -1.0) {
            return Ok(Array1::from(values.clone()));
        }
    }
    if distinct.len() != 2 {
        return Err(not_binary(distinct.len()));
    }
    let y = match numeric {
        Some(values) => {
            let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
            values.iter().map(|&v| if v == lo { -1.0 } else { 1.0 }).collect()
        }
        None => {
            let lo = *distinct.iter().next().expect("two labels");
            raw.iter().map(|s| if s.trim() == lo { -1.0 } else { 1.0 }).collect()
        }
    };
    Ok(y)
}

pub fn load_delimited(path: &Path, opts: &DelimitedOptions) -> Result<Dataset> {
    let (names, rows) = read_rows(path, opts.delimiter, opts.has_header)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    if width < 2 {
        return Err(Error::InvalidCount(format!(
            "{}: need a label column and at least one feature",
            path.display()
        )));
    }
    let label_col = opts.label_column.unwrap_or(width - 1);
    if label_col >= width {
        return Err(Error::IndexOutOfRange {
            index: label_col,
            len: width,
        });
    }
    let mut x = Array2::zeros((rows.len(), width - 1));
    let mut raw_labels = Vec::with_capacity(rows.len());
    for (i, (line, row)) in rows.iter().enumerate() {
        let mut j = 0;
        for (col, field) in row.iter().enumerate() {
            if col == label_col {
                if field.trim().is_empty() {
                    return Err(Error::MissingValue {
                        path: path.to_path_buf(),
                        line: *line,
                        column: col + 1,
                    });
                }
                raw_labels.push(field.clone());
            } else {
                x[[i, j]] = parse_field(path, *line, col + 1, field)?;
                j += 1;
            }
        }
    }
    let y = normalize_labels(path, &raw_labels)?;
    let names = names.map(|mut n| {
        n.remove(label_col);
        n
    });
    Dataset::new(x, y, names)
}

/// Unlabelled feature rows, e.g. for inference.
pub fn load_features(path: &Path, delimiter: u8, has_header: bool) -> Result<Array2<f64>> {
    let (_, rows) = read_rows(path, delimiter, has_header)?;
    let width = rows.first().map_or(0, |(_, r)| r.len());
    if width == 0 {
        return Err(Error::InvalidCount(format!("{}: no feature rows", path.display())));
    }
    let mut x = Array2::zeros((rows.len(), width));
    for (i, (line, row)) in rows.iter().enumerate() {
        for (col, field) in row.iter().enumerate() {
            x[[i, col]] = parse_field(path, *line, col + 1, field)?;
        }
    }
    Ok(x)
}

type Rows = (Option<Vec<String>>, Vec<(usize, Vec<String>)>);

fn read_rows(path: &Path, delimiter: u8, has_header: bool) -> Result<Rows> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(has_header)
        .flexible(true)
        .from_reader(open(path)?);
    let names = if has_header {
        let h = reader.headers().map_err(|e| csv_error(path, e))?;
        Some(h.iter().map(|s| s.trim().to_string()).collect::<Vec<_>>())
    } else {
        None
    };
    let mut rows = Vec::new();
    let mut width = names.as_ref().map(Vec::len);
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        match width {
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    column: record.len().min(w) + 1,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
            _ => width = Some(record.len()),
        }
        rows.push((line, record.iter().map(str::to_string).collect()));
    }
    if rows.is_empty() {
        return Err(Error::InvalidCount(format!("{}: no data rows", path.display())));
    }
    Ok((names, rows))
}

/// Features followed by the ±1 label in the last column.
pub fn write_delimited(ds: &Dataset, path: &Path, delimiter: u8) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .from_writer(BufWriter::new(file));
    let err = |e: csv::Error| csv_error(path, e);
    if let Some(names) = ds.feature_names() {
        let mut header: Vec<&str> = names.iter().map(String::as_str).collect();
        header.push("label");
        w.write_record(&header).map_err(err)?;
    }
    for (row, &label) in ds.x.outer_iter().zip(ds.y.iter()) {
        let mut fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        fields.push(label.to_string());
        w.write_record(&fields).map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn load_sparse_text(path: &Path) -> Result<Dataset> {
    let reader = BufReader::new(open(path)?);
    let mut raw_labels = Vec::new();
    let mut entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0;
    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label = tokens.next().expect("non-empty line");
        raw_labels.push(label.to_string());
        let mut row = Vec::new();
        let mut prev = 0;
        for (t, token) in tokens.enumerate() {
            let column = t + 2;
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                column,
                message,
            };
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected idx:val, found {token:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(format!("bad feature index {idx:?}")))?;
            if idx == 0 {
                return Err(parse_err("feature indices are 1-based".into()));
            }
            if idx <= prev {
                return Err(Error::NonAscendingIndex {
                    path: path.to_path_buf(),
                    line: line_no,
                });
            }
            prev = idx;
            let val = parse_field(path, line_no, column, val)?;
            dim = dim.max(idx);
            row.push((idx - 1, val));
        }
        entries.push(row);
    }
    if entries.is_empty() {
        return Err(Error::InvalidCount(format!("{}: no data rows", path.display())));
    }
    // A file whose rows are all empty still yields one (zero) feature.
    let mut x = Array2::zeros((entries.len(), dim.max(1)));
    for (i, row) in entries.iter().enumerate() {
        for &(j, v) in row {
            x[[i, j]] = v;
        }
    }
    let y = normalize_labels(path, &raw_labels)?;
    Dataset::new(x, y, None)
}

pub fn write_sparse_text(ds: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for (row, &label) in ds.x.outer_iter().zip(ds.y.iter()) {
        let mut line = String::from(if label > 0.0 { "+1" } else { "-1" });
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                line.push_str(&format!(" {}:{}", j + 1, v));
            }
        }
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    MinMaxUnit,
    ZScore,
    #[default]
    None,
}

impl FromStr for ScalingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minmax" | "min-max" | "min-max-unit" => Ok(ScalingMode::MinMaxUnit),
            "zscore" | "z-score" => Ok(ScalingMode::ZScore),
            "none" => Ok(ScalingMode::None),
            other => Err(Error::InvalidParameter(format!("unknown scaling mode {other:?}"))),
        }
    }
}

/// Per-feature affine map `x' = (x − offset) · scale`. Constant features get
/// `scale = 0` and therefore map to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub mode: ScalingMode,
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

impl ScalingRecord {
    pub fn identity(p: usize) -> Self {
        ScalingRecord {
            mode: ScalingMode::None,
            offset: vec![0.0; p],
            scale: vec![1.0; p],
        }
    }

    pub fn fit(x: ArrayView2<f64>, mode: ScalingMode) -> Self {
        let p = x.ncols();
        let n = x.nrows() as f64;
        let mut rec = ScalingRecord::identity(p);
        rec.mode = mode;
        for (j, col) in x.axis_iter(Axis(1)).enumerate() {
            let (offset, spread) = match mode {
                ScalingMode::None => continue,
                ScalingMode::MinMaxUnit => {
                    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (lo, hi - lo)
                }
                ScalingMode::ZScore => {
                    let mean = col.sum() / n;
                    let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                    (mean, var.sqrt())
                }
            };
            rec.offset[j] = offset;
            rec.scale[j] = if spread > 0.0 { 1.0 / spread } else { 0.0 };
        }
        rec
    }

    fn check(&self, x: &ArrayView2<f64>) -> Result<()> {
        if x.ncols() != self.offset.len() {
            return Err(Error::DimensionMismatch {
                expected: self.offset.len(),
                found: x.ncols(),
            });
        }
        Ok(())
    }

    /// Transform one row; the caller guarantees its length.
    pub fn apply_row(&self, x: ArrayView1<f64>) -> Array1<f64> {
        x.iter()
            .enumerate()
            .map(|(j, v)| (v - self.offset[j]) * self.scale[j])
            .collect()
    }

    pub fn apply(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&x)?;
        let mut out = x.to_owned();
        for mut row in out.outer_iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (*v - self.offset[j]) * self.scale[j];
            }
        }
        Ok(out)
    }

    /// Inverse map; constant features come back as their recorded offset.
    pub fn invert(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check(&x)?;
        let mut out = x.to_owned();
        for mut row in out.outer_iter_mut() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = if self.scale[j] == 0.0 {
                    self.offset[j]
                } else {
                    *v / self.scale[j] + self.offset[j]
                };
            }
        }
        Ok(out)
    }
}

pub fn scale_features(ds: &Dataset, mode: ScalingMode) -> (Dataset, ScalingRecord) {
    let rec = ScalingRecord::fit(ds.x.view(), mode);
    let x = rec.apply(ds.x.view()).expect("record fitted on the same matrix");
    let scaled = Dataset {
        x,
        y: ds.y.clone(),
        feature_names: ds.feature_names.clone(),
    };
    (scaled, rec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 0,
            stratified: true,
        }
    }
}

/// Partition `0..y.len()` into ascending train and test index sets.
///
/// Both sides keep at least one sample of each class, so each class needs at
/// least two samples.
pub fn split_indices(y: &Array1<f64>, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let classes: [Vec<usize>; 2] = [
        (0..y.len()).filter(|&i| y[i] < 0.0).collect(),
        (0..y.len()).filter(|&i| y[i] > 0.0).collect(),
    ];
    for (c, members) in classes.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::InsufficientClassSamples {
                label: if c == 0 { -1.0 } else { 1.0 },
                count: members.len(),
                required: 2,
            });
        }
    }
    let keep = |total: usize| {
        ((spec.train_fraction * total as f64).round() as usize).clamp(1, total - 1)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    if spec.stratified {
        for members in classes {
            let mut members = members;
            members.shuffle(&mut rng);
            let k = keep(members.len());
            train.extend_from_slice(&members[..k]);
            test.extend_from_slice(&members[k..]);
        }
    } else {
        let mut all: Vec<usize> = (0..y.len()).collect();
        all.shuffle(&mut rng);
        // Both sides need room for two classes.
        let k = keep(all.len()).clamp(2, all.len() - 2);
        train = all[..k].to_vec();
        test = all[k..].to_vec();
        ensure_both_classes(y, &mut test, &mut train);
        ensure_both_classes(y, &mut train, &mut test);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Swap one sample into `side` from `other` if `side` is missing a class.
fn ensure_both_classes(y: &Array1<f64>, side: &mut [usize], other: &mut [usize]) {
    for want_pos in [false, true] {
        let is_want = |i: usize| (y[i] > 0.0) == want_pos;
        if side.iter().any(|&i| is_want(i)) {
            continue;
        }
        // `side` is single-class with ≥ 2 members, so giving one away keeps that class.
        let give = 0;
        if let Some(take) = other.iter().position(|&i| is_want(i)) {
            std::mem::swap(&mut side[give], &mut other[take]);
        }
    }
}

pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train, test) = split_indices(&ds.y, spec)?;
    Ok((ds.subset(&train)?, ds.subset(&test)?))
}

/// Greyscale images from an IDX3 file (`0x00000803`), one row per image.
pub fn read_idx_images(path: &Path) -> Result<Array2<u8>> {
    let bytes = read_all(path)?;
    let dims = idx_header(path, &bytes, 0x0803, 3)?;
    let (count, pixels) = (dims[0], dims[1] * dims[2]);
    let body = &bytes[16..];
    if body.len() != count * pixels {
        return Err(idx_error(path, format!(
            "expected {} pixel bytes, found {}",
            count * pixels,
            body.len()
        )));
    }
    Ok(Array2::from_shape_vec((count, pixels), body.to_vec()).expect("length checked"))
}

/// Labels from an IDX1 file (`0x00000801`).
pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = read_all(path)?;
    let dims = idx_header(path, &bytes, 0x0801, 1)?;
    let body = &bytes[8..];
    if body.len() != dims[0] {
        return Err(idx_error(path, format!(
            "expected {} labels, found {}",
            dims[0],
            body.len()
        )));
    }
    Ok(body.to_vec())
}

fn read_all(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    open(path)?
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(path, e))?;
    Ok(bytes)
}

fn idx_error(path: &Path, message: String) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        column: 0,
        message,
    }
}

fn idx_header(path: &Path, bytes: &[u8], magic: u32, ndims: usize) -> Result<Vec<usize>> {
    let header_len = 4 + 4 * ndims;
    if bytes.len() < header_len {
        return Err(idx_error(path, "truncated IDX header".into()));
    }
    let word = |k: usize| u32::from_be_bytes(bytes[4 * k..4 * k + 4].try_into().expect("4 bytes"));
    if word(0) != magic {
        return Err(idx_error(path, format!(
            "IDX magic {:#010x}, expected {magic:#010x}",
            word(0)
        )));
    }
    Ok((1..=ndims).map(|k| word(k) as usize).collect())
}

/// Two-digit subset of an MNIST-style image set with pixels scaled to `[0, 1]`.
///
/// `negative` digits are labelled −1 and `positive` digits +1. With
/// `per_class = Some(k)`, `k` images of each digit are drawn without replacement
/// (seeded); rows are ordered by original index.
pub fn digit_pair(
    images: &Array2<u8>,
    labels: &[u8],
    negative: u8,
    positive: u8,
    per_class: Option<usize>,
    seed: u64,
) -> Result<Dataset> {
    if images.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: images.nrows(),
            found: labels.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for digit in [negative, positive] {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == digit).collect();
        let chosen = match per_class {
            None => members,
            Some(k) if k <= members.len() => {
                rand::seq::index::sample(&mut rng, members.len(), k)
                    .into_iter()
                    .map(|j| members[j])
                    .collect()
            }
            Some(k) => {
                return Err(Error::InsufficientClassSamples {
                    label: digit as f64,
                    count: members.len(),
                    required: k,
                })
            }
        };
        rows.extend(chosen);
    }
    rows.sort_unstable();
    let x = images.select(Axis(0), &rows).mapv(|v| v as f64 / 255.0);
    let y = rows
        .iter()
        .map(|&i| if labels[i] == positive { 1.0 } else { -1.0 })
        .collect();
    Dataset::new(x, y, None)
}

/// Two isotropic Gaussian classes centred at `∓separation/2` along every axis.
pub fn gaussian_blobs(per_class: usize, dim: usize, separation: f64, seed: u64) -> Result<Dataset> {
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * per_class;
    let mut x = Array2::zeros((n, dim));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let label = if i % 2 == 0 { -1.0 } else { 1.0 };
        y[i] = label;
        for j in 0..dim {
            x[[i, j]] = label * separation / 2.0 + noise.sample(&mut rng);
        }
    }
    Dataset::new(x, y, None)
}

/// Uniform points in `[−1, 1]²` labelled by the sign of `x₁·x₂`, with a fraction
/// `flip` of labels flipped.
pub fn xor(n: usize, flip: f64, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 2));
    let mut y = Array1::zeros(n);
    for i in 0..n {
        let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        x[[i, 0]] = a;
        x[[i, 1]] = b;
        let mut label = if a * b >= 0.0 { 1.0 } else { -1.0 };
        if rng.random::<f64>() < flip {
            label = -label;
        }
        y[i] = label;
    }
    Dataset::new(x, y, None)
}
