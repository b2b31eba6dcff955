//! CSV ingestion and output: generic numeric datasets, the 17-column
//! letter-recognition format, and label / centroid writers.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::{CentroidSet, LabelVector, PointSet, OUTLIER};

/// Which columns of a CSV file hold features and which the truth label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub feature_columns: Vec<usize>,
    pub label_column: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvDataset {
    pub points: PointSet,
    pub truth: Option<LabelVector>,
    /// Category name of every truth label id.
    pub class_names: Vec<String>,
    pub source: PathBuf,
    pub columns: ColumnMapping,
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// `None` detects a header from a non-numeric first row.
    pub has_header: Option<bool>,
    /// Zero-based column holding a categorical truth label.
    pub label_column: Option<usize>,
    /// Per-coordinate standardization of the features.
    pub standardize: bool,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn read_records(path: &Path) -> Result<Vec<(usize, csv::StringRecord)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(path, line, e.to_string())
        })?;
        let line = record
            .position()
            .map_or(out.len() + 1, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push((line, record));
    }
    Ok(out)
}

/// Reads a comma-separated numeric dataset.
pub fn read_csv(path: impl AsRef<Path>, opts: &CsvOptions) -> Result<CsvDataset> {
    let path = path.as_ref();
    let mut records = read_records(path)?;
    ensure!(!records.is_empty(), "{} holds no rows", path.display());
    let width = records[0].1.len();
    if let Some(l) = opts.label_column {
        ensure!(
            l < width,
            "label column {l} out of range for {width} columns"
        );
    }
    let features: Vec<usize> = (0..width)
        .filter(|&j| Some(j) != opts.label_column)
        .collect();
    ensure!(!features.is_empty(), "no feature columns");

    let header = opts.has_header.unwrap_or_else(|| {
        features
            .iter()
            .any(|&j| records[0].1[j].parse::<f64>().is_err())
    });
    if header {
        records.remove(0);
    }
    ensure!(
        !records.is_empty(),
        "{} holds only a header",
        path.display()
    );

    let mut data = Vec::with_capacity(records.len() * features.len());
    let mut names: Vec<String> = Vec::new();
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut labels = Vec::new();
    for (line, record) in &records {
        if record.len() != width {
            return Err(parse_error(
                path,
                *line,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        for &j in &features {
            let v: f64 = record[j].parse().map_err(|_| {
                parse_error(
                    path,
                    *line,
                    format!("column {j}: `{}` is not a number", &record[j]),
                )
            })?;
            if !v.is_finite() {
                return Err(parse_error(
                    path,
                    *line,
                    format!("column {j}: non-finite value"),
                ));
            }
            data.push(v);
        }
        if let Some(l) = opts.label_column {
            let name = record[l].to_string();
            let next = names.len();
            let id = *ids.entry(name.clone()).or_insert_with(|| {
                names.push(name);
                next
            });
            labels.push(id);
        }
    }
    let mut points = PointSet::from_flat(data, features.len())?;
    if opts.standardize {
        points = points.standardized()?;
    }
    let truth = match opts.label_column {
        Some(_) => Some(LabelVector::new(labels, names.len().max(1))?),
        None => None,
    };
    Ok(CsvDataset {
        points,
        truth,
        class_names: names,
        source: path.to_path_buf(),
        columns: ColumnMapping {
            feature_columns: features,
            label_column: opts.label_column,
        },
    })
}

/// Reads centroids, one per row, optional header.
pub fn read_centroids_csv(path: impl AsRef<Path>) -> Result<CentroidSet> {
    let ds = read_csv(path, &CsvOptions::default())?;
    Ok(CentroidSet::from(ds.points))
}

/// One row of the letter-recognition file.
#[derive(Debug, Clone, PartialEq)]
pub struct LetterRecord {
    pub letter: char,
    pub features: [f64; 16],
}

pub const LETTERS_FORMAT: &str =
    "one row per sample: `LETTER,f1,...,f16` with an uppercase letter and 16 integers in 0..=15";

pub fn read_letters(path: impl AsRef<Path>) -> Result<Vec<LetterRecord>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for (line, record) in read_records(path)? {
        if record.len() != 17 {
            return Err(parse_error(
                path,
                line,
                format!(
                    "expected 17 fields ({LETTERS_FORMAT}), found {}",
                    record.len()
                ),
            ));
        }
        let mut chars = record[0].chars();
        let letter = match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_uppercase() => c,
            _ => {
                return Err(parse_error(
                    path,
                    line,
                    format!("`{}` is not an uppercase letter", &record[0]),
                ))
            }
        };
        let mut features = [0.0; 16];
        for (j, f) in features.iter_mut().enumerate() {
            let v: u8 = record[j + 1].parse().map_err(|_| {
                parse_error(
                    path,
                    line,
                    format!(
                        "attribute {}: `{}` is not an integer",
                        j + 1,
                        &record[j + 1]
                    ),
                )
            })?;
            if v > 15 {
                return Err(parse_error(
                    path,
                    line,
                    format!("attribute {}: {v} outside 0..=15", j + 1),
                ));
            }
            *f = v as f64;
        }
        out.push(LetterRecord { letter, features });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LettersSample {
    pub dataset: CsvDataset,
    /// `true` for sampled class members, `false` for appended outliers.
    pub keep_mask: Vec<bool>,
}

/// Draws `per_class` rows of each class (truth ids follow `classes` order)
/// and appends `outlier_count` rows of `outlier_class` labeled
/// [`OUTLIER`].
pub fn sample_letters(
    records: &[LetterRecord],
    source: &Path,
    classes: &[char],
    per_class: usize,
    outlier_class: Option<char>,
    outlier_count: usize,
    seed: u64,
) -> Result<LettersSample> {
    ensure!(!classes.is_empty(), "no classes requested");
    ensure!(per_class >= 1, "per_class must be >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows_of = |c: char| -> Vec<usize> {
        records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.letter == c)
            .map(|(i, _)| i)
            .collect()
    };
    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut keep_mask = Vec::new();
    let mut draw = |c: char, count: usize, label: usize, keep: bool| -> Result<()> {
        let rows = rows_of(c);
        if rows.len() < count {
            return Err(Error::contract(format!(
                "class {c} has {} rows, {count} requested",
                rows.len()
            )));
        }
        for pick in sample(&mut rng, rows.len(), count).into_iter() {
            data.extend_from_slice(&records[rows[pick]].features);
            labels.push(label);
            keep_mask.push(keep);
        }
        Ok(())
    };
    for (g, &c) in classes.iter().enumerate() {
        draw(c, per_class, g, true)?;
    }
    if let Some(c) = outlier_class {
        if outlier_count > 0 {
            draw(c, outlier_count, OUTLIER, false)?;
        }
    }
    Ok(LettersSample {
        dataset: CsvDataset {
            points: PointSet::from_flat(data, 16)?,
            truth: Some(LabelVector::with_outliers(labels, classes.len())?),
            class_names: classes.iter().map(|c| c.to_string()).collect(),
            source: source.to_path_buf(),
            columns: ColumnMapping {
                feature_columns: (1..17).collect(),
                label_column: Some(0),
            },
        },
        keep_mask,
    })
}

/// Reads the letters file and subsamples it; see [`sample_letters`].
pub fn ingest_letters(
    path: impl AsRef<Path>,
    classes: &[char],
    per_class: usize,
    outlier_class: Option<char>,
    outlier_count: usize,
    seed: u64,
) -> Result<LettersSample> {
    let path = path.as_ref();
    ensure!(per_class >= 1, "per_class must be >= 1");
    let records = read_letters(path)?;
    sample_letters(
        &records,
        path,
        classes,
        per_class,
        outlier_class,
        outlier_count,
        seed,
    )
}

/// `row_index,label` with 1-based cluster labels and 0 for outliers.
pub fn write_labels_csv(path: impl AsRef<Path>, labels: &LabelVector) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("row_index,label\n");
    for (i, &l) in labels.as_slice().iter().enumerate() {
        let shown = if l == OUTLIER { 0 } else { l + 1 };
        out.push_str(&format!("{i},{shown}\n"));
    }
    write_file(path, out.as_bytes())
}

/// One centroid per row, no header.
pub fn write_centroids_csv(path: impl AsRef<Path>, centroids: &CentroidSet) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for c in centroids.centers() {
        let row: Vec<String> = c.iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Writes `bytes` to `path`, creating missing parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_detection_and_labels() {
        let f = tmp("x,y,class\n0,0,a\n1,1,b\n0.5,0.5,a\n");
        let ds = read_csv(
            f.path(),
            &CsvOptions {
                label_column: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(ds.points.n(), 3);
        assert_eq!(ds.truth.unwrap().as_slice(), &[0, 1, 0]);
        assert_eq!(ds.class_names, vec!["a", "b"]);
    }

    #[test]
    fn malformed_row_names_the_line() {
        let f = tmp("1,2\n3,oops\n5,6\n");
        match read_csv(f.path(), &CsvOptions::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_row() {
        let f = tmp("1,2\n3\n");
        assert!(matches!(
            read_csv(f.path(), &CsvOptions::default()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn letters_validation() {
        let good = "A,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,0\n";
        assert_eq!(read_letters(tmp(good).path()).unwrap().len(), 1);
        let wide = "A,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16\n";
        assert!(read_letters(tmp(wide).path()).is_err());
        let short = "A,1,2\n";
        assert!(read_letters(tmp(short).path()).is_err());
        let lower = "a,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,0\n";
        assert!(read_letters(tmp(lower).path()).is_err());
    }

    #[test]
    fn letters_per_class_zero() {
        let f = tmp("A,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,0\n");
        assert!(ingest_letters(f.path(), &['A'], 0, None, 0, 1).is_err());
    }

    #[test]
    fn short_class_is_named() {
        let f = tmp("A,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,0\n");
        let err = ingest_letters(f.path(), &['A', 'B'], 1, None, 0, 1).unwrap_err();
        assert!(err.to_string().contains("class B"));
    }

    #[test]
    fn labels_csv_is_one_based() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("labels.csv");
        let l = LabelVector::with_outliers(vec![0, 1, OUTLIER], 2).unwrap();
        write_labels_csv(&p, &l).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "row_index,label\n0,1\n1,2\n2,0\n");
    }
}
