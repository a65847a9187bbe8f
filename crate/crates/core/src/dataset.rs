//! Test-item validity corpus: CSV ingestion, validation and min-max scaling.
//!
//! Each item is a six-component cognitive-dimension profile (percentages of
//! test items at C1..C6) paired with the validity coefficient of the test.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::network::Sample;

/// Number of profile features per item.
pub const FEATURE_COUNT: usize = 6;

/// Column names of the profile features, in storage order.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["c1", "c2", "c3", "c4", "c5", "c6"];

/// Column name of the regression target.
pub const TARGET_NAME: &str = "validity";

/// The sample dataset shipped with the crate.
pub const SAMPLE_CSV: &str = include_str!("../data/sample_items.csv");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("missing column `{0}` in header")]
    MissingColumn(String),
    #[error("unknown column `{0}` in header")]
    UnknownColumn(String),
    #[error("duplicate column `{0}` in header")]
    DuplicateColumn(String),
    #[error("input has no header row")]
    NoHeader,
    #[error("row {row}: expected {expected} cells, found {found}")]
    CellCount { row: usize, expected: usize, found: usize },
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    Parse { row: usize, column: String, value: String },
    #[error("row {row}, column `{column}`: value {value} outside [{lo}, {hi}]")]
    OutOfRange { row: usize, column: String, value: f64, lo: f64, hi: f64 },
    #[error("dataset is empty")]
    Empty,
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// One test item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Item {
    /// Percentages at C1..C6.
    pub profile: [f64; FEATURE_COUNT],
    pub validity: f64,
}

impl Item {
    /// Builds an item, checking the per-cell range constraints.
    pub fn new(profile: [f64; FEATURE_COUNT], validity: f64) -> Result<Self, DatasetError> {
        for (name, &v) in FEATURE_NAMES.iter().zip(profile.iter()) {
            check_range(0, name, v, 0.0, 100.0)?;
        }
        check_range(0, TARGET_NAME, validity, -1.0, 1.0)?;
        Ok(Self { profile, validity })
    }

    pub fn c(&self, dimension: usize) -> f64 {
        self.profile[dimension]
    }
}

fn check_range(row: usize, column: &str, value: f64, lo: f64, hi: f64) -> Result<(), DatasetError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(DatasetError::OutOfRange { row, column: column.to_string(), value, lo, hi })
    }
}

/// An ordered collection of items. Order is exactly the order read.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub items: Vec<Item>,
    pub source_name: String,
}

impl Dataset {
    pub fn new(source_name: impl Into<String>, items: Vec<Item>) -> Self {
        Self { items, source_name: source_name.into() }
    }

    /// The bundled sample dataset.
    pub fn sample() -> Self {
        parse_csv(SAMPLE_CSV, "sample_items.csv").expect("bundled sample is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatasetError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        parse_csv(&text, name)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn ensure_non_empty(&self) -> Result<(), DatasetError> {
        if self.items.is_empty() {
            Err(DatasetError::Empty)
        } else {
            Ok(())
        }
    }
}

/// Parses the `c1,c2,c3,c4,c5,c6,validity` CSV format.
///
/// Header names are matched case-insensitively and may appear in any order.
/// Blank lines are skipped; row numbers in errors are 1-based file lines.
pub fn parse_csv(text: &str, source_name: impl Into<String>) -> Result<Dataset, DatasetError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let (_, header) = lines.next().ok_or(DatasetError::NoHeader)?;
    let header = header.trim_start_matches('\u{feff}');

    // column position -> slot (0..6 profile, 6 target)
    let mut slot_of_column = Vec::new();
    let mut seen = [false; FEATURE_COUNT + 1];
    for raw in header.split(',') {
        let name = raw.trim().to_ascii_lowercase();
        let slot = FEATURE_NAMES
            .iter()
            .position(|f| *f == name)
            .or_else(|| (name == TARGET_NAME).then_some(FEATURE_COUNT))
            .ok_or_else(|| DatasetError::UnknownColumn(raw.trim().to_string()))?;
        if seen[slot] {
            return Err(DatasetError::DuplicateColumn(name));
        }
        seen[slot] = true;
        slot_of_column.push(slot);
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        let name = FEATURE_NAMES.get(missing).copied().unwrap_or(TARGET_NAME);
        return Err(DatasetError::MissingColumn(name.to_string()));
    }

    let mut items = Vec::new();
    for (row, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != slot_of_column.len() {
            return Err(DatasetError::CellCount {
                row,
                expected: slot_of_column.len(),
                found: cells.len(),
            });
        }
        let mut values = [0.0; FEATURE_COUNT + 1];
        for (cell, &slot) in cells.iter().zip(&slot_of_column) {
            let column = FEATURE_NAMES.get(slot).copied().unwrap_or(TARGET_NAME);
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| DatasetError::Parse {
                row,
                column: column.to_string(),
                value: cell.to_string(),
            })?;
            let (lo, hi) = if slot == FEATURE_COUNT { (-1.0, 1.0) } else { (0.0, 100.0) };
            check_range(row, column, value, lo, hi)?;
            values[slot] = value;
        }
        let mut profile = [0.0; FEATURE_COUNT];
        profile.copy_from_slice(&values[..FEATURE_COUNT]);
        items.push(Item { profile, validity: values[FEATURE_COUNT] });
    }

    Ok(Dataset::new(source_name, items))
}

/// Writes the canonical header and one line per item. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn serialize_csv(d: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("c1,c2,c3,c4,c5,c6,validity\n");
    for item in &d.items {
        for v in item.profile {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{}", item.validity);
    }
    out
}

/// Both views are the full dataset: recognition is scored on the training
/// patterns themselves.
pub fn train_test_view(d: &Dataset) -> Result<(Dataset, Dataset), DatasetError> {
    d.ensure_non_empty()?;
    Ok((d.clone(), d.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
}

impl FeatureRange {
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }
}

/// Per-feature min-max parameters mapping `[min, max]` onto `[-1, 1]`.
/// The target is never transformed.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    pub ranges: [FeatureRange; FEATURE_COUNT],
}

/// A normalized item: scaled features, raw target, and how many features
/// had to be clamped into range.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub features: [f64; FEATURE_COUNT],
    pub target: f64,
    pub clamped: usize,
}

pub fn fit_normalizer(d: &Dataset) -> Result<NormalizationParams, DatasetError> {
    d.ensure_non_empty()?;
    let first = d.items[0].profile;
    let mut ranges = first.map(|v| FeatureRange { min: v, max: v });
    for item in &d.items[1..] {
        for (r, &v) in ranges.iter_mut().zip(item.profile.iter()) {
            r.min = r.min.min(v);
            r.max = r.max.max(v);
        }
    }
    Ok(NormalizationParams { ranges })
}

impl NormalizationParams {
    pub fn constant_features(&self) -> Vec<usize> {
        (0..FEATURE_COUNT).filter(|&i| self.ranges[i].is_constant()).collect()
    }

    /// Scales one feature value. Returns the scaled value and whether it was clamped.
    pub fn scale(&self, feature: usize, value: f64) -> (f64, bool) {
        let r = self.ranges[feature];
        if r.is_constant() {
            return (0.0, value != r.min);
        }
        let clamped = value < r.min || value > r.max;
        let v = value.clamp(r.min, r.max);
        let scaled = 2.0 * (v - r.min) / (r.max - r.min) - 1.0;
        (scaled.clamp(-1.0, 1.0), clamped)
    }

    /// Inverse of [`scale`](Self::scale) for non-constant features.
    pub fn unscale(&self, feature: usize, scaled: f64) -> f64 {
        let r = self.ranges[feature];
        if r.is_constant() {
            return r.min;
        }
        r.min + (scaled + 1.0) * 0.5 * (r.max - r.min)
    }

    pub fn normalize(&self, item: &Item) -> Normalized {
        let mut features = [0.0; FEATURE_COUNT];
        let mut clamped = 0;
        for (i, f) in features.iter_mut().enumerate() {
            let (v, c) = self.scale(i, item.profile[i]);
            *f = v;
            clamped += usize::from(c);
        }
        Normalized { features, target: item.validity, clamped }
    }

    /// Network-ready samples for a whole dataset, plus the total clamp count.
    pub fn samples(&self, d: &Dataset) -> (Vec<Sample>, usize) {
        let mut clamped = 0;
        let samples = d
            .items
            .iter()
            .map(|item| {
                let n = self.normalize(item);
                clamped += n.clamped;
                Sample::new(n.features.to_vec(), n.target)
            })
            .collect();
        (samples, clamped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_one(row: &str) -> Result<Dataset, DatasetError> {
        parse_csv(&format!("c1,c2,c3,c4,c5,c6,validity\n{row}\n"), "t")
    }

    #[test]
    fn parses_first_and_last_table_rows() {
        let d = parse_one("20,35,0,45,0,0,0.351").unwrap();
        assert_eq!(d.items[0].profile, [20.0, 35.0, 0.0, 45.0, 0.0, 0.0]);
        assert_eq!(d.items[0].validity, 0.351);
        let d = parse_one("0,0,45,52.5,0,2.5,0.458").unwrap();
        assert_eq!(d.items[0].validity, 0.458);
        assert_eq!(d.items[0].c(3), 52.5);
    }

    #[test]
    fn all_zero_profile_is_valid() {
        let d = parse_one("0,0,0,0,0,0,0").unwrap();
        assert_eq!(d.items[0].profile, [0.0; 6]);
    }

    #[test]
    fn header_is_case_insensitive_and_reorderable() {
        let d = parse_csv("Validity,C6,c5,C4,c3,C2,c1\r\n0.5,1,2,3,4,5,6\r\n", "t").unwrap();
        assert_eq!(d.items[0].profile, [6.0, 5.0, 4.0, 3.0, 2.0, 1.0]);
        assert_eq!(d.items[0].validity, 0.5);
    }

    #[test]
    fn schema_errors_name_the_column() {
        match parse_csv("c1,c2,c3,c4,c5,validity\n", "t") {
            Err(DatasetError::MissingColumn(c)) => assert_eq!(c, "c6"),
            other => panic!("{other:?}"),
        }
        match parse_csv("c1,c2,c3,c4,c5,c6,validity,c7\n", "t") {
            Err(DatasetError::UnknownColumn(c)) => assert_eq!(c, "c7"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_row_and_column() {
        match parse_one("20,35,x,45,0,0,0.351") {
            Err(DatasetError::Parse { row, column, value }) => {
                assert_eq!((row, column.as_str(), value.as_str()), (2, "c3", "x"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        assert!(matches!(parse_one("101,0,0,0,0,0,0.1"), Err(DatasetError::OutOfRange { .. })));
        assert!(matches!(parse_one("-1,0,0,0,0,0,0.1"), Err(DatasetError::OutOfRange { .. })));
        assert!(matches!(parse_one("1,0,0,0,0,0,1.5"), Err(DatasetError::OutOfRange { .. })));
        assert!(matches!(parse_one("1,0,0,0,0,0,NaN"), Err(DatasetError::OutOfRange { .. })));
    }

    #[test]
    fn sample_file_matches_printed_rows() {
        let d = Dataset::sample();
        assert_eq!(d.len(), 20);
        assert_eq!(d.items[0].validity, 0.351);
        assert_eq!(d.items[19].validity, 0.458);
        // row 2 sums to 50: no sum-to-100 constraint
        assert_eq!(d.items[1].profile.iter().sum::<f64>(), 50.0);
    }

    #[test]
    fn normalizer_ranges() {
        let mk = |v: f64| Item::new([v, 12.5, 0.0, 0.0, 0.0, 0.0], 0.1).unwrap();
        let d = Dataset::new("t", vec![mk(0.0), mk(50.0), mk(100.0)]);
        let p = fit_normalizer(&d).unwrap();
        assert_eq!(p.ranges[0], FeatureRange { min: 0.0, max: 100.0 });
        assert!(p.ranges[1].is_constant());
        assert_eq!(p.ranges[1].min, 12.5);
        assert_eq!(p.scale(0, 0.0).0, -1.0);
        assert_eq!(p.scale(0, 50.0).0, 0.0);
        assert_eq!(p.scale(0, 100.0).0, 1.0);
        assert_eq!(p.scale(1, 12.5), (0.0, false));
        assert_eq!(p.scale(1, 99.0).0, 0.0);
    }

    #[test]
    fn sample_c5_is_constant_zero() {
        let p = fit_normalizer(&Dataset::sample()).unwrap();
        assert_eq!(p.ranges[4], FeatureRange { min: 0.0, max: 0.0 });
        assert!(p.constant_features().contains(&4));
    }

    #[test]
    fn out_of_range_inputs_are_clamped_and_counted() {
        let mk = |a: f64, b: f64| Item::new([a, b, 0.0, 0.0, 0.0, 0.0], 0.0).unwrap();
        let p = fit_normalizer(&Dataset::new("t", vec![mk(10.0, 10.0), mk(20.0, 30.0)])).unwrap();
        let n = p.normalize(&mk(50.0, 0.0));
        assert_eq!(n.features[0], 1.0);
        assert_eq!(n.features[1], -1.0);
        assert_eq!(n.clamped, 2);
    }

    #[test]
    fn empty_dataset_errors() {
        let d = Dataset::new("empty", vec![]);
        assert!(matches!(fit_normalizer(&d), Err(DatasetError::Empty)));
        assert!(matches!(train_test_view(&d), Err(DatasetError::Empty)));
    }

    #[test]
    fn train_and_test_views_are_the_full_dataset() {
        let d = Dataset::sample();
        let (train, test) = train_test_view(&d).unwrap();
        assert_eq!(train, d);
        assert_eq!(test, d);
        let one = Dataset::new("one", vec![d.items[0]]);
        let (a, b) = train_test_view(&one).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
    }
}
