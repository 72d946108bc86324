//! Tabular data: schema, CSV ingestion, train/test splitting, permutations and
//! border quantization of numerical features.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::{self, Domain};

/// Category string used for missing categorical cells.
pub const MISSING_CATEGORY: &str = "<missing>";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numerical,
    Categorical,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaColumn {
    pub name: String,
    pub kind: ColumnKind,
}

/// Column names and kinds of a CSV file, in header order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSchema {
    columns: Vec<SchemaColumn>,
}

impl FeatureSchema {
    pub fn new(columns: Vec<SchemaColumn>) -> Result<Self> {
        let targets = columns.iter().filter(|c| c.kind == ColumnKind::Target).count();
        if targets != 1 {
            return Err(Error::Schema(format!(
                "expected exactly one target column, found {targets}"
            )));
        }
        if columns.len() < 2 {
            return Err(Error::Schema("at least one feature column is required".into()));
        }
        let mut seen = HashMap::new();
        for (i, c) in columns.iter().enumerate() {
            if let Some(prev) = seen.insert(c.name.as_str(), i) {
                return Err(Error::Schema(format!(
                    "duplicate column name {:?} (columns {prev} and {i})",
                    c.name
                )));
            }
        }
        Ok(Self { columns })
    }

    /// Every header column is numerical unless listed as categorical or named as the target.
    pub fn from_header<S: AsRef<str>>(header: &[S], categorical: &[S], target: &str) -> Result<Self> {
        for c in categorical {
            if !header.iter().any(|h| h.as_ref() == c.as_ref()) {
                return Err(Error::Schema(format!(
                    "categorical column {:?} not in header",
                    c.as_ref()
                )));
            }
        }
        if !header.iter().any(|h| h.as_ref() == target) {
            return Err(Error::Schema(format!("target column {target:?} not in header")));
        }
        let columns = header
            .iter()
            .map(|h| {
                let name = h.as_ref().to_string();
                let kind = if name == target {
                    ColumnKind::Target
                } else if categorical.iter().any(|c| c.as_ref() == name) {
                    ColumnKind::Categorical
                } else {
                    ColumnKind::Numerical
                };
                SchemaColumn { name, kind }
            })
            .collect();
        Self::new(columns)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: FeatureSchema = serde_json::from_str(text)?;
        Self::new(raw.columns)
    }

    pub fn columns(&self) -> &[SchemaColumn] {
        &self.columns
    }

    pub fn target_name(&self) -> &str {
        self.columns
            .iter()
            .find(|c| c.kind == ColumnKind::Target)
            .map(|c| c.name.as_str())
            .expect("schema validated with one target")
    }
}

/// Which cell values count as missing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissingPolicy {
    pub tokens: Vec<String>,
}

impl Default for MissingPolicy {
    fn default() -> Self {
        Self {
            tokens: ["", "NA", "NaN", "nan", "null", "?"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl MissingPolicy {
    fn is_missing(&self, cell: &str) -> bool {
        self.tokens.iter().any(|t| t == cell)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericSource {
    /// Raw value of the named CSV column, zero when missing.
    Column(String),
    /// 1 when the named CSV column is missing, else 0.
    MissingFlag(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericFeature {
    pub name: String,
    pub source: NumericSource,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalFeature {
    pub name: String,
    /// Category strings in id order (first appearance).
    pub vocabulary: Vec<String>,
}

impl CategoricalFeature {
    /// Id assigned to categories not in the vocabulary.
    pub fn reserved_id(&self) -> u32 {
        self.vocabulary.len() as u32
    }
}

/// Feature layout derived from a training file: numerical features (including
/// missing-value indicators) and categorical vocabularies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnLayout {
    pub numeric: Vec<NumericFeature>,
    pub categorical: Vec<CategoricalFeature>,
    pub target: String,
}

/// An in-memory dataset stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    layout: ColumnLayout,
    numeric: Vec<Vec<f64>>,
    categorical: Vec<Vec<u32>>,
    targets: Vec<f64>,
}

impl Dataset {
    pub fn builder() -> DatasetBuilder {
        DatasetBuilder::default()
    }

    pub fn layout(&self) -> &ColumnLayout {
        &self.layout
    }

    pub fn n_rows(&self) -> usize {
        self.targets.len()
    }

    pub fn n_numeric(&self) -> usize {
        self.numeric.len()
    }

    pub fn n_categorical(&self) -> usize {
        self.categorical.len()
    }

    pub fn numeric(&self, feature: usize) -> &[f64] {
        &self.numeric[feature]
    }

    pub fn categorical(&self, feature: usize) -> &[u32] {
        &self.categorical[feature]
    }

    /// Number of ids in use for a categorical feature, including the reserved
    /// unseen id when any row carries it.
    pub fn cardinality(&self, feature: usize) -> usize {
        let vocab = self.layout.categorical[feature].vocabulary.len();
        let max = self.categorical[feature].iter().copied().max().map_or(0, |m| m as usize + 1);
        vocab.max(max)
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn numeric_row(&self, row: usize) -> Vec<f64> {
        self.numeric.iter().map(|c| c[row]).collect()
    }

    pub fn categorical_row(&self, row: usize) -> Vec<u32> {
        self.categorical.iter().map(|c| c[row]).collect()
    }

    /// Rows in the given order; vocabularies are shared with `self`.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            layout: self.layout.clone(),
            numeric: self
                .numeric
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            categorical: self
                .categorical
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            targets: rows.iter().map(|&r| self.targets[r]).collect(),
        }
    }

    pub fn mean_target(&self) -> f64 {
        if self.targets.is_empty() {
            return 0.0;
        }
        self.targets.iter().sum::<f64>() / self.targets.len() as f64
    }

    /// Writes the dataset as CSV: numerical features, categorical features
    /// (as their vocabulary strings), then the target.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
        let mut header: Vec<&str> = self.layout.numeric.iter().map(|f| f.name.as_str()).collect();
        header.extend(self.layout.categorical.iter().map(|f| f.name.as_str()));
        header.push(&self.layout.target);
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for row in 0..self.n_rows() {
            record.clear();
            for c in &self.numeric {
                record.push(format!("{}", c[row]));
            }
            for (f, c) in self.categorical.iter().enumerate() {
                let vocab = &self.layout.categorical[f].vocabulary;
                let id = c[row] as usize;
                record.push(vocab.get(id).cloned().unwrap_or_else(|| format!("<unseen:{id}>")));
            }
            record.push(format!("{}", self.targets[row]));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Assembles datasets from in-memory columns.
#[derive(Default)]
pub struct DatasetBuilder {
    numeric: Vec<(String, Vec<f64>)>,
    categorical: Vec<(String, Vec<String>, Vec<u32>)>,
    target: Option<(String, Vec<f64>)>,
}

impl DatasetBuilder {
    pub fn numeric(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.numeric.push((name.into(), values));
        self
    }

    /// Categorical column given as raw strings, interned by first appearance.
    pub fn categorical<S: AsRef<str>>(mut self, name: impl Into<String>, values: &[S]) -> Self {
        let mut interner = Interner::default();
        let ids = values.iter().map(|v| interner.intern(v.as_ref())).collect();
        self.categorical.push((name.into(), interner.vocabulary, ids));
        self
    }

    /// Categorical column given as dense ids `0..cardinality`.
    pub fn categorical_ids(mut self, name: impl Into<String>, ids: Vec<u32>, cardinality: usize) -> Self {
        let vocabulary = (0..cardinality).map(|i| i.to_string()).collect();
        self.categorical.push((name.into(), vocabulary, ids));
        self
    }

    pub fn target(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.target = Some((name.into(), values));
        self
    }

    pub fn build(self) -> Result<Dataset> {
        let (target_name, targets) = self
            .target
            .ok_or_else(|| Error::Schema("dataset has no target".into()))?;
        if self.numeric.is_empty() && self.categorical.is_empty() {
            return Err(Error::Schema("at least one feature column is required".into()));
        }
        let n = targets.len();
        if targets.iter().any(|y| !y.is_finite()) {
            return Err(Error::Schema("targets must be finite".into()));
        }
        let mut layout = ColumnLayout {
            numeric: Vec::new(),
            categorical: Vec::new(),
            target: target_name,
        };
        let mut numeric = Vec::new();
        for (name, values) in self.numeric {
            if values.len() != n {
                return Err(Error::Schema(format!("column {name:?} has {} rows, expected {n}", values.len())));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Schema(format!("column {name:?} has non-finite values")));
            }
            layout.numeric.push(NumericFeature {
                source: NumericSource::Column(name.clone()),
                name,
            });
            numeric.push(values);
        }
        let mut categorical = Vec::new();
        for (name, vocabulary, ids) in self.categorical {
            if ids.len() != n {
                return Err(Error::Schema(format!("column {name:?} has {} rows, expected {n}", ids.len())));
            }
            layout.categorical.push(CategoricalFeature { name, vocabulary });
            categorical.push(ids);
        }
        Ok(Dataset {
            layout,
            numeric,
            categorical,
            targets,
        })
    }
}

#[derive(Default)]
struct Interner {
    index: HashMap<String, u32>,
    vocabulary: Vec<String>,
}

impl Interner {
    fn from_vocabulary(vocabulary: &[String]) -> Self {
        Self {
            index: vocabulary
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), i as u32))
                .collect(),
            vocabulary: vocabulary.to_vec(),
        }
    }

    fn intern(&mut self, value: &str) -> u32 {
        if let Some(&id) = self.index.get(value) {
            return id;
        }
        let id = self.vocabulary.len() as u32;
        self.vocabulary.push(value.to_string());
        self.index.insert(value.to_string(), id);
        id
    }

    fn lookup(&self, value: &str) -> Option<u32> {
        self.index.get(value).copied()
    }
}

struct RawTable {
    header: Vec<String>,
    rows: Vec<csv::StringRecord>,
}

fn read_raw(path: &Path, schema: &FeatureSchema) -> Result<RawTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(std::io::BufReader::new(file));
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let names: Vec<&str> = schema.columns().iter().map(|c| c.name.as_str()).collect();
    if header.len() != names.len() {
        return Err(Error::Schema(format!(
            "header has {} columns but schema has {}",
            header.len(),
            names.len()
        )));
    }
    if let Some((h, s)) = header.iter().zip(&names).find(|(h, s)| h != *s) {
        return Err(Error::Schema(format!("header column {h:?} does not match schema column {s:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        // Data rows are numbered from 1; the header is row 0.
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        rows.push(record);
    }
    Ok(RawTable { header, rows })
}

fn parse_number(cell: &str, row: usize, column: &str) -> Result<f64> {
    let v: f64 = cell.parse().map_err(|_| Error::Parse {
        row,
        message: format!("column {column:?}: {cell:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            row,
            message: format!("column {column:?}: non-finite value {cell:?}"),
        });
    }
    Ok(v)
}

fn parse_targets(raw: &RawTable, schema: &FeatureSchema) -> Result<Vec<f64>> {
    let name = schema.target_name();
    let col = raw.header.iter().position(|h| h == name).expect("validated header");
    raw.rows
        .iter()
        .enumerate()
        .map(|(i, r)| parse_number(r[col].trim(), i + 1, name))
        .collect()
}

/// Loads a CSV file with a header row.
///
/// Categories are interned in order of first appearance; missing categorical
/// cells become the category [`MISSING_CATEGORY`]. Missing numerical cells are
/// replaced by zero and, for every numerical column with at least one missing
/// cell, a 0/1 indicator feature named `<column>_missing` is appended after the
/// regular numerical features.
pub fn load_csv(path: impl AsRef<Path>, schema: &FeatureSchema, missing: &MissingPolicy) -> Result<Dataset> {
    let raw = read_raw(path.as_ref(), schema)?;
    let targets = parse_targets(&raw, schema)?;

    let mut layout = ColumnLayout {
        numeric: Vec::new(),
        categorical: Vec::new(),
        target: schema.target_name().to_string(),
    };
    let mut numeric = Vec::new();
    let mut flags = Vec::new();
    let mut categorical = Vec::new();

    for (col, sc) in schema.columns().iter().enumerate() {
        match sc.kind {
            ColumnKind::Target => {}
            ColumnKind::Numerical => {
                let mut values = Vec::with_capacity(raw.rows.len());
                let mut flag = Vec::with_capacity(raw.rows.len());
                for (i, r) in raw.rows.iter().enumerate() {
                    let cell = r[col].trim();
                    if missing.is_missing(cell) {
                        values.push(0.0);
                        flag.push(1.0);
                    } else {
                        values.push(parse_number(cell, i + 1, &sc.name)?);
                        flag.push(0.0);
                    }
                }
                layout.numeric.push(NumericFeature {
                    name: sc.name.clone(),
                    source: NumericSource::Column(sc.name.clone()),
                });
                numeric.push(values);
                if flag.iter().any(|&f| f > 0.0) {
                    flags.push((
                        NumericFeature {
                            name: format!("{}_missing", sc.name),
                            source: NumericSource::MissingFlag(sc.name.clone()),
                        },
                        flag,
                    ));
                }
            }
            ColumnKind::Categorical => {
                let mut interner = Interner::default();
                let ids = raw
                    .rows
                    .iter()
                    .map(|r| {
                        let cell = r[col].trim();
                        interner.intern(if missing.is_missing(cell) { MISSING_CATEGORY } else { cell })
                    })
                    .collect();
                layout.categorical.push(CategoricalFeature {
                    name: sc.name.clone(),
                    vocabulary: interner.vocabulary,
                });
                categorical.push(ids);
            }
        }
    }
    for (feature, values) in flags {
        layout.numeric.push(feature);
        numeric.push(values);
    }

    Ok(Dataset {
        layout,
        numeric,
        categorical,
        targets,
    })
}

/// Loads a CSV file using the feature layout of a previously loaded training
/// file. Unseen categories get the feature's reserved id.
pub fn load_csv_aligned(
    path: impl AsRef<Path>,
    schema: &FeatureSchema,
    missing: &MissingPolicy,
    layout: &ColumnLayout,
) -> Result<Dataset> {
    let raw = read_raw(path.as_ref(), schema)?;
    if schema.target_name() != layout.target {
        return Err(Error::Schema(format!(
            "target column {:?} does not match model target {:?}",
            schema.target_name(),
            layout.target
        )));
    }
    let targets = parse_targets(&raw, schema)?;
    let column_of = |name: &str, kind: ColumnKind| -> Result<usize> {
        schema
            .columns()
            .iter()
            .position(|c| c.name == name && c.kind == kind)
            .ok_or_else(|| Error::Schema(format!("missing {kind:?} column {name:?}")))
    };

    let mut numeric = Vec::with_capacity(layout.numeric.len());
    for feature in &layout.numeric {
        let values = match &feature.source {
            NumericSource::Column(src) => {
                let col = column_of(src, ColumnKind::Numerical)?;
                raw.rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let cell = r[col].trim();
                        if missing.is_missing(cell) {
                            Ok(0.0)
                        } else {
                            parse_number(cell, i + 1, src)
                        }
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            NumericSource::MissingFlag(src) => {
                let col = column_of(src, ColumnKind::Numerical)?;
                raw.rows
                    .iter()
                    .map(|r| if missing.is_missing(r[col].trim()) { 1.0 } else { 0.0 })
                    .collect()
            }
        };
        numeric.push(values);
    }

    let mut categorical = Vec::with_capacity(layout.categorical.len());
    for feature in &layout.categorical {
        let col = column_of(&feature.name, ColumnKind::Categorical)?;
        let interner = Interner::from_vocabulary(&feature.vocabulary);
        let reserved = feature.reserved_id();
        categorical.push(
            raw.rows
                .iter()
                .map(|r| {
                    let cell = r[col].trim();
                    let cell = if missing.is_missing(cell) { MISSING_CATEGORY } else { cell };
                    interner.lookup(cell).unwrap_or(reserved)
                })
                .collect(),
        );
    }

    let expected_features = layout
        .numeric
        .iter()
        .filter(|f| matches!(f.source, NumericSource::Column(_)))
        .count()
        + layout.categorical.len();
    let schema_features = schema.columns().iter().filter(|c| c.kind != ColumnKind::Target).count();
    if expected_features != schema_features {
        return Err(Error::Schema(format!(
            "file has {schema_features} feature columns, model expects {expected_features}"
        )));
    }

    Ok(Dataset {
        layout: layout.clone(),
        numeric,
        categorical,
        targets,
    })
}

/// Random train/test split. Both parts keep the original row order.
pub fn split(dataset: &Dataset, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid(format!("test_fraction must be in (0, 1), got {test_fraction}")));
    }
    let n = dataset.n_rows();
    if n < 2 {
        return Err(Error::invalid(format!("cannot split {n} rows")));
    }
    let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut random::stream(seed, Domain::Split, 0));
    let (test, train) = rows.split_at_mut(n_test);
    test.sort_unstable();
    train.sort_unstable();
    Ok((dataset.subset(train), dataset.subset(test)))
}

/// A bijection between examples and positions `0..n`.
///
/// `position(i)` is the (zero-based) rank of example `i` in the permutation;
/// `example_at(k)` is its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    seed: u64,
    stream: u64,
    order: Vec<u32>,
    #[serde(skip)]
    ranks: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self::from_order((0..n as u32).collect()).expect("identity is a bijection")
    }

    /// Builds a permutation from the example order (position -> example).
    pub fn from_order(order: Vec<u32>) -> Result<Self> {
        let n = order.len();
        let mut ranks = vec![u32::MAX; n];
        for (pos, &ex) in order.iter().enumerate() {
            let slot = ranks
                .get_mut(ex as usize)
                .ok_or_else(|| Error::invalid(format!("example {ex} out of range for n = {n}")))?;
            if *slot != u32::MAX {
                return Err(Error::invalid(format!("example {ex} appears twice")));
            }
            *slot = pos as u32;
        }
        Ok(Self {
            seed: 0,
            stream: 0,
            order,
            ranks,
        })
    }

    pub fn random(n: usize, seed: u64, stream: u64) -> Self {
        Self::random_in(n, seed, Domain::Permutation, stream)
    }

    pub(crate) fn random_in(n: usize, seed: u64, domain: Domain, stream: u64) -> Self {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.shuffle(&mut random::stream(seed, domain, stream));
        let mut p = Self::from_order(order).expect("shuffle is a bijection");
        p.seed = seed;
        p.stream = stream;
        p
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn position(&self, example: usize) -> usize {
        self.ranks[example] as usize
    }

    pub fn example_at(&self, position: usize) -> usize {
        self.order[position] as usize
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

/// Generates `s + 1` independent permutations of `0..n`, one seeded stream each.
pub fn gen_permutations(n: usize, s: usize, seed: u64) -> Result<Vec<Permutation>> {
    if n == 0 {
        return Err(Error::invalid("cannot permute an empty dataset"));
    }
    if s == 0 {
        return Err(Error::invalid("at least one permutation is required (s >= 1)"));
    }
    Ok((0..=s as u64).map(|k| Permutation::random(n, seed, k)).collect())
}

/// Sorted split thresholds for one feature. A value `x` is on the right side
/// of border `b` when `x > borders[b]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BorderSet {
    borders: Vec<f64>,
}

impl BorderSet {
    pub fn new(borders: Vec<f64>) -> Result<Self> {
        if borders.windows(2).any(|w| w[0] >= w[1]) || borders.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("borders must be finite and strictly increasing"));
        }
        Ok(Self { borders })
    }

    pub fn borders(&self) -> &[f64] {
        &self.borders
    }

    pub fn len(&self) -> usize {
        self.borders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.borders.is_empty()
    }

    /// Number of borders strictly below `value`, so that
    /// `value > borders[b]` iff `bin(value) > b`.
    pub fn bin(&self, value: f64) -> u16 {
        self.borders.partition_point(|&t| t < value) as u16
    }
}

/// Builds at most `border_count` thresholds by equal-frequency bucketing.
///
/// Thresholds are midpoints between adjacent distinct values. When there are
/// at most `border_count + 1` distinct values every midpoint is kept.
pub fn quantize(values: &[f64], border_count: usize) -> Result<BorderSet> {
    if border_count == 0 {
        return Err(Error::invalid("border_count must be at least 1"));
    }
    if border_count > u16::MAX as usize - 1 {
        return Err(Error::invalid(format!("border_count {border_count} exceeds {}", u16::MAX - 1)));
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();

    // Boundaries are indices `i` with sorted[i-1] < sorted[i].
    let boundaries: Vec<usize> = (1..n).filter(|&i| sorted[i - 1] < sorted[i]).collect();
    let chosen: Vec<usize> = if boundaries.len() <= border_count {
        boundaries
    } else {
        let mut picked = Vec::with_capacity(border_count);
        for k in 1..=border_count {
            let target = k * n / (border_count + 1);
            // Nearest boundary to the ideal cut; ties go to the later one.
            let at = boundaries.partition_point(|&b| b < target);
            let candidate = match (at.checked_sub(1).map(|p| boundaries[p]), boundaries.get(at)) {
                (Some(lo), Some(&hi)) => {
                    if target - lo < hi - target {
                        lo
                    } else {
                        hi
                    }
                }
                (Some(lo), None) => lo,
                (None, Some(&hi)) => hi,
                (None, None) => unreachable!("boundaries is non-empty"),
            };
            if picked.last() != Some(&candidate) {
                picked.push(candidate);
            }
        }
        picked
    };

    let borders = chosen
        .into_iter()
        .map(|i| {
            let (lo, hi) = (sorted[i - 1], sorted[i]);
            let mid = lo + (hi - lo) / 2.0;
            if mid > lo && mid < hi {
                mid
            } else {
                lo
            }
        })
        .collect();
    BorderSet::new(borders)
}
