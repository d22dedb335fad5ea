//! CSV ingestion and the built-in dataset descriptors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bnnprune_core::data::{window_series, Dataset, Targets};
use bnnprune_core::{Matrix, Task};

use crate::error::{Error, Result};

/// A column given by header name, 0-based position, or "last".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnRef {
    Name(String),
    Index(usize),
    Last,
}

impl ColumnRef {
    fn resolve(&self, header: &[String], path: &Path) -> Result<usize> {
        let found = match self {
            ColumnRef::Name(n) => header.iter().position(|h| h == n),
            ColumnRef::Index(i) => (*i < header.len()).then_some(*i),
            ColumnRef::Last => header.len().checked_sub(1),
        };
        found.ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: self.to_string(),
        })
    }
}

impl fmt::Display for ColumnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnRef::Name(n) => f.write_str(n),
            ColumnRef::Index(i) => write!(f, "#{i}"),
            ColumnRef::Last => f.write_str("last"),
        }
    }
}

impl FromStr for ColumnRef {
    type Err = Error;

    /// `#3` is a position, `last` the final column, anything else a name.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::config("empty column reference"));
        }
        if s == "last" {
            return Ok(ColumnRef::Last);
        }
        if let Some(i) = s.strip_prefix('#') {
            return i
                .parse()
                .map(ColumnRef::Index)
                .map_err(|_| Error::config(format!("bad column position {s:?}")));
        }
        Ok(ColumnRef::Name(s.to_string()))
    }
}

/// How the columns of a file become features and targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Schema {
    Table {
        /// `None` means every column that is not the target or dropped.
        features: Option<Vec<ColumnRef>>,
        drop: Vec<ColumnRef>,
        /// Feature columns holding category names, coded by first appearance.
        categorical: Vec<ColumnRef>,
        target: ColumnRef,
        task: Task,
        /// Upper class edges for turning a numeric target into classes:
        /// class = number of edges strictly below the value.
        bins: Option<Vec<f64>>,
    },
    Series {
        column: ColumnRef,
        window: usize,
        horizon: usize,
    },
}

/// A dataset file plus everything needed to turn it into a network problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
    /// `None`: treat the first row as a header iff it is not all numeric.
    pub header: Option<bool>,
    pub schema: Schema,
    pub hidden: usize,
    /// Keep row order when splitting (time series).
    pub ordered: bool,
}

pub const BUILTIN_NAMES: [&str; 9] = [
    "iris",
    "sunspots",
    "lazer",
    "abalone",
    "abalone-regression",
    "ionosphere",
    "exp310",
    "exp325",
    "reef",
];

/// Directory searched for built-in dataset files: `$BNN_DATA_DIR`, then
/// `./data`, then the repository's `data/`.
pub fn data_dir() -> PathBuf {
    if let Some(d) = std::env::var_os("BNN_DATA_DIR") {
        return PathBuf::from(d);
    }
    let local = PathBuf::from("data");
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn table(target: ColumnRef, task: Task) -> Schema {
    Schema::Table {
        features: None,
        drop: Vec::new(),
        categorical: Vec::new(),
        target,
        task,
        bins: None,
    }
}

/// Descriptor for a named dataset, with its file looked up in `dir`.
pub fn builtin(name: &str, dir: &Path) -> Option<DatasetSpec> {
    let spec = |file: &str, schema: Schema, hidden: usize, ordered: bool| DatasetSpec {
        name: name.to_string(),
        path: dir.join(file),
        header: None,
        schema,
        hidden,
        ordered,
    };
    let series = |column: ColumnRef| Schema::Series {
        column,
        window: 4,
        horizon: 1,
    };
    // UCI layout: sex, 7 measurements, rings
    let abalone = |task: Task, bins: Option<Vec<f64>>| Schema::Table {
        features: None,
        drop: Vec::new(),
        categorical: vec![ColumnRef::Index(0)],
        target: ColumnRef::Index(8),
        task,
        bins,
    };
    Some(match name {
        "iris" => spec("iris.csv", table(ColumnRef::Last, Task::Classification), 12, false),
        "sunspots" => spec("sunspots.csv", series(ColumnRef::Last), 5, true),
        "lazer" => spec("lazer.csv", series(ColumnRef::Last), 5, true),
        "abalone" => spec(
            "abalone.csv",
            abalone(Task::Classification, Some(vec![7.0, 10.0, 15.0])),
            12,
            false,
        ),
        "abalone-regression" => spec("abalone.csv", abalone(Task::Regression, None), 12, false),
        "ionosphere" => spec(
            "ionosphere.csv",
            Schema::Table {
                features: None,
                // the second attribute is zero in every row
                drop: vec![ColumnRef::Index(1)],
                categorical: Vec::new(),
                target: ColumnRef::Last,
                task: Task::Classification,
                bins: None,
            },
            50,
            false,
        ),
        "exp310" | "exp325" | "reef" => spec(
            &format!("{name}.csv"),
            table(ColumnRef::Last, Task::Classification),
            8,
            false,
        ),
        _ => return None,
    })
}

/// Raw (unnormalized) dataset from a CSV file.
pub fn load_csv(spec: &DatasetSpec) -> Result<Dataset> {
    let path = spec.path.as_path();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (header, rows) = read_rows(&text, path, spec.header)?;
    match &spec.schema {
        Schema::Series {
            column,
            window,
            horizon,
        } => {
            let c = column.resolve(&header, path)?;
            let series = rows
                .iter()
                .map(|(line, r)| number(&r[c], path, *line, &header[c]))
                .collect::<Result<Vec<f64>>>()?;
            let mut d = window_series(&series, *window, *horizon)?;
            d.name = spec.name.clone();
            Ok(d)
        }
        Schema::Table {
            features,
            drop,
            categorical,
            target,
            task,
            bins,
        } => {
            let t = target.resolve(&header, path)?;
            let dropped = drop
                .iter()
                .map(|c| c.resolve(&header, path))
                .collect::<Result<Vec<_>>>()?;
            let cols: Vec<usize> = match features {
                Some(list) => list
                    .iter()
                    .map(|c| c.resolve(&header, path))
                    .collect::<Result<_>>()?,
                None => (0..header.len())
                    .filter(|c| *c != t && !dropped.contains(c))
                    .collect(),
            };
            if cols.is_empty() {
                return Err(Error::config(format!("{}: no feature columns", path.display())));
            }
            let cat = categorical
                .iter()
                .map(|c| c.resolve(&header, path))
                .collect::<Result<Vec<_>>>()?;

            let mut codes: Vec<Vec<String>> = vec![Vec::new(); header.len()];
            let mut x = Vec::with_capacity(rows.len() * cols.len());
            for (line, r) in &rows {
                for &c in &cols {
                    let v = if cat.contains(&c) {
                        code(&mut codes[c], &r[c]) as f64
                    } else {
                        number(&r[c], path, *line, &header[c])?
                    };
                    x.push(v);
                }
            }
            let features = Matrix::from_vec(rows.len(), cols.len(), x)?;
            let names: Vec<String> = cols.iter().map(|&c| header[c].clone()).collect();

            let (targets, class_names) = match (task, bins) {
                (Task::Regression, _) => {
                    let y = rows
                        .iter()
                        .map(|(line, r)| number(&r[t], path, *line, &header[t]))
                        .collect::<Result<Vec<f64>>>()?;
                    (Targets::Real(Matrix::from_vec(y.len(), 1, y)?), Vec::new())
                }
                (Task::Classification, Some(edges)) => {
                    let mut labels = Vec::with_capacity(rows.len());
                    for (line, r) in &rows {
                        let v = number(&r[t], path, *line, &header[t])?;
                        labels.push(edges.iter().filter(|e| v > **e).count());
                    }
                    let names = bin_names(edges);
                    (
                        Targets::Labels {
                            labels,
                            classes: edges.len() + 1,
                        },
                        names,
                    )
                }
                (Task::Classification, None) => {
                    let mut seen = Vec::new();
                    let labels: Vec<usize> = rows.iter().map(|(_, r)| code(&mut seen, &r[t])).collect();
                    let classes = seen.len();
                    (Targets::Labels { labels, classes }, seen)
                }
            };
            Ok(Dataset::new(&spec.name, names, features, targets)?.with_class_names(class_names))
        }
    }
}

type Row = (u64, Vec<String>);

fn read_rows(text: &str, path: &Path, header: Option<bool>) -> Result<(Vec<String>, Vec<Row>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            row: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec.iter().map(str::to_string).collect::<Vec<_>>()));
    }
    let Some(first) = records.first() else {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            row: 0,
            message: "file has no rows".into(),
        });
    };
    let has_header = header.unwrap_or_else(|| looks_like_header(&first.1, records.get(1).map(|r| r.1.as_slice())));
    let names = if has_header {
        records.remove(0).1
    } else {
        (0..first.1.len()).map(|i| format!("c{i}")).collect()
    };
    if records.is_empty() {
        return Err(Error::Csv {
            path: path.to_path_buf(),
            row: 0,
            message: "file has no data rows".into(),
        });
    }
    Ok((names, records))
}

/// A first row is a header when some column is text there but numeric in
/// the next row (text in both is a categorical column).
fn looks_like_header(first: &[String], second: Option<&[String]>) -> bool {
    let text = |c: &String| c.parse::<f64>().is_err();
    match second {
        Some(next) => first.iter().zip(next).any(|(a, b)| text(a) && !text(b)),
        None => first.iter().any(text),
    }
}

fn number(cell: &str, path: &Path, row: u64, column: &str) -> Result<f64> {
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::Parse {
            path: path.to_path_buf(),
            row,
            column: column.to_string(),
            value: cell.to_string(),
        }),
    }
}

/// Index of `value` in `seen`, appending it on first appearance.
fn code(seen: &mut Vec<String>, value: &str) -> usize {
    match seen.iter().position(|s| s == value) {
        Some(i) => i,
        None => {
            seen.push(value.to_string());
            seen.len() - 1
        }
    }
}

fn bin_names(edges: &[f64]) -> Vec<String> {
    let mut names = Vec::with_capacity(edges.len() + 1);
    let mut lo: Option<f64> = None;
    for &e in edges {
        names.push(match lo {
            None => format!("<={e}"),
            Some(l) => format!("({l},{e}]"),
        });
        lo = Some(e);
    }
    names.push(format!(">{}", lo.unwrap_or(f64::NEG_INFINITY)));
    names
}
