//! LIBSVM text format, the registry of benchmark datasets and the
//! preprocessing that turns sparse rows into dense feature vectors.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use flate2::read::GzDecoder;
use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::parallel::Execution;

/// One sparse row; feature indices are 1-based and strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub label: f64,
    pub features: Vec<(u32, f64)>,
}

impl Example {
    pub fn max_index(&self) -> u32 {
        self.features.last().map_or(0, |&(i, _)| i)
    }
}

/// Parses one line. `line_no` is only used in error messages. Anything
/// after `#` is ignored.
pub fn parse_libsvm_line(line: &str, line_no: usize) -> Result<Example> {
    let err = |message: String| Error::Parse {
        line: line_no,
        message,
    };
    let content = line.split('#').next().unwrap_or("");
    let mut tokens = content.split_whitespace();
    let label_tok = tokens.next().ok_or_else(|| err("empty line".into()))?;
    let label: f64 = label_tok
        .parse()
        .map_err(|_| err(format!("bad label {label_tok:?}")))?;
    if !label.is_finite() {
        return Err(err(format!("non-finite label {label_tok:?}")));
    }
    let mut features = Vec::new();
    let mut last = 0u32;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("expected index:value, got {tok:?}")))?;
        let idx: u32 = idx
            .parse()
            .map_err(|_| err(format!("bad feature index {idx:?}")))?;
        if idx < 1 {
            return Err(err("feature indices start at 1".into()));
        }
        if idx <= last {
            return Err(err(format!(
                "index {idx} does not increase (previous {last})"
            )));
        }
        let val: f64 = val
            .parse()
            .map_err(|_| err(format!("bad feature value {val:?}")))?;
        if !val.is_finite() {
            return Err(err(format!("non-finite value at index {idx}")));
        }
        features.push((idx, val));
        last = idx;
    }
    Ok(Example { label, features })
}

pub fn serialize_libsvm_line(example: &Example) -> String {
    let mut out = format!("{}", example.label);
    for (i, v) in &example.features {
        out.push_str(&format!(" {i}:{v}"));
    }
    out
}

/// Parses a whole document, skipping blank and comment-only lines. Output
/// keeps file order.
pub fn parse_libsvm(text: &str, execution: Execution) -> Result<Vec<Example>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        })
        .collect();
    execution
        .map(&lines, |&(no, line)| parse_libsvm_line(line, no))
        .into_iter()
        .collect()
}

/// Reads a LIBSVM file; a `.gz` extension means gzip.
pub fn read_libsvm(path: &Path) -> Result<Vec<Example>> {
    let file = File::open(path)?;
    let mut text = String::new();
    if path.extension().is_some_and(|e| e == "gz") {
        GzDecoder::new(file).read_to_string(&mut text)?;
    } else {
        let mut file = file;
        file.read_to_string(&mut text)?;
    }
    parse_libsvm(&text, Execution::auto(text.len() / 8))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Binary,
    Real,
}

impl Outcome {
    pub fn task(self) -> Task {
        match self {
            Outcome::Binary => Task::Classification,
            Outcome::Real => Task::Regression,
        }
    }
}

/// Expected shape of a benchmark dataset and where to get it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DatasetMeta {
    pub name: &'static str,
    pub rounds: usize,
    /// Number of features, without the intercept.
    pub dim: usize,
    pub outcome: Outcome,
    /// File name as published on the LIBSVM dataset page.
    pub file: &'static str,
    /// Whether the published file already has features in `[-1, 1]`.
    pub normalized: bool,
}

const LIBSVM_BASE: &str = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets";

impl DatasetMeta {
    pub fn url(&self) -> String {
        let kind = match self.outcome {
            Outcome::Binary => "binary",
            Outcome::Real => "regression",
        };
        format!("{LIBSVM_BASE}/{kind}/{}", self.file)
    }

    /// Looks for `<dir>/<file>` or `<dir>/<file>.gz`.
    pub fn locate(&self, dir: &Path) -> Option<PathBuf> {
        let plain = dir.join(self.file);
        if plain.is_file() {
            return Some(plain);
        }
        let gz = dir.join(format!("{}.gz", self.file));
        gz.is_file().then_some(gz)
    }
}

macro_rules! meta {
    ($name:expr, $t:expr, $d:expr, $o:ident, $file:expr, $norm:expr) => {
        DatasetMeta {
            name: $name,
            rounds: $t,
            dim: $d,
            outcome: Outcome::$o,
            file: $file,
            normalized: $norm,
        }
    };
}

pub const REGISTRY: [DatasetMeta; 17] = [
    meta!("a9a", 32561, 123, Binary, "a9a", true),
    meta!("australian", 690, 14, Binary, "australian_scale", true),
    meta!("breast-cancer", 683, 9, Binary, "breast-cancer_scale", true),
    meta!(
        "covtype",
        581012,
        54,
        Binary,
        "covtype.libsvm.binary.scale",
        true
    ),
    meta!("diabetes", 768, 8, Binary, "diabetes_scale", true),
    meta!("heart", 270, 13, Binary, "heart_scale", true),
    meta!("ijcnn1", 91701, 22, Binary, "ijcnn1.t", true),
    meta!("ionosphere", 351, 34, Binary, "ionosphere_scale", true),
    meta!("phishing", 11055, 68, Binary, "phishing", true),
    meta!("splice", 1000, 60, Binary, "splice_scale", true),
    meta!("w8a", 49479, 300, Binary, "w8a", true),
    meta!("abalone", 4177, 8, Real, "abalone_scale", true),
    meta!("bodyfat", 252, 14, Real, "bodyfat_scale", true),
    meta!("cpusmall", 8192, 12, Real, "cpusmall_scale", true),
    meta!("housing", 506, 13, Real, "housing_scale", true),
    meta!("mg", 1385, 6, Real, "mg_scale", true),
    meta!("space_ga", 3107, 6, Real, "space_ga_scale", true),
];

pub fn lookup(name: &str) -> Result<&'static DatasetMeta> {
    REGISTRY.iter().find(|m| m.name == name).ok_or_else(|| {
        let known: Vec<&str> = REGISTRY.iter().map(|m| m.name).collect();
        Error::Data(format!(
            "unknown dataset {name:?}; known: {}",
            known.join(", ")
        ))
    })
}

/// Dense rows with the intercept in the last slot.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub xs: Vec<DVector<f64>>,
    pub ys: Vec<f64>,
    pub task: Task,
    /// Whether min-max scaling was applied during preprocessing.
    pub normalized: bool,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Dimension including the intercept.
    pub fn dim(&self) -> usize {
        self.xs.first().map_or(0, |x| x.len())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Preprocess {
    pub task: Task,
    /// Number of raw features; `None` takes the largest index seen.
    pub dim: Option<usize>,
    pub intercept: bool,
    /// Min-max scale every raw feature to `[-1, 1]`.
    pub normalize: bool,
}

/// Densifies, maps binary labels to `{-1, +1}` (the larger raw label becomes
/// `+1`), optionally rescales and appends the intercept.
pub fn preprocess(name: &str, examples: &[Example], opts: Preprocess) -> Result<Dataset> {
    let seen = examples.iter().map(|e| e.max_index()).max().unwrap_or(0) as usize;
    let dim = match opts.dim {
        Some(d) if seen > d => {
            return Err(Error::Data(format!(
                "{name}: feature index {seen} exceeds the expected {d} features"
            )))
        }
        Some(d) => d,
        None => seen,
    };

    let ys = match opts.task {
        Task::Regression => examples.iter().map(|e| e.label).collect(),
        Task::Classification => remap_labels(name, examples)?,
    };

    let mut raw: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| {
            let mut row = vec![0.0; dim];
            for &(i, v) in &e.features {
                row[i as usize - 1] = v;
            }
            row
        })
        .collect();

    if opts.normalize {
        min_max_scale(&mut raw, dim);
    }

    let xs = raw
        .into_iter()
        .map(|mut row| {
            if opts.intercept {
                row.push(1.0);
            }
            DVector::from_vec(row)
        })
        .collect();
    Ok(Dataset {
        name: name.to_string(),
        xs,
        ys,
        task: opts.task,
        normalized: opts.normalize,
    })
}

fn remap_labels(name: &str, examples: &[Example]) -> Result<Vec<f64>> {
    let mut distinct: Vec<f64> = Vec::new();
    for e in examples {
        if !distinct.contains(&e.label) {
            distinct.push(e.label);
            if distinct.len() > 2 {
                return Err(Error::Data(format!(
                    "{name}: more than two labels in a classification dataset ({distinct:?})"
                )));
            }
        }
    }
    // a single observed label keeps its sign
    let hi = match distinct.as_slice() {
        [a, b] => a.max(*b),
        _ => 0.0,
    };
    Ok(examples
        .iter()
        .map(|e| {
            if e.label > hi || (distinct.len() == 2 && e.label == hi) {
                1.0
            } else {
                -1.0
            }
        })
        .collect())
}

/// Maps each column affinely onto `[-1, 1]`; constant columns become 0.
fn min_max_scale(rows: &mut [Vec<f64>], dim: usize) {
    for j in 0..dim {
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[j]), hi.max(r[j]))
            });
        for r in rows.iter_mut() {
            r[j] = if hi > lo {
                2.0 * (r[j] - lo) / (hi - lo) - 1.0
            } else {
                0.0
            };
        }
    }
}

/// Loads a registered dataset from `dir` and checks it against the registry.
pub fn load_registered(name: &str, dir: &Path, normalize: bool) -> Result<Dataset> {
    let meta = lookup(name)?;
    let path = meta.locate(dir).ok_or_else(|| {
        Error::Data(format!(
            "dataset missing: {name} (expected {} or {0}.gz in {}; download from {})",
            meta.file,
            dir.display(),
            meta.url()
        ))
    })?;
    let examples = read_libsvm(&path)?;
    if examples.len() != meta.rounds {
        return Err(Error::Data(format!(
            "{name}: expected {} rows, found {} in {}",
            meta.rounds,
            examples.len(),
            path.display()
        )));
    }
    preprocess(
        name,
        &examples,
        Preprocess {
            task: meta.outcome.task(),
            dim: Some(meta.dim),
            intercept: true,
            normalize,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let e = parse_libsvm_line("+1 1:0.5 3:-1", 1).unwrap();
        assert_eq!(e.label, 1.0);
        assert_eq!(e.features, vec![(1, 0.5), (3, -1.0)]);
        let e = parse_libsvm_line("2.5", 1).unwrap();
        assert_eq!((e.label, e.features.len()), (2.5, 0));
        let e = parse_libsvm_line("-1 2:3   # note", 1).unwrap();
        assert_eq!(e.features, vec![(2, 3.0)]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        for bad in ["1 2:1 1:1", "1 0:1", "x 1:1", "1 1:y", "1 1", "1 2:1 2:1"] {
            match parse_libsvm_line(bad, 7) {
                Err(Error::Parse { line: 7, .. }) => {}
                other => panic!("{bad:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn document_order_and_skipping() {
        let text = "# header\n1 1:1\n\n-1 2:2\n";
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ex = parse_libsvm(text, exec).unwrap();
            assert_eq!(ex.len(), 2);
            assert_eq!(ex[1].label, -1.0);
        }
        match parse_libsvm("1 1:1\n1 x\n", Execution::Sequential) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn serialize_round_trip() {
        let e = parse_libsvm_line("-1 1:0.25 4:-3.5 10:1e-3", 1).unwrap();
        assert_eq!(parse_libsvm_line(&serialize_libsvm_line(&e), 1).unwrap(), e);
    }

    fn opts(task: Task, normalize: bool) -> Preprocess {
        Preprocess {
            task,
            dim: None,
            intercept: true,
            normalize,
        }
    }

    #[test]
    fn intercept_and_labels() {
        let ex = vec![
            Example {
                label: 1.0,
                features: vec![(1, 0.5)],
            },
            Example {
                label: 2.0,
                features: vec![],
            },
        ];
        let ds = preprocess("t", &ex, opts(Task::Classification, false)).unwrap();
        assert_eq!(ds.xs[0], DVector::from_column_slice(&[0.5, 1.0]));
        assert_eq!(ds.xs[1], DVector::from_column_slice(&[0.0, 1.0]));
        assert_eq!(ds.ys, vec![-1.0, 1.0]);
        assert_eq!(ds.dim(), 2);

        let three = vec![
            Example {
                label: 0.0,
                features: vec![],
            },
            Example {
                label: 1.0,
                features: vec![],
            },
            Example {
                label: 2.0,
                features: vec![],
            },
        ];
        assert!(preprocess("t", &three, opts(Task::Classification, false)).is_err());
        let reg = preprocess("t", &three, opts(Task::Regression, false)).unwrap();
        assert_eq!(reg.ys, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn min_max_scaling() {
        let ex: Vec<Example> = [0.0, 5.0, 10.0]
            .iter()
            .map(|&v| Example {
                label: 1.0,
                features: vec![(1, v)],
            })
            .collect();
        let ds = preprocess("t", &ex, opts(Task::Regression, true)).unwrap();
        let col: Vec<f64> = ds.xs.iter().map(|x| x[0]).collect();
        assert_eq!(col, vec![-1.0, 0.0, 1.0]);
        assert!(ds.xs.iter().all(|x| x[1] == 1.0));
    }

    #[test]
    fn registry_matches_expected_shapes() {
        assert_eq!(REGISTRY.len(), 17);
        let heart = lookup("heart").unwrap();
        assert_eq!((heart.rounds, heart.dim), (270, 13));
        assert!(heart.url().ends_with("binary/heart_scale"));
        assert!(lookup("nope").is_err());
        let dir = std::env::temp_dir().join("metagrad-no-such-dir");
        match load_registered("heart", &dir, false) {
            Err(Error::Data(m)) => assert!(m.contains("dataset missing")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_many_features_is_an_error() {
        let ex = vec![Example {
            label: 1.0,
            features: vec![(5, 1.0)],
        }];
        let o = Preprocess {
            dim: Some(3),
            ..opts(Task::Regression, false)
        };
        assert!(preprocess("t", &ex, o).is_err());
    }
}
