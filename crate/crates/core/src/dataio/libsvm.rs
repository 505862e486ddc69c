//! libSVM sparse text format.
//!
//! ```text
//! <label> <index>:<value> <index>:<value> ... [# comment]
//! ```
//!
//! Indices are 1-based and strictly increasing within a line. Features not
//! listed are zero.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::Dataset;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Summary counts matching the usual dataset tables (n, d, #nnz, #classes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LibsvmStats {
    pub n: usize,
    pub d: usize,
    pub nnz: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub dataset: Dataset,
    pub stats: LibsvmStats,
    /// Original label value for each dense class id.
    pub class_values: Vec<f64>,
}

struct Row {
    label: usize,
    features: Vec<(usize, f64)>,
}

/// Parses libSVM text into a dense dataset.
///
/// Labels are densified in order of first appearance. The width is the
/// largest index seen unless `width` overrides it.
pub fn parse_libsvm(text: &str, width: Option<usize>) -> Result<LibsvmData> {
    let mut rows = Vec::new();
    let mut class_of: HashMap<u64, usize> = HashMap::new();
    let mut class_values = Vec::new();
    let mut max_index = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label_val: f64 = label_tok
            .parse()
            .map_err(|_| parse_err(format!("label {label_tok:?} is not numeric")))?;
        if !label_val.is_finite() {
            return Err(parse_err(format!("label {label_tok:?} is not finite")));
        }
        // -0.0 and 0.0 are the same class.
        let key = (label_val + 0.0).to_bits();
        let next_id = class_of.len();
        let label = *class_of.entry(key).or_insert_with(|| {
            class_values.push(label_val);
            next_id
        });

        let mut features = Vec::new();
        let mut last = 0usize;
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| parse_err(format!("malformed pair {tok:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(format!("index {idx:?} is not a positive integer")))?;
            if idx == 0 {
                return Err(parse_err("indices are 1-based; found 0".into()));
            }
            if idx <= last {
                return Err(parse_err(format!(
                    "index {idx} does not increase (previous {last})"
                )));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(format!("value {val:?} is not numeric")))?;
            if !val.is_finite() {
                return Err(parse_err(format!("value {val} is not finite")));
            }
            if let Some(w) = width {
                if idx > w {
                    return Err(parse_err(format!("index {idx} exceeds declared width {w}")));
                }
            }
            last = idx;
            features.push((idx, val));
        }
        max_index = max_index.max(last);
        rows.push(Row { label, features });
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no data lines".into(),
        });
    }
    let d = width.unwrap_or(max_index).max(1);
    let n = rows.len();
    let mut points = DenseMatrix::zeros(n, d);
    let mut nnz = 0;
    let mut labels = Vec::with_capacity(n);
    for (i, row) in rows.into_iter().enumerate() {
        for (idx, val) in row.features {
            points[(i, idx - 1)] = val;
            if val != 0.0 {
                nnz += 1;
            }
        }
        labels.push(row.label);
    }
    let classes = class_values.len();
    Ok(LibsvmData {
        dataset: Dataset::new("libsvm", points, labels)?,
        stats: LibsvmStats { n, d, nnz, classes },
        class_values,
    })
}

/// Writes a dataset in libSVM format, listing only nonzero features and using
/// the dense class ids as labels.
pub fn serialize_libsvm(dataset: &Dataset) -> String {
    let mut out = String::new();
    for i in 0..dataset.len() {
        write!(out, "{}", dataset.labels[i]).unwrap();
        for (j, &v) in dataset.points.row(i).iter().enumerate() {
            if v != 0.0 {
                write!(out, " {}:{}", j + 1, v).unwrap();
            }
        }
        out.push('\n');
    }
    out
}
