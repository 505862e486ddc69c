//! Plain-text dataset, matrix and label formats.
//!
//! Dataset CSV: a header line `# <name>,<n>,<d>,<classes>` followed by `n`
//! rows of `x_1,...,x_d,label`.
//!
//! Matrix CSV: one row per line, comma separated; lines starting with `#` and
//! blank lines are ignored.
//!
//! Label files: one non-negative integer per line.

use std::fmt::Write as _;

use super::Dataset;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let tok = tok.trim();
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{tok:?} is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("{tok:?} is not finite"),
        });
    }
    Ok(v)
}

pub fn write_dataset_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    writeln!(out, "# {},{},{},{}", ds.name, ds.len(), ds.dim(), ds.n_classes()).unwrap();
    for i in 0..ds.len() {
        for v in ds.points.row(i) {
            write!(out, "{v},").unwrap();
        }
        writeln!(out, "{}", ds.labels[i]).unwrap();
    }
    out
}

pub fn read_dataset_csv(text: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 0,
        message: "empty dataset file".into(),
    })?;
    let header = header.strip_prefix('#').ok_or(Error::Parse {
        line: 1,
        message: "expected header `# name,n,d,classes`".into(),
    })?;
    let fields: Vec<&str> = header.trim().rsplitn(4, ',').collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `# name,n,d,classes`".into(),
        });
    }
    let count = |s: &str| -> Result<usize> {
        s.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            message: format!("{s:?} is not a count"),
        })
    };
    let (name, n, d) = (fields[3].to_string(), count(fields[2])?, count(fields[1])?);

    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != d + 1 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {} fields, found {}", d + 1, toks.len()),
            });
        }
        for tok in &toks[..d] {
            data.push(parse_f64(tok, line_no)?);
        }
        labels.push(toks[d].trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("label {:?} is not a non-negative integer", toks[d]),
        })?);
    }
    if labels.len() != n {
        return Err(Error::Parse {
            line: 1,
            message: format!("header declares {n} rows, found {}", labels.len()),
        });
    }
    Dataset::new(name, DenseMatrix::new(n, d, data)?, labels)
}

pub fn write_matrix_csv(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn read_matrix_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_f64(t, idx + 1))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no matrix rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_labels(labels: &[usize]) -> String {
    let mut out = String::with_capacity(labels.len() * 2);
    for l in labels {
        writeln!(out, "{l}").unwrap();
    }
    out
}

pub fn read_labels(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("{:?} is not a non-negative integer label", l.trim()),
            })
        })
        .collect()
}
