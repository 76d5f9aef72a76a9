//! LIBSVM / SVMlight text format: `label idx:val idx:val ...` with 1-based,
//! strictly increasing indices.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use super::dataset::{Dataset, Sample};
use crate::error::{Error, Result};

/// Parses a binary LIBSVM dataset. Label sets `{-1, +1}`, `{0, 1}` and
/// `{1, 2}` are mapped onto `{-1, +1}`. The dimension is the largest index
/// seen unless `n_override` is given.
pub fn parse_libsvm<R: BufRead>(reader: R, n_override: Option<usize>) -> Result<Dataset> {
    let mut raw: Vec<(f64, Vec<usize>, Vec<f64>)> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("nonempty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("bad label `{label_tok}`")))?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for tok in tokens {
            let (i, v) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = i.parse().map_err(|_| err(format!("bad index `{i}`")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            let val: f64 = v.parse().map_err(|_| err(format!("bad value `{v}`")))?;
            if !val.is_finite() {
                return Err(err(format!("non-finite value `{v}`")));
            }
            if indices.last().is_some_and(|&last| idx - 1 <= last) {
                return Err(err(format!("index {idx} not strictly increasing")));
            }
            max_index = max_index.max(idx);
            indices.push(idx - 1);
            values.push(val);
        }
        raw.push((label, indices, values));
    }

    let labels: BTreeSet<i64> = raw
        .iter()
        .map(|(l, _, _)| {
            if l.fract() == 0.0 {
                Ok(*l as i64)
            } else {
                Err(Error::Parse {
                    line: 0,
                    msg: format!("non-integer label {l}"),
                })
            }
        })
        .collect::<Result<_>>()?;
    let map: fn(i64) -> f64 = if labels.iter().all(|l| *l == -1 || *l == 1) {
        |l| l as f64
    } else if labels.iter().all(|l| *l == 0 || *l == 1) {
        |l| if l == 1 { 1.0 } else { -1.0 }
    } else if labels.iter().all(|l| *l == 1 || *l == 2) {
        |l| if l == 2 { 1.0 } else { -1.0 }
    } else {
        return Err(Error::Parse {
            line: 0,
            msg: format!("label set {labels:?} is not binary"),
        });
    };

    let n = match n_override {
        Some(n) if n < max_index => {
            return Err(Error::InvalidArgument(format!(
                "dimension override {n} smaller than largest feature index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    let samples = raw
        .into_iter()
        .map(|(l, indices, values)| Sample {
            indices,
            values,
            label: map(l as i64),
        })
        .collect();
    Dataset::new(samples, n)
}

pub fn parse_libsvm_str(text: &str, n_override: Option<usize>) -> Result<Dataset> {
    parse_libsvm(text.as_bytes(), n_override)
}

/// Writes `dataset` in LIBSVM format with labels `+1` / `-1`.
pub fn write_libsvm<W: Write>(dataset: &Dataset, mut out: W) -> Result<()> {
    for s in &dataset.samples {
        write!(out, "{}", if s.label > 0.0 { "+1" } else { "-1" })?;
        for (j, v) in s.indices.iter().zip(&s.values) {
            write!(out, " {}:{}", j + 1, v)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
