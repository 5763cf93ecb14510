//! Plain-text tensor files.
//!
//! ```text
//! order 4
//! dim 3
//! 1 1 1 1  0.2883
//! 1 1 1 2 -0.0031
//! ```
//!
//! Indices are 1-based and may appear in any permutation. `#` starts a comment.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::SymTensor;

fn header(line: Option<(usize, &str)>, key: &str) -> Result<usize> {
    let (no, text) = line.ok_or(Error::Parse {
        line: 0,
        message: format!("missing `{key}` header"),
    })?;
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(v), None) if k == key => v.parse().map_err(|_| Error::Parse {
            line: no,
            message: format!("`{key}` expects a positive integer, got `{v}`"),
        }),
        _ => Err(Error::Parse {
            line: no,
            message: format!("expected `{key} <n>`"),
        }),
    }
}

pub fn parse_tensor(text: &str) -> Result<SymTensor> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let order = header(lines.next(), "order")?;
    let dim = header(lines.next(), "dim")?;
    if order == 0 || dim == 0 {
        return Err(Error::Parse {
            line: 2,
            message: "order and dim must be positive".into(),
        });
    }

    let mut entries = Vec::new();
    let mut line_of = Vec::new();
    for (no, text) in lines {
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != order + 1 {
            return Err(Error::Parse {
                line: no,
                message: format!("expected {} indices and a value, got {} fields", order, fields.len()),
            });
        }
        let mut index = Vec::with_capacity(order);
        for f in &fields[..order] {
            let i: usize = f.parse().map_err(|_| Error::Parse {
                line: no,
                message: format!("bad index `{f}`"),
            })?;
            if i == 0 || i > dim {
                return Err(Error::Parse {
                    line: no,
                    message: format!("index {i} out of range 1..={dim}"),
                });
            }
            index.push(i);
        }
        let value: f64 = fields[order].parse().map_err(|_| Error::Parse {
            line: no,
            message: format!("bad value `{}`", fields[order]),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                line: no,
                message: "value is not finite".into(),
            });
        }
        entries.push((index, value));
        line_of.push(no);
    }

    SymTensor::from_entries(order, dim, entries.clone()).map_err(|e| match e {
        Error::DuplicateEntry { index } => {
            // report the later of the two offending lines
            let mut key = index.clone();
            key.sort_unstable();
            let no = entries
                .iter()
                .zip(&line_of)
                .filter(|((idx, _), _)| {
                    let mut s = idx.clone();
                    s.sort_unstable();
                    s == key
                })
                .map(|(_, &no)| no)
                .nth(1)
                .unwrap_or(0);
            Error::Parse {
                line: no,
                message: format!("duplicate entry for class {index:?}"),
            }
        }
        other => other,
    })
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<SymTensor> {
    let text = std::fs::read_to_string(path)?;
    parse_tensor(&text)
}

/// Writes the nonzero canonical entries, one class per line.
pub fn write_tensor(t: &SymTensor, mut out: impl Write) -> Result<()> {
    writeln!(out, "order {}", t.order())?;
    writeln!(out, "dim {}", t.dim())?;
    for (idx, v) in t.entries() {
        let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "{} {:?}", idx.join(" "), v)?;
    }
    Ok(())
}
