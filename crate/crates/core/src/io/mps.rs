//! Free-format MPS.
//!
//! Sections are written in the order NAME, ROWS, COLUMNS, RHS, BOUNDS,
//! ENDATA. Column names are sanitized to `[A-Za-z0-9_]`; every renamed
//! column gets a `* COMMENT <mps-name> <original>` line so the reader can
//! restore the original names.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::mip::{Column, ColumnKind, ColumnOrigin, MipModel, RowOrigin, RowSense};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct MpsError {
    pub line: usize,
    pub message: String,
}

/// Formats a number with at most 12 significant digits.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 1e12 {
        return format!("{}", v as i64);
    }
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    format!("{rounded}")
}

fn sanitize(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "C".into()
    } else {
        s
    }
}

/// MPS names for the model's columns, in column order.
pub fn mps_column_names(model: &MipModel) -> Vec<String> {
    let mut used = HashSet::new();
    model
        .columns
        .iter()
        .map(|c| {
            let base = sanitize(&c.name);
            let mut name = base.clone();
            let mut k = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}_{k}");
                k += 1;
            }
            name
        })
        .collect()
}

fn row_name(i: usize) -> String {
    format!("R{:04}", i + 1)
}

pub fn write_mps(model: &MipModel) -> String {
    let names = mps_column_names(model);
    let mut out = String::new();
    for (c, n) in model.columns.iter().zip(&names) {
        if c.name != *n {
            let _ = writeln!(out, "* COMMENT {n} {}", c.name);
        }
    }
    if model.name.is_empty() {
        out.push_str("NAME\n");
    } else {
        let _ = writeln!(out, "NAME {}", model.name);
    }

    out.push_str("ROWS\n N OBJ\n");
    for (i, r) in model.rows.iter().enumerate() {
        let t = match r.sense {
            RowSense::Leq => 'L',
            RowSense::Geq => 'G',
            RowSense::Eq => 'E',
        };
        let _ = writeln!(out, " {t} {}", row_name(i));
    }

    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); model.columns.len()];
    for &(a, j) in &model.objective {
        entries[j].push(("OBJ".into(), a));
    }
    for (i, r) in model.rows.iter().enumerate() {
        for &(a, j) in &r.terms {
            entries[j].push((row_name(i), a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    for (j, c) in model.columns.iter().enumerate() {
        let integral = c.kind.is_integral();
        if integral != in_int {
            let tag = if integral { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER 'MARKER' '{tag}'");
            in_int = integral;
        }
        if entries[j].is_empty() {
            let _ = writeln!(out, " {} OBJ 0", names[j]);
        }
        for (row, a) in &entries[j] {
            let _ = writeln!(out, " {} {row} {}", names[j], format_number(*a));
        }
    }
    if in_int {
        out.push_str(" MARKER 'MARKER' 'INTEND'\n");
    }

    out.push_str("RHS\n");
    if model.objective_constant != 0.0 {
        let _ = writeln!(out, " RHS OBJ {}", format_number(-model.objective_constant));
    }
    for (i, r) in model.rows.iter().enumerate() {
        if r.rhs != 0.0 {
            let _ = writeln!(out, " RHS {} {}", row_name(i), format_number(r.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (c, n) in model.columns.iter().zip(&names) {
        if c.lower == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND {n}");
        } else {
            let _ = writeln!(out, " LO BND {n} {}", format_number(c.lower));
        }
        if c.upper == f64::INFINITY {
            let _ = writeln!(out, " PL BND {n}");
        } else {
            let _ = writeln!(out, " UP BND {n} {}", format_number(c.upper));
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    Bounds,
    End,
}

/// Reads the dialect produced by [`write_mps`].
pub fn read_mps(text: &str) -> Result<MipModel, MpsError> {
    let mut model = MipModel::default();
    let mut original: HashMap<String, String> = HashMap::new();
    let mut rows: HashMap<String, Option<usize>> = HashMap::new();
    let mut cols: HashMap<String, usize> = HashMap::new();
    let mut section = Section::Start;
    let mut in_int = false;

    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let err = |message: String| MpsError { line: line_no, message };
        if let Some(rest) = line.strip_prefix('*') {
            let mut parts = rest.split_whitespace();
            if parts.next() == Some("COMMENT") {
                if let (Some(n), Some(o)) = (parts.next(), parts.next()) {
                    original.insert(n.to_string(), o.to_string());
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !line.starts_with(char::is_whitespace) {
            section = match fields[0] {
                "NAME" => {
                    model.name = fields[1..].join(" ");
                    Section::Start
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "RANGES" => return Err(err("RANGES section is not supported".into())),
                "ENDATA" => Section::End,
                other => return Err(err(format!("unknown section `{other}`"))),
            };
            continue;
        }
        let number = |s: &str| s.parse::<f64>().map_err(|_| err(format!("invalid number `{s}`")));
        let field = |k: usize| fields.get(k).copied().ok_or_else(|| err("missing field".into()));
        match section {
            Section::Rows => {
                let name = field(1)?;
                let slot = match field(0)? {
                    "N" => None,
                    t => {
                        let sense = match t {
                            "L" => RowSense::Leq,
                            "G" => RowSense::Geq,
                            "E" => RowSense::Eq,
                            _ => return Err(err(format!("unknown row type `{t}`"))),
                        };
                        model.push_row(Vec::new(), sense, 0.0, RowOrigin::external(), None);
                        Some(model.rows.len() - 1)
                    }
                };
                if rows.insert(name.to_string(), slot).is_some() {
                    return Err(err(format!("duplicate row `{name}`")));
                }
            }
            Section::Columns => {
                if field(1)? == "'MARKER'" {
                    in_int = match field(2)? {
                        "'INTORG'" => true,
                        "'INTEND'" => false,
                        m => return Err(err(format!("unknown marker {m}"))),
                    };
                    continue;
                }
                let name = field(0)?;
                let j = match cols.get(name) {
                    Some(&j) => j,
                    None => {
                        let j = model.add_column(Column {
                            name: original.get(name).cloned().unwrap_or_else(|| name.to_string()),
                            kind: if in_int { ColumnKind::Integer } else { ColumnKind::Continuous },
                            lower: 0.0,
                            upper: f64::INFINITY,
                            origin: ColumnOrigin::External,
                        });
                        cols.insert(name.to_string(), j);
                        j
                    }
                };
                for pair in fields[1..].chunks(2) {
                    let [row, value] = pair else {
                        return Err(err("row without value".into()));
                    };
                    let a = number(value)?;
                    match rows.get(*row) {
                        Some(Some(i)) => model.rows[*i].terms.push((a, j)),
                        Some(None) => model.objective.push((a, j)),
                        None => return Err(err(format!("unknown row `{row}`"))),
                    }
                }
            }
            Section::Rhs => {
                for pair in fields[1..].chunks(2) {
                    let [row, value] = pair else {
                        return Err(err("row without value".into()));
                    };
                    let v = number(value)?;
                    match rows.get(*row) {
                        Some(Some(i)) => model.rows[*i].rhs = v,
                        Some(None) => model.objective_constant = -v,
                        None => return Err(err(format!("unknown row `{row}`"))),
                    }
                }
            }
            Section::Bounds => {
                let kind = field(0)?;
                let name = field(2)?;
                let j = *cols.get(name).ok_or_else(|| err(format!("unknown column `{name}`")))?;
                let c = &mut model.columns[j];
                match kind {
                    "LO" => c.lower = number(field(3)?)?,
                    "UP" => c.upper = number(field(3)?)?,
                    "FX" => {
                        c.lower = number(field(3)?)?;
                        c.upper = c.lower;
                    }
                    "MI" => c.lower = f64::NEG_INFINITY,
                    "PL" => c.upper = f64::INFINITY,
                    "FR" => {
                        c.lower = f64::NEG_INFINITY;
                        c.upper = f64::INFINITY;
                    }
                    _ => return Err(err(format!("unknown bound type `{kind}`"))),
                }
            }
            Section::Start | Section::End => return Err(err("data line outside a section".into())),
        }
    }
    for r in &mut model.rows {
        r.terms = crate::mip::merge_terms(std::mem::take(&mut r.terms));
    }
    model.objective = crate::mip::merge_terms(std::mem::take(&mut model.objective));
    for c in &mut model.columns {
        if c.kind == ColumnKind::Integer && c.lower == 0.0 && c.upper == 1.0 {
            c.kind = ColumnKind::Binary;
        }
    }
    Ok(model)
}
