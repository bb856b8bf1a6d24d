//! Size of translations relative to their sources.
//!
//! Variables are atoms plus integer variables; constraints count each rule
//! of a definition as one constraint.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ecnf2mip::linearize::TranslateOptions;
use ecnf2mip::par::Execution;

use crate::{load_theory, translate};

/// Mean constraint ratio of a larger external benchmark set; printed
/// for comparison only.
pub const REFERENCE_CONSTRAINT_RATIO: f64 = 2.9;

#[derive(Clone, Debug, PartialEq)]
pub struct StatsRow {
    pub file: String,
    pub variables: usize,
    pub constraints: usize,
    pub columns: usize,
    pub rows: usize,
    pub definitions: usize,
}

impl StatsRow {
    pub fn variable_ratio(&self) -> Option<f64> {
        (self.variables > 0).then(|| self.columns as f64 / self.variables as f64)
    }

    pub fn constraint_ratio(&self) -> Option<f64> {
        (self.constraints > 0).then(|| self.rows as f64 / self.constraints as f64)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsReport {
    pub rows: Vec<StatsRow>,
    /// File name and reason.
    pub skipped: Vec<(String, String)>,
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn ratio(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".into(), |v| format!("{v:.3}"))
}

impl StatsReport {
    pub fn mean_variable_ratio(&self) -> Option<f64> {
        mean(self.rows.iter().map(StatsRow::variable_ratio))
    }

    pub fn mean_constraint_ratio(&self) -> Option<f64> {
        mean(self.rows.iter().map(StatsRow::constraint_ratio))
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (file, why) in &self.skipped {
            writeln!(f, "warning: skipped {file}: {why}")?;
        }
        writeln!(f, "{:<28} {:>6} {:>6} {:>6} {:>6} {:>9} {:>9}", "file", "vars", "cons", "cols", "rows", "var-ratio", "con-ratio")?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<28} {:>6} {:>6} {:>6} {:>6} {:>9} {:>9}",
                r.file,
                r.variables,
                r.constraints,
                r.columns,
                r.rows,
                ratio(r.variable_ratio()),
                ratio(r.constraint_ratio())
            )?;
        }
        writeln!(f, "mean variable ratio   {}", ratio(self.mean_variable_ratio()))?;
        writeln!(f, "mean constraint ratio {}", ratio(self.mean_constraint_ratio()))?;
        write!(f, "reference constraint ratio {REFERENCE_CONSTRAINT_RATIO} (different benchmark set, informational)")
    }
}

/// `*.ecnf` files of `dir` in file-name order.
pub fn ecnf_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|e| e == "ecnf"));
    files.sort();
    Ok(files)
}

pub fn collect_stats(dir: &Path, opts: TranslateOptions, exec: Execution) -> io::Result<StatsReport> {
    let files = ecnf_files(dir)?;
    let results = exec.map(&files, |path| {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let row = load_theory(path).and_then(|(source, normalized)| {
            let model = translate(&normalized, opts)?;
            Ok(StatsRow {
                file: name.clone(),
                variables: source.variable_count(),
                constraints: source.constraint_count(),
                columns: model.columns.len(),
                rows: model.rows.len(),
                definitions: source.definitions.len(),
            })
        });
        (name, row)
    });
    let mut report = StatsReport::default();
    for (name, row) in results {
        match row {
            Ok(r) => report.rows.push(r),
            Err(e) => report.skipped.push((name, e.message)),
        }
    }
    Ok(report)
}
