//! Output formatting. Machine formats (csv, json) carry 17 significant
//! digits so values round-trip bit-exactly; tables show 6.

use clap::ValueEnum;

use crate::failure::{validation, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Table,
    Csv,
    Json,
}

impl OutputMode {
    pub fn parse(name: &str) -> Result<Self, Failure> {
        match name {
            "table" => Ok(OutputMode::Table),
            "csv" => Ok(OutputMode::Csv),
            "json" => Ok(OutputMode::Json),
            other => Err(validation(format!(
                "unknown output mode '{other}' (expected table, csv, or json)"
            ))),
        }
    }
}

/// Flag, else config string, else the command's default mode.
pub fn resolve_output(
    flag: Option<OutputMode>,
    file: Option<&str>,
    default: OutputMode,
) -> Result<OutputMode, Failure> {
    if let Some(mode) = flag {
        return Ok(mode);
    }
    match file {
        Some(name) => OutputMode::parse(name),
        None => Ok(default),
    }
}

/// 17 significant digits: enough for f64 round trips in CSV cells.
pub fn machine(v: f64) -> String {
    format!("{v:.16e}")
}

/// Six significant digits for human-facing tables.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        // Trim trailing zeros but keep at least one digit after the point.
        if s.contains('.') {
            let t = s.trim_end_matches('0');
            let t = t.strip_suffix('.').unwrap_or(t);
            t.to_string()
        } else {
            s
        }
    } else {
        format!("{v:.5e}")
    }
}

/// Column-aligned table; header then rows, two spaces between columns.
pub fn print_table(header: &[&str], rows: &[Vec<String>]) {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let fmt_row = |cells: &[String]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i > 0 {
                line.push_str("  ");
            }
            if i + 1 == cols {
                line.push_str(cell);
            } else {
                line.push_str(&format!("{cell:<width$}", width = widths[i]));
            }
        }
        line
    };
    let head: Vec<String> = header.iter().map(|h| h.to_string()).collect();
    println!("{}", fmt_row(&head));
    for row in rows {
        println!("{}", fmt_row(row));
    }
}
