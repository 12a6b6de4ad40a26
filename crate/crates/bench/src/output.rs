use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{BenchError, Result};
use crate::sweep::{ResultRow, RunStatus};

/// First line of every results file.
pub const SCHEMA_LINE: &str = "# schema: fracture-ls-results/1";

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}").map_err(csv::Error::from)?;
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record([
            "strategy",
            "model",
            "physics",
            "phi",
            "cells",
            "u_c",
            "seed",
            "status",
            "iterations",
            "final_norm",
            "ls_evals",
            "tightenings",
        ])?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let wrap = |source: io::Error| BenchError::Write { path: path.to_owned(), source };
    let file = File::create(path).map_err(wrap)?;
    let mut out = BufWriter::new(file);
    write_csv(rows, &mut out)?;
    out.flush().map_err(wrap)
}

/// Parses a results file, skipping `#` comment lines.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    reader.deserialize().map(|row| row.map_err(BenchError::from)).collect()
}

fn cell_text(row: &ResultRow) -> String {
    match row.status {
        RunStatus::Converged => row.iterations.to_string(),
        status => status.label().to_string(),
    }
}

/// Iteration counts grouped by model, one line per strategy and column per `u_c`.
/// Failed runs show `NC` or `Div`.
pub fn format_table(rows: &[ResultRow]) -> String {
    let mut out = String::new();
    let mut models: Vec<&str> = Vec::new();
    for row in rows {
        if !models.contains(&row.model.as_str()) {
            models.push(&row.model);
        }
    }
    for model in models {
        let group: Vec<&ResultRow> = rows.iter().filter(|r| r.model == model).collect();
        let mut u_cs: Vec<f64> = Vec::new();
        let mut lines: Vec<(f64, usize, u64, &str)> = Vec::new();
        for r in &group {
            if !u_cs.contains(&r.u_c) {
                u_cs.push(r.u_c);
            }
            let key = (r.phi, r.cells, r.seed, r.strategy.name());
            if !lines.contains(&key) {
                lines.push(key);
            }
        }
        u_cs.sort_by(f64::total_cmp);
        let _ = writeln!(out, "{model} ({})", group[0].physics);
        let _ = write!(out, "{:>6} {:>5} {:>5}  {:<20}", "phi", "cells", "seed", "strategy");
        for u_c in &u_cs {
            let _ = write!(out, " {:>9}", format!("{u_c:e}"));
        }
        out.push('\n');
        for (phi, cells, seed, strategy) in lines {
            let _ = write!(out, "{phi:>6} {cells:>5} {seed:>5}  {strategy:<20}");
            for u_c in &u_cs {
                let text = group
                    .iter()
                    .find(|r| (r.phi, r.cells, r.seed, r.strategy.name(), r.u_c) == (phi, cells, seed, strategy, *u_c))
                    .map_or_else(|| "-".to_string(), |r| cell_text(r));
                let _ = write!(out, " {text:>9}");
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}
