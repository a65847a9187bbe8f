//! The per-run results file: `algorithm,replicate,seed,match_percent,final_mse,epochs,stop_reason`.

use std::fmt::Write;

use super::{HarnessError, MatchMatrix, RunOutcome};
use crate::optimizers::StopReason;

const HEADER: &str = "algorithm,replicate,seed,match_percent,final_mse,epochs,stop_reason";

/// One row per run in (algorithm, replicate) order. Floats are written in
/// shortest round-trip form, so parsing the file restores them exactly.
/// Matrices without run details get empty seed/mse/epochs/stop columns.
pub fn results_csv(m: &MatchMatrix) -> String {
    let mut out = format!("{HEADER}\n");
    for (i, label) in m.labels.iter().enumerate() {
        for (r, pct) in m.percentages[i].iter().enumerate() {
            match m.runs.as_ref().map(|runs| &runs[i][r]) {
                Some(run) => writeln!(
                    out,
                    "{label},{r},{},{pct},{},{},{}",
                    run.seed, run.final_mse, run.epochs, run.stop_reason
                ),
                None => writeln!(out, "{label},{r},,{pct},,,"),
            }
            .unwrap();
        }
    }
    out
}

fn field<T: std::str::FromStr>(value: &str, name: &str, line: usize) -> Result<T, HarnessError> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::Results(format!("line {line}: cannot parse {name} `{value}`")))
}

/// Rebuilds a matrix from a results file. Rows may come in any order;
/// algorithms keep their order of first appearance and every algorithm
/// must have replicates `0..n` exactly once.
pub fn parse_results_csv(text: &str) -> Result<MatchMatrix, HarnessError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| HarnessError::Results("empty file".into()))?;
    if header.trim() != HEADER {
        return Err(HarnessError::Results(format!("expected header `{HEADER}`")));
    }

    let mut labels: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64, Option<RunOutcome>)>> = Vec::new();
    for (idx, line) in lines {
        let n = idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 7 {
            return Err(HarnessError::Results(format!("line {n}: expected 7 fields, found {}", cells.len())));
        }
        let label = cells[0];
        if label.is_empty() {
            return Err(HarnessError::Results(format!("line {n}: empty algorithm name")));
        }
        let replicate: usize = field(cells[1], "replicate", n)?;
        let pct: f64 = field(cells[3], "match_percent", n)?;
        let details = if cells[2].is_empty() && cells[4].is_empty() && cells[5].is_empty() && cells[6].is_empty() {
            None
        } else {
            let stop_reason: StopReason = cells[6]
                .parse()
                .map_err(|e: String| HarnessError::Results(format!("line {n}: {e}")))?;
            Some(RunOutcome {
                seed: field(cells[2], "seed", n)?,
                final_mse: field(cells[4], "final_mse", n)?,
                epochs: field(cells[5], "epochs", n)?,
                stop_reason,
            })
        };
        let row = match labels.iter().position(|l| l == label) {
            Some(i) => i,
            None => {
                labels.push(label.to_string());
                rows.push(Vec::new());
                labels.len() - 1
            }
        };
        rows[row].push((replicate, pct, details));
    }
    if labels.is_empty() {
        return Err(HarnessError::Results("no result rows".into()));
    }

    let mut percentages = Vec::new();
    let mut runs = Vec::new();
    let mut complete = true;
    for (label, mut row) in labels.iter().zip(rows) {
        row.sort_by_key(|(r, _, _)| *r);
        if row.iter().enumerate().any(|(i, (r, _, _))| i != *r) {
            return Err(HarnessError::Results(format!("`{label}`: replicates must be 0..n, each once")));
        }
        percentages.push(row.iter().map(|(_, p, _)| *p).collect::<Vec<_>>());
        let details: Option<Vec<RunOutcome>> = row.into_iter().map(|(_, _, d)| d).collect();
        match details {
            Some(d) => runs.push(d),
            None => complete = false,
        }
    }
    let mut m = MatchMatrix::new(labels, percentages)?;
    if complete {
        m.runs = Some(runs);
    }
    Ok(m)
}
