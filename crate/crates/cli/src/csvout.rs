//! CSV emission for aggregated regret rows.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::experiment::ResultRow;

pub const CSV_HEADER: &str = "algorithm,round,mean_regret,std_regret,runs";

/// Renders rows as CSV: fixed header, `\n` newlines, floats in shortest
/// round-trip form.
pub fn format_csv(rows: &[ResultRow]) -> String {
    let mut out = String::with_capacity(32 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.algorithm, r.round, r.mean_regret, r.std_regret, r.runs
        ));
    }
    out
}

pub fn write_csv(rows: &[ResultRow], path: &Path) -> CliResult<()> {
    fs::write(path, format_csv(rows))
        .map_err(|e| CliError::runtime(format!("writing {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, round: u64, mean: f64, std: f64) -> ResultRow {
        ResultRow {
            algorithm: alg.into(),
            round,
            mean_regret: mean,
            std_regret: std,
            runs: 3,
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(
            format_csv(&[]),
            "algorithm,round,mean_regret,std_regret,runs\n"
        );
    }

    #[test]
    fn single_row_has_two_lines() {
        let text = format_csv(&[row("cucb", 10, 1.5, 0.25)]);
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "cucb,10,1.5,0.25,3");
    }

    #[test]
    fn floats_round_trip_exactly() {
        let rows = vec![
            row("a", 1, 0.1 + 0.2, 1.0 / 3.0),
            row("a", 2, f64::MIN_POSITIVE, 12345.678901234567),
            row("b", 7, 0.0, 1e-300),
        ];
        let text = format_csv(&rows);
        for (line, r) in text.lines().skip(1).zip(&rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[0], r.algorithm);
            assert_eq!(fields[1].parse::<u64>().unwrap(), r.round);
            assert_eq!(fields[2].parse::<f64>().unwrap(), r.mean_regret);
            assert_eq!(fields[3].parse::<f64>().unwrap(), r.std_regret);
            assert_eq!(fields[4].parse::<u32>().unwrap(), r.runs);
        }
    }
}
