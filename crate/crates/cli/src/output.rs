use std::fs;
use std::io::Write;
use std::path::Path;

use curvlab::scalar::format_significant;

use crate::commands::CliError;

/// Numbers in CSV and DOT output.
pub fn num(x: f64) -> String {
    format_significant(x, 12)
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Write to `path`, or to standard output when it is `None`.
pub fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            fs::write(p, content).map_err(|e| CliError::io(p, e))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Input(format!("writing to standard output: {e}")))
        }
    }
}

pub fn json_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Render rows with a header using the `csv` writer.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_pairs() {
        let text = csv_text(&["pair", "kappa"], &[vec!["a,b".into(), num(0.5)]]);
        assert_eq!(text, "pair,kappa\n\"a,b\",0.5\n");
    }

    #[test]
    fn twelve_digits() {
        assert_eq!(num(2.0 / 3.0), "0.666666666667");
        assert_eq!(opt_num(None), "");
    }
}
