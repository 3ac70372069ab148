//! CSV and JSON report files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use torapot::harness::report::fmt_num;
use torapot::harness::CertificateReport;

use crate::suite::is_verdict;

/// First line of every CSV file written by the tool.
pub const CSV_HEADER: &str = "# torapot-report v1";

/// Number cell: finite decimal or `INF` / `-INF`. NaN, which only an
/// undefined measurement can produce, is written as an empty cell.
pub fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        fmt_num(v)
    }
}

fn status(rep: &CertificateReport, pass: bool) -> &'static str {
    match (is_verdict(rep), pass) {
        (false, _) => "exploratory",
        (true, true) => "pass",
        (true, false) => "fail",
    }
}

/// One row per assertion, empirical value and constant.
pub fn reports_csv(reports: &[CertificateReport]) -> Result<Vec<u8>, csv::Error> {
    let mut buf = Vec::new();
    writeln!(buf, "{CSV_HEADER}")?;
    let mut w = csv::Writer::from_writer(buf);
    w.write_record([
        "theorem",
        "label",
        "inputs_digest",
        "seed",
        "record",
        "name",
        "lhs",
        "rhs",
        "slack",
        "tolerance",
        "status",
    ])?;
    for r in reports {
        let seed = r.seed.to_string();
        for a in &r.assertions {
            w.write_record([
                r.theorem.as_str(),
                &r.label,
                &r.inputs_digest,
                &seed,
                "assertion",
                &a.name,
                &cell(a.lhs),
                &cell(a.rhs),
                &cell(a.slack),
                &cell(a.tolerance),
                status(r, a.pass),
            ])?;
        }
        for (kind, list) in [("empirical", &r.empirical), ("constant", &r.constants)] {
            for e in list {
                w.write_record([
                    r.theorem.as_str(),
                    &r.label,
                    &r.inputs_digest,
                    &seed,
                    kind,
                    &e.name,
                    &cell(e.value),
                    "",
                    "",
                    "",
                    if is_verdict(r) { "" } else { "exploratory" },
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Writes `report.json` and `report.csv` into `dir` and returns their paths.
pub fn write_reports(dir: &Path, reports: &[CertificateReport]) -> std::io::Result<[PathBuf; 2]> {
    fs::create_dir_all(dir)?;
    let json = dir.join("report.json");
    let csv_path = dir.join("report.csv");
    let mut text = serde_json::to_string_pretty(reports)?;
    text.push('\n');
    fs::write(&json, text)?;
    fs::write(
        &csv_path,
        reports_csv(reports).map_err(std::io::Error::other)?,
    )?;
    Ok([json, csv_path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use torapot::harness::Digest;

    #[test]
    fn csv_uses_tokens() {
        let mut r = CertificateReport::new("mt", "x", Digest::default().finish(), 1);
        r.le("a", 1.0, f64::INFINITY, 0.0);
        r.empirical("e", f64::NAN);
        let text = String::from_utf8(reports_csv(&[r]).unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert!(text.contains(",INF,INF,"));
        assert!(!text.contains("NaN") && !text.contains("NAN"));
    }
}
