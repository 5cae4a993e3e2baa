//! CSV and JSON report emission.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trotter_lowenergy::bounds::{BoundReport, Verdict};

use crate::analyze::Failure;
use crate::config::Format;
use crate::CliError;

pub const CSV_COLUMNS: [&str; 17] = [
    "model",
    "schedule",
    "p",
    "s",
    "delta",
    "delta_prime",
    "delta_f",
    "eps_empirical",
    "leakage_empirical",
    "retained_empirical",
    "leakage_bound",
    "retained_bound",
    "psd_bound",
    "verdict_leakage",
    "verdict_retained",
    "verdict_psd",
    "vacuity_flags",
];

/// A report row with its derived verdicts, as written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    #[serde(flatten)]
    pub report: BoundReport,
    pub verdict_leakage: Verdict,
    pub verdict_retained: Verdict,
    pub verdict_psd: Verdict,
}

impl From<&BoundReport> for ReportRow {
    fn from(r: &BoundReport) -> Self {
        let [verdict_leakage, verdict_retained, verdict_psd] = r.verdicts();
        ReportRow {
            report: r.clone(),
            verdict_leakage,
            verdict_retained,
            verdict_psd,
        }
    }
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_else(|| "na".to_string())
}

pub fn flags_field(flags: &[String]) -> String {
    if flags.is_empty() {
        "none".to_string()
    } else {
        flags.join("|")
    }
}

pub fn csv_string(reports: &[BoundReport]) -> String {
    let mut out = CSV_COLUMNS.join(",");
    out.push('\n');
    for r in reports {
        let [vl, vr, vp] = r.verdicts();
        let fields = [
            r.model.clone(),
            r.schedule.clone(),
            r.p.to_string(),
            fmt_float(r.s),
            fmt_float(r.delta),
            fmt_float(r.delta_prime),
            fmt_opt(r.delta_f),
            fmt_float(r.eps_empirical),
            fmt_float(r.leakage_empirical),
            fmt_float(r.retained_empirical),
            fmt_opt(r.leakage_bound),
            fmt_opt(r.retained_bound),
            fmt_opt(r.psd_bound),
            vl.to_string(),
            vr.to_string(),
            vp.to_string(),
            flags_field(&r.vacuity_flags),
        ];
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

pub fn json_string(reports: &[BoundReport]) -> String {
    let rows: Vec<ReportRow> = reports.iter().map(ReportRow::from).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("report rows serialize");
    s.push('\n');
    s
}

pub fn render(reports: &[BoundReport], format: Format) -> String {
    match format {
        Format::Csv => csv_string(reports),
        Format::Json => json_string(reports),
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn emit_report(reports: &[BoundReport], format: Format, path: &Path) -> Result<(), CliError> {
    write_file(path, &render(reports, format))
}

pub fn load_json_report(path: &Path) -> Result<Vec<ReportRow>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation {
        field: "report".into(),
        message: e.to_string(),
    })
}

/// `<out>.failures.json` next to the report.
pub fn failure_manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".failures.json");
    out.with_file_name(name)
}

pub fn write_failures(path: &Path, failures: &[Failure]) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(failures).expect("failures serialize");
    write_file(path, &(text + "\n"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BoundReport {
        BoundReport {
            model: "tfim-4-open".into(),
            schedule: "strang".into(),
            p: 2,
            s: 0.01,
            delta: -3.5,
            delta_prime: 120.25,
            delta_f: Some(300.0),
            delta_tilde_f: Some(1.0 / 3.0),
            eps_empirical: 1.234e-7,
            leakage_empirical: 0.0,
            retained_empirical: 1.234e-7,
            leakage_bound: Some(1e-3),
            retained_bound: Some(2.0 / 7.0),
            psd_bound: None,
            vacuity_flags: vec!["retained".into(), "psd".into()],
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(csv_string(&[]), format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn csv_rows_have_17_columns() {
        let text = csv_string(&[sample(), sample()]);
        for line in text.lines() {
            assert_eq!(line.split(',').count(), 17);
        }
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[3], "1.0000000000000000e-2");
        assert_eq!(row[12], "na");
        assert_eq!(row[15], "na");
        assert_eq!(row[16], "retained|psd");
        assert_eq!(row[13], "pass");
    }

    #[test]
    fn csv_floats_round_trip() {
        let r = sample();
        let text = csv_string(std::slice::from_ref(&r));
        let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[11].parse::<f64>().unwrap().to_bits(), (2.0f64 / 7.0).to_bits());
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let mut r = sample();
        r.eps_empirical = 0.1 + 0.2;
        emit_report(std::slice::from_ref(&r), Format::Json, &path).unwrap();
        let back = load_json_report(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].report, r);
        assert_eq!(back[0].report.eps_empirical.to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back[0].verdict_psd, Verdict::Na);
    }

    fn parse_opt(s: &str) -> Option<f64> {
        (s != "na").then(|| s.parse().unwrap())
    }

    proptest::proptest! {
        #[test]
        fn verdicts_recompute_from_csv(
            m in proptest::array::uniform3(0.0f64..1.0),
            b in proptest::array::uniform3(proptest::option::of(0.0f64..1.0)),
        ) {
            let mut r = sample();
            (r.leakage_empirical, r.retained_empirical, r.eps_empirical) = (m[0], m[1], m[2]);
            (r.leakage_bound, r.retained_bound, r.psd_bound) = (b[0], b[1], b[2]);
            let text = csv_string(&[r]);
            let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
            let pairs = [(8, 10, 13), (9, 11, 14), (7, 12, 15)];
            for (measured, bound, verdict) in pairs {
                let v = Verdict::compare(row[measured].parse().unwrap(), parse_opt(row[bound]));
                proptest::prop_assert_eq!(v.to_string(), row[verdict]);
            }
        }
    }

    #[test]
    fn manifest_path() {
        assert_eq!(
            failure_manifest_path(Path::new("/tmp/out.csv")),
            PathBuf::from("/tmp/out.csv.failures.json")
        );
    }
}
