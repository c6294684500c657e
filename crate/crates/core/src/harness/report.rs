use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::{ExperimentSpec, Format};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "N,value_re,value_im,predicted,abs_err,members,ms";

/// One checkpoint of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub n: u64,
    pub value_re: f64,
    pub value_im: f64,
    pub predicted: f64,
    pub abs_err: f64,
    pub members: u64,
    /// Wall time in milliseconds, 0 unless timing was requested.
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub threads: usize,
}

/// A named pass/fail outcome attached to a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: ExperimentSpec,
    pub rows: Vec<Row>,
    pub environment: Environment,
    /// Allowed |value − predicted| at the final checkpoint.
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub checks: Vec<Check>,
}

impl RunReport {
    pub fn final_row(&self) -> Option<&Row> {
        self.rows.last()
    }

    /// Tolerance met and every attached check passed.
    pub fn passed(&self) -> bool {
        self.within_tolerance && self.checks.iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            // {:.16e} prints 17 significant digits
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
                r.n, r.value_re, r.value_im, r.predicted, r.abs_err, r.members, r.ms
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes the report to `path` in the given format.
pub fn emit(report: &RunReport, format: Format, path: &Path) -> Result<()> {
    std::fs::write(path, report.render(format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::ExperimentId;

    fn report(rows: Vec<Row>) -> RunReport {
        RunReport {
            spec: ExperimentSpec::new(ExperimentId::Counts),
            rows,
            environment: Environment { version: "0.1.0".into(), threads: 1 },
            tolerance: 0.1,
            within_tolerance: true,
            checks: vec![Check { name: "x".into(), passed: true, detail: String::new() }],
        }
    }

    fn row() -> Row {
        Row { n: 100, value_re: 0.1, value_im: -0.0, predicted: 1.0 / 3.0, abs_err: 0.2, members: 14, ms: 0 }
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(report(vec![]).to_csv(), format!("{CSV_HEADER}\n"));
        let csv = report(vec![row()]).to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.ends_with('\n'));
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "100,1.0000000000000001e-1,-0.0000000000000000e0,3.3333333333333331e-1,2.0000000000000001e-1,14,0"
        );
    }

    #[test]
    fn json_round_trip() {
        let r = report(vec![row(), Row { n: 1000, value_re: 1e-300, ..row() }]);
        let text = r.to_json().unwrap();
        assert!(text.ends_with('\n'));
        assert_eq!(RunReport::from_json(&text).unwrap(), r);
    }

    #[test]
    fn emit_writes_and_reports_io_errors() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        let path = dir.join("r.csv");
        emit(&report(vec![row()]), Format::Csv, &path).unwrap();
        assert!(std::fs::read_to_string(&path).unwrap().starts_with(CSV_HEADER));
        let bad = dir.join("missing").join("r.csv");
        assert!(matches!(emit(&report(vec![]), Format::Json, &bad), Err(Error::Io(_))));
    }
}
