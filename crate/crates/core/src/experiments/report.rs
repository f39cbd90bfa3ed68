use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExperimentError;

/// One evaluated (experiment, group, scope, encoding) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub group: Option<String>,
    /// `base` for the held-out split, else the extrapolation range label.
    pub scope: String,
    pub encoding: String,
    pub classifier: String,
    pub class_names: Vec<String>,
    /// Fields per class in the evaluated population (whole dataset for
    /// `base`, the full range for extrapolation rows).
    pub class_sizes: Vec<usize>,
    pub train_size: usize,
    pub validation_size: usize,
    pub precision: f64,
    pub mcc: f64,
    pub confusion: Vec<Vec<u64>>,
    pub reference_precision: Option<f64>,
    pub reference_mcc: Option<f64>,
    pub passed: Option<bool>,
}

impl ResultRow {
    pub fn status(&self) -> &'static str {
        match self.passed {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "-",
        }
    }

    fn sizes(&self) -> String {
        self.class_names.iter().zip(&self.class_sizes).map(|(c, n)| format!("{c}:{n}")).collect::<Vec<_>>().join(" ")
    }

    fn cells(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x}"));
        vec![
            self.experiment.clone(),
            self.group.clone().unwrap_or_else(|| "-".into()),
            self.scope.clone(),
            self.encoding.clone(),
            self.classifier.clone(),
            self.sizes(),
            self.train_size.to_string(),
            self.validation_size.to_string(),
            format!("{:.4}", self.precision),
            format!("{:.4}", self.mcc),
            opt(self.reference_precision),
            opt(self.reference_mcc),
            self.status().to_string(),
        ]
    }
}

pub const REPORT_COLUMNS: [&str; 13] = [
    "experiment",
    "group",
    "scope",
    "encoding",
    "classifier",
    "class_sizes",
    "train",
    "validation",
    "precision",
    "mcc",
    "ref_precision",
    "ref_mcc",
    "status",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(ExperimentError::Config(format!("unknown report format '{s}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    columns: Vec<String>,
    rows: Vec<ResultRow>,
}

pub fn emit_report(rows: &[ResultRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => text(rows),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(REPORT_COLUMNS).expect("in-memory write");
            for row in rows {
                w.write_record(row.cells()).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        ReportFormat::Json => {
            let doc =
                JsonReport { columns: REPORT_COLUMNS.iter().map(|c| c.to_string()).collect(), rows: rows.to_vec() };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable rows");
            s.push('\n');
            s
        }
    }
}

/// Parses the JSON form of [`emit_report`] back into rows.
pub fn parse_json_report(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let doc: JsonReport = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
    Ok(doc.rows)
}

fn text(rows: &[ResultRow]) -> String {
    let table: Vec<Vec<String>> = std::iter::once(REPORT_COLUMNS.iter().map(|c| c.to_string()).collect())
        .chain(rows.iter().map(ResultRow::cells))
        .collect();
    let widths: Vec<usize> =
        (0..REPORT_COLUMNS.len()).map(|j| table.iter().map(|r| r[j].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &table {
        let line: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ResultRow {
        ResultRow {
            experiment: "expV".into(),
            group: None,
            scope: "base".into(),
            encoding: "zeta".into(),
            classifier: "forest".into(),
            class_names: vec!["1".into(), "2".into()],
            class_sizes: vec![83463, 83324],
            train_size: 133430,
            validation_size: 33357,
            precision: 0.9612,
            mcc: 0.92,
            confusion: vec![vec![1, 0], vec![0, 1]],
            reference_precision: Some(0.96),
            reference_mcc: Some(0.92),
            passed: Some(true),
        }
    }

    #[test]
    fn empty_rows_give_header_only() {
        assert_eq!(emit_report(&[], ReportFormat::Text).lines().count(), 1);
        assert_eq!(emit_report(&[], ReportFormat::Csv).lines().count(), 1);
        assert!(parse_json_report(&emit_report(&[], ReportFormat::Json)).unwrap().is_empty());
    }

    #[test]
    fn one_row_one_line() {
        let text = emit_report(&[row()], ReportFormat::Text);
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().contains("1:83463 2:83324"));
        let csv = emit_report(&[row()], ReportFormat::Csv);
        assert_eq!(csv.lines().next().unwrap(), REPORT_COLUMNS.join(","));
        assert!(csv.lines().nth(1).unwrap().ends_with("0.9612,0.9200,0.96,0.92,pass"));
    }

    #[test]
    fn deterministic_and_round_trips() {
        let rows = vec![row(), ResultRow { passed: None, group: Some("C4".into()), ..row() }];
        for f in [ReportFormat::Text, ReportFormat::Csv, ReportFormat::Json] {
            assert_eq!(emit_report(&rows, f), emit_report(&rows, f));
        }
        assert_eq!(parse_json_report(&emit_report(&rows, ReportFormat::Json)).unwrap(), rows);
    }
}
