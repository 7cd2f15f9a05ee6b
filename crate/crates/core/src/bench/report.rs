use serde::Serialize;

use super::record::RecordSummary;
use crate::control::PredictorChoice;
use crate::error::{Error, Result};
use crate::io::fmt17;

/// Percentage change of `value` relative to `reference`.
pub fn percent_delta(value: f64, reference: f64) -> f64 {
    100.0 * (value - reference) / reference
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub name: String,
    pub variant: String,
    pub added_delay: usize,
    pub payload_fraction: f64,
    pub stable: bool,
    pub rmse: f64,
    pub mae: f64,
    /// Relative to the baseline row; absent when either row is unstable.
    pub rmse_delta_percent: Option<f64>,
    pub mae_delta_percent: Option<f64>,
}

/// Metrics table with deltas relative to one designated record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub baseline: String,
    pub signal: String,
    pub rows: Vec<ReportRow>,
}

/// Builds the comparison of `records` against `records[baseline]`. All
/// records must be measured on the same signal, window and plant.
pub fn compare_report(records: &[RecordSummary], baseline: usize) -> Result<ComparisonReport> {
    if records.len() < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 records to compare, got {}", records.len())));
    }
    let base = records
        .get(baseline)
        .ok_or_else(|| Error::InvalidSpec(format!("baseline index {baseline} out of range")))?;
    for r in records {
        if r.signal != base.signal || (r.window - base.window).abs() > 1e-9 || r.plant != base.plant {
            return Err(Error::InvalidSpec(format!(
                "inconsistent scenario axes: '{}' ({}, {:?}, {} s) vs '{}' ({}, {:?}, {} s)",
                r.name, r.plant, r.signal, r.window, base.name, base.plant, base.signal, base.window
            )));
        }
    }
    let both = |r: &RecordSummary| r.metrics.stable && base.metrics.stable;
    let rows = records
        .iter()
        .map(|r| ReportRow {
            name: r.name.clone(),
            variant: r.variant.to_string(),
            added_delay: r.added_delay,
            payload_fraction: r.payload_fraction,
            stable: r.metrics.stable,
            rmse: r.metrics.rmse,
            mae: r.metrics.mae,
            rmse_delta_percent: both(r).then(|| percent_delta(r.metrics.rmse, base.metrics.rmse)),
            mae_delta_percent: both(r).then(|| percent_delta(r.metrics.mae, base.metrics.mae)),
        })
        .collect();
    Ok(ComparisonReport {
        baseline: base.name.clone(),
        signal: format!("{:?}", base.signal).to_lowercase(),
        rows,
    })
}

const CSV_HEADER: &str = "baseline,name,variant,added_delay,payload_fraction,stable,rmse,rmse_delta_percent,mae,mae_delta_percent\n";

/// One comparison per `(plant, signal, delay, payload)` group, in order of
/// first appearance, against the group's baseline-variant record (or its
/// first record). Groups with a single record are skipped.
pub fn variant_tables(records: &[RecordSummary]) -> Result<Vec<ComparisonReport>> {
    let key = |r: &RecordSummary| (r.plant.clone(), format!("{:?}", r.signal), r.added_delay, r.payload_fraction.to_bits());
    tables(records, key, |g| g.iter().position(|r| r.variant == PredictorChoice::None).unwrap_or(0))
}

/// Payload tables: one comparison per `(plant, variant, delay)` against the
/// record without payload.
pub fn payload_tables(records: &[RecordSummary]) -> Result<Vec<ComparisonReport>> {
    let key = |r: &RecordSummary| (r.plant.clone(), r.variant.to_string(), r.added_delay, 0);
    tables(records, key, |g| g.iter().position(|r| r.payload_fraction == 0.0).unwrap_or(0))
}

fn tables<K: PartialEq>(
    records: &[RecordSummary],
    key: impl Fn(&RecordSummary) -> K,
    pick: impl Fn(&[RecordSummary]) -> usize,
) -> Result<Vec<ComparisonReport>> {
    let mut groups: Vec<(K, Vec<RecordSummary>)> = Vec::new();
    for r in records {
        let k = key(r);
        match groups.iter_mut().find(|(g, _)| *g == k) {
            Some((_, v)) => v.push(r.clone()),
            None => groups.push((k, vec![r.clone()])),
        }
    }
    groups
        .into_iter()
        .filter(|(_, g)| g.len() >= 2)
        .map(|(_, g)| compare_report(&g, pick(&g)))
        .collect()
}

/// Concatenated CSV of several tables under one header.
pub fn tables_to_csv(reports: &[ComparisonReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    for r in reports {
        s.push_str(&r.to_csv()[CSV_HEADER.len()..]);
    }
    s
}

/// Aligned text of several tables separated by blank lines.
pub fn tables_to_text(reports: &[ComparisonReport]) -> String {
    reports.iter().map(ComparisonReport::to_text).collect::<Vec<_>>().join("\n")
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
        let mut s = String::from(CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.baseline,
                r.name,
                r.variant,
                r.added_delay,
                fmt17(r.payload_fraction),
                r.stable,
                fmt17(r.rmse),
                opt(r.rmse_delta_percent),
                fmt17(r.mae),
                opt(r.mae_delta_percent)
            ));
        }
        s
    }

    /// Aligned plain-text table, values rounded to four digits.
    pub fn to_text(&self) -> String {
        let cell = |v: f64, d: Option<f64>, stable: bool| {
            if !stable {
                return "unstable".to_string();
            }
            match d {
                Some(d) => format!("{v:.4} ({d:+.1}%)"),
                None => format!("{v:.4}"),
            }
        };
        let header = ["name", "variant", "h", "payload", "RMSE", "MAE"];
        let mut rows: Vec<[String; 6]> = vec![header.map(String::from)];
        for r in &self.rows {
            rows.push([
                r.name.clone(),
                r.variant.clone(),
                r.added_delay.to_string(),
                format!("{:.0}%", 100.0 * r.payload_fraction),
                cell(r.rmse, r.rmse_delta_percent, r.stable),
                cell(r.mae, r.mae_delta_percent, r.stable),
            ]);
        }
        let mut width = [0usize; 6];
        for row in &rows {
            for (w, c) in width.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut s = format!("{} error, deltas relative to '{}'\n", self.signal, self.baseline);
        for row in &rows {
            let line: Vec<String> = row.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
            s.push_str(line.join("  ").trim_end());
            s.push('\n');
        }
        s
    }
}
