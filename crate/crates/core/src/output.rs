//! Report rendering: line-delimited JSON, CSV rows and the human-readable
//! trace used to step through a prediction run.

use serde_json::json;

use crate::engine::PredictionReport;
use crate::model::Model;

/// Probabilities are printed with 10 decimals everywhere for stable diffs.
pub fn format_probability(p: f64) -> String {
    format!("{p:.10}")
}

pub fn report_to_json(report: &PredictionReport, model: &Model) -> serde_json::Value {
    json!({
        "timestamp": report.trigger.timestamp.to_string(),
        "event": model.event_name(report.trigger.event),
        "session": report.session,
        "candidates": report
            .entries
            .iter()
            .map(|c| {
                json!({
                    "failure": model.failure_name(c.failure),
                    "hops": c.hops,
                    "probability": c.probability,
                    "alert": c.alert,
                })
            })
            .collect::<Vec<_>>(),
        "terminal": report
            .terminal
            .iter()
            .map(|&f| model.failure_name(f))
            .collect::<Vec<_>>(),
        "verdict": report.verdict.as_str(),
    })
}

pub const CSV_HEADER: &str = "timestamp,event,failure,hops,probability,terminal,verdict";

/// One CSV row per (event, candidate); verdict-only reports yield a single
/// row with empty candidate columns.
pub fn report_to_csv_rows(report: &PredictionReport, model: &Model) -> Vec<String> {
    let ts = report.trigger.timestamp.to_string();
    let event = model.event_name(report.trigger.event);
    let verdict = report.verdict.as_str();
    if report.entries.is_empty() {
        return vec![format!("{ts},{event},,,,,{verdict}")];
    }
    report
        .entries
        .iter()
        .map(|c| {
            let terminal = report.terminal.contains(&c.failure);
            format!(
                "{ts},{event},{},{},{},{},{verdict}",
                model.failure_name(c.failure),
                c.hops,
                format_probability(c.probability),
                terminal,
            )
        })
        .collect()
}

/// One trace line per report. Terminal candidates are rendered as
/// `<failure> p=<probability> TERMINAL`, others as `<failure> h=<hops>
/// p=<probability>`.
pub fn trace_line(report: &PredictionReport, model: &Model) -> String {
    let head = format!(
        "{} {} s{}",
        report.trigger.timestamp,
        model.event_name(report.trigger.event),
        report.session
    );
    match report.verdict {
        crate::engine::Verdict::InvalidSequence => format!("{head}: INVALID SEQUENCE"),
        crate::engine::Verdict::RejectedAllCandidates => {
            format!("{head}: ALL CANDIDATES REJECTED")
        }
        crate::engine::Verdict::Exhausted => format!("{head}: SESSION EXHAUSTED"),
        crate::engine::Verdict::Predicting => {
            let entries: Vec<String> = report
                .entries
                .iter()
                .map(|c| {
                    if report.terminal.contains(&c.failure) {
                        format!(
                            "{} p={} TERMINAL",
                            model.failure_name(c.failure),
                            format_probability(c.probability)
                        )
                    } else {
                        format!(
                            "{} h={} p={}",
                            model.failure_name(c.failure),
                            c.hops,
                            format_probability(c.probability)
                        )
                    }
                })
                .collect();
            format!("{head}: {}", entries.join(", "))
        }
    }
}
