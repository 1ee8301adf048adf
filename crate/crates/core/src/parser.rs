//! Log-to-event mapping: regex/threshold rules turn raw log lines into
//! time-ordered `(event, timestamp)` records.
//!
//! Rules are tried in file order, first match whose guard passes wins.
//! A time-based window groups lines; the serializer sorts records by
//! timestamp with the source line number as a stable tie-break.

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use regex::Regex;
use thiserror::Error;

use crate::model::{EventId, Model};

/// Timestamp extraction strategy for the leading portion of a log line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TimestampSpec {
    /// ISO-8601-ish prefix: RFC 3339, `YYYY-MM-DDTHH:MM:SS`,
    /// `YYYY-MM-DD HH:MM:SS` or a bare `HH:MM:SS` time of day.
    Iso8601,
    /// Explicit chrono format string, e.g. `%d/%b/%Y %H:%M:%S`.
    Format(String),
}

impl Default for TimestampSpec {
    fn default() -> Self {
        TimestampSpec::Iso8601
    }
}

/// Time-of-day formats are anchored to this date so records stay comparable.
const ANCHOR_DATE: (i32, u32, u32) = (1970, 1, 1);

fn anchor(time: NaiveTime) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(ANCHOR_DATE.0, ANCHOR_DATE.1, ANCHOR_DATE.2)
        .expect("valid anchor date")
        .and_time(time)
}

impl TimestampSpec {
    /// Parse the timestamp prefix of `line`, if any.
    pub fn parse_prefix(&self, line: &str) -> Option<NaiveDateTime> {
        let mut tokens = line.split_whitespace();
        let first = tokens.next()?;
        match self {
            TimestampSpec::Iso8601 => {
                if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(first) {
                    return Some(dt.naive_utc());
                }
                for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S"] {
                    if let Ok(dt) = NaiveDateTime::parse_from_str(first, fmt) {
                        return Some(dt);
                    }
                }
                if let Some(second) = tokens.next() {
                    let two = format!("{first} {second}");
                    for fmt in ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%d %H:%M:%S"] {
                        if let Ok(dt) = NaiveDateTime::parse_from_str(&two, fmt) {
                            return Some(dt);
                        }
                    }
                }
                for fmt in ["%H:%M:%S%.f", "%H:%M:%S"] {
                    if let Ok(t) = NaiveTime::parse_from_str(first, fmt) {
                        return Some(anchor(t));
                    }
                }
                None
            }
            TimestampSpec::Format(fmt) => {
                // Take as many whitespace-separated tokens as the format has.
                let n = fmt.split_whitespace().count().max(1);
                let mut parts = vec![first.to_string()];
                for _ in 1..n {
                    parts.push(tokens.next()?.to_string());
                }
                let prefix = parts.join(" ");
                if let Ok(dt) = NaiveDateTime::parse_from_str(&prefix, fmt) {
                    return Some(dt);
                }
                if let Ok(t) = NaiveTime::parse_from_str(&prefix, fmt) {
                    return Some(anchor(t));
                }
                if let Ok(d) = NaiveDate::parse_from_str(&prefix, fmt) {
                    return Some(d.and_hms_opt(0, 0, 0).expect("midnight"));
                }
                None
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Gt,
    Lt,
    Ge,
    Le,
}

impl Comparator {
    fn eval(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
        }
    }
}

/// Numeric guard on a named capture group of the rule pattern.
#[derive(Debug, Clone)]
pub struct Guard {
    pub group: String,
    pub op: Comparator,
    pub threshold: f64,
}

/// One log-to-event mapping rule.
#[derive(Debug, Clone)]
pub struct EventRule {
    pub event: EventId,
    pub pattern: Regex,
    pub guard: Option<Guard>,
}

/// Compiled rules plus the timestamp spec from the optional file header.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    pub rules: Vec<EventRule>,
    pub ts_spec: TimestampSpec,
}

impl RuleSet {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("line {line}: invalid regex: {source}")]
    BadRegex {
        line: usize,
        #[source]
        source: regex::Error,
    },
    #[error("line {line}: unknown event `{name}`")]
    UnknownEvent { line: usize, name: String },
    #[error("line {line}: malformed guard `{text}` (expected <group><op><threshold>)")]
    MalformedGuard { line: usize, text: String },
    #[error("line {line}: pattern has no capture group `{group}`")]
    MissingCaptureGroup { line: usize, group: String },
    #[error("line {line}: expected `<event>\\t<regex>[\\t<guard>]`, got `{content}`")]
    MalformedRule { line: usize, content: String },
}

fn parse_guard(text: &str, line: usize) -> Result<Guard, RuleError> {
    let ops = [
        (">=", Comparator::Ge),
        ("<=", Comparator::Le),
        ("≥", Comparator::Ge),
        ("≤", Comparator::Le),
        (">", Comparator::Gt),
        ("<", Comparator::Lt),
    ];
    for (sym, op) in ops {
        if let Some((group, threshold)) = text.split_once(sym) {
            let group = group.trim();
            let threshold = threshold.trim();
            if group.is_empty() {
                break;
            }
            let threshold: f64 = threshold.parse().map_err(|_| RuleError::MalformedGuard {
                line,
                text: text.to_string(),
            })?;
            return Ok(Guard {
                group: group.to_string(),
                op,
                threshold,
            });
        }
    }
    Err(RuleError::MalformedGuard {
        line,
        text: text.to_string(),
    })
}

/// Parse a rules file: optional `timestamp: <format>` header, then one
/// tab-separated rule per line (`<event>\t<regex>[\t<group><op><threshold>]`).
/// `#` starts a comment.
pub fn compile_rules(rules_text: &str, model: &Model) -> Result<RuleSet, RuleError> {
    let mut set = RuleSet::default();
    for (line_no, raw) in rules_text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if let Some(spec) = line.trim().strip_prefix("timestamp:") {
            let spec = spec.trim();
            set.ts_spec = if spec.eq_ignore_ascii_case("iso8601") {
                TimestampSpec::Iso8601
            } else {
                TimestampSpec::Format(spec.to_string())
            };
            continue;
        }

        let mut fields = line.split('\t').map(str::trim).filter(|s| !s.is_empty());
        let event_name = fields.next().ok_or_else(|| RuleError::MalformedRule {
            line: line_no,
            content: line.to_string(),
        })?;
        let pattern_text = fields.next().ok_or_else(|| RuleError::MalformedRule {
            line: line_no,
            content: line.to_string(),
        })?;
        let guard_text = fields.next();

        let event = model
            .event_id(event_name)
            .ok_or_else(|| RuleError::UnknownEvent {
                line: line_no,
                name: event_name.to_string(),
            })?;
        let pattern = Regex::new(pattern_text).map_err(|source| RuleError::BadRegex {
            line: line_no,
            source,
        })?;
        let guard = match guard_text {
            Some(text) => {
                let guard = parse_guard(text, line_no)?;
                let known = pattern
                    .capture_names()
                    .flatten()
                    .any(|n| n == guard.group);
                if !known {
                    return Err(RuleError::MissingCaptureGroup {
                        line: line_no,
                        group: guard.group,
                    });
                }
                Some(guard)
            }
            None => None,
        };
        set.rules.push(EventRule {
            event,
            pattern,
            guard,
        });
    }
    Ok(set)
}

/// One recognized event occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub event: EventId,
    pub timestamp: NaiveDateTime,
    pub line_no: u64,
}

/// A line that matched a rule but could not be fully processed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub line_no: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineResult {
    Record(EventRecord),
    Ignored,
    Diagnostic(ParseDiagnostic),
}

/// Match a single line against the rules. First matching rule (file order)
/// whose guard passes wins; the line's own timestamp is required.
pub fn parse_line(line: &str, line_no: u64, rules: &RuleSet) -> LineResult {
    for rule in &rules.rules {
        let Some(caps) = rule.pattern.captures(line) else {
            continue;
        };
        if let Some(guard) = &rule.guard {
            let value = caps
                .name(&guard.group)
                .and_then(|m| m.as_str().parse::<f64>().ok());
            match value {
                Some(v) if guard.op.eval(v, guard.threshold) => {}
                _ => continue,
            }
        }
        return match rules.ts_spec.parse_prefix(line) {
            Some(timestamp) => LineResult::Record(EventRecord {
                event: rule.event,
                timestamp,
                line_no,
            }),
            None => LineResult::Diagnostic(ParseDiagnostic {
                line_no,
                reason: "matched a rule but the timestamp failed to parse".to_string(),
            }),
        };
    }
    LineResult::Ignored
}

/// Sort records by timestamp, ties broken by source line number (stable).
pub fn serialize(mut records: Vec<EventRecord>) -> Vec<EventRecord> {
    records.sort_by_key(|r| (r.timestamp, r.line_no));
    records
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowConfig {
    pub window_length: chrono::Duration,
    pub dedup_within_window: bool,
}

impl WindowConfig {
    pub fn new(window_length: chrono::Duration, dedup_within_window: bool) -> Self {
        assert!(
            window_length > chrono::Duration::zero(),
            "window length must be positive"
        );
        WindowConfig {
            window_length,
            dedup_within_window,
        }
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig::new(chrono::Duration::seconds(60), true)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WindowOutput {
    pub records: Vec<EventRecord>,
    pub diagnostics: Vec<ParseDiagnostic>,
    pub ignored: u64,
    /// Records collapsed by within-window dedup.
    pub deduplicated: u64,
}

/// Parse one window's worth of lines, then serialize. With dedup on,
/// repeated identical event ids within the window collapse to the earliest
/// occurrence.
pub fn parse_window(
    chunk: &str,
    first_line_no: u64,
    rules: &RuleSet,
    window: &WindowConfig,
) -> WindowOutput {
    let mut out = WindowOutput::default();
    let mut records = Vec::new();
    for (offset, line) in chunk.lines().enumerate() {
        match parse_line(line, first_line_no + offset as u64, rules) {
            LineResult::Record(r) => records.push(r),
            LineResult::Ignored => out.ignored += 1,
            LineResult::Diagnostic(d) => out.diagnostics.push(d),
        }
    }
    let records = serialize(records);
    if window.dedup_within_window {
        let mut seen = std::collections::HashSet::new();
        for r in records {
            if seen.insert(r.event) {
                out.records.push(r);
            } else {
                out.deduplicated += 1;
            }
        }
    } else {
        out.records = records;
    }
    out
}
