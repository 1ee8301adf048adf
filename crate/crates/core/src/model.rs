//! Event/failure universe and the event-failure matrix.
//!
//! A model declares M events in global temporal order and N failures, each
//! failure being an ordered subset of the events. Row i of the matrix marks
//! the events whose ordered occurrence leads to failure i.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// 1-based event index plus lookup into the model's name table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(u32);

impl EventId {
    /// `index` is 1-based, matching the column numbering of the matrix.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "event indices are 1-based");
        EventId(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}", self.0)
    }
}

/// 1-based failure index (matrix row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FailureId(u32);

impl FailureId {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "failure indices are 1-based");
        FailureId(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn zero_based(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for FailureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.0)
    }
}

const BLOCK_BITS: usize = 64;

/// Fixed-width bit vector over the event universe. Bit j-1 stands for event j.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventMask {
    width: usize,
    blocks: Vec<u64>,
}

impl EventMask {
    pub fn empty(width: usize) -> Self {
        EventMask {
            width,
            blocks: vec![0; width.div_ceil(BLOCK_BITS)],
        }
    }

    pub fn from_events(width: usize, events: &[EventId]) -> Self {
        let mut mask = EventMask::empty(width);
        for &e in events {
            mask.set(e);
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn set(&mut self, event: EventId) {
        let bit = event.zero_based();
        assert!(bit < self.width, "event index out of mask range");
        self.blocks[bit / BLOCK_BITS] |= 1 << (bit % BLOCK_BITS);
    }

    pub fn get(&self, event: EventId) -> bool {
        let bit = event.zero_based();
        bit < self.width && self.blocks[bit / BLOCK_BITS] & (1 << (bit % BLOCK_BITS)) != 0
    }

    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn and(&self, other: &EventMask) -> EventMask {
        assert_eq!(self.width, other.width, "mask width mismatch");
        EventMask {
            width: self.width,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// `(self AND other) == self`, i.e. every bit set here is also set in `other`.
    pub fn is_subset_of(&self, other: &EventMask) -> bool {
        assert_eq!(self.width, other.width, "mask width mismatch");
        self.blocks.iter().zip(&other.blocks).all(|(a, b)| a & b == *a)
    }

    /// Set events in index (temporal) order.
    pub fn events(&self) -> Vec<EventId> {
        (1..=self.width as u32)
            .map(EventId::new)
            .filter(|&e| self.get(e))
            .collect()
    }

    /// `0`/`1` characters, event 1 first.
    pub fn bit_string(&self) -> String {
        (1..=self.width as u32)
            .map(|i| if self.get(EventId::new(i)) { '1' } else { '0' })
            .collect()
    }
}

/// N×M binary matrix; row i is the ordered event set leading to failure i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventFailureMatrix {
    n_events: usize,
    rows: Vec<EventMask>,
}

impl EventFailureMatrix {
    /// Build from per-failure masks without invariant checks; `load_model`
    /// is the validating entry point, this one exists for `validate_matrix`
    /// tests and programmatic construction.
    pub fn from_masks(n_events: usize, rows: Vec<EventMask>) -> Self {
        for row in &rows {
            assert_eq!(row.width(), n_events, "row width mismatch");
        }
        EventFailureMatrix { n_events, rows }
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn n_failures(&self) -> usize {
        self.rows.len()
    }

    pub fn cell(&self, failure: FailureId, event: EventId) -> bool {
        self.rows[failure.zero_based()].get(event)
    }

    pub fn row_mask(&self, failure: FailureId) -> Result<&EventMask, ModelError> {
        self.rows
            .get(failure.zero_based())
            .ok_or(ModelError::UnknownFailureIndex(failure.index()))
    }

    /// Row events in temporal (index) order.
    pub fn row_events(&self, failure: FailureId) -> Vec<EventId> {
        self.rows[failure.zero_based()].events()
    }

    pub fn failure_ids(&self) -> impl Iterator<Item = FailureId> {
        (1..=self.rows.len() as u32).map(FailureId::new)
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> {
        (1..=self.n_events as u32).map(EventId::new)
    }

    /// Debug serialization: one row of `0`/`1` per line, event 1 first.
    pub fn to_bit_strings(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            out.push_str(&row.bit_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("line {line}: expected `events: <name>+` header, got `{content}`")]
    MissingEventsHeader { line: usize, content: String },
    #[error("line {line}: duplicate event name `{name}`")]
    DuplicateEventName { line: usize, name: String },
    #[error("line {line}: duplicate failure name `{name}`")]
    DuplicateFailureName { line: usize, name: String },
    #[error("line {line}: unknown event name `{name}`")]
    UnknownEvent { line: usize, name: String },
    #[error("line {line}: failure `{failure}` has an empty event sequence")]
    EmptyFailureSequence { line: usize, failure: String },
    #[error("line {line}: failure `{failure}`: events out of temporal order")]
    EventsOutOfOrder { line: usize, failure: String },
    #[error("duplicate failure signature: `{first}` and `{second}` list the same events")]
    DuplicateRow { first: String, second: String },
    #[error("line {line}: cannot parse `{content}`")]
    MalformedLine { line: usize, content: String },
    #[error("model declares no failures")]
    NoFailures,
    #[error("unknown failure index {0}")]
    UnknownFailureIndex(u32),
}

/// A loaded model: the matrix plus the event/failure name tables.
#[derive(Debug, Clone)]
pub struct Model {
    matrix: EventFailureMatrix,
    event_names: Vec<String>,
    failure_names: Vec<String>,
    event_index: HashMap<String, EventId>,
    failure_index: HashMap<String, FailureId>,
}

impl Model {
    pub fn matrix(&self) -> &EventFailureMatrix {
        &self.matrix
    }

    pub fn event_id(&self, name: &str) -> Option<EventId> {
        self.event_index.get(name).copied()
    }

    pub fn failure_id(&self, name: &str) -> Option<FailureId> {
        self.failure_index.get(name).copied()
    }

    pub fn event_name(&self, event: EventId) -> &str {
        &self.event_names[event.zero_based()]
    }

    pub fn failure_name(&self, failure: FailureId) -> &str {
        &self.failure_names[failure.zero_based()]
    }

    /// Regenerate the config text; reloading it yields an identical model.
    pub fn to_config_text(&self) -> String {
        let mut out = String::new();
        out.push_str("events: ");
        out.push_str(&self.event_names.join(" "));
        out.push('\n');
        for f in self.matrix.failure_ids() {
            let names: Vec<&str> = self
                .matrix
                .row_events(f)
                .into_iter()
                .map(|e| self.event_name(e))
                .collect();
            out.push_str(&format!(
                "failure {}: {}\n",
                self.failure_name(f),
                names.join(" ")
            ));
        }
        out
    }
}

/// Parse a model config file.
///
/// Format: first significant line `events: <name>+` (declaration order is the
/// global temporal order), then one `failure <name>: <event name>+` line per
/// failure. `#` starts a comment.
pub fn load_model(config_text: &str) -> Result<Model, ModelError> {
    let mut event_names: Vec<String> = Vec::new();
    let mut event_index: HashMap<String, EventId> = HashMap::new();
    let mut failure_names: Vec<String> = Vec::new();
    let mut failure_index: HashMap<String, FailureId> = HashMap::new();
    let mut rows: Vec<EventMask> = Vec::new();
    let mut saw_events = false;

    for (line_no, raw) in config_text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = match raw.find('#') {
            Some(pos) => raw[..pos].trim(),
            None => raw.trim(),
        };
        if line.is_empty() {
            continue;
        }

        if !saw_events {
            let rest = line
                .strip_prefix("events:")
                .ok_or_else(|| ModelError::MissingEventsHeader {
                    line: line_no,
                    content: line.to_string(),
                })?;
            for name in rest.split_whitespace() {
                if event_index.contains_key(name) {
                    return Err(ModelError::DuplicateEventName {
                        line: line_no,
                        name: name.to_string(),
                    });
                }
                let id = EventId::new(event_names.len() as u32 + 1);
                event_index.insert(name.to_string(), id);
                event_names.push(name.to_string());
            }
            if event_names.is_empty() {
                return Err(ModelError::MissingEventsHeader {
                    line: line_no,
                    content: line.to_string(),
                });
            }
            saw_events = true;
            continue;
        }

        let rest = line
            .strip_prefix("failure")
            .ok_or_else(|| ModelError::MalformedLine {
                line: line_no,
                content: line.to_string(),
            })?;
        let (name, seq) = rest
            .split_once(':')
            .ok_or_else(|| ModelError::MalformedLine {
                line: line_no,
                content: line.to_string(),
            })?;
        let name = name.trim();
        if name.is_empty() {
            return Err(ModelError::MalformedLine {
                line: line_no,
                content: line.to_string(),
            });
        }
        if failure_index.contains_key(name) {
            return Err(ModelError::DuplicateFailureName {
                line: line_no,
                name: name.to_string(),
            });
        }

        let mut events: Vec<EventId> = Vec::new();
        for ev_name in seq.split_whitespace() {
            let id = event_index.get(ev_name).copied().ok_or_else(|| {
                ModelError::UnknownEvent {
                    line: line_no,
                    name: ev_name.to_string(),
                }
            })?;
            if let Some(&last) = events.last() {
                if id <= last {
                    return Err(ModelError::EventsOutOfOrder {
                        line: line_no,
                        failure: name.to_string(),
                    });
                }
            }
            events.push(id);
        }
        if events.is_empty() {
            return Err(ModelError::EmptyFailureSequence {
                line: line_no,
                failure: name.to_string(),
            });
        }

        let mask = EventMask::from_events(event_names.len(), &events);
        if let Some(pos) = rows.iter().position(|r| *r == mask) {
            return Err(ModelError::DuplicateRow {
                first: failure_names[pos].clone(),
                second: name.to_string(),
            });
        }
        let fid = FailureId::new(failure_names.len() as u32 + 1);
        failure_index.insert(name.to_string(), fid);
        failure_names.push(name.to_string());
        rows.push(mask);
    }

    if !saw_events {
        return Err(ModelError::MissingEventsHeader {
            line: 0,
            content: String::new(),
        });
    }
    if rows.is_empty() {
        return Err(ModelError::NoFailures);
    }

    Ok(Model {
        matrix: EventFailureMatrix::from_masks(event_names.len(), rows),
        event_names,
        failure_names,
        event_index,
        failure_index,
    })
}

/// Maximum chain length for which the hop-distance probability stays positive.
pub const PROBABILITY_DOMAIN_MAX_HOPS: usize = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Report-only matrix check: empty rows and duplicate rows are violations,
/// chains longer than the probability domain get a warning.
pub fn validate_matrix(matrix: &EventFailureMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    for f in matrix.failure_ids() {
        let row = matrix.row_mask(f).expect("failure id in range");
        if row.is_empty() {
            report
                .violations
                .push(format!("{f}: row has no events set"));
        }
        if row.count_ones() > PROBABILITY_DOMAIN_MAX_HOPS {
            report.warnings.push(format!(
                "{f}: chain length {} exceeds the {}-hop probability domain",
                row.count_ones(),
                PROBABILITY_DOMAIN_MAX_HOPS
            ));
        }
        for g in matrix.failure_ids() {
            if g > f && matrix.row_mask(g).expect("in range") == row {
                report
                    .violations
                    .push(format!("duplicate failure signature: {f} and {g}"));
            }
        }
    }
    report
}

#[cfg(test)]
pub(crate) const DEMO_MODEL_CONFIG: &str = "\
# demo model: 8 events, 5 failures
events: E1 E2 E3 E4 E5 E6 E7 E8
failure F1: E1 E5 E6
failure F2: E3 E4 E6 E7
failure F3: E2 E5 E7 E8
failure F4: E5 E6
failure F5: E1 E5 E8
";

/// Eight-event five-failure demo model, shared by unit tests across modules.
#[cfg(test)]
pub(crate) fn demo_model() -> Model {
    load_model(DEMO_MODEL_CONFIG).unwrap()
}
