//! DAG-traversal prediction engine.
//!
//! Every incoming event is offered to every active session and is also
//! checked as a session starter, so one event can simultaneously open a new
//! chain and continue existing ones. Each session keeps an event bit-mask;
//! with pruning on, a candidate failure survives only while
//! `mask AND row = mask`.

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::graph::{failure_probability, Dag, HopMatrix, Node};
use crate::model::{EventFailureMatrix, EventId, EventMask, FailureId};
use crate::parser::EventRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strictness {
    /// A non-edge event marks the session as an invalid sequence.
    Strict,
    /// A non-edge event leaves the session untouched.
    Lenient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnginePolicy {
    /// Bit-mask candidate pruning on/off.
    pub pruning: bool,
    pub strictness: Strictness,
    /// Report entries with probability at or above this are flagged.
    pub alert_threshold: f64,
    /// Sessions idle longer than this close as exhausted on `tick`.
    pub session_timeout: Option<chrono::Duration>,
    /// Skip re-pruning after a node with a single outgoing edge; the
    /// surviving set is unchanged in that case.
    pub single_transition_skip: bool,
}

impl Default for EnginePolicy {
    fn default() -> Self {
        EnginePolicy {
            pruning: true,
            strictness: Strictness::Strict,
            alert_threshold: 0.9,
            session_timeout: None,
            single_transition_skip: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionStatus {
    Active,
    InvalidSequence,
    RejectedAllCandidates,
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Predicting,
    InvalidSequence,
    RejectedAllCandidates,
    Exhausted,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Predicting => "predicting",
            Verdict::InvalidSequence => "invalid_sequence",
            Verdict::RejectedAllCandidates => "rejected_all_candidates",
            Verdict::Exhausted => "exhausted",
        }
    }
}

/// One candidate failure in a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateEntry {
    pub failure: FailureId,
    pub hops: u32,
    pub probability: f64,
    pub alert: bool,
}

/// Per-event snapshot of one session's candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub session: u64,
    pub trigger: EventRecord,
    pub entries: Vec<CandidateEntry>,
    /// Candidates whose full event row has been observed.
    pub terminal: Vec<FailureId>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone)]
struct Session {
    id: u64,
    current: EventId,
    mask: EventMask,
    candidates: Vec<FailureId>,
    history: Vec<EventId>,
    last_record: EventRecord,
}

/// Read-only view of an active session.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionSummary {
    pub id: u64,
    pub current: EventId,
    pub candidates: Vec<FailureId>,
    pub history: Vec<EventId>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("hop matrix is {got_events}x{got_failures}, expected {want_events}x{want_failures}")]
    HopMatrixMismatch {
        got_events: usize,
        got_failures: usize,
        want_events: usize,
        want_failures: usize,
    },
    #[error("DAG has {got_events} events and {got_failures} failures, expected {want_events}x{want_failures}")]
    DagMismatch {
        got_events: usize,
        got_failures: usize,
        want_events: usize,
        want_failures: usize,
    },
    #[error("alert threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("event index {0} out of range (model has {1} events)")]
    EventOutOfRange(u32, usize),
}

/// Keep a candidate only while the session mask is a subset of its row.
pub fn prune_candidates(
    mask: &EventMask,
    candidates: &[FailureId],
    matrix: &EventFailureMatrix,
) -> Vec<FailureId> {
    prune_candidates_counted(mask, candidates, matrix).0
}

/// As [`prune_candidates`], also returning the number of mask-AND
/// evaluations performed: exactly one per candidate.
pub fn prune_candidates_counted(
    mask: &EventMask,
    candidates: &[FailureId],
    matrix: &EventFailureMatrix,
) -> (Vec<FailureId>, usize) {
    let mut survivors = Vec::with_capacity(candidates.len());
    let mut and_ops = 0;
    for &f in candidates {
        let row = matrix.row_mask(f).expect("candidate in matrix range");
        and_ops += 1;
        if mask.is_subset_of(row) {
            survivors.push(f);
        }
    }
    (survivors, and_ops)
}

#[derive(Debug)]
pub struct Engine {
    matrix: EventFailureMatrix,
    dag: Dag,
    hops: HopMatrix,
    policy: EnginePolicy,
    sessions: Vec<Session>,
    next_session_id: u64,
}

impl Engine {
    pub fn new(
        matrix: EventFailureMatrix,
        dag: Dag,
        hops: HopMatrix,
        policy: EnginePolicy,
    ) -> Result<Self, EngineError> {
        if dag.n_events() != matrix.n_events() || dag.n_failures() != matrix.n_failures() {
            return Err(EngineError::DagMismatch {
                got_events: dag.n_events(),
                got_failures: dag.n_failures(),
                want_events: matrix.n_events(),
                want_failures: matrix.n_failures(),
            });
        }
        if hops.n_events() != matrix.n_events() || hops.n_failures() != matrix.n_failures() {
            return Err(EngineError::HopMatrixMismatch {
                got_events: hops.n_events(),
                got_failures: hops.n_failures(),
                want_events: matrix.n_events(),
                want_failures: matrix.n_failures(),
            });
        }
        if !(0.0..=1.0).contains(&policy.alert_threshold) {
            return Err(EngineError::InvalidThreshold(policy.alert_threshold));
        }
        Ok(Engine {
            matrix,
            dag,
            hops,
            policy,
            sessions: Vec::new(),
            next_session_id: 1,
        })
    }

    pub fn policy(&self) -> &EnginePolicy {
        &self.policy
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }

    /// Feed one event record. Returns one report per affected session:
    /// a freshly spawned session first (when the event is a valid start),
    /// then pre-existing sessions in id order.
    pub fn ingest(&mut self, record: &EventRecord) -> Result<Vec<PredictionReport>, EngineError> {
        let event = record.event;
        if event.zero_based() >= self.matrix.n_events() {
            return Err(EngineError::EventOutOfRange(
                event.index(),
                self.matrix.n_events(),
            ));
        }

        let mut reports = Vec::new();
        let existing_ids: Vec<u64> = self.sessions.iter().map(|s| s.id).collect();

        if self.dag.is_start_event(event) {
            let mut mask = EventMask::empty(self.matrix.n_events());
            mask.set(event);
            let candidates = if self.policy.pruning {
                let all: Vec<FailureId> = self.matrix.failure_ids().collect();
                prune_candidates(&mask, &all, &self.matrix)
            } else {
                self.reachable_candidates(event)
            };
            let session = Session {
                id: self.next_session_id,
                current: event,
                mask,
                candidates,
                history: vec![event],
                last_record: record.clone(),
            };
            self.next_session_id += 1;
            reports.push(self.session_report(&session, record, Verdict::Predicting));
            self.sessions.push(session);
        }

        let mut closed: Vec<u64> = Vec::new();
        for id in existing_ids {
            let idx = self
                .sessions
                .iter()
                .position(|s| s.id == id)
                .expect("session still present");
            let has_edge = self
                .dag
                .has_edge(Node::Event(self.sessions[idx].current), Node::Event(event));

            if has_edge {
                let prior_degree = self
                    .dag
                    .out_degree(Node::Event(self.sessions[idx].current));
                let reachable = if self.policy.pruning {
                    Vec::new()
                } else {
                    self.reachable_candidates(event)
                };
                let session = &mut self.sessions[idx];
                session.mask.set(event);
                session.history.push(event);
                session.current = event;
                session.last_record = record.clone();
                if self.policy.pruning {
                    let skip = self.policy.single_transition_skip && prior_degree == 1;
                    if !skip {
                        session.candidates =
                            prune_candidates(&session.mask, &session.candidates, &self.matrix);
                    }
                } else {
                    session.candidates = reachable;
                }
                if self.sessions[idx].candidates.is_empty() {
                    let report = self.session_report(
                        &self.sessions[idx],
                        record,
                        Verdict::RejectedAllCandidates,
                    );
                    reports.push(report);
                    closed.push(id);
                } else {
                    let report =
                        self.session_report(&self.sessions[idx], record, Verdict::Predicting);
                    reports.push(report);
                }
            } else {
                match self.policy.strictness {
                    Strictness::Strict => {
                        let report = self.session_report(
                            &self.sessions[idx],
                            record,
                            Verdict::InvalidSequence,
                        );
                        reports.push(report);
                        closed.push(id);
                    }
                    Strictness::Lenient => {}
                }
            }
        }

        self.sessions.retain(|s| !closed.contains(&s.id));
        Ok(reports)
    }

    /// Close sessions idle longer than the policy timeout.
    pub fn tick(&mut self, now: NaiveDateTime) -> Vec<PredictionReport> {
        let Some(timeout) = self.policy.session_timeout else {
            return Vec::new();
        };
        let mut reports = Vec::new();
        let mut closed = Vec::new();
        for session in &self.sessions {
            if now.signed_duration_since(session.last_record.timestamp) > timeout {
                let record = session.last_record.clone();
                reports.push(self.session_report(session, &record, Verdict::Exhausted));
                closed.push(session.id);
            }
        }
        self.sessions.retain(|s| !closed.contains(&s.id));
        reports
    }

    pub fn snapshot(&self) -> Vec<SessionSummary> {
        self.sessions
            .iter()
            .map(|s| SessionSummary {
                id: s.id,
                current: s.current,
                candidates: s.candidates.clone(),
                history: s.history.clone(),
            })
            .collect()
    }

    fn reachable_candidates(&self, event: EventId) -> Vec<FailureId> {
        self.hops.reachable(event).into_iter().map(|(f, _)| f).collect()
    }

    fn session_report(
        &self,
        session: &Session,
        record: &EventRecord,
        verdict: Verdict,
    ) -> PredictionReport {
        let (entries, terminal) = match verdict {
            Verdict::InvalidSequence | Verdict::RejectedAllCandidates => (Vec::new(), Vec::new()),
            Verdict::Predicting | Verdict::Exhausted => {
                let entries: Vec<CandidateEntry> = session
                    .candidates
                    .iter()
                    .filter_map(|&f| {
                        let hops = self.hops.get(session.current, f);
                        if hops == 0 {
                            return None;
                        }
                        let probability =
                            failure_probability(hops).expect("hops > 0 by construction");
                        Some(CandidateEntry {
                            failure: f,
                            hops,
                            probability,
                            alert: probability >= self.policy.alert_threshold,
                        })
                    })
                    .collect();
                let terminal: Vec<FailureId> = session
                    .candidates
                    .iter()
                    .copied()
                    .filter(|&f| {
                        self.matrix.row_mask(f).expect("in range") == &session.mask
                    })
                    .collect();
                (entries, terminal)
            }
        };
        PredictionReport {
            session: session.id,
            trigger: record.clone(),
            entries,
            terminal,
            verdict,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_dag, build_hop_matrix};
    use crate::model::{demo_model, Model};

    fn e(i: u32) -> EventId {
        EventId::new(i)
    }

    fn f(i: u32) -> FailureId {
        FailureId::new(i)
    }

    fn record(event: u32, second: u32) -> EventRecord {
        EventRecord {
            event: e(event),
            timestamp: chrono::NaiveDate::from_ymd_opt(1970, 1, 1)
                .unwrap()
                .and_hms_opt(0, 0, 0)
                .unwrap()
                + chrono::Duration::seconds(second as i64),
            line_no: second as u64,
        }
    }

    fn engine_for(model: &Model, policy: EnginePolicy) -> Engine {
        let matrix = model.matrix().clone();
        let dag = build_dag(&matrix);
        let hops = build_hop_matrix(&matrix);
        Engine::new(matrix, dag, hops, policy).unwrap()
    }

    fn feed(engine: &mut Engine, events: &[u32]) -> Vec<PredictionReport> {
        let mut reports = Vec::new();
        for (i, &ev) in events.iter().enumerate() {
            reports.extend(engine.ingest(&record(ev, i as u32 + 1)).unwrap());
        }
        reports
    }

    fn session_entries(reports: &[PredictionReport], session: u64) -> Vec<Vec<FailureId>> {
        reports
            .iter()
            .filter(|r| r.session == session)
            .map(|r| r.entries.iter().map(|c| c.failure).collect())
            .collect()
    }

    #[test]
    fn rejects_mismatched_hop_matrix() {
        let model = demo_model();
        let small = crate::model::load_model("events: E1\nfailure F: E1\n").unwrap();
        let err = Engine::new(
            model.matrix().clone(),
            build_dag(model.matrix()),
            build_hop_matrix(small.matrix()),
            EnginePolicy::default(),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::HopMatrixMismatch { .. }));
    }

    #[test]
    fn rejects_bad_threshold() {
        let model = demo_model();
        let err = Engine::new(
            model.matrix().clone(),
            build_dag(model.matrix()),
            build_hop_matrix(model.matrix()),
            EnginePolicy {
                alert_threshold: 1.5,
                ..EnginePolicy::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::InvalidThreshold(_)));
    }

    #[test]
    fn new_engine_is_empty() {
        let model = demo_model();
        let engine = engine_for(&model, EnginePolicy::default());
        assert_eq!(engine.session_count(), 0);
        assert!(engine.snapshot().is_empty());
    }

    #[test]
    fn ingest_rejects_out_of_range_event() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let err = engine.ingest(&record(9, 1)).unwrap_err();
        assert!(matches!(err, EngineError::EventOutOfRange(9, 8)));
    }

    // Pruned trace: E1,E5,E6 narrows to F1 alone, terminal at the end.
    #[test]
    fn pruned_trace_converges_on_f1() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[1, 5, 6]);
        let steps = session_entries(&reports, 1);
        assert_eq!(
            steps,
            vec![
                vec![f(1), f(5)],
                vec![f(1), f(5)],
                vec![f(1)],
            ]
        );
        let last = reports.iter().filter(|r| r.session == 1).last().unwrap();
        assert_eq!(last.terminal, vec![f(1)]);
        assert!((last.entries[0].probability - 0.9728171817).abs() < 1e-9);
        let first = reports.iter().find(|r| r.session == 1).unwrap();
        assert!((first.entries[0].probability - 0.7991446308).abs() < 1e-9);
    }

    // Unpruned trace: every hop-reachable failure is reported.
    #[test]
    fn unpruned_trace_reports_reachable_failures() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                pruning: false,
                ..EnginePolicy::default()
            },
        );
        let reports = feed(&mut engine, &[1, 5, 6]);
        let steps = session_entries(&reports, 1);
        assert_eq!(
            steps,
            vec![
                vec![f(1), f(5)],
                vec![f(1), f(3), f(4), f(5)],
                vec![f(1), f(2), f(4)],
            ]
        );
    }

    #[test]
    fn invalid_sequence_detected() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[1, 5, 6, 8]);
        let verdicts: Vec<Verdict> = reports
            .iter()
            .filter(|r| r.session == 1)
            .map(|r| r.verdict)
            .collect();
        assert_eq!(*verdicts.last().unwrap(), Verdict::InvalidSequence);
        // strict mode closes the session
        assert!(engine.snapshot().iter().all(|s| s.id != 1));
    }

    #[test]
    fn lenient_mode_ignores_non_edge_events() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                strictness: Strictness::Lenient,
                ..EnginePolicy::default()
            },
        );
        let reports = feed(&mut engine, &[1, 4, 5]);
        // E4 has no edge from E1 and is not a start event: no report for it.
        assert!(reports
            .iter()
            .all(|r| r.verdict == Verdict::Predicting));
        let snap = engine.snapshot();
        assert_eq!(snap.len(), 2); // E1 session advanced to E5, plus E5 starter
        assert_eq!(snap[0].history, vec![e(1), e(5)]);
    }

    #[test]
    fn false_positive_stream_rejected_with_pruning() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[1, 5, 6, 7, 8]);
        assert!(reports
            .iter()
            .any(|r| r.verdict == Verdict::RejectedAllCandidates));
        // Nothing left alive once every mask stops matching.
        assert_eq!(engine.session_count(), 0);
        assert!(reports.iter().all(|r| r.terminal != vec![f(3)]
            && r.terminal != vec![f(5)]));
    }

    #[test]
    fn false_positive_stream_without_pruning() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                pruning: false,
                ..EnginePolicy::default()
            },
        );
        let reports = feed(&mut engine, &[1, 5, 6, 7, 8]);
        let at_e8: Vec<FailureId> = reports
            .iter()
            .filter(|r| r.session == 1 && r.trigger.event == e(8))
            .flat_map(|r| r.entries.iter().map(|c| c.failure))
            .collect();
        assert_eq!(at_e8, vec![f(3), f(5)]);
    }

    #[test]
    fn prune_examples() {
        let model = demo_model();
        let m = model.matrix();
        let mask = EventMask::from_events(8, &[e(1), e(5), e(6)]);
        assert_eq!(prune_candidates(&mask, &[f(1), f(5)], m), vec![f(1)]);

        let zero = EventMask::empty(8);
        let all: Vec<FailureId> = m.failure_ids().collect();
        assert_eq!(prune_candidates(&zero, &all, m), all);

        let just_e1 = EventMask::from_events(8, &[e(1)]);
        assert_eq!(prune_candidates(&just_e1, &all, m), vec![f(1), f(5)]);
    }

    #[test]
    fn prune_counts_one_and_per_candidate() {
        let model = demo_model();
        let m = model.matrix();
        let all: Vec<FailureId> = m.failure_ids().collect();
        let mask = EventMask::from_events(8, &[e(1)]);
        let (_, ops) = prune_candidates_counted(&mask, &all, m);
        assert_eq!(ops, all.len());
        let (_, ops) = prune_candidates_counted(&mask, &[], m);
        assert_eq!(ops, 0);
    }

    // E5 both starts a new chain and continues the E1 chain.
    #[test]
    fn concurrent_sessions_on_shared_event() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[5, 6]);
        let last = reports.iter().filter(|r| r.session == 1).last().unwrap();
        assert_eq!(last.terminal, vec![f(4)]);
        let live: Vec<FailureId> = last.entries.iter().map(|c| c.failure).collect();
        assert_eq!(live, vec![f(1), f(4)]);
    }

    #[test]
    fn snapshot_after_lone_e5() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        feed(&mut engine, &[5]);
        let snap = engine.snapshot();
        assert_eq!(snap.len(), 1);
        assert_eq!(snap[0].current, e(5));
        assert_eq!(snap[0].candidates, vec![f(1), f(3), f(4), f(5)]);
    }

    #[test]
    fn snapshot_after_pruned_trace() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        feed(&mut engine, &[1, 5, 6]);
        let snap = engine.snapshot();
        let s1 = snap.iter().find(|s| s.id == 1).unwrap();
        assert_eq!(s1.current, e(6));
        assert_eq!(s1.candidates, vec![f(1)]);
    }

    #[test]
    fn terminal_does_not_close_session_with_live_supersets() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        feed(&mut engine, &[5, 6]);
        // F4 is terminal but F1 is still live, so the session stays open.
        assert!(engine.snapshot().iter().any(|s| s.id == 1));
    }

    #[test]
    fn tick_without_timeout_is_noop() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        feed(&mut engine, &[1]);
        let reports = engine.tick(record(1, 3600).timestamp);
        assert!(reports.is_empty());
        assert_eq!(engine.session_count(), 1);
    }

    #[test]
    fn tick_expires_idle_sessions() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                session_timeout: Some(chrono::Duration::seconds(10)),
                ..EnginePolicy::default()
            },
        );
        feed(&mut engine, &[1]);
        let reports = engine.tick(record(1, 30).timestamp);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].verdict, Verdict::Exhausted);
        assert_eq!(engine.session_count(), 0);
    }

    #[test]
    fn tick_only_expires_stale_sessions() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                session_timeout: Some(chrono::Duration::seconds(10)),
                strictness: Strictness::Lenient,
                ..EnginePolicy::default()
            },
        );
        engine.ingest(&record(1, 1)).unwrap();
        engine.ingest(&record(2, 15)).unwrap();
        let reports = engine.tick(record(1, 16).timestamp);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].session, 1);
        assert_eq!(engine.session_count(), 1);
    }

    #[test]
    fn candidate_sets_shrink_monotonically() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[1, 5, 6]);
        let steps = session_entries(&reports, 1);
        for pair in steps.windows(2) {
            assert!(pair[1].iter().all(|f| pair[0].contains(f)));
        }
    }

    #[test]
    fn repeated_event_follows_strictness_policy() {
        let model = demo_model();
        let mut engine = engine_for(&model, EnginePolicy::default());
        let reports = feed(&mut engine, &[1, 1]);
        // Second E1 has no edge from E1: session 1 goes invalid, but the
        // repeat also spawns session 2 since E1 is a valid start.
        assert!(reports
            .iter()
            .any(|r| r.session == 1 && r.verdict == Verdict::InvalidSequence));
        assert!(engine.snapshot().iter().any(|s| s.id == 2));
    }

    #[test]
    fn determinism_across_runs() {
        let model = demo_model();
        let mut a = engine_for(&model, EnginePolicy::default());
        let mut b = engine_for(&model, EnginePolicy::default());
        let events = [5, 1, 5, 6, 7];
        assert_eq!(feed(&mut a, &events), feed(&mut b, &events));
    }

    #[test]
    fn single_transition_skip_does_not_change_reports() {
        let model = demo_model();
        let events = [1, 5, 6, 7, 8, 2, 5, 6, 3, 4, 6, 7];
        let mut with_skip = engine_for(&model, EnginePolicy::default());
        let mut without_skip = engine_for(
            &model,
            EnginePolicy {
                single_transition_skip: false,
                ..EnginePolicy::default()
            },
        );
        assert_eq!(feed(&mut with_skip, &events), feed(&mut without_skip, &events));
    }

    #[test]
    fn alert_flag_follows_threshold() {
        let model = demo_model();
        let mut engine = engine_for(
            &model,
            EnginePolicy {
                alert_threshold: 0.9,
                ..EnginePolicy::default()
            },
        );
        let reports = feed(&mut engine, &[1, 5]);
        let first = &reports[0];
        assert!(first.entries.iter().all(|c| !c.alert)); // p = 0.799...
        let second = reports.iter().filter(|r| r.session == 1).last().unwrap();
        assert!(second.entries.iter().all(|c| c.alert)); // p = 0.926...
    }
}
