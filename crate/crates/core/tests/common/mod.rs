//! Shared fixtures for integration tests.
#![allow(dead_code)]

use failsense::engine::{Engine, EnginePolicy, PredictionReport};
use failsense::graph::{build_dag, build_hop_matrix};
use failsense::model::{load_model, EventId, Model};
use failsense::parser::EventRecord;

/// Eight-event, five-failure demo model used throughout the tests.
pub const DEMO_MODEL_CONFIG: &str = "\
events: E1 E2 E3 E4 E5 E6 E7 E8
failure F1: E1 E5 E6
failure F2: E3 E4 E6 E7
failure F3: E2 E5 E7 E8
failure F4: E5 E6
failure F5: E1 E5 E8
";

pub fn demo_model() -> Model {
    load_model(DEMO_MODEL_CONFIG).unwrap()
}

pub fn engine_for(model: &Model, policy: EnginePolicy) -> Engine {
    let matrix = model.matrix().clone();
    let dag = build_dag(&matrix);
    let hops = build_hop_matrix(&matrix);
    Engine::new(matrix, dag, hops, policy).unwrap()
}

pub fn record(event: u32, second: i64) -> EventRecord {
    EventRecord {
        event: EventId::new(event),
        timestamp: chrono::NaiveDate::from_ymd_opt(1970, 1, 1)
            .unwrap()
            .and_hms_opt(0, 0, 0)
            .unwrap()
            + chrono::Duration::seconds(second),
        line_no: second as u64,
    }
}

pub fn feed(engine: &mut Engine, events: &[u32]) -> Vec<PredictionReport> {
    let mut reports = Vec::new();
    for (i, &ev) in events.iter().enumerate() {
        reports.extend(engine.ingest(&record(ev, i as i64 + 1)).unwrap());
    }
    reports
}
