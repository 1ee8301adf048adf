//! Non-intrusive log-based failure prediction for deployed network elements.
//!
//! The pipeline converts device log files into timed event sequences and
//! predicts impending failures by traversing a DAG built from known
//! event-to-failure chains. Candidates are scored by hop distance and false
//! positives are pruned with an event bit-mask.
//!
//! Modules:
//! - [`model`]: event/failure universe and the event-failure matrix
//! - [`graph`]: DAG, hop matrix and the hop-distance failure probability
//! - [`parser`]: regex/threshold rules turning log lines into event records
//! - [`engine`]: concurrent prediction sessions with bit-mask pruning
//! - [`source`]: checkpointed log file polling
//! - [`output`]: report rendering (JSONL, CSV, trace)

pub mod engine;
pub mod graph;
pub mod model;
pub mod output;
pub mod parser;
pub mod source;
