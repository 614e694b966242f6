//! Dataset files, corpus statistics and the line-delimited JSON server.

mod dataset;
mod serve;
mod stats;

pub use dataset::{emit_dataset, load_dataset, read_jsonl, write_jsonl, DatasetError, DatasetRecord, FORMAT_VERSION};
pub use serve::{serve_lines, serve_listener, serve_stdio, serve_tcp, Server};
pub use stats::{compute_stats, AxiomCount, EmptyDataset, StatsAccumulator, StatsReport};
