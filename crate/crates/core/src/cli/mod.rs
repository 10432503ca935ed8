//! Configuration, reports and subcommands behind the `sigmak` binary.

mod commands;
mod config;
mod cone_input;
mod report;

pub use commands::{build_field, run, MAX_INTEGRAL_DIM, ROUND_TRIP_TOLERANCE};
pub use config::{parse_config, Command, ConeSpec, FieldSpec, Grid, JetMode, RunConfig, SweepSpec, Tolerances};
pub use cone_input::{answer_cone_query, parse_cone_queries, ConeAnswer, ConeInput, ConeQuery, MAX_QUERY_DIM};
pub use report::{parse_report, CanonicalParams, RunReport, SweepCell};
