//! Report model and serialization for the `ffext` command line tool.
//!
//! Reports serialize to JSON with sorted keys, floats printed with 17
//! significant digits and exact rationals as `"num/den"` strings, so that a
//! parse/serialize round trip is byte-identical.

pub mod report;
pub mod suites;

pub use report::{write_csv, write_json_value, write_table, CheckRow, Report, Value};
