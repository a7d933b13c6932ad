//! Command-line front end: solving runs with listings, answer-table
//! tooling, interactive demos and the HTTP play service.

pub mod args;
pub mod check;
pub mod demo;
pub mod tables_cmd;
