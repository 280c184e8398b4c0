#![allow(dead_code)]

pub mod gen;
pub mod lgs_sim;
pub mod oracle;

use reqcheck_core::ir::Model;

/// Reads one of the shipped models by file name.
pub fn shipped(name: &str) -> String {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/models/");
    std::fs::read_to_string(format!("{path}{name}")).expect("shipped model exists")
}

pub fn requirement_names(model: &Model) -> Vec<String> {
    model.requirements().map(|r| r.name.clone()).collect()
}
