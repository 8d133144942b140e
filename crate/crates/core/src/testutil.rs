use std::path::PathBuf;

use crate::model::{parse, PtaModel};

pub(crate) fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

pub(crate) fn corpus(name: &str) -> PtaModel {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus model");
    parse(&text).expect("corpus model parses")
}

pub(crate) const CORPUS: [&str; 12] = [
    "bands1c.pta",
    "coffee.pta",
    "equal_bounds.pta",
    "language_gap.pta",
    "linear1c.pta",
    "loop1c.pta",
    "lower_counter.pta",
    "split.pta",
    "trace_gap.pta",
    "unused_upper.pta",
    "upper_counter.pta",
    "window1c.pta",
];
