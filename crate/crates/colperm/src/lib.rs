//! File formats, benchmark harness and statistics on top of
//! [`colperm_core`].

pub mod bench;
pub mod format;
pub mod grid;
pub mod wilcoxon;

pub use colperm_core as core;
