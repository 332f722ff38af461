//! Chess workbench for "generous start" experiments: rules for orthodox and Corrida boards,
//! the long-algebraic game corpus, knight-dance opening scripts, a builtin alpha-beta engine
//! with a UCI adapter, and per-ply position metrics.

pub mod chesscore;
pub mod engines;
pub mod metrics;
pub mod notation;
pub mod strategy;
