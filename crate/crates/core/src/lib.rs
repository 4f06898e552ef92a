//! Discrete-time simulator of network selection for vehicles that can attach
//! to DSRC, LTE or Wi-Fi.
//!
//! Every BSM cycle each terminal broadcasts on its network, measures delay,
//! loss and jitter from what it hears, scores the three networks and decides
//! whether to hand off. Two decision rules are provided: a multi-play
//! probabilistic game that moves terminals a few at a time, and a
//! single-play argmax over the scores.
//!
//! ```
//! use vnsim::{engine, presets, report};
//!
//! let mut cfg = presets::table2_step();
//! cfg.num_cycles = 50;
//! let records = engine::run_scenario(&cfg).unwrap();
//! let summary = report::summarize(&records, 1, 20).unwrap();
//! assert_eq!(summary.total_terminals, 50);
//! ```

pub mod calibration;
pub mod cli;
pub mod domain;
pub mod engine;
pub mod evaluation;
pub mod netmodel;
pub mod presets;
pub mod report;
pub mod sensing;
pub mod strategy;

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/network-model.md")]
    mod network_model {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/game.md")]
    mod game {}
    #[doc = include_str!("../../../book/src/equilibrium.md")]
    mod equilibrium {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
