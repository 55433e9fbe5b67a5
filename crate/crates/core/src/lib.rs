//! Coalition-based spectrum negotiation between primary users (licensed
//! channel holders) and secondary users in a cognitive-radio network.
//!
//! The crate is organised bottom-up:
//!
//! * [`topsis`] ranks alternatives against weighted benefit/cost criteria;
//! * [`model`] holds agents, zones and the [`Scenario`](model::Scenario)
//!   describing a run;
//! * [`coalition`] groups agents around their nearest coordinator and keeps
//!   each PU coalition's live parameter registry;
//! * [`protocol`] defines the messages and the pure agent state machines;
//! * [`kernel`] is the deterministic discrete-event engine producing a
//!   [`RunReport`](kernel::RunReport);
//! * [`experiments`] computes closed-form message totals and runs the four
//!   built-in studies;
//! * [`io`] and [`cli`] handle files and the command line.
//!
//! ```
//! use specnego::experiments::{generate_scenario, ScenarioParams};
//! use specnego::kernel::run;
//! use specnego::model::Topology;
//!
//! let scenario = generate_scenario(&ScenarioParams::new(Topology::CpuCsu, vec![5, 5, 5]));
//! let report = run(&scenario).unwrap();
//! assert_eq!(report.msg_counts.total, 75);
//! ```

pub mod cli;
pub mod coalition;
pub mod experiments;
pub mod io;
pub mod kernel;
pub mod model;
pub mod protocol;
pub mod topsis;
