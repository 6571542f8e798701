//! Deterministic, seedable simulator of federated learning over a wireless cell.
//!
//! A base station coordinates `M` devices placed uniformly in a disk. Each round
//! a scheduling policy picks a subset of devices, the uplink bandwidth is split
//! so that every scheduled device finishes uploading at the same instant, the
//! scheduled devices run local SGD on their private shards, and the base
//! station averages the uploaded models. The simulated clock advances by the
//! straggler-determined round latency, which lets policies be compared by test
//! accuracy per unit of wallclock time instead of per round.
//!
//! The crate is organized around the stages of a round:
//!
//! * [`channel`] — device placement, path gain, spectral efficiency, and the
//!   shifted-exponential local-computation latency model.
//! * [`allocator`] — optimal equal-finish bandwidth split for a scheduled set
//!   (binary search), plus closed-form latency bounds for homogeneous devices.
//! * [`scheduler`] — the greedy latency/learning-efficiency policy, baseline
//!   policies (random, proportional fair, threshold), a brute-force oracle,
//!   and the rounds-to-accuracy regression.
//! * [`learner`] — IDX dataset loading, iid/non-iid partitioning, a 784-64-10
//!   MLP with exact backpropagation, local SGD, and FedAvg aggregation.
//! * [`simulator`] — the round loop tying everything together.
//! * [`config`] / [`cli`] / [`report`] — experiment files, subcommands, CSV
//!   and JSON outputs.
//!
//! Every random draw comes from a named sub-stream derived from one master
//! seed (see [`rng`]), so a full experiment trace is a pure function of its
//! configuration, with or without the `parallel` feature.

pub mod allocator;
pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod learner;
pub mod par;
pub mod report;
pub mod rng;
pub mod scheduler;
pub mod simulator;

pub use error::{Error, Result};
