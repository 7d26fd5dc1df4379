//! Socially-aware placement of users on a Symphony small-world DHT.
//!
//! A [`graph::SocialGraph`] is embedded onto a fixed [`overlay::Ring`] by permuting the
//! [`overlay::Placement`] of users over ring slots. The [`engine`] runs the gossip
//! refinement, [`metrics`] measures lookup latency, migration and reliability, and
//! [`experiment`] drives seeded, replicated runs that write CSV logs.
//!
//! Core types are generic over the float [`Scalar`] used for identifiers, strengths and
//! costs. The aliases below fix it to `f64` (the default) or `f32`.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod metrics;
pub mod overlay;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Ring = overlay::Ring<f64>;
pub type Ring32 = overlay::Ring<f32>;
pub type EngineState = engine::EngineState<f64>;
pub type EngineState32 = engine::EngineState<f32>;
pub type StrengthProvider = graph::StrengthProvider<f64>;
pub type StrengthProvider32 = graph::StrengthProvider<f32>;
pub type SwapDecision = engine::SwapDecision<f64>;
