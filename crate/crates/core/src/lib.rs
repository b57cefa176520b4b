//! Cooperative salvo guidance: a swarm of interceptors agrees on a common
//! time-to-go over a communication graph and arrives together.
//!
//! The crate is split into the planar engagement geometry, the network
//! model, time-to-go and target acceleration estimation, the guidance
//! laws, an optional airframe model and the closed-loop simulator.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod airframe;
pub mod engagement;
pub mod estimation;
pub mod guidance;
pub mod network;
pub mod output;
pub mod scenario;
pub mod simulator;
