//! Distributed proximal gradient optimization over time-varying networks.
//!
//! Each of `m` agents holds a smooth, possibly non-convex local loss `g_i`
//! and a shared convex regularizer `h`. Agents jointly minimize
//! `(1/m) Σ_i (g_i(x) + h(x))` by repeating
//!
//! ```text
//! q_i = x_i - α ∇g_i(x_i)          (local gradient step)
//! v_i = Σ_j λ_ij q_j               (k gossip rounds at iteration k)
//! x_i = prox_{α,h}(v_i)            (local proximal step)
//! ```
//!
//! The crate provides the graph model ([`graph`]), proximal operators
//! ([`prox`]), local objectives and LIBSVM ingestion ([`objective`]), the
//! iteration itself ([`algorithm`]), a message-level gossip simulator
//! ([`simulator`]) and runtime convergence certificates ([`diagnostics`]).

pub mod algorithm;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod objective;
pub mod prox;
pub mod simulator;

pub use error::{Error, Result};
