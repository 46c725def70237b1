//! Beamforming and interference decoding for the two-user MISO
//! interference channel.
//!
//! Each receiver either treats the other user's signal as noise (`N`) or
//! decodes and cancels it (`D`), giving the four decoding structures
//! NN, ND, DN and DD. For each structure the crate provides
//!
//! * real-combination beamformer families whose grids cover the Pareto
//!   boundary of the rate region ([`pareto`]);
//! * small candidate sets for the maximum sum rate, including closed-form
//!   balancing beamformers ([`sumrate`]);
//! * closed-form optimality checks for matched-filter strategies ([`mrt`]);
//! * a brute-force grid oracle used as ground truth ([`oracle`]);
//! * a cheap heuristic and Monte-Carlo drivers ([`heuristic`], [`montecarlo`]).

pub mod channel;
pub mod heuristic;
pub mod linalg;
pub mod montecarlo;
pub mod mrt;
pub mod oracle;
pub mod pareto;
pub mod rates;
pub mod sumrate;

pub use channel::{Channel, User};
pub use linalg::CVec;
pub use rates::{DecodingStructure, Gains, RatePoint, TxStrategy};
