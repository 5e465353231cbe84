//! Clearing and pricing engine for hotel-room auctions.
//!
//! Two market directions are covered:
//!
//! * **Forward auctions**, opened by a hotelier over a booking horizon. Guests
//!   submit sealed bids with a flexible arrival window and a fixed stay length;
//!   [`forward`] builds the winner-determination model, exports it as an LP
//!   file, and solves it exactly (branch and bound) or heuristically (greedy,
//!   first-come first-served).
//! * **Reverse auctions**, opened by a guest. Hoteliers compete with price
//!   offers; [`reverse`] turns historical accepted prices into a discrete
//!   distribution and picks the expected-profit maximizing offer, while
//!   [`rules`] mines quantitative association rules from past offers to price
//!   requests that have no exact historical match.
//!
//! [`store`] persists auctions and history as a single JSON document,
//! [`service`] exposes everything over HTTP and [`cli`] drives batch use.

pub mod auction;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod forward;
pub mod money;
pub mod reverse;
pub mod rules;
pub mod service;
pub mod store;

pub use error::{Error, Result};
pub use money::Money;
