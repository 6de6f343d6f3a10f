//! Material point method with extended quadratic B-splines and penalty contact
//! between discrete fields.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod contact;
pub mod error;
pub mod grid_bspline;
pub mod materials;
pub mod oracles;
pub mod solver;
pub mod state;

pub use error::{MpmError, Result};

pub type Vec2 = nalgebra::Vector2<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;
