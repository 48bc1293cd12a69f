//! Order-unit norms and scalarized cone metrics over finite-dimensional cones.
//!
//! A cone `K` in `R^n` with an interior point `e` induces the order-unit norm
//! `p(x) = inf { λ : -λe <= x <= λe }`. Composing a cone-valued metric `d`
//! with `p` gives an ordinary metric whose open balls coincide with the balls
//! `{ y : μe - d(x, y) is an order unit }`, so cone-metric questions
//! (Cauchy sequences, contractions, fixed points) can be answered with
//! real-valued tools.

pub(crate) mod bisect;
pub mod cones;
pub mod error;
pub mod fixedpoint;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod ordernorm;
pub mod par;
pub mod report;
pub mod sequences;
pub mod suite;

pub use cones::Cone;
pub use error::{Error, Result};
pub use linalg::Vector;
pub use metric::{ConeMetric, ScalarizedMetric};
pub use ordernorm::OrderUnitSpace;
