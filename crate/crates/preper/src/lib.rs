//! Preperiodic points of z² + c over quadratic fields.

pub mod curves;
pub mod dynamics;
pub mod fixtures;
pub mod localtests;
pub mod param;
pub mod portraits;
