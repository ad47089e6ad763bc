//! Drawing-complexity metrics from timestamped stroke logs, and the
//! statistical workflow (correlation screening, residualization, Varimax PCA,
//! loading pruning, cross-dataset consensus, group tests) that combines them.
//!
//! Modules follow the data flow: [`ink`] sessions → [`segmentation`] steps →
//! [`spatial`], [`temporal`] and [`colour`] metrics → [`stats`] on a
//! [`MetricMatrix`] → [`pipeline`] reports. [`synth`] generates sessions and
//! series with known ground truth.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod colour;
pub mod error;
pub mod ink;
pub mod pipeline;
pub mod scalar;
pub mod segmentation;
pub mod spatial;
pub mod stats;
pub mod synth;
pub mod temporal;

pub use error::{Error, Result};
pub use ink::{DrawingSession, Palette, Stroke, StrokePoint};
pub use scalar::Scalar;
pub use segmentation::{Simplification, StepSeries, TurningAngles};
pub use stats::{MetricMatrix, PcaModel};
pub use temporal::BinarySeries;

pub type MetricMatrixF64 = stats::MetricMatrix<f64>;
pub type MetricMatrixF32 = stats::MetricMatrix<f32>;
pub type PcaModelF64 = stats::PcaModel<f64>;
pub type PcaModelF32 = stats::PcaModel<f32>;
pub type StepSeriesF64 = segmentation::StepSeries<f64>;
pub type StepSeriesF32 = segmentation::StepSeries<f32>;
