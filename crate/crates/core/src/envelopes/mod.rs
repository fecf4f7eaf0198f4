//! Univariate losses and their p-th envelopes.

pub mod envelope;
pub mod loss;

pub use envelope::{envelope, envelope_limit_check, envelope_numeric, envelope_value, EnvelopeValue};
pub use loss::{ScalarFn, SmoothLoss, UnivariateLoss};
