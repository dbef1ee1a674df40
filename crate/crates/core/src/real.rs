//! Scalar abstraction for everything probabilistic: payoffs, outage
//! probabilities and the LP all work over any floating type.

use num_traits::{Float, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating scalar used by the probability/payoff/LP lane.
///
/// Exact quantities (field coefficients, matroid ranks) stay integer-valued
/// and do not go through this trait.
pub trait Real: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {
    /// Lift an `f64` constant (tolerances, literals) into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }
}

impl<T> Real for T where T: Float + FromPrimitive + Debug + Display + Send + Sync + 'static {}
