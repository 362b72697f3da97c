//! Scalar abstraction for score arithmetic.
//!
//! All ranking math (tf-idf weights, cosine, expertise rank, feature
//! normalization, IR metrics) is generic over [`Real`] so the engine runs on
//! `f32` or `f64`. The crate root exports `f64` aliases, which is what the
//! CLI and the persisted artifacts use.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: Float
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + Sum<T>
        + Debug
        + Display
        + Default
        + Send
        + Sync
        + 'static
{
}

/// Lift an `f64` constant into the working scalar type.
pub fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 constant not representable in scalar type")
}

/// Min-max normalize a slice into `[0, 1]`.
///
/// A constant slice normalizes to `0.5` everywhere, so that a feature which
/// does not separate the candidates contributes a neutral value instead of a
/// division by zero.
pub fn min_max_normalize<F: Real>(values: &[F]) -> Vec<F> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut min = values[0];
    let mut max = values[0];
    for &v in &values[1..] {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    let range = max - min;
    if range == F::zero() {
        return vec![real(0.5); values.len()];
    }
    values.iter().map(|&v| (v - min) / range).collect()
}
