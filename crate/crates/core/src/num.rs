//! Scalar abstraction: everything numerical in this crate is generic over a
//! floating-point type implementing [`Real`].

use num_traits as nt;

/// Floating-point scalar used throughout the crate (`f32` or `f64`).
pub trait Real:
    nt::Float
    + nt::FloatConst
    + nt::NumAssign
    + std::fmt::Debug
    + std::fmt::Display
    + std::fmt::LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`, for literals and tolerances.
    fn of(value: f64) -> Self {
        nt::cast(value).expect("literal not representable in scalar type")
    }

    /// Lossy conversion from `usize`, for averages and normalizations.
    fn of_usize(value: usize) -> Self {
        nt::cast(value).expect("count not representable in scalar type")
    }

    /// Lossy conversion to `f64`, for reporting and output formatting.
    fn to_f64(self) -> f64 {
        nt::cast(self).expect("scalar not representable as f64")
    }
}

impl<T> Real for T where
    T: nt::Float
        + nt::FloatConst
        + nt::NumAssign
        + std::fmt::Debug
        + std::fmt::Display
        + std::fmt::LowerExp
        + Default
        + Send
        + Sync
        + 'static
{
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casts_round_trip() {
        let x: f32 = Real::of(0.5);
        assert_eq!(x, 0.5f32);
        let y: f64 = Real::of_usize(7);
        assert_eq!(y, 7.0);
        assert_eq!(1.25f64.to_f64(), 1.25);
    }
}
