//! Scalar traits the linear algebra is written against.
//!
//! [`Field`] is all the elimination code needs: an ordered field with exact
//! zero tests. [`RationalField`] adds access to numerators and denominators,
//! which is what clearing denominators, primitive kernel vectors and integral
//! checks require. The crate-level aliases instantiate both with
//! [`num_bigint::BigInt`]-backed rationals.

use std::fmt::{Debug, Display};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed};

/// Ordered field used by the elimination routines.
pub trait Field: Clone + PartialOrd + Signed + FromPrimitive + Debug + Display {
    fn from_small(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("scalar type cannot represent an i64")
    }
}

impl<T> Field for T where T: Clone + PartialOrd + Signed + FromPrimitive + Debug + Display {}

/// Integer type backing a [`RationalField`].
pub trait RingInt: Integer + Signed + Clone + FromPrimitive + Debug + Display {}

impl<I> RingInt for I where I: Integer + Signed + Clone + FromPrimitive + Debug + Display {}

/// A field of fractions with an accessible integer ring.
pub trait RationalField: Field {
    type Int: RingInt;

    fn numer_int(&self) -> Self::Int;
    fn denom_int(&self) -> Self::Int;
    fn from_int(v: Self::Int) -> Self;

    fn is_integral(&self) -> bool {
        self.denom_int().is_one()
    }
}

impl<I> RationalField for Ratio<I>
where
    I: RingInt,
    Ratio<I>: Field,
{
    type Int = I;

    fn numer_int(&self) -> I {
        self.numer().clone()
    }

    fn denom_int(&self) -> I {
        self.denom().clone()
    }

    fn from_int(v: I) -> Self {
        Ratio::from_integer(v)
    }
}

/// Least common multiple of all denominators in `values` (one for an empty slice).
pub fn common_denominator<Q: RationalField>(values: &[Q]) -> Q::Int {
    values.iter().fold(Q::Int::one(), |acc, v| acc.lcm(&v.denom_int()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Q = Ratio<BigInt>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn denominators_clear() {
        assert_eq!(common_denominator(&[q(1, 2), q(1, 3), q(4, 1)]), BigInt::from(6));
        assert_eq!(common_denominator::<Q>(&[]), BigInt::from(1));
    }

    #[test]
    fn small_ratio_backend_works_too() {
        let half = Ratio::<i64>::new(1, 2);
        assert!(!half.is_integral());
        assert_eq!(half.denom_int(), 2);
        assert!(Ratio::<i64>::from_int(3).is_integral());
    }
}
