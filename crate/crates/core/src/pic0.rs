//! Degree-zero line bundles on a cycle of rational curves.
//!
//! `Pic⁰` of a cycle is the multiplicative group `ℂ*`. Elements are kept
//! exactly as a positive rational modulus together with a rational angle in
//! `[0, 1)`, i.e. `modulus · e^{2πi·angle}`. That is enough to tell roots of
//! unity (and their orders) apart from everything else.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Pic0Error {
    #[error("modulus must be positive, got {0}")]
    NonPositiveModulus(Rational),
    #[error("nonconstant family needs at least two distinct samples")]
    DegenerateFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(BigInt),
    Infinite,
}

impl Order {
    pub fn is_finite(&self) -> bool {
        matches!(self, Order::Finite(_))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(t) => write!(f, "finite({t})"),
            Order::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PicZeroElement {
    modulus: Rational,
    angle: Rational,
}

fn reduce_angle(angle: Rational) -> Rational {
    let frac = angle.clone() - angle.floor();
    debug_assert!(!frac.is_negative() && frac < Rational::one());
    frac
}

impl PicZeroElement {
    /// Builds `modulus · e^{2πi·angle}`; the angle is reduced mod 1.
    pub fn new(modulus: Rational, angle: Rational) -> Result<Self, Pic0Error> {
        if !modulus.is_positive() {
            return Err(Pic0Error::NonPositiveModulus(modulus));
        }
        Ok(Self {
            modulus,
            angle: reduce_angle(angle),
        })
    }

    /// The root of unity `e^{2πi·angle}`.
    pub fn unity(angle: Rational) -> Self {
        Self {
            modulus: Rational::one(),
            angle: reduce_angle(angle),
        }
    }

    pub fn identity() -> Self {
        Self::unity(Rational::zero())
    }

    pub fn modulus(&self) -> &Rational {
        &self.modulus
    }

    pub fn angle(&self) -> &Rational {
        &self.angle
    }

    pub fn is_identity(&self) -> bool {
        self.modulus.is_one() && self.angle.is_zero()
    }

    pub fn order(&self) -> Order {
        if self.modulus.is_one() {
            Order::Finite(self.angle.denom().clone())
        } else {
            Order::Infinite
        }
    }

    /// Group-law power; negative exponents invert.
    pub fn power(&self, j: i64) -> Self {
        let e = j.unsigned_abs();
        let mut modulus = Rational::new(
            num_traits::pow(self.modulus.numer().clone(), e as usize),
            num_traits::pow(self.modulus.denom().clone(), e as usize),
        );
        if j < 0 {
            modulus = modulus.recip();
        }
        let angle = self.angle.clone() * Rational::from_integer(BigInt::from(j));
        Self {
            modulus,
            angle: reduce_angle(angle),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            modulus: self.modulus.clone() * other.modulus.clone(),
            angle: reduce_angle(self.angle.clone() + other.angle.clone()),
        }
    }
}

impl fmt::Display for PicZeroElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.modulus, self.angle)
    }
}

/// A family `λ ↦ 𝒫_λ` of elements over the smooth members of a pencil.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PicZeroFamily {
    Constant(PicZeroElement),
    /// Optional witnesses; when present they must contain two distinct values.
    Nonconstant {
        samples: Vec<PicZeroElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyProfile {
    ConstantFinite(BigInt),
    ConstantInfinite,
    Nonconstant,
}

impl FamilyProfile {
    pub fn as_str(&self) -> String {
        match self {
            FamilyProfile::ConstantFinite(t) => format!("constant_finite({t})"),
            FamilyProfile::ConstantInfinite => "constant_infinite".to_string(),
            FamilyProfile::Nonconstant => "nonconstant".to_string(),
        }
    }
}

impl PicZeroFamily {
    pub fn nonconstant() -> Self {
        PicZeroFamily::Nonconstant { samples: Vec::new() }
    }

    pub fn profile(&self) -> Result<FamilyProfile, Pic0Error> {
        match self {
            PicZeroFamily::Constant(e) => Ok(match e.order() {
                Order::Finite(t) => FamilyProfile::ConstantFinite(t),
                Order::Infinite => FamilyProfile::ConstantInfinite,
            }),
            // a nonconstant continuous family into ℂ* passes through
            // infinite-order points, so no sample inspection is needed
            // beyond consistency
            PicZeroFamily::Nonconstant { samples } => {
                if !samples.is_empty() && samples.iter().all(|s| s == &samples[0]) {
                    return Err(Pic0Error::DegenerateFamily);
                }
                Ok(FamilyProfile::Nonconstant)
            }
        }
    }
}

/// Order of a `τ`-torsion element raised to `j`: `τ / gcd(τ, j)`.
pub fn power_order(tau: &BigInt, j: i64) -> BigInt {
    tau / tau.gcd(&BigInt::from(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn el(m: Rational, a: Rational) -> PicZeroElement {
        PicZeroElement::new(m, a).unwrap()
    }

    #[test]
    fn orders() {
        assert_eq!(el(q(1, 1), q(1, 6)).order(), Order::Finite(6.into()));
        assert_eq!(el(q(2, 1), q(0, 1)).order(), Order::Infinite);
        assert_eq!(PicZeroElement::identity().order(), Order::Finite(1.into()));
    }

    #[test]
    fn powers() {
        let sixth = PicZeroElement::unity(q(1, 6));
        assert!(sixth.power(6).is_identity());
        assert_eq!(el(q(2, 1), q(0, 1)).power(-1), el(q(1, 2), q(0, 1)));
        assert_eq!(sixth.power(4), PicZeroElement::unity(q(2, 3)));
        assert_eq!(sixth.power(0), PicZeroElement::identity());
    }

    #[test]
    fn angle_is_reduced() {
        let e = el(q(3, 2), q(-1, 4));
        assert_eq!(e.angle(), &q(3, 4));
        assert_eq!(PicZeroElement::unity(q(7, 3)).angle(), &q(1, 3));
        assert!(PicZeroElement::new(q(0, 1), q(0, 1)).is_err());
        assert!(PicZeroElement::new(q(-1, 1), q(0, 1)).is_err());
    }

    #[test]
    fn family_profiles() {
        let third = PicZeroFamily::Constant(PicZeroElement::unity(q(1, 3)));
        assert_eq!(third.profile().unwrap(), FamilyProfile::ConstantFinite(3.into()));
        let big = PicZeroFamily::Constant(el(q(3, 2), q(0, 1)));
        assert_eq!(big.profile().unwrap(), FamilyProfile::ConstantInfinite);
        let moving = PicZeroFamily::Nonconstant {
            samples: vec![PicZeroElement::identity(), el(q(2, 1), q(0, 1))],
        };
        assert_eq!(moving.profile().unwrap(), FamilyProfile::Nonconstant);
        assert_eq!(
            PicZeroFamily::nonconstant().profile().unwrap(),
            FamilyProfile::Nonconstant
        );
        let stuck = PicZeroFamily::Nonconstant {
            samples: vec![PicZeroElement::identity(), PicZeroElement::identity()],
        };
        assert_eq!(stuck.profile(), Err(Pic0Error::DegenerateFamily));
    }

    proptest! {
        #[test]
        fn torsion_power_laws(p in 0i64..40, tau in 1i64..40, j in -60i64..60) {
            let e = PicZeroElement::unity(q(p, tau));
            let Order::Finite(t) = e.order() else { panic!("unit modulus has finite order") };
            let t64: i64 = t.clone().try_into().unwrap();
            prop_assert!(e.power(t64).is_identity());
            for smaller in 1..t64 {
                prop_assert!(!e.power(smaller).is_identity());
            }
            prop_assert_eq!(e.power(j).order(), Order::Finite(power_order(&t, j)));
        }

        #[test]
        fn profile_ignores_sample_order(
            raw in proptest::collection::vec((1i64..4, 0i64..5), 2..6),
            seed in any::<u64>(),
        ) {
            let samples: Vec<_> = raw.iter().map(|&(m, a)| el(q(m, 1), q(a, 5))).collect();
            let mut shuffled = samples.clone();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            let a = PicZeroFamily::Nonconstant { samples }.profile();
            let b = PicZeroFamily::Nonconstant { samples: shuffled }.profile();
            prop_assert_eq!(a, b);
        }
    }
}
