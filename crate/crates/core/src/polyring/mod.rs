//! Exact arithmetic: rationals, sparse polynomials in `E, gamma, delta, z`,
//! dense matrices over either, and exact characteristic polynomials.

mod charpoly;
mod matrix;
mod poly;
pub mod rational;

use std::fmt::Debug;

use num_traits::{One, Zero};

pub use charpoly::{charpoly, charpoly_coeffs, charpoly_rational};
pub use matrix::Matrix;
pub use poly::{Exponents, MultiPoly, Substitution, Var};
pub use rational::{parse_rational, Rational};

/// Commutative ring with exact division by small integers.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_int(n: i64) -> Self;
    fn div_int(&self, n: i64) -> Self;
}

impl Ring for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_int(n: i64) -> Self {
        rational::int(n)
    }
    fn div_int(&self, n: i64) -> Self {
        self / rational::int(n)
    }
}

/// `sum c_i E^i` for a univariate polynomial with real coefficients, at complex `x`.
pub fn horner_complex(coeffs: &[f64], x: num_complex::Complex64) -> num_complex::Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(num_complex::Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::rational::int;
    use super::*;
    use proptest::prelude::*;

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec((prop::array::uniform4(0u16..3), (-6i64..6, 1i64..4)), 0..5).prop_map(
            |terms| {
                MultiPoly::from_terms(
                    terms
                        .into_iter()
                        .map(|(e, (n, d))| (e, rational::rat(n, d))),
                )
            },
        )
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-9i64..9, 1i64..5).prop_map(|(n, d)| rational::rat(n, d))
    }

    proptest! {
        #[test]
        fn multiplication_is_commutative_and_associative(
            a in arb_poly(), b in arb_poly(), c in arb_poly()
        ) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn evaluation_is_a_ring_homomorphism(
            a in arb_poly(), b in arb_poly(),
            e in arb_rational(), g in arb_rational(), d in arb_rational(), z in arb_rational()
        ) {
            let at = Substitution::new()
                .with(Var::E, e).with(Var::Gamma, g).with(Var::Delta, d).with(Var::Z, z);
            let ea = a.eval(&at).as_constant().unwrap();
            let eb = b.eval(&at).as_constant().unwrap();
            prop_assert_eq!((&a * &b).eval(&at).as_constant().unwrap(), &ea * &eb);
            prop_assert_eq!((&a + &b).eval(&at).as_constant().unwrap(), &ea + &eb);
        }

        #[test]
        fn division_inverts_multiplication(a in arb_poly(), b in arb_poly(), shift in -3i64..3) {
            // monic quadratic in E with symbolic lower coefficients
            let low = b.eval(&Substitution::new().with(Var::E, int(0)));
            let e = MultiPoly::var(Var::E);
            let den = &(&e.pow(2) + &(&low * &e)) + &MultiPoly::constant(int(shift));
            let prod = &a * &den;
            prop_assert_eq!(prod.div_exact(&den, Var::E).unwrap(), a);
        }
    }
}
