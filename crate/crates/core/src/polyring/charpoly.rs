//! Exact characteristic polynomials by the Faddeev–LeVerrier recursion.
//!
//! With `c_N = 1` and `M_0 = 0`:
//!
//! ```text
//! M_k     = A M_{k-1} + c_{N-k+1} I
//! c_{N-k} = -tr(A M_k) / k
//! ```
//!
//! The only divisions are by the integers `1..=N`, which are exact over the
//! rationals, so the recursion runs unchanged over `MultiPoly` entries.

use super::{Matrix, MultiPoly, Ring, Var};
use crate::error::{Error, Result};

/// Coefficients `c_0, ..., c_N` of `det(E I - A)`, lowest degree first.
pub fn charpoly_coeffs<T: Ring>(a: &Matrix<T>) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::domain(format!(
            "characteristic polynomial of a non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.n();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    // A * M_{k-1}; M_0 = 0
    let mut am = Matrix::<T>::zeros(n, n);
    for k in 1..=n {
        let mut m = am;
        for i in 0..n {
            m[(i, i)] = m[(i, i)].plus(&coeffs[n - k + 1]);
        }
        am = a.matmul(&m)?;
        coeffs[n - k] = am.trace().negated().div_int(k as i64);
    }
    Ok(coeffs)
}

/// `det(E I - A)` as a polynomial in `E` (and whatever variables `A` carries).
pub fn charpoly(a: &Matrix<MultiPoly>) -> Result<MultiPoly> {
    let coeffs = charpoly_coeffs(a)?;
    Ok(MultiPoly::from_coeffs_in(Var::E, &coeffs))
}

pub fn charpoly_rational(a: &Matrix<super::Rational>) -> Result<MultiPoly> {
    let coeffs = charpoly_coeffs(a)?;
    let coeffs: Vec<MultiPoly> = coeffs.into_iter().map(MultiPoly::constant).collect();
    Ok(MultiPoly::from_coeffs_in(Var::E, &coeffs))
}
