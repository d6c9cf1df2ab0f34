//! Poincaré homotopy integration with basepoint `x = 0`.
//!
//! For a closed polynomial one-form `ω = ω_a dx^a` the potential
//! `P(x) = ∫₀¹ ω_a(tx) x^a dt` is evaluated monomial by monomial: a term
//! `c·x^m` of `ω_a` contributes `c/(|m|+1)·x^m·x^a`. Formal parameters are
//! treated as constants and do not count towards `|m|`.

use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::NotClosed;
use crate::poly::Polynomial;
use crate::rational::Rational;

/// Check `∂ω_a/∂x^b = ∂ω_b/∂x^a` for all pairs, reporting the first failure.
pub fn check_closed(omega: &[Polynomial]) -> Result<(), NotClosed> {
    for a in 0..omega.len() {
        for b in (a + 1)..omega.len() {
            let difference = &omega[a].diff(b) - &omega[b].diff(a);
            if !difference.is_zero() {
                return Err(NotClosed {
                    first: a,
                    second: b,
                    difference,
                });
            }
        }
    }
    Ok(())
}

/// Potential `P` with `∂P/∂x^a = ω_a` and `P(0) = 0`.
///
/// The one-form must have exactly one component per chart coordinate.
pub fn homotopy_integrate_oneform(omega: &[Polynomial]) -> Result<Polynomial, NotClosed> {
    let dim = omega.first().map(Polynomial::dim).unwrap_or(1);
    assert_eq!(omega.len(), dim, "one-form needs one component per coordinate");
    check_closed(omega)?;
    let mut out = Polynomial::zero(dim);
    for (a, w) in omega.iter().enumerate() {
        let xa = Polynomial::var(dim, a);
        for (m, c) in w.terms() {
            let weight = Rational::new(BigInt::from(1), BigInt::from(m.x_degree() + 1));
            let term = Polynomial::monomial(dim, *m, c * weight);
            out += &term * &xa;
        }
    }
    Ok(out)
}

/// Potential `P` with prescribed Hessian `∂²P/∂x^a∂x^b = hess[a][b]`,
/// normalized by `P(0) = 0` and `∇P(0) = 0`.
///
/// Row `a` is integrated first (giving `∂P/∂x^a`), then the resulting
/// gradient. Either stage may fail with [`NotClosed`].
pub fn integrate_hessian(hess: &[Vec<Polynomial>]) -> Result<Polynomial, NotClosed> {
    let gradient = hess
        .iter()
        .map(|row| homotopy_integrate_oneform(row))
        .collect::<Result<Vec<_>, _>>()?;
    homotopy_integrate_oneform(&gradient)
}

/// Gradient of a polynomial as a one-form.
pub fn gradient(p: &Polynomial) -> Vec<Polynomial> {
    (0..p.dim()).map(|a| p.diff(a)).collect()
}
