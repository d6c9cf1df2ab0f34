//! Darboux-type change of variables (verified pointwise) and the
//! intermediate-integral / Bäcklund-type constructions.
//!
//! For the Darboux map `x̃ = ψ(λ)` the Jacobian `J = ∂ψ/∂x` vanishes at
//! `λ = 0` because `ψ_0` is constant, so `J = λM` with `M` a power series.
//! The transformed structure constants `c̃^α_{βγ} = c^α_{γε}(J⁻¹)^ε_β` are
//! therefore `λ⁻¹ĉ` with `ĉ = c·M⁻¹`, and both symmetry and associativity
//! of `c̃` are equivalent to those of `ĉ`. Everything is evaluated at
//! rational sample points with `λ` kept formal.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Error;
use crate::homotopy::integrate_hessian;
use crate::matrix::{invert_matrix, RationalMatrix};
use crate::model::{self, residual_oae, DisplacementField, Prepotential, ResidualTensor};
use crate::poly::{Monomial, Param, Polynomial};
use crate::rational::{self, Rational};
use crate::spectral::VectorSpectralSeries;

/// Exact data at one sample point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxPoint {
    pub point: Vec<Rational>,
    /// `M_j` with `J = Σ_j λ^{j+1} M_j`, `J^γ_ρ = ∂ψ^γ/∂x^ρ`.
    pub jacobian: Vec<RationalMatrix>,
    /// Coefficients of `M⁻¹ = Σ_j λ^j R_j`.
    pub inverse: Vec<RationalMatrix>,
    /// `ĉ^α_{βγ} = λc̃^α_{βγ}` as polynomials in λ, indexed `[α][β][γ]`.
    pub scaled_connection: Vec<Vec<Vec<Polynomial>>>,
    /// `ĉ^α_{βγ} − ĉ^α_{γβ}`, indexed `(α,β,γ)`.
    pub symmetry: ResidualTensor,
    /// `ĉ^α_{βγ}ĉ^γ_{ρν} − ĉ^α_{νγ}ĉ^γ_{ρβ}`, indexed `(α,β,ρ,ν)`.
    pub associativity: ResidualTensor,
}

impl DarbouxPoint {
    pub fn is_zero(&self) -> bool {
        self.symmetry.is_zero() && self.associativity.is_zero()
    }
}

/// Outcome of a pointwise Darboux check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxReport {
    /// Residuals are exact mod `λ^{order+1}`.
    pub order: usize,
    pub points: Vec<DarbouxPoint>,
    /// Points where `M(λ=0)` is singular.
    pub skipped: Vec<Vec<Rational>>,
}

impl DarbouxReport {
    pub fn passed(&self) -> bool {
        !self.points.is_empty() && self.points.iter().all(DarbouxPoint::is_zero)
    }

    /// First point with a nonzero residual.
    pub fn witness(&self) -> Option<&DarbouxPoint> {
        self.points.iter().find(|p| !p.is_zero())
    }
}

/// Verify that `x̃ = ψ(λ)` maps `c` to a symmetric associative `c̃` at each
/// point. `ψ` to order `N + 1` gives residuals exact mod `λ^{N+1}`.
pub fn darboux_verify(
    k: &DisplacementField,
    psi: &VectorSpectralSeries,
    points: &[Vec<Rational>],
) -> Result<DarbouxReport, Error> {
    let n = k.dim();
    if psi.dim() != n {
        return Err(Error::ComponentCount {
            expected: n,
            got: psi.dim(),
        });
    }
    if psi.order() == 0 {
        return Err(Error::OrderTooHigh {
            requested: 1,
            available: 0,
        });
    }
    let order = psi.order() - 1;
    let c = model::hessians(k);
    // Jacobians of ψ_{j+1}, j = 0..=order
    let grads: Vec<Vec<Vec<Polynomial>>> = (1..=psi.order())
        .map(|kk| {
            (0..n)
                .map(|g| (0..n).map(|r| psi.coeff(kk, g).diff(r)).collect())
                .collect()
        })
        .collect();
    let mut report = DarbouxReport {
        order,
        points: Vec::new(),
        skipped: Vec::new(),
    };
    for point in points {
        if point.len() != n {
            return Err(Error::ComponentCount {
                expected: n,
                got: point.len(),
            });
        }
        let jacobian: Vec<RationalMatrix> = grads
            .iter()
            .map(|g| RationalMatrix::from_fn(n, |a, b| g[a][b].eval(point)))
            .collect();
        let r0 = match invert_matrix(&jacobian[0]) {
            Ok(r) => r,
            Err(Error::Singular) => {
                report.skipped.push(point.clone());
                continue;
            }
            Err(e) => return Err(e),
        };
        let inverse = series_inverse(&jacobian, &r0, order);
        let cp = c.eval(point);
        let lam = |j: usize| Monomial::param(Param::Lambda, j as u16);
        let scaled: Vec<Vec<Vec<Polynomial>>> = (0..n)
            .map(|al| {
                (0..n)
                    .map(|be| {
                        (0..n)
                            .map(|ga| {
                                let mut p = Polynomial::zero(n);
                                for (j, r) in inverse.iter().enumerate() {
                                    let mut s = rational::zero();
                                    for ep in 0..n {
                                        s += &cp[al][ga][ep] * &r[(ep, be)];
                                    }
                                    p.add_term(lam(j), s);
                                }
                                p
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let symmetry = ResidualTensor::from_fn(&[n, n, n], |i| &scaled[i[0]][i[1]][i[2]] - &scaled[i[0]][i[2]][i[1]]);
        let t = order as u32;
        let associativity = ResidualTensor::from_fn(&[n, n, n, n], |i| {
            let (al, be, rho, nu) = (i[0], i[1], i[2], i[3]);
            let mut acc = Polynomial::zero(n);
            for g in 0..n {
                acc += scaled[al][be][g].mul_trunc(&scaled[g][rho][nu], t);
                acc -= scaled[al][nu][g].mul_trunc(&scaled[g][rho][be], t);
            }
            acc
        });
        report.points.push(DarbouxPoint {
            point: point.clone(),
            jacobian,
            inverse,
            scaled_connection: scaled,
            symmetry,
            associativity,
        });
    }
    if report.points.is_empty() {
        return Err(Error::NoUsablePoints);
    }
    Ok(report)
}

/// `R_0 = M_0⁻¹`, `R_j = −R_0 Σ_{i=1..j} M_i R_{j−i}`.
fn series_inverse(m: &[RationalMatrix], r0: &RationalMatrix, order: usize) -> Vec<RationalMatrix> {
    let n = r0.size();
    let mut out = alloc::vec![r0.clone()];
    for j in 1..=order {
        let mut acc = RationalMatrix::zeros(n);
        for i in 1..=j.min(m.len() - 1) {
            let prod = &m[i] * &out[j - i];
            for a in 0..n {
                for b in 0..n {
                    acc[(a, b)] += &prod[(a, b)];
                }
            }
        }
        let mut next = r0 * &acc;
        for a in 0..n {
            for b in 0..n {
                next[(a, b)] = -next[(a, b)].clone();
            }
        }
        out.push(next);
    }
    out
}

/// `c̃` at a numeric `λ₀` from the truncated `ψ(λ₀)`; only an order-`N`
/// approximation, so residuals are reported, not asserted.
pub fn darboux_at(
    k: &DisplacementField,
    psi: &VectorSpectralSeries,
    lambda0: &Rational,
    point: &[Rational],
) -> Result<Vec<Vec<Vec<Rational>>>, Error> {
    let n = k.dim();
    let series = psi.series(Param::Lambda, false);
    let mut at = Vec::with_capacity(n + 1);
    at.extend_from_slice(point);
    let j = RationalMatrix::from_fn(n, |g, r| {
        let d = series[g].diff(r).eval_x(point);
        let mut s = rational::zero();
        for (m, c) in d.terms() {
            let mut p = rational::one();
            for _ in 0..m.param_exp(Param::Lambda) {
                p *= lambda0;
            }
            s += c * p;
        }
        s
    });
    let inv = invert_matrix(&j)?;
    let cp = model::hessians(k).eval(point);
    Ok((0..n)
        .map(|al| {
            (0..n)
                .map(|be| {
                    (0..n)
                        .map(|ga| {
                            let mut s = rational::zero();
                            for ep in 0..n {
                                s += &cp[al][ga][ep] * &inv[(ep, be)];
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// `G^β_γ` with `∂G^β_γ/∂x^α = K^β_{,αρ}K^ρ_{,γ}` and `G(0) = 0`, indexed `[β][γ]`.
pub fn intermediate_integral_first(k: &DisplacementField) -> Result<Vec<Vec<Polynomial>>, Error> {
    model::require_solution(k)?;
    let n = k.dim();
    let s = hessian_gradient(k);
    (0..n)
        .map(|be| {
            (0..n)
                .map(|ga| {
                    let omega: Vec<Polynomial> = (0..n).map(|al| s[be][al][ga].clone()).collect();
                    crate::homotopy::homotopy_integrate_oneform(&omega).map_err(Error::from)
                })
                .collect()
        })
        .collect()
}

/// `G^β` with `∂²G^β/∂x^α∂x^γ = K^ν_{,αγ}K^β_{,ν}`, `G(0) = 0`, `∇G(0) = 0`.
pub fn intermediate_integral_second(k: &DisplacementField) -> Result<Vec<Polynomial>, Error> {
    model::require_solution(k)?;
    let n = k.dim();
    let c = model::hessians(k);
    let jac = k.jacobian();
    (0..n)
        .map(|be| {
            let hess: Vec<Vec<Polynomial>> = (0..n)
                .map(|al| {
                    (0..n)
                        .map(|ga| {
                            let mut acc = Polynomial::zero(n);
                            for nu in 0..n {
                                acc += c.get(nu, al, ga) * &jac[be][nu];
                            }
                            acc
                        })
                        .collect()
                })
                .collect();
            integrate_hessian(&hess).map_err(Error::from)
        })
        .collect()
}

/// `S^β_{αγ} = K^β_{,αρ}K^ρ_{,γ}`, indexed `[β][α][γ]`.
pub fn hessian_gradient(k: &DisplacementField) -> Vec<Vec<Vec<Polynomial>>> {
    let n = k.dim();
    let c = model::hessians(k);
    let jac = k.jacobian();
    (0..n)
        .map(|be| {
            (0..n)
                .map(|al| {
                    (0..n)
                        .map(|ga| {
                            let mut acc = Polynomial::zero(n);
                            for rho in 0..n {
                                acc += c.get(be, al, rho) * &jac[rho][ga];
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Name of the symmetry precondition of [`backlund_oae`].
pub const SYMMETRY_CONDITION: &str = "K^b_{,ar}K^r_{,c} symmetric in (a,c)";
/// Name of the symmetry precondition of [`wdvv_to_oae`].
pub const WDVV_SYMMETRY_CONDITION: &str = "eta^{rk}F_{,arn}F_{,ck} symmetric in (a,c)";

/// Image of a Bäcklund-type map together with its own residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacklundImage {
    pub h: DisplacementField,
    pub residual: ResidualTensor,
}

impl BacklundImage {
    pub fn is_solution(&self) -> bool {
        self.residual.is_zero()
    }
}

fn first_asymmetry(s: &[Vec<Vec<Polynomial>>], condition: &'static str) -> Result<(), Error> {
    let n = s.len();
    for (b, sb) in s.iter().enumerate() {
        for a in 0..n {
            for c in (a + 1)..n {
                let value = &sb[a][c] - &sb[c][a];
                if !value.is_zero() {
                    return Err(Error::ConditionFailed {
                        condition,
                        index: alloc::vec![b, a, c],
                        value,
                    });
                }
            }
        }
    }
    Ok(())
}

/// `H^β` from `∂²H^β/∂x^α∂x^γ = s[β][α][γ]`. Rows are integrated over `α`
/// first, so a failing symmetry shows up as non-closedness of the gradient.
pub fn integrate_prescribed(chart_dim: usize, s: &[Vec<Vec<Polynomial>>]) -> Result<Vec<Polynomial>, Error> {
    (0..chart_dim)
        .map(|be| {
            let hess: Vec<Vec<Polynomial>> = (0..chart_dim)
                .map(|ga| (0..chart_dim).map(|al| s[be][al][ga].clone()).collect())
                .collect();
            integrate_hessian(&hess).map_err(Error::from)
        })
        .collect()
}

/// Conditional Bäcklund map `K ↦ H` with `∂²H^β/∂x^α∂x^γ = K^β_{,αρ}K^ρ_{,γ}`.
pub fn backlund_oae(k: &DisplacementField) -> Result<BacklundImage, Error> {
    model::require_solution(k)?;
    let s = hessian_gradient(k);
    first_asymmetry(&s, SYMMETRY_CONDITION)?;
    let h = DisplacementField::new(k.chart(), integrate_prescribed(k.dim(), &s)?)?;
    let residual = residual_oae(&h);
    Ok(BacklundImage { h, residual })
}

/// `T_{ναγ} = η^{ρκ}F_{,αρν}F_{,γκ}`, indexed `[ν][α][γ]`.
pub fn wdvv_hessian_gradient(f: &Prepotential) -> Vec<Vec<Vec<Polynomial>>> {
    let n = f.metric().dim();
    let f3 = f.third_derivatives();
    let eta = f.metric().upper();
    let grad: Vec<Vec<Polynomial>> = (0..n)
        .map(|a| (0..n).map(|b| f.potential().diff(a).diff(b)).collect())
        .collect();
    (0..n)
        .map(|nu| {
            (0..n)
                .map(|al| {
                    (0..n)
                        .map(|ga| {
                            let mut acc = Polynomial::zero(n);
                            for rho in 0..n {
                                for ka in 0..n {
                                    let e = &eta[(rho, ka)];
                                    if num_traits::Zero::is_zero(e) {
                                        continue;
                                    }
                                    acc += (&f3[al][rho][nu] * &grad[ga][ka]).scale(e);
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// `F ↦ H` with `∂²H^β/∂x^α∂x^γ = η^{βν}η^{ρκ}F_{,αρν}F_{,γκ}`.
pub fn wdvv_to_oae(f: &Prepotential) -> Result<BacklundImage, Error> {
    model::require_wdvv_solution(f)?;
    let t = wdvv_hessian_gradient(f);
    first_asymmetry(&t, WDVV_SYMMETRY_CONDITION)?;
    let n = f.metric().dim();
    let eta = f.metric().upper();
    let s: Vec<Vec<Vec<Polynomial>>> = (0..n)
        .map(|be| {
            (0..n)
                .map(|al| {
                    (0..n)
                        .map(|ga| {
                            let mut acc = Polynomial::zero(n);
                            for nu in 0..n {
                                acc += t[nu][al][ga].scale(&eta[(be, nu)]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let h = DisplacementField::new(f.chart(), integrate_prescribed(n, &s)?)?;
    let residual = residual_oae(&h);
    Ok(BacklundImage { h, residual })
}

/// All potentials attached to one solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialPair {
    pub first_kind: Vec<Vec<Polynomial>>,
    pub second_kind: Vec<Polynomial>,
    /// `Err` carries the failed precondition.
    pub backlund: Result<BacklundImage, Error>,
}

impl PotentialPair {
    pub fn new(k: &DisplacementField) -> Result<Self, Error> {
        Ok(PotentialPair {
            first_kind: intermediate_integral_first(k)?,
            second_kind: intermediate_integral_second(k)?,
            backlund: backlund_oae(k),
        })
    }
}

/// Human-readable name of a condition failure, for reports.
pub fn describe(e: &Error) -> String {
    alloc::format!("{e}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Metric;
    use crate::parse::parse_polynomial;
    use crate::poly::Chart;
    use crate::rational::int;
    use crate::spectral::{assemble_psi, PotentialTower, Seeds};

    fn field(n: usize, comps: &[&str]) -> DisplacementField {
        let chart = Chart::new(n).unwrap();
        DisplacementField::new(
            chart,
            comps.iter().map(|s| parse_polynomial(s, chart).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn linear_field_has_trivial_potentials() {
        let k = field(2, &["x1 + 2*x2", "3*x1"]);
        let p = PotentialPair::new(&k).unwrap();
        assert!(p.first_kind.iter().flatten().all(Polynomial::is_zero));
        assert!(p.second_kind.iter().all(Polynomial::is_zero));
        let img = p.backlund.unwrap();
        assert!(img.h.components().iter().all(Polynomial::is_zero));
        assert!(img.is_solution());
    }

    #[test]
    fn first_kind_matches_second_tower_level() {
        let k = field(2, &["x1^2/2", "x1*x2"]);
        let t = PotentialTower::build(&k, 2).unwrap();
        let g = intermediate_integral_first(&k).unwrap();
        for b in 0..2 {
            for c in 0..2 {
                assert_eq!(g[b][c], t.w.get(2, b, c));
            }
        }
        assert_eq!(intermediate_integral_second(&k).unwrap(), t.v.level(2).to_vec());
    }

    #[test]
    fn algebra_backlund_image_solves() {
        let k = field(2, &["x1^2/2", "x1*x2"]);
        let img = backlund_oae(&k).unwrap();
        assert!(img.is_solution());
        assert_eq!(img.h.component(0).to_string(), "x1^3/6");
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        let k = field(2, &["x1^2/2 + x2", "x1*x2"]);
        match backlund_oae(&k) {
            Err(Error::ConditionFailed { condition, index, .. }) => {
                assert_eq!(condition, SYMMETRY_CONDITION);
                assert_eq!(index.len(), 3);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn darboux_on_algebra() {
        let k = field(2, &["x1^2/2", "x1*x2"]);
        let t = PotentialTower::build(&k, 5).unwrap();
        let psi = assemble_psi(&t.w, &Seeds::unit(2, 5, 0, 0).h);
        let pts = alloc::vec![alloc::vec![int(1), int(2)], alloc::vec![int(-3), int(1)]];
        let r = darboux_verify(&k, &psi, &pts).unwrap();
        assert_eq!(r.order, 4);
        assert!(r.passed());
    }

    #[test]
    fn darboux_linear_has_no_usable_points() {
        let k = field(2, &["x1 + x2", "x2"]);
        let t = PotentialTower::build(&k, 3).unwrap();
        let psi = assemble_psi(&t.w, &Seeds::unit(2, 3, 0, 0).h);
        let pts = alloc::vec![alloc::vec![int(1), int(2)]];
        assert_eq!(darboux_verify(&k, &psi, &pts), Err(Error::NoUsablePoints));
    }

    #[test]
    fn wdvv_map_on_quadratic_potential() {
        let chart = Chart::new(2).unwrap();
        let f = parse_polynomial("x1^2/2 + 3*x1*x2", chart).unwrap();
        let pre = Prepotential::new(chart, f, Metric::identity(2)).unwrap();
        let img = wdvv_to_oae(&pre).unwrap();
        assert!(img.h.components().iter().all(Polynomial::is_zero));
    }
}
