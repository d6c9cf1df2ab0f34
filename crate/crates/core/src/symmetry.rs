//! Linearized associativity equations and the nonlocal symmetry families
//! built from the spectral series and the potential towers.

use alloc::vec::Vec;

use crate::error::Error;
use crate::model::{self, DisplacementField, Metric, Prepotential, ResidualTensor};
use crate::poly::{Param, Polynomial};
use crate::rational;
use crate::spectral::{PotentialTower, ScalarSpectralSeries, VectorSpectralSeries};

/// Which family a generator belongs to, with its indices (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymmetryKind {
    /// `ψ^α(λ)`
    Tau,
    /// `ψ^α(λ)χ(−λ)`
    Sigma,
    /// `ψ^α(λ)χ(−λ) + ψ^α(−λ)χ(λ)`
    Zeta,
    /// `(w_k)^α_β`
    X { k: usize, beta: usize },
    /// `Σ_j (−1)^j v_j^β (w_{k−j})^α_γ`
    Y { k: usize, beta: usize, gamma: usize },
    /// `ρ_k^α = Σ_j (−1)^j χ_j ψ_{k−j}^α`
    Rho { k: usize },
    /// Scalar `χ(λ)` acting on `F`.
    WdvvChi,
    /// Scalar `χ(λ)χ(−λ)` acting on `F`.
    WdvvChiChi,
    /// Scalar `v_k^β`.
    XTilde { k: usize, beta: usize },
    /// Scalar `Σ_j (−1)^j v_j^α v_{k−j}^β`.
    ZTilde { k: usize, alpha: usize, beta: usize },
}

impl SymmetryKind {
    pub fn is_scalar(&self) -> bool {
        matches!(
            self,
            SymmetryKind::WdvvChi
                | SymmetryKind::WdvvChiChi
                | SymmetryKind::XTilde { .. }
                | SymmetryKind::ZTilde { .. }
        )
    }
}

/// Components `G^α` (or a single `g` for the scalar WDVV families), possibly
/// truncated power series in λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryGenerator {
    pub kind: SymmetryKind,
    pub components: Vec<Polynomial>,
    /// λ-truncation order, `None` for λ-free generators.
    pub order: Option<usize>,
}

impl SymmetryGenerator {
    pub fn vector(kind: SymmetryKind, components: Vec<Polynomial>, order: Option<usize>) -> Self {
        debug_assert!(!kind.is_scalar());
        SymmetryGenerator {
            kind,
            components,
            order,
        }
    }

    pub fn scalar(kind: SymmetryKind, g: Polynomial, order: Option<usize>) -> Self {
        debug_assert!(kind.is_scalar());
        SymmetryGenerator {
            kind,
            components: alloc::vec![g],
            order,
        }
    }

    /// `a·self + b·other`, keeping the kind of `self`.
    pub fn combine(&self, a: &rational::Rational, other: &SymmetryGenerator, b: &rational::Rational) -> Self {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(x, y)| &x.scale(a) + &y.scale(b))
            .collect();
        SymmetryGenerator {
            kind: self.kind,
            components,
            order: match (self.order, other.order) {
                (Some(p), Some(q)) => Some(p.min(q)),
                (p, q) => p.or(q),
            },
        }
    }
}

fn second_derivatives(p: &Polynomial) -> Vec<Vec<Polynomial>> {
    let n = p.dim();
    (0..n)
        .map(|a| {
            let pa = p.diff(a);
            (0..n).map(|b| pa.diff(b)).collect()
        })
        .collect()
}

/// Linearization of the oriented equations at `K` in direction `G`:
/// `G^ν_{,αρ}K^ρ_{,βγ} + K^ν_{,αρ}G^ρ_{,βγ} − G^ρ_{,αβ}K^ν_{,ργ} − K^ρ_{,αβ}G^ν_{,ργ}`,
/// indexed `(ν,α,β,γ)`.
pub fn linearized_residual(k: &DisplacementField, g: &SymmetryGenerator) -> Result<ResidualTensor, Error> {
    model::require_solution(k)?;
    linearized_unchecked(k, g)
}

pub(crate) fn linearized_unchecked(k: &DisplacementField, g: &SymmetryGenerator) -> Result<ResidualTensor, Error> {
    let n = k.dim();
    if g.kind.is_scalar() || g.components.len() != n {
        return Err(Error::ComponentCount {
            expected: n,
            got: g.components.len(),
        });
    }
    let kh: Vec<Vec<Vec<Polynomial>>> = k.components().iter().map(second_derivatives).collect();
    let gh: Vec<Vec<Vec<Polynomial>>> = g.components.iter().map(second_derivatives).collect();
    Ok(ResidualTensor::from_fn(&[n, n, n, n], |i| {
        let (nu, a, b, c) = (i[0], i[1], i[2], i[3]);
        let mut acc = Polynomial::zero(n);
        for r in 0..n {
            acc += &gh[nu][a][r] * &kh[r][b][c];
            acc += &kh[nu][a][r] * &gh[r][b][c];
            acc -= &gh[r][a][b] * &kh[nu][r][c];
            acc -= &kh[r][a][b] * &gh[nu][r][c];
        }
        acc
    }))
}

/// `G^α = ψ^α(λ)`.
pub fn make_tau_symmetry(psi: &VectorSpectralSeries) -> SymmetryGenerator {
    SymmetryGenerator::vector(SymmetryKind::Tau, psi.series(Param::Lambda, false), Some(psi.order()))
}

/// `ρ_k^α = Σ_{j≤k} (−1)^j χ_j ψ_{k−j}^α`, the λ-coefficients of `ψ(λ)χ(−λ)`.
pub fn rho_coefficients(psi: &VectorSpectralSeries, chi: &ScalarSpectralSeries) -> Result<Vec<Vec<Polynomial>>, Error> {
    if psi.order() != chi.order() {
        return Err(Error::OrderMismatch {
            left: psi.order(),
            right: chi.order(),
        });
    }
    let n = psi.dim();
    Ok((0..=psi.order())
        .map(|k| {
            (0..n)
                .map(|a| {
                    let mut acc = Polynomial::zero(chi.coeff(0).dim());
                    for j in 0..=k {
                        let term = chi.coeff(j) * psi.coeff(k - j, a);
                        if j % 2 == 0 {
                            acc += term;
                        } else {
                            acc -= term;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect())
}

/// `G^α = ψ^α(λ)χ(−λ)` truncated at `λ^order`, assembled from the ρ-coefficients.
pub fn make_sigma_symmetry(psi: &VectorSpectralSeries, chi: &ScalarSpectralSeries) -> Result<SymmetryGenerator, Error> {
    let rho = rho_coefficients(psi, chi)?;
    let components = VectorSpectralSeries::from_coefficients(rho).series(Param::Lambda, false);
    Ok(SymmetryGenerator::vector(
        SymmetryKind::Sigma,
        components,
        Some(psi.order()),
    ))
}

/// `G^α = ρ_k^α` for a single order.
pub fn make_rho_symmetry(
    psi: &VectorSpectralSeries,
    chi: &ScalarSpectralSeries,
    k: usize,
) -> Result<SymmetryGenerator, Error> {
    let rho = rho_coefficients(psi, chi)?;
    let comps = rho.get(k).cloned().ok_or(Error::OrderTooHigh {
        requested: k,
        available: psi.order(),
    })?;
    Ok(SymmetryGenerator::vector(SymmetryKind::Rho { k }, comps, None))
}

/// `G^α = ψ^α(λ)χ(−λ) + ψ^α(−λ)χ(λ)`.
pub fn make_zeta_symmetry(psi: &VectorSpectralSeries, chi: &ScalarSpectralSeries) -> Result<SymmetryGenerator, Error> {
    if psi.order() != chi.order() {
        return Err(Error::OrderMismatch {
            left: psi.order(),
            right: chi.order(),
        });
    }
    let order = psi.order() as u32;
    let p_plus = psi.series(Param::Lambda, false);
    let p_minus = psi.series(Param::Lambda, true);
    let c_plus = chi.series(Param::Lambda, false);
    let c_minus = chi.series(Param::Lambda, true);
    let components = p_plus
        .iter()
        .zip(&p_minus)
        .map(|(pp, pm)| &pp.mul_trunc(&c_minus, order) + &pm.mul_trunc(&c_plus, order))
        .collect();
    Ok(SymmetryGenerator::vector(
        SymmetryKind::Zeta,
        components,
        Some(psi.order()),
    ))
}

/// `X_{k,β}` for every `β`, then `Y^β_{k,γ}` for every `(β,γ)`.
pub fn coefficient_symmetries(tower: &PotentialTower, k: usize) -> Result<Vec<SymmetryGenerator>, Error> {
    if k > tower.order() {
        return Err(Error::OrderTooHigh {
            requested: k,
            available: tower.order(),
        });
    }
    let n = tower.dim();
    let mut out = Vec::with_capacity(n + n * n);
    for beta in 0..n {
        out.push(SymmetryGenerator::vector(
            SymmetryKind::X { k, beta },
            tower.w.column(k, beta),
            None,
        ));
    }
    for beta in 0..n {
        for gamma in 0..n {
            let comps = (0..n)
                .map(|a| {
                    let mut acc = Polynomial::zero(n);
                    for j in 0..=k {
                        let term = tower.v.get(j, beta) * &tower.w.get((k - j) as isize, a, gamma);
                        if j % 2 == 0 {
                            acc += term;
                        } else {
                            acc -= term;
                        }
                    }
                    acc
                })
                .collect();
            out.push(SymmetryGenerator::vector(
                SymmetryKind::Y { k, beta, gamma },
                comps,
                None,
            ));
        }
    }
    Ok(out)
}

/// Linearization of WDVV at `F` in the scalar direction `g`, indexed `(α,β,ν,ρ)`.
pub fn wdvv_linearized_residual(f: &Prepotential, g: &SymmetryGenerator) -> Result<ResidualTensor, Error> {
    model::require_wdvv_solution(f)?;
    if !g.kind.is_scalar() || g.components.len() != 1 {
        return Err(Error::ComponentCount {
            expected: 1,
            got: g.components.len(),
        });
    }
    let f3 = f.third_derivatives();
    let g3 = model::third_derivatives(&g.components[0]);
    let eta = f.metric().upper();
    let left = model::wdvv_bilinear(&g3, &f3, eta);
    let right = model::wdvv_bilinear(&f3, &g3, eta);
    let entries = left.entries().iter().zip(right.entries()).map(|(x, y)| x + y).collect();
    Ok(ResidualTensor::from_entries(left.shape().to_vec(), entries))
}

/// Scalar `g = χ(λ)`.
pub fn make_wdvv_chi(chi: &ScalarSpectralSeries) -> SymmetryGenerator {
    SymmetryGenerator::scalar(
        SymmetryKind::WdvvChi,
        chi.series(Param::Lambda, false),
        Some(chi.order()),
    )
}

/// Scalar `g = χ(λ)χ(−λ)` truncated at `λ^order`.
pub fn make_wdvv_chichi(chi: &ScalarSpectralSeries) -> SymmetryGenerator {
    let g = chi
        .series(Param::Lambda, false)
        .mul_trunc(&chi.series(Param::Lambda, true), chi.order() as u32);
    SymmetryGenerator::scalar(SymmetryKind::WdvvChiChi, g, Some(chi.order()))
}

/// `X̃^β_k` for every `β`, then `Z̃^{αβ}_k` for every `(α,β)`.
pub fn wdvv_coefficient_symmetries(tower: &PotentialTower, k: usize) -> Result<Vec<SymmetryGenerator>, Error> {
    if k > tower.order() {
        return Err(Error::OrderTooHigh {
            requested: k,
            available: tower.order(),
        });
    }
    let n = tower.dim();
    let mut out = Vec::with_capacity(n + n * n);
    for beta in 0..n {
        out.push(SymmetryGenerator::scalar(
            SymmetryKind::XTilde { k, beta },
            tower.v.get(k, beta).clone(),
            None,
        ));
    }
    for alpha in 0..n {
        for beta in 0..n {
            let mut acc = Polynomial::zero(n);
            for j in 0..=k {
                let term = tower.v.get(j, alpha) * tower.v.get(k - j, beta);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            out.push(SymmetryGenerator::scalar(
                SymmetryKind::ZTilde { k, alpha, beta },
                acc,
                None,
            ));
        }
    }
    Ok(out)
}

/// Vector generator `G^α = η^{αβ}∂g/∂x^β` induced by a scalar one.
pub fn raise_scalar(metric: &Metric, g: &SymmetryGenerator) -> SymmetryGenerator {
    let p = &g.components[0];
    let n = p.dim();
    let grad: Vec<Polynomial> = (0..n).map(|b| p.diff(b)).collect();
    let eta = metric.upper();
    let comps = (0..n)
        .map(|a| {
            let mut acc = Polynomial::zero(n);
            for (b, gb) in grad.iter().enumerate() {
                acc += gb.scale(&eta[(a, b)]);
            }
            acc
        })
        .collect();
    let kind = match g.kind {
        SymmetryKind::WdvvChi => SymmetryKind::Tau,
        SymmetryKind::WdvvChiChi => SymmetryKind::Zeta,
        SymmetryKind::XTilde { k, beta } => SymmetryKind::X { k, beta },
        other => other,
    };
    SymmetryGenerator {
        kind: if kind.is_scalar() { SymmetryKind::Tau } else { kind },
        components: comps,
        order: g.order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::poly::Chart;
    use crate::rational::{int, rat};
    use crate::spectral::{assemble_chi, assemble_psi, Seeds};

    fn algebra_n2() -> DisplacementField {
        let chart = Chart::new(2).unwrap();
        DisplacementField::new(
            chart,
            ["x1^2/2", "x1*x2"]
                .iter()
                .map(|s| parse_polynomial(s, chart).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn translations_are_symmetries() {
        let k = algebra_n2();
        let g = SymmetryGenerator::vector(
            SymmetryKind::X { k: 0, beta: 0 },
            alloc::vec![Polynomial::constant(2, int(3)), Polynomial::constant(2, rat(-1, 2))],
            None,
        );
        assert!(linearized_residual(&k, &g).unwrap().is_zero());
    }

    #[test]
    fn solution_itself_is_a_symmetry() {
        let k = algebra_n2();
        let g = SymmetryGenerator::vector(SymmetryKind::X { k: 1, beta: 0 }, k.components().to_vec(), None);
        assert!(linearized_residual(&k, &g).unwrap().is_zero());
    }

    #[test]
    fn random_direction_is_not() {
        let k = algebra_n2();
        let chart = k.chart();
        let g = SymmetryGenerator::vector(
            SymmetryKind::Tau,
            alloc::vec![
                parse_polynomial("x2^3", chart).unwrap(),
                parse_polynomial("x1*x2^2", chart).unwrap()
            ],
            None,
        );
        assert!(!linearized_residual(&k, &g).unwrap().is_zero());
    }

    #[test]
    fn sigma_with_unit_chi_is_tau() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 3).unwrap();
        let mut s = Seeds::unit(2, 3, 1, 0);
        s.d[0] = alloc::vec![int(0), int(0)];
        s.b[0] = int(1);
        let psi = assemble_psi(&t.w, &s.h);
        let chi = assemble_chi(&t.v, &s.b, &s.d);
        let sigma = make_sigma_symmetry(&psi, &chi).unwrap();
        assert_eq!(sigma.components, make_tau_symmetry(&psi).components);
    }

    #[test]
    fn order_mismatch() {
        let k = algebra_n2();
        let t3 = PotentialTower::build(&k, 3).unwrap();
        let t2 = PotentialTower::build(&k, 2).unwrap();
        let s = Seeds::unit(2, 3, 0, 0);
        let psi = assemble_psi(&t3.w, &s.h);
        let chi = assemble_chi(&t2.v, &s.b, &s.d);
        assert_eq!(
            make_sigma_symmetry(&psi, &chi),
            Err(Error::OrderMismatch { left: 3, right: 2 })
        );
    }

    #[test]
    fn sigma_coefficients_match_series_product() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 4).unwrap();
        let mut s = Seeds::unit(2, 4, 0, 1);
        s.h[1] = alloc::vec![int(2), rat(1, 3)];
        s.b[2] = int(-1);
        let psi = assemble_psi(&t.w, &s.h);
        let chi = assemble_chi(&t.v, &s.b, &s.d);
        let sigma = make_sigma_symmetry(&psi, &chi).unwrap();
        let cm = chi.series(Param::Lambda, true);
        for (a, p) in psi.series(Param::Lambda, false).iter().enumerate() {
            assert_eq!(sigma.components[a], p.mul_trunc(&cm, 4));
        }
        assert!(linearized_residual(&k, &sigma).unwrap().is_zero());
        assert!(linearized_residual(&k, &make_zeta_symmetry(&psi, &chi).unwrap())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn low_degree_scalar_is_wdvv_symmetry() {
        let chart = Chart::new(3).unwrap();
        let f = parse_polynomial("x1^3/6 + x2^3/6 + x3^3/6", chart).unwrap();
        let pre = Prepotential::new(chart, f, Metric::identity(3)).unwrap();
        let g = SymmetryGenerator::scalar(
            SymmetryKind::XTilde { k: 0, beta: 0 },
            parse_polynomial("x1*x2 + 7*x3^2 - x1", chart).unwrap(),
            None,
        );
        assert!(wdvv_linearized_residual(&pre, &g).unwrap().is_zero());
    }
}
