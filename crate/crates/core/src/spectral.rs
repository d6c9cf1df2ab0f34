//! Truncated solutions of the vector and scalar spectral problems
//!
//! ```text
//! ∂ψ^α/∂x^β = λ K^α_{,βγ} ψ^γ          χ_{,αγ} = λ K^ν_{,αγ} χ_{,ν}
//! ```
//!
//! built from the nonlocal potential towers `(w_k)^α_β` and `v_k^α`.
//! All integration constants other than the explicit seeds are zero.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::homotopy::{homotopy_integrate_oneform, integrate_hessian};
use crate::model::{self, ConnectionField, DisplacementField, ResidualTensor};
use crate::poly::{assemble_series, Monomial, Param, Polynomial};
use crate::rational::{self, Rational};

/// Default truncation order of every tower and series.
pub const DEFAULT_ORDER: usize = 4;

/// Matrices `(w_k)^α_β`, `k = 0..=order`, with `w_0 = δ` and `w_1 = ∂K/∂x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WTower {
    // [k][α][β]
    levels: Vec<Vec<Vec<Polynomial>>>,
}

impl WTower {
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    /// `(w_k)^α_β`; `k = -1` is the zero matrix.
    pub fn get(&self, k: isize, a: usize, b: usize) -> Polynomial {
        if k < 0 {
            return Polynomial::zero(self.levels[0][0][0].dim());
        }
        self.levels[k as usize][a][b].clone()
    }

    pub fn level(&self, k: usize) -> &[Vec<Polynomial>] {
        &self.levels[k]
    }

    /// Column `β` of `w_k`, i.e. the components of `X_{k,β}`.
    pub fn column(&self, k: usize, b: usize) -> Vec<Polynomial> {
        self.levels[k].iter().map(|row| row[b].clone()).collect()
    }
}

/// Vectors `v_k^α`, `k = 0..=order`, with `v_0 = x` and `v_1 = K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VTower {
    // [k][α]
    levels: Vec<Vec<Polynomial>>,
}

impl VTower {
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn get(&self, k: usize, a: usize) -> &Polynomial {
        &self.levels[k][a]
    }

    pub fn level(&self, k: usize) -> &[Polynomial] {
        &self.levels[k]
    }
}

/// Both towers of the Abelian covering, built to a common order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialTower {
    pub w: WTower,
    pub v: VTower,
}

impl PotentialTower {
    pub fn build(k: &DisplacementField, order: usize) -> Result<Self, Error> {
        model::require_solution(k)?;
        Ok(PotentialTower {
            w: w_levels(k, order)?,
            v: v_levels(k, order)?,
        })
    }

    pub fn order(&self) -> usize {
        self.w.order().min(self.v.order())
    }

    pub fn dim(&self) -> usize {
        self.v.levels[0].len()
    }
}

/// `∂(w_k)^β_γ/∂x^α = K^β_{,αρ}(w_{k−1})^ρ_γ`, `(w_k)(0) = 0` for `k ≥ 2`.
pub fn build_w_tower(k: &DisplacementField, order: usize) -> Result<WTower, Error> {
    model::require_solution(k)?;
    w_levels(k, order)
}

fn w_levels(k: &DisplacementField, order: usize) -> Result<WTower, Error> {
    let n = k.dim();
    let c = model::hessians(k);
    let mut levels = Vec::with_capacity(order + 1);
    levels.push(
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        if a == b {
                            Polynomial::one(n)
                        } else {
                            Polynomial::zero(n)
                        }
                    })
                    .collect()
            })
            .collect(),
    );
    if order >= 1 {
        levels.push(k.jacobian());
    }
    for _ in 2..=order {
        let prev: &Vec<Vec<Polynomial>> = levels.last().expect("w_1 present");
        let mut next = vec![vec![Polynomial::zero(n); n]; n];
        for (be, row) in next.iter_mut().enumerate() {
            for (g, slot) in row.iter_mut().enumerate() {
                let omega: Vec<Polynomial> = (0..n).map(|al| contract(&c, be, al, |r| &prev[r][g])).collect();
                *slot = homotopy_integrate_oneform(&omega)?;
            }
        }
        levels.push(next);
    }
    Ok(WTower { levels })
}

/// `∂²v_k^β/∂x^α∂x^γ = K^ν_{,αγ}∂v_{k−1}^β/∂x^ν`, `v_k(0) = 0`, `∇v_k(0) = 0` for `k ≥ 2`.
pub fn build_v_tower(k: &DisplacementField, order: usize) -> Result<VTower, Error> {
    model::require_solution(k)?;
    v_levels(k, order)
}

fn v_levels(k: &DisplacementField, order: usize) -> Result<VTower, Error> {
    let n = k.dim();
    let c = model::hessians(k);
    let mut levels = Vec::with_capacity(order + 1);
    levels.push((0..n).map(|a| Polynomial::var(n, a)).collect::<Vec<_>>());
    if order >= 1 {
        levels.push(k.components().to_vec());
    }
    for _ in 2..=order {
        let prev: &Vec<Polynomial> = levels.last().expect("v_1 present");
        let mut next = Vec::with_capacity(n);
        for p in prev {
            let grad: Vec<Polynomial> = (0..n).map(|nu| p.diff(nu)).collect();
            let hess: Vec<Vec<Polynomial>> = (0..n)
                .map(|al| (0..n).map(|g| raise(&c, al, g, &grad)).collect())
                .collect();
            next.push(integrate_hessian(&hess)?);
        }
        levels.push(next);
    }
    Ok(VTower { levels })
}

/// `Σ_ρ c^β_{αρ} f(ρ)`
fn contract<'a>(c: &ConnectionField, be: usize, al: usize, f: impl Fn(usize) -> &'a Polynomial) -> Polynomial {
    let n = c.chart().dim();
    let mut acc = Polynomial::zero(n);
    for r in 0..n {
        let cr = c.get(be, al, r);
        if !cr.is_zero() {
            acc += cr * f(r);
        }
    }
    acc
}

/// `Σ_ν c^ν_{αγ} g_ν`
fn raise(c: &ConnectionField, al: usize, g: usize, grad: &[Polynomial]) -> Polynomial {
    let n = c.chart().dim();
    let mut acc = Polynomial::zero(n);
    for (nu, gn) in grad.iter().enumerate() {
        let cn = c.get(nu, al, g);
        if !cn.is_zero() {
            acc += cn * gn;
        }
    }
    acc
}

/// Free constants of the series solutions: `h_j^γ` for ψ, `b_k` and `d_{j,γ}` for χ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Seeds {
    pub h: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub d: Vec<Vec<Rational>>,
}

impl Seeds {
    pub fn zero(n: usize, order: usize) -> Self {
        Seeds {
            h: vec![vec![rational::zero(); n]; order + 1],
            b: vec![rational::zero(); order + 1],
            d: vec![vec![rational::zero(); n]; order + 1],
        }
    }

    /// `h_0 = e_β` and `d_0 = e_α`, all other seeds zero: ψ is the `β`-th
    /// column of `w`, χ the normalized flat coordinate `χ^α`.
    pub fn unit(n: usize, order: usize, beta: usize, alpha: usize) -> Self {
        let mut s = Self::zero(n, order);
        s.h[0][beta] = rational::one();
        s.d[0][alpha] = rational::one();
        s
    }

    /// `h_j^τ = η^{τγ}d_{j,γ}`, the vector seeds matching the scalar ones
    /// under the gradient reduction.
    pub fn with_h_from_d(mut self, eta: &crate::matrix::RationalMatrix) -> Self {
        let n = eta.size();
        self.h = self
            .d
            .iter()
            .map(|dj| {
                (0..n)
                    .map(|t| (0..n).fold(rational::zero(), |acc, g| acc + &eta[(t, g)] * &dj[g]))
                    .collect()
            })
            .collect();
        self
    }
}

/// `ψ^α(λ) = Σ_k ψ_k^α λ^k` truncated at `λ^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorSpectralSeries {
    order: usize,
    // [k][α]
    coeffs: Vec<Vec<Polynomial>>,
    seeds: Vec<Vec<Rational>>,
}

impl VectorSpectralSeries {
    pub fn from_coefficients(coeffs: Vec<Vec<Polynomial>>) -> Self {
        let n = coeffs.first().map(Vec::len).unwrap_or(0);
        VectorSpectralSeries {
            order: coeffs.len() - 1,
            seeds: vec![vec![rational::zero(); n]; coeffs.len()],
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    /// `ψ_k^α`
    pub fn coeff(&self, k: usize, a: usize) -> &Polynomial {
        &self.coeffs[k][a]
    }

    pub fn coefficients(&self) -> &[Vec<Polynomial>] {
        &self.coeffs
    }

    pub fn seeds(&self) -> &[Vec<Rational>] {
        &self.seeds
    }

    /// Components as polynomials in `p` (or `-p` when `negate`).
    pub fn series(&self, p: Param, negate: bool) -> Vec<Polynomial> {
        (0..self.dim())
            .map(|a| {
                let cs: Vec<Polynomial> = self.coeffs.iter().map(|c| c[a].clone()).collect();
                assemble_series(&cs, p, negate)
            })
            .collect()
    }

    pub fn with_coeff(mut self, k: usize, a: usize, value: Polynomial) -> Self {
        self.coeffs[k][a] = value;
        self
    }
}

/// `χ(λ) = Σ_k χ_k λ^k` truncated at `λ^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalarSpectralSeries {
    order: usize,
    coeffs: Vec<Polynomial>,
    b: Vec<Rational>,
    d: Vec<Vec<Rational>>,
    normalized: Option<usize>,
}

impl ScalarSpectralSeries {
    pub fn from_coefficients(coeffs: Vec<Polynomial>) -> Self {
        ScalarSpectralSeries {
            order: coeffs.len() - 1,
            b: Vec::new(),
            d: Vec::new(),
            normalized: None,
            coeffs,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize) -> &Polynomial {
        &self.coeffs[k]
    }

    pub fn coefficients(&self) -> &[Polynomial] {
        &self.coeffs
    }

    /// `Some(α)` when the seeds select the flat coordinate `χ^α` with `χ|_{λ=0} = x^α`.
    pub fn normalized(&self) -> Option<usize> {
        self.normalized
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn d(&self) -> &[Vec<Rational>] {
        &self.d
    }

    pub fn series(&self, p: Param, negate: bool) -> Polynomial {
        assemble_series(&self.coeffs, p, negate)
    }

    pub fn with_coeff(mut self, k: usize, value: Polynomial) -> Self {
        self.coeffs[k] = value;
        self
    }
}

/// `φ_α(λ) = ∂χ(λ)/∂x^α`, coefficient-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovectorSpectralSeries {
    order: usize,
    // [k][α]
    coeffs: Vec<Vec<Polynomial>>,
}

impl CovectorSpectralSeries {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, k: usize, a: usize) -> &Polynomial {
        &self.coeffs[k][a]
    }

    pub fn series(&self, p: Param) -> Vec<Polynomial> {
        let n = self.coeffs[0].len();
        (0..n)
            .map(|a| {
                let cs: Vec<Polynomial> = self.coeffs.iter().map(|c| c[a].clone()).collect();
                assemble_series(&cs, p, false)
            })
            .collect()
    }
}

fn seed(list: &[Vec<Rational>], j: usize, g: usize) -> Rational {
    list.get(j)
        .and_then(|r| r.get(g))
        .cloned()
        .unwrap_or_else(rational::zero)
}

/// `ψ_k^α = Σ_{j≤k} h_j^γ (w_{k−j})^α_γ`; missing seeds count as zero.
pub fn assemble_psi(tower: &WTower, h: &[Vec<Rational>]) -> VectorSpectralSeries {
    let order = tower.order();
    let n = tower.levels[0].len();
    let coeffs = (0..=order)
        .map(|k| {
            (0..n)
                .map(|a| {
                    let mut acc = Polynomial::zero(n);
                    for j in 0..=k {
                        for g in 0..n {
                            let hj = seed(h, j, g);
                            if !hj.is_zero() {
                                acc += tower.levels[k - j][a][g].scale(&hj);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    VectorSpectralSeries {
        order,
        coeffs,
        seeds: (0..=order).map(|j| (0..n).map(|g| seed(h, j, g)).collect()).collect(),
    }
}

/// `χ_k = b_k + Σ_{j≤k} d_{k−j,γ} v_j^γ`; missing seeds count as zero.
pub fn assemble_chi(tower: &VTower, b: &[Rational], d: &[Vec<Rational>]) -> ScalarSpectralSeries {
    let order = tower.order();
    let n = tower.levels[0].len();
    let coeffs = (0..=order)
        .map(|k| {
            let mut acc = Polynomial::constant(n, b.get(k).cloned().unwrap_or_else(rational::zero));
            for j in 0..=k {
                for g in 0..n {
                    let dj = seed(d, k - j, g);
                    if !dj.is_zero() {
                        acc += tower.levels[j][g].scale(&dj);
                    }
                }
            }
            acc
        })
        .collect();
    let d_full: Vec<Vec<Rational>> = (0..=order).map(|j| (0..n).map(|g| seed(d, j, g)).collect()).collect();
    let b_full: Vec<Rational> = (0..=order)
        .map(|k| b.get(k).cloned().unwrap_or_else(rational::zero))
        .collect();
    let normalized = (0..n).find(|&a| {
        b_full.iter().all(Zero::is_zero)
            && d_full.iter().enumerate().all(|(j, row)| {
                row.iter().enumerate().all(|(g, v)| {
                    *v == if j == 0 && g == a {
                        rational::one()
                    } else {
                        rational::zero()
                    }
                })
            })
    });
    ScalarSpectralSeries {
        order,
        coeffs,
        b: b_full,
        d: d_full,
        normalized,
    }
}

/// Residual `∂ψ^α/∂x^β − λK^α_{,βγ}ψ^γ` mod `λ^{order+1}`, indexed `(α,β)`.
pub fn verify_vector_spectral(k: &DisplacementField, psi: &VectorSpectralSeries) -> ResidualTensor {
    let n = k.dim();
    let c = model::hessians(k);
    let series = psi.series(Param::Lambda, false);
    let order = psi.order() as u32;
    let lam = Monomial::param(Param::Lambda, 1);
    ResidualTensor::from_fn(&[n, n], |i| {
        let (a, b) = (i[0], i[1]);
        let rhs = contract(&c, a, b, |g| &series[g]).shift(&lam).truncate(order);
        &series[a].diff(b) - &rhs
    })
}

/// Residual `χ_{,αγ} − λK^ν_{,αγ}χ_{,ν}` mod `λ^{order+1}`, indexed `(α,γ)`.
pub fn verify_scalar_spectral(k: &DisplacementField, chi: &ScalarSpectralSeries) -> ResidualTensor {
    let n = k.dim();
    let c = model::hessians(k);
    let series = chi.series(Param::Lambda, false);
    let grad: Vec<Polynomial> = (0..n).map(|nu| series.diff(nu)).collect();
    let order = chi.order() as u32;
    let lam = Monomial::param(Param::Lambda, 1);
    ResidualTensor::from_fn(&[n, n], |i| {
        let (a, g) = (i[0], i[1]);
        let rhs = raise(&c, a, g, &grad).shift(&lam).truncate(order);
        &grad[a].diff(g) - &rhs
    })
}

/// `φ_{k,α} = ∂χ_k/∂x^α`.
pub fn covector_from_scalar(chi: &ScalarSpectralSeries) -> CovectorSpectralSeries {
    let n = chi.coeffs[0].dim();
    CovectorSpectralSeries {
        order: chi.order,
        coeffs: chi.coeffs.iter().map(|c| (0..n).map(|a| c.diff(a)).collect()).collect(),
    }
}

/// Residual `∂φ_α/∂x^β − λc^δ_{αβ}φ_δ` mod `λ^{order+1}`, indexed `(α,β)`.
pub fn verify_covector_spectral(k: &DisplacementField, phi: &CovectorSpectralSeries) -> ResidualTensor {
    let n = k.dim();
    let c = model::hessians(k);
    let series = phi.series(Param::Lambda);
    let order = phi.order() as u32;
    let lam = Monomial::param(Param::Lambda, 1);
    ResidualTensor::from_fn(&[n, n], |i| {
        let (a, b) = (i[0], i[1]);
        let rhs = raise(&c, a, b, &series).shift(&lam).truncate(order);
        &series[a].diff(b) - &rhs
    })
}

/// Residual `ψ_k^α − η^{αβ}∂χ_k/∂x^β` for `K = gradient_reduce(F)`, with the
/// vector seeds taken from the scalar ones (`h = ηd`), indexed `(k,α)`.
pub fn reduction_coherence(f: &model::Prepotential, seeds: &Seeds, order: usize) -> Result<ResidualTensor, Error> {
    model::require_wdvv_solution(f)?;
    let k = model::gradient_reduce(f);
    let eta = f.metric().upper();
    let tower = PotentialTower::build(&k, order)?;
    let seeds = seeds.clone().with_h_from_d(eta);
    let psi = assemble_psi(&tower.w, &seeds.h);
    let chi = assemble_chi(&tower.v, &seeds.b, &seeds.d);
    let n = k.dim();
    Ok(ResidualTensor::from_fn(&[order + 1, n], |i| {
        let (j, a) = (i[0], i[1]);
        let mut acc = psi.coeff(j, a).clone();
        for b in 0..n {
            acc -= chi.coeff(j).diff(b).scale(&eta[(a, b)]);
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::poly::Chart;
    use crate::rational::{int, rat};

    fn field(n: usize, comps: &[&str]) -> DisplacementField {
        let chart = Chart::new(n).unwrap();
        DisplacementField::new(
            chart,
            comps.iter().map(|s| parse_polynomial(s, chart).unwrap()).collect(),
        )
        .unwrap()
    }

    fn algebra_n2() -> DisplacementField {
        field(2, &["x1^2/2", "x1*x2"])
    }

    #[test]
    fn linear_field_has_trivial_tower() {
        let k = field(3, &["x1 + 2*x2", "x3/2 - x1", "3*x2 + x3"]);
        let t = PotentialTower::build(&k, 4).unwrap();
        for lvl in 2..=4 {
            assert!(t.w.level(lvl).iter().flatten().all(Polynomial::is_zero));
        }
        assert_eq!(t.w.level(1), &k.jacobian()[..]);
        assert!(t.w.level(1).iter().flatten().all(|p| p.x_degree().unwrap_or(0) == 0));
    }

    #[test]
    fn tower_base_levels() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 3).unwrap();
        assert_eq!(t.w.get(0, 0, 0), Polynomial::one(2));
        assert!(t.w.get(0, 0, 1).is_zero());
        assert!(t.w.get(-1, 1, 1).is_zero());
        assert_eq!(t.v.level(0), &[Polynomial::var(2, 0), Polynomial::var(2, 1)][..]);
        assert_eq!(t.v.level(1), k.components());
    }

    #[test]
    fn non_solution_rejected_up_front() {
        let k = field(2, &["x2^2/2", "x1^2/2"]);
        assert!(matches!(build_w_tower(&k, 3), Err(Error::NotASolution { .. })));
        assert!(matches!(build_v_tower(&k, 3), Err(Error::NotASolution { .. })));
    }

    #[test]
    fn unit_seeds_collapse_to_columns() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 4).unwrap();
        let s = Seeds::unit(2, 4, 1, 0);
        let psi = assemble_psi(&t.w, &s.h);
        for kk in 0..=4 {
            assert_eq!(psi.coefficients()[kk], t.w.column(kk, 1));
        }
        let chi = assemble_chi(&t.v, &s.b, &s.d);
        assert_eq!(chi.normalized(), Some(0));
        assert_eq!(*chi.coeff(0), Polynomial::var(2, 0));
        let zero = assemble_psi(&t.w, &Seeds::zero(2, 4).h);
        assert!(zero.coefficients().iter().flatten().all(Polynomial::is_zero));
    }

    #[test]
    fn assembled_series_solve_spectral_problems() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 4).unwrap();
        let mut s = Seeds::zero(2, 4);
        s.h[0] = alloc::vec![rat(1, 2), int(-3)];
        s.h[2] = alloc::vec![int(2), rat(5, 7)];
        s.b[1] = int(4);
        s.d[0] = alloc::vec![int(1), int(2)];
        s.d[3] = alloc::vec![rat(-1, 3), int(0)];
        let psi = assemble_psi(&t.w, &s.h);
        let chi = assemble_chi(&t.v, &s.b, &s.d);
        assert!(verify_vector_spectral(&k, &psi).is_zero());
        assert!(verify_scalar_spectral(&k, &chi).is_zero());
        assert!(verify_covector_spectral(&k, &covector_from_scalar(&chi)).is_zero());
        assert_eq!(chi.normalized(), None);
    }

    #[test]
    fn perturbation_is_caught() {
        let k = algebra_n2();
        let t = PotentialTower::build(&k, 4).unwrap();
        let psi = assemble_psi(&t.w, &Seeds::unit(2, 4, 0, 0).h);
        let bumped = &psi.coeff(2, 1).clone() + &Polynomial::var(2, 0);
        let bad = psi.with_coeff(2, 1, bumped);
        let r = verify_vector_spectral(&k, &bad);
        assert!(!r.is_zero());
        let w = r.witness_value().unwrap();
        let lam_deg = w.terms().map(|(m, _)| m.param_exp(Param::Lambda)).min().unwrap();
        assert!(lam_deg == 2 || lam_deg == 3);
    }

    #[test]
    fn constant_chi_is_a_solution() {
        let k = algebra_n2();
        let chi = ScalarSpectralSeries::from_coefficients(alloc::vec![Polynomial::constant(2, int(5)); 5]);
        assert!(verify_scalar_spectral(&k, &chi).is_zero());
        let phi = covector_from_scalar(&chi);
        assert!((0..=4).all(|kk| (0..2).all(|a| phi.coeff(kk, a).is_zero())));
    }

    #[test]
    fn gradient_reduction_is_coherent() {
        let chart = Chart::new(3).unwrap();
        let f = parse_polynomial("x1^2*x3/2 + x1*x2^2/2 + x2^2*x3^2/4 + x3^5/60", chart).unwrap();
        let f = model::Prepotential::new(chart, f, model::Metric::antidiagonal(3)).unwrap();
        let mut seeds = Seeds::zero(3, 4);
        seeds.d[0] = vec![int(1), rat(-1, 2), int(2)];
        seeds.d[2] = vec![int(0), int(3), int(-1)];
        seeds.b[1] = int(7);
        let r = reduction_coherence(&f, &seeds, 4).unwrap();
        assert!(r.is_zero(), "{:?}", r.witness());
    }
}
