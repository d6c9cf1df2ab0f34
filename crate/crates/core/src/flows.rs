//! Extended flows on concrete solution bundles and exact checks of their
//! commutators.
//!
//! Flow coefficients such as `λμ/(λ+μ)` are rational in the spectral
//! parameters. Values are kept as [`Frac`]: a sum of truncated polynomial
//! numerators over products of linear forms `p ± q`. Commutators are
//! compared after multiplying through by the common denominator, so each
//! check is a polynomial identity in `(x, λ, μ, ζ)` decided mod total
//! parameter degree above the bundle order.
//!
//! Mixed derivatives are taken on the bundle itself: the inner flow is
//! written as a sum of products of primitive quantities (entries of
//! `c = ∇²K`, `ψ(a)`, `χ(a)`, `∂χ(a)`, `w_l`), and the outer flow acts on
//! each primitive through its own right-hand side, differentiated in `x`
//! where the primitive is an `x`-derivative.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::Error;
use crate::model::{self, DisplacementField, Metric, Prepotential};
use crate::poly::{Monomial, Param, Polynomial};
use crate::rational::{self, Rational};
use crate::spectral::{assemble_chi, assemble_psi, PotentialTower, ScalarSpectralSeries, Seeds, VectorSpectralSeries};

/// A spectral argument `±p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arg {
    pub param: Param,
    pub negated: bool,
}

impl Arg {
    pub const fn pos(param: Param) -> Self {
        Arg { param, negated: false }
    }

    pub const fn flip(self) -> Self {
        Arg {
            param: self.param,
            negated: !self.negated,
        }
    }

    fn sign(self) -> i64 {
        if self.negated {
            -1
        } else {
            1
        }
    }

    fn slot(self) -> usize {
        2 * self.param.index() + self.negated as usize
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("-")?;
        }
        f.write_str(self.param.name())
    }
}

/// `first + second` or `first − second`, with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm {
    pub first: Param,
    pub second: Param,
    pub plus: bool,
}

impl LinearForm {
    pub fn polynomial(&self, dim: usize) -> Polynomial {
        let a = Polynomial::param(dim, self.first, 1);
        let b = Polynomial::param(dim, self.second, 1);
        if self.plus {
            &a + &b
        } else {
            &a - &b
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.plus { '+' } else { '-' };
        write!(f, "({} {} {})", self.first.name(), op, self.second.name())
    }
}

/// Rational function with linear-form denominators; keys are sorted
/// multisets of forms, the empty key holds the polynomial part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frac {
    dim: usize,
    parts: BTreeMap<Vec<LinearForm>, Polynomial>,
}

impl Frac {
    pub fn zero(dim: usize) -> Self {
        Frac {
            dim,
            parts: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let mut f = Frac::zero(p.dim());
        f.push(Vec::new(), p);
        f
    }

    pub fn over(numerator: Polynomial, mut denominator: Vec<LinearForm>) -> Self {
        denominator.sort();
        let mut f = Frac::zero(numerator.dim());
        f.push(denominator, numerator);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn parts(&self) -> impl Iterator<Item = (&[LinearForm], &Polynomial)> {
        self.parts.iter().map(|(d, n)| (d.as_slice(), n))
    }

    fn push(&mut self, denom: Vec<LinearForm>, numer: Polynomial) {
        if numer.is_zero() {
            return;
        }
        match self.parts.get_mut(&denom) {
            Some(existing) => {
                *existing += numer;
                if existing.is_zero() {
                    self.parts.remove(&denom);
                }
            }
            None => {
                self.parts.insert(denom, numer);
            }
        }
    }

    pub fn add(&self, other: &Frac) -> Frac {
        let mut out = self.clone();
        for (d, n) in &other.parts {
            out.push(d.clone(), n.clone());
        }
        out
    }

    pub fn sub(&self, other: &Frac) -> Frac {
        let mut out = self.clone();
        for (d, n) in &other.parts {
            out.push(d.clone(), -n);
        }
        out
    }

    /// Product with numerators truncated at total parameter degree `order`.
    pub fn mul_trunc(&self, other: &Frac, order: u32) -> Frac {
        let mut out = Frac::zero(self.dim);
        for (da, na) in &self.parts {
            for (db, nb) in &other.parts {
                let mut d = da.clone();
                d.extend_from_slice(db);
                d.sort();
                out.push(d, na.mul_trunc(nb, order));
            }
        }
        out
    }

    pub fn diff(&self, i: usize) -> Frac {
        let mut out = Frac::zero(self.dim);
        for (d, n) in &self.parts {
            out.push(d.clone(), n.diff(i));
        }
        out
    }

    /// Least common multiple of the part denominators.
    pub fn common_denominator(&self) -> Vec<LinearForm> {
        let mut out: Vec<LinearForm> = Vec::new();
        for d in self.parts.keys() {
            out = lcm(&out, d);
        }
        out
    }

    /// Numerator over `denom`, which must be a multiple of every part
    /// denominator, truncated at total parameter degree `order`.
    pub fn cleared(&self, denom: &[LinearForm], order: u32) -> Polynomial {
        let mut acc = Polynomial::zero(self.dim);
        for (d, n) in &self.parts {
            let mut p = n.clone();
            for form in quotient(denom, d) {
                p = p.mul_trunc(&form.polynomial(self.dim), order);
            }
            acc += p;
        }
        acc.truncate(order)
    }
}

fn lcm(a: &[LinearForm], b: &[LinearForm]) -> Vec<LinearForm> {
    let mut out = a.to_vec();
    for f in quotient(b, a) {
        out.push(f);
    }
    out.sort();
    out
}

/// Multiset difference `a \ b`.
fn quotient(a: &[LinearForm], b: &[LinearForm]) -> Vec<LinearForm> {
    let mut rest = b.to_vec();
    let mut out = Vec::new();
    for f in a {
        if let Some(i) = rest.iter().position(|g| g == f) {
            rest.swap_remove(i);
        } else {
            out.push(*f);
        }
    }
    out
}

/// `ab` as a constant.
fn product_coef(dim: usize, a: Arg, b: Arg) -> Frac {
    let m = monomial_pair(a.param, b.param);
    Frac::from_poly(Polynomial::monomial(dim, m, rational::int(a.sign() * b.sign())))
}

fn monomial_pair(p: Param, q: Param) -> Monomial {
    if p == q {
        Monomial::param(p, 2)
    } else {
        let pq = Polynomial::param(1, p, 1) * Polynomial::param(1, q, 1);
        let m = *pq.terms().next().expect("nonzero").0;
        m
    }
}

/// `ab/(a+b)`.
fn ratio_coef(dim: usize, a: Arg, b: Arg) -> Result<Frac, Error> {
    let s = a.sign() * b.sign();
    if a.param == b.param {
        if a.negated != b.negated {
            return Err(Error::ZeroDenominator);
        }
        // a·a/(2a) = a/2
        let c = rational::rat(a.sign(), 2);
        return Ok(Frac::from_poly(Polynomial::param(dim, a.param, 1).scale(&c)));
    }
    let (x, y) = if a.param < b.param { (a, b) } else { (b, a) };
    let outer = x.sign();
    let form = LinearForm {
        first: x.param,
        second: y.param,
        plus: y.sign() * outer == 1,
    };
    let numer = Polynomial::monomial(dim, monomial_pair(a.param, b.param), rational::int(s * outer));
    Ok(Frac::over(numer, vec![form]))
}

/// A one-parameter (or coefficient) flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flow {
    /// `∂K/∂τ_λ = ψ(λ)`
    Tau(Param),
    /// `∂K/∂σ_λ = ψ(λ)χ(−λ)`
    Sigma(Param),
    /// `σ_λ + σ_{−λ}`
    Zeta(Param),
    /// `∂F/∂τ_λ = χ(λ)`
    WdvvTau(Param),
    /// `∂F/∂ζ_λ = χ(λ)χ(−λ)`
    WdvvZeta(Param),
    /// `∂K/∂τ^β_k = (w_k)e_β`, zero-based `beta`.
    W { k: usize, beta: usize },
}

impl fmt::Display for Flow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flow::Tau(p) => write!(f, "tau({})", p.name()),
            Flow::Sigma(p) => write!(f, "sigma({})", p.name()),
            Flow::Zeta(p) => write!(f, "zeta({})", p.name()),
            Flow::WdvvTau(p) => write!(f, "wdvv-tau({})", p.name()),
            Flow::WdvvZeta(p) => write!(f, "wdvv-zeta({})", p.name()),
            Flow::W { k, beta } => write!(f, "w-flow(k={},beta={})", k, beta + 1),
        }
    }
}

/// Quantity a flow acts on; indices zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    K(usize),
    Psi(Arg, usize),
    Chi(Arg),
    F,
    W { level: usize, a: usize, b: usize },
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::K(a) => write!(f, "K{}", a + 1),
            Target::Psi(arg, a) => write!(f, "psi{}({})", a + 1, arg),
            Target::Chi(arg) => write!(f, "chi({})", arg),
            Target::F => f.write_str("F"),
            Target::W { level, a, b } => write!(f, "w{}[{}][{}]", level, a + 1, b + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prim {
    C(usize, usize, usize),
    Psi(Arg, usize),
    Chi(Arg),
    DChi(Arg, usize),
    W(usize, usize, usize),
}

struct Term {
    coef: Frac,
    factors: Vec<Prim>,
}

/// A solution with its towers and one choice of ψ and χ, truncated at `order`.
#[derive(Debug, Clone)]
pub struct FlowBundle {
    k: DisplacementField,
    metric: Option<Metric>,
    potential: Option<Polynomial>,
    tower: PotentialTower,
    psi: VectorSpectralSeries,
    chi: ScalarSpectralSeries,
    order: usize,
    c: Vec<Vec<Vec<Polynomial>>>,
    // indexed by Arg::slot
    psi_at: Vec<Vec<Polynomial>>,
    chi_at: Vec<Polynomial>,
    dchi_at: Vec<Vec<Polynomial>>,
}

impl FlowBundle {
    /// Bundle over a solution of the oriented equations; ψ uses `seeds.h`,
    /// χ uses `seeds.b` and `seeds.d`.
    pub fn new(k: &DisplacementField, seeds: &Seeds, order: usize) -> Result<Self, Error> {
        let tower = PotentialTower::build(k, order)?;
        Ok(Self::assemble(k.clone(), None, None, tower, seeds, order))
    }

    /// Bundle over a WDVV solution via the gradient reduction. The vector
    /// seeds are replaced by `η·d`, so that `ψ = η∇χ`.
    pub fn from_prepotential(f: &Prepotential, seeds: &Seeds, order: usize) -> Result<Self, Error> {
        model::require_wdvv_solution(f)?;
        let k = model::gradient_reduce(f);
        let tower = PotentialTower::build(&k, order)?;
        let seeds = seeds.clone().with_h_from_d(f.metric().upper());
        Ok(Self::assemble(
            k,
            Some(f.metric().clone()),
            Some(f.potential().clone()),
            tower,
            &seeds,
            order,
        ))
    }

    fn assemble(
        k: DisplacementField,
        metric: Option<Metric>,
        potential: Option<Polynomial>,
        tower: PotentialTower,
        seeds: &Seeds,
        order: usize,
    ) -> Self {
        let n = k.dim();
        let psi = assemble_psi(&tower.w, &seeds.h);
        let chi = assemble_chi(&tower.v, &seeds.b, &seeds.d);
        let c = model::hessians(&k).entries().to_vec();
        let mut psi_at = Vec::with_capacity(6);
        let mut chi_at = Vec::with_capacity(6);
        let mut dchi_at = Vec::with_capacity(6);
        for p in Param::ALL {
            for negate in [false, true] {
                psi_at.push(psi.series(p, negate));
                let x = chi.series(p, negate);
                dchi_at.push((0..n).map(|a| x.diff(a)).collect());
                chi_at.push(x);
            }
        }
        FlowBundle {
            k,
            metric,
            potential,
            tower,
            psi,
            chi,
            order,
            c,
            psi_at,
            chi_at,
            dchi_at,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn displacement(&self) -> &DisplacementField {
        &self.k
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    pub fn potential(&self) -> Option<&Polynomial> {
        self.potential.as_ref()
    }

    pub fn tower(&self) -> &PotentialTower {
        &self.tower
    }

    pub fn psi(&self) -> &VectorSpectralSeries {
        &self.psi
    }

    pub fn chi(&self) -> &ScalarSpectralSeries {
        &self.chi
    }

    fn trunc(&self) -> u32 {
        self.order as u32
    }

    fn base(&self, p: Prim) -> Polynomial {
        match p {
            Prim::C(a, b, c) => self.c[a][b][c].clone(),
            Prim::Psi(arg, a) => self.psi_at[arg.slot()][a].clone(),
            Prim::Chi(arg) => self.chi_at[arg.slot()].clone(),
            Prim::DChi(arg, a) => self.dchi_at[arg.slot()][a].clone(),
            Prim::W(l, a, b) => self.tower.w.get(l as isize, a, b),
        }
    }

    fn unsupported(flow: Flow, target: Target) -> Error {
        Error::UnsupportedFlow {
            flow: format!("{flow}"),
            target: format!("{target}"),
        }
    }

    fn terms(&self, flow: Flow, target: Target) -> Result<Vec<Term>, Error> {
        let n = self.dim();
        let one = || Frac::from_poly(Polynomial::one(n));
        let bad = || Self::unsupported(flow, target);
        match flow {
            Flow::Tau(p) => self.tau_terms(Arg::pos(p), target).ok_or_else(bad)?,
            Flow::Sigma(p) => self.sigma_terms(Arg::pos(p), target).ok_or_else(bad)?,
            Flow::Zeta(p) => {
                let mut t = self.sigma_terms(Arg::pos(p), target).ok_or_else(bad)??;
                t.extend(self.sigma_terms(Arg::pos(p).flip(), target).ok_or_else(bad)??);
                Ok(t)
            }
            Flow::WdvvTau(p) | Flow::WdvvZeta(p) => {
                let eta = self.metric.as_ref().ok_or_else(bad)?.upper();
                let a = Arg::pos(p);
                let zeta = matches!(flow, Flow::WdvvZeta(_));
                match target {
                    Target::F if zeta => Ok(vec![Term {
                        coef: one(),
                        factors: vec![Prim::Chi(a), Prim::Chi(a.flip())],
                    }]),
                    Target::F => Ok(vec![Term {
                        coef: one(),
                        factors: vec![Prim::Chi(a)],
                    }]),
                    Target::Chi(b) => {
                        let mut out = Vec::new();
                        let r = ratio_coef(n, a, b)?;
                        // ab/(a−b) = −(a(−b))/(a+(−b))
                        let r2 = if zeta {
                            Some(Frac::zero(n).sub(&ratio_coef(n, a, b.flip())?))
                        } else {
                            None
                        };
                        for nu in 0..n {
                            for be in 0..n {
                                let e = &eta[(nu, be)];
                                if num_traits::Zero::is_zero(e) {
                                    continue;
                                }
                                let ce = Frac::from_poly(Polynomial::constant(n, e.clone()));
                                let mut f1 = vec![Prim::DChi(a, be), Prim::DChi(b, nu)];
                                if zeta {
                                    f1.push(Prim::Chi(a.flip()));
                                }
                                out.push(Term {
                                    coef: r.mul_trunc(&ce, self.trunc()),
                                    factors: f1,
                                });
                                if let Some(r2) = &r2 {
                                    out.push(Term {
                                        coef: r2.mul_trunc(&ce, self.trunc()),
                                        factors: vec![Prim::DChi(a.flip(), be), Prim::DChi(b, nu), Prim::Chi(a)],
                                    });
                                }
                            }
                        }
                        Ok(out)
                    }
                    _ => Err(bad()),
                }
            }
            Flow::W { k, beta } => match target {
                Target::K(a) => Ok(vec![Term {
                    coef: one(),
                    factors: vec![Prim::W(k, a, beta)],
                }]),
                Target::W { level, a, b } => {
                    if k == 0 || level == 0 {
                        return Ok(Vec::new());
                    }
                    let mut out = Vec::new();
                    for nu in 0..n {
                        for rho in 0..n {
                            out.push(Term {
                                coef: one(),
                                factors: vec![
                                    Prim::C(a, nu, rho),
                                    Prim::W(k - 1, nu, beta),
                                    Prim::W(level - 1, rho, b),
                                ],
                            });
                        }
                    }
                    Ok(out)
                }
                _ => Err(bad()),
            },
        }
    }

    fn tau_terms(&self, a: Arg, target: Target) -> Option<Result<Vec<Term>, Error>> {
        let n = self.dim();
        Some(Ok(match target {
            Target::K(al) => vec![Term {
                coef: Frac::from_poly(Polynomial::one(n)),
                factors: vec![Prim::Psi(a, al)],
            }],
            Target::Psi(b, al) => {
                let coef = product_coef(n, a, b);
                let mut out = Vec::new();
                for nu in 0..n {
                    for ka in 0..n {
                        out.push(Term {
                            coef: coef.clone(),
                            factors: vec![Prim::C(al, nu, ka), Prim::Psi(a, nu), Prim::Psi(b, ka)],
                        });
                    }
                }
                out
            }
            Target::Chi(b) => {
                let coef = match ratio_coef(n, a, b) {
                    Ok(c) => c,
                    Err(e) => return Some(Err(e)),
                };
                (0..n)
                    .map(|nu| Term {
                        coef: coef.clone(),
                        factors: vec![Prim::Psi(a, nu), Prim::DChi(b, nu)],
                    })
                    .collect()
            }
            _ => return None,
        }))
    }

    fn sigma_terms(&self, a: Arg, target: Target) -> Option<Result<Vec<Term>, Error>> {
        let n = self.dim();
        let m = a.flip();
        Some(Ok(match target {
            Target::K(al) => vec![Term {
                coef: Frac::from_poly(Polynomial::one(n)),
                factors: vec![Prim::Psi(a, al), Prim::Chi(m)],
            }],
            Target::Psi(b, al) => {
                let coef = product_coef(n, a, b);
                let r = match ratio_coef(n, a, b.flip()) {
                    Ok(c) => c,
                    Err(e) => return Some(Err(e)),
                };
                let mut out = Vec::new();
                for nu in 0..n {
                    for ka in 0..n {
                        out.push(Term {
                            coef: coef.clone(),
                            factors: vec![Prim::C(al, nu, ka), Prim::Psi(a, nu), Prim::Psi(b, ka), Prim::Chi(m)],
                        });
                    }
                }
                // ab/(a−b) = −(a(−b))/(a+(−b))
                let r = Frac::zero(n).sub(&r);
                for be in 0..n {
                    out.push(Term {
                        coef: r.clone(),
                        factors: vec![Prim::DChi(m, be), Prim::Psi(b, be), Prim::Psi(a, al)],
                    });
                }
                out
            }
            Target::Chi(b) => {
                let coef = match ratio_coef(n, a, b) {
                    Ok(c) => c,
                    Err(e) => return Some(Err(e)),
                };
                (0..n)
                    .map(|nu| Term {
                        coef: coef.clone(),
                        factors: vec![Prim::Psi(a, nu), Prim::DChi(b, nu), Prim::Chi(m)],
                    })
                    .collect()
            }
            _ => return None,
        }))
    }

    fn eval(&self, terms: &[Term]) -> Frac {
        let order = self.trunc();
        let mut acc = Frac::zero(self.dim());
        for t in terms {
            let mut v = t.coef.clone();
            for p in &t.factors {
                v = v.mul_trunc(&Frac::from_poly(self.base(*p)), order);
            }
            acc = acc.add(&v);
        }
        acc
    }

    /// `∂target/∂flow` on this bundle.
    pub fn rhs(&self, flow: Flow, target: Target) -> Result<Frac, Error> {
        Ok(self.eval(&self.terms(flow, target)?))
    }

    fn prim_rate(&self, p: Prim, flow: Flow, memo: &mut BTreeMap<Prim, Frac>) -> Result<Frac, Error> {
        if let Some(v) = memo.get(&p) {
            return Ok(v.clone());
        }
        let v = match p {
            Prim::C(a, b, c) => self.rhs(flow, Target::K(a))?.diff(b).diff(c),
            Prim::Psi(arg, a) => self.rhs(flow, Target::Psi(arg, a))?,
            Prim::Chi(arg) => self.rhs(flow, Target::Chi(arg))?,
            Prim::DChi(arg, a) => self.prim_rate(Prim::Chi(arg), flow, memo)?.diff(a),
            Prim::W(level, a, b) => self.rhs(flow, Target::W { level, a, b })?,
        };
        memo.insert(p, v.clone());
        Ok(v)
    }

    /// `∂/∂outer (∂target/∂inner)`.
    pub fn mixed(&self, inner: Flow, outer: Flow, target: Target) -> Result<Frac, Error> {
        let order = self.trunc();
        let mut memo = BTreeMap::new();
        let mut acc = Frac::zero(self.dim());
        for t in self.terms(inner, target)? {
            for i in 0..t.factors.len() {
                let mut v = t.coef.clone();
                for (j, p) in t.factors.iter().enumerate() {
                    let f = if i == j {
                        self.prim_rate(*p, outer, &mut memo)?
                    } else {
                        Frac::from_poly(self.base(*p))
                    };
                    if f.is_zero() {
                        v = Frac::zero(self.dim());
                        break;
                    }
                    v = v.mul_trunc(&f, order);
                }
                acc = acc.add(&v);
            }
        }
        Ok(acc)
    }

    /// Compare `∂²target/∂first∂second` in both orders.
    pub fn commutator(
        &self,
        first: Flow,
        second: Flow,
        target: Target,
        asserted: bool,
    ) -> Result<CommutationCheck, Error> {
        let order = self.trunc();
        let one_way = self.mixed(first, second, target)?;
        let other_way = self.mixed(second, first, target)?;
        let diff = one_way.sub(&other_way);
        let denominator = lcm(&one_way.common_denominator(), &other_way.common_denominator());
        let residual = diff.cleared(&denominator, order);
        let compared_terms = one_way
            .cleared(&denominator, order)
            .len()
            .max(other_way.cleared(&denominator, order).len());
        Ok(CommutationCheck {
            first,
            second,
            target,
            asserted,
            denominator,
            residual,
            compared_terms,
        })
    }
}

/// One mixed-derivative comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationCheck {
    pub first: Flow,
    pub second: Flow,
    pub target: Target,
    /// Whether the identity is claimed; unclaimed checks are only reported.
    pub asserted: bool,
    /// Common denominator multiplied through.
    pub denominator: Vec<LinearForm>,
    /// Cleared `∂_second∂_first − ∂_first∂_second` of the target.
    pub residual: Polynomial,
    /// Monomials present in the larger cleared side below the truncation.
    pub compared_terms: usize,
}

impl CommutationCheck {
    pub fn is_zero(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn swapped(&self) -> Self {
        CommutationCheck {
            first: self.second,
            second: self.first,
            target: self.target,
            asserted: self.asserted,
            denominator: self.denominator.clone(),
            residual: -&self.residual,
            compared_terms: self.compared_terms,
        }
    }

    pub fn label(&self) -> String {
        format!("[{}, {}] on {}", self.first, self.second, self.target)
    }
}

/// Outcome of a family of commutator checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationReport {
    /// Total parameter degree kept; `None` for parameter-free checks.
    pub order: Option<usize>,
    pub checks: Vec<CommutationCheck>,
}

impl CommutationReport {
    /// All asserted residuals vanish.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.asserted || c.is_zero())
    }

    /// First asserted check with a nonzero residual.
    pub fn witness(&self) -> Option<&CommutationCheck> {
        self.checks.iter().find(|c| c.asserted && !c.is_zero())
    }

    pub fn asserted(&self) -> impl Iterator<Item = &CommutationCheck> {
        self.checks.iter().filter(|c| c.asserted)
    }

    pub fn reported(&self) -> impl Iterator<Item = &CommutationCheck> {
        self.checks.iter().filter(|c| !c.asserted)
    }

    pub fn swapped(&self) -> Self {
        CommutationReport {
            order: self.order,
            checks: self.checks.iter().map(CommutationCheck::swapped).collect(),
        }
    }

    /// The same report at a lower total parameter degree.
    pub fn truncated(&self, order: usize) -> Self {
        CommutationReport {
            order: self.order.map(|o| o.min(order)),
            checks: self
                .checks
                .iter()
                .map(|c| CommutationCheck {
                    residual: c.residual.truncate(order as u32),
                    ..c.clone()
                })
                .collect(),
        }
    }
}

const L: Param = Param::Lambda;
const M: Param = Param::Mu;
const Z: Param = Param::Zeta;

/// `∂target/∂flow` on a bundle.
pub fn extended_flow_rhs(bundle: &FlowBundle, flow: Flow, target: Target) -> Result<Frac, Error> {
    bundle.rhs(flow, target)
}

/// `τ_λ` against `τ_μ` on `K`, `ψ(ζ)` and `χ(ζ)`.
pub fn check_tau_tau(bundle: &FlowBundle) -> Result<CommutationReport, Error> {
    let n = bundle.dim();
    let z = Arg::pos(Z);
    let mut targets: Vec<Target> = (0..n).map(Target::K).collect();
    targets.extend((0..n).map(|a| Target::Psi(z, a)));
    targets.push(Target::Chi(z));
    let checks = targets
        .into_iter()
        .map(|t| bundle.commutator(Flow::Tau(L), Flow::Tau(M), t, true))
        .collect::<Result<_, _>>()?;
    Ok(CommutationReport {
        order: Some(bundle.order()),
        checks,
    })
}

/// `τ`, `σ` and `ζ` pairs on `K` (asserted) and the σ pairs on `ψ(ζ)`,
/// `χ(ζ)` (reported only).
pub fn check_sigma_pairs(bundle: &FlowBundle) -> Result<CommutationReport, Error> {
    let n = bundle.dim();
    let z = Arg::pos(Z);
    let pairs = [
        (Flow::Tau(L), Flow::Sigma(M)),
        (Flow::Sigma(L), Flow::Sigma(M)),
        (Flow::Tau(L), Flow::Zeta(M)),
        (Flow::Zeta(L), Flow::Zeta(M)),
    ];
    let mut checks = Vec::new();
    for (a, b) in pairs {
        for al in 0..n {
            checks.push(bundle.commutator(a, b, Target::K(al), true)?);
        }
    }
    for (a, b) in &pairs[..2] {
        for al in 0..n {
            checks.push(bundle.commutator(*a, *b, Target::Psi(z, al), false)?);
        }
        checks.push(bundle.commutator(*a, *b, Target::Chi(z), false)?);
    }
    Ok(CommutationReport {
        order: Some(bundle.order()),
        checks,
    })
}

/// Coefficient flows `τ^β_k` against `τ^γ_l` on `K` and on `w_m` for
/// `m ≤ max(k,l) + 1`, all `β, γ`.
pub fn check_w_hierarchy(bundle: &FlowBundle, k: usize, l: usize) -> Result<CommutationReport, Error> {
    let top = k.max(l) + 1;
    if top > bundle.tower().order() {
        return Err(Error::OrderTooHigh {
            requested: top,
            available: bundle.tower().order(),
        });
    }
    let n = bundle.dim();
    let mut checks = Vec::new();
    for beta in 0..n {
        for gamma in 0..n {
            let (f1, f2) = (Flow::W { k, beta }, Flow::W { k: l, beta: gamma });
            for a in 0..n {
                checks.push(bundle.commutator(f1, f2, Target::K(a), true)?);
            }
            for level in 0..=top {
                for a in 0..n {
                    for b in 0..n {
                        checks.push(bundle.commutator(f1, f2, Target::W { level, a, b }, true)?);
                    }
                }
            }
        }
    }
    Ok(CommutationReport { order: None, checks })
}

/// `τ_λ` against `τ_μ` on `F` and `χ(ζ)`, and the `τ`/`ζ` pairs on `F`.
pub fn check_wdvv_flows(bundle: &FlowBundle) -> Result<CommutationReport, Error> {
    let z = Arg::pos(Z);
    let mut checks = vec![
        bundle.commutator(Flow::WdvvTau(L), Flow::WdvvTau(M), Target::F, true)?,
        bundle.commutator(Flow::WdvvTau(L), Flow::WdvvTau(M), Target::Chi(z), true)?,
    ];
    for (a, b) in [
        (Flow::WdvvTau(L), Flow::WdvvZeta(M)),
        (Flow::WdvvZeta(L), Flow::WdvvZeta(M)),
    ] {
        checks.push(bundle.commutator(a, b, Target::F, true)?);
    }
    Ok(CommutationReport {
        order: Some(bundle.order()),
        checks,
    })
}

/// Constant `r` as a [`Frac`].
pub fn constant(dim: usize, r: Rational) -> Frac {
    Frac::from_poly(Polynomial::constant(dim, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::poly::Chart;
    use crate::rational::{int, rat};

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

    fn seeds() -> Seeds {
        let mut s = Seeds::unit(2, 4, 0, 1);
        s.h[1] = vec![int(1), rat(-1, 2)];
        s.d[1] = vec![int(2), int(0)];
        s.b[0] = int(3);
        s
    }

    #[test]
    fn ratio_normalizes_sign() {
        let (l, m) = (Arg::pos(L), Arg::pos(M));
        // λ(−μ)/(λ−μ)
        let f = ratio_coef(1, l, m.flip()).unwrap();
        let (d, num) = f.parts().next().unwrap();
        assert_eq!(
            d,
            &[LinearForm {
                first: L,
                second: M,
                plus: false
            }]
        );
        assert_eq!(num.to_string(), "-lambda*mu");
        // (−λ)μ/(−λ+μ) = λμ/(λ−μ)
        let g = ratio_coef(1, l.flip(), m).unwrap();
        assert_eq!(g.parts().next().unwrap().1.to_string(), "lambda*mu");
        assert_eq!(ratio_coef(1, l, l.flip()), Err(Error::ZeroDenominator));
    }

    #[test]
    fn clearing_combines_denominators() {
        let lp = LinearForm {
            first: L,
            second: M,
            plus: true,
        };
        let lm = LinearForm {
            first: L,
            second: M,
            plus: false,
        };
        let one = Polynomial::one(1);
        // 1/(λ+μ) + 1/(λ−μ) = 2λ/(λ²−μ²)
        let f = Frac::over(one.clone(), vec![lp]).add(&Frac::over(one, vec![lm]));
        let d = f.common_denominator();
        assert_eq!(d.len(), 2);
        assert_eq!(f.cleared(&d, 4), Polynomial::param(1, L, 1).scale(&int(2)));
    }

    #[test]
    fn tau_on_psi_vanishes_at_constant_order() {
        let b = FlowBundle::new(&algebra_n2(), &seeds(), 4).unwrap();
        let r = b.rhs(Flow::Tau(L), Target::Psi(Arg::pos(M), 0)).unwrap();
        for (_, num) in r.parts() {
            assert!(num.terms().all(|(m, _)| m.param_exp(L) >= 1 && m.param_exp(M) >= 1));
        }
    }

    #[test]
    fn tau_on_constant_chi_is_zero() {
        let mut s = Seeds::zero(2, 4);
        s.b[0] = int(5);
        let b = FlowBundle::new(&algebra_n2(), &s, 4).unwrap();
        assert!(b.rhs(Flow::Tau(L), Target::Chi(Arg::pos(M))).unwrap().is_zero());
    }

    #[test]
    fn tau_pairs_commute_on_quadratic_algebra() {
        let b = FlowBundle::new(&algebra_n2(), &seeds(), 4).unwrap();
        let r = check_tau_tau(&b).unwrap();
        assert!(r.passed(), "{:?}", r.witness());
        assert!(r.swapped().passed());
    }

    #[test]
    fn sigma_pairs_commute_on_quadratic_algebra() {
        let b = FlowBundle::new(&algebra_n2(), &seeds(), 4).unwrap();
        let r = check_sigma_pairs(&b).unwrap();
        assert!(r.passed(), "{:?}", r.witness());
    }

    #[test]
    fn w_flows_commute() {
        let b = FlowBundle::new(&algebra_n2(), &seeds(), 4).unwrap();
        for (k, l) in [(0, 2), (1, 2), (2, 3)] {
            assert!(check_w_hierarchy(&b, k, l).unwrap().passed());
        }
        assert!(matches!(check_w_hierarchy(&b, 1, 4), Err(Error::OrderTooHigh { .. })));
    }

    #[test]
    fn wdvv_flows_need_a_metric() {
        let b = FlowBundle::new(&algebra_n2(), &seeds(), 2).unwrap();
        assert!(matches!(check_wdvv_flows(&b), Err(Error::UnsupportedFlow { .. })));
    }
}
