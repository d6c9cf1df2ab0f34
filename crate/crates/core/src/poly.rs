//! Sparse multivariate polynomials over the rationals.
//!
//! A polynomial lives on a [`Chart`] of dimension `n` and may additionally
//! carry the formal spectral parameters λ, μ, ζ as extra exponent slots.
//! Truncation in the parameters is never implicit: operations that need it
//! take the maximal total parameter degree to keep.

use alloc::collections::BTreeMap;

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::rational::{self, Rational};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 8;
/// Number of formal parameter slots (λ, μ, ζ).
pub const NUM_PARAMS: usize = 3;
const SLOTS: usize = MAX_DIM + NUM_PARAMS;

/// Coordinate chart `x1..xn`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chart {
    dim: usize,
}

impl Chart {
    pub fn new(dim: usize) -> Result<Self, Error> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Dimension { dim, max: MAX_DIM });
        }
        Ok(Chart { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Name of the zero-based coordinate `i` (`x1` for `i = 0`).
    pub fn name(&self, i: usize) -> alloc::string::String {
        alloc::format!("x{}", i + 1)
    }
}

/// Formal spectral parameter slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    Lambda = 0,
    Mu = 1,
    Zeta = 2,
}

impl Param {
    pub const ALL: [Param; NUM_PARAMS] = [Param::Lambda, Param::Mu, Param::Zeta];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::Lambda => "lambda",
            Param::Mu => "mu",
            Param::Zeta => "zeta",
        }
    }

    fn slot(self) -> usize {
        MAX_DIM + self as usize
    }
}

/// Exponent vector over the coordinates followed by the parameter slots.
///
/// Ordered graded-lexicographically: total degree first, then the first
/// differing exponent (x1 before x2 before ... before λ, μ, ζ).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u16; SLOTS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; SLOTS] };

    pub fn var(i: usize) -> Self {
        let mut m = Self::ONE;
        m.exps[i] = 1;
        m
    }

    pub fn param(p: Param, k: u16) -> Self {
        let mut m = Self::ONE;
        m.exps[p.slot()] = k;
        m
    }

    pub fn from_x_exponents(exps: &[u16]) -> Self {
        assert!(exps.len() <= MAX_DIM);
        let mut m = Self::ONE;
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn x_exp(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn param_exp(&self, p: Param) -> u16 {
        self.exps[p.slot()]
    }

    pub fn x_degree(&self) -> u32 {
        self.exps[..MAX_DIM].iter().map(|&e| e as u32).sum()
    }

    pub fn param_degree(&self) -> u32 {
        self.exps[MAX_DIM..].iter().map(|&e| e as u32).sum()
    }

    pub fn degree(&self) -> u32 {
        self.x_degree() + self.param_degree()
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; SLOTS]
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (e, o) in exps.iter_mut().zip(other.exps.iter()) {
            *e += *o;
        }
        Monomial { exps }
    }

    fn with_x_exp(mut self, i: usize, e: u16) -> Monomial {
        self.exps[i] = e;
        self
    }

    fn with_param_exp(mut self, p: Param, e: u16) -> Monomial {
        self.exps[p.slot()] = e;
        self
    }

    fn without_x(mut self) -> Monomial {
        for e in &mut self.exps[..MAX_DIM] {
            *e = 0;
        }
        self
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", MonomialDisplay(self))
    }
}

struct MonomialDisplay<'a>(&'a Monomial);

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut factor = |f: &mut fmt::Formatter<'_>, name: &dyn fmt::Display, e: u16| {
            if e == 0 {
                return Ok(());
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", name)
            } else {
                write!(f, "{}^{}", name, e)
            }
        };
        for i in 0..MAX_DIM {
            factor(f, &format_args!("x{}", i + 1), self.0.exps[i])?;
        }
        for p in Param::ALL {
            factor(f, &p.name(), self.0.exps[p.slot()])?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Exact polynomial in the chart coordinates and (optionally) the formal parameters.
///
/// No zero coefficients are ever stored, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(dim, Monomial::ONE, c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, rational::one())
    }

    pub fn monomial(dim: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The coordinate `x_{i+1}`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} outside chart of dimension {dim}");
        Self::monomial(dim, Monomial::var(i), rational::one())
    }

    /// `p^k` for a formal parameter `p`.
    pub fn param(dim: usize, p: Param, k: u16) -> Self {
        Self::monomial(dim, Monomial::param(p, k), rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(dim: usize, terms: I) -> Self {
        let mut p = Self::zero(dim);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term (all coordinate and parameter exponents zero).
    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::ONE)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        debug_assert!((self.dim..MAX_DIM).all(|i| m.exps[i] == 0));
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Largest total coordinate degree, or `None` for the zero polynomial.
    pub fn x_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::x_degree).max()
    }

    /// Largest total parameter degree, or `None` for the zero polynomial.
    pub fn param_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::param_degree).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiply by a monomial (no truncation).
    pub fn shift(&self, m: &Monomial) -> Self {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    /// Product keeping only terms of total parameter degree `<= order`.
    pub fn mul_trunc(&self, other: &Polynomial, order: u32) -> Polynomial {
        self.mul_impl(other, Some(order))
    }

    fn mul_impl(&self, other: &Polynomial, order: Option<u32>) -> Polynomial {
        self.check_dim(other);
        let mut out = Polynomial::zero(self.dim);
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let (a, b) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: BTreeMap<Monomial, BigIntPair> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            let pa = ma.param_degree();
            for (mb, cb) in &b.terms {
                if let Some(n) = order {
                    if pa + mb.param_degree() > n {
                        continue;
                    }
                }
                let m = ma.mul(mb);
                let c = ca * cb;
                acc.entry(m)
                    .and_modify(|e| e.add(&c))
                    .or_insert_with(|| BigIntPair::from(c));
            }
        }
        for (m, c) in acc {
            let c = c.into_rational();
            if !c.is_zero() {
                out.terms.insert(m, c);
            }
        }
        out
    }

    /// Drop every term of total parameter degree above `order`.
    pub fn truncate(&self, order: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.param_degree() <= order)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Exact partial derivative with respect to the zero-based coordinate `i`.
    pub fn diff(&self, i: usize) -> Polynomial {
        assert!(
            i < self.dim,
            "variable index {i} outside chart of dimension {}",
            self.dim
        );
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            out.terms
                .insert(m.with_x_exp(i, e - 1), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Partial derivative with respect to a formal parameter.
    pub fn diff_param(&self, p: Param) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.param_exp(p);
            if e == 0 {
                continue;
            }
            out.terms
                .insert(m.with_param_exp(p, e - 1), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Substitute the coordinates by rational values; parameters stay formal.
    pub fn eval_x(&self, point: &[Rational]) -> Polynomial {
        assert_eq!(point.len(), self.dim, "point dimension mismatch");
        let mut out = Polynomial::zero(self.dim);
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exps[i];
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            out.add_term(m.without_x(), v);
        }
        out
    }

    /// Value at a point when the polynomial carries no parameters.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        let v = self.eval_x(point);
        debug_assert!(
            v.param_degree().unwrap_or(0) == 0,
            "eval on a parameter-dependent polynomial"
        );
        v.constant_term()
    }

    /// Coefficient of `p^k`, as a polynomial free of `p`.
    pub fn param_coeff(&self, p: Param, k: u16) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.param_exp(p) == k)
                .map(|(m, c)| (m.with_param_exp(p, 0), c.clone()))
                .collect(),
        }
    }

    /// The substitution `p -> -p`.
    pub fn flip_param(&self, p: Param) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m.param_exp(p) % 2 == 1 { -c.clone() } else { c.clone() };
                    (*m, c)
                })
                .collect(),
        }
    }

    /// Rename parameter `from` to `to`. Panics if `to` already occurs.
    pub fn rename_param(&self, from: Param, to: Param) -> Polynomial {
        if from == to {
            return self.clone();
        }
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    assert_eq!(m.param_exp(to), 0, "target parameter already present");
                    (
                        m.with_param_exp(to, m.param_exp(from)).with_param_exp(from, 0),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    fn check_dim(&self, other: &Polynomial) {
        assert_eq!(self.dim, other.dim, "polynomials from different charts");
    }

    /// Highest-order term first, which is the canonical serialization order.
    fn display_terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter().rev()
    }
}

// Accumulator that avoids renormalizing a BigRational on every addition:
// sums are kept as an unreduced fraction and reduced once at the end.
struct BigIntPair {
    num: BigInt,
    den: BigInt,
}

impl BigIntPair {
    fn add(&mut self, c: &Rational) {
        if self.den == *c.denom() {
            self.num += c.numer();
        } else {
            self.num = &self.num * c.denom() + c.numer() * &self.den;
            self.den = &self.den * c.denom();
        }
    }

    fn into_rational(self) -> Rational {
        Rational::new(self.num, self.den)
    }
}

impl From<Rational> for BigIntPair {
    fn from(c: Rational) -> Self {
        let (num, den) = c.into_raw();
        BigIntPair { num, den }
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Canonical text form, parseable by [`crate::parse::parse_polynomial`] when
/// no formal parameters are present.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.display_terms().enumerate() {
            let neg = rational::is_negative(c);
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let num = c.numer().magnitude();
            let den = c.denom();
            if m.is_one() {
                write!(f, "{}", num)?;
            } else {
                if !num.is_one() {
                    write!(f, "{}*", num)?;
                }
                write!(f, "{}", MonomialDisplay(m))?;
            }
            if !den.is_one() {
                write!(f, "/{}", den)?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.mul_impl(rhs, None)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        self.check_dim(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl AddAssign for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        *self += &rhs;
    }
}

impl SubAssign for Polynomial {
    fn sub_assign(&mut self, rhs: Polynomial) {
        *self -= &rhs;
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

/// Sum of `coeffs[k] * p^k` for a list of parameter-free coefficients,
/// with `p -> -p` applied when `negate` is set.
pub fn assemble_series(coeffs: &[Polynomial], p: Param, negate: bool) -> Polynomial {
    let dim = coeffs.first().map(Polynomial::dim).unwrap_or(1);
    let mut out = Polynomial::zero(dim);
    for (k, c) in coeffs.iter().enumerate() {
        let mut term = c.shift(&Monomial::param(p, k as u16));
        if negate && k % 2 == 1 {
            term = -term;
        }
        out += &term;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let p = &x(0) - &x(0);
        assert!(p.is_zero());
        assert_eq!(p.len(), 0);
    }

    #[test]
    fn power_rule() {
        let p = &(&x(0) * &x(0)) * &x(1);
        let d = p.diff(0);
        assert_eq!(d, (&x(0) * &x(1)).scale(&int(2)));
        assert!(Polynomial::constant(3, rat(7, 3)).diff(2).is_zero());
    }

    #[test]
    fn truncated_product_drops_high_parameter_degree() {
        let l = Polynomial::param(3, Param::Lambda, 1);
        let m = Polynomial::param(3, Param::Mu, 1);
        let a = &Polynomial::one(3) + &l;
        let b = &Polynomial::one(3) + &m;
        let full = &a * &b;
        assert_eq!(full.len(), 4);
        let t = a.mul_trunc(&b, 1);
        assert_eq!(t, &(&Polynomial::one(3) + &l) + &m);
    }

    #[test]
    fn flip_and_rename() {
        let l = Polynomial::param(2, Param::Lambda, 1);
        let p = &(&Polynomial::var(2, 0) * &l) + &Polynomial::param(2, Param::Lambda, 2);
        let q = p.flip_param(Param::Lambda);
        assert_eq!(q.param_coeff(Param::Lambda, 1), -Polynomial::var(2, 0));
        assert_eq!(q.param_coeff(Param::Lambda, 2), Polynomial::one(2));
        let r = p.rename_param(Param::Lambda, Param::Zeta);
        assert_eq!(r.param_coeff(Param::Zeta, 1), Polynomial::var(2, 0));
        assert!(r.param_coeff(Param::Lambda, 1).is_zero());
    }

    #[test]
    fn evaluation() {
        let p = &(&x(0) * &x(1)) + &Polynomial::constant(3, rat(1, 2));
        assert_eq!(p.eval(&[int(2), int(3), int(5)]), rat(13, 2));
    }

    #[test]
    fn display_is_graded_lex_descending() {
        let p = &(&(&x(0) * &x(0)) * &x(2)).scale(&rat(1, 2)) - &x(1);
        assert_eq!(alloc::format!("{}", p), "x1^2*x3/2 - x2");
        assert_eq!(alloc::format!("{}", Polynomial::zero(3)), "0");
        assert_eq!(alloc::format!("{}", Polynomial::constant(3, rat(-3, 4))), "-3/4");
    }

    #[test]
    fn chart_bounds() {
        assert!(Chart::new(0).is_err());
        assert!(Chart::new(MAX_DIM + 1).is_err());
        assert_eq!(Chart::new(4).unwrap().name(3), "x4");
    }
}
