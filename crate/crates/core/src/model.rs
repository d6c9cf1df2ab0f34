//! Solutions of the oriented associativity equations and their gradient
//! reduction, together with exact residual evaluators.
//!
//! Index conventions: all indices are zero-based. `K^a_{,bc}` denotes
//! `∂²K^a/∂x^b∂x^c`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::matrix::RationalMatrix;
use crate::poly::{Chart, Polynomial};
use crate::rational::Rational;

/// Displacement vector `K^a`, one polynomial per coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisplacementField {
    chart: Chart,
    components: Vec<Polynomial>,
}

impl DisplacementField {
    pub fn new(chart: Chart, components: Vec<Polynomial>) -> Result<Self, Error> {
        if components.len() != chart.dim() {
            return Err(Error::ComponentCount {
                expected: chart.dim(),
                got: components.len(),
            });
        }
        Ok(DisplacementField { chart, components })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Polynomial {
        &self.components[a]
    }

    /// Jacobian `∂K^a/∂x^b`, indexed `[a][b]`.
    pub fn jacobian(&self) -> Vec<Vec<Polynomial>> {
        let n = self.dim();
        (0..n)
            .map(|a| (0..n).map(|b| self.components[a].diff(b)).collect())
            .collect()
    }
}

/// Structure functions `c^a_{bc}` of a commutative algebra over the chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionField {
    chart: Chart,
    // [a][b][c]
    entries: Vec<Vec<Vec<Polynomial>>>,
}

impl ConnectionField {
    /// Rejects input that is not symmetric in the two lower indices.
    pub fn new(chart: Chart, entries: Vec<Vec<Vec<Polynomial>>>) -> Result<Self, Error> {
        let n = chart.dim();
        if entries.len() != n || entries.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(Error::ComponentCount {
                expected: n * n * n,
                got: entries.iter().flatten().map(Vec::len).sum(),
            });
        }
        for a in 0..n {
            for b in 0..n {
                for c in (b + 1)..n {
                    if entries[a][b][c] != entries[a][c][b] {
                        return Err(Error::AsymmetricConnection { index: [a, b, c] });
                    }
                }
            }
        }
        Ok(ConnectionField { chart, entries })
    }

    pub fn zero(chart: Chart) -> Self {
        let n = chart.dim();
        ConnectionField {
            chart,
            entries: vec![vec![vec![Polynomial::zero(n); n]; n]; n],
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    /// `c^a_{bc}`
    pub fn get(&self, a: usize, b: usize, c: usize) -> &Polynomial {
        &self.entries[a][b][c]
    }

    pub fn entries(&self) -> &[Vec<Vec<Polynomial>>] {
        &self.entries
    }

    /// Values at a point, `[a][b][c]`.
    pub fn eval(&self, point: &[Rational]) -> Vec<Vec<Vec<Rational>>> {
        self.entries
            .iter()
            .map(|m| m.iter().map(|r| r.iter().map(|p| p.eval(point)).collect()).collect())
            .collect()
    }
}

/// Constant nondegenerate symmetric metric `η^{ab}` with its inverse `η_{ab}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metric {
    upper: RationalMatrix,
    lower: RationalMatrix,
}

impl Metric {
    pub fn new(upper: RationalMatrix) -> Result<Self, Error> {
        if !upper.is_symmetric() {
            return Err(Error::AsymmetricMetric);
        }
        let lower = upper.inverse()?;
        Ok(Metric { upper, lower })
    }

    pub fn identity(n: usize) -> Self {
        Metric {
            upper: RationalMatrix::identity(n),
            lower: RationalMatrix::identity(n),
        }
    }

    /// Ones on the antidiagonal.
    pub fn antidiagonal(n: usize) -> Self {
        let m = RationalMatrix::from_fn(n, |i, j| {
            if i + j + 1 == n {
                crate::rational::one()
            } else {
                crate::rational::zero()
            }
        });
        Metric::new(m).expect("antidiagonal metric is nondegenerate")
    }

    /// `η^{ab}`
    pub fn upper(&self) -> &RationalMatrix {
        &self.upper
    }

    /// `η_{ab}`
    pub fn lower(&self) -> &RationalMatrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.upper.size()
    }
}

/// Prepotential `F` of the gradient reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prepotential {
    chart: Chart,
    f: Polynomial,
    metric: Metric,
}

impl Prepotential {
    pub fn new(chart: Chart, f: Polynomial, metric: Metric) -> Result<Self, Error> {
        if metric.dim() != chart.dim() || f.dim() != chart.dim() {
            return Err(Error::ComponentCount {
                expected: chart.dim(),
                got: metric.dim(),
            });
        }
        Ok(Prepotential { chart, f, metric })
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn potential(&self) -> &Polynomial {
        &self.f
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// All third derivatives `F_{,abc}`, indexed `[a][b][c]`.
    pub fn third_derivatives(&self) -> Vec<Vec<Vec<Polynomial>>> {
        third_derivatives(&self.f)
    }
}

pub(crate) fn third_derivatives(f: &Polynomial) -> Vec<Vec<Vec<Polynomial>>> {
    let n = f.dim();
    (0..n)
        .map(|a| {
            let fa = f.diff(a);
            (0..n)
                .map(|b| {
                    let fab = fa.diff(b);
                    (0..n).map(|c| fab.diff(c)).collect()
                })
                .collect()
        })
        .collect()
}

/// Tensor of polynomial residuals with a record of the first nonzero entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualTensor {
    shape: Vec<usize>,
    entries: Vec<Polynomial>,
    witness: Option<Vec<usize>>,
}

impl ResidualTensor {
    /// Build from a function of the multi-index, entries in row-major order.
    pub fn from_fn(shape: &[usize], mut f: impl FnMut(&[usize]) -> Polynomial) -> Self {
        let total: usize = shape.iter().product();
        let mut entries = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..total {
            entries.push(f(&idx));
            for d in (0..shape.len()).rev() {
                idx[d] += 1;
                if idx[d] < shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        Self::from_entries(shape.to_vec(), entries)
    }

    pub fn from_entries(shape: Vec<usize>, entries: Vec<Polynomial>) -> Self {
        assert_eq!(shape.iter().product::<usize>(), entries.len());
        let witness = entries
            .iter()
            .position(|p| !p.is_zero())
            .map(|flat| unflatten(&shape, flat));
        ResidualTensor {
            shape,
            entries,
            witness,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> &[Polynomial] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.witness.is_none()
    }

    /// Multi-index of the first nonzero entry.
    pub fn witness(&self) -> Option<&[usize]> {
        self.witness.as_deref()
    }

    pub fn witness_value(&self) -> Option<&Polynomial> {
        self.witness.as_ref().map(|w| self.get(w))
    }

    pub fn get(&self, index: &[usize]) -> &Polynomial {
        &self.entries[flatten(&self.shape, index)]
    }

    /// Number of nonzero entries.
    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|p| !p.is_zero()).count()
    }

    pub(crate) fn into_error(self) -> Result<(), Error> {
        match self.witness {
            None => Ok(()),
            Some(index) => {
                let value = self.entries[flatten(&self.shape, &index)].clone();
                Err(Error::NotASolution { index, value })
            }
        }
    }
}

fn flatten(shape: &[usize], index: &[usize]) -> usize {
    assert_eq!(shape.len(), index.len());
    index.iter().zip(shape).fold(0, |acc, (&i, &s)| {
        assert!(i < s);
        acc * s + i
    })
}

fn unflatten(shape: &[usize], mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for d in (0..shape.len()).rev() {
        idx[d] = flat % shape[d];
        flat /= shape[d];
    }
    idx
}

/// `c^a_{bc} = ∂²K^a/∂x^b∂x^c`.
pub fn connection_from_displacement(k: &DisplacementField) -> ConnectionField {
    let n = k.dim();
    let entries = (0..n)
        .map(|a| {
            let grad: Vec<Polynomial> = (0..n).map(|b| k.component(a).diff(b)).collect();
            (0..n).map(|b| (0..n).map(|c| grad[b].diff(c)).collect()).collect()
        })
        .collect();
    ConnectionField {
        chart: k.chart(),
        entries,
    }
}

/// Hessians `K^a_{,bc}` as a connection, shared by every residual below.
pub(crate) fn hessians(k: &DisplacementField) -> ConnectionField {
    connection_from_displacement(k)
}

/// Residual of the oriented associativity equations,
/// entry `(ν,α,β,γ) = K^ν_{,αρ}K^ρ_{,βγ} − K^ρ_{,αβ}K^ν_{,ργ}`.
///
/// Swapping `α` and `γ` negates an entry.
pub fn residual_oae(k: &DisplacementField) -> ResidualTensor {
    let c = hessians(k);
    associativity_residual(&c)
}

fn associativity_residual(c: &ConnectionField) -> ResidualTensor {
    let n = c.chart.dim();
    ResidualTensor::from_fn(&[n, n, n, n], |i| {
        let (nu, a, b, g) = (i[0], i[1], i[2], i[3]);
        let mut acc = Polynomial::zero(n);
        for r in 0..n {
            acc += c.get(nu, a, r) * c.get(r, b, g);
            acc -= c.get(r, a, b) * c.get(nu, r, g);
        }
        acc
    })
}

/// Associativity residual `c^ν_{αρ}c^ρ_{βγ} − c^ν_{ργ}c^ρ_{αβ}` and potentiality
/// residual `∂c^α_{βγ}/∂x^ρ − ∂c^α_{ργ}/∂x^β` (indexed `(α,β,γ,ρ)`).
pub fn residual_structure(c: &ConnectionField) -> (ResidualTensor, ResidualTensor) {
    let n = c.chart.dim();
    let assoc = associativity_residual(c);
    let potential = ResidualTensor::from_fn(&[n, n, n, n], |i| {
        let (a, b, g, r) = (i[0], i[1], i[2], i[3]);
        &c.get(a, b, g).diff(r) - &c.get(a, r, g).diff(b)
    });
    (assoc, potential)
}

/// `K^a = η^{ab}∂F/∂x^b`.
pub fn gradient_reduce(f: &Prepotential) -> DisplacementField {
    let n = f.chart.dim();
    let grad: Vec<Polynomial> = (0..n).map(|b| f.f.diff(b)).collect();
    let eta = f.metric.upper();
    let components = (0..n)
        .map(|a| {
            let mut acc = Polynomial::zero(n);
            for (b, g) in grad.iter().enumerate() {
                acc += g.scale(&eta[(a, b)]);
            }
            acc
        })
        .collect();
    DisplacementField {
        chart: f.chart,
        components,
    }
}

/// WDVV residual, entry `(α,β,ν,ρ) = F_{,αβδ}η^{δγ}F_{,γνρ} − F_{,ανδ}η^{δγ}F_{,γβρ}`.
///
/// Related to the oriented residual of the reduced field by
/// `residual_oae(K)(ν,α,β,γ) = −η^{νσ}·residual_wdvv(F)(α,β,σ,γ)`.
pub fn residual_wdvv(f: &Prepotential) -> ResidualTensor {
    let f3 = f.third_derivatives();
    wdvv_bilinear(&f3, &f3, f.metric.upper())
}

/// `A_{αβδ}η^{δγ}B_{γνρ} − A_{ανδ}η^{δγ}B_{γβρ}` for two symmetric 3-tensors.
pub(crate) fn wdvv_bilinear(
    a: &[Vec<Vec<Polynomial>>],
    b: &[Vec<Vec<Polynomial>>],
    eta: &RationalMatrix,
) -> ResidualTensor {
    let n = eta.size();
    // raised[α][β][γ] = A_{αβδ}η^{δγ}
    let raised: Vec<Vec<Vec<Polynomial>>> = (0..n)
        .map(|al| {
            (0..n)
                .map(|be| {
                    (0..n)
                        .map(|g| {
                            let mut acc = Polynomial::zero(a[al][be][0].dim());
                            for d in 0..n {
                                if !Zero::is_zero(&eta[(d, g)]) {
                                    acc += a[al][be][d].scale(&eta[(d, g)]);
                                }
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    ResidualTensor::from_fn(&[n, n, n, n], |i| {
        let (al, be, nu, rho) = (i[0], i[1], i[2], i[3]);
        let mut acc = Polynomial::zero(raised[0][0][0].dim());
        for g in 0..n {
            acc += &raised[al][be][g] * &b[g][nu][rho];
            acc -= &raised[al][nu][g] * &b[g][be][rho];
        }
        acc
    })
}

/// Fail with the first nonzero residual entry unless `K` solves the oriented equations.
pub fn require_solution(k: &DisplacementField) -> Result<(), Error> {
    residual_oae(k).into_error()
}

/// Fail with the first nonzero residual entry unless `F` solves WDVV.
pub fn require_wdvv_solution(f: &Prepotential) -> Result<(), Error> {
    residual_wdvv(f).into_error()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_polynomial;
    use crate::rational::{int, rat};

    fn field(n: usize, comps: &[&str]) -> DisplacementField {
        let chart = Chart::new(n).unwrap();
        DisplacementField::new(
            chart,
            comps.iter().map(|s| parse_polynomial(s, chart).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn linear_field_has_zero_connection_and_residual() {
        let k = field(3, &["x1 + 2*x2", "x3/2 - x1", "3*x2 + x3"]);
        assert_eq!(connection_from_displacement(&k), ConnectionField::zero(k.chart()));
        assert!(residual_oae(&k).is_zero());
    }

    #[test]
    fn quadratic_field_recovers_constant_structure() {
        // K^a = ½A^a_{bc}x^b x^c with e1 the identity and e2·e2 = 0.
        let k = field(2, &["x1^2/2", "x1*x2"]);
        let c = connection_from_displacement(&k);
        assert_eq!(*c.get(0, 0, 0), Polynomial::one(2));
        assert_eq!(*c.get(1, 0, 1), Polynomial::one(2));
        assert_eq!(*c.get(1, 1, 0), Polynomial::one(2));
        assert!(c.get(0, 1, 1).is_zero());
        assert!(residual_oae(&k).is_zero());
    }

    #[test]
    fn non_associative_quadratic_field_has_witness() {
        // e1·e1 = e2, e2·e2 = e1, e1·e2 = 0: (e1e1)e2 = e2e2 = e1 but e1(e1e2) = 0.
        let k = field(2, &["x2^2/2", "x1^2/2"]);
        let r = residual_oae(&k);
        assert!(!r.is_zero());
        assert!(r.witness_value().is_some());
        let (assoc, pot) = residual_structure(&connection_from_displacement(&k));
        assert!(!assoc.is_zero());
        assert!(pot.is_zero());
    }

    #[test]
    fn asymmetric_connection_rejected() {
        let chart = Chart::new(2).unwrap();
        let mut e = vec![vec![vec![Polynomial::zero(2); 2]; 2]; 2];
        e[0][0][1] = Polynomial::one(2);
        assert!(matches!(
            ConnectionField::new(chart, e),
            Err(Error::AsymmetricConnection { index: [0, 0, 1] })
        ));
    }

    #[test]
    fn diagonal_prepotential_reduces_componentwise() {
        let chart = Chart::new(3).unwrap();
        let f = parse_polynomial("x1^3/6 + x2^3/6 + x3^3/6", chart).unwrap();
        let pre = Prepotential::new(chart, f, Metric::identity(3)).unwrap();
        let k = gradient_reduce(&pre);
        for a in 0..3 {
            let x = Polynomial::var(3, a);
            assert_eq!(*k.component(a), (&x * &x).scale(&rat(1, 2)));
        }
        assert!(residual_wdvv(&pre).is_zero());
    }

    #[test]
    fn wdvv_counterexample() {
        let chart = Chart::new(3).unwrap();
        let f = parse_polynomial("x1*x2*x3 + x1^3", chart).unwrap();
        let pre = Prepotential::new(chart, f, Metric::identity(3)).unwrap();
        let r = residual_wdvv(&pre);
        assert_eq!(r.witness(), Some(&[0, 0, 1, 1][..]));
        assert_eq!(*r.witness_value().unwrap(), Polynomial::constant(3, int(-1)));
    }

    #[test]
    fn metric_inverse() {
        let m = Metric::antidiagonal(3);
        assert!((m.upper() * m.lower()).is_identity());
        let bad = RationalMatrix::from_rows(vec![vec![int(1), int(2)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(Metric::new(bad), Err(Error::AsymmetricMetric));
    }
}
