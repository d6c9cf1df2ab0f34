use oae_core::homotopy::{check_closed, gradient, homotopy_integrate_oneform, integrate_hessian};
use oae_core::rational::rat;
use oae_core::{parse_polynomial, Chart, Error, Monomial, Polynomial, Rational, RationalMatrix};
use proptest::prelude::*;

const DIM: usize = 3;

fn rational() -> impl Strategy<Value = Rational> {
    (-7i64..=7, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::array::uniform3(0u16..4), rational()), 0..7).prop_map(|terms| {
        Polynomial::from_terms(DIM, terms.into_iter().map(|(e, c)| (Monomial::from_x_exponents(&e), c)))
    })
}

fn matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(rational(), n * n)
            .prop_map(|v| RationalMatrix::from_row_major(v).expect("square by construction"))
    })
}

fn without_low_degree(p: &Polynomial, below: u32) -> Polynomial {
    Polynomial::from_terms(
        p.dim(),
        p.terms()
            .filter(|(m, _)| m.x_degree() >= below)
            .map(|(m, c)| (*m, c.clone())),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn ring_axioms(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &Polynomial::one(DIM), p.clone());
    }

    #[test]
    fn leibniz_rule(p in polynomial(), q in polynomial(), i in 0..DIM) {
        prop_assert_eq!((&p * &q).diff(i), &(&p.diff(i) * &q) + &(&p * &q.diff(i)));
    }

    #[test]
    fn mixed_partials_commute(p in polynomial(), i in 0..DIM, j in 0..DIM) {
        prop_assert_eq!(p.diff(i).diff(j), p.diff(j).diff(i));
    }

    #[test]
    fn homotopy_round_trip(p in polynomial()) {
        let omega = gradient(&p);
        prop_assert!(check_closed(&omega).is_ok());
        let back = homotopy_integrate_oneform(&omega).unwrap();
        prop_assert_eq!(back, without_low_degree(&p, 1));
        let hess: Vec<Vec<Polynomial>> = omega.iter().map(gradient).collect();
        prop_assert_eq!(integrate_hessian(&hess).unwrap(), without_low_degree(&p, 2));
    }

    #[test]
    fn non_closed_forms_are_rejected(p in polynomial(), c in rational()) {
        prop_assume!(c != rat(0, 1));
        let mut omega = gradient(&p);
        omega[0] += Polynomial::var(DIM, 1).scale(&c);
        let err = homotopy_integrate_oneform(&omega).unwrap_err();
        prop_assert!(!err.difference.is_zero());
    }

    #[test]
    fn parser_round_trip(p in polynomial()) {
        let chart = Chart::new(DIM).unwrap();
        prop_assert_eq!(parse_polynomial(&p.to_string(), chart).unwrap(), p);
    }

    #[test]
    fn matrix_inverse(m in matrix()) {
        let n = m.size();
        match m.inverse() {
            Ok(inv) => {
                prop_assert!(m.determinant() != rat(0, 1));
                prop_assert!((&m * &inv).is_identity());
                prop_assert!((&inv * &m).is_identity());
            }
            Err(e) => {
                prop_assert_eq!(e, Error::Singular);
                prop_assert_eq!(m.determinant(), rat(0, 1));
                prop_assert!(n > 0);
            }
        }
    }
}

#[test]
fn singular_matrices_are_reported() {
    let m = RationalMatrix::from_rows(vec![vec![rat(1, 2), rat(1, 1)], vec![rat(1, 1), rat(2, 1)]]).unwrap();
    assert_eq!(m.inverse(), Err(Error::Singular));
}
