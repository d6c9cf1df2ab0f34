//! Square rational matrices with fraction-free inversion.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(n: usize) -> Self {
        RationalMatrix {
            n,
            entries: vec![rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, Error> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(RationalMatrix { n, entries })
    }

    /// Row-major entries; the length must be a perfect square.
    pub fn from_row_major(entries: Vec<Rational>) -> Result<Self, Error> {
        let n = (0..=entries.len()).find(|k| k * k >= entries.len()).unwrap_or(0);
        if n * n != entries.len() {
            return Err(Error::NotSquare {
                rows: entries.len(),
                cols: 1,
            });
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row_major(&self) -> &[Rational] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> Rational {
        let (scale, mut a) = self.integer_rows();
        let n = self.n;
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return rational::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = exact_div(&v, &prev);
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det = if n == 0 { BigInt::one() } else { prev };
        Rational::new(sign * det, scale)
    }

    /// Exact inverse via fraction-free (Bareiss) Gauss–Jordan elimination.
    ///
    /// Rows are first cleared of denominators, so all elimination steps run
    /// on integers with exact divisions by the previous pivot.
    pub fn inverse(&self) -> Result<Self, Error> {
        let n = self.n;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut row_scale = Vec::with_capacity(n);
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let l = (0..n).fold(BigInt::one(), |acc, j| acc.lcm(self[(i, j)].denom()));
            let mut row: Vec<BigInt> = (0..n)
                .map(|j| (&self[(i, j)] * Rational::from_integer(l.clone())).to_integer())
                .collect();
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            a.push(row);
            row_scale.push(l);
        }
        let mut prev = BigInt::one();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
            a.swap(p, k);
            for i in 0..n {
                if i == k {
                    continue;
                }
                for j in 0..2 * n {
                    if j == k {
                        continue;
                    }
                    let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                    a[i][j] = exact_div(&v, &prev);
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        // Left block is now prev·I, right block is prev·B⁻¹ with B = diag(scale)·M.
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = Rational::new(&a[i][n + j] * &row_scale[j], prev.clone());
            }
        }
        Ok(inv)
    }

    fn integer_rows(&self) -> (BigInt, Vec<Vec<BigInt>>) {
        let n = self.n;
        let mut scale = BigInt::one();
        let rows = (0..n)
            .map(|i| {
                let l = (0..n).fold(BigInt::one(), |acc, j| acc.lcm(self[(i, j)].denom()));
                scale *= &l;
                (0..n)
                    .map(|j| (&self[(i, j)] * Rational::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        (scale, rows)
    }
}

fn exact_div(v: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = v.div_rem(d);
    debug_assert!(r.is_zero(), "Bareiss step not exact");
    q
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.entries[i * self.n + j]
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, rhs: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, rhs.n);
        RationalMatrix::from_fn(self.n, |i, j| {
            (0..self.n).fold(rational::zero(), |acc, k| acc + &self[(i, k)] * &rhs[(k, j)])
        })
    }
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// `invert_matrix` in operation form.
pub fn invert_matrix(m: &RationalMatrix) -> Result<RationalMatrix, Error> {
    m.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_inverts_to_itself() {
        for n in 1..5 {
            assert!(RationalMatrix::identity(n).inverse().unwrap().is_identity());
        }
    }

    #[test]
    fn two_by_two() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(&[&[1, -1], &[-1, 2]]));
        assert!((&a * &inv).is_identity());
        assert_eq!(a.determinant(), int(1));
    }

    #[test]
    fn rank_one_is_singular() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.inverse(), Err(Error::Singular));
        assert_eq!(a.determinant(), int(0));
    }

    #[test]
    fn needs_pivoting_and_fractions() {
        let a = RationalMatrix::from_rows(alloc::vec![
            alloc::vec![int(0), rat(1, 2), int(3)],
            alloc::vec![rat(2, 3), int(0), int(-1)],
            alloc::vec![int(1), int(1), rat(1, 5)],
        ])
        .unwrap();
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!((&inv * &a).is_identity());
        assert_eq!(a.determinant() * inv.determinant(), int(1));
    }

    #[test]
    fn non_square_rejected() {
        assert!(RationalMatrix::from_rows(alloc::vec![alloc::vec![int(1), int(2)]]).is_err());
        assert!(RationalMatrix::from_row_major(alloc::vec![int(1), int(2)]).is_err());
    }
}
