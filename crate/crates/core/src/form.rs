//! Antisymmetric matrices over the rationals.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::words::IntVector;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("matrix is not antisymmetric at ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid rational {0:?}")]
    BadRational(String),
}

/// Parses `"p/q"` or an integer string.
pub fn parse_rational(s: &str) -> Result<Rational, FormError> {
    let t = s.trim();
    let bad = || FormError::BadRational(String::from(s));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(n))
    }
}

/// Prints `p/q` in lowest terms, or `p` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    use alloc::string::ToString;
    r.to_string()
}

/// An alternating bilinear form on `Q^m`, stored as a dense antisymmetric
/// `m x m` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AltForm {
    rank: usize,
    entries: Vec<Rational>,
}

impl AltForm {
    pub fn zero(rank: usize) -> Self {
        AltForm { rank, entries: vec![Rational::zero(); rank * rank] }
    }

    /// The elementary form `e_i ^ e_j` (0-based, `i != j`).
    pub fn unit(rank: usize, i: usize, j: usize) -> Self {
        let mut f = Self::zero(rank);
        f.set(i, j, Rational::one());
        f
    }

    /// Standard symplectic block `[[0, 1], [-1, 0]]`.
    pub fn standard_symplectic() -> Self {
        Self::unit(2, 0, 1)
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, FormError> {
        let rank = rows.len();
        let mut entries = Vec::with_capacity(rank * rank);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != rank {
                return Err(FormError::NotSquare { row, len: r.len(), expected: rank });
            }
            entries.extend(r);
        }
        let f = AltForm { rank, entries };
        for i in 0..rank {
            for j in i..rank {
                if *f.get(i, j) != -f.get(j, i) {
                    return Err(FormError::NotAntisymmetric { i, j });
                }
            }
        }
        Ok(f)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self, FormError> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    /// Builds the form from its strict upper triangle.
    pub fn from_upper<F: FnMut(usize, usize) -> Rational>(rank: usize, mut f: F) -> Self {
        let mut out = Self::zero(rank);
        for i in 0..rank {
            for j in i + 1..rank {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.rank + j]
    }

    /// Sets entry `(i, j)` and its mirror `(j, i)`. Diagonal writes are ignored.
    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        if i == j {
            return;
        }
        self.entries[j * self.rank + i] = -value.clone();
        self.entries[i * self.rank + j] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.entries.chunks(self.rank.max(1)).take(self.rank)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// `u^T B v`.
    pub fn pair(&self, u: &[Rational], v: &[Rational]) -> Result<Rational, FormError> {
        for x in [u, v] {
            if x.len() != self.rank {
                return Err(FormError::DimensionMismatch { expected: self.rank, found: x.len() });
            }
        }
        let mut acc = Rational::zero();
        for (i, ui) in u.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let mut row = Rational::zero();
            for (j, vj) in v.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                row += self.get(i, j) * vj;
            }
            acc += ui * row;
        }
        Ok(acc)
    }

    pub fn pair_int(&self, u: &IntVector, v: &IntVector) -> Result<Rational, FormError> {
        let to_q = |x: &IntVector| x.entries().iter().map(|&e| rat(e)).collect::<Vec<_>>();
        self.pair(&to_q(u), &to_q(v))
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        AltForm { rank: self.rank, entries: self.entries.iter().map(|e| e * c).collect() }
    }

    pub fn checked_add(&self, other: &AltForm) -> Result<Self, FormError> {
        self.same_rank(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(AltForm { rank: self.rank, entries })
    }

    pub fn checked_sub(&self, other: &AltForm) -> Result<Self, FormError> {
        self.same_rank(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(AltForm { rank: self.rank, entries })
    }

    fn same_rank(&self, other: &AltForm) -> Result<(), FormError> {
        if self.rank != other.rank {
            return Err(FormError::DimensionMismatch { expected: self.rank, found: other.rank });
        }
        Ok(())
    }

    /// Block-diagonal sum of `blocks` in order.
    pub fn block_diag(blocks: &[AltForm]) -> Self {
        let rank = blocks.iter().map(AltForm::rank).sum();
        let mut out = Self::zero(rank);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.rank {
                for j in i + 1..b.rank {
                    out.set(off + i, off + j, b.get(i, j).clone());
                }
            }
            off += b.rank;
        }
        out
    }

    /// The principal submatrix on `start..start + len`.
    pub fn block(&self, start: usize, len: usize) -> Self {
        Self::from_upper(len, |i, j| self.get(start + i, start + j).clone())
    }

    /// Pullback `P^T B P` along the coordinate permutation `e_i -> e_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, FormError> {
        if perm.len() != self.rank {
            return Err(FormError::DimensionMismatch { expected: self.rank, found: perm.len() });
        }
        Ok(Self::from_upper(self.rank, |i, j| self.get(perm[i], perm[j]).clone()))
    }

    /// Largest absolute entry, zero for the empty form.
    pub fn max_abs(&self) -> Rational {
        self.entries.iter().map(|e| if *e < Rational::zero() { -e } else { e.clone() }).fold(
            Rational::zero(),
            |a, b| if b > a { b } else { a },
        )
    }
}

impl fmt::Display for AltForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            f.write_str("[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), rat(-4));
        assert_eq!(parse_rational(" 7 / -2 ").unwrap(), ratio(-7, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(5)), "5");
    }

    #[test]
    fn antisymmetry_validated() {
        assert!(AltForm::from_int_rows(&[&[0, 1], &[-1, 0]]).is_ok());
        assert_eq!(
            AltForm::from_int_rows(&[&[0, 1], &[1, 0]]),
            Err(FormError::NotAntisymmetric { i: 0, j: 1 })
        );
        assert_eq!(
            AltForm::from_int_rows(&[&[1, 0], &[0, 0]]),
            Err(FormError::NotAntisymmetric { i: 0, j: 0 })
        );
        assert!(matches!(
            AltForm::from_int_rows(&[&[0, 1], &[-1]]),
            Err(FormError::NotSquare { row: 1, .. })
        ));
    }

    #[test]
    fn pairing_and_blocks() {
        let j = AltForm::standard_symplectic();
        let jj = AltForm::block_diag(&[j.clone(), j.scaled(&rat(3))]);
        assert_eq!(jj.rank(), 4);
        assert_eq!(*jj.get(2, 3), rat(3));
        assert_eq!(*jj.get(3, 2), rat(-3));
        assert_eq!(*jj.get(0, 2), rat(0));
        let u = [rat(1), rat(0), rat(2), rat(0)];
        let v = [rat(0), rat(1), rat(0), rat(1)];
        assert_eq!(jj.pair(&u, &v).unwrap(), rat(1 + 6));
        assert_eq!(jj.pair(&u, &u).unwrap(), rat(0));
        assert!(jj.pair(&u[..2], &v).is_err());
        assert_eq!(jj.block(2, 2), j.scaled(&rat(3)));
        assert_eq!(AltForm::block_diag(&[]).rank(), 0);
    }

    #[test]
    fn permutation_pullback() {
        let b = AltForm::unit(3, 0, 2);
        let p = b.permuted(&[2, 1, 0]).unwrap();
        assert_eq!(*p.get(0, 2), rat(-1));
    }
}
