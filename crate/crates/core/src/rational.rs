//! Exact rational scalars, vectors, and dense matrices.
//!
//! Every quantity in this crate is an arbitrary-precision rational; there is
//! no floating point anywhere. Comparisons are exact, which is what makes the
//! open-endpoint logic in [`crate::domains`] sound.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational scalar.
pub type Rational = num_rational::BigRational;

/// Point or value in Q^k, ordered lexicographically (usable as a map key).
pub type QVector = Vec<Rational>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarError {
    #[error("`{0}` is not an exact rational; write integers or `p/q` (decimals are rejected)")]
    NotRational(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

/// Parse an exact rational from `p/q` or integer form.
///
/// Decimal literals like `0.25` are deliberately rejected: the external
/// formats promise exactness end to end, so `1/4` must be spelled as such.
pub fn parse_rational(text: &str) -> Result<Rational, ScalarError> {
    let s = text.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let n = BigInt::from_str(num.trim())
                .map_err(|_| ScalarError::NotRational(text.to_string()))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|_| ScalarError::NotRational(text.to_string()))?;
            if d.is_zero() {
                return Err(ScalarError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n = BigInt::from_str(s).map_err(|_| ScalarError::NotRational(text.to_string()))?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> QVector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> QVector {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Rational, a: &[Rational]) -> QVector {
    a.iter().map(|x| c * x).collect()
}

pub fn vec_zero(len: usize) -> QVector {
    vec![Rational::zero(); len]
}

pub fn vec_is_zero(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Dense h×k rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: Vec<QVector>,
}

impl QMatrix {
    /// Build from rows; every row must have the same length and there must be
    /// at least one row and one column.
    pub fn from_rows(rows: Vec<QVector>) -> Result<Self, String> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err("matrix must have at least one row and one column".into());
        }
        let width = rows[0].len();
        if rows.iter().any(|r| r.len() != width) {
            return Err("matrix rows have inconsistent lengths".into());
        }
        Ok(Self { rows })
    }

    pub fn zero(height: usize, width: usize) -> Self {
        Self {
            rows: vec![vec_zero(width); height],
        }
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[QVector] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| vec_is_zero(r))
    }

    /// Matrix-vector product; `x.len()` must equal the width.
    pub fn mul_vec(&self, x: &[Rational]) -> QVector {
        debug_assert_eq!(x.len(), self.width());
        self.rows
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            rows: self.rows.iter().map(|r| vec_scale(c, r)).collect(),
        }
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> QVector {
        self.rows.iter().map(|r| r[j].clone()).collect()
    }

    /// Build from columns (each of equal length).
    pub fn from_columns(cols: Vec<QVector>) -> Result<Self, String> {
        if cols.is_empty() || cols[0].is_empty() {
            return Err("matrix must have at least one row and one column".into());
        }
        let height = cols[0].len();
        if cols.iter().any(|c| c.len() != height) {
            return Err("matrix columns have inconsistent lengths".into());
        }
        let rows = (0..height)
            .map(|i| cols.iter().map(|c| c[i].clone()).collect())
            .collect();
        Ok(Self { rows })
    }

    /// Rank via exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<QVector> = self.rows.clone();
        let (h, w) = (self.height(), self.width());
        let mut rank = 0;
        let mut col = 0;
        while rank < h && col < w {
            match (rank..h).find(|&r| !m[r][col].is_zero()) {
                None => col += 1,
                Some(pivot_row) => {
                    m.swap(rank, pivot_row);
                    let pivot = m[rank][col].clone();
                    for j in col..w {
                        m[rank][j] = &m[rank][j] / &pivot;
                    }
                    for r in 0..h {
                        if r != rank && !m[r][col].is_zero() {
                            let factor = m[r][col].clone();
                            for j in col..w {
                                let delta = &factor * &m[rank][j];
                                m[r][j] = &m[r][j] - delta;
                            }
                        }
                    }
                    rank += 1;
                    col += 1;
                }
            }
        }
        rank
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Sum of the positive entries and sum of the negative entries.
pub fn sign_split_sums(values: &[Rational]) -> (Rational, Rational) {
    let mut pos = Rational::zero();
    let mut neg = Rational::zero();
    for v in values {
        if v.is_positive() {
            pos += v;
        } else {
            neg += v;
        }
    }
    (pos, neg)
}

pub fn abs_sum(values: &[Rational]) -> Rational {
    values.iter().map(|v| v.abs()).sum()
}

pub fn format_point(p: &[Rational]) -> String {
    let inner: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-1/5").unwrap(), ratio(-1, 5));
        assert_eq!(parse_rational("7").unwrap(), rat(7));
        assert_eq!(parse_rational(" 2 / 6 ").unwrap(), ratio(1, 3));
    }

    #[test]
    fn parse_rejects_decimals_and_zero_denominators() {
        assert!(matches!(
            parse_rational("0.25"),
            Err(ScalarError::NotRational(_))
        ));
        assert!(matches!(
            parse_rational("1e-3"),
            Err(ScalarError::NotRational(_))
        ));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ScalarError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(ratio(2, 6).to_string(), "1/3");
        assert_eq!(ratio(-4, 2).to_string(), "-2");
        assert_eq!(parse_rational("14/-4").unwrap().to_string(), "-7/2");
    }

    #[test]
    fn matvec_and_rank() {
        let m = QMatrix::from_rows(vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]]).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(m.mul_vec(&[rat(1), rat(1)]), vec![rat(3), rat(6)]);

        let id = QMatrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]).unwrap();
        assert_eq!(id.rank(), 2);
    }

    #[test]
    fn sign_split() {
        let (p, n) = sign_split_sums(&[ratio(1, 4), ratio(-1, 5)]);
        assert_eq!(p, ratio(1, 4));
        assert_eq!(n, ratio(-1, 5));
    }
}
