//! Scalar backends and a small dense matrix.
//!
//! Games are generic over [`Scalar`], implemented for `f64` (simulation) and
//! [`Rational`] (exact state identity and exact solving). Rational values
//! convert to floats freely; the reverse direction only exists as an explicit
//! rounding onto a declared denominator ([`rationalize`]).

use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic is exact.
    const EXACT: bool;

    /// Tolerance used for invariant checks (antisymmetry, unit sums).
    const CHECK_TOL: f64;

    /// Largest strategy count accepted by the support-enumeration solver.
    const SOLVER_MAX_STRATEGIES: usize;

    fn to_f64(&self) -> f64;

    fn from_i64(v: i64) -> Self;

    /// `self > tol`, compared exactly when the backend is exact and `tol == 0`.
    fn exceeds(&self, tol: f64) -> bool {
        if Self::EXACT && tol == 0.0 {
            *self > Self::zero()
        } else {
            self.to_f64() > tol
        }
    }

    /// Magnitude is within `tol`; exact zero test for exact backends at `tol == 0`.
    fn negligible(&self, tol: f64) -> bool {
        !self.abs().exceeds(tol)
    }

    /// Pivot threshold for Gaussian elimination.
    fn is_singular_pivot(&self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const CHECK_TOL: f64 = 1e-12;
    const SOLVER_MAX_STRATEGIES: usize = 10;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn is_singular_pivot(&self) -> bool {
        self.abs() < 1e-12
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const CHECK_TOL: f64 = 0.0;
    const SOLVER_MAX_STRATEGIES: usize = 6;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn is_singular_pivot(&self) -> bool {
        self.is_zero()
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Data(format!("invalid rational literal {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Rounds `v` to the nearest multiple of `1/denominator`.
pub fn rationalize(v: f64, denominator: u64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("cannot rationalize {v}")));
    }
    if denominator == 0 {
        return Err(Error::Config(
            "rationalization denominator must be positive".into(),
        ));
    }
    let scaled = (v * denominator as f64).round();
    let numer = BigInt::from(scaled as i128);
    Ok(Rational::new(numer, BigInt::from(denominator)))
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged matrix rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = &T> + '_ {
        (0..self.rows).map(move |r| self.get(r, c))
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    /// Adds `c` to every entry.
    pub fn shifted(&self, c: &T) -> Self {
        self.map(|v| v.clone() + c.clone())
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// `v^T * self`.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        debug_assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|c| {
                self.column(c)
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(Scalar::to_f64)
    }
}

impl Matrix<f64> {
    pub fn rationalize(&self, denominator: u64) -> Result<Matrix<Rational>> {
        let data = self
            .data
            .iter()
            .map(|&v| rationalize(v, denominator))
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. Returns `None` when the system is singular.
pub fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].is_singular_pivot() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = a[row][col].clone() / a[col][col].clone();
            let (top, bottom) = a.split_at_mut(row);
            for (target, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *target = target.clone() - factor.clone() * p.clone();
            }
            let delta = factor * b[col].clone();
            b[row] = b[row].clone() - delta;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn rational_literals() {
        assert_eq!(q("2/4"), q("1/2"));
        assert_eq!(format_rational(&q("-6/4")), "-3/2");
        assert_eq!(format_rational(&q("3")), "3");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn rationalize_rounds_to_grid() {
        assert_eq!(rationalize(0.333, 3).unwrap(), q("1/3"));
        assert_eq!(rationalize(-0.26, 4).unwrap(), q("-1/4"));
        assert!(rationalize(f64::NAN, 3).is_err());
    }

    #[test]
    fn exact_solve() {
        let a = vec![vec![q("2"), q("1")], vec![q("1"), q("3")]];
        let x = solve_linear(a, vec![q("3"), q("5")]).unwrap();
        assert_eq!(x, vec![q("4/5"), q("7/5")]);
        let singular = vec![vec![q("1"), q("2")], vec![q("2"), q("4")]];
        assert!(solve_linear(singular, vec![q("1"), q("1")]).is_none());
    }

    #[test]
    fn float_solve_and_products() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(m.vec_mul(&[1.0, 1.0]), vec![4.0, 6.0]);
        assert_eq!(m.transpose().row(0), &[1.0, 3.0]);
        let x = solve_linear(m.to_rows(), vec![5.0, 11.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exceeds_is_exact_for_rationals() {
        let tiny = Rational::new(BigInt::from(1), BigInt::from(10).pow(400));
        assert!(tiny.exceeds(0.0));
        assert!(!(-tiny).exceeds(0.0));
        assert!(!1e-13f64.exceeds(1e-12));
    }
}
