//! Truncated power series with exact rational coefficients.

use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{factorial, SequenceCache};

/// `Σ_{i=0}^{order} c_i z^i`, with all arithmetic truncated at `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSeries {
    coefficients: Vec<BigRational>,
}

impl RationalSeries {
    pub fn zero(order: usize) -> Self {
        RationalSeries {
            coefficients: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coefficients[0] = BigRational::one();
        s
    }

    /// Builds a series from its leading coefficients, padding with zeros
    /// (or dropping terms) to reach `order`.
    pub fn from_coefficients(mut coefficients: Vec<BigRational>, order: usize) -> Self {
        coefficients.resize(order + 1, BigRational::zero());
        RationalSeries { coefficients }
    }

    pub fn truncation_order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `[z^i]`; zero above the truncation order.
    pub fn coefficient(&self, i: usize) -> BigRational {
        self.coefficients
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Lowest index with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coefficients.iter().position(|c| !c.is_zero())
    }

    fn combined_order(&self, other: &Self) -> usize {
        self.truncation_order().min(other.truncation_order())
    }
}

impl Add for &RationalSeries {
    type Output = RationalSeries;

    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.combined_order(rhs);
        let coefficients = (0..=order)
            .map(|i| &self.coefficients[i] + &rhs.coefficients[i])
            .collect();
        RationalSeries { coefficients }
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;

    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        let order = self.combined_order(rhs);
        let mut out = RationalSeries::zero(order);
        for (i, a) in self.coefficients[..=order].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coefficients[..=order - i].iter().enumerate() {
                if !b.is_zero() {
                    out.coefficients[i + j] += a * b;
                }
            }
        }
        out
    }
}

/// `Σ_j u(j) z^{2j+1} / (2j+1)!` truncated at `truncation_order`.
pub fn theta_series(truncation_order: usize, cache: &mut SequenceCache) -> Result<RationalSeries> {
    if truncation_order == 0 {
        return Err(Error::Domain("truncation order must be at least 1".into()));
    }
    let max_j = (truncation_order - 1) / 2;
    cache.ensure_u(max_j);
    let mut series = RationalSeries::zero(truncation_order);
    for j in 0..=max_j {
        let power = 2 * j + 1;
        series.coefficients[power] =
            BigRational::new(cache.u(j).clone(), factorial(power as u64));
    }
    Ok(series)
}

/// `s(n,k)` for `1 ≤ k ≤ n ≤ max_n` straight from the rational series,
/// building `f^{2k}` as `f^{2k-2} · f²` once per `k` and reading off every
/// row from it. Returns rows indexed like the cache: `rows[n-1][k-1]`.
pub fn s_table_by_rational_series(
    max_n: usize,
    cache: &mut SequenceCache,
) -> Result<Vec<Vec<BigInt>>> {
    let mut rows: Vec<Vec<BigInt>> = (1..=max_n).map(|n| Vec::with_capacity(n)).collect();
    if max_n == 0 {
        return Ok(rows);
    }
    let order = 2 * max_n;
    let f = theta_series(order, cache)?;
    let f_squared = &f * &f;
    let mut power = f_squared.clone();
    for k in 1..=max_n {
        let scale = factorial(2 * k as u64);
        for n in k..=max_n {
            let value = power.coefficient(2 * n) * BigRational::from_integer(factorial(2 * n as u64))
                / BigRational::from_integer(scale.clone());
            if !value.is_integer() {
                return Err(Error::Integrity(format!(
                    "s({n},{k}) = {value} is not an integer"
                )));
            }
            rows[n - 1].push(value.to_integer());
        }
        if k < max_n {
            power = &power * &f_squared;
        }
    }
    Ok(rows)
}
