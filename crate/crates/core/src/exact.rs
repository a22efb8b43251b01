//! Exact recurrences for `u(n)`, `v(n)`, `s(n,k)`, `r(n,k)` and `d(n)`.
//!
//! All sequences live in a [`SequenceCache`]: append-only dense arrays of
//! arbitrary-precision integers indexed from 0 (from 1 for the triangular
//! `s` table). Every division performed along the way is checked for
//! exactness and reported as [`Error::Integrity`] otherwise.
//!
//! The `s` table is produced from the series `f(z) = Σ u(j) z^{2j+1}/(2j+1)!`
//! by building `f^{2k}` as `f^{2k-2} · f²`. Working with exponential
//! (factorial-scaled) coefficients, the product collapses to an integer
//! convolution:
//!
//! ```text
//! s(n,1) = ½ Σ_{j=0}^{n-1} C(2n, 2j+1) u(j) u(n-1-j)
//! s(n,k) = Σ_{i=k-1}^{n-1} C(2n, 2i) s(i,k-1) s(n-i,1) / (k(2k-1))
//! ```
//!
//! Row `n` only depends on rows `< n` and on `u(0..n)`, so the table grows
//! one row at a time. The rational-coefficient route in
//! [`crate::series::s_table_by_rational_series`] is the reference this
//! path is tested against.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Which arithmetic progression of odd numbers to multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OddProgression {
    /// `1 · 5 · 9 ⋯ (4n-3)`
    OneModFour,
    /// `3 · 7 · 11 ⋯ (4n-1)`
    ThreeModFour,
}

impl OddProgression {
    pub fn from_offset(offset: u32) -> Result<Self> {
        match offset {
            1 => Ok(OddProgression::OneModFour),
            3 => Ok(OddProgression::ThreeModFour),
            other => Err(Error::Domain(format!(
                "progression offset must be 1 or 3, got {other}"
            ))),
        }
    }

    fn offset(self) -> u64 {
        match self {
            OddProgression::OneModFour => 1,
            OddProgression::ThreeModFour => 3,
        }
    }
}

/// Square of the product of the first `n` terms of the progression
/// `offset, offset+4, offset+8, …`. The empty product (`n = 0`) is 1.
pub fn odd_product_squared(n: usize, progression: OddProgression) -> BigInt {
    let product: BigInt = (0..n as u64)
        .map(|i| BigInt::from(progression.offset() + 4 * i))
        .product();
    &product * &product
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).map(BigInt::from).product()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// The full row `C(n, 0), …, C(n, n)`.
pub fn binomial_row(n: u64) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for i in 0..n {
        c *= n - i;
        c /= i + 1;
        row.push(c.clone());
    }
    row
}

/// Divides `numerator` by `denominator`, failing if the remainder is nonzero.
pub fn exact_div(numerator: &BigInt, denominator: &BigInt, context: &str) -> Result<BigInt> {
    let (q, r) = numerator.div_rem(denominator);
    if !r.is_zero() {
        return Err(Error::Integrity(format!(
            "{context}: {denominator} does not divide {numerator}"
        )));
    }
    Ok(q)
}

/// Memoized exact values of `u`, `v`, `d` and the triangular `s` table.
///
/// The cache is single-writer: the `compute_*`/`ensure*` methods extend it,
/// the plain accessors only read. Once built to a bound it can be shared
/// immutably between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceCache {
    u: Vec<BigInt>,
    v: Vec<BigInt>,
    d: Vec<BigInt>,
    /// `s[n-1][k-1] = s(n,k)` for `1 ≤ k ≤ n`.
    s: Vec<Vec<BigInt>>,
}

impl Default for SequenceCache {
    fn default() -> Self {
        Self::new()
    }
}

impl SequenceCache {
    pub fn new() -> Self {
        SequenceCache {
            u: vec![BigInt::one()],
            v: vec![BigInt::one()],
            d: vec![BigInt::one()],
            s: Vec::new(),
        }
    }

    /// A cache with every sequence computed through index `bound`.
    pub fn with_bound(bound: usize) -> Result<Self> {
        let mut cache = Self::new();
        cache.ensure(bound)?;
        Ok(cache)
    }

    /// Rebuilds a cache from previously stored prefixes, validating the
    /// structural invariants. Values are trusted otherwise.
    pub fn from_parts(
        u: Vec<BigInt>,
        v: Vec<BigInt>,
        d: Vec<BigInt>,
        s: Vec<Vec<BigInt>>,
    ) -> Result<Self> {
        for (name, seq) in [("u", &u), ("v", &v), ("d", &d)] {
            match seq.first() {
                Some(x) if x.is_one() => {}
                _ => {
                    return Err(Error::Integrity(format!(
                        "{name}(0) must be 1 in a stored sequence"
                    )))
                }
            }
        }
        if let Some(n) = d.iter().position(|x| x.is_even()) {
            return Err(Error::Integrity(format!("stored d({n}) is even")));
        }
        for (i, row) in s.iter().enumerate() {
            let n = i + 1;
            if row.len() != n {
                return Err(Error::Integrity(format!(
                    "stored s row {n} has {} entries",
                    row.len()
                )));
            }
            if !row[n - 1].is_one() {
                return Err(Error::Integrity(format!("stored s({n},{n}) != 1")));
            }
        }
        Ok(SequenceCache { u, v, d, s })
    }

    /// Largest `N` with `u`, `v`, `d` and the `s` rows all available on `0..=N`.
    pub fn bound(&self) -> usize {
        let seqs = self.u.len().min(self.v.len()).min(self.d.len()) - 1;
        seqs.min(self.s.len())
    }

    /// Extends every sequence through index `bound`.
    pub fn ensure(&mut self, bound: usize) -> Result<()> {
        self.ensure_u(bound);
        self.ensure_v(bound)?;
        self.ensure_s(bound)?;
        self.ensure_d(bound)
    }

    pub fn ensure_u(&mut self, n: usize) {
        if n < self.u.len() {
            return;
        }
        let start = self.u.len();
        let p1_sq: Vec<BigInt> = (0..=n)
            .map(|m| odd_product_squared(m, OddProgression::OneModFour))
            .collect();
        for m in start..=n {
            let value = self.next_u(m, &p1_sq);
            self.u.push(value);
        }
    }

    fn next_u(&self, n: usize, p1_sq: &[BigInt]) -> BigInt {
        let binom = binomial_row(2 * n as u64 + 1);
        let sum: BigInt = (0..n)
            .map(|m| &binom[2 * m + 1] * &p1_sq[n - m] * &self.u[m])
            .sum();
        odd_product_squared(n, OddProgression::ThreeModFour) - sum
    }

    pub fn ensure_v(&mut self, n: usize) -> Result<()> {
        while self.v.len() <= n {
            let m = self.v.len();
            let value = self.next_v(m)?;
            self.v.push(value);
        }
        Ok(())
    }

    fn next_v(&self, n: usize) -> Result<BigInt> {
        let binom = binomial_row(2 * n as u64);
        let sum: BigInt = (1..n)
            .map(|m| &binom[2 * m] * &self.v[m] * &self.v[n - m])
            .sum();
        if sum.is_odd() {
            return Err(Error::Integrity(format!(
                "v({n}): convolution sum {sum} is odd and cannot be halved"
            )));
        }
        let leading = odd_product_squared(n, OddProgression::OneModFour) << (n - 1);
        Ok(leading - (sum >> 1))
    }

    pub fn ensure_s(&mut self, n: usize) -> Result<()> {
        if n <= self.s.len() {
            return Ok(());
        }
        self.ensure_u(n.saturating_sub(1));
        while self.s.len() < n {
            let row = self.next_s_row(self.s.len() + 1)?;
            self.s.push(row);
        }
        Ok(())
    }

    fn next_s_row(&self, n: usize) -> Result<Vec<BigInt>> {
        let binom = binomial_row(2 * n as u64);

        let first: BigInt = (0..n)
            .map(|j| &binom[2 * j + 1] * &self.u[j] * &self.u[n - 1 - j])
            .sum();
        if first.is_odd() {
            return Err(Error::Integrity(format!(
                "s({n},1): coefficient sum {first} is odd"
            )));
        }
        let first = first >> 1;

        let rest: Vec<BigInt> = (2..=n)
            .into_par_iter()
            .map(|k| {
                let sum: BigInt = (k - 1..n)
                    .map(|i| &binom[2 * i] * &self.s[i - 1][k - 2] * &self.s[n - i - 1][0])
                    .sum();
                let divisor = BigInt::from(k * (2 * k - 1));
                exact_div(&sum, &divisor, &format!("s({n},{k})"))
            })
            .collect::<Result<_>>()?;

        let mut row = Vec::with_capacity(n);
        row.push(first);
        row.extend(rest);
        if !row[n - 1].is_one() {
            return Err(Error::Integrity(format!(
                "s({n},{n}) = {} instead of 1",
                row[n - 1]
            )));
        }
        Ok(row)
    }

    pub fn ensure_d(&mut self, n: usize) -> Result<()> {
        if n < self.d.len() {
            return Ok(());
        }
        self.ensure_v(n)?;
        self.ensure_s(n)?;
        while self.d.len() <= n {
            let m = self.d.len();
            let sum: BigInt = (1..m).map(|k| self.r(m, k) * &self.d[k]).sum();
            let value = &self.v[m] - sum;
            if value.is_even() {
                return Err(Error::Integrity(format!("d({m}) = {value} is even")));
            }
            self.d.push(value);
        }
        Ok(())
    }

    pub fn compute_u(&mut self, n: usize) -> &BigInt {
        self.ensure_u(n);
        &self.u[n]
    }

    pub fn compute_v(&mut self, n: usize) -> Result<&BigInt> {
        self.ensure_v(n)?;
        Ok(&self.v[n])
    }

    pub fn compute_s(&mut self, n: usize, k: usize) -> Result<&BigInt> {
        check_triangle(n, k)?;
        self.ensure_s(n)?;
        Ok(&self.s[n - 1][k - 1])
    }

    pub fn compute_r(&mut self, n: usize, k: usize) -> Result<BigInt> {
        check_triangle(n, k)?;
        self.ensure_s(n)?;
        Ok(self.r(n, k))
    }

    pub fn compute_d(&mut self, n: usize) -> Result<&BigInt> {
        self.ensure_d(n)?;
        Ok(&self.d[n])
    }

    /// Cached `u(n)`. Panics if `n` has not been computed.
    pub fn u(&self, n: usize) -> &BigInt {
        self.u
            .get(n)
            .unwrap_or_else(|| panic!("u({n}) not cached (have {})", self.u.len()))
    }

    pub fn v(&self, n: usize) -> &BigInt {
        self.v
            .get(n)
            .unwrap_or_else(|| panic!("v({n}) not cached (have {})", self.v.len()))
    }

    pub fn d(&self, n: usize) -> &BigInt {
        self.d
            .get(n)
            .unwrap_or_else(|| panic!("d({n}) not cached (have {})", self.d.len()))
    }

    /// Cached `s(n,k)`, `1 ≤ k ≤ n`.
    pub fn s(&self, n: usize, k: usize) -> &BigInt {
        assert!(1 <= k && k <= n, "s({n},{k}) outside 1 ≤ k ≤ n");
        &self
            .s
            .get(n - 1)
            .unwrap_or_else(|| panic!("s row {n} not cached (have {})", self.s.len()))[k - 1]
    }

    /// `r(n,k) = 2^{n-k} s(n,k)` from the cached `s` table.
    pub fn r(&self, n: usize, k: usize) -> BigInt {
        self.s(n, k) << (n - k)
    }

    pub fn u_values(&self) -> &[BigInt] {
        &self.u
    }

    pub fn v_values(&self) -> &[BigInt] {
        &self.v
    }

    pub fn d_values(&self) -> &[BigInt] {
        &self.d
    }

    pub fn s_rows(&self) -> &[Vec<BigInt>] {
        &self.s
    }
}

fn check_triangle(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("(n,k) = ({n},{k}) outside 1 ≤ k ≤ n")));
    }
    Ok(())
}

/// Mathematical remainder of `x` modulo `m`, always in `[0, m)`.
pub fn mod_floor_u64(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    debug_assert!(!r.is_negative());
    r.try_into().expect("remainder fits in u64")
}
