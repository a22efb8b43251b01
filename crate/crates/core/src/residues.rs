//! Residues, p-adic valuations of factorials, the closed forms for
//! `r(n,k) mod 5`, conjugacy-class counts in `S_n`, and residue grids.

use std::fmt;
use std::io::{self, Write};
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{exact_div, factorial, mod_floor_u64, SequenceCache};
use crate::partitions::OddPartition;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= p {
        if p % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

pub(crate) fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    Ok(())
}

/// The congruence class of an integer modulo a prime, normalized to `[0, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(x: &BigInt, modulus: u64) -> Self {
        Residue {
            value: mod_floor_u64(x, modulus),
            modulus,
        }
    }

    pub fn from_i64(x: i64, modulus: u64) -> Self {
        Residue {
            value: x.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Sum of the base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    let mut sum = 0;
    while n > 0 {
        sum += n % p;
        n /= p;
    }
    sum
}

/// Exponent of `p` in `n!`, via `(n - s_p(n)) / (p - 1)`.
pub fn legendre_valuation_factorial(n: u64, p: u64) -> u64 {
    (n - digit_sum(n, p)) / (p - 1)
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation(x: &BigInt, p: u64) -> u64 {
    assert!(!x.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&x, &p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// The thresholds `n₀ = (p²-1)/2` and `n₁ = 3(p+1)/4` for `p ≡ 3 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValuationBudget {
    pub prime: u64,
    pub n0: usize,
    pub n1: usize,
}

impl ValuationBudget {
    pub fn for_prime(p: u64) -> Result<Self> {
        require_odd_prime(p)?;
        if p % 4 != 3 {
            return Err(Error::Domain(format!("{p} is not congruent to 3 mod 4")));
        }
        let n0 = ((p * p - 1) / 2) as usize;
        let n1 = (3 * (p + 1) / 4) as usize;
        debug_assert!(n1 < n0);
        Ok(ValuationBudget { prime: p, n0, n1 })
    }
}

/// `max(0, n-3k) ..= ⌊(n-k)/2⌋`, the range of the number of fives in a
/// partition of `2n` into `2k` parts from {1, 3, 5}; `None` if `n > 5k`.
pub fn five_count_range(n: usize, k: usize) -> Option<RangeInclusive<usize>> {
    if k == 0 || k > n || n > 5 * k {
        return None;
    }
    Some(n.saturating_sub(3 * k)..=(n - k) / 2)
}

/// 5-adic valuation of `(2n)!(-1)^c / ((3k-n+c)! (n-k-2c)! c! 5^c)`.
pub fn valuation_v(n: usize, k: usize, c: usize) -> Result<i64> {
    let range = five_count_range(n, k)
        .ok_or_else(|| Error::Domain(format!("(n,k) = ({n},{k}) needs 0 < k ≤ n ≤ 5k")))?;
    if !range.contains(&c) {
        return Err(Error::Domain(format!(
            "c = {c} outside {}..={} for (n,k) = ({n},{k})",
            range.start(),
            range.end()
        )));
    }
    let w = |m: usize| legendre_valuation_factorial(m as u64, 5) as i64;
    Ok(w(2 * n) - w(3 * k + c - n) - w(n - k - 2 * c) - w(c) - c as i64)
}

fn pow_bigint(base: u64, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}

/// `r(n,k) mod 5` from the single-term closed form; zero when `n > 5k`.
pub fn r_mod5_closed_form(n: usize, k: usize) -> Result<Residue> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("(n,k) = ({n},{k}) outside 1 ≤ k ≤ n")));
    }
    if n > 5 * k {
        return Ok(Residue::from_i64(0, 5));
    }
    let (lead, a, b) = if (n - k) % 2 == 0 {
        (1u64, (5 * k - n) / 2, (n - k) / 2)
    } else {
        (2u64, (5 * k - n - 1) / 2, (n - k - 1) / 2)
    };
    let denominator = factorial(a as u64) * factorial(b as u64) * pow_bigint(5, b);
    let quotient = exact_div(
        &(factorial(2 * n as u64) * lead),
        &denominator,
        &format!("closed form for r({n},{k})"),
    )?;
    Ok(Residue::new(&quotient, 5))
}

/// `s(n,k) mod 5` by summing `(2n)!(-1)^c / ((3k-n+c)!(n-k-2c)!c!5^c)` over
/// the admissible number of fives `c`, each term evaluated exactly.
pub fn s_mod5_single_index(n: usize, k: usize) -> Result<Residue> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("(n,k) = ({n},{k}) outside 1 ≤ k ≤ n")));
    }
    let Some(range) = five_count_range(n, k) else {
        return Ok(Residue::from_i64(0, 5));
    };
    let numerator = factorial(2 * n as u64);
    let mut sum = BigInt::zero();
    for c in range {
        let denominator = factorial((3 * k + c - n) as u64)
            * factorial((n - k - 2 * c) as u64)
            * factorial(c as u64)
            * pow_bigint(5, c);
        let term = exact_div(&numerator, &denominator, &format!("single-index term c={c}"))?;
        if c % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(Residue::new(&sum, 5))
}

/// Whether `p` divides `C(a, b)`, decided from factorial valuations.
/// `C(a, b) = 0` for `b > a`, which counts as divisible.
pub fn binomial_vanishes(a: u64, b: u64, p: u64) -> bool {
    if b > a {
        return true;
    }
    let w = |m| legendre_valuation_factorial(m, p);
    w(a) > w(b) + w(a - b)
}

/// Number of permutations of `n` letters made of `k` disjoint five-cycles
/// and `n - 5k` fixed points: `n! / ((n-5k)! k! 5^k)`.
pub fn conjugacy_class_size(n: usize, k: usize) -> Result<BigInt> {
    if 5 * k > n {
        return Err(Error::Domain(format!("5k = {} exceeds n = {n}", 5 * k)));
    }
    let denominator = factorial((n - 5 * k) as u64) * factorial(k as u64) * pow_bigint(5, k);
    exact_div(&factorial(n as u64), &denominator, "conjugacy class size")
}

/// Number of solutions of `x⁵ = 1` in `S_n`.
pub fn count_fifth_roots(n: usize) -> BigInt {
    (0..=n / 5)
        .map(|k| conjugacy_class_size(n, k).expect("5k ≤ n"))
        .sum()
}

/// `ω_p((2n)! / Π i!^{c_i} c_i!)` for a partition of `2n`, by Legendre's formula.
pub fn partition_multinomial_valuation(partition: &OddPartition, p: u64) -> u64 {
    let w = |m: usize| legendre_valuation_factorial(m as u64, p);
    let denominator: u64 = partition
        .multiplicity_pairs()
        .map(|(i, c)| c as u64 * w(i) + w(c as usize))
        .sum();
    w(partition.total()) - denominator
}

/// Checks the three base-`p` digit-sum facts for `r` and `s`:
/// subadditivity with equality exactly when no carries occur,
/// `s_p(r) + s_p(s) ≥ s_p(s_p(r) + p·s_p(s))`, and `s_p(rp) = s_p(r)` with
/// `s_p(r) = r` exactly when `r < p`.
pub fn digit_facts_check(r: u64, s: u64, p: u64) -> bool {
    let sp = |x| digit_sum(x, p);
    let no_carries = {
        let (mut a, mut b) = (r, s);
        let mut ok = true;
        while a > 0 || b > 0 {
            if a % p + b % p >= p {
                ok = false;
            }
            a /= p;
            b /= p;
        }
        ok
    };
    let first = sp(r + s) <= sp(r) + sp(s) && ((sp(r + s) == sp(r) + sp(s)) == no_carries);
    let second = sp(r) + sp(s) >= sp(sp(r) + p * sp(s));
    let third = sp(r * p) == sp(r) && ((sp(r) == r) == (r < p)) && ((sp(s) == s) == (s < p));
    first && second && third
}

/// `r(n,k) mod p` for `1 ≤ k ≤ n ≤ max_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueGrid {
    modulus: u64,
    max_n: usize,
    /// `rows[n-1][k-1]`
    rows: Vec<Vec<u64>>,
}

impl ResidueGrid {
    /// Reduces the exact `r(n,k)` of a cache already built through `max_n`.
    pub fn build(p: u64, max_n: usize, cache: &SequenceCache) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not prime")));
        }
        if max_n == 0 {
            return Err(Error::Domain("grid needs max_n ≥ 1".into()));
        }
        if cache.s_rows().len() < max_n {
            return Err(Error::Domain(format!(
                "cache holds {} rows of s, grid needs {max_n}",
                cache.s_rows().len()
            )));
        }
        let rows = (1..=max_n)
            .into_par_iter()
            .map(|n| (1..=n).map(|k| mod_floor_u64(&cache.r(n, k), p)).collect())
            .collect();
        Ok(ResidueGrid {
            modulus: p,
            max_n,
            rows,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    pub fn get(&self, n: usize, k: usize) -> Option<u64> {
        if k == 0 {
            return None;
        }
        self.rows.get(n.checked_sub(1)?)?.get(k - 1).copied()
    }

    /// `(n, k, residue)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &r)| (i + 1, j + 1, r)))
    }

    /// Header `n,k,residue`, then one row per `(n,k)` in row-major order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,k,residue")?;
        for (n, k, r) in self.entries() {
            writeln!(out, "{n},{k},{r}")?;
        }
        Ok(())
    }

    /// Plain PGM (`P2`): `max_n × max_n`, gray level = residue, maxval
    /// `p-1`; cells above the diagonal (`k > n`) are written as maxval.
    /// One image row per line, values separated by single spaces.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let maxval = self.modulus - 1;
        writeln!(out, "P2")?;
        writeln!(out, "{} {}", self.max_n, self.max_n)?;
        writeln!(out, "{maxval}")?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for k in 1..=self.max_n {
                if k > 1 {
                    line.push(' ');
                }
                let value = row.get(k - 1).copied().unwrap_or(maxval);
                line.push_str(&value.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Text triangle: row `n` lists `r(n,1) … r(n,n)` mod p.
    pub fn write_table<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(out, "{:>4} | {}", i + 1, cells.join(" "))?;
        }
        Ok(())
    }
}
