//! Partitions of `2n` into `2k` odd parts and the partition-sum formula
//! for `s(n,k)`, used as an oracle independent of the series recurrence.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{exact_div, factorial, mod_floor_u64, SequenceCache};
use crate::residues::is_prime;

/// A partition into odd parts, stored by multiplicity: `c[i]` is the number
/// of parts equal to `i`, for `1 ≤ i ≤ total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OddPartition {
    multiplicities: Vec<u32>,
    total: usize,
    parts: usize,
}

impl OddPartition {
    /// Builds a partition from its parts, in any order.
    pub fn from_parts(parts: &[usize]) -> Result<Self> {
        let total: usize = parts.iter().sum();
        let mut multiplicities = vec![0u32; total + 1];
        for &part in parts {
            if part == 0 || part % 2 == 0 {
                return Err(Error::Domain(format!("part {part} is not a positive odd number")));
            }
            multiplicities[part] += 1;
        }
        Ok(OddPartition {
            multiplicities,
            total,
            parts: parts.len(),
        })
    }

    /// `c[i]`; zero outside `1..=total`.
    pub fn multiplicity(&self, part: usize) -> u32 {
        self.multiplicities.get(part).copied().unwrap_or(0)
    }

    /// The partitioned total `2n`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Number of parts `2k`.
    pub fn part_count(&self) -> usize {
        self.parts
    }

    /// `(i, c[i])` for every part value that occurs, ascending.
    pub fn multiplicity_pairs(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.multiplicities
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
    }

    /// Parts in non-increasing order.
    pub fn parts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.parts);
        for (i, &c) in self.multiplicities.iter().enumerate().rev() {
            out.extend(std::iter::repeat(i).take(c as usize));
        }
        out
    }

    pub fn largest_part(&self) -> usize {
        self.multiplicities.iter().rposition(|&c| c > 0).unwrap_or(0)
    }
}

/// Debug dump format: `i:count` pairs, comma separated.
impl fmt::Display for OddPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.multiplicity_pairs() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{i}:{c}")?;
            first = false;
        }
        Ok(())
    }
}

/// Restrictions on the admissible part values beyond being odd.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartitionFilter {
    pub max_part: Option<usize>,
    pub forbidden_part: Option<usize>,
}

impl PartitionFilter {
    /// Every odd part allowed.
    pub fn unrestricted() -> Self {
        Self::default()
    }

    /// Parts among 1, 3, 5.
    pub fn first_three_odd() -> Self {
        PartitionFilter {
            max_part: Some(5),
            forbidden_part: None,
        }
    }

    /// Parts below `p²`, none equal to `p`.
    pub fn below_p_squared_without_p(p: usize) -> Self {
        PartitionFilter {
            max_part: Some(p * p - 1),
            forbidden_part: Some(p),
        }
    }

    pub fn allows(&self, part: usize) -> bool {
        part % 2 == 1
            && self.max_part.map_or(true, |m| part <= m)
            && self.forbidden_part != Some(part)
    }
}

/// Which family of odd partitions a mod-p partition sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionSet {
    /// All partitions into odd parts.
    AllOdd,
    /// Parts among 1, 3, 5 (sound for p = 5).
    FirstThreeOdd,
    /// Parts below `p²` and different from `p` (sound for p ≡ 3 mod 4).
    BelowPSquaredWithoutP,
}

/// Iterator over the partitions of `total` into exactly `parts` odd parts
/// admitted by a filter, in lexicographically decreasing order of the
/// non-increasing part sequence.
#[derive(Debug, Clone)]
pub struct OddPartitions {
    total: usize,
    parts: usize,
    filter: PartitionFilter,
    current: Vec<usize>,
    sum: usize,
    started: bool,
    finished: bool,
}

/// Streams every partition of `total` into `parts` odd parts allowed by `filter`.
pub fn enumerate(total: usize, parts: usize, filter: PartitionFilter) -> OddPartitions {
    OddPartitions {
        total,
        parts,
        filter,
        current: Vec::with_capacity(parts),
        sum: 0,
        started: false,
        finished: parts == 0 || total == 0,
    }
}

/// Whether `remaining` can be written with `count` odd parts none above `cap`.
/// Necessary, not sufficient, once parts are forbidden; dead ends are
/// handled by backtracking.
fn may_complete(remaining: usize, count: usize, cap: usize) -> bool {
    if count == 0 {
        return remaining == 0;
    }
    remaining >= count && (remaining - count) % 2 == 0 && remaining <= count * cap
}

impl OddPartitions {
    fn limit_at_depth(&self) -> usize {
        let upper = self.current.last().copied().unwrap_or(self.total);
        self.filter.max_part.map_or(upper, |m| upper.min(m))
    }

    /// Largest admissible part `≤ below` for the next position.
    fn candidate(&self, below: usize) -> Option<usize> {
        let depth = self.current.len();
        let remaining = self.total - self.sum;
        let left_after = self.parts - depth - 1;
        let top = below.min(remaining.saturating_sub(left_after));
        (1..=top)
            .rev()
            .filter(|&x| self.filter.allows(x))
            .find(|&x| may_complete(remaining - x, left_after, x))
    }

    /// Greedily fills the remaining positions with the largest parts.
    fn descend(&mut self) -> bool {
        while self.current.len() < self.parts {
            match self.candidate(self.limit_at_depth()) {
                Some(x) => {
                    self.current.push(x);
                    self.sum += x;
                }
                None => return false,
            }
        }
        self.sum == self.total
    }

    /// Replaces the deepest part that can be lowered by its next candidate.
    fn backtrack(&mut self) -> bool {
        while let Some(x) = self.current.pop() {
            self.sum -= x;
            if x > 1 {
                if let Some(y) = self.candidate(x - 1) {
                    self.current.push(y);
                    self.sum += y;
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for OddPartitions {
    type Item = OddPartition;

    fn next(&mut self) -> Option<OddPartition> {
        if self.finished {
            return None;
        }
        let mut ok = if self.started {
            self.backtrack() && self.descend()
        } else {
            self.started = true;
            self.descend()
        };
        while !ok {
            if !self.backtrack() {
                self.finished = true;
                return None;
            }
            ok = self.descend();
        }
        let mut multiplicities = vec![0u32; self.total + 1];
        for &x in &self.current {
            multiplicities[x] += 1;
        }
        Some(OddPartition {
            multiplicities,
            total: self.total,
            parts: self.parts,
        })
    }
}

/// `(2n)! / Π i!^{c_i} c_i!` for a partition of `2n`, checked to be exact.
pub fn multinomial_partition_count(partition: &OddPartition) -> Result<BigInt> {
    let numerator = factorial(partition.total() as u64);
    let denominator: BigInt = partition
        .multiplicity_pairs()
        .map(|(i, c)| num_traits::pow(factorial(i as u64), c as usize) * factorial(c as u64))
        .product();
    exact_div(&numerator, &denominator, &format!("multinomial of [{partition}]"))
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("(n,k) = ({n},{k}) outside 1 ≤ k ≤ n")));
    }
    Ok(())
}

/// `s(n,k) = Σ_{λ} (2n)!/Π i!^{c_i} c_i! · Π u((i-1)/2)^{c_i}` over all
/// partitions of `2n` into `2k` odd parts.
pub fn s_by_partitions(n: usize, k: usize, cache: &mut SequenceCache) -> Result<BigInt> {
    check_nk(n, k)?;
    cache.ensure_u(n - k);
    let mut total = BigInt::zero();
    for partition in enumerate(2 * n, 2 * k, PartitionFilter::unrestricted()) {
        let weight: BigInt = partition
            .multiplicity_pairs()
            .map(|(i, c)| num_traits::pow(cache.u((i - 1) / 2).clone(), c as usize))
            .product();
        total += multinomial_partition_count(&partition)? * weight;
    }
    Ok(total)
}

/// `s(n,k) mod p` by reducing each partition summand separately, over the
/// partition family selected by `set`. An empty family gives 0.
pub fn s_mod_p_by_partitions(
    n: usize,
    k: usize,
    p: u64,
    set: ReductionSet,
    cache: &mut SequenceCache,
) -> Result<u64> {
    check_nk(n, k)?;
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    let filter = match set {
        ReductionSet::AllOdd => PartitionFilter::unrestricted(),
        ReductionSet::FirstThreeOdd | ReductionSet::BelowPSquaredWithoutP if p == 2 => {
            return Err(Error::Domain(
                "restricted partition sums are defined for odd primes only".into(),
            ))
        }
        ReductionSet::FirstThreeOdd => PartitionFilter::first_three_odd(),
        ReductionSet::BelowPSquaredWithoutP => PartitionFilter::below_p_squared_without_p(p as usize),
    };
    cache.ensure_u(n - k);
    let u_mod: Vec<u64> = (0..=n - k).map(|j| mod_floor_u64(cache.u(j), p)).collect();
    let mut acc = 0u64;
    for partition in enumerate(2 * n, 2 * k, filter) {
        let mut term = mod_floor_u64(&multinomial_partition_count(&partition)?, p);
        for (i, c) in partition.multiplicity_pairs() {
            term = term * pow_mod(u_mod[(i - 1) / 2], c as u64, p) % p;
        }
        acc = (acc + term) % p;
    }
    Ok(acc)
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut result = 1 % m;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    result
}

/// The partition of `parts` into ones.
pub fn all_ones(parts: usize) -> OddPartition {
    let mut multiplicities = vec![0u32; parts + 1];
    if parts > 0 {
        multiplicities[1] = parts as u32;
    }
    OddPartition {
        multiplicities,
        total: parts,
        parts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn parts_of(total: usize, count: usize, filter: PartitionFilter) -> Vec<Vec<usize>> {
        enumerate(total, count, filter).map(|p| p.parts()).collect()
    }

    /// Every non-increasing sequence of `count` odd parts summing to `total`,
    /// by plain recursion with no pruning.
    fn brute(total: usize, count: usize, max: usize, filter: PartitionFilter) -> Vec<Vec<usize>> {
        if count == 0 {
            return if total == 0 { vec![vec![]] } else { vec![] };
        }
        let mut out = Vec::new();
        for x in (1..=max.min(total)).rev() {
            if !filter.allows(x) {
                continue;
            }
            for mut rest in brute(total - x, count - 1, x, filter) {
                rest.insert(0, x);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(parts_of(4, 2, PartitionFilter::unrestricted()), vec![vec![3, 1]]);
        assert_eq!(
            parts_of(6, 2, PartitionFilter::first_three_odd()),
            vec![vec![5, 1], vec![3, 3]]
        );
        assert_eq!(parts_of(8, 8, PartitionFilter::unrestricted()), vec![vec![1; 8]]);
        assert_eq!(parts_of(8, 8, PartitionFilter::below_p_squared_without_p(3)), vec![vec![1; 8]]);
        assert!(parts_of(5, 2, PartitionFilter::unrestricted()).is_empty());
        assert!(parts_of(0, 0, PartitionFilter::unrestricted()).is_empty());
        // allowed parts are 1, 5, 7
        assert_eq!(
            parts_of(12, 2, PartitionFilter::below_p_squared_without_p(3)),
            vec![vec![7, 5]]
        );
    }

    #[test]
    fn matches_brute_force() {
        let filters = [
            PartitionFilter::unrestricted(),
            PartitionFilter::first_three_odd(),
            PartitionFilter::below_p_squared_without_p(3),
            PartitionFilter::below_p_squared_without_p(7),
        ];
        for filter in filters {
            for total in 1..=22 {
                for count in 1..=total {
                    assert_eq!(
                        parts_of(total, count, filter),
                        brute(total, count, total, filter),
                        "total {total} count {count} {filter:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn nonempty_for_every_valid_pair() {
        for n in 1..=15 {
            for k in 1..=n {
                let all: Vec<_> = enumerate(2 * n, 2 * k, PartitionFilter::unrestricted()).collect();
                assert!(!all.is_empty());
                for p in &all {
                    let weighted: usize = p.multiplicity_pairs().map(|(i, c)| i * c as usize).sum();
                    let count: u32 = p.multiplicity_pairs().map(|(_, c)| c).sum();
                    assert_eq!(weighted, 2 * n);
                    assert_eq!(count as usize, 2 * k);
                    assert!(p.multiplicity_pairs().all(|(i, _)| i % 2 == 1));
                }
            }
        }
    }

    #[test]
    fn multinomials() {
        let p = OddPartition::from_parts(&[1, 3]).unwrap();
        assert_eq!(multinomial_partition_count(&p).unwrap(), BigInt::from(4));
        let p = OddPartition::from_parts(&[3, 3]).unwrap();
        assert_eq!(multinomial_partition_count(&p).unwrap(), BigInt::from(10));
        for k in 1..10 {
            assert_eq!(multinomial_partition_count(&all_ones(2 * k)).unwrap(), BigInt::one());
        }
        assert!(OddPartition::from_parts(&[2, 1]).is_err());
    }

    #[test]
    fn display_dump() {
        let p = OddPartition::from_parts(&[1, 1, 3, 5]).unwrap();
        assert_eq!(p.to_string(), "1:2,3:1,5:1");
        assert_eq!(p.largest_part(), 5);
        assert_eq!(p.parts(), vec![5, 3, 1, 1]);
    }

    #[test]
    fn partition_sum_examples() {
        let mut cache = SequenceCache::new();
        assert_eq!(s_by_partitions(1, 1, &mut cache).unwrap(), BigInt::from(1));
        assert_eq!(s_by_partitions(2, 1, &mut cache).unwrap(), BigInt::from(24));
        assert_eq!(s_by_partitions(3, 2, &mut cache).unwrap(), BigInt::from(120));
        assert!(s_by_partitions(2, 3, &mut cache).is_err());
    }

    #[test]
    fn reduced_sums() {
        let mut cache = SequenceCache::new();
        let s31 = s_mod_p_by_partitions(3, 1, 5, ReductionSet::FirstThreeOdd, &mut cache).unwrap();
        assert_eq!(s31, 1);
        assert_eq!(s31 * 4 % 5, 4);
        assert_eq!(
            s_mod_p_by_partitions(2, 1, 5, ReductionSet::AllOdd, &mut cache).unwrap(),
            4
        );
        for n in 6..=14 {
            for k in 1..=n {
                if 5 * k < n {
                    assert_eq!(
                        s_mod_p_by_partitions(n, k, 5, ReductionSet::FirstThreeOdd, &mut cache)
                            .unwrap(),
                        0
                    );
                }
            }
        }
        assert!(s_mod_p_by_partitions(3, 1, 2, ReductionSet::FirstThreeOdd, &mut cache).is_err());
        assert!(
            s_mod_p_by_partitions(3, 1, 2, ReductionSet::BelowPSquaredWithoutP, &mut cache)
                .is_err()
        );
        assert_eq!(
            s_mod_p_by_partitions(3, 1, 2, ReductionSet::AllOdd, &mut cache).unwrap(),
            0
        );
        assert!(s_mod_p_by_partitions(3, 1, 9, ReductionSet::AllOdd, &mut cache).is_err());
    }

    #[test]
    fn filters_are_sound_for_their_primes() {
        let mut cache = SequenceCache::with_bound(12).unwrap();
        for n in 1..=12 {
            for k in 1..=n {
                let exact5 = mod_floor_u64(cache.s(n, k), 5);
                let exact3 = mod_floor_u64(cache.s(n, k), 3);
                let exact7 = mod_floor_u64(cache.s(n, k), 7);
                let full = |p, c: &mut SequenceCache| {
                    s_mod_p_by_partitions(n, k, p, ReductionSet::AllOdd, c).unwrap()
                };
                assert_eq!(full(3, &mut cache), exact3);
                assert_eq!(full(5, &mut cache), exact5);
                assert_eq!(full(7, &mut cache), exact7);
                assert_eq!(
                    s_mod_p_by_partitions(n, k, 5, ReductionSet::FirstThreeOdd, &mut cache)
                        .unwrap(),
                    exact5,
                    "P3 filter at ({n},{k})"
                );
                assert_eq!(
                    s_mod_p_by_partitions(n, k, 3, ReductionSet::BelowPSquaredWithoutP, &mut cache)
                        .unwrap(),
                    exact3,
                    "P* filter at ({n},{k})"
                );
            }
        }
    }
}
