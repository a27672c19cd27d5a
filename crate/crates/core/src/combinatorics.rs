//! Exact counting and enumeration of set partitions, ordered set partitions
//! and combinations.
//!
//! Unordered partitions are encoded as restricted growth strings (each new
//! block takes the smallest unused label), ordered partitions as surjective
//! label assignments. Counts are arbitrary precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest element count accepted by the counting functions.
pub const MAX_ELEMENTS: usize = 1200;

/// Largest element count accepted by the enumerators.
pub const MAX_ENUMERATION_ELEMENTS: usize = 24;

/// Label vector of a (possibly ordered) set partition: entry `i` names the
/// subset holding element `i`. Doubles as a subcarrier index pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelVector(Vec<u8>);

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Domain("label vector must have at least one element".into()));
        }
        Ok(Self(labels))
    }

    /// Builds a label vector that must be a partition into exactly `k`
    /// non-empty labelled subsets.
    pub fn partition(labels: Vec<u8>, k: usize) -> Result<Self> {
        let v = Self::new(labels)?;
        if !v.is_surjective_onto(k) {
            return Err(Error::Domain(format!("{v} is not a partition into {k} labelled subsets")));
        }
        Ok(v)
    }

    pub fn labels(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One more than the largest label.
    pub fn num_labels(&self) -> usize {
        self.0.iter().copied().max().map_or(0, |m| m as usize + 1)
    }

    /// True when the labels are exactly `0..k`, each used at least once.
    pub fn is_surjective_onto(&self, k: usize) -> bool {
        if k == 0 || k > 256 {
            return false;
        }
        let mut seen = vec![false; k];
        for &l in &self.0 {
            match seen.get_mut(l as usize) {
                Some(s) => *s = true,
                None => return false,
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Restricted growth string test.
    pub fn is_canonical(&self) -> bool {
        let mut next = 0u16;
        for &l in &self.0 {
            match (l as u16).cmp(&next) {
                Ordering::Less => {}
                Ordering::Equal => next += 1,
                Ordering::Greater => return false,
            }
        }
        true
    }

    /// Relabels blocks in order of first appearance.
    pub fn canonical(&self) -> LabelVector {
        let mut map = [u8::MAX; 256];
        let mut next = 0u8;
        let labels = self
            .0
            .iter()
            .map(|&l| {
                if map[l as usize] == u8::MAX {
                    map[l as usize] = next;
                    next = next.wrapping_add(1);
                }
                map[l as usize]
            })
            .collect();
        LabelVector(labels)
    }

    /// Number of positions with different labels. Lengths must agree.
    pub fn hamming_distance(&self, other: &LabelVector) -> usize {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for LabelVector {
    type Err = Error;

    /// Accepts space- or comma-separated labels (`"0 1 1 1"`) or a packed
    /// digit string (`"0111"`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = if s.contains([' ', ',']) {
            s.split([' ', ',']).filter(|p| !p.is_empty()).collect()
        } else {
            s.char_indices().map(|(i, c)| &s[i..i + c.len_utf8()]).collect()
        };
        let labels = parts
            .iter()
            .map(|p| p.parse::<u8>().map_err(|_| Error::Domain(format!("bad label {p:?} in {s:?}"))))
            .collect::<Result<Vec<u8>>>()?;
        LabelVector::new(labels)
    }
}

/// Exact non-negative integer count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        Self(BigUint::zero())
    }

    pub fn one() -> Self {
        Self(BigUint::one())
    }

    pub fn as_biguint(&self) -> &BigUint {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.0.to_u128()
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.0.to_usize()
    }

    /// `floor(log2 self)`, computed from the bit length. `None` for zero.
    pub fn floor_log2(&self) -> Option<u64> {
        (!self.0.is_zero()).then(|| self.0.bits() - 1)
    }

    pub fn is_power_of_two(&self) -> bool {
        !self.0.is_zero() && self.0.count_ones() == 1
    }

    /// Unfloored base-2 logarithm, accurate to double precision.
    pub fn log2(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.0.bits();
        if bits <= 64 {
            return (self.0.to_u64().unwrap() as f64).log2();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_u64().unwrap();
        (top as f64).log2() + shift as f64
    }

    pub fn pow2(exp: u32) -> Self {
        Self(BigUint::one() << exp)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        Self(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        Self(v)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::ops::Add for &BigCount {
    type Output = BigCount;
    fn add(self, rhs: Self) -> BigCount {
        BigCount(&self.0 + &rhs.0)
    }
}

impl std::ops::Mul for &BigCount {
    type Output = BigCount;
    fn mul(self, rhs: Self) -> BigCount {
        BigCount(&self.0 * &rhs.0)
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        BigCount(iter.map(|c| c.0).sum())
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        return Err(Error::Domain(format!("n = {n} exceeds the supported maximum {MAX_ELEMENTS}")));
    }
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ELEMENTS {
        return Err(Error::Domain(format!("need 1 <= n <= {MAX_ELEMENTS}, got {n}")));
    }
    Ok(())
}

pub fn factorial(n: usize) -> BigCount {
    BigCount((1..=n as u64).map(BigUint::from).product())
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from((n - i) as u64);
        acc /= BigUint::from((i + 1) as u64);
    }
    BigCount(acc)
}

/// Row `n` of the Stirling triangle, `{n k}` for `k = 0..=n`, built with the
/// recurrence `{n k} = k{n-1 k} + {n-1 k-1}`.
pub fn stirling2_row(n: usize) -> Vec<BigCount> {
    let mut row = vec![BigUint::one()];
    for m in 1..=n {
        let mut next = vec![BigUint::zero(); m + 1];
        for k in 1..=m {
            let mut v = if k < m { &row[k] * BigUint::from(k as u64) } else { BigUint::zero() };
            v += &row[k - 1];
            next[k] = v;
        }
        row = next;
    }
    row.into_iter().map(BigCount).collect()
}

/// Stirling number of the second kind: partitions of an `n`-set into `k`
/// non-empty blocks.
pub fn stirling2(n: usize, k: usize) -> Result<BigCount> {
    check_nk(n, k)?;
    // column-limited recurrence: only k+1 entries per row are needed
    let mut col = vec![BigUint::zero(); k + 1];
    col[0] = BigUint::one();
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            let carried = std::mem::take(&mut col[j]) * BigUint::from(j as u64);
            col[j] = carried + &col[j - 1];
        }
        col[0] = BigUint::zero();
    }
    Ok(BigCount(col.swap_remove(k)))
}

/// `{n k}` from the alternating explicit sum
/// `(1/k!) sum_j (-1)^j C(k,j) (k-j)^n`.
pub fn stirling2_explicit(n: usize, k: usize) -> Result<BigCount> {
    check_nk(n, k)?;
    let mut acc = BigInt::zero();
    for j in 0..=k {
        let term = BigInt::from(binomial(k, j).0) * num_traits::pow(BigInt::from((k - j) as u64), n);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let quotient = acc / BigInt::from(factorial(k).0);
    Ok(BigCount(quotient.to_biguint().expect("explicit Stirling sum is non-negative")))
}

/// Bell number: all partitions of an `n`-set.
pub fn bell(n: usize) -> Result<BigCount> {
    check_n(n)?;
    Ok(stirling2_row(n).into_iter().skip(1).sum())
}

/// Ordered Bell (Fubini) number: all ordered partitions of an `n`-set.
pub fn ordered_bell(n: usize) -> Result<BigCount> {
    check_n(n)?;
    let mut fact = BigUint::one();
    let mut acc = BigUint::zero();
    for (k, s) in stirling2_row(n).into_iter().enumerate().skip(1) {
        fact *= BigUint::from(k as u64);
        acc += &fact * s.0;
    }
    Ok(BigCount(acc))
}

/// Lexicographic iterator over restricted growth strings of length `n` with
/// exactly `k` blocks.
#[derive(Debug, Clone)]
pub struct PartitionIter {
    current: Option<Vec<u8>>,
    k: usize,
}

impl PartitionIter {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_enumeration(n, k)?;
        let mut first = vec![0u8; n];
        for j in 1..k {
            first[n - k + j] = j as u8;
        }
        Ok(Self { current: Some(first), k })
    }

    fn successor(a: &mut [u8], k: usize) -> bool {
        let n = a.len();
        // prefix_max[i] = max(a[0..=i])
        let mut prefix_max = vec![0u8; n];
        for i in 1..n {
            prefix_max[i] = prefix_max[i - 1].max(a[i]);
        }
        for i in (1..n).rev() {
            let ceiling = (prefix_max[i - 1] as usize + 1).min(k - 1);
            let mut v = a[i] as usize + 1;
            while v <= ceiling {
                let new_max = (prefix_max[i - 1] as usize).max(v);
                let remaining = n - 1 - i;
                if remaining >= k - 1 - new_max {
                    a[i] = v as u8;
                    let fresh = k - 1 - new_max;
                    for (offset, slot) in a[i + 1..].iter_mut().enumerate() {
                        let from_end = remaining - offset;
                        *slot = if from_end <= fresh { (k - from_end) as u8 } else { 0 };
                    }
                    return true;
                }
                v += 1;
            }
        }
        false
    }
}

impl Iterator for PartitionIter {
    type Item = LabelVector;

    fn next(&mut self) -> Option<LabelVector> {
        let cur = self.current.take()?;
        let mut succ = cur.clone();
        if Self::successor(&mut succ, self.k) {
            self.current = Some(succ);
        }
        Some(LabelVector(cur))
    }
}

fn check_enumeration(n: usize, k: usize) -> Result<()> {
    check_nk(n, k)?;
    if n > MAX_ENUMERATION_ELEMENTS {
        return Err(Error::Domain(format!(
            "enumeration limited to n <= {MAX_ENUMERATION_ELEMENTS}, got {n}"
        )));
    }
    Ok(())
}

/// All canonical label vectors of partitions of `n` elements into `k` blocks,
/// in lexicographic order.
pub fn enumerate_partitions(n: usize, k: usize) -> Result<Vec<LabelVector>> {
    Ok(PartitionIter::new(n, k)?.collect())
}

/// Permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<u8>> {
    let mut perm: Vec<u8> = (0..k as u8).collect();
    let mut out = vec![perm.clone()];
    while next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}

/// Advances `a` to its lexicographic successor; false at the last one.
pub fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// All surjective label vectors of `n` elements onto `k` labels: each
/// canonical partition (outer, lexicographic) relabelled by each permutation
/// of the labels (inner, lexicographic). The identity permutation comes
/// first, so every group starts with the canonical vector.
pub fn enumerate_ordered_partitions(n: usize, k: usize) -> Result<Vec<LabelVector>> {
    let perms = permutations(k);
    let mut out = Vec::new();
    for base in PartitionIter::new(n, k)? {
        for p in &perms {
            out.push(LabelVector(base.0.iter().map(|&l| p[l as usize]).collect()));
        }
    }
    Ok(out)
}

/// Lexicographic rank of a strictly increasing `k`-subset of `0..n`.
pub fn rank_combination(combo: &[usize], n: usize) -> Result<BigCount> {
    let k = combo.len();
    if combo.windows(2).any(|w| w[0] >= w[1]) || combo.last().is_some_and(|&c| c >= n) {
        return Err(Error::Range(format!("{combo:?} is not an increasing subset of 0..{n}")));
    }
    let mut rank = BigUint::zero();
    let mut start = 0;
    for (i, &c) in combo.iter().enumerate() {
        for skipped in start..c {
            rank += binomial(n - 1 - skipped, k - 1 - i).0;
        }
        start = c + 1;
    }
    Ok(BigCount(rank))
}

/// Inverse of [`rank_combination`]: the `rank`-th `k`-subset of `0..n` in
/// lexicographic order.
pub fn unrank_combination(rank: &BigCount, n: usize, k: usize) -> Result<Vec<usize>> {
    let total = binomial(n, k);
    if rank >= &total {
        return Err(Error::Range(format!("rank {rank} >= C({n},{k}) = {total}")));
    }
    let mut r = rank.0.clone();
    let mut out = Vec::with_capacity(k);
    let mut c = 0;
    for i in 0..k {
        loop {
            let block = binomial(n - 1 - c, k - 1 - i).0;
            if r < block {
                break;
            }
            r -= block;
            c += 1;
        }
        out.push(c);
        c += 1;
    }
    Ok(out)
}

/// Advances an increasing `k`-subset of `0..n` to its lexicographic
/// successor; false at the last subset.
pub fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Principal branch of the Lambert W function for `x >= 0`, by Newton
/// iteration from `ln(1 + x)`.
pub fn lambert_w(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut w = x.ln_1p();
    for _ in 0..50 {
        let ew = w.exp();
        let step = (w * ew - x) / (ew * (w + 1.0));
        w -= step;
        if step.abs() <= 1e-12 * w.abs().max(1.0) {
            break;
        }
    }
    w
}

/// Block count maximising `{n k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalK {
    /// `floor` and `ceil` of `e^{W(n)} - 1`, restricted to `1..=n`.
    pub candidates: Vec<usize>,
    /// Exact maximiser by direct comparison (smallest on ties).
    pub argmax: usize,
    pub lambert_w: f64,
}

impl OptimalK {
    pub fn contains_argmax(&self) -> bool {
        self.candidates.contains(&self.argmax)
    }
}

fn argmax_of(values: impl Iterator<Item = (usize, BigCount)>) -> usize {
    let mut best: Option<(usize, BigCount)> = None;
    for (k, v) in values {
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((k, v));
        }
    }
    best.map_or(1, |(k, _)| k)
}

fn lambert_candidates(n: usize) -> (Vec<usize>, f64) {
    let w = lambert_w(n as f64);
    let t = (n as f64 / w) - 1.0; // e^{W(n)} = n / W(n)
    let mut c: Vec<usize> = [t.floor(), t.ceil()]
        .into_iter()
        .filter(|v| *v >= 1.0 && *v <= n as f64)
        .map(|v| v as usize)
        .collect();
    c.dedup();
    if c.is_empty() {
        c.push(1);
    }
    (c, w)
}

/// Lambert-W candidates for the maximising block count together with the
/// exact argmax of `{n k}` over `k`.
pub fn optimal_k(n: usize) -> Result<OptimalK> {
    check_n(n)?;
    Ok(optimal_k_from_row(n, &stirling2_row(n)))
}

/// Same as [`optimal_k`] for a precomputed Stirling row.
pub fn optimal_k_from_row(n: usize, row: &[BigCount]) -> OptimalK {
    let (candidates, w) = lambert_candidates(n);
    let argmax = argmax_of(row.iter().cloned().enumerate().skip(1));
    OptimalK { candidates, argmax, lambert_w: w }
}

/// Exact argmax over `k` of `k! {n k}`, the block count with the most
/// ordered partitions.
pub fn ordered_optimal_k(n: usize) -> Result<usize> {
    check_n(n)?;
    let row = stirling2_row(n);
    let mut fact = BigCount::one();
    let mut weighted = Vec::with_capacity(n);
    for (k, s) in row.into_iter().enumerate().skip(1) {
        fact = &fact * &BigCount::from(k as u64);
        weighted.push((k, &fact * &s));
    }
    Ok(argmax_of(weighted.into_iter()))
}

/// One label vector per line, labels space-separated.
pub fn dump_labels(vectors: &[LabelVector]) -> String {
    let mut s = String::new();
    for v in vectors {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn lv(s: &str) -> LabelVector {
        s.parse().unwrap()
    }

    fn u(c: BigCount) -> u64 {
        c.to_u64().unwrap()
    }

    // Brute force: every assignment of k labels to n elements.
    fn all_assignments(n: usize, k: usize) -> Vec<Vec<u8>> {
        let total = k.pow(n as u32);
        (0..total)
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let d = (code % k) as u8;
                        code /= k;
                        d
                    })
                    .rev()
                    .collect()
            })
            .collect()
    }

    #[test]
    fn stirling_known_values() {
        assert_eq!(u(stirling2(4, 2).unwrap()), 7);
        assert_eq!(u(stirling2(3, 2).unwrap()), 3);
        assert_eq!(u(stirling2(6, 3).unwrap()), 90);
        for n in 1..30 {
            assert_eq!(u(stirling2(n, 1).unwrap()), 1);
            assert_eq!(u(stirling2(n, n).unwrap()), 1);
        }
        for n in 2..=16 {
            assert_eq!(u(stirling2(n, 2).unwrap()), (1u64 << (n - 1)) - 1);
        }
    }

    #[test]
    fn stirling_domain_errors() {
        assert!(matches!(stirling2(3, 4), Err(Error::Domain(_))));
        assert!(matches!(stirling2(3, 0), Err(Error::Domain(_))));
        assert!(stirling2(MAX_ELEMENTS + 1, 2).is_err());
        assert!(bell(0).is_err());
        assert!(ordered_bell(0).is_err());
    }

    #[test]
    fn explicit_sum_matches_recurrence() {
        for n in 1..=25 {
            let row = stirling2_row(n);
            for k in 1..=n {
                let rec = stirling2(n, k).unwrap();
                assert_eq!(rec, stirling2_explicit(n, k).unwrap(), "n={n} k={k}");
                assert_eq!(rec, row[k]);
            }
        }
    }

    #[test]
    fn bell_and_ordered_bell() {
        assert_eq!(u(bell(1).unwrap()), 1);
        assert_eq!(u(bell(3).unwrap()), 5);
        assert_eq!(u(bell(4).unwrap()), 15);
        let ob: Vec<u64> = (1..=6).map(|n| u(ordered_bell(n).unwrap())).collect();
        assert_eq!(ob, vec![1, 3, 13, 75, 541, 4683]);
        for n in 1..=30 {
            let sum: BigCount = (1..=n).map(|k| stirling2(n, k).unwrap()).sum();
            assert_eq!(sum, bell(n).unwrap());
        }
        for n in 1..=20 {
            let sum: BigCount = (1..=n).map(|k| &factorial(k) * &stirling2(n, k).unwrap()).sum();
            assert_eq!(sum, ordered_bell(n).unwrap());
        }
        for n in 2..=20 {
            assert!(ordered_bell(n).unwrap() > factorial(n));
        }
    }

    #[test]
    fn log2_of_counts() {
        let c = BigCount::from(14);
        assert_eq!(c.floor_log2(), Some(3));
        assert_eq!(BigCount::from(16).floor_log2(), Some(4));
        assert_eq!(BigCount::zero().floor_log2(), None);
        assert!((c.log2() - 14f64.log2()).abs() < 1e-15);
        // 2^200 - 1 must floor to 199, which a float round trip gets wrong
        let big = BigCount(BigUint::from(1u8) << 200u32);
        let below = BigCount(big.as_biguint() - 1u8);
        assert_eq!(below.floor_log2(), Some(199));
        assert_eq!(big.floor_log2(), Some(200));
        assert!(big.is_power_of_two() && !below.is_power_of_two());
        assert!((ordered_bell(300).unwrap().log2() - ordered_bell(300).unwrap().as_biguint().bits() as f64).abs() < 1.0);
    }

    #[test]
    fn partitions_match_table_one() {
        let parts = enumerate_partitions(4, 2).unwrap();
        assert_eq!(parts.len(), 7);
        assert!(parts.contains(&lv("0111")));
        assert!(parts.contains(&lv("0011")));
        assert_eq!(parts.first().unwrap(), &lv("0001"));
        assert_eq!(parts.last().unwrap(), &lv("0111"));
        assert!(parts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(enumerate_partitions(3, 3).unwrap(), vec![lv("012")]);
    }

    #[test]
    fn partition_counts_against_brute_force() {
        for n in 1..=7 {
            for k in 1..=n {
                let mut brute: Vec<LabelVector> = all_assignments(n, k)
                    .into_iter()
                    .map(LabelVector)
                    .filter(|v| v.is_surjective_onto(k) && v.is_canonical())
                    .collect();
                brute.sort();
                assert_eq!(enumerate_partitions(n, k).unwrap(), brute, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn partition_enumeration_exhaustive_to_ten() {
        for n in 1..=10 {
            for k in 1..=n {
                let parts = enumerate_partitions(n, k).unwrap();
                assert_eq!(parts.len() as u64, u(stirling2(n, k).unwrap()));
                assert!(parts.iter().all(|p| p.is_canonical() && p.is_surjective_onto(k)));
                let distinct: HashSet<_> = parts.iter().collect();
                assert_eq!(distinct.len(), parts.len());
            }
        }
    }

    #[test]
    fn ordered_partitions_match_table_two() {
        let got: HashSet<LabelVector> = enumerate_ordered_partitions(3, 2).unwrap().into_iter().collect();
        let table: HashSet<LabelVector> =
            ["011", "101", "110", "100", "010", "001"].iter().map(|s| lv(s)).collect();
        assert_eq!(got, table);
        assert_eq!(enumerate_ordered_partitions(4, 2).unwrap().len(), 14);
        assert_eq!(enumerate_ordered_partitions(2, 2).unwrap(), vec![lv("01"), lv("10")]);
    }

    #[test]
    fn ordered_partitions_are_surjections() {
        for n in 1..=6 {
            for k in 1..=n {
                let mut brute: Vec<LabelVector> = all_assignments(n, k)
                    .into_iter()
                    .map(LabelVector)
                    .filter(|v| v.is_surjective_onto(k))
                    .collect();
                let mut got = enumerate_ordered_partitions(n, k).unwrap();
                brute.sort();
                got.sort();
                assert_eq!(got, brute, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn permutation_order() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }

    #[test]
    fn combination_unranking() {
        assert_eq!(unrank_combination(&BigCount::zero(), 5, 3).unwrap(), vec![0, 1, 2]);
        assert_eq!(unrank_combination(&BigCount::from(9), 5, 3).unwrap(), vec![2, 3, 4]);
        assert!(matches!(unrank_combination(&BigCount::from(10), 5, 3), Err(Error::Range(_))));
        assert_eq!(unrank_combination(&BigCount::zero(), 4, 0).unwrap(), Vec::<usize>::new());
    }

    #[test]
    fn combination_round_trip_exhaustive() {
        // oracle: nested loops in lexicographic order
        let mut expected = Vec::new();
        for a in 0..8 {
            for b in a + 1..8 {
                for c in b + 1..8 {
                    for d in c + 1..8 {
                        expected.push(vec![a, b, c, d]);
                    }
                }
            }
        }
        assert_eq!(expected.len(), 70);
        let mut walk = vec![0, 1, 2, 3];
        for (r, combo) in expected.iter().enumerate() {
            let rank = BigCount::from(r as u64);
            assert_eq!(&unrank_combination(&rank, 8, 4).unwrap(), combo);
            assert_eq!(rank_combination(combo, 8).unwrap(), rank);
            assert_eq!(&walk, combo);
            assert_eq!(next_combination(&mut walk, 8), r + 1 < 70);
        }
    }

    #[test]
    fn lambert_w_values() {
        for x in [0.5, 1.0, 4.0, 10.0, 100.0, 1200.0] {
            let w = lambert_w(x);
            assert!((w * w.exp() - x).abs() < 1e-9 * x.max(1.0), "x={x}");
        }
        assert!((lambert_w(1.0) - 0.567_143_290_409_783_8).abs() < 1e-12);
    }

    #[test]
    fn optimal_k_examples() {
        let o = optimal_k(4).unwrap();
        assert_eq!(o.candidates, vec![2, 3]);
        assert_eq!(o.argmax, 2);
        assert_eq!(optimal_k(1).unwrap().argmax, 1);
        let o = optimal_k(10).unwrap();
        assert_eq!(o.argmax, 5);
        assert!(o.contains_argmax());
    }

    #[test]
    fn optimal_k_containment_to_300() {
        let mut row = vec![BigUint::one()];
        for n in 1..=300usize {
            let mut next = vec![BigUint::zero(); n + 1];
            for k in 1..=n {
                let mut v = if k < n { &row[k] * BigUint::from(k as u64) } else { BigUint::zero() };
                v += &row[k - 1];
                next[k] = v;
            }
            row = next;
            let counts: Vec<BigCount> = row.iter().cloned().map(BigCount).collect();
            let o = optimal_k_from_row(n, &counts);
            assert!(o.contains_argmax(), "n={n}: {o:?}");
        }
    }

    #[test]
    fn ordered_optimal_k_small() {
        // 2!{4 2} = 14, 3!{4 3} = 36, 4!{4 4} = 24
        assert_eq!(ordered_optimal_k(4).unwrap(), 3);
        assert_eq!(ordered_optimal_k(1).unwrap(), 1);
    }

    #[test]
    fn label_vector_helpers() {
        let v = lv("0 1 1 1");
        assert_eq!(v.num_labels(), 2);
        assert!(v.is_canonical());
        assert!(!lv("1011").is_canonical());
        assert_eq!(lv("1011").canonical(), lv("0100"));
        assert_eq!(lv("0111").hamming_distance(&lv("0011")), 1);
        assert_eq!(v.to_string(), "0 1 1 1");
        assert!(LabelVector::partition(vec![0, 2], 3).is_err());
        assert!(LabelVector::new(vec![]).is_err());
        assert_eq!(dump_labels(&[lv("01"), lv("10")]), "0 1\n1 0\n");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unrank_rank_round_trip(n in 1usize..40, kfrac in 0.0f64..1.0, seed in any::<u64>()) {
                let k = ((n as f64) * kfrac) as usize;
                let total = binomial(n, k);
                let r = BigCount::from(seed % total.to_u64().unwrap_or(u64::MAX).max(1));
                prop_assume!(r < total);
                let combo = unrank_combination(&r, n, k).unwrap();
                prop_assert_eq!(combo.len(), k);
                prop_assert!(combo.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(rank_combination(&combo, n).unwrap(), r);
            }

            #[test]
            fn canonical_form_is_idempotent(labels in proptest::collection::vec(0u8..5, 1..10)) {
                let v = LabelVector(labels);
                let c = v.canonical();
                prop_assert!(c.is_canonical());
                prop_assert_eq!(c.canonical(), c.clone());
                prop_assert_eq!(c.num_labels(), {
                    let s: HashSet<u8> = v.labels().iter().copied().collect();
                    s.len()
                });
            }
        }
    }
}
