//! Index codebooks for the SPM variants and the index-modulation baselines,
//! bit mapping, codeword expansion, distance metrics and rate formulas.
//!
//! A transmitted word of `f = f1 + f2` bits is laid out as
//! `(index_bits << f2) | mod_bits`. Inside `mod_bits` the first active
//! subcarrier takes the most significant `log2 M` bits.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;

use crate::combinatorics::{
    bell, binomial, enumerate_ordered_partitions, enumerate_partitions, factorial, next_combination, ordered_bell,
    permutations, stirling2, BigCount, LabelVector, MAX_ENUMERATION_ELEMENTS,
};
use crate::constellations::ConstellationFamily;
use crate::error::{Error, Result};
use crate::scalar::{format_sig, norm_sqr, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain OFDM: one all-zero pattern, nothing carried by the index.
    Ofdm,
    Spm { k: usize },
    Ospm { k: usize },
    Fspm,
    Ofspm,
    OfdmIm { active: usize },
    DmOfdmIm { d: usize },
    MmOfdmIm,
    GdmOfdmIm,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Ofdm => "OFDM",
            Variant::Spm { .. } => "SPM",
            Variant::Ospm { .. } => "OSPM",
            Variant::Fspm => "FSPM",
            Variant::Ofspm => "OFSPM",
            Variant::OfdmIm { .. } => "OFDM-IM",
            Variant::DmOfdmIm { .. } => "DM-OFDM-IM",
            Variant::MmOfdmIm => "MM-OFDM-IM",
            Variant::GdmOfdmIm => "GDM-OFDM-IM",
        }
    }

    /// The variant's own size parameter as printed in exports: K for
    /// SPM/OSPM, the active count for OFDM-IM, d for DM, N for the full and
    /// multi-mode variants, 2 for GDM and 1 for OFDM.
    pub fn k_param(&self, n: usize) -> usize {
        match *self {
            Variant::Ofdm => 1,
            Variant::Spm { k } | Variant::Ospm { k } => k,
            Variant::Fspm | Variant::Ofspm | Variant::MmOfdmIm => n,
            Variant::OfdmIm { active } => active,
            Variant::DmOfdmIm { d } => d,
            Variant::GdmOfdmIm => 2,
        }
    }

    /// Number of distinct constellations the patterns refer to.
    pub fn num_constellations(&self, n: usize) -> usize {
        match *self {
            Variant::Ofdm | Variant::OfdmIm { .. } => 1,
            Variant::Spm { k } | Variant::Ospm { k } => k,
            Variant::Fspm | Variant::Ofspm | Variant::MmOfdmIm => n,
            Variant::DmOfdmIm { .. } | Variant::GdmOfdmIm => 2,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::Parameter("N must be at least 1".into()));
        }
        let bad = |msg: String| Err(Error::Parameter(msg));
        match *self {
            Variant::Spm { k } | Variant::Ospm { k } if k == 0 || k > n => {
                bad(format!("{} needs 1 <= K <= N, got K = {k}, N = {n}", self.name()))
            }
            Variant::OfdmIm { active } if active == 0 || active > n => {
                bad(format!("OFDM-IM needs 1 <= active <= N, got {active} of {n}"))
            }
            Variant::DmOfdmIm { d } if d == 0 || d >= n => bad(format!("DM-OFDM-IM needs 1 <= d < N, got d = {d}, N = {n}")),
            _ => Ok(()),
        }
    }

    /// Size of the complete pattern set, without enumerating it.
    pub fn full_count(&self, n: usize) -> Result<BigCount> {
        self.validate(n)?;
        Ok(match *self {
            Variant::Ofdm => BigCount::one(),
            Variant::Spm { k } => stirling2(n, k)?,
            Variant::Ospm { k } => &factorial(k) * &stirling2(n, k)?,
            Variant::Fspm => bell(n)?,
            Variant::Ofspm => ordered_bell(n)?,
            Variant::OfdmIm { active } => binomial(n, active),
            Variant::DmOfdmIm { d } => binomial(n, d),
            Variant::MmOfdmIm => factorial(n),
            Variant::GdmOfdmIm => BigCount::pow2(n as u32),
        })
    }

    /// Subcarriers carrying a modulated symbol in every pattern.
    pub fn active_subcarriers(&self, n: usize) -> usize {
        match *self {
            Variant::OfdmIm { active } => active,
            _ => n,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered list of index patterns plus the bookkeeping needed to map bits.
#[derive(Debug, Clone)]
pub struct IndexCodebook {
    variant: Variant,
    n: usize,
    patterns: Vec<LabelVector>,
    num_constellations: usize,
    null_label: Option<u8>,
    selected: bool,
    lookup: HashMap<LabelVector, usize>,
}

impl IndexCodebook {
    /// Complete pattern set of `variant` in enumeration order.
    pub fn build(variant: Variant, n: usize) -> Result<Self> {
        variant.validate(n)?;
        if n > MAX_ENUMERATION_ELEMENTS {
            return Err(Error::Parameter(format!(
                "pattern enumeration is limited to N <= {MAX_ENUMERATION_ELEMENTS}, got {n}"
            )));
        }
        let patterns = enumerate_patterns(variant, n)?;
        Self::from_patterns(variant, n, patterns)
    }

    /// Book from an explicit pattern list (e.g. a published look-up table).
    pub fn from_patterns(variant: Variant, n: usize, patterns: Vec<LabelVector>) -> Result<Self> {
        variant.validate(n)?;
        if patterns.is_empty() {
            return Err(Error::Parameter("codebook needs at least one pattern".into()));
        }
        let num_constellations = variant.num_constellations(n);
        let null_label = match variant {
            Variant::OfdmIm { .. } => Some(1u8),
            _ => None,
        };
        let label_limit = num_constellations + usize::from(null_label.is_some());
        let mut lookup = HashMap::with_capacity(patterns.len());
        for (i, p) in patterns.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Parameter(format!("pattern {p} has length {}, expected {n}", p.len())));
            }
            if let Some(&l) = p.labels().iter().find(|&&l| l as usize >= label_limit) {
                return Err(Error::Parameter(format!("pattern {p} uses label {l}, only {label_limit} available")));
            }
            if let Some(null) = null_label {
                let active = p.labels().iter().filter(|&&l| l != null).count();
                if active != variant.active_subcarriers(n) {
                    return Err(Error::Parameter(format!("pattern {p} has {active} active subcarriers")));
                }
            }
            if lookup.insert(p.clone(), i).is_some() {
                return Err(Error::Parameter(format!("duplicate pattern {p}")));
            }
        }
        Ok(Self { variant, n, patterns, num_constellations, null_label, selected: false, lookup })
    }

    /// Keeps the patterns at `indices` (ascending original order), truncated to
    /// the largest power of two. The kept set must have pairwise Hamming
    /// distance at least two.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.len() != indices.len() {
            return Err(Error::Parameter("selection contains repeated indices".into()));
        }
        if idx.is_empty() {
            return Err(Error::Parameter("empty selection".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.patterns.len()) {
            return Err(Error::Range(format!("pattern index {bad} >= {}", self.patterns.len())));
        }
        let keep = 1usize << idx.len().ilog2();
        idx.truncate(keep);
        let patterns: Vec<LabelVector> = idx.iter().map(|&i| self.patterns[i].clone()).collect();
        for (a, p) in patterns.iter().enumerate() {
            for q in &patterns[a + 1..] {
                if p.hamming_distance(q) < 2 {
                    return Err(Error::Parameter(format!("selected patterns {p} and {q} differ in one position")));
                }
            }
        }
        let mut book = Self::from_patterns(self.variant, self.n, patterns)?;
        book.selected = true;
        Ok(book)
    }

    /// Appends the lexicographically smallest patterns of the full set that
    /// are not yet present until the book holds `target` patterns. The result
    /// is no longer a selected book.
    pub fn padded(&self, target: usize) -> Result<Self> {
        if target <= self.patterns.len() {
            let mut book = self.clone();
            book.selected = false;
            return Ok(book);
        }
        let mut pool = enumerate_patterns(self.variant, self.n)?;
        pool.sort();
        let mut patterns = self.patterns.clone();
        for p in pool {
            if patterns.len() == target {
                break;
            }
            if !self.lookup.contains_key(&p) {
                patterns.push(p);
            }
        }
        if patterns.len() < target {
            return Err(Error::Parameter(format!("only {} patterns exist, cannot pad to {target}", patterns.len())));
        }
        Self::from_patterns(self.variant, self.n, patterns)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn patterns(&self) -> &[LabelVector] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn is_selected(&self) -> bool {
        self.selected
    }

    pub fn num_constellations(&self) -> usize {
        self.num_constellations
    }

    pub fn null_label(&self) -> Option<u8> {
        self.null_label
    }

    /// f1 = floor(log2 |patterns|).
    pub fn index_bits(&self) -> u32 {
        self.patterns.len().ilog2()
    }

    /// The `2^f1` patterns reachable from bit words.
    pub fn mapped(&self) -> &[LabelVector] {
        &self.patterns[..1usize << self.index_bits()]
    }

    pub fn active_subcarriers(&self) -> usize {
        self.variant.active_subcarriers(self.n)
    }

    /// f2 = active subcarriers x log2 M.
    pub fn mod_bits(&self, m: usize) -> u32 {
        self.active_subcarriers() as u32 * m.ilog2()
    }

    pub fn bits_to_pattern(&self, bits: u64) -> Result<&LabelVector> {
        let f1 = self.index_bits();
        if bits >> f1 != 0 {
            return Err(Error::Range(format!("index word {bits} does not fit in {f1} bits")));
        }
        Ok(&self.patterns[bits as usize])
    }

    pub fn pattern_to_bits(&self, pattern: &LabelVector) -> Result<u64> {
        match self.lookup.get(pattern) {
            Some(&i) if i < 1usize << self.index_bits() => Ok(i as u64),
            Some(_) => Err(Error::Range(format!("pattern {pattern} lies outside the mapped range"))),
            None => Err(Error::Range(format!("pattern {pattern} is not in the codebook"))),
        }
    }

    /// Per-symbol amplitude on active subcarriers so that block energy is N.
    pub fn active_amplitude(&self) -> f64 {
        (self.n as f64 / self.active_subcarriers() as f64).sqrt()
    }

    /// Places Gray-decoded symbols of `mod_bits` on the subcarriers of
    /// `pattern`.
    pub fn expand<T: Real>(
        &self,
        pattern: &LabelVector,
        mod_bits: u64,
        family: &ConstellationFamily<T>,
    ) -> Result<FullCodeword<T>> {
        if family.len() < self.num_constellations {
            return Err(Error::Parameter(format!(
                "codebook needs {} constellations, family has {}",
                self.num_constellations,
                family.len()
            )));
        }
        if pattern.len() != self.n {
            return Err(Error::Parameter(format!("pattern {pattern} has length {}", pattern.len())));
        }
        let b = family.bits_per_symbol();
        let f2 = self.active_subcarriers() as u32 * b;
        if f2 < 64 && mod_bits >> f2 != 0 {
            return Err(Error::Width { expected: f2, actual: 64 - mod_bits.leading_zeros() });
        }
        let amp = T::lit(self.active_amplitude());
        let mask = (1u64 << b) - 1;
        let mut symbols = Vec::with_capacity(self.n);
        let mut mod_choices = Vec::with_capacity(self.n);
        let mut slot = 0u32;
        for &label in pattern.labels() {
            if Some(label) == self.null_label {
                symbols.push(Complex::new(T::zero(), T::zero()));
                mod_choices.push(None);
                continue;
            }
            let shift = f2 - b * (slot + 1);
            let choice = ((mod_bits >> shift) & mask) as usize;
            symbols.push(family.member(label as usize).point(choice) * amp);
            mod_choices.push(Some(choice));
            slot += 1;
        }
        Ok(FullCodeword { symbols, pattern: pattern.clone(), mod_choices })
    }

    /// Export: header `variant N K M count`, then one pattern per line.
    pub fn export_text(&self, m: usize) -> String {
        let mut s = format!(
            "{} {} {} {} {}\n",
            self.variant.name(),
            self.n,
            self.variant.k_param(self.n),
            m,
            self.patterns.len()
        );
        for p in &self.patterns {
            s.push_str(&p.to_string());
            s.push('\n');
        }
        s
    }
}

fn enumerate_patterns(variant: Variant, n: usize) -> Result<Vec<LabelVector>> {
    let lv = |v: Vec<u8>| LabelVector::new(v).expect("non-empty pattern");
    Ok(match variant {
        Variant::Ofdm => vec![lv(vec![0; n])],
        Variant::Spm { k } => enumerate_partitions(n, k)?,
        Variant::Ospm { k } => enumerate_ordered_partitions(n, k)?,
        Variant::Fspm => {
            let mut all = Vec::new();
            for k in 1..=n {
                all.extend(enumerate_partitions(n, k)?);
            }
            all
        }
        Variant::Ofspm => {
            let mut all = Vec::new();
            for k in 1..=n {
                all.extend(enumerate_ordered_partitions(n, k)?);
            }
            all
        }
        // label 0 marks the chosen positions, 1 the rest
        Variant::OfdmIm { active: r } | Variant::DmOfdmIm { d: r } => {
            let mut combo: Vec<usize> = (0..r).collect();
            let mut out = Vec::new();
            loop {
                let mut v = vec![1u8; n];
                for &c in &combo {
                    v[c] = 0;
                }
                out.push(lv(v));
                if !next_combination(&mut combo, n) {
                    break;
                }
            }
            out
        }
        Variant::MmOfdmIm => permutations(n).into_iter().map(lv).collect(),
        Variant::GdmOfdmIm => (0..1u64 << n)
            .map(|w| lv((0..n).map(|i| ((w >> (n - 1 - i)) & 1) as u8).collect()))
            .collect(),
    })
}

/// A pattern with its symbols; `mod_choices[n]` is the point label used on
/// subcarrier `n`, `None` on inactive subcarriers.
#[derive(Debug, Clone, PartialEq)]
pub struct FullCodeword<T> {
    pub symbols: Vec<Complex<T>>,
    pub pattern: LabelVector,
    pub mod_choices: Vec<Option<usize>>,
}

/// An index codebook bound to a constellation family.
#[derive(Debug, Clone)]
pub struct Scheme<T> {
    book: IndexCodebook,
    family: ConstellationFamily<T>,
}

impl<T: Real> Scheme<T> {
    pub fn new(book: IndexCodebook, family: ConstellationFamily<T>) -> Result<Self> {
        if family.len() < book.num_constellations() {
            return Err(Error::Parameter(format!(
                "{} needs {} constellations, family has {}",
                book.variant(),
                book.num_constellations(),
                family.len()
            )));
        }
        let f = book.index_bits() + book.mod_bits(family.order());
        if f > 40 {
            return Err(Error::Parameter(format!("{f} bits per block is beyond exhaustive detection")));
        }
        Ok(Self { book, family })
    }

    pub fn book(&self) -> &IndexCodebook {
        &self.book
    }

    pub fn family(&self) -> &ConstellationFamily<T> {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.book.n()
    }

    pub fn index_bits(&self) -> u32 {
        self.book.index_bits()
    }

    pub fn mod_bits(&self) -> u32 {
        self.book.mod_bits(self.family.order())
    }

    /// f = f1 + f2.
    pub fn bits(&self) -> u32 {
        self.index_bits() + self.mod_bits()
    }

    pub fn num_codewords(&self) -> usize {
        1usize << self.bits()
    }

    pub fn split_word(&self, word: u64) -> (u64, u64) {
        let f2 = self.mod_bits();
        (word >> f2, word & ((1u64 << f2) - 1))
    }

    /// Maps an `f`-bit word to its codeword.
    pub fn transmit(&self, word: u64) -> Result<FullCodeword<T>> {
        let f = self.bits();
        if word >> f != 0 {
            return Err(Error::Width { expected: f, actual: 64 - word.leading_zeros() });
        }
        let (index, modulation) = self.split_word(word);
        let pattern = self.book.bits_to_pattern(index)?;
        self.book.expand(pattern, modulation, &self.family)
    }

    /// All `2^f` codewords, position = bit word.
    pub fn all_codewords(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.num_codewords() as u64)
            .map(|w| self.transmit(w).expect("word in range").symbols)
            .collect()
    }

    pub fn rate(&self) -> Result<RateFigures> {
        rate(
            self.book.variant(),
            self.n(),
            self.family.order(),
            Some(BigCount::from(self.book.len() as u64)),
        )
    }
}

/// Distance summary of a full codebook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dmin<T> {
    pub d_min: T,
    /// Minimum distance among pairs whose difference has rank `min_rank`.
    pub d_min_rank_limited: T,
    /// Smallest number of subcarriers on which two codewords differ.
    pub min_rank: usize,
}

/// Global and rank-limited minimum Euclidean distances of a codeword list.
pub fn codebook_dmin<T: Real>(codewords: &[Vec<Complex<T>>]) -> Result<Dmin<T>> {
    if codewords.len() < 2 {
        return Err(Error::Parameter("need at least two codewords".into()));
    }
    let n = codewords[0].len();
    if codewords.iter().any(|c| c.len() != n) {
        return Err(Error::Parameter("codewords of unequal length".into()));
    }
    let tol = T::epsilon() * T::lit(64.0);
    // per row: (d2_min, rank_min, d2 at rank_min)
    let rows: Vec<(T, usize, T)> = (0..codewords.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (T::infinity(), usize::MAX, T::infinity());
            for j in i + 1..codewords.len() {
                let mut d2 = T::zero();
                let mut rank = 0;
                for (a, b) in codewords[i].iter().zip(&codewords[j]) {
                    let e = norm_sqr(*a - *b);
                    if e > tol {
                        rank += 1;
                    }
                    d2 = d2 + e;
                }
                best.0 = best.0.min(d2);
                if rank < best.1 {
                    best.1 = rank;
                    best.2 = d2;
                } else if rank == best.1 {
                    best.2 = best.2.min(d2);
                }
            }
            best
        })
        .collect();
    let mut d2 = T::infinity();
    let mut rank = usize::MAX;
    let mut d2_rank = T::infinity();
    for (a, r, b) in rows {
        d2 = d2.min(a);
        if r < rank {
            rank = r;
            d2_rank = b;
        } else if r == rank {
            d2_rank = d2_rank.min(b);
        }
    }
    Ok(Dmin { d_min: d2.sqrt(), d_min_rank_limited: d2_rank.sqrt(), min_rank: rank })
}

/// Bit budget and spectral efficiency of a scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFigures {
    pub f1: u32,
    pub f2: u32,
    /// (f1 + f2) / N.
    pub rate: f64,
    /// (log2 |full set| + f2) / N.
    pub raw_rate: f64,
    /// log2 |full set| / N.
    pub raw_index_rate: f64,
}

/// Rate of `variant` on N subcarriers with M-ary constellations. `usable`
/// overrides the pattern count used for f1 (e.g. after selection).
pub fn rate(variant: Variant, n: usize, m: usize, usable: Option<BigCount>) -> Result<RateFigures> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::Parameter(format!("M = {m} is not a power of two >= 2")));
    }
    let full = variant.full_count(n)?;
    let count = usable.unwrap_or_else(|| full.clone());
    if count.is_zero() || count.as_biguint() > full.as_biguint() {
        return Err(Error::Parameter(format!("usable pattern count {count} outside 1..={full}")));
    }
    let f1 = count.floor_log2().expect("non-zero count") as u32;
    let f2 = variant.active_subcarriers(n) as u32 * m.ilog2();
    let nf = n as f64;
    let raw_index = full.log2();
    Ok(RateFigures {
        f1,
        f2,
        rate: (f1 + f2) as f64 / nf,
        raw_rate: (raw_index + f2 as f64) / nf,
        raw_index_rate: raw_index / nf,
    })
}

/// Large-N limit of the rate for a fixed number of constellations `k`
/// (SPM/OSPM): log2(K M).
pub fn asymptotic_rate(k: usize, m: usize) -> f64 {
    ((k * m) as f64).log2()
}

/// Large-N behaviour of the rate at the best K: log2(N / ln N) + log2 M -
/// log2 e for SPM and FSPM, log2 N + log2 M - log2(e ln 2) for OSPM and
/// OFSPM.
pub fn asymptotic_max_rate(variant: Variant, n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Parameter("asymptote needs N >= 2".into()));
    }
    let nf = n as f64;
    let log2e = std::f64::consts::LOG2_E;
    let lm = (m as f64).log2();
    match variant {
        Variant::Spm { .. } | Variant::Fspm => Ok((nf / nf.ln()).log2() + lm - log2e),
        Variant::Ospm { .. } | Variant::Ofspm => {
            Ok(nf.log2() + lm - (std::f64::consts::E * std::f64::consts::LN_2).log2())
        }
        other => Err(Error::Parameter(format!("no maximum-rate asymptote for {other}"))),
    }
}

pub const RATE_CSV_HEADER: &str = "variant,N,K,M,f1,f2,rate,raw_rate";

pub fn rate_csv_row(variant: Variant, n: usize, m: usize, r: &RateFigures) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        variant.name(),
        n,
        variant.k_param(n),
        m,
        r.f1,
        r.f2,
        format_sig(r.rate, 9),
        format_sig(r.raw_rate, 9)
    )
}
