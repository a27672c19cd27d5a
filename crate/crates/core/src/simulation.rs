//! Frequency-domain Monte-Carlo link model `y = sqrt(Es) h . x + n` with
//! i.i.d. Rayleigh fading per subcarrier, ML detection, BER counting and the
//! mutual-information achievable-rate estimator.
//!
//! Es = 1 and N0 = 10^(-snr_db / 10).

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::codebook::Scheme;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, RATE_STREAM};
use crate::scalar::{format_sig, norm_sqr, CompensatedSum, Real};

pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

/// Circularly-symmetric complex Gaussian with unit total variance.
#[inline]
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    let s = T::FRAC_1_SQRT_2();
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re * s, im * s)
}

/// Channel and noise of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockChannel<T> {
    pub h: Vec<Complex<T>>,
    pub n: Vec<Complex<T>>,
    pub es: T,
    pub n0: T,
}

impl<T: Real> BlockChannel<T>
where
    StandardNormal: Distribution<T>,
{
    pub fn draw<R: Rng + ?Sized>(rng: &mut R, len: usize, es: T, n0: T) -> Self {
        let h = (0..len).map(|_| complex_gaussian(rng)).collect();
        let sd = n0.sqrt();
        let n = (0..len).map(|_| complex_gaussian::<T, R>(rng) * sd).collect();
        Self { h, n, es, n0 }
    }

    pub fn receive(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let a = self.es.sqrt();
        x.iter().zip(&self.h).zip(&self.n).map(|((&x, &h), &n)| h * x * a + n).collect()
    }
}

/// `||y - sqrt(Es) h . x||^2`.
pub fn ml_metric<T: Real>(y: &[Complex<T>], h: &[Complex<T>], x: &[Complex<T>], es: T) -> T {
    let a = es.sqrt();
    y.iter().zip(h).zip(x).fold(T::zero(), |acc, ((&y, &h), &x)| acc + norm_sqr(y - h * x * a))
}

/// Exhaustive ML search; the lowest candidate index wins ties.
pub fn ml_detect<T: Real>(y: &[Complex<T>], h: &[Complex<T>], candidates: &[Vec<Complex<T>>], es: T) -> usize {
    let mut best = 0;
    let mut best_metric = T::infinity();
    for (i, x) in candidates.iter().enumerate() {
        let m = ml_metric(y, h, x, es);
        if m < best_metric {
            best_metric = m;
            best = i;
        }
    }
    best
}

/// ML detector exploiting that, for a fixed pattern, the symbols on
/// different subcarriers are chosen independently: the minimum over
/// modulation bits splits into per-subcarrier minima. Returns the same word
/// as [`ml_detect`] over `scheme.all_codewords()`.
#[derive(Debug, Clone)]
pub struct Detector<T> {
    n: usize,
    bits_per_symbol: u32,
    mod_bits: u32,
    patterns: Vec<Vec<u8>>,
    /// Scaled points of each label; empty for the null label.
    alphabets: Vec<Vec<Complex<T>>>,
}

/// Reusable buffers for [`Detector::detect`].
#[derive(Debug, Clone, Default)]
pub struct DetectScratch<T> {
    metric: Vec<T>,
    choice: Vec<usize>,
}

impl<T: Real> Detector<T> {
    pub fn new(scheme: &Scheme<T>) -> Self {
        let book = scheme.book();
        let amp = T::lit(book.active_amplitude());
        let labels = book.num_constellations() + usize::from(book.null_label().is_some());
        let alphabets = (0..labels)
            .map(|l| {
                if Some(l as u8) == book.null_label() {
                    Vec::new()
                } else {
                    scheme.family().member(l).points().iter().map(|&p| p * amp).collect()
                }
            })
            .collect();
        Self {
            n: scheme.n(),
            bits_per_symbol: scheme.family().bits_per_symbol(),
            mod_bits: scheme.mod_bits(),
            patterns: book.mapped().iter().map(|p| p.labels().to_vec()).collect(),
            alphabets,
        }
    }

    pub fn detect(&self, y: &[Complex<T>], h: &[Complex<T>], es: T, scratch: &mut DetectScratch<T>) -> u64 {
        let labels = self.alphabets.len();
        let a = es.sqrt();
        scratch.metric.clear();
        scratch.choice.clear();
        for k in 0..self.n {
            let g = h[k] * a;
            for alphabet in &self.alphabets {
                if alphabet.is_empty() {
                    scratch.metric.push(norm_sqr(y[k]));
                    scratch.choice.push(0);
                    continue;
                }
                let mut best = T::infinity();
                let mut arg = 0;
                for (c, &p) in alphabet.iter().enumerate() {
                    let m = norm_sqr(y[k] - g * p);
                    if m < best {
                        best = m;
                        arg = c;
                    }
                }
                scratch.metric.push(best);
                scratch.choice.push(arg);
            }
        }
        let mut best_pattern = 0;
        let mut best_metric = T::infinity();
        for (i, p) in self.patterns.iter().enumerate() {
            let mut m = T::zero();
            for (k, &l) in p.iter().enumerate() {
                m = m + scratch.metric[k * labels + l as usize];
            }
            if m < best_metric {
                best_metric = m;
                best_pattern = i;
            }
        }
        let mut mod_bits = 0u64;
        for (k, &l) in self.patterns[best_pattern].iter().enumerate() {
            if !self.alphabets[l as usize].is_empty() {
                mod_bits = (mod_bits << self.bits_per_symbol) | scratch.choice[k * labels + l as usize] as u64;
            }
        }
        ((best_pattern as u64) << self.mod_bits) | mod_bits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub snr_db: Vec<f64>,
    pub min_bit_errors: u64,
    pub max_blocks: u64,
    pub seed: u64,
    /// Blocks per batch; the stopping rule is checked between batches.
    pub batch_blocks: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { snr_db: vec![0.0], min_bit_errors: 200, max_blocks: 10_000_000, seed: 1, batch_blocks: 4096 }
    }
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Parameter("SNR grid is empty".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Parameter("SNR values must be finite".into()));
        }
        if self.max_blocks == 0 || self.batch_blocks == 0 {
            return Err(Error::Parameter("max_blocks and batch_blocks must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    blocks: u64,
    bit_errors: u64,
    index_bit_errors: u64,
    mod_bit_errors: u64,
    sum_sq: u64,
}

impl Tally {
    fn merge(self, o: Self) -> Self {
        Self {
            blocks: self.blocks + o.blocks,
            bit_errors: self.bit_errors + o.bit_errors,
            index_bit_errors: self.index_bit_errors + o.index_bit_errors,
            mod_bit_errors: self.mod_bit_errors + o.mod_bit_errors,
            sum_sq: self.sum_sq + o.sum_sq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub blocks: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub index_bit_errors: u64,
    pub mod_bit_errors: u64,
    /// Sum over blocks of the squared per-block bit-error count.
    pub sum_sq_errors: u64,
    pub converged: bool,
    pub index_bits_per_block: u32,
    pub mod_bits_per_block: u32,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.bit_errors as f64 / self.bits as f64
    }

    /// Index-bit errors over index bits sent.
    pub fn index_ber(&self) -> f64 {
        let sent = self.blocks * self.index_bits_per_block as u64;
        if sent == 0 {
            0.0
        } else {
            self.index_bit_errors as f64 / sent as f64
        }
    }

    /// Modulation-bit errors over modulation bits sent.
    pub fn mod_ber(&self) -> f64 {
        let sent = self.blocks * self.mod_bits_per_block as u64;
        if sent == 0 {
            0.0
        } else {
            self.mod_bit_errors as f64 / sent as f64
        }
    }

    /// Standard error of the BER estimate from the per-block error counts.
    pub fn ber_stderr(&self) -> f64 {
        let b = self.blocks as f64;
        let f = (self.index_bits_per_block + self.mod_bits_per_block) as f64;
        let mean = self.bit_errors as f64 / b;
        let var = (self.sum_sq_errors as f64 / b - mean * mean).max(0.0) * b / (b - 1.0).max(1.0);
        (var / b).sqrt() / f
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerReport {
    pub points: Vec<BerPoint>,
}

impl BerReport {
    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

pub const BER_CSV_HEADER: &str = "snr_db,bits,errors,ber,index_ber,mod_ber,converged";

pub fn ber_csv_row(p: &BerPoint) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        format_sig(p.snr_db, 9),
        p.bits,
        p.bit_errors,
        format_sig(p.ber(), 9),
        format_sig(p.index_ber(), 9),
        format_sig(p.mod_ber(), 9),
        p.converged
    )
}

/// Runs every SNR point until `min_bit_errors` or `max_blocks`. Block `b` of
/// SNR point `s` always uses stream `(seed, s, b)`.
pub fn simulate_ber<T: Real>(scheme: &Scheme<T>, cfg: &SimConfig) -> Result<BerReport>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    let detector = Detector::new(scheme);
    let codewords = scheme.all_codewords();
    let f = scheme.bits();
    let f2 = scheme.mod_bits();
    let n = scheme.n();
    let mut points = Vec::with_capacity(cfg.snr_db.len());
    for (s, &snr) in cfg.snr_db.iter().enumerate() {
        let n0 = T::lit(noise_variance(snr));
        let mut tally = Tally::default();
        while tally.blocks < cfg.max_blocks && tally.bit_errors < cfg.min_bit_errors {
            let start = tally.blocks;
            let end = (start + cfg.batch_blocks).min(cfg.max_blocks);
            let batch = (start..end)
                .into_par_iter()
                .map_init(DetectScratch::default, |scratch, b| {
                    let mut rng = stream_rng(cfg.seed, s as u64, b);
                    let word = rng.random_range(0..1u64 << f);
                    let ch = BlockChannel::draw(&mut rng, n, T::one(), n0);
                    let y = ch.receive(&codewords[word as usize]);
                    let est = detector.detect(&y, &ch.h, T::one(), scratch);
                    let diff = word ^ est;
                    let e = diff.count_ones() as u64;
                    Tally {
                        blocks: 1,
                        bit_errors: e,
                        index_bit_errors: (diff >> f2).count_ones() as u64,
                        mod_bit_errors: (diff & ((1u64 << f2) - 1)).count_ones() as u64,
                        sum_sq: e * e,
                    }
                })
                .reduce(Tally::default, Tally::merge);
            tally = tally.merge(batch);
        }
        points.push(BerPoint {
            snr_db: snr,
            blocks: tally.blocks,
            bits: tally.blocks * f as u64,
            bit_errors: tally.bit_errors,
            index_bit_errors: tally.index_bit_errors,
            mod_bit_errors: tally.mod_bit_errors,
            sum_sq_errors: tally.sum_sq,
            converged: tally.bit_errors >= cfg.min_bit_errors,
            index_bits_per_block: scheme.index_bits(),
            mod_bits_per_block: f2,
        });
    }
    Ok(BerReport { points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    pub snr_db: Vec<f64>,
    pub draws: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub snr_db: f64,
    /// Bits per subcarrier.
    pub rate: f64,
    pub stderr: f64,
    pub draws: u64,
}

pub const RATE_MC_CSV_HEADER: &str = "snr_db,rate,stderr,draws";

pub fn rate_mc_csv_row(p: &RatePoint) -> String {
    format!("{},{},{},{}", format_sig(p.snr_db, 9), format_sig(p.rate, 9), format_sig(p.stderr, 9), p.draws)
}

/// Achievable rate `(f - E[log2 sum_j exp(delta(i, j))]) / N` with
/// `delta(i, j) = (-|h . (x_i - x_j) + n|^2 + |n|^2) / N0`, averaged over
/// uniformly drawn `i` and channel draws. Draw `d` uses the same transmitted
/// index, fading and unit-variance noise shape at every SNR, so curves over
/// SNR are paired.
pub fn estimate_rate<T: Real>(scheme: &Scheme<T>, cfg: &RateConfig) -> Result<Vec<RatePoint>>
where
    StandardNormal: Distribution<T>,
{
    if cfg.snr_db.is_empty() {
        return Err(Error::Parameter("SNR grid is empty".into()));
    }
    if cfg.draws < 2 {
        return Err(Error::Parameter("need at least two draws".into()));
    }
    let codewords = scheme.all_codewords();
    let f = scheme.bits();
    let n = scheme.n();
    let mut out = Vec::with_capacity(cfg.snr_db.len());
    for &snr in &cfg.snr_db {
        let n0 = noise_variance(snr);
        let sd = T::lit(n0.sqrt());
        let inv_n0 = T::lit(1.0 / n0);
        let losses: Vec<f64> = (0..cfg.draws)
            .into_par_iter()
            .map_init(Vec::new, |deltas: &mut Vec<f64>, d| {
                let mut rng = stream_rng(cfg.seed, RATE_STREAM, d);
                let i = rng.random_range(0..1u64 << f) as usize;
                let unit = BlockChannel::<T>::draw(&mut rng, n, T::one(), T::one());
                let noise: Vec<Complex<T>> = unit.n.iter().map(|&z| z * sd).collect();
                let base: T = noise.iter().map(|&z| norm_sqr(z)).sum();
                let xi = &codewords[i];
                deltas.clear();
                for xj in &codewords {
                    let mut m = T::zero();
                    for k in 0..n {
                        m = m + norm_sqr(unit.h[k] * (xi[k] - xj[k]) + noise[k]);
                    }
                    deltas.push(((base - m) * inv_n0).to_f64_lossy());
                }
                let top = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let s: f64 = deltas.iter().map(|&v| (v - top).exp()).sum();
                (top + s.ln()) * std::f64::consts::LOG2_E
            })
            .collect();
        let sum: CompensatedSum = losses.iter().copied().collect();
        let mean = sum.value() / cfg.draws as f64;
        let var: CompensatedSum = losses.iter().map(|&l| (l - mean) * (l - mean)).collect();
        let var = var.value() / (cfg.draws - 1) as f64;
        out.push(RatePoint {
            snr_db: snr,
            rate: (f as f64 - mean) / n as f64,
            stderr: (var / cfg.draws as f64).sqrt() / n as f64,
            draws: cfg.draws,
        });
    }
    Ok(out)
}
