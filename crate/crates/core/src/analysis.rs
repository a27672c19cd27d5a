//! Pairwise error probabilities over Rayleigh fading and the union bound on
//! the bit error rate.
//!
//! `es_n0` is the linear Es/N0. For a codeword pair, `z` holds the diagonal
//! of `(X_i - X_j)^H (X_i - X_j)`, i.e. `|x_i[n] - x_j[n]|^2`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rayon::prelude::*;
use libm::erfc;

use crate::codebook::Scheme;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::{format_sig, norm_sqr, CompensatedSum, Real};

/// Gaussian tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Two-exponential approximation `e^{-x^2/2}/12 + e^{-2x^2/3}/4`.
pub fn q_approx(x: f64) -> f64 {
    (-x * x / 2.0).exp() / 12.0 + (-2.0 * x * x / 3.0).exp() / 4.0
}

/// PEP for a known channel: `Q(sqrt(es_n0 * sum_n z[n] |h[n]|^2 / 2))`.
pub fn pep_conditional<T: Real>(z: &[T], h: &[Complex<T>], es_n0: T) -> Result<T> {
    if z.len() != h.len() {
        return Err(Error::Parameter(format!("z has {} entries, h has {}", z.len(), h.len())));
    }
    let energy: T = z.iter().zip(h).map(|(&z, &h)| z * norm_sqr(h)).sum();
    let arg = (es_n0 * energy / T::lit(2.0)).to_f64_lossy().sqrt();
    Ok(T::lit(q_function(arg)))
}

fn check_z<T: Real>(z: &[T]) -> Result<()> {
    if z.iter().any(|&v| v < T::zero() || !v.is_finite()) {
        return Err(Error::Parameter("distance profile entries must be finite and non-negative".into()));
    }
    Ok(())
}

/// Fading-averaged PEP using the two-exponential Q approximation, for i.i.d.
/// unit-variance fading (`C = I`):
/// `(1/12) / prod(1 + es_n0 z / 4) + (1/4) / prod(1 + es_n0 z / 3)`.
pub fn pep_unconditional<T: Real>(z: &[T], es_n0: T) -> Result<T> {
    check_z(z)?;
    let a = es_n0 / T::lit(4.0);
    let b = es_n0 / T::lit(3.0);
    let (mut pa, mut pb) = (T::one(), T::one());
    for &v in z {
        pa = pa * (T::one() + a * v);
        pb = pb * (T::one() + b * v);
    }
    Ok(T::lit(1.0 / 12.0) / pa + T::lit(0.25) / pb)
}

/// Same approximation for a general Hermitian PSD channel correlation `c`:
/// `(1/12) / det(I + es_n0/4 C Z) + (1/4) / det(I + es_n0/3 C Z)`. The
/// determinants are taken of the Hermitian form `I + a Z^{1/2} C Z^{1/2}`
/// through a Cholesky factorisation.
pub fn pep_unconditional_correlated<T: Real>(z: &[T], c: &DMatrix<Complex<T>>, es_n0: T) -> Result<T> {
    check_z(z)?;
    let n = z.len();
    if c.nrows() != n || c.ncols() != n {
        return Err(Error::Parameter(format!("correlation matrix is {}x{}, expected {n}x{n}", c.nrows(), c.ncols())));
    }
    let det = |a: T| -> Result<T> {
        let root: Vec<T> = z.iter().map(|v| v.sqrt()).collect();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let eye = if i == j { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) };
            eye + c[(i, j)] * (a * root[i] * root[j])
        });
        hermitian_pd_det(&m)
    };
    Ok(T::lit(1.0 / 12.0) / det(es_n0 / T::lit(4.0))? + T::lit(0.25) / det(es_n0 / T::lit(3.0))?)
}

/// Determinant of a Hermitian positive-definite matrix as the squared
/// product of the Cholesky diagonal.
pub fn hermitian_pd_det<T: Real>(m: &DMatrix<Complex<T>>) -> Result<T> {
    let n = m.nrows();
    let mut l = DMatrix::from_element(n, n, Complex::new(T::zero(), T::zero()));
    let mut det = T::one();
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d = d - norm_sqr(l[(j, k)]);
        }
        // also rejects NaN
        if d.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::Domain("matrix is not positive definite".into()));
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex::new(djj, T::zero());
        det = det * d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(det)
}

/// High-SNR form over the support of `z`:
/// `(1/12) / prod(es_n0 z / 4) + (1/4) / prod(es_n0 z / 3)`.
pub fn pep_asymptotic<T: Real>(z: &[T], es_n0: T) -> Result<T> {
    check_z(z)?;
    if es_n0.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain("high-SNR form needs es_n0 > 0".into()));
    }
    let support: Vec<T> = z.iter().copied().filter(|&v| v > T::zero()).collect();
    if support.is_empty() {
        return Err(Error::Domain("identical codewords have no high-SNR form".into()));
    }
    let a = es_n0 / T::lit(4.0);
    let b = es_n0 / T::lit(3.0);
    let pa = support.iter().fold(T::one(), |p, &v| p * a * v);
    let pb = support.iter().fold(T::one(), |p, &v| p * b * v);
    Ok(T::lit(1.0 / 12.0) / pa + T::lit(0.25) / pb)
}

/// Diagonal distance profile of a codeword pair.
pub fn distance_profile<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| norm_sqr(x - y)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnionBound {
    pub ber: f64,
    pub pairs: u64,
    pub exact: bool,
    /// Standard error of a sampled estimate; zero when exact.
    pub stderr: f64,
}

fn check_labels<T>(codewords: &[Vec<Complex<T>>], labels: &[u64], bits: u32) -> Result<()> {
    if codewords.len() != labels.len() {
        return Err(Error::Parameter("one bit label per codeword required".into()));
    }
    if codewords.len() < 2 || bits == 0 {
        return Err(Error::Parameter("union bound needs at least two codewords".into()));
    }
    Ok(())
}

/// `(1 / (f 2^f)) sum_i sum_{j != i} P(i -> j) popcount(label_i ^ label_j)`,
/// enumerating every ordered pair. `2^f` is taken as the codeword count.
pub fn union_bound_ber<T: Real>(codewords: &[Vec<Complex<T>>], labels: &[u64], bits: u32, es_n0: T) -> Result<UnionBound> {
    check_labels(codewords, labels, bits)?;
    let rows: Vec<f64> = (0..codewords.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = CompensatedSum::new();
            for j in 0..codewords.len() {
                if i == j {
                    continue;
                }
                let d = (labels[i] ^ labels[j]).count_ones();
                if d == 0 {
                    continue;
                }
                let z = distance_profile(&codewords[i], &codewords[j]);
                let p = pep_unconditional(&z, es_n0).expect("non-negative profile");
                acc.add(p.to_f64_lossy() * d as f64);
            }
            acc.value()
        })
        .collect();
    let total: CompensatedSum = rows.into_iter().collect();
    let count = codewords.len() as f64;
    let pairs = (codewords.len() * (codewords.len() - 1)) as u64;
    Ok(UnionBound { ber: total.value() / (bits as f64 * count), pairs, exact: true, stderr: 0.0 })
}

/// Unbiased estimate of [`union_bound_ber`] from `samples` uniformly drawn
/// ordered pairs `i != j`.
pub fn union_bound_ber_sampled<T: Real>(
    codewords: &[Vec<Complex<T>>],
    labels: &[u64],
    bits: u32,
    es_n0: T,
    samples: u64,
    seed: u64,
) -> Result<UnionBound> {
    check_labels(codewords, labels, bits)?;
    if samples < 2 {
        return Err(Error::Parameter("need at least two samples".into()));
    }
    let l = codewords.len();
    let terms: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, u64::MAX - 1, s);
            let i = rng.random_range(0..l);
            let mut j = rng.random_range(0..l - 1);
            if j >= i {
                j += 1;
            }
            let d = (labels[i] ^ labels[j]).count_ones() as f64;
            let z = distance_profile(&codewords[i], &codewords[j]);
            pep_unconditional(&z, es_n0).expect("non-negative profile").to_f64_lossy() * d
        })
        .collect();
    let sum: CompensatedSum = terms.iter().copied().collect();
    let mean = sum.value() / samples as f64;
    let var: CompensatedSum = terms.iter().map(|&t| (t - mean) * (t - mean)).collect();
    let var = var.value() / (samples - 1) as f64;
    // total = L (L - 1) * mean, normalised by f L
    let scale = (l - 1) as f64 / bits as f64;
    Ok(UnionBound { ber: mean * scale, pairs: samples, exact: false, stderr: (var / samples as f64).sqrt() * scale })
}

/// Exact union bound of a scheme, codeword index = bit word.
pub fn scheme_union_bound<T: Real>(scheme: &Scheme<T>, es_n0: T) -> Result<UnionBound> {
    let cws = scheme.all_codewords();
    let labels: Vec<u64> = (0..cws.len() as u64).collect();
    union_bound_ber(&cws, &labels, scheme.bits(), es_n0)
}

pub const BOUND_CSV_HEADER: &str = "snr_db,bound_ber,pairs_enumerated,exact_flag";

pub fn bound_csv_row(snr_db: f64, b: &UnionBound) -> String {
    format!("{},{},{},{}", format_sig(snr_db, 9), format_sig(b.ber, 9), b.pairs, b.exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{IndexCodebook, Variant};
    use crate::constellations::psk_family;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    // composite Simpson rule on the Gaussian density
    fn q_quadrature(x: f64) -> f64 {
        let (a, b, n) = (x, x + 40.0, 400_000usize);
        let h = (b - a) / n as f64;
        let pdf = |t: f64| (-t * t / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let mut s = pdf(a) + pdf(b);
        for i in 1..n {
            s += pdf(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    // fading-averaged exact PEP of one BPSK symbol, by quadrature over
    // |h| = u with density 2u exp(-u^2)
    fn rayleigh_pep_quadrature(lambda: f64, es_n0: f64) -> f64 {
        let n = 200_000usize;
        let top = 8.0;
        let h = top / n as f64;
        let f = |u: f64| q_function((es_n0 * lambda / 2.0).sqrt() * u) * 2.0 * u * (-u * u).exp();
        let mut s = f(0.0) + f(top);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn q_values() {
        assert_eq!(q_function(0.0), 0.5);
        assert_abs_diff_eq!(q_function(1.0), q_quadrature(1.0), epsilon = 1e-12);
        let mut prev = 0.5;
        for i in 1..60 {
            let q = q_function(i as f64 * 0.25);
            assert!(q < prev);
            prev = q;
        }
        assert_eq!(q_approx(0.0), 1.0 / 3.0);
    }

    #[test]
    fn conditional_pep() {
        let h = [Complex::new(0.3, -0.4), Complex::new(1.0, 0.0)];
        assert_eq!(pep_conditional(&[0.0, 0.0], &h, 10.0).unwrap(), 0.5);
        let p = pep_conditional(&[4.0, 0.0], &h, 2.0).unwrap();
        assert_abs_diff_eq!(p, q_function((2.0f64 * 4.0 * 0.25 / 2.0).sqrt()), epsilon = 1e-15);
        assert!(pep_conditional(&[1.0], &h, 1.0).is_err());
    }

    #[test]
    fn unconditional_identical_codewords() {
        assert_abs_diff_eq!(pep_unconditional(&[0.0, 0.0, 0.0], 100.0).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert!(pep_unconditional(&[-1.0], 1.0).is_err());
    }

    #[test]
    fn bpsk_pep_close_to_exact() {
        for snr in (5..=30).step_by(5) {
            let g = db(snr as f64);
            let exact = 0.5 * (1.0 - (g / (1.0 + g)).sqrt());
            assert_relative_eq!(exact, rayleigh_pep_quadrature(4.0, g), max_relative = 1e-6);
            let approx = pep_unconditional(&[4.0], g).unwrap();
            assert!((approx / exact - 1.0).abs() < 0.15, "{snr} dB: {approx} vs {exact}");
        }
    }

    #[test]
    fn matrix_path_matches_diagonal() {
        let z = [4.0, 0.0, 1.5, 0.5857864376269049];
        let eye = DMatrix::<Complex<f64>>::identity(4, 4);
        for snr in [0.0, 10.0, 25.0] {
            let d = pep_unconditional(&z, db(snr)).unwrap();
            let m = pep_unconditional_correlated(&z, &eye, db(snr)).unwrap();
            assert_abs_diff_eq!(d, m, epsilon = 1e-12);
        }
    }

    #[test]
    fn cholesky_determinant_matches_lu() {
        let b = DMatrix::from_fn(4, 4, |i, j| Complex::new((i * 3 + j) as f64 * 0.1 - 0.5, (i as f64 - j as f64) * 0.2));
        let c = &b * b.adjoint() + DMatrix::identity(4, 4) * Complex::new(0.5, 0.0);
        let z = [1.0, 2.0, 0.5, 3.0];
        for a in [0.25, 3.0] {
            let root: Vec<f64> = z.iter().map(|v: &f64| v.sqrt()).collect();
            let m = DMatrix::from_fn(4, 4, |i, j| {
                let eye = if i == j { 1.0 } else { 0.0 };
                Complex::new(eye, 0.0) + c[(i, j)] * (a * root[i] * root[j])
            });
            let lu = m.clone().determinant();
            assert_relative_eq!(hermitian_pd_det(&m).unwrap(), lu.re, max_relative = 1e-12);
            assert!(lu.im.abs() < 1e-9);
            // det(I + a C Z) by LU on the non-Hermitian product
            let zm = DMatrix::from_fn(4, 4, |i, j| if i == j { Complex::new(z[i], 0.0) } else { Complex::new(0.0, 0.0) });
            let direct = (DMatrix::identity(4, 4) + &c * &zm * Complex::new(a, 0.0)).determinant();
            assert_relative_eq!(hermitian_pd_det(&m).unwrap(), direct.re, max_relative = 1e-10);
        }
        let not_pd = DMatrix::from_element(2, 2, Complex::new(1.0, 0.0));
        assert!(hermitian_pd_det(&not_pd).is_err());
    }

    #[test]
    fn asymptotic_form() {
        let z = [4.0, 4.0];
        let ratio = pep_unconditional(&z, db(40.0)).unwrap() / pep_asymptotic(&z, db(40.0)).unwrap();
        assert!((ratio - 1.0).abs() < 0.01);
        let slope2 = pep_asymptotic(&z, db(20.0)).unwrap() / pep_asymptotic(&z, db(30.0)).unwrap();
        assert_relative_eq!(slope2, 100.0, max_relative = 1e-12);
        let slope1 = pep_asymptotic(&[4.0, 0.0], db(20.0)).unwrap() / pep_asymptotic(&[4.0, 0.0], db(30.0)).unwrap();
        assert_relative_eq!(slope1, 10.0, max_relative = 1e-12);
        assert!(pep_asymptotic(&[0.0, 0.0], 10.0).is_err());
        assert!(pep_asymptotic(&[1.0], 0.0).is_err());
    }

    #[test]
    fn two_codeword_bound_is_pep() {
        let cws = vec![vec![Complex::new(1.0, 0.0)], vec![Complex::new(-1.0, 0.0)]];
        let b = union_bound_ber(&cws, &[0, 1], 1, db(10.0)).unwrap();
        assert_abs_diff_eq!(b.ber, pep_unconditional(&[4.0], db(10.0)).unwrap(), epsilon = 1e-15);
        assert_eq!(b.pairs, 2);
        assert!(b.exact);
    }

    fn small_scheme() -> Scheme<f64> {
        Scheme::new(IndexCodebook::build(Variant::Spm { k: 2 }, 3).unwrap(), psk_family(2, 2, 2).unwrap()).unwrap()
    }

    #[test]
    fn bound_relabelling_and_order_invariance() {
        let s = small_scheme();
        let cws = s.all_codewords();
        let labels: Vec<u64> = (0..cws.len() as u64).collect();
        let base = union_bound_ber(&cws, &labels, s.bits(), db(12.0)).unwrap().ber;
        let masked: Vec<u64> = labels.iter().map(|l| l ^ 0b10110).collect();
        assert_relative_eq!(union_bound_ber(&cws, &masked, s.bits(), db(12.0)).unwrap().ber, base, max_relative = 1e-13);
        let rev_c: Vec<_> = cws.iter().rev().cloned().collect();
        let rev_l: Vec<u64> = labels.iter().rev().copied().collect();
        assert_relative_eq!(union_bound_ber(&rev_c, &rev_l, s.bits(), db(12.0)).unwrap().ber, base, max_relative = 1e-13);
        assert_eq!(scheme_union_bound(&s, db(12.0)).unwrap().ber, base);
    }

    #[test]
    fn sampled_bound_tracks_exact() {
        let s = small_scheme();
        let cws = s.all_codewords();
        let labels: Vec<u64> = (0..cws.len() as u64).collect();
        let exact = union_bound_ber(&cws, &labels, s.bits(), db(10.0)).unwrap();
        let est = union_bound_ber_sampled(&cws, &labels, s.bits(), db(10.0), 20_000, 1).unwrap();
        assert!(!est.exact);
        assert!((est.ber - exact.ber).abs() < 4.0 * est.stderr, "{est:?} {exact:?}");
    }

    proptest! {
        #[test]
        fn pep_in_range_and_decreasing(z in proptest::collection::vec(0.0f64..4.0, 1..6), snr in -10.0f64..40.0) {
            let p = pep_unconditional(&z, db(snr)).unwrap();
            prop_assert!(p > 0.0 && p <= 1.0 / 3.0 + 1e-15);
            if z.iter().any(|&v| v > 1e-6) {
                prop_assert!(pep_unconditional(&z, db(snr + 1.0)).unwrap() < p);
            }
        }
    }
}
