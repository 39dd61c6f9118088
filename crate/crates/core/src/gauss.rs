//! Randomness, the discrete Gaussian over `Z`, and the LWE error
//! distribution `Ψ̄_α`.
//!
//! Floating point is used inside the samplers only; every output is an exact
//! integer (or an element of `Z_q`).

use std::f64::consts::PI;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::zq::{Modulus, ZqVector};

/// Slack constant standing in for every asymptotic `ω(f)`: `ω(f) := C_OMEGA · f`.
pub const C_OMEGA: f64 = 2.0;

/// Default tail cut for [`GaussParam`], in multiples of sigma.
pub const DEFAULT_TAIL_CUT: f64 = 12.0;

/// Rejections after which [`sample_z`] reports misconfiguration.
pub const MAX_REJECTIONS: u64 = 1_000_000;

/// Where a [`RandomSource`] got its key.
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    OsEntropy,
    Seeded([u8; 32]),
}

impl fmt::Debug for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceKind::OsEntropy => write!(f, "OsEntropy"),
            SourceKind::Seeded(seed) => write!(f, "Seeded({})", hex::encode(seed)),
        }
    }
}

/// A ChaCha20 stream keyed either from the OS or from a 32-byte seed.
///
/// Identical seeds give identical streams. [`RandomSource::fork`] derives an
/// independent child stream, which is how parallel workers get their own
/// source without sharing state.
#[derive(Clone, Debug)]
pub struct RandomSource {
    kind: SourceKind,
    rng: ChaCha20Rng,
}

impl RandomSource {
    pub fn from_os_entropy() -> Self {
        Self { kind: SourceKind::OsEntropy, rng: ChaCha20Rng::from_entropy() }
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self { kind: SourceKind::Seeded(seed), rng: ChaCha20Rng::from_seed(seed) }
    }

    /// Parses a 64-hex-character seed.
    pub fn from_hex(text: &str) -> Result<Self> {
        let bytes = hex::decode(text.trim())
            .map_err(|e| Error::InvalidParameter(format!("seed is not hex: {e}")))?;
        let seed: [u8; 32] = bytes.try_into().map_err(|b: Vec<u8>| {
            Error::InvalidParameter(format!("seed must be 32 bytes, got {}", b.len()))
        })?;
        Ok(Self::from_seed(seed))
    }

    /// `Some(seed)` selects a seeded stream, `None` the OS.
    pub fn from_optional_seed(seed: Option<[u8; 32]>) -> Self {
        seed.map_or_else(Self::from_os_entropy, Self::from_seed)
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    /// Draws a child seed from this stream and returns the child source.
    pub fn fork(&mut self) -> RandomSource {
        let mut seed = [0u8; 32];
        self.rng.fill_bytes(&mut seed);
        match self.kind {
            SourceKind::OsEntropy => {
                Self { kind: SourceKind::OsEntropy, rng: ChaCha20Rng::from_seed(seed) }
            }
            SourceKind::Seeded(_) => Self::from_seed(seed),
        }
    }

    /// `count` children forked in order.
    pub fn fork_many(&mut self, count: usize) -> Vec<RandomSource> {
        (0..count).map(|_| self.fork()).collect()
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Parameters of the discrete Gaussian `D_{Z,σ,c}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussParam {
    sigma: f64,
    center: f64,
    tail_cut: f64,
}

impl GaussParam {
    /// Zero-centered with the default tail cut.
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_center(sigma, 0.0)
    }

    pub fn with_center(sigma: f64, center: f64) -> Result<Self> {
        Self::with_tail_cut(sigma, center, DEFAULT_TAIL_CUT)
    }

    pub fn with_tail_cut(sigma: f64, center: f64, tail_cut: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("center must be finite".into()));
        }
        if !(tail_cut >= 6.0 && tail_cut.is_finite()) {
            return Err(Error::InvalidParameter(format!("tail cut must be >= 6, got {tail_cut}")));
        }
        Ok(Self { sigma, center, tail_cut })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    /// Same width and tail cut around a different center.
    pub fn recentered(&self, center: f64) -> Self {
        Self { center, ..*self }
    }

    /// Same center and tail cut with a different width.
    pub fn rescaled(&self, sigma: f64) -> Self {
        Self { sigma, ..*self }
    }
}

/// Parameters of `Ψ̄_α` over `Z_q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorParam {
    alpha: f64,
    modulus: Modulus,
}

impl ErrorParam {
    pub fn new(alpha: f64, modulus: &Modulus) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Ok(Self { alpha, modulus: modulus.clone() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Standard deviation `α/√(2π)` of the underlying real Gaussian.
    pub fn std_dev(&self) -> f64 {
        self.alpha / (2.0 * PI).sqrt()
    }
}

/// `ρ_{σ,c}(x) = exp(-π (x - c)² / σ²)`.
pub fn rho(x: f64, sigma: f64, center: f64) -> f64 {
    let d = x - center;
    (-PI * d * d / (sigma * sigma)).exp()
}

/// Samples `y ∈ Z` with probability proportional to `ρ_{σ,c}(y)` on
/// `|y - c| <= tail_cut·σ`.
///
/// Rejection sampling from the uniform proposal over the tail-cut window.
pub fn sample_z(p: &GaussParam, rng: &mut RandomSource) -> Result<i64> {
    let radius = p.tail_cut * p.sigma;
    let lo = (p.center - radius).ceil();
    let hi = (p.center + radius).floor();
    if lo > hi {
        return Err(Error::InvalidParameter(format!(
            "no integer within {radius} of {}",
            p.center
        )));
    }
    if hi - lo > 2f64.powi(62) {
        return Err(Error::InvalidParameter("gaussian window exceeds 2^62".into()));
    }
    let (lo, hi) = (lo as i64, hi as i64);
    for _ in 0..MAX_REJECTIONS {
        let y = rng.gen_range(lo..=hi);
        if rng.gen::<f64>() < rho(y as f64, p.sigma, p.center) {
            return Ok(y);
        }
    }
    Err(Error::SamplerExhausted(MAX_REJECTIONS))
}

/// One draw from `Ψ̄_α`: `X ~ N(0, α²/2π)` reduced mod 1, then `⌊qX⌉ mod q`.
///
/// `⌊q·(X mod 1)⌉ = ⌊qX⌉ - q·⌊X⌋`, so the reduction is carried out on the
/// exact integer `⌊qX⌉` and stays precise for any size of `q`.
pub fn sample_error(p: &ErrorParam, rng: &mut RandomSource) -> BigUint {
    let normal = Normal::new(0.0, p.std_dev()).expect("alpha validated at construction");
    let x: f64 = normal.sample(rng);
    let scaled = (p.modulus.to_f64() * x + 0.5).floor();
    let rounded = BigInt::from(scaled as i128);
    p.modulus.reduce_signed(&rounded)
}

/// `dim` independent draws of [`sample_error`].
pub fn sample_error_vec(p: &ErrorParam, dim: usize, rng: &mut RandomSource) -> Result<ZqVector> {
    if dim == 0 {
        return Err(Error::InvalidParameter("error vector dimension must be >= 1".into()));
    }
    let entries = (0..dim).map(|_| sample_error(p, rng)).collect();
    Ok(ZqVector::new(entries, &p.modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::centered;
    use num_traits::ToPrimitive;

    fn seeded(tag: u8) -> RandomSource {
        RandomSource::from_seed([tag; 32])
    }

    #[test]
    fn seeded_streams_replay() {
        let mut a = seeded(1);
        let mut b = seeded(1);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
        let mut c = seeded(2);
        assert_ne!(xs[0], c.next_u64());
    }

    #[test]
    fn forks_are_deterministic_and_distinct() {
        let mut a = seeded(3);
        let mut b = seeded(3);
        let mut fa = a.fork_many(3);
        let mut fb = b.fork_many(3);
        let first: Vec<u64> = fa.iter_mut().map(|r| r.next_u64()).collect();
        let second: Vec<u64> = fb.iter_mut().map(|r| r.next_u64()).collect();
        assert_eq!(first, second);
        assert_ne!(first[0], first[1]);
        assert!(matches!(fa[0].kind(), SourceKind::Seeded(_)));
    }

    #[test]
    fn hex_seed_parsing() {
        let hex = "00".repeat(31) + "ff";
        let src = RandomSource::from_hex(&hex).unwrap();
        let mut expected = [0u8; 32];
        expected[31] = 0xff;
        assert_eq!(src.kind(), SourceKind::Seeded(expected));
        assert!(RandomSource::from_hex("abc").is_err());
        assert!(RandomSource::from_hex(&"zz".repeat(32)).is_err());
        assert!(RandomSource::from_hex(&"00".repeat(31)).is_err());
    }

    #[test]
    fn gauss_param_validation() {
        assert!(GaussParam::new(0.0).is_err());
        assert!(GaussParam::new(-1.0).is_err());
        assert!(GaussParam::new(f64::NAN).is_err());
        assert!(GaussParam::with_tail_cut(1.0, 0.0, 5.9).is_err());
        assert!(GaussParam::with_tail_cut(1.0, 0.0, 6.0).is_ok());
        assert!(ErrorParam::new(0.0, &Modulus::from_u64(17).unwrap()).is_err());
        assert!(ErrorParam::new(1.0, &Modulus::from_u64(17).unwrap()).is_err());
    }

    #[test]
    fn sample_z_respects_tail_cut() {
        let p = GaussParam::with_tail_cut(2.0, 0.3, 6.0).unwrap();
        let mut rng = seeded(4);
        for _ in 0..10_000 {
            let y = sample_z(&p, &mut rng).unwrap();
            assert!((y as f64 - 0.3).abs() <= 12.0);
        }
    }

    #[test]
    fn sample_z_empty_window_is_an_error() {
        let p = GaussParam::with_tail_cut(0.01, 0.5, 6.0).unwrap();
        assert!(sample_z(&p, &mut seeded(5)).is_err());
    }

    #[test]
    fn sample_z_mean_and_sign_balance() {
        let p = GaussParam::new(4.0).unwrap();
        let mut rng = seeded(6);
        let draws: Vec<i64> = (0..100_000).map(|_| sample_z(&p, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<i64>() as f64 / draws.len() as f64;
        assert!(mean.abs() < 0.1, "mean {mean}");
        let pos = draws.iter().filter(|&&y| y > 0).count() as f64;
        let neg = draws.iter().filter(|&&y| y < 0).count() as f64;
        let bias = (pos - neg) / draws.len() as f64;
        assert!(bias.abs() < 0.01, "bias {bias}");
    }

    #[test]
    fn sample_z_tail_fraction() {
        let p = GaussParam::new(4.0).unwrap();
        let mut rng = seeded(7);
        let n = 100_000;
        let beyond = (0..n).filter(|_| sample_z(&p, &mut rng).unwrap().abs() > 4).count();
        assert!((beyond as f64 / n as f64) <= 0.60);
    }

    #[test]
    fn vanishing_noise_rounds_to_zero() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let p = ErrorParam::new(2f64.powi(-30), &q).unwrap();
        let mut rng = seeded(8);
        let zeros = (0..10_000)
            .filter(|_| centered(&sample_error(&p, &mut rng), &q) == BigInt::from(0))
            .count();
        assert!(zeros as f64 / 10_000.0 >= 0.999);
    }

    #[test]
    fn error_std_dev_matches_defining_gaussian() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let alpha = 2f64.powi(-10);
        let p = ErrorParam::new(alpha, &q).unwrap();
        let mut rng = seeded(9);
        let n = 100_000;
        let values: Vec<f64> = (0..n)
            .map(|_| centered(&sample_error(&p, &mut rng), &q).to_f64().unwrap())
            .collect();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let expected = q.to_f64() * alpha / (2.0 * PI).sqrt();
        assert!((var.sqrt() - expected).abs() / expected < 0.15);
    }

    #[test]
    fn error_vectors_replay_and_reject_empty() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let p = ErrorParam::new(2f64.powi(-12), &q).unwrap();
        let a = sample_error_vec(&p, 32, &mut seeded(10)).unwrap();
        let b = sample_error_vec(&p, 32, &mut seeded(10)).unwrap();
        assert_eq!(a, b);
        assert!(sample_error_vec(&p, 0, &mut seeded(10)).is_err());
    }
}
