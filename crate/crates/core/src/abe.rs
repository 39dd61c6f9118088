//! The attribute-based encryption scheme: parameter selection, setup, key
//! generation, encryption and decryption of single bits, and a byte-level
//! wrapper that encrypts one bit per ciphertext.
//!
//! A user key is bound to an access policy `(M, ρ)`; a ciphertext carries a
//! set of attribute strings. Decryption succeeds exactly when the attribute
//! set satisfies the policy.
//!
//! Any non-empty string except [`PAD_ATTRIBUTE`] is an attribute. The matrix
//! `A_attr` of an attribute is derived on demand from a public seed, so no
//! attribute has to be known at setup.
//!
//! The public parameters publish the share-target vector `s`, and every
//! key derives its shares from that same `s`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Zero};
use rand::RngCore;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};
use crate::gauss::{sample_error, sample_error_vec, ErrorParam, GaussParam, RandomSource, C_OMEGA};
use crate::lsss::{find_reconstruction, SharePolicy, PAD_ATTRIBUTE};
use crate::par;
use crate::trapdoor::{trap_gen, trapdoor_gs_bound, ExtendedTrapdoor, Preimage, TrapdoorPair};
use crate::zq::{centered, next_prime, Modulus, ZqMatrix, ZqVector};

/// Largest payload accepted by [`encrypt_bytes`].
pub const MAX_PAYLOAD: usize = 1 << 16;

const ATTR_DOMAIN: &[u8] = b"LABE/attr-matrix/v1";

/// How parameters are chosen; see [`select_params`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Profile {
    /// Small `n` for tests and demos.
    Toy,
    /// The literal parameter recipe, including `m ≥ n^1.5`.
    Paper,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Toy => "toy",
            Profile::Paper => "paper",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "toy" => Ok(Profile::Toy),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::InvalidParameter(format!("unknown profile {other:?}"))),
        }
    }
}

/// Global lattice and noise parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemParams {
    lambda: u32,
    profile: Profile,
    n: usize,
    m: usize,
    q: Modulus,
    sigma: GaussParam,
    alpha: ErrorParam,
    cap_l: usize,
    c_omega: f64,
}

impl SystemParams {
    /// Reassembles parameters, e.g. after decoding. Only structural checks
    /// are made here; [`SystemParams::validate`] checks the constraints.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        lambda: u32,
        profile: Profile,
        n: usize,
        m: usize,
        q: Modulus,
        sigma: f64,
        alpha: f64,
        cap_l: usize,
        c_omega: f64,
    ) -> Result<Self> {
        if n == 0 || m == 0 || cap_l == 0 || cap_l > n {
            return Err(Error::InvalidParameter(format!(
                "inconsistent dimensions n={n} m={m} L={cap_l}"
            )));
        }
        if !(c_omega > 0.0 && c_omega.is_finite()) {
            return Err(Error::InvalidParameter("c_omega must be positive".into()));
        }
        let sigma = GaussParam::new(sigma)?;
        let alpha = ErrorParam::new(alpha, &q)?;
        Ok(Self { lambda, profile, n, m, q, sigma, alpha, cap_l, c_omega })
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> &Modulus {
        &self.q
    }

    pub fn sigma(&self) -> &GaussParam {
        &self.sigma
    }

    pub fn alpha(&self) -> &ErrorParam {
        &self.alpha
    }

    /// Row budget `L` of every policy.
    pub fn cap_l(&self) -> usize {
        self.cap_l
    }

    pub fn c_omega(&self) -> f64 {
        self.c_omega
    }

    /// Copy with a different noise rate.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Ok(Self { alpha: ErrorParam::new(alpha, &self.q)?, ..self.clone() })
    }

    /// Worst-case trapdoor quality `‖T̃_{A₀}‖` of a setup with these
    /// parameters.
    pub fn trapdoor_norm_bound(&self) -> f64 {
        trapdoor_gs_bound(self.n, self.m, &self.q)
    }

    /// The correctness factor `(c_ω√(ln 2m) + 1)·(1 + L²σ√(2m))`, rounded up.
    pub fn budget_factor(&self) -> f64 {
        budget_factor(self.m, self.cap_l, self.sigma.sigma(), self.c_omega)
    }

    /// Checks every parameter constraint, naming the first that fails.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Unsatisfiable(what.to_string()));
        if self.n < 2 {
            return fail("n must be at least 2");
        }
        if self.cap_l > self.n {
            return fail("L must not exceed n");
        }
        if !width_ok(self.n, self.m, &self.q) {
            return fail("m < 5·n·log2 q");
        }
        let m = self.m as f64;
        let c = self.c_omega;
        let gs = self.trapdoor_norm_bound();
        if self.sigma.sigma() <= up(gs * up(c * up(up((2.0 * m).ln()).sqrt()))) {
            return fail("sigma too small for sampling over A0 ∥ B");
        }
        let lm = (self.cap_l as f64 * m).ln().max(0.0);
        if self.sigma.sigma() < up(gs * up(c * up(up(lm).sqrt()))) {
            return fail("sigma too small for sampling over the extended basis");
        }
        // α·q ≥ 2√m  ⇔  (α·q)² ≥ 4m
        let aq = rational(self.alpha.alpha()) * BigRational::from_integer(self.q.value().clone().into());
        if &aq * &aq < BigRational::from_integer((4 * self.m).into()) {
            return fail("alpha·q < 2·sqrt(m)");
        }
        if !noise_budget_check(self) {
            return fail("noise budget exceeds q/5");
        }
        Ok(())
    }
}

/// `m ≥ 5·n·log₂ q`, decided exactly as `2^m ≥ q^(5n)`.
fn width_ok(n: usize, m: usize, q: &Modulus) -> bool {
    let k = 5 * n as u64;
    let bits = q.bits();
    if k * bits <= m as u64 {
        return true;
    }
    if k * (bits - 1) > m as u64 {
        return false;
    }
    (BigUint::one() << m) >= q.value().pow(k as u32)
}

fn up(x: f64) -> f64 {
    x * (1.0 + 4.0 * f64::EPSILON)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

fn budget_factor(m: usize, cap_l: usize, sigma: f64, c: f64) -> f64 {
    let two_m = 2.0 * m as f64;
    let left = up(up(c * up(up(two_m.ln()).sqrt())) + 1.0);
    let l2 = (cap_l * cap_l) as f64;
    let right = up(1.0 + up(up(l2 * sigma) * up(two_m.sqrt())));
    up(left * right)
}

/// Whether `q·α·(c_ω√(ln 2m) + 1)·(1 + L²σ√(2m)) ≤ q/5`.
///
/// Irrational factors are rounded up before an exact rational comparison,
/// so `true` is never wrong.
pub fn noise_budget_check(params: &SystemParams) -> bool {
    let lhs = rational(params.alpha.alpha()) * rational(params.budget_factor());
    lhs <= BigRational::new(1.into(), 5.into())
}

/// Chooses `(m, σ, α, q)` for lattice dimension `n` and row budget `L`.
///
/// With `ω(f) := c_ω·f`:
///
/// * `m = ⌈5·n·log₂ q⌉`, raised to `⌈n^1.5⌉` under [`Profile::Paper`];
/// * `σ = L·m·c_ω·ln(L·m)`;
/// * `α = 1 / (5·(c_ω√(ln 2m) + 1)·(1 + L²σ√(2m)))`, floored at `2⁻⁴⁰`
///   under [`Profile::Toy`];
/// * `q` the least prime above `10√(2m)·(c_ω√(ln 2m) + 1)·(1 + L²σ√(2m))`
///   and `2√n/α`.
///
/// `m` and `q` depend on each other and are iterated to a fixed point.
pub fn select_params(n: usize, cap_l: usize, profile: Profile) -> Result<SystemParams> {
    if n < 2 {
        return Err(Error::Unsatisfiable(format!("n = {n} is below 2")));
    }
    if cap_l == 0 || cap_l > n {
        return Err(Error::Unsatisfiable(format!("L = {cap_l} must be between 1 and n = {n}")));
    }
    let c = C_OMEGA;
    let width_for = |q: &Modulus| {
        let mut m = (5.0 * n as f64 * q.log2()).ceil() as usize;
        if profile == Profile::Paper {
            m = m.max((n as f64).powf(1.5).ceil() as usize);
        }
        m
    };
    let mut q = Modulus::new(next_prime(&BigUint::from(2u32 * n as u32)))?;
    for _ in 0..64 {
        let m = width_for(&q);
        let lm = (cap_l * m) as f64;
        let sigma = lm * c * lm.ln();
        let factor = budget_factor(m, cap_l, sigma, c);
        let mut alpha = (1.0 - 1e-9) / (5.0 * factor);
        if profile == Profile::Toy {
            alpha = alpha.max((-40f64).exp2());
        }
        let floor = (10.0 * (2.0 * m as f64).sqrt() * factor).max(2.0 * (n as f64).sqrt() / alpha);
        let floor = BigUint::from_f64(floor.ceil())
            .ok_or_else(|| Error::Unsatisfiable("modulus overflows".into()))?;
        let next = Modulus::new(next_prime(&floor))?;
        if width_for(&next) == m {
            let params = SystemParams {
                lambda: n as u32,
                profile,
                n,
                m,
                sigma: GaussParam::new(sigma)?,
                alpha: ErrorParam::new(alpha, &next)?,
                q: next,
                cap_l,
                c_omega: c,
            };
            params.validate()?;
            return Ok(params);
        }
        q = next;
    }
    Err(Error::Unsatisfiable(format!("no fixed point for n = {n}, L = {cap_l}")))
}

/// Public parameters `(A₀, B, s, attr_seed)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams {
    pub params: SystemParams,
    pub a0: ZqMatrix,
    pub b: ZqMatrix,
    pub s: ZqVector,
    pub attr_seed: [u8; 32],
}

impl PublicParams {
    /// Checks dimensions and moduli against `params`.
    pub fn validate(&self) -> Result<()> {
        let (n, m, q) = (self.params.n, self.params.m, &self.params.q);
        let ok = self.a0.rows() == n
            && self.a0.cols() == m
            && self.b.rows() == n
            && self.b.cols() == m
            && self.s.dim() == self.params.cap_l
            && self.a0.modulus() == q
            && self.b.modulus() == q
            && self.s.modulus() == q;
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed("public parameters do not match their system parameters".into()))
        }
    }
}

/// The trapdoor of `A₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterSecretKey {
    pub t_a0: TrapdoorPair,
}

/// A key for one policy: the policy padded to `L` rows and the grid of
/// preimages `grid[i][j] = e^{(j)}_{ρ(i)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UserSecretKey {
    pub policy: SharePolicy,
    pub grid: Vec<Vec<Preimage>>,
}

/// An encryption of one bit under a set of attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct Ciphertext {
    pub attrs: BTreeSet<String>,
    pub c0: BigUint,
    pub c_prime: ZqVector,
    pub c_attrs: BTreeMap<String, ZqVector>,
}

/// Whether encryption adds LWE noise. [`NoiseMode::Zero`] exists for
/// testing the decryption algebra and gives no security.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    Gaussian,
    Zero,
}

fn check_attribute(attr: &str) -> Result<()> {
    if attr.is_empty() || attr == PAD_ATTRIBUTE {
        Err(Error::ReservedAttribute(attr.to_string()))
    } else {
        Ok(())
    }
}

/// `A_attr`: an `n×m` matrix expanded from SHAKE256 over the public seed
/// and the attribute string. Entries are drawn by rejection so they are
/// uniform mod `q`.
pub fn attr_matrix(pp: &PublicParams, attr: &str) -> Result<ZqMatrix> {
    check_attribute(attr)?;
    let q = &pp.params.q;
    let mut xof = Shake256::default();
    xof.update(ATTR_DOMAIN);
    xof.update(&pp.attr_seed);
    xof.update(&(attr.len() as u64).to_le_bytes());
    xof.update(attr.as_bytes());
    let mut reader = xof.finalize_xof();
    let width = q.byte_width();
    let excess = (width * 8) as u64 - q.bits();
    let mut buf = vec![0u8; width];
    Ok(ZqMatrix::from_fn(pp.params.n, pp.params.m, q, |_, _| loop {
        reader.read(&mut buf);
        buf[0] &= 0xff >> excess;
        let v = BigUint::from_bytes_be(&buf);
        if &v < q.value() {
            break v;
        }
    }))
}

/// The right-hand block `A_attr + B` of `E_attr = A₀ ∥ (A_attr + B)`.
/// Padding rows use `B` alone.
fn right_block(pp: &PublicParams, label: &str) -> Result<ZqMatrix> {
    if label == PAD_ATTRIBUTE {
        Ok(pp.b.clone())
    } else {
        attr_matrix(pp, label)?.add(&pp.b)
    }
}

/// Runs the trapdoor generator and draws `B`, `s` and the attribute seed.
pub fn setup(params: &SystemParams, rng: &mut RandomSource) -> Result<(PublicParams, MasterSecretKey)> {
    let (n, m, q) = (params.n, params.m, &params.q);
    let t_a0 = trap_gen(n, m, q, rng)?;
    let b = ZqMatrix::random(n, m, q, rng);
    let s = ZqVector::random(params.cap_l, q, rng);
    let mut attr_seed = [0u8; 32];
    rng.fill_bytes(&mut attr_seed);
    let pp = PublicParams { params: params.clone(), a0: t_a0.matrix_a().clone(), b, s, attr_seed };
    Ok((pp, MasterSecretKey { t_a0 }))
}

/// Issues a key for `policy`, which must already be padded to `L` rows.
///
/// For each share index `j`, `y_j = (s_j, random…)` and `λ^{(j)} = M·y_j`.
/// Row `i` then gets short vectors with
/// `E_{ρ(i)}·e^{(j)}_{ρ(i)} ≡ λ_i^{(j)}·u_j`, where `u_j` is the `j`-th unit
/// vector of `Z_q^n`.
pub fn keygen(
    pp: &PublicParams,
    msk: &MasterSecretKey,
    policy: &SharePolicy,
    rng: &mut RandomSource,
) -> Result<UserSecretKey> {
    let params = &pp.params;
    let (n, cap_l, q) = (params.n, params.cap_l, &params.q);
    if policy.l() != cap_l {
        return Err(Error::InvalidParameter(format!(
            "policy has {} rows but keys need exactly L = {cap_l}",
            policy.l()
        )));
    }
    if cap_l > n {
        return Err(Error::InvalidParameter(format!("L = {cap_l} exceeds n = {n}")));
    }
    if policy.modulus() != q {
        return Err(Error::ModulusMismatch);
    }
    if msk.t_a0.matrix_a() != &pp.a0 {
        return Err(Error::InvalidParameter("master key does not match public parameters".into()));
    }

    let blinds = policy.n_cols() - 1;
    let lambdas: Vec<ZqVector> = (0..cap_l)
        .map(|j| {
            let y = ZqVector::new(vec![pp.s.get(j).clone()], q).concat(&ZqVector::random(blinds, q, rng))?;
            policy.matrix().mul_vec(&y)
        })
        .collect::<Result<_>>()?;

    let labels: Vec<String> = policy.rho().iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let blocks = par::try_map(labels.clone(), |label| right_block(pp, &label))?;
    let extensions: BTreeMap<&str, ExtendedTrapdoor<'_>> = labels
        .iter()
        .zip(&blocks)
        .map(|(label, block)| Ok((label.as_str(), msk.t_a0.extend(block)?)))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize, RandomSource)> = rng
        .fork_many(cap_l * cap_l)
        .into_iter()
        .enumerate()
        .map(|(k, r)| (k / cap_l, k % cap_l, r))
        .collect();
    let sigma = &params.sigma;
    let cells = par::try_map(jobs, |(i, j, mut r)| {
        let target = ZqVector::unit(n, j, lambdas[j].get(i).clone(), q);
        extensions[policy.label(i)].sample_left(&target, sigma, &mut r)
    })?;
    let mut grid: Vec<Vec<Preimage>> = Vec::with_capacity(cap_l);
    let mut cells = cells.into_iter();
    for _ in 0..cap_l {
        grid.push(cells.by_ref().take(cap_l).collect());
    }
    Ok(UserSecretKey { policy: policy.clone(), grid })
}

/// Rechecks `E_{ρ(i)}·e^{(j)}_{ρ(i)} ≡ target` for every cell of the grid.
pub fn verify_key(pp: &PublicParams, sk: &UserSecretKey) -> Result<bool> {
    let (m, cap_l) = (pp.params.m, pp.params.cap_l);
    if sk.policy.l() != cap_l || sk.grid.len() != cap_l || sk.grid.iter().any(|r| r.len() != cap_l) {
        return Ok(false);
    }
    for (i, row) in sk.grid.iter().enumerate() {
        let right = right_block(pp, sk.policy.label(i))?;
        for cell in row {
            if cell.vector_e.len() != 2 * m {
                return Ok(false);
            }
            let top = pp.a0.mul_int_vec(&cell.vector_e[..m])?;
            let bottom = right.mul_int_vec(&cell.vector_e[m..])?;
            if top.add(&bottom)? != cell.target_u {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Encrypts one bit under `attrs` with Gaussian noise.
pub fn encrypt(
    pp: &PublicParams,
    attrs: &BTreeSet<String>,
    msg: bool,
    rng: &mut RandomSource,
) -> Result<Ciphertext> {
    encrypt_with_noise(pp, attrs, msg, NoiseMode::Gaussian, rng)
}

/// [`encrypt`] with a choice of noise. The random stream is consumed the
/// same way in both modes.
pub fn encrypt_with_noise(
    pp: &PublicParams,
    attrs: &BTreeSet<String>,
    msg: bool,
    noise: NoiseMode,
    rng: &mut RandomSource,
) -> Result<Ciphertext> {
    if attrs.is_empty() {
        return Err(Error::InvalidParameter("attribute set is empty".into()));
    }
    for a in attrs {
        check_attribute(a)?;
    }
    let params = &pp.params;
    let (n, m, q) = (params.n, params.m, &params.q);

    let x = ZqVector::random(n, q, rng);
    let f = pp.s.concat(&ZqVector::zeros(n - params.cap_l, q))?;
    let mut chi0 = sample_error(&params.alpha, rng);
    let mut chi_prime = sample_error_vec(&params.alpha, m, rng)?;
    let mut chi_attrs = attrs
        .iter()
        .map(|_| sample_error_vec(&params.alpha, m, rng))
        .collect::<Result<Vec<_>>>()?;
    if noise == NoiseMode::Zero {
        chi0 = BigUint::zero();
        chi_prime = ZqVector::zeros(m, q);
        chi_attrs.iter_mut().for_each(|c| *c = ZqVector::zeros(m, q));
    }

    let mut c0 = q.add(&x.dot(&f)?, &chi0);
    if msg {
        c0 = q.add(&c0, q.half());
    }
    let c_prime = pp.a0.left_mul_vec(&x)?.add(&chi_prime)?;
    let x_b = pp.b.left_mul_vec(&x)?;
    let c_attrs = attrs
        .iter()
        .zip(chi_attrs)
        .map(|(a, chi)| {
            let c = attr_matrix(pp, a)?.left_mul_vec(&x)?.add(&x_b)?.add(&chi)?;
            Ok((a.clone(), c))
        })
        .collect::<Result<_>>()?;
    Ok(Ciphertext { attrs: attrs.clone(), c0, c_prime, c_attrs })
}

/// `r = C₀ − Σ_j Σ_{i∈I} w_i·(C′ ∥ C_{ρ(i)})·e^{(j)}_{ρ(i)}`, the value
/// [`decrypt`] thresholds.
pub fn decrypt_residue(pp: &PublicParams, sk: &UserSecretKey, ct: &Ciphertext) -> Result<BigUint> {
    let params = &pp.params;
    let (m, q) = (params.m, &params.q);
    if ct.c_prime.modulus() != q || ct.c_prime.dim() != m {
        return Err(Error::Malformed("ciphertext does not match the public parameters".into()));
    }
    let weights = find_reconstruction(&sk.policy, &ct.attrs)?;
    let mut r = q.reduce(&ct.c0);
    for (&i, w) in &weights {
        let label = sk.policy.label(i);
        let c_attr = ct
            .c_attrs
            .get(label)
            .ok_or_else(|| Error::MissingComponent(label.to_string()))?;
        if c_attr.dim() != m || c_attr.modulus() != q {
            return Err(Error::Malformed(format!("component for {label:?} has the wrong shape")));
        }
        let row = sk.grid.get(i).ok_or_else(|| Error::Malformed("key grid is short".into()))?;
        // the double sum is linear in e, so sum the share columns first
        let mut e_sum = vec![0i64; 2 * m];
        for cell in row {
            if cell.vector_e.len() != 2 * m {
                return Err(Error::Malformed("key vector has the wrong length".into()));
            }
            for (acc, &v) in e_sum.iter_mut().zip(&cell.vector_e) {
                *acc = acc
                    .checked_add(v)
                    .ok_or_else(|| Error::Malformed("key vector entries overflow".into()))?;
            }
        }
        let term = q.add(&ct.c_prime.dot_int(&e_sum[..m])?, &c_attr.dot_int(&e_sum[m..])?);
        r = q.sub(&r, &q.mul(w, &term));
    }
    Ok(r)
}

/// Decrypts one bit: `0` when `|r| < q/4` for the centered residue, else `1`.
pub fn decrypt(pp: &PublicParams, sk: &UserSecretKey, ct: &Ciphertext) -> Result<bool> {
    let r = decrypt_residue(pp, sk, ct)?;
    let q = &pp.params.q;
    let four_r = centered(&r, q).magnitude() << 2u32;
    Ok(four_r >= *q.value())
}

/// Encrypts `payload` bit by bit, most significant bit of each byte first.
/// Every bit gets its own forked random stream.
pub fn encrypt_bytes(
    pp: &PublicParams,
    attrs: &BTreeSet<String>,
    payload: &[u8],
    rng: &mut RandomSource,
) -> Result<Vec<Ciphertext>> {
    encrypt_bytes_with_noise(pp, attrs, payload, NoiseMode::Gaussian, rng)
}

/// [`encrypt_bytes`] with a choice of noise.
pub fn encrypt_bytes_with_noise(
    pp: &PublicParams,
    attrs: &BTreeSet<String>,
    payload: &[u8],
    noise: NoiseMode,
    rng: &mut RandomSource,
) -> Result<Vec<Ciphertext>> {
    if payload.len() > MAX_PAYLOAD {
        return Err(Error::PayloadTooLarge(payload.len()));
    }
    if attrs.is_empty() {
        return Err(Error::InvalidParameter("attribute set is empty".into()));
    }
    let jobs: Vec<(bool, RandomSource)> = payload
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |k| byte >> k & 1 == 1))
        .zip(rng.fork_many(payload.len() * 8))
        .collect();
    par::try_map(jobs, |(bit, mut r)| encrypt_with_noise(pp, attrs, bit, noise, &mut r))
}

/// Inverse of [`encrypt_bytes`].
pub fn decrypt_bytes(pp: &PublicParams, sk: &UserSecretKey, cts: &[Ciphertext]) -> Result<Vec<u8>> {
    if !cts.len().is_multiple_of(8) {
        return Err(Error::Malformed(format!("{} ciphertexts is not a whole number of bytes", cts.len())));
    }
    if cts.len() / 8 > MAX_PAYLOAD {
        return Err(Error::PayloadTooLarge(cts.len() / 8));
    }
    if let Some(first) = cts.first() {
        find_reconstruction(&sk.policy, &first.attrs)?;
    }
    let bits = par::try_map(cts.iter().collect(), |ct| decrypt(pp, sk, ct))?;
    Ok(bits
        .chunks(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| acc << 1 | b as u8))
        .collect())
}
