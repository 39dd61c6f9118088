//! Trapdoor lattice primitives.
//!
//! * [`trap_gen`] builds a uniform-looking `A ∈ Z_q^{n×m}` together with a
//!   short basis `T` of `Λ⊥(A) = { e ∈ Z^m : A·e ≡ 0 mod q }` using the
//!   gadget construction `A = [Ā ∥ G − Ā·R]`.
//! * [`sample_pre`] draws a short `e` with `A·e ≡ u` by randomized nearest
//!   plane (Klein's algorithm) over the trapdoor basis.
//! * [`ext_basis`] extends a basis of `Λ⊥(A)` to one of `Λ⊥(A ∥ Ā)` without
//!   changing the Gram-Schmidt norm; [`sample_left`] samples over the
//!   extended basis.
//! * [`gram_schmidt_norm`] measures basis quality with exact rational
//!   arithmetic.
//!
//! Bases are signed integer matrices and are never reduced mod `q`.
//! Floating point only steers which lattice vectors get subtracted; every
//! update to a candidate preimage is exact integer arithmetic, so the
//! membership equation `A·e ≡ u` holds with no tolerance.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::gauss::{sample_z, GaussParam, RandomSource, C_OMEGA};
use crate::par;
use crate::zq::{concat_cols, Modulus, ZqMatrix, ZqVector};

/// Dense row-major matrix of signed integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} integer matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<i64>]) -> Result<Self> {
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch("column length differs from row count".into()));
        }
        let cols = columns.len();
        let mut data = vec![0; rows * cols];
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![1; dim])
    }

    pub fn diagonal(diag: &[i64]) -> Self {
        let n = diag.len();
        let mut data = vec![0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            data[i * n + i] = d;
        }
        Self { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row-major entries.
    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Row `i` of the result is row `order[i]` of `self`.
    pub fn permute_rows(&self, order: &[usize]) -> Result<IntMatrix> {
        check_permutation(order, self.rows)?;
        let mut data = Vec::with_capacity(self.data.len());
        for &r in order {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> i64 {
        self.data.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            writeln!(f, "  {:?}", &row[..row.len().min(12)])?;
        }
        write!(f, "]")
    }
}

fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if order.len() != len {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for {len} items",
            order.len()
        )));
    }
    for &i in order {
        if i >= len || std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
    }
    Ok(())
}

/// `A · T mod q`.
pub fn mul_zq_int(a: &ZqMatrix, t: &IntMatrix) -> Result<ZqMatrix> {
    if a.cols() != t.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            t.rows,
            t.cols
        )));
    }
    let rows: Vec<ZqVector> = (0..a.rows()).map(|i| a.row(i)).collect();
    let columns = t.columns();
    let products = par::map(columns, |col| {
        rows.iter().map(|r| r.dot_int(&col)).collect::<Result<Vec<_>>>()
    });
    let mut entries = vec![Default::default(); a.rows() * t.cols];
    for (j, col) in products.into_iter().enumerate() {
        for (i, v) in col?.into_iter().enumerate() {
            entries[i * t.cols + j] = v;
        }
    }
    ZqMatrix::from_entries(a.rows(), t.cols, entries, a.modulus())
}

fn dot_i128(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Leading Gram determinants `d_0 = 1, d_1, …, d_k` of the columns.
///
/// `d_i` is a positive integer below `∏_{j≤i} ‖b_j‖²`, so it is recovered
/// exactly from its residues modulo enough word-size primes. A prime that
/// divides some `d_i` is skipped; if too many are skipped (a singular
/// basis, or bad luck) the fraction-free recurrence decides.
fn gram_determinants(columns: &[Vec<i64>]) -> Result<Vec<BigInt>> {
    multimodular_determinants(columns).map_or_else(|| fraction_free_determinants(columns), Ok)
}

/// Primes below `2^25`, largest first.
fn crt_primes() -> &'static [u64] {
    static PRIMES: std::sync::OnceLock<Vec<u64>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| {
        let is_prime = |n: u64| {
            // deterministic below 4.7e9
            let (mut d, mut s) = (n - 1, 0);
            while d % 2 == 0 {
                d /= 2;
                s += 1;
            }
            [2u64, 7, 61].iter().all(|&a| {
                if a % n == 0 {
                    return true;
                }
                let mut x = pow_mod(a, d, n);
                if x == 1 || x == n - 1 {
                    return true;
                }
                for _ in 1..s {
                    x = x * x % n;
                    if x == n - 1 {
                        return true;
                    }
                }
                false
            })
        };
        ((1u64 << 24)..(1u64 << 25)).rev().filter(|&n| n % 2 == 1 && is_prime(n)).take(4096).collect()
    })
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// `d_1 … d_k mod p` by symmetric elimination on the Gram matrix, or `None`
/// when some pivot vanishes mod `p`.
///
/// With `p < 2^25` every product is below `2^50`, so the update runs exactly
/// in `f64`, which the compiler can vectorize.
fn gram_minors_mod(gram: &[i128], k: usize, p: u64) -> Option<Vec<u64>> {
    let mut g: Vec<f64> = gram.iter().map(|&v| v.rem_euclid(p as i128) as f64).collect();
    const ROUND: f64 = 6755399441055744.0; // 1.5 * 2^52
    let (pf, pinv) = (p as f64, 1.0 / p as f64);
    let mut out = Vec::with_capacity(k);
    let mut acc = 1u64;
    for c in 0..k {
        let pivot = g[c * k + c] as u64;
        if pivot == 0 {
            return None;
        }
        acc = acc * pivot % p;
        out.push(acc);
        let inv = pow_mod(pivot, p - 2, p);
        let (upper, lower) = g.split_at_mut((c + 1) * k);
        let pivot_row = &upper[c * k..];
        for r in c + 1..k {
            let head = pivot_row[r] as u64;
            if head == 0 {
                continue;
            }
            let f = (head * inv % p) as f64;
            let row = &mut lower[(r - c - 1) * k..(r - c) * k];
            for (x, &v) in row[r..].iter_mut().zip(&pivot_row[r..]) {
                let t = *x - f * v;
                // nearest integer quotient, so t lands in [−p/2, p/2]
                let quot = (t * pinv + ROUND) - ROUND;
                let t = t - quot * pf;
                *x = if t < 0.0 { t + pf } else { t };
            }
        }
    }
    Some(out)
}

fn multimodular_determinants(columns: &[Vec<i64>]) -> Option<Vec<BigInt>> {
    let k = columns.len();
    let mut gram = vec![0i128; k * k];
    for i in 0..k {
        for j in i..k {
            let v = dot_i128(&columns[i], &columns[j]);
            gram[i * k + j] = v;
            gram[j * k + i] = v;
        }
    }
    // Hadamard: d_i ≤ ∏_{j≤i} G_jj ≤ ∏_j G_jj
    let mut bound = num_bigint::BigUint::one();
    for i in 0..k {
        let diag = gram[i * k + i];
        if diag <= 0 {
            return None;
        }
        bound *= num_bigint::BigUint::from(diag as u128);
    }
    let needed = bound.bits() + 1;

    let mut residues: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut bits = 0u64;
    let mut skipped = 0;
    let mut candidates = crt_primes().iter();
    while bits < needed {
        let batch: Vec<u64> = candidates.by_ref().take(((needed - bits) / 24 + 1) as usize).copied().collect();
        if batch.is_empty() {
            return None;
        }
        let minors = par::map(batch.clone(), |p| gram_minors_mod(&gram, k, p));
        for (p, r) in batch.into_iter().zip(minors) {
            match r {
                Some(r) => {
                    residues.push((p, r));
                    bits += 24;
                }
                None => {
                    skipped += 1;
                    if skipped > 4 {
                        return None;
                    }
                }
            }
        }
    }

    // Garner: x ≡ r_t (mod p_t) for each prime in turn
    let mut prefixes = Vec::with_capacity(residues.len());
    let mut modulus = num_bigint::BigUint::one();
    for (p, _) in &residues {
        let m_mod = (&modulus % p).to_u64().expect("below p");
        prefixes.push((modulus.clone(), pow_mod(m_mod, p - 2, *p)));
        modulus *= *p;
    }
    let mut d = vec![BigInt::one()];
    for i in 0..k {
        let mut x = num_bigint::BigUint::zero();
        for ((p, r), (prefix, inv)) in residues.iter().zip(&prefixes) {
            let x_mod = (&x % p).to_u64().expect("below p");
            let t = (r[i] + p - x_mod) % p * inv % p;
            x += prefix * t;
        }
        if x.is_zero() {
            return None;
        }
        d.push(BigInt::from(x));
    }
    Some(d)
}

/// The integral (fraction-free) Gram-Schmidt recurrence. Every
/// intermediate is an exact integer.
fn fraction_free_determinants(columns: &[Vec<i64>]) -> Result<Vec<BigInt>> {
    let k = columns.len();
    let mut d: Vec<BigInt> = Vec::with_capacity(k + 1);
    d.push(BigInt::one());
    let mut lambda: Vec<Vec<BigInt>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut row: Vec<BigInt> = Vec::with_capacity(i);
        for j in 0..=i {
            let mut u = BigInt::from(dot_i128(&columns[i], &columns[j]));
            for l in 0..j {
                let other = if j < i { &lambda[j][l] } else { &row[l] };
                u *= &d[l + 1];
                if !other.is_zero() && !row[l].is_zero() {
                    u -= &row[l] * other;
                }
                u /= &d[l];
            }
            if j < i {
                row.push(u);
            } else {
                if u.is_zero() {
                    return Err(Error::RankDeficient);
                }
                d.push(u);
            }
        }
        lambda.push(row);
    }
    Ok(d)
}

/// Exact squared lengths `‖b̃_i‖²` of the Gram-Schmidt vectors of the
/// columns of `t`, in column order.
pub fn gram_schmidt_sq_norms(t: &IntMatrix) -> Result<Vec<BigRational>> {
    let d = gram_determinants(&t.columns())?;
    Ok(d.windows(2).map(|w| BigRational::new(w[1].clone(), w[0].clone())).collect())
}

/// The largest exact squared Gram-Schmidt length.
pub fn gram_schmidt_sq_norm(t: &IntMatrix) -> Result<BigRational> {
    gram_schmidt_sq_norms(t)?
        .into_iter()
        .max()
        .ok_or_else(|| Error::InvalidParameter("empty basis".into()))
}

/// `‖T̃‖`: the largest Gram-Schmidt column length of `t`.
///
/// Computed exactly over the rationals; the returned float is rounded up so
/// it is never below the true value.
pub fn gram_schmidt_norm(t: &IntMatrix) -> Result<f64> {
    if t.rows != t.cols {
        return Err(Error::DimensionMismatch(format!(
            "gram-schmidt norm of a non-square {}x{} matrix",
            t.rows, t.cols
        )));
    }
    Ok(sqrt_upper(&gram_schmidt_sq_norm(t)?))
}

/// An `f64` at least `sqrt(r)`.
pub fn sqrt_upper(r: &BigRational) -> f64 {
    let x = r.to_f64().unwrap_or(f64::INFINITY);
    let bumped = x * (1.0 + 4.0 * f64::EPSILON);
    bumped.sqrt() * (1.0 + 4.0 * f64::EPSILON)
}

/// Whether the columns of a square matrix are linearly independent over Q.
///
/// A nonzero determinant modulo any prime certifies a nonzero integer
/// determinant, so two word-size primes are tried first; only if both fail
/// does this fall back to exact fraction-free elimination.
pub fn is_full_rank(t: &IntMatrix) -> bool {
    if t.rows != t.cols {
        return false;
    }
    const PRIMES: [u64; 2] = [(1 << 61) - 1, 18_446_744_073_709_551_557];
    if PRIMES.iter().any(|&p| full_rank_mod(t, p)) {
        return true;
    }
    gram_determinants(&t.columns()).is_ok()
}

fn full_rank_mod(t: &IntMatrix, p: u64) -> bool {
    let n = t.rows;
    let p128 = p as u128;
    let mut m: Vec<u64> = t.data.iter().map(|&v| (v as i128).rem_euclid(p as i128) as u64).collect();
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % p128) as u64;
    let powmod = |mut base: u64, mut exp: u64| {
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base);
            }
            base = mulmod(base, base);
            exp >>= 1;
        }
        acc
    };
    for c in 0..n {
        let Some(pivot) = (c..n).find(|&r| m[r * n + c] != 0) else {
            return false;
        };
        if pivot != c {
            for j in 0..n {
                m.swap(pivot * n + j, c * n + j);
            }
        }
        let inv = powmod(m[c * n + c], p - 2);
        for r in c + 1..n {
            let factor = mulmod(m[r * n + c], inv);
            if factor == 0 {
                continue;
            }
            for j in c..n {
                let sub = mulmod(factor, m[c * n + j]);
                m[r * n + j] = if m[r * n + j] >= sub { m[r * n + j] - sub } else { m[r * n + j] + (p - sub) };
            }
        }
    }
    true
}

/// Floating-point Gram-Schmidt data used to steer nearest-plane steps.
#[derive(Debug)]
struct Gso {
    vectors: Vec<Vec<f64>>,
    sq_norms: Vec<f64>,
}

impl Gso {
    fn compute(columns: &[Vec<i64>]) -> Result<Self> {
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(columns.len());
        let mut sq_norms: Vec<f64> = Vec::with_capacity(columns.len());
        for col in columns {
            let mut v: Vec<f64> = col.iter().map(|&x| x as f64).collect();
            let original = dot_f64(&v, &v);
            for (u, &s) in vectors.iter().zip(&sq_norms) {
                let mu = dot_f64(&v, u) / s;
                if mu != 0.0 {
                    v.iter_mut().zip(u).for_each(|(vi, ui)| *vi -= mu * ui);
                }
            }
            let s = dot_f64(&v, &v);
            if s.is_nan() || s <= 1e-20 * original.max(1.0) {
                return Err(Error::RankDeficient);
            }
            vectors.push(v);
            sq_norms.push(s);
        }
        Ok(Self { vectors, sq_norms })
    }

    fn max_norm(&self) -> f64 {
        self.sq_norms.iter().cloned().fold(0.0, f64::max).sqrt()
    }
}

/// Particular solutions of `A·x = u` through an invertible column subset.
#[derive(Debug)]
struct Solver {
    pivots: Vec<usize>,
    inverse: ZqMatrix,
    width: usize,
}

impl Solver {
    fn new(a: &ZqMatrix) -> Result<Self> {
        let pivots = a.pivot_columns();
        if pivots.len() < a.rows() {
            return Err(Error::NotABasis("columns of A do not generate Z_q^n".into()));
        }
        let inverse = a.select_columns(&pivots).inverse()?;
        Ok(Self { pivots, inverse, width: a.cols() })
    }

    fn solve(&self, u: &ZqVector) -> Result<Vec<BigInt>> {
        let x = self.inverse.mul_vec(u)?;
        let mut t = vec![BigInt::zero(); self.width];
        for (&p, v) in self.pivots.iter().zip(x.entries()) {
            t[p] = BigInt::from(v.clone());
        }
        Ok(t)
    }
}

/// Shared per-basis state derived from `(A, T)`.
struct Cache {
    columns: Vec<Vec<i64>>,
    gso: Gso,
    solver: Solver,
}

/// `(A, T)` with `A·T ≡ 0 (mod q)` and `T` a full-rank integer basis.
#[derive(Clone)]
pub struct TrapdoorPair {
    matrix_a: ZqMatrix,
    basis_t: IntMatrix,
    cache: Arc<Cache>,
}

impl fmt::Debug for TrapdoorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrapdoorPair")
            .field("n", &self.n())
            .field("m", &self.m())
            .field("q", self.matrix_a.modulus())
            .field("gs_norm", &self.gs_norm())
            .finish()
    }
}

impl PartialEq for TrapdoorPair {
    fn eq(&self, other: &Self) -> bool {
        self.matrix_a == other.matrix_a && self.basis_t == other.basis_t
    }
}

impl TrapdoorPair {
    /// Validates `A·T ≡ 0`, full rank of `T`, and that the columns of `A`
    /// generate `Z_q^n`.
    pub fn new(matrix_a: ZqMatrix, basis_t: IntMatrix) -> Result<Self> {
        if basis_t.rows != matrix_a.cols() || basis_t.cols != matrix_a.cols() {
            return Err(Error::DimensionMismatch(format!(
                "basis is {}x{} but A has {} columns",
                basis_t.rows,
                basis_t.cols,
                matrix_a.cols()
            )));
        }
        if !mul_zq_int(&matrix_a, &basis_t)?.is_zero() {
            return Err(Error::NotABasis("A·T is not zero mod q".into()));
        }
        Self::assemble(matrix_a, basis_t)
    }

    fn assemble(matrix_a: ZqMatrix, basis_t: IntMatrix) -> Result<Self> {
        let columns = basis_t.columns();
        let gso = Gso::compute(&columns).map_err(|_| Error::NotABasis("T is rank deficient".into()))?;
        let solver = Solver::new(&matrix_a)?;
        Ok(Self { matrix_a, basis_t, cache: Arc::new(Cache { columns, gso, solver }) })
    }

    pub fn matrix_a(&self) -> &ZqMatrix {
        &self.matrix_a
    }

    pub fn basis_t(&self) -> &IntMatrix {
        &self.basis_t
    }

    pub fn modulus(&self) -> &Modulus {
        self.matrix_a.modulus()
    }

    pub fn n(&self) -> usize {
        self.matrix_a.rows()
    }

    pub fn m(&self) -> usize {
        self.matrix_a.cols()
    }

    /// Floating-point `‖T̃‖`, used for sampler preconditions. See
    /// [`gram_schmidt_norm`] for the exact value.
    pub fn gs_norm(&self) -> f64 {
        self.cache.gso.max_norm()
    }

    /// Smallest admissible sampling width over `dim` coordinates:
    /// `‖T̃‖ · c_ω · √(ln dim)`.
    pub fn min_sigma(&self, dim: usize) -> f64 {
        self.gs_norm() * (1.0 + 1e-9) * C_OMEGA * (dim as f64).ln().max(0.0).sqrt()
    }

    /// A short `t` with `A·t ≡ u`: a particular solution reduced by
    /// deterministic nearest plane.
    fn short_solution(&self, u: &ZqVector) -> Result<Vec<i64>> {
        let t = self.cache.solver.solve(u)?;
        reduce_coset(&self.cache.columns, &self.cache.gso, t)
    }

    /// Extends this trapdoor to `A ∥ extra`; see [`ext_basis`].
    pub fn extend(&self, extra: &ZqMatrix) -> Result<ExtendedTrapdoor<'_>> {
        if extra.rows() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "extension has {} rows, A has {}",
                extra.rows(),
                self.n()
            )));
        }
        if extra.modulus() != self.modulus() {
            return Err(Error::ModulusMismatch);
        }
        let targets: Vec<ZqVector> = (0..extra.cols())
            .map(|k| {
                let col = extra.column(k);
                ZqVector::zeros(col.dim(), col.modulus()).sub(&col)
            })
            .collect::<Result<_>>()?;
        let links = par::try_map(targets, |target| self.short_solution(&target))?;
        Ok(ExtendedTrapdoor { base: self, extra: extra.clone(), links })
    }
}

/// The basis `S′ = [[S, W], [0, I]]` of `Λ⊥(A ∥ Ā)` kept in block form.
///
/// Column `k` of `W` is a short solution of `A·w = −ā_k`. In this column
/// order the Gram-Schmidt vectors of `S′` are those of `S` (padded with
/// zeros) followed by unit vectors, which is why `‖S̃′‖ = ‖S̃‖`.
pub struct ExtendedTrapdoor<'a> {
    base: &'a TrapdoorPair,
    extra: ZqMatrix,
    links: Vec<Vec<i64>>,
}

impl ExtendedTrapdoor<'_> {
    /// The combined matrix `A ∥ Ā`.
    pub fn matrix(&self) -> Result<ZqMatrix> {
        concat_cols(self.base.matrix_a(), &self.extra)
    }

    /// Materializes `S′` as a dense integer matrix.
    pub fn to_basis(&self) -> IntMatrix {
        let m = self.base.m();
        let total = m + self.links.len();
        let s = &self.base.basis_t;
        let mut data = vec![0i64; total * total];
        for i in 0..m {
            for j in 0..m {
                data[i * total + j] = s.get(i, j);
            }
        }
        for (k, w) in self.links.iter().enumerate() {
            for (i, &v) in w.iter().enumerate() {
                data[i * total + m + k] = v;
            }
            data[(m + k) * total + m + k] = 1;
        }
        IntMatrix { rows: total, cols: total, data }
    }

    /// Total width `m + m₁`.
    pub fn width(&self) -> usize {
        self.base.m() + self.links.len()
    }

    /// [`sample_left`] against this extension; reuse it to draw many
    /// preimages for the same right-hand block.
    pub fn sample_left(
        &self,
        u: &ZqVector,
        sigma: &GaussParam,
        rng: &mut RandomSource,
    ) -> Result<Preimage> {
        check_target(self.base, u)?;
        let required = self.base.min_sigma(self.width());
        if sigma.sigma() < required {
            return Err(Error::GaussianTooSmall { got: sigma.sigma(), required });
        }
        let e = self.sample(u, &sigma.recentered(0.0), rng)?;
        Ok(Preimage {
            vector_e: e,
            target_u: u.clone(),
            norm_bound: sigma.sigma() * (self.width() as f64).sqrt(),
        })
    }

    /// Klein sampling over `S′`. The trailing unit-norm columns are handled
    /// first, then the base basis.
    fn sample(&self, u: &ZqVector, sigma: &GaussParam, rng: &mut RandomSource) -> Result<Vec<i64>> {
        let m = self.base.m();
        let mut top = self.base.short_solution(u)?;
        let mut bottom = vec![0i64; self.links.len()];
        let unit = sigma.recentered(0.0);
        for k in (0..self.links.len()).rev() {
            let z = sample_z(&unit.recentered(bottom[k] as f64), rng)?;
            if z != 0 {
                bottom[k] -= z;
                top.iter_mut().zip(&self.links[k]).for_each(|(t, &w)| *t -= z * w);
            }
        }
        let top = klein(&self.base.cache.columns, &self.base.cache.gso, top, sigma, rng)?;
        debug_assert_eq!(top.len(), m);
        let mut e = top;
        e.extend(bottom);
        Ok(e)
    }
}

/// Nearest-plane rounding of a coset representative: subtracts integer
/// combinations of the basis until every entry fits comfortably in `i64`.
fn reduce_coset(columns: &[Vec<i64>], gso: &Gso, t: Vec<BigInt>) -> Result<Vec<i64>> {
    let limit_wide = BigInt::one() << 100u32;
    let mut t = t;
    let mut passes = 0;
    while t.iter().any(|v| v.abs() >= limit_wide) {
        passes += 1;
        if passes > 64 {
            return Err(Error::InvalidParameter("coset reduction did not converge".into()));
        }
        let mut tf: Vec<f64> = t.iter().map(|v| v.to_f64().unwrap_or(0.0)).collect();
        for i in (0..columns.len()).rev() {
            let c = (dot_f64(&tf, &gso.vectors[i]) / gso.sq_norms[i]).round();
            if c != 0.0 && c.is_finite() {
                let ci = BigInt::from(c as i128);
                for (r, &b) in columns[i].iter().enumerate() {
                    if b != 0 {
                        t[r] -= &ci * b;
                        tf[r] -= c * b as f64;
                    }
                }
            }
        }
    }
    let mut t: Vec<i128> = t.iter().map(|v| v.to_i128().expect("below 2^100")).collect();
    let limit = 1i128 << 52;
    let mut passes = 0;
    while t.iter().any(|v| v.abs() >= limit) {
        passes += 1;
        if passes > 64 {
            return Err(Error::InvalidParameter("coset reduction did not converge".into()));
        }
        let mut tf: Vec<f64> = t.iter().map(|&v| v as f64).collect();
        for i in (0..columns.len()).rev() {
            let c = (dot_f64(&tf, &gso.vectors[i]) / gso.sq_norms[i]).round();
            if c != 0.0 {
                let ci = c as i128;
                for (r, &b) in columns[i].iter().enumerate() {
                    if b != 0 {
                        t[r] -= ci * b as i128;
                        tf[r] -= c * b as f64;
                    }
                }
            }
        }
    }
    // one more deterministic pass to land near the fundamental region
    let mut t: Vec<i64> = t.into_iter().map(|v| v as i64).collect();
    let mut tf: Vec<f64> = t.iter().map(|&v| v as f64).collect();
    for i in (0..columns.len()).rev() {
        let c = (dot_f64(&tf, &gso.vectors[i]) / gso.sq_norms[i]).round();
        if c != 0.0 {
            let ci = c as i64;
            for (r, &b) in columns[i].iter().enumerate() {
                if b != 0 {
                    t[r] -= ci * b;
                    tf[r] = t[r] as f64;
                }
            }
        }
    }
    Ok(t)
}

/// Randomized nearest plane: returns `t − v` where `v` is a lattice vector
/// drawn close to `D_{Λ,σ,t}`.
fn klein(
    columns: &[Vec<i64>],
    gso: &Gso,
    t: Vec<i64>,
    sigma: &GaussParam,
    rng: &mut RandomSource,
) -> Result<Vec<i64>> {
    let mut c = t;
    let mut cf: Vec<f64> = c.iter().map(|&v| v as f64).collect();
    for i in (0..columns.len()).rev() {
        let norm = gso.sq_norms[i].sqrt();
        let center = dot_f64(&cf, &gso.vectors[i]) / gso.sq_norms[i];
        let param = sigma.rescaled(sigma.sigma() / norm).recentered(center);
        let z = sample_z(&param, rng)?;
        if z != 0 {
            for (r, &b) in columns[i].iter().enumerate() {
                if b != 0 {
                    c[r] -= z * b;
                    cf[r] = c[r] as f64;
                }
            }
        }
    }
    Ok(c)
}

/// A short vector in the coset `Λ_q^u(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Preimage {
    pub vector_e: Vec<i64>,
    pub target_u: ZqVector,
    pub norm_bound: f64,
}

impl Preimage {
    /// Euclidean length of `e`.
    pub fn norm(&self) -> f64 {
        self.vector_e.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt()
    }

    pub fn within_bound(&self) -> bool {
        self.norm() <= self.norm_bound
    }
}

/// Minimum `m` for [`trap_gen`]: `m >= 5·n·log₂ q`.
pub fn min_trapdoor_width(n: usize, q: &Modulus) -> usize {
    (5.0 * n as f64 * q.log2()).ceil() as usize
}

/// Generates `(A, T)` with `A = [Ā ∥ G − Ā·R]`.
///
/// `Ā` is uniform, `R` has entries uniform in `{−1, 0, 1}` and `G` is the
/// power-of-two gadget. The basis is
///
/// ```text
/// T = [ R·S_G   I + R·W ]
///     [ S_G     W       ]
/// ```
///
/// where `S_G` is a short basis of `Λ⊥(G)` and `G·W ≡ −Ā` with 0/1 digits.
pub fn trap_gen(n: usize, m: usize, q: &Modulus, rng: &mut RandomSource) -> Result<TrapdoorPair> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be positive".into()));
    }
    let required = min_trapdoor_width(n, q);
    if m < required {
        return Err(Error::InvalidParameter(format!(
            "m = {m} is below 5·n·log2(q) = {required}"
        )));
    }
    let digits = gadget_digits(q);
    let w = n * digits;
    let m_bar = m - w;

    let a_bar = ZqMatrix::random(n, m_bar, q, rng);
    let r: Vec<i64> = (0..m_bar * w).map(|_| rng.gen_range(-1i64..=1)).collect();

    // G − Ā·R
    let mut right = Vec::with_capacity(n * w);
    let r_cols: Vec<Vec<i64>> = (0..w).map(|j| (0..m_bar).map(|i| r[i * w + j]).collect()).collect();
    for i in 0..n {
        let row = a_bar.row(i);
        for (j, r_col) in r_cols.iter().enumerate() {
            let ar = row.dot_int(r_col)?;
            let g = if j / digits == i {
                q.reduce(&(num_bigint::BigUint::one() << (j % digits)))
            } else {
                num_bigint::BigUint::zero()
            };
            right.push(q.sub(&g, &ar));
        }
    }
    let right = ZqMatrix::from_entries(n, w, right, q)?;
    let matrix_a = concat_cols(&a_bar, &right)?;

    let s_k = gadget_basis_block(q, digits);
    // W: digit decomposition of −Ā, column by column
    let mut w_mat = vec![0i64; w * m_bar];
    for i in 0..n {
        for j in 0..m_bar {
            let neg = q.neg(a_bar.get(i, j));
            for l in 0..digits {
                w_mat[(i * digits + l) * m_bar + j] = neg.bit(l as u64) as i64;
            }
        }
    }

    let mut data = vec![0i64; m * m];
    // first w columns: [R·S_G; S_G]
    for col in 0..w {
        let block = col / digits;
        let c = col % digits;
        for row in 0..m_bar {
            let mut acc = 0i64;
            for l in 0..digits {
                let s = s_k[l * digits + c];
                if s != 0 {
                    acc += r[row * w + block * digits + l] * s;
                }
            }
            data[row * m + col] = acc;
        }
        for l in 0..digits {
            data[(m_bar + block * digits + l) * m + col] = s_k[l * digits + c];
        }
    }
    // last m̄ columns: [I + R·W; W]
    for row in 0..m_bar {
        for j in 0..m_bar {
            let mut acc = if row == j { 1i64 } else { 0 };
            for l in 0..w {
                let wv = w_mat[l * m_bar + j];
                if wv != 0 {
                    acc += r[row * w + l] * wv;
                }
            }
            data[row * m + w + j] = acc;
        }
    }
    for l in 0..w {
        for j in 0..m_bar {
            data[(m_bar + l) * m + w + j] = w_mat[l * m_bar + j];
        }
    }
    let basis_t = IntMatrix { rows: m, cols: m, data };
    debug_assert!(mul_zq_int(&matrix_a, &basis_t)?.is_zero());
    TrapdoorPair::assemble(matrix_a, basis_t)
}

/// Worst-case `‖T̃‖` for any basis produced by [`trap_gen`] with these
/// dimensions.
///
/// The trailing `m̄` Gram-Schmidt vectors have length at most one, and each
/// leading column `[R·s; s]` has squared length at most
/// `m̄·‖s‖₁² + ‖s‖₂²` because `R` has entries in `{−1, 0, 1}`.
pub fn trapdoor_gs_bound(n: usize, m: usize, q: &Modulus) -> f64 {
    let digits = gadget_digits(q);
    let m_bar = m.saturating_sub(n * digits) as f64;
    let s = gadget_basis_block(q, digits);
    let worst = (0..digits)
        .map(|c| {
            let l1: f64 = (0..digits).map(|l| s[l * digits + c].abs() as f64).sum();
            let l2: f64 = (0..digits).map(|l| (s[l * digits + c] as f64).powi(2)).sum();
            m_bar * l1 * l1 + l2
        })
        .fold(1.0, f64::max);
    worst.sqrt() * (1.0 + 4.0 * f64::EPSILON)
}

/// Number of base-2 digits of the gadget: `ceil(log₂ q)`.
fn gadget_digits(q: &Modulus) -> usize {
    let q_minus_one = q.value() - 1u32;
    (q_minus_one.bits() as usize).max(1)
}

/// Row-major `k×k` basis of `Λ⊥(g)` for `g = (1, 2, …, 2^{k−1})`: `2` on the
/// diagonal, `−1` below it, and the binary digits of `q` in the last column.
fn gadget_basis_block(q: &Modulus, k: usize) -> Vec<i64> {
    let mut s = vec![0i64; k * k];
    for j in 0..k - 1 {
        s[j * k + j] = 2;
        s[(j + 1) * k + j] = -1;
    }
    if q.value().count_ones() == 1 {
        // q = 2^k: the last column is 2·e_{k−1}
        s[(k - 1) * k + (k - 1)] = 2;
    } else {
        for l in 0..k {
            s[l * k + (k - 1)] = q.value().bit(l as u64) as i64;
        }
    }
    s
}

/// Samples `e` with `A·e ≡ u (mod q)` distributed close to
/// `D_{Λ_q^u(A), σ}`.
pub fn sample_pre(
    pair: &TrapdoorPair,
    u: &ZqVector,
    sigma: &GaussParam,
    rng: &mut RandomSource,
) -> Result<Preimage> {
    check_target(pair, u)?;
    let required = pair.min_sigma(pair.m());
    if sigma.sigma() < required {
        return Err(Error::GaussianTooSmall { got: sigma.sigma(), required });
    }
    let t = pair.short_solution(u)?;
    let e = klein(&pair.cache.columns, &pair.cache.gso, t, &sigma.recentered(0.0), rng)?;
    Ok(Preimage {
        vector_e: e,
        target_u: u.clone(),
        norm_bound: sigma.sigma() * (pair.m() as f64).sqrt(),
    })
}

fn check_target(pair: &TrapdoorPair, u: &ZqVector) -> Result<()> {
    if u.modulus() != pair.modulus() {
        return Err(Error::ModulusMismatch);
    }
    if u.dim() != pair.n() {
        return Err(Error::DimensionMismatch(format!(
            "target of dim {} for A with {} rows",
            u.dim(),
            pair.n()
        )));
    }
    Ok(())
}

/// Samples `e ∈ Z^{m+m₁}` with `(A ∥ B)·e ≡ u`, using only the trapdoor of
/// `A`. Realized as [`ext_basis`] followed by nearest-plane sampling over
/// the extended basis.
pub fn sample_left(
    a0: &ZqMatrix,
    b1: &ZqMatrix,
    t_a0: &TrapdoorPair,
    sigma: &GaussParam,
    u: &ZqVector,
    rng: &mut RandomSource,
) -> Result<Preimage> {
    if a0 != t_a0.matrix_a() {
        return Err(Error::InvalidParameter("trapdoor does not belong to the left matrix".into()));
    }
    check_target(t_a0, u)?;
    let total = t_a0.m() + b1.cols();
    let required = t_a0.min_sigma(total);
    if sigma.sigma() < required {
        return Err(Error::GaussianTooSmall { got: sigma.sigma(), required });
    }
    if b1.cols() == 0 {
        return sample_pre(t_a0, u, sigma, rng);
    }
    t_a0.extend(b1)?.sample_left(u, sigma, rng)
}

/// Extends a basis `S` of `Λ⊥(A)` to a basis `S′` of `Λ⊥(A ∥ Ā)` with
/// `‖S̃′‖ = ‖S̃‖`.
///
/// Fails with [`Error::NotABasis`] when `A·S ≢ 0`, `S` is rank deficient,
/// or the columns of `A` do not generate `Z_q^n`.
pub fn ext_basis(s_basis: &IntMatrix, a: &ZqMatrix, a_bar: &ZqMatrix) -> Result<IntMatrix> {
    let pair = TrapdoorPair::new(a.clone(), s_basis.clone()).map_err(|e| match e {
        Error::NotABasis(_) | Error::RankDeficient => e,
        Error::DimensionMismatch(msg) => Error::NotABasis(msg),
        other => other,
    })?;
    if a_bar.cols() == 0 {
        return Ok(s_basis.clone());
    }
    Ok(pair.extend(a_bar)?.to_basis())
}

/// [`ext_basis`] for the column-permuted matrix whose `j`-th column is
/// column `order[j]` of `A ∥ Ā`. The result is `S′` with rows permuted the
/// same way, so its Gram-Schmidt norm is unchanged.
pub fn ext_basis_permuted(
    s_basis: &IntMatrix,
    a: &ZqMatrix,
    a_bar: &ZqMatrix,
    order: &[usize],
) -> Result<IntMatrix> {
    ext_basis(s_basis, a, a_bar)?.permute_rows(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rng(tag: u8) -> RandomSource {
        RandomSource::from_seed([tag; 32])
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gs_norm_of_simple_bases() {
        assert_eq!(gram_schmidt_sq_norm(&IntMatrix::identity(3)).unwrap(), rat(1, 1));
        assert!((gram_schmidt_norm(&IntMatrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
        let diag = IntMatrix::diagonal(&[2, 3, 5]);
        assert_eq!(gram_schmidt_sq_norm(&diag).unwrap(), rat(25, 1));
        assert!((gram_schmidt_norm(&diag).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn multimodular_minors_match_fraction_free() {
        let mut r = rng(90);
        for (dim, span) in [(5, 3i64), (24, 40), (40, 1_000_000)] {
            let columns: Vec<Vec<i64>> =
                (0..dim).map(|_| (0..dim).map(|_| r.gen_range(-span..=span)).collect()).collect();
            let fast = multimodular_determinants(&columns).unwrap();
            assert_eq!(fast, fraction_free_determinants(&columns).unwrap());
        }
        let singular = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        assert!(multimodular_determinants(&singular).is_none());
        assert_eq!(gram_determinants(&singular), Err(Error::RankDeficient));
    }

    #[test]
    fn gs_norm_of_shear_matches_hand_computation() {
        // columns (1,0) and (1,1): b̃1 = (1,0), b̃2 = (1,1) − 1·(1,0) = (0,1)
        let t = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(gram_schmidt_sq_norms(&t).unwrap(), vec![rat(1, 1), rat(1, 1)]);
        // columns (1,1) and (1,0): b̃1 = (1,1), b̃2 = (1,0) − ½(1,1) = (½,−½)
        let t = IntMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(gram_schmidt_sq_norms(&t).unwrap(), vec![rat(2, 1), rat(1, 2)]);
        let bound = gram_schmidt_norm(&t).unwrap();
        assert!(bound >= 2f64.sqrt() && bound - 2f64.sqrt() < 1e-12);
    }

    #[test]
    fn gs_norm_rejects_rank_deficiency() {
        let t = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        assert_eq!(gram_schmidt_norm(&t), Err(Error::RankDeficient));
        assert!(!is_full_rank(&t));
        assert!(is_full_rank(&IntMatrix::diagonal(&[2, 3, 5])));
    }

    #[test]
    fn exact_and_float_gso_agree() {
        let pair = trap_gen(2, 41, &Modulus::from_u64(17).unwrap(), &mut rng(1)).unwrap();
        let exact = gram_schmidt_sq_norms(pair.basis_t()).unwrap();
        for (e, f) in exact.iter().zip(&pair.cache.gso.sq_norms) {
            let e = e.to_f64().unwrap();
            assert!((e - f).abs() <= 1e-6 * e.max(1.0), "{e} vs {f}");
        }
    }

    #[test]
    fn trap_gen_enforces_width() {
        let q = Modulus::from_u64(17).unwrap();
        assert_eq!(min_trapdoor_width(2, &q), 41);
        assert!(trap_gen(2, 40, &q, &mut rng(2)).is_err());
        assert!(trap_gen(0, 40, &q, &mut rng(2)).is_err());
    }

    #[test]
    fn trap_gen_output_is_a_short_basis() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let pair = trap_gen(2, min_trapdoor_width(2, &q), &q, &mut rng(3)).unwrap();
        assert!(mul_zq_int(pair.matrix_a(), pair.basis_t()).unwrap().is_zero());
        assert!(is_full_rank(pair.basis_t()));
        let m = pair.m() as f64;
        assert!(gram_schmidt_norm(pair.basis_t()).unwrap() <= m * 2.0 * m.ln().sqrt());
        // product of Gram-Schmidt lengths is the lattice determinant q^n
        let d: BigRational = gram_schmidt_sq_norms(pair.basis_t()).unwrap().into_iter().product();
        let qn = BigRational::from_u64(1_048_583).unwrap().pow(4);
        assert_eq!(d, qn);
    }

    #[test]
    fn gs_bound_covers_generated_bases() {
        for (qv, seed) in [(17u64, 20u8), (97, 21), (1_048_583, 22), (65_537, 23)] {
            let q = Modulus::from_u64(qv).unwrap();
            let m = min_trapdoor_width(2, &q) + 3;
            let pair = trap_gen(2, m, &q, &mut rng(seed)).unwrap();
            let exact = gram_schmidt_norm(pair.basis_t()).unwrap();
            assert!(exact <= trapdoor_gs_bound(2, m, &q), "q={qv}");
        }
    }

    #[test]
    fn gadget_block_generates_kernel() {
        for qv in [2u64, 3, 17, 97, 1_048_583] {
            let q = Modulus::from_u64(qv).unwrap();
            let k = gadget_digits(&q);
            let s = gadget_basis_block(&q, k);
            for c in 0..k {
                let val: i128 = (0..k).map(|l| s[l * k + c] as i128 * (1i128 << l)).sum();
                assert_eq!(val.rem_euclid(qv as i128), 0, "q={qv} col={c}");
            }
            let block = IntMatrix::new(k, k, s).unwrap();
            let det: BigRational = gram_schmidt_sq_norms(&block).unwrap().into_iter().product();
            assert_eq!(det, BigRational::from_u64(qv * qv).unwrap(), "q={qv}");
        }
    }

    #[test]
    fn sample_pre_hits_target_exactly() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let pair = trap_gen(2, min_trapdoor_width(2, &q), &q, &mut rng(4)).unwrap();
        let sigma = GaussParam::new(pair.min_sigma(pair.m()) * 1.5).unwrap();
        let mut r = rng(5);
        for _ in 0..20 {
            let u = ZqVector::random(2, &q, &mut r);
            let p = sample_pre(&pair, &u, &sigma, &mut r).unwrap();
            assert_eq!(pair.matrix_a().mul_int_vec(&p.vector_e).unwrap(), u);
            assert!(p.within_bound());
        }
    }

    #[test]
    fn sample_pre_rejects_narrow_sigma() {
        let q = Modulus::from_u64(17).unwrap();
        let pair = trap_gen(2, 41, &q, &mut rng(6)).unwrap();
        let sigma = GaussParam::new(pair.min_sigma(41) * 0.5).unwrap();
        let u = ZqVector::zeros(2, &q);
        assert!(matches!(
            sample_pre(&pair, &u, &sigma, &mut rng(7)),
            Err(Error::GaussianTooSmall { .. })
        ));
    }

    #[test]
    fn sample_pre_in_dimension_one() {
        let q = Modulus::from_u64(17).unwrap();
        let a = ZqMatrix::from_i64_rows(&[vec![1]], &q).unwrap();
        let pair = TrapdoorPair::new(a, IntMatrix::diagonal(&[17])).unwrap();
        let u = ZqVector::from_i64s(&[5], &q);
        let sigma = GaussParam::new(40.0).unwrap();
        let mut r = rng(8);
        for _ in 0..200 {
            let e = sample_pre(&pair, &u, &sigma, &mut r).unwrap().vector_e[0];
            assert_eq!(e.rem_euclid(17), 5);
        }
    }

    #[test]
    fn trapdoor_pair_validation() {
        let q = Modulus::from_u64(17).unwrap();
        let a = ZqMatrix::from_i64_rows(&[vec![1, 1]], &q).unwrap();
        // (1,-1) and (0,17) span Λ⊥((1,1))
        let good = IntMatrix::from_rows(&[vec![1, 0], vec![-1, 17]]).unwrap();
        assert!(TrapdoorPair::new(a.clone(), good).is_ok());
        let not_kernel = IntMatrix::identity(2);
        assert!(matches!(TrapdoorPair::new(a.clone(), not_kernel), Err(Error::NotABasis(_))));
        let singular = IntMatrix::from_rows(&[vec![1, 2], vec![-1, -2]]).unwrap();
        assert!(matches!(TrapdoorPair::new(a, singular), Err(Error::NotABasis(_))));
    }

    #[test]
    fn ext_basis_small_cases() {
        let q = Modulus::from_u64(17).unwrap();
        let pair = trap_gen(2, 41, &q, &mut rng(9)).unwrap();
        let empty = ZqMatrix::zeros(2, 0, &q);
        assert_eq!(
            ext_basis(pair.basis_t(), pair.matrix_a(), &empty).unwrap(),
            *pair.basis_t()
        );
        let a_bar = ZqMatrix::random(2, 7, &q, &mut rng(10));
        let s2 = ext_basis(pair.basis_t(), pair.matrix_a(), &a_bar).unwrap();
        let joined = concat_cols(pair.matrix_a(), &a_bar).unwrap();
        assert!(mul_zq_int(&joined, &s2).unwrap().is_zero());
        assert_eq!(
            gram_schmidt_sq_norm(&s2).unwrap(),
            gram_schmidt_sq_norm(pair.basis_t()).unwrap()
        );
        // a bogus basis is refused
        let bogus = IntMatrix::identity(41);
        assert!(matches!(
            ext_basis(&bogus, pair.matrix_a(), &a_bar),
            Err(Error::NotABasis(_))
        ));
    }

    #[test]
    fn sample_left_hits_target_and_degenerates_to_sample_pre() {
        let q = Modulus::from_u64(1_048_583).unwrap();
        let pair = trap_gen(2, min_trapdoor_width(2, &q), &q, &mut rng(11)).unwrap();
        let m = pair.m();
        let b = ZqMatrix::random(2, m, &q, &mut rng(12));
        let sigma = GaussParam::new(pair.min_sigma(2 * m) * 2.0).unwrap();
        let joined = concat_cols(pair.matrix_a(), &b).unwrap();
        let mut r = rng(13);
        for _ in 0..5 {
            let u = ZqVector::random(2, &q, &mut r);
            let p = sample_left(pair.matrix_a(), &b, &pair, &sigma, &u, &mut r).unwrap();
            assert_eq!(p.vector_e.len(), 2 * m);
            assert_eq!(joined.mul_int_vec(&p.vector_e).unwrap(), u);
        }
        let none = ZqMatrix::zeros(2, 0, &q);
        let u = ZqVector::random(2, &q, &mut r);
        let p = sample_left(pair.matrix_a(), &none, &pair, &sigma, &u, &mut r).unwrap();
        assert_eq!(pair.matrix_a().mul_int_vec(&p.vector_e).unwrap(), u);
    }

    #[test]
    fn extended_trapdoor_matches_ext_basis() {
        let q = Modulus::from_u64(17).unwrap();
        let pair = trap_gen(2, 41, &q, &mut rng(14)).unwrap();
        let b = ZqMatrix::random(2, 5, &q, &mut rng(15));
        let ext = pair.extend(&b).unwrap();
        assert_eq!(ext.to_basis(), ext_basis(pair.basis_t(), pair.matrix_a(), &b).unwrap());
        assert_eq!(ext.matrix().unwrap(), concat_cols(pair.matrix_a(), &b).unwrap());
    }

    #[test]
    fn permutation_validation() {
        let t = IntMatrix::identity(3);
        assert!(t.permute_rows(&[0, 1]).is_err());
        assert!(t.permute_rows(&[0, 0, 1]).is_err());
        assert_eq!(
            t.permute_rows(&[2, 0, 1]).unwrap(),
            IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap()
        );
    }
}
