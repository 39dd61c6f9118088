//! Exact linear algebra over the prime field `Z_q`.
//!
//! Entries are arbitrary-precision and always kept in `[0, q)`. Matrices are
//! dense and row-major. All values are immutable once built; every operation
//! returns a fresh value.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Miller-Rabin with the first twelve prime bases (deterministic below
/// 3.3·10²⁴) plus extra pseudo-random bases for larger inputs.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for p in SMALL_PRIMES {
        let p = BigUint::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;

    let witness = |a: &BigUint| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_one {
            return true;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_one {
                return true;
            }
            if x == one {
                return false;
            }
        }
        false
    };

    if !SMALL_PRIMES[..12].iter().all(|&a| witness(&BigUint::from(a))) {
        return false;
    }
    if n.bits() > 80 {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(n.bits());
        let upper = &n_minus_one - &one;
        for _ in 0..24 {
            let a = rng.gen_biguint_range(&BigUint::from(2u32), &upper);
            if !witness(&a) {
                return false;
            }
        }
    }
    true
}

/// Smallest probable prime `>= n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    let two = BigUint::from(2u32);
    if n <= &two {
        return two;
    }
    let mut candidate = n.clone();
    if candidate.is_even() {
        candidate += 1u32;
    }
    while !is_probable_prime(&candidate) {
        candidate += 2u32;
    }
    candidate
}

#[derive(Debug)]
struct ModulusInner {
    q: BigUint,
    q_signed: BigInt,
    half: BigUint,
    byte_width: usize,
}

/// A prime modulus `q`. Cheap to clone.
#[derive(Clone)]
pub struct Modulus(Arc<ModulusInner>);

impl Modulus {
    /// Builds a modulus, rejecting composites and values below 2.
    pub fn new(q: BigUint) -> Result<Self> {
        if q < BigUint::from(2u32) {
            return Err(Error::InvalidModulus(format!("{q} is below 2")));
        }
        if !is_probable_prime(&q) {
            return Err(Error::InvalidModulus(format!("{q} is not prime")));
        }
        let byte_width = q.bits().div_ceil(8) as usize;
        Ok(Self(Arc::new(ModulusInner {
            q_signed: BigInt::from(q.clone()),
            half: &q >> 1u32,
            q,
            byte_width,
        })))
    }

    pub fn from_u64(q: u64) -> Result<Self> {
        Self::new(BigUint::from(q))
    }

    pub fn value(&self) -> &BigUint {
        &self.0.q
    }

    pub fn bits(&self) -> u64 {
        self.0.q.bits()
    }

    /// `log2(q)` as a float.
    pub fn log2(&self) -> f64 {
        let bits = self.bits();
        if bits <= 1000 {
            self.to_f64().log2()
        } else {
            let shift = bits - 64;
            (&self.0.q >> shift).to_f64().unwrap_or(f64::MAX).log2() + shift as f64
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.q.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `⌊q/2⌋`.
    pub fn half(&self) -> &BigUint {
        &self.0.half
    }

    /// Width in bytes of one serialized entry, `ceil(bitlen(q)/8)`.
    pub fn byte_width(&self) -> usize {
        self.0.byte_width
    }

    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % &self.0.q
    }

    pub fn reduce_signed(&self, x: &BigInt) -> BigUint {
        let r = x.mod_floor(&self.0.q_signed);
        r.to_biguint().expect("mod_floor is non-negative")
    }

    pub fn reduce_i64(&self, x: i64) -> BigUint {
        self.reduce_signed(&BigInt::from(x))
    }

    pub fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.0.q {
            s - &self.0.q
        } else {
            s
        }
    }

    pub fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            &self.0.q - (b - a)
        }
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.0.q
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.0.q - a
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &BigUint) -> Option<BigUint> {
        if a.is_zero() {
            return None;
        }
        let ext = BigInt::from(a.clone()).extended_gcd(&self.0.q_signed);
        if !ext.gcd.is_one() {
            return None;
        }
        Some(self.reduce_signed(&ext.x))
    }

    pub fn random_element<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        let mut adapter = RngAdapter(rng);
        adapter.gen_biguint_below(&self.0.q)
    }
}

impl PartialEq for Modulus {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.q == other.0.q
    }
}

impl Eq for Modulus {}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Modulus({})", self.0.q)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.q)
    }
}

// `RandBigInt` is only implemented for sized rngs.
struct RngAdapter<'a, R: RngCore + ?Sized>(&'a mut R);

impl<R: RngCore + ?Sized> RngCore for RngAdapter<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest)
    }
    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.0.try_fill_bytes(dest)
    }
}

/// Centered representative of `x` in `(-q/2, q/2]`.
pub fn centered(x: &BigUint, q: &Modulus) -> BigInt {
    if (x << 1u32) > *q.value() {
        BigInt::from(x.clone()) - BigInt::from(q.value().clone())
    } else {
        BigInt::from(x.clone())
    }
}

fn check_modulus(a: &Modulus, b: &Modulus) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::ModulusMismatch)
    }
}

/// A vector over `Z_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct ZqVector {
    entries: Vec<BigUint>,
    modulus: Modulus,
}

impl ZqVector {
    /// Builds a vector, reducing every entry mod `q`.
    pub fn new(entries: Vec<BigUint>, modulus: &Modulus) -> Self {
        let entries = entries
            .into_iter()
            .map(|e| if &e < modulus.value() { e } else { modulus.reduce(&e) })
            .collect();
        Self { entries, modulus: modulus.clone() }
    }

    pub fn zeros(dim: usize, modulus: &Modulus) -> Self {
        Self { entries: vec![BigUint::zero(); dim], modulus: modulus.clone() }
    }

    pub fn from_i64s(values: &[i64], modulus: &Modulus) -> Self {
        Self {
            entries: values.iter().map(|&v| modulus.reduce_i64(v)).collect(),
            modulus: modulus.clone(),
        }
    }

    /// The vector with `value` in position `index` and zeros elsewhere.
    pub fn unit(dim: usize, index: usize, value: BigUint, modulus: &Modulus) -> Self {
        let mut v = Self::zeros(dim, modulus);
        v.entries[index] = modulus.reduce(&value);
        v
    }

    pub fn random<R: RngCore + ?Sized>(dim: usize, modulus: &Modulus, rng: &mut R) -> Self {
        Self {
            entries: (0..dim).map(|_| modulus.random_element(rng)).collect(),
            modulus: modulus.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &BigUint {
        &self.entries[i]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn dot(&self, other: &ZqVector) -> Result<BigUint> {
        check_modulus(&self.modulus, &other.modulus)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dot of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let sum: BigUint = self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).sum();
        Ok(self.modulus.reduce(&sum))
    }

    /// Inner product with a signed integer vector, reduced mod `q`.
    pub fn dot_int(&self, other: &[i64]) -> Result<BigUint> {
        if self.dim() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "dot of dims {} and {}",
                self.dim(),
                other.len()
            )));
        }
        if let Some(q) = self.modulus.value().to_u64().filter(|&q| q < 1 << 62) {
            let q = q as i128;
            let mut acc: i128 = 0;
            for (a, &e) in self.entries.iter().zip(other) {
                if e != 0 {
                    let a = a.to_u64().expect("entry below a 62-bit modulus") as i128;
                    acc += (a * e as i128) % q;
                }
            }
            return Ok(BigUint::from(acc.rem_euclid(q) as u64));
        }
        let sum: BigInt = self
            .entries
            .iter()
            .zip(other)
            .filter(|(_, &e)| e != 0)
            .map(|(a, &e)| BigInt::from_biguint(Sign::Plus, a.clone()) * e)
            .sum();
        Ok(self.modulus.reduce_signed(&sum))
    }

    pub fn add(&self, other: &ZqVector) -> Result<ZqVector> {
        self.zip_with(other, |q, a, b| q.add(a, b))
    }

    pub fn sub(&self, other: &ZqVector) -> Result<ZqVector> {
        self.zip_with(other, |q, a, b| q.sub(a, b))
    }

    pub fn scale(&self, k: &BigUint) -> ZqVector {
        Self {
            entries: self.entries.iter().map(|a| self.modulus.mul(a, k)).collect(),
            modulus: self.modulus.clone(),
        }
    }

    /// `(self ∥ other)`.
    pub fn concat(&self, other: &ZqVector) -> Result<ZqVector> {
        check_modulus(&self.modulus, &other.modulus)?;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        Ok(Self { entries, modulus: self.modulus.clone() })
    }

    /// Centered representatives of every entry.
    pub fn centered(&self) -> Vec<BigInt> {
        self.entries.iter().map(|e| centered(e, &self.modulus)).collect()
    }

    fn zip_with(
        &self,
        other: &ZqVector,
        f: impl Fn(&Modulus, &BigUint, &BigUint) -> BigUint,
    ) -> Result<ZqVector> {
        check_modulus(&self.modulus, &other.modulus)?;
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vectors of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(&self.modulus, a, b))
                .collect(),
            modulus: self.modulus.clone(),
        })
    }
}

impl fmt::Debug for ZqVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.iter().map(|e| e.to_string())).finish()?;
        write!(f, " mod {}", self.modulus)
    }
}

/// A dense row-major matrix over `Z_q`.
#[derive(Clone, PartialEq, Eq)]
pub struct ZqMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigUint>,
    modulus: Modulus,
}

impl ZqMatrix {
    /// Builds a matrix from row-major entries, reducing each mod `q`.
    pub fn from_entries(
        rows: usize,
        cols: usize,
        entries: Vec<BigUint>,
        modulus: &Modulus,
    ) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let entries = entries
            .into_iter()
            .map(|e| if &e < modulus.value() { e } else { modulus.reduce(&e) })
            .collect();
        Ok(Self { rows, cols, entries, modulus: modulus.clone() })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>], modulus: &Modulus) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let entries = rows.iter().flatten().map(|&v| modulus.reduce_i64(v)).collect();
        Ok(Self { rows: rows.len(), cols, entries, modulus: modulus.clone() })
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        modulus: &Modulus,
        mut f: impl FnMut(usize, usize) -> BigUint,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(modulus.reduce(&f(i, j)));
            }
        }
        Self { rows, cols, entries, modulus: modulus.clone() }
    }

    pub fn zeros(rows: usize, cols: usize, modulus: &Modulus) -> Self {
        Self { rows, cols, entries: vec![BigUint::zero(); rows * cols], modulus: modulus.clone() }
    }

    pub fn identity(dim: usize, modulus: &Modulus) -> Self {
        Self::from_fn(dim, dim, modulus, |i, j| if i == j { BigUint::one() } else { BigUint::zero() })
    }

    pub fn random<R: RngCore + ?Sized>(
        rows: usize,
        cols: usize,
        modulus: &Modulus,
        rng: &mut R,
    ) -> Self {
        Self {
            rows,
            cols,
            entries: (0..rows * cols).map(|_| modulus.random_element(rng)).collect(),
            modulus: modulus.clone(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> ZqVector {
        ZqVector {
            entries: self.entries[i * self.cols..(i + 1) * self.cols].to_vec(),
            modulus: self.modulus.clone(),
        }
    }

    pub fn column(&self, j: usize) -> ZqVector {
        ZqVector {
            entries: (0..self.rows).map(|i| self.get(i, j).clone()).collect(),
            modulus: self.modulus.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> ZqMatrix {
        ZqMatrix::from_fn(self.cols, self.rows, &self.modulus, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        check_modulus(&self.modulus, &other.modulus)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "adding {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| self.modulus.add(a, b))
                .collect(),
            modulus: self.modulus.clone(),
        })
    }

    pub fn mul(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        mat_mul(self, other)
    }

    /// `A · v`.
    pub fn mul_vec(&self, v: &ZqVector) -> Result<ZqVector> {
        check_modulus(&self.modulus, &v.modulus)?;
        if v.dim() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times vector of dim {}",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let entries = (0..self.rows)
            .map(|i| {
                let row = &self.entries[i * self.cols..(i + 1) * self.cols];
                let sum: BigUint = row.iter().zip(&v.entries).map(|(a, b)| a * b).sum();
                self.modulus.reduce(&sum)
            })
            .collect();
        Ok(ZqVector { entries, modulus: self.modulus.clone() })
    }

    /// `vᵀ · A` as a vector of dimension `cols`.
    pub fn left_mul_vec(&self, v: &ZqVector) -> Result<ZqVector> {
        check_modulus(&self.modulus, &v.modulus)?;
        if v.dim() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of dim {} times {}x{} matrix",
                v.dim(),
                self.rows,
                self.cols
            )));
        }
        let mut acc = vec![BigUint::zero(); self.cols];
        for (i, vi) in v.entries.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (slot, a) in acc.iter_mut().zip(row) {
                *slot += a * vi;
            }
        }
        let entries = acc.iter().map(|s| self.modulus.reduce(s)).collect();
        Ok(ZqVector { entries, modulus: self.modulus.clone() })
    }

    /// `A · e mod q` for a signed integer vector `e`.
    pub fn mul_int_vec(&self, e: &[i64]) -> Result<ZqVector> {
        if e.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix times integer vector of dim {}",
                self.rows,
                self.cols,
                e.len()
            )));
        }
        let entries = (0..self.rows)
            .map(|i| self.row(i).dot_int(e))
            .collect::<Result<Vec<_>>>()?;
        Ok(ZqVector { entries, modulus: self.modulus.clone() })
    }

    /// Columns `[start, end)` as a new matrix.
    pub fn column_range(&self, start: usize, end: usize) -> ZqMatrix {
        ZqMatrix::from_fn(self.rows, end - start, &self.modulus, |i, j| {
            self.get(i, start + j).clone()
        })
    }

    /// Rows `[start, end)` as a new matrix.
    pub fn row_range(&self, start: usize, end: usize) -> ZqMatrix {
        Self {
            rows: end - start,
            cols: self.cols,
            entries: self.entries[start * self.cols..end * self.cols].to_vec(),
            modulus: self.modulus.clone(),
        }
    }

    /// The rows listed in `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> ZqMatrix {
        let mut entries = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            entries.extend_from_slice(&self.entries[i * self.cols..(i + 1) * self.cols]);
        }
        Self { rows: indices.len(), cols: self.cols, entries, modulus: self.modulus.clone() }
    }

    /// The columns listed in `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> ZqMatrix {
        ZqMatrix::from_fn(self.rows, indices.len(), &self.modulus, |i, j| {
            self.get(i, indices[j]).clone()
        })
    }

    /// Column indices of a maximal independent column set, found by
    /// row-reducing a copy; `len()` is the rank.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let reduced = row_reduce(self.rows, self.cols, self.entries.clone(), &self.modulus);
        reduced.pivots
    }

    /// Inverse of a square matrix, or [`Error::RankDeficient`].
    pub fn inverse(&self) -> Result<ZqMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let width = 2 * n;
        let mut aug = Vec::with_capacity(n * width);
        for i in 0..n {
            aug.extend_from_slice(&self.entries[i * n..(i + 1) * n]);
            for j in 0..n {
                aug.push(if i == j { BigUint::one() } else { BigUint::zero() });
            }
        }
        let reduced = row_reduce_limited(n, width, aug, &self.modulus, n);
        if reduced.pivots.len() < n || reduced.pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(Error::RankDeficient);
        }
        Ok(ZqMatrix::from_fn(n, n, &self.modulus, |i, j| reduced.entries[i * width + n + j].clone()))
    }
}

impl fmt::Debug for ZqMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZqMatrix {}x{} mod {} [", self.rows, self.cols, self.modulus)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

struct Reduced {
    entries: Vec<BigUint>,
    pivots: Vec<usize>,
}

fn row_reduce(rows: usize, cols: usize, entries: Vec<BigUint>, q: &Modulus) -> Reduced {
    row_reduce_limited(rows, cols, entries, q, cols)
}

/// Reduced row echelon form, pivoting on the first nonzero entry of each
/// column; only the first `pivot_cols` columns are eligible as pivots.
fn row_reduce_limited(
    rows: usize,
    cols: usize,
    mut m: Vec<BigUint>,
    q: &Modulus,
    pivot_cols: usize,
) -> Reduced {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = q.inv(&m[r * cols + c]).expect("nonzero pivot in a prime field");
        for j in c..cols {
            m[r * cols + j] = q.mul(&m[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r || m[i * cols + c].is_zero() {
                continue;
            }
            let factor = m[i * cols + c].clone();
            for j in c..cols {
                let t = q.mul(&factor, &m[r * cols + j]);
                m[i * cols + j] = q.sub(&m[i * cols + j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Reduced { entries: m, pivots }
}

/// Exact product `A · B mod q`.
pub fn mat_mul(a: &ZqMatrix, b: &ZqMatrix) -> Result<ZqMatrix> {
    check_modulus(&a.modulus, &b.modulus)?;
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "multiplying {}x{} by {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut entries = Vec::with_capacity(a.rows * b.cols);
    for i in 0..a.rows {
        let mut acc = vec![BigUint::zero(); b.cols];
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if aik.is_zero() {
                continue;
            }
            let brow = &b.entries[k * b.cols..(k + 1) * b.cols];
            for (slot, bkj) in acc.iter_mut().zip(brow) {
                *slot += aik * bkj;
            }
        }
        entries.extend(acc.iter().map(|s| a.modulus.reduce(s)));
    }
    Ok(ZqMatrix { rows: a.rows, cols: b.cols, entries, modulus: a.modulus.clone() })
}

/// `(X ∥ Y)`: the columns of `x` followed by the columns of `y`.
pub fn concat_cols(x: &ZqMatrix, y: &ZqMatrix) -> Result<ZqMatrix> {
    check_modulus(&x.modulus, &y.modulus)?;
    if x.rows != y.rows {
        return Err(Error::DimensionMismatch(format!(
            "column concatenation of {} and {} rows",
            x.rows, y.rows
        )));
    }
    let cols = x.cols + y.cols;
    let mut entries = Vec::with_capacity(x.rows * cols);
    for i in 0..x.rows {
        entries.extend_from_slice(&x.entries[i * x.cols..(i + 1) * x.cols]);
        entries.extend_from_slice(&y.entries[i * y.cols..(i + 1) * y.cols]);
    }
    Ok(ZqMatrix { rows: x.rows, cols, entries, modulus: x.modulus.clone() })
}

/// `(X ; Y)`: the rows of `x` followed by the rows of `y`.
pub fn concat_rows(x: &ZqMatrix, y: &ZqMatrix) -> Result<ZqMatrix> {
    check_modulus(&x.modulus, &y.modulus)?;
    if x.cols != y.cols {
        return Err(Error::DimensionMismatch(format!(
            "row concatenation of {} and {} columns",
            x.cols, y.cols
        )));
    }
    let mut entries = x.entries.clone();
    entries.extend(y.entries.iter().cloned());
    Ok(ZqMatrix { rows: x.rows + y.rows, cols: x.cols, entries, modulus: x.modulus.clone() })
}

/// Finds `w` with `wᵀ · M = targetᵀ (mod q)`.
///
/// Gaussian elimination on `[Mᵀ | target]`; free variables are set to zero.
/// Returns [`Error::NoSolution`] when `target` is outside the row span of `m`.
pub fn solve_row_combination(m: &ZqMatrix, target: &ZqVector) -> Result<ZqVector> {
    check_modulus(&m.modulus, &target.modulus)?;
    if target.dim() != m.cols {
        return Err(Error::DimensionMismatch(format!(
            "target of dim {} for a matrix with {} columns",
            target.dim(),
            m.cols
        )));
    }
    let unknowns = m.rows;
    let width = unknowns + 1;
    let mut aug = Vec::with_capacity(m.cols * width);
    for c in 0..m.cols {
        for r in 0..unknowns {
            aug.push(m.get(r, c).clone());
        }
        aug.push(target.entries[c].clone());
    }
    let reduced = row_reduce_limited(m.cols, width, aug, &m.modulus, unknowns);
    let rank = reduced.pivots.len();
    // a nonzero right-hand side below the pivot rows means inconsistency
    if (rank..m.cols).any(|i| !reduced.entries[i * width + unknowns].is_zero()) {
        return Err(Error::NoSolution);
    }
    let mut w = vec![BigUint::zero(); unknowns];
    for (i, &p) in reduced.pivots.iter().enumerate() {
        w[p] = reduced.entries[i * width + unknowns].clone();
    }
    Ok(ZqVector { entries: w, modulus: m.modulus.clone() })
}

/// Convenience for tests and callers holding small signed values.
pub fn to_bigint(x: &BigUint) -> BigInt {
    BigInt::from(x.clone())
}

/// Magnitude of a signed big integer as `f64` (saturating).
pub fn abs_f64(x: &BigInt) -> f64 {
    x.abs().to_f64().unwrap_or(f64::INFINITY)
}
