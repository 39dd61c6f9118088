//! Binary file format.
//!
//! Every artifact starts with the magic `LABE`, a little-endian `u16`
//! format version and a one-byte type tag. Counts are little-endian; the
//! entries of `Z_q` matrices are fixed-width big-endian.
//!
//! | item | layout |
//! |------|--------|
//! | modulus | `u32` byte length, big-endian magnitude |
//! | `ZqMatrix` | `u64` rows, `u64` cols, modulus, `rows·cols` entries of `ceil(bits(q)/8)` bytes, row-major |
//! | `ZqVector` | a `dim × 1` matrix |
//! | integer matrix | `u64` rows, `u64` cols, 8-byte big-endian two's-complement entries |
//! | string | `u32` byte length, UTF-8 |
//! | `f64` | IEEE bits as little-endian `u64` |

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;

use crate::abe::{Ciphertext, MasterSecretKey, Profile, PublicParams, SystemParams, UserSecretKey};
use crate::error::{Error, Result};
use crate::lsss::SharePolicy;
use crate::trapdoor::{IntMatrix, Preimage, TrapdoorPair};
use crate::zq::{Modulus, ZqMatrix, ZqVector};

pub const MAGIC: &[u8; 4] = b"LABE";
pub const FORMAT_VERSION: u16 = 1;

/// Type tags.
pub mod tag {
    pub const SYSTEM_PARAMS: u8 = 1;
    pub const PUBLIC_PARAMS: u8 = 2;
    pub const MASTER_SECRET_KEY: u8 = 3;
    pub const USER_SECRET_KEY: u8 = 4;
    pub const CIPHERTEXT: u8 = 5;
    pub const CIPHERTEXT_CONTAINER: u8 = 6;
}

/// A value with its own file type.
pub trait Artifact: Sized {
    const TAG: u8;
    fn write_body(&self, w: &mut Writer);
    fn read_body(r: &mut Reader<'_>) -> Result<Self>;
}

/// Serializes with header.
pub fn to_bytes<T: Artifact>(value: &T) -> Vec<u8> {
    let mut w = Writer::default();
    w.bytes(MAGIC);
    w.u16(FORMAT_VERSION);
    w.u8(T::TAG);
    value.write_body(&mut w);
    w.buf
}

/// Parses a complete artifact; trailing bytes are an error.
pub fn from_bytes<T: Artifact>(bytes: &[u8]) -> Result<T> {
    let mut r = Reader::new(bytes);
    if r.take(4)? != MAGIC {
        return Err(malformed("bad magic bytes"));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(malformed(&format!("unsupported format version {version}")));
    }
    let found = r.u8()?;
    if found != T::TAG {
        return Err(malformed(&format!("expected type tag {}, found {found}", T::TAG)));
    }
    let value = T::read_body(&mut r)?;
    if !r.is_empty() {
        return Err(malformed(&format!("{} trailing bytes", r.remaining())));
    }
    Ok(value)
}

fn malformed(msg: &str) -> Error {
    Error::Malformed(msg.to_string())
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn bytes(&mut self, b: &[u8]) {
        self.buf.extend_from_slice(b);
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u16(&mut self, v: u16) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn u32(&mut self, v: u32) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    pub fn count(&mut self, v: usize) {
        self.u64(v as u64);
    }

    pub fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }

    pub fn string(&mut self, s: &str) {
        self.u32(s.len() as u32);
        self.bytes(s.as_bytes());
    }

    pub fn modulus(&mut self, q: &Modulus) {
        let bytes = q.value().to_bytes_be();
        self.u32(bytes.len() as u32);
        self.bytes(&bytes);
    }

    fn entry(&mut self, v: &BigUint, width: usize) {
        let bytes = v.to_bytes_be();
        self.buf.resize(self.buf.len() + width - bytes.len(), 0);
        self.bytes(&bytes);
    }

    pub fn zq_matrix(&mut self, a: &ZqMatrix) {
        self.count(a.rows());
        self.count(a.cols());
        self.modulus(a.modulus());
        let width = a.modulus().byte_width();
        for v in a.entries() {
            self.entry(v, width);
        }
    }

    pub fn zq_vector(&mut self, v: &ZqVector) {
        self.count(v.dim());
        self.count(1);
        self.modulus(v.modulus());
        let width = v.modulus().byte_width();
        for e in v.entries() {
            self.entry(e, width);
        }
    }

    pub fn int_matrix(&mut self, t: &IntMatrix) {
        self.count(t.rows());
        self.count(t.cols());
        for v in t.data() {
            self.bytes(&v.to_be_bytes());
        }
    }

    pub fn int_vector(&mut self, v: &[i64]) {
        self.count(v.len());
        self.count(1);
        for x in v {
            self.bytes(&x.to_be_bytes());
        }
    }
}

pub struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
    modulus: Option<Modulus>,
}

impl<'a> Reader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0, modulus: None }
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(malformed("unexpected end of data"));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array()?))
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    /// A count that must fit in memory.
    pub fn count(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| malformed("count overflows"))
    }

    /// A count of items at least `item_size` bytes each, bounded by the
    /// remaining input so corrupt counts cannot trigger huge allocations.
    fn bounded_count(&mut self, item_size: usize) -> Result<usize> {
        let n = self.count()?;
        match n.checked_mul(item_size.max(1)) {
            Some(total) if total <= self.remaining() => Ok(n),
            _ => Err(malformed("count exceeds the remaining data")),
        }
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    pub fn string(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| malformed("string is not UTF-8"))
    }

    pub fn modulus(&mut self) -> Result<Modulus> {
        let len = self.u32()? as usize;
        let bytes = self.take(len)?;
        let value = BigUint::from_bytes_be(bytes);
        if let Some(q) = &self.modulus {
            if q.value() == &value {
                return Ok(q.clone());
            }
        }
        let q = Modulus::new(value).map_err(|e| malformed(&e.to_string()))?;
        self.modulus = Some(q.clone());
        Ok(q)
    }

    fn dims(&mut self) -> Result<(usize, usize)> {
        let rows = self.count()?;
        let cols = self.count()?;
        Ok((rows, cols))
    }

    fn entries(&mut self, count: usize, q: &Modulus) -> Result<Vec<BigUint>> {
        let width = q.byte_width();
        let total = count.checked_mul(width).ok_or_else(|| malformed("matrix size overflows"))?;
        let bytes = self.take(total)?;
        bytes
            .chunks(width)
            .map(|c| {
                let v = BigUint::from_bytes_be(c);
                if &v < q.value() {
                    Ok(v)
                } else {
                    Err(malformed("entry is not reduced mod q"))
                }
            })
            .collect()
    }

    pub fn zq_matrix(&mut self) -> Result<ZqMatrix> {
        let (rows, cols) = self.dims()?;
        let q = self.modulus()?;
        let count = rows.checked_mul(cols).ok_or_else(|| malformed("matrix size overflows"))?;
        let entries = self.entries(count, &q)?;
        ZqMatrix::from_entries(rows, cols, entries, &q).map_err(|e| malformed(&e.to_string()))
    }

    pub fn zq_vector(&mut self) -> Result<ZqVector> {
        let (rows, cols) = self.dims()?;
        if cols != 1 {
            return Err(malformed("vector must have one column"));
        }
        let q = self.modulus()?;
        let entries = self.entries(rows, &q)?;
        Ok(ZqVector::new(entries, &q))
    }

    fn ints(&mut self, count: usize) -> Result<Vec<i64>> {
        let total = count.checked_mul(8).ok_or_else(|| malformed("matrix size overflows"))?;
        let bytes = self.take(total)?;
        Ok(bytes.chunks(8).map(|c| i64::from_be_bytes(c.try_into().expect("chunk of 8"))).collect())
    }

    pub fn int_matrix(&mut self) -> Result<IntMatrix> {
        let (rows, cols) = self.dims()?;
        let count = rows.checked_mul(cols).ok_or_else(|| malformed("matrix size overflows"))?;
        IntMatrix::new(rows, cols, self.ints(count)?).map_err(|e| malformed(&e.to_string()))
    }

    pub fn int_vector(&mut self) -> Result<Vec<i64>> {
        let (rows, cols) = self.dims()?;
        if cols != 1 {
            return Err(malformed("vector must have one column"));
        }
        self.ints(rows)
    }
}

fn write_params(w: &mut Writer, p: &SystemParams) {
    w.u32(p.lambda());
    w.u8(match p.profile() {
        Profile::Toy => 0,
        Profile::Paper => 1,
    });
    w.count(p.n());
    w.count(p.m());
    w.modulus(p.q());
    w.f64(p.sigma().sigma());
    w.f64(p.alpha().alpha());
    w.count(p.cap_l());
    w.f64(p.c_omega());
}

fn read_params(r: &mut Reader<'_>) -> Result<SystemParams> {
    let lambda = r.u32()?;
    let profile = match r.u8()? {
        0 => Profile::Toy,
        1 => Profile::Paper,
        other => return Err(malformed(&format!("unknown profile code {other}"))),
    };
    let n = r.count()?;
    let m = r.count()?;
    let q = r.modulus()?;
    let sigma = r.f64()?;
    let alpha = r.f64()?;
    let cap_l = r.count()?;
    let c_omega = r.f64()?;
    SystemParams::from_parts(lambda, profile, n, m, q, sigma, alpha, cap_l, c_omega)
        .map_err(|e| malformed(&e.to_string()))
}

impl Artifact for SystemParams {
    const TAG: u8 = tag::SYSTEM_PARAMS;

    fn write_body(&self, w: &mut Writer) {
        write_params(w, self);
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        read_params(r)
    }
}

impl Artifact for PublicParams {
    const TAG: u8 = tag::PUBLIC_PARAMS;

    fn write_body(&self, w: &mut Writer) {
        write_params(w, &self.params);
        w.zq_matrix(&self.a0);
        w.zq_matrix(&self.b);
        w.zq_vector(&self.s);
        w.bytes(&self.attr_seed);
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let params = read_params(r)?;
        let a0 = r.zq_matrix()?;
        let b = r.zq_matrix()?;
        let s = r.zq_vector()?;
        let attr_seed = r.array()?;
        let pp = PublicParams { params, a0, b, s, attr_seed };
        pp.validate()?;
        Ok(pp)
    }
}

impl Artifact for MasterSecretKey {
    const TAG: u8 = tag::MASTER_SECRET_KEY;

    fn write_body(&self, w: &mut Writer) {
        w.zq_matrix(self.t_a0.matrix_a());
        w.int_matrix(self.t_a0.basis_t());
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let a = r.zq_matrix()?;
        let t = r.int_matrix()?;
        let t_a0 = TrapdoorPair::new(a, t).map_err(|e| malformed(&e.to_string()))?;
        Ok(MasterSecretKey { t_a0 })
    }
}

pub fn write_policy(w: &mut Writer, p: &SharePolicy) {
    w.zq_matrix(p.matrix());
    for label in p.rho() {
        w.string(label);
    }
}

pub fn read_policy(r: &mut Reader<'_>) -> Result<SharePolicy> {
    let matrix = r.zq_matrix()?;
    let rho = (0..matrix.rows()).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
    SharePolicy::new(matrix, rho).map_err(|e| malformed(&e.to_string()))
}

impl Artifact for UserSecretKey {
    const TAG: u8 = tag::USER_SECRET_KEY;

    fn write_body(&self, w: &mut Writer) {
        write_policy(w, &self.policy);
        w.count(self.grid.len());
        w.count(self.grid.first().map_or(0, Vec::len));
        for cell in self.grid.iter().flatten() {
            w.zq_vector(&cell.target_u);
            w.int_vector(&cell.vector_e);
            w.f64(cell.norm_bound);
        }
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let policy = read_policy(r)?;
        let rows = r.count()?;
        let cols = r.bounded_count(rows.max(1))?;
        if rows != policy.l() || rows.checked_mul(cols).is_none() {
            return Err(malformed("key grid does not match the policy"));
        }
        let mut grid = Vec::with_capacity(rows);
        for _ in 0..rows {
            let row = (0..cols)
                .map(|_| {
                    let target_u = r.zq_vector()?;
                    let vector_e = r.int_vector()?;
                    let norm_bound = r.f64()?;
                    Ok(Preimage { vector_e, target_u, norm_bound })
                })
                .collect::<Result<Vec<_>>>()?;
            grid.push(row);
        }
        Ok(UserSecretKey { policy, grid })
    }
}

fn write_ciphertext(w: &mut Writer, ct: &Ciphertext) {
    w.count(ct.attrs.len());
    for a in &ct.attrs {
        w.string(a);
    }
    w.zq_vector(&ZqVector::new(vec![ct.c0.clone()], ct.c_prime.modulus()));
    w.zq_vector(&ct.c_prime);
    for a in &ct.attrs {
        w.zq_vector(&ct.c_attrs[a]);
    }
}

fn read_ciphertext(r: &mut Reader<'_>) -> Result<Ciphertext> {
    let count = r.bounded_count(4)?;
    let mut order = Vec::with_capacity(count);
    for _ in 0..count {
        order.push(r.string()?);
    }
    let attrs: BTreeSet<String> = order.iter().cloned().collect();
    if attrs.len() != order.len() || !order.windows(2).all(|w| w[0] < w[1]) {
        return Err(malformed("ciphertext attributes are not sorted and distinct"));
    }
    let c0 = r.zq_vector()?;
    if c0.dim() != 1 {
        return Err(malformed("c0 must be a single element"));
    }
    let c_prime = r.zq_vector()?;
    if c0.modulus() != c_prime.modulus() {
        return Err(malformed("ciphertext parts use different moduli"));
    }
    let mut c_attrs = BTreeMap::new();
    for a in order {
        let c = r.zq_vector()?;
        if c.dim() != c_prime.dim() || c.modulus() != c_prime.modulus() {
            return Err(malformed("attribute component has the wrong shape"));
        }
        c_attrs.insert(a, c);
    }
    Ok(Ciphertext { attrs, c0: c0.get(0).clone(), c_prime, c_attrs })
}

impl Artifact for Ciphertext {
    const TAG: u8 = tag::CIPHERTEXT;

    fn write_body(&self, w: &mut Writer) {
        write_ciphertext(w, self);
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        read_ciphertext(r)
    }
}

/// Ciphertexts of a byte payload, one per bit.
#[derive(Clone, Debug, PartialEq)]
pub struct CiphertextContainer(pub Vec<Ciphertext>);

impl Artifact for CiphertextContainer {
    const TAG: u8 = tag::CIPHERTEXT_CONTAINER;

    fn write_body(&self, w: &mut Writer) {
        w.count(self.0.len());
        for ct in &self.0 {
            write_ciphertext(w, ct);
        }
    }

    fn read_body(r: &mut Reader<'_>) -> Result<Self> {
        let count = r.bounded_count(8)?;
        let cts = (0..count).map(|_| read_ciphertext(r)).collect::<Result<Vec<_>>>()?;
        Ok(CiphertextContainer(cts))
    }
}
