//! Independent reference arithmetic for the acceptance checks: plain
//! modular products, rank mod a large prime, rational Gram-Schmidt, and
//! rational upper bounds for `ln` and `sqrt`.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, Zero};

pub fn rat(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

pub fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `Σ_k a[k]·e[k] mod q` over the integers.
pub fn dot_mod(a: &[BigUint], e: &[i64], q: &BigUint) -> BigUint {
    let mut acc = BigInt::zero();
    for (x, &y) in a.iter().zip(e) {
        acc += BigInt::from(x.clone()) * y;
    }
    let q = BigInt::from(q.clone());
    let r = ((acc % &q) + &q) % &q;
    r.to_biguint().unwrap()
}

/// Whether the square integer matrix (row-major) has nonzero determinant
/// modulo `2^32 − 5`. `true` proves full rank over the rationals.
pub fn nonsingular_mod_prime(dim: usize, data: &[i64]) -> bool {
    const P: u64 = (1 << 32) - 5;
    let red = |v: i64| -> u64 { v.rem_euclid(P as i64) as u64 };
    let mut a: Vec<Vec<u64>> = (0..dim).map(|i| (0..dim).map(|j| red(data[i * dim + j])).collect()).collect();
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        r
    };
    for col in 0..dim {
        let Some(piv) = (col..dim).find(|&r| a[r][col] != 0) else {
            return false;
        };
        a.swap(col, piv);
        let inv = pow(a[col][col], P - 2);
        for r in col + 1..dim {
            if a[r][col] == 0 {
                continue;
            }
            let f = a[r][col] * inv % P;
            for c in col..dim {
                let sub = f * a[col][c] % P;
                a[r][c] = (a[r][c] + P - sub) % P;
            }
        }
    }
    true
}

/// Squared Gram-Schmidt lengths of the columns, by the textbook recurrence
/// over rationals.
pub fn gs_sq_norms(rows: usize, cols: usize, data: &[i64]) -> Vec<BigRational> {
    let column = |j: usize| -> Vec<BigRational> {
        (0..rows).map(|i| BigRational::from_integer(BigInt::from(data[i * cols + j]))).collect()
    };
    let dot = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter().zip(y).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
    };
    let mut basis: Vec<(Vec<BigRational>, BigRational)> = Vec::with_capacity(cols);
    for j in 0..cols {
        let b = column(j);
        let mut v = b.clone();
        for (u, uu) in &basis {
            if uu.is_zero() {
                continue;
            }
            let mu = dot(&b, u) / uu;
            if mu.is_zero() {
                continue;
            }
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= &mu * ui;
            }
        }
        let vv = dot(&v, &v);
        basis.push((v, vv));
    }
    basis.into_iter().map(|(_, n)| n).collect()
}

/// `2·Σ_{i<terms} t^{2i+1}/(2i+1)` plus a bound on the tail: an upper
/// bound on `ln((1+t)/(1−t))` for `0 ≤ t < 1`.
fn atanh2_upper(t: &BigRational, terms: u32) -> BigRational {
    let two = int(2);
    let t2 = t * t;
    let mut pow = t.clone();
    let mut sum = BigRational::zero();
    for i in 0..terms {
        sum += &pow / int(2 * i as u64 + 1);
        pow = &pow * &t2;
    }
    let tail = &pow / (int(2 * terms as u64 + 1) * (BigRational::one() - &t2));
    two * (sum + tail)
}

/// Upper bound on `ln x` for rational `x ≥ 1`.
pub fn ln_upper(x: &BigRational) -> BigRational {
    assert!(*x >= BigRational::one());
    let mut y = x.clone();
    let mut k = 0u64;
    let two = int(2);
    while y >= two {
        y /= &two;
        k += 1;
    }
    let ln2 = atanh2_upper(&BigRational::new(1.into(), 3.into()), 40);
    let t = (&y - BigRational::one()) / (&y + BigRational::one());
    int(k) * ln2 + atanh2_upper(&t, 40)
}

/// A rational `r ≥ √x`, within a relative `1e-9` or so.
pub fn sqrt_upper(x: &BigRational) -> BigRational {
    assert!(!x.is_negative());
    let approx: f64 = num_traits::ToPrimitive::to_f64(x).unwrap().sqrt();
    let mut r = rat(approx * (1.0 + 1e-12));
    let step = rat(1.0 + 1e-10);
    while &(&r * &r) < x {
        r *= &step;
    }
    r
}
