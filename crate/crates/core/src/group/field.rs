//! Arithmetic in the prime field F_p and dense linear algebra over it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate. Entries are persisted as 16-bit words.
pub const MAX_PRIME: u32 = u16::MAX as u32;

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u32;
    while (k as u64) * (k as u64) <= n as u64 {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Checks that `p` is a prime we can work with.
pub fn check_prime(p: u32) -> Result<u32> {
    if is_prime(p) && p <= MAX_PRIME {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Multiplicative inverse of `a` modulo `p` by the extended Euclidean algorithm.
pub fn inv_mod(a: u32, p: u32) -> Option<u32> {
    let (mut old_r, mut r) = (a as i64 % p as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(p as i64) as u32)
}

#[inline]
pub(crate) fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
pub(crate) fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub(crate) fn neg_mod(a: u32, p: u32) -> u32 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

/// An element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpScalar {
    value: u32,
    p: u32,
}

impl FpScalar {
    pub fn new(value: i64, p: u32) -> Self {
        FpScalar { value: value.rem_euclid(p as i64) as u32, p }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn inverse(self) -> Option<Self> {
        inv_mod(self.value, self.p).map(|value| FpScalar { value, p: self.p })
    }

    fn same_field(self, other: Self) {
        assert_eq!(self.p, other.p, "scalars from different fields");
    }
}

impl Add for FpScalar {
    type Output = FpScalar;
    fn add(self, rhs: Self) -> Self {
        self.same_field(rhs);
        FpScalar { value: add_mod(self.value, rhs.value, self.p), p: self.p }
    }
}

impl Sub for FpScalar {
    type Output = FpScalar;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FpScalar {
    type Output = FpScalar;
    fn neg(self) -> Self {
        FpScalar { value: neg_mod(self.value, self.p), p: self.p }
    }
}

impl Mul for FpScalar {
    type Output = FpScalar;
    fn mul(self, rhs: Self) -> Self {
        self.same_field(rhs);
        FpScalar { value: mul_mod(self.value, rhs.value, self.p), p: self.p }
    }
}

impl fmt::Display for FpScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Determinant of a row-major `d x d` matrix over F_p.
pub fn det_mod(entries: &[u32], d: usize, p: u32) -> u32 {
    match d {
        1 => entries[0] % p,
        2 => {
            let ad = mul_mod(entries[0], entries[3], p);
            let bc = mul_mod(entries[1], entries[2], p);
            add_mod(ad, neg_mod(bc, p), p)
        }
        _ => det_gauss(entries, d, p),
    }
}

fn det_gauss(entries: &[u32], d: usize, p: u32) -> u32 {
    let mut a = entries.to_vec();
    let mut det = 1u32;
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| a[r * d + col] != 0) else {
            return 0;
        };
        if pivot != col {
            for k in 0..d {
                a.swap(col * d + k, pivot * d + k);
            }
            det = neg_mod(det, p);
        }
        let pv = a[col * d + col];
        det = mul_mod(det, pv, p);
        let inv = inv_mod(pv, p).expect("nonzero pivot is invertible");
        for r in col + 1..d {
            let factor = mul_mod(a[r * d + col], inv, p);
            if factor == 0 {
                continue;
            }
            for k in col..d {
                let sub = mul_mod(factor, a[col * d + k], p);
                a[r * d + k] = add_mod(a[r * d + k], neg_mod(sub, p), p);
            }
        }
    }
    det
}

/// Inverse of a row-major `d x d` matrix over F_p by Gauss-Jordan elimination.
/// Returns `None` for singular input.
pub fn inverse_mod(entries: &[u32], d: usize, p: u32) -> Option<Vec<u32>> {
    let w = 2 * d;
    let mut aug = vec![0u32; d * w];
    for r in 0..d {
        for c in 0..d {
            aug[r * w + c] = entries[r * d + c] % p;
        }
        aug[r * w + d + r] = 1 % p;
    }
    for col in 0..d {
        let pivot = (col..d).find(|&r| aug[r * w + col] != 0)?;
        if pivot != col {
            for k in 0..w {
                aug.swap(col * w + k, pivot * w + k);
            }
        }
        let inv = inv_mod(aug[col * w + col], p)?;
        for k in 0..w {
            aug[col * w + k] = mul_mod(aug[col * w + k], inv, p);
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let factor = aug[r * w + col];
            if factor == 0 {
                continue;
            }
            for k in 0..w {
                let sub = mul_mod(factor, aug[col * w + k], p);
                aug[r * w + k] = add_mod(aug[r * w + k], neg_mod(sub, p), p);
            }
        }
    }
    let mut out = Vec::with_capacity(d * d);
    for r in 0..d {
        out.extend_from_slice(&aug[r * w + d..r * w + w]);
    }
    Some(out)
}

/// Row-major product of two `d x d` matrices over F_p.
pub(crate) fn mat_mul_mod(a: &[u32], b: &[u32], d: usize, p: u32) -> Vec<u32> {
    let mut out = vec![0u32; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = 0u64;
            for k in 0..d {
                acc += a[i * d + k] as u64 * b[k * d + j] as u64;
            }
            out[i * d + j] = (acc % p as u64) as u32;
        }
    }
    out
}

pub(crate) fn mat_vec_mod(a: &[u32], x: &[u32], d: usize, p: u32) -> Vec<u32> {
    (0..d)
        .map(|i| {
            let acc: u64 = (0..d).map(|k| a[i * d + k] as u64 * x[k] as u64).sum();
            (acc % p as u64) as u32
        })
        .collect()
}
