//! Vectors, unimodular matrices and affine group elements with explicit entries.
//!
//! These are the reference implementations of the group law. The indexed tables in
//! [`AffineGroup`](super::AffineGroup) are derived from them.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::{self, FpScalar};
use crate::error::{Error, Result};

fn check_same(p1: u32, d1: usize, p2: u32, d2: usize) -> Result<()> {
    if p1 == p2 && d1 == d2 {
        Ok(())
    } else {
        Err(Error::ModulusMismatch { p1, d1, p2, d2 })
    }
}

/// A vector in F_p^d.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    p: u32,
    coords: Vec<u32>,
}

impl FpVector {
    /// Builds a vector, reducing each coordinate mod `p`.
    pub fn new(p: u32, coords: &[i64]) -> Self {
        FpVector { p, coords: coords.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect() }
    }

    pub(crate) fn from_reduced(p: u32, coords: Vec<u32>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < p));
        FpVector { p, coords }
    }

    pub fn zero(p: u32, d: usize) -> Self {
        FpVector { p, coords: vec![0; d] }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> FpScalar {
        FpScalar::new(self.coords[i] as i64, self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &FpVector) -> Result<FpVector> {
        check_same(self.p, self.dim(), other.p, other.dim())?;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| field::add_mod(a, b, self.p)).collect();
        Ok(FpVector { p: self.p, coords })
    }

    pub fn neg(&self) -> FpVector {
        FpVector { p: self.p, coords: self.coords.iter().map(|&a| field::neg_mod(a, self.p)).collect() }
    }

    /// Row-major radix-p encoding, first coordinate most significant.
    pub fn index(&self) -> usize {
        self.coords.iter().fold(0usize, |acc, &c| acc * self.p as usize + c as usize)
    }

    pub fn from_index(p: u32, d: usize, mut idx: usize) -> Self {
        let mut coords = vec![0u32; d];
        for slot in coords.iter_mut().rev() {
            *slot = (idx % p as usize) as u32;
            idx /= p as usize;
        }
        FpVector { p, coords }
    }
}

impl fmt::Display for FpVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A `d x d` matrix over F_p with determinant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlMatrix {
    p: u32,
    d: usize,
    entries: Vec<u32>,
}

impl SlMatrix {
    /// Builds a matrix from row-major entries, reducing mod `p` and checking `det = 1`.
    pub fn new(p: u32, d: usize, entries: &[i64]) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::Shape { expected: d * d, found: entries.len() });
        }
        let entries: Vec<u32> = entries.iter().map(|&c| c.rem_euclid(p as i64) as u32).collect();
        Self::from_reduced(p, d, entries)
    }

    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Shape { expected: d, found: rows.iter().map(Vec::len).max().unwrap_or(0) });
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(p, d, &flat)
    }

    pub(crate) fn from_reduced(p: u32, d: usize, entries: Vec<u32>) -> Result<Self> {
        let det = field::det_mod(&entries, d, p);
        if det != 1 % p {
            return Err(Error::NotUnimodular { det, p });
        }
        Ok(SlMatrix { p, d, entries })
    }

    pub(crate) fn from_trusted(p: u32, d: usize, entries: Vec<u32>) -> Self {
        debug_assert_eq!(field::det_mod(&entries, d, p), 1 % p);
        SlMatrix { p, d, entries }
    }

    pub fn identity(p: u32, d: usize) -> Self {
        let mut entries = vec![0u32; d * d];
        for i in 0..d {
            entries[i * d + i] = 1 % p;
        }
        SlMatrix { p, d, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.d + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.d).map(<[u32]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        (0..self.d).all(|i| (0..self.d).all(|j| self.entry(i, j) == u32::from(i == j)))
    }

    pub fn mul(&self, other: &SlMatrix) -> Result<SlMatrix> {
        check_same(self.p, self.d, other.p, other.d)?;
        Ok(SlMatrix {
            p: self.p,
            d: self.d,
            entries: field::mat_mul_mod(&self.entries, &other.entries, self.d, self.p),
        })
    }

    pub fn apply(&self, x: &FpVector) -> Result<FpVector> {
        check_same(self.p, self.d, x.modulus(), x.dim())?;
        Ok(FpVector::from_reduced(self.p, field::mat_vec_mod(&self.entries, x.coords(), self.d, self.p)))
    }

    /// Inverse by modular Gaussian elimination.
    pub fn inverse(&self) -> SlMatrix {
        let entries = field::inverse_mod(&self.entries, self.d, self.p).expect("unimodular matrices are invertible");
        SlMatrix { p: self.p, d: self.d, entries }
    }

    pub fn transpose(&self) -> SlMatrix {
        let d = self.d;
        let mut entries = vec![0u32; d * d];
        for i in 0..d {
            for j in 0..d {
                entries[j * d + i] = self.entries[i * d + j];
            }
        }
        SlMatrix { p: self.p, d, entries }
    }

    /// Radix-p key of the row-major entries, used for lookups.
    pub(crate) fn key(&self) -> u64 {
        self.entries.iter().fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }
}

impl fmt::Display for SlMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.d).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// An element `(v, m)` of F_p^d ⋊ SL_d(F_p), acting on F_p^d by `x ↦ v + m·x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    v: FpVector,
    m: SlMatrix,
}

impl AffineElement {
    pub fn new(v: FpVector, m: SlMatrix) -> Result<Self> {
        check_same(v.modulus(), v.dim(), m.modulus(), m.dim())?;
        Ok(AffineElement { v, m })
    }

    pub fn identity(p: u32, d: usize) -> Self {
        AffineElement { v: FpVector::zero(p, d), m: SlMatrix::identity(p, d) }
    }

    pub fn translation(v: FpVector) -> Self {
        let m = SlMatrix::identity(v.modulus(), v.dim());
        AffineElement { v, m }
    }

    pub fn linear(m: SlMatrix) -> Self {
        let v = FpVector::zero(m.modulus(), m.dim());
        AffineElement { v, m }
    }

    pub fn modulus(&self) -> u32 {
        self.v.modulus()
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// The translation part `v(g)`.
    pub fn translation_part(&self) -> &FpVector {
        &self.v
    }

    /// The linear part `θ(g)`.
    pub fn linear_part(&self) -> &SlMatrix {
        &self.m
    }

    pub fn is_identity(&self) -> bool {
        self.v.is_zero() && self.m.is_identity()
    }

    /// Identity linear part and nonzero translation.
    pub fn is_pure_translation(&self) -> bool {
        self.m.is_identity() && !self.v.is_zero()
    }

    /// `(v1 + θ1·v2, θ1·θ2)`.
    pub fn compose(&self, other: &AffineElement) -> Result<AffineElement> {
        check_same(self.modulus(), self.dim(), other.modulus(), other.dim())?;
        let v = self.v.add(&self.m.apply(&other.v)?)?;
        let m = self.m.mul(&other.m)?;
        Ok(AffineElement { v, m })
    }

    /// `(−θ⁻¹·v, θ⁻¹)`.
    pub fn inverse(&self) -> AffineElement {
        let m = self.m.inverse();
        let v = m.apply(&self.v).expect("same shape").neg();
        AffineElement { v, m }
    }

    /// `g.x = v + θ·x`.
    pub fn act(&self, x: &FpVector) -> Result<FpVector> {
        self.v.add(&self.m.apply(x)?)
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.v, self.m)
    }
}

/// JSON shape of an element: `{"v": [...], "m": [[...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementDoc {
    pub v: Vec<i64>,
    pub m: Vec<Vec<i64>>,
}

impl ElementDoc {
    pub fn from_element(g: &AffineElement) -> Self {
        ElementDoc {
            v: g.v.coords().iter().map(|&c| c as i64).collect(),
            m: g.m.rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect(),
        }
    }

    /// Reduces all entries mod `p`; fails if `m` is not in SL_d.
    pub fn to_element(&self, p: u32, d: usize) -> Result<AffineElement> {
        if self.v.len() != d {
            return Err(Error::Shape { expected: d, found: self.v.len() });
        }
        if self.m.len() != d {
            return Err(Error::Shape { expected: d, found: self.m.len() });
        }
        let m = SlMatrix::from_rows(p, &self.m)?;
        AffineElement::new(FpVector::new(p, &self.v), m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(p: u32, v: &[i64], m: &[i64]) -> AffineElement {
        let d = v.len();
        AffineElement::new(FpVector::new(p, v), SlMatrix::new(p, d, m).unwrap()).unwrap()
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(SlMatrix::new(5, 2, &[2, 0, 0, 1]), Err(Error::NotUnimodular { det: 2, p: 5 })));
        assert!(matches!(SlMatrix::new(5, 2, &[1, 0, 0]), Err(Error::Shape { .. })));
    }

    #[test]
    fn identity_is_neutral() {
        let g = el(5, &[3, 4], &[2, 1, 1, 1]);
        let e = AffineElement::identity(5, 2);
        assert_eq!(e.compose(&g).unwrap(), g);
        assert_eq!(g.compose(&e).unwrap(), g);
    }

    #[test]
    fn compose_worked_example() {
        // ((1,0),[[1,1],[0,1]]) · ((0,1),[[1,0],[1,1]]): v = (1,0) + (0+1, 1) = (2,1);
        // m = [[1+1, 0+1],[0+1, 1]] = [[2,1],[1,1]].
        let g1 = el(5, &[1, 0], &[1, 1, 0, 1]);
        let g2 = el(5, &[0, 1], &[1, 0, 1, 1]);
        assert_eq!(g1.compose(&g2).unwrap(), el(5, &[2, 1], &[2, 1, 1, 1]));
    }

    #[test]
    fn inverse_worked_example() {
        // θ⁻¹ = [[1,-1],[0,1]] = [[1,4],[0,1]]; −θ⁻¹(1,2) = −(1−2, 2) = (1, 3) mod 5.
        let g = el(5, &[1, 2], &[1, 1, 0, 1]);
        let inv = g.inverse();
        assert_eq!(inv, el(5, &[1, 3], &[1, 4, 0, 1]));
        assert!(g.compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&g).unwrap().is_identity());
        assert!(AffineElement::identity(5, 2).inverse().is_identity());
    }

    #[test]
    fn act_worked_example() {
        // (1,0) + [[1,1],[0,1]]·(2,3) = (1+5, 3) = (1,3) mod 5.
        let g = el(5, &[1, 0], &[1, 1, 0, 1]);
        let x = FpVector::new(5, &[2, 3]);
        assert_eq!(g.act(&x).unwrap(), FpVector::new(5, &[1, 3]));
        assert_eq!(AffineElement::identity(5, 2).act(&x).unwrap(), x);
    }

    #[test]
    fn modulus_mismatch_is_reported() {
        let g = el(5, &[1, 0], &[1, 1, 0, 1]);
        let h = el(7, &[1, 0], &[1, 1, 0, 1]);
        assert!(matches!(g.compose(&h), Err(Error::ModulusMismatch { .. })));
        assert!(g.act(&FpVector::new(7, &[1, 1])).is_err());
        assert!(g.act(&FpVector::new(5, &[1, 1, 1])).is_err());
    }

    #[test]
    fn vector_index_roundtrip() {
        for idx in 0..125 {
            let v = FpVector::from_index(5, 3, idx);
            assert_eq!(v.index(), idx);
        }
        assert_eq!(FpVector::new(5, &[1, 2]).index(), 7);
    }

    #[test]
    fn element_doc_roundtrip() {
        let g = el(7, &[6, 1], &[2, 1, 1, 1]);
        let doc = ElementDoc::from_element(&g);
        assert_eq!(doc.to_element(7, 2).unwrap(), g);
        let bad = ElementDoc { v: vec![0, 0], m: vec![vec![1, 1], vec![1, 1]] };
        assert!(bad.to_element(7, 2).is_err());
    }
}
