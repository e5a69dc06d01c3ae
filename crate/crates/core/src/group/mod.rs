//! Exact arithmetic in F_p^d ⋊ SL_d(F_p) and its canonical indexing.

mod element;
mod enumerate;
pub mod field;
mod set;

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

pub use element::{AffineElement, ElementDoc, FpVector, SlMatrix};
pub use enumerate::{cache_path, sl_order, SlEnumeration, DEFAULT_SL_CAP};
pub use field::FpScalar;
pub use set::{evaluate_word, ElementSet, ProductTower, DEFAULT_PRODUCT_CAP};

use crate::error::{Error, Result};

/// Default cap on |G| for building the indexed tables.
pub const DEFAULT_ORDER_CAP: u64 = 5_000_000;

/// Position of an element in the canonical order of G:
/// `vector_index · |SL_d(F_p)| + matrix_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupIndex(pub u32);

impl GroupIndex {
    pub fn get(self) -> usize {
        self.0 as usize
    }
}

/// Size limits and cache location used when building a group.
#[derive(Clone, Debug)]
pub struct GroupConfig {
    pub sl_cap: u64,
    pub order_cap: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for GroupConfig {
    fn default() -> Self {
        GroupConfig { sl_cap: DEFAULT_SL_CAP, order_cap: DEFAULT_ORDER_CAP, cache_dir: None }
    }
}

enum SlLookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

const NOT_SL: u32 = u32::MAX;

/// The affine group F_p^d ⋊ SL_d(F_p) with precomputed index tables.
///
/// All index-level operations (`mul`, `inv`, `act`) are table lookups derived from the
/// reference arithmetic on [`AffineElement`].
pub struct AffineGroup {
    p: u32,
    d: usize,
    nvec: usize,
    nsl: usize,
    sl: Arc<SlEnumeration>,
    lookup: SlLookup,
    sl_mul: Option<Vec<u32>>,
    sl_inv: Vec<u32>,
    sl_transpose: Vec<u32>,
    sl_identity: u32,
    /// `mat_vec[m * nvec + x]` is the index of `M_m · x`.
    mat_vec: Vec<u32>,
    vec_add: Option<Vec<u32>>,
    vec_neg: Vec<u32>,
}

impl std::fmt::Debug for AffineGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AffineGroup").field("p", &self.p).field("d", &self.d).field("order", &self.order()).finish()
    }
}

impl AffineGroup {
    pub fn new(p: u32, d: usize) -> Result<Self> {
        Self::with_config(p, d, &GroupConfig::default())
    }

    pub fn with_config(p: u32, d: usize, cfg: &GroupConfig) -> Result<Self> {
        field::check_prime(p)?;
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        let order = (p as u128).pow(d as u32) * sl_order(d, p);
        if order > cfg.order_cap as u128 || order > u32::MAX as u128 {
            return Err(Error::GroupOrderCap { order, cap: cfg.order_cap });
        }
        let sl = SlEnumeration::shared(d, p, cfg.sl_cap, cfg.cache_dir.as_deref())?;
        Ok(Self::build(sl))
    }

    /// Process-wide memoized group with the default configuration.
    pub fn shared(p: u32, d: usize) -> Result<Arc<Self>> {
        static MEMO: OnceLock<Mutex<HashMap<(u32, usize), Arc<AffineGroup>>>> = OnceLock::new();
        let memo = MEMO.get_or_init(Default::default);
        if let Some(g) = memo.lock().expect("memo lock").get(&(p, d)) {
            return Ok(Arc::clone(g));
        }
        let g = Arc::new(Self::new(p, d)?);
        memo.lock().expect("memo lock").insert((p, d), Arc::clone(&g));
        Ok(g)
    }

    fn build(sl: Arc<SlEnumeration>) -> Self {
        let (p, d) = (sl.modulus(), sl.dim());
        let nsl = sl.len();
        let nvec = (p as usize).pow(d as u32);
        let key_space = (p as u64).checked_pow((d * d) as u32);

        let lookup = match key_space {
            Some(k) if k <= 1 << 24 => {
                let mut table = vec![NOT_SL; k as usize];
                for i in 0..nsl {
                    table[sl.matrix(i).key() as usize] = i as u32;
                }
                SlLookup::Dense(table)
            }
            _ => SlLookup::Sparse((0..nsl).map(|i| (sl.matrix(i).key(), i as u32)).collect()),
        };
        let find = |m: &SlMatrix| -> u32 {
            match &lookup {
                SlLookup::Dense(t) => t[m.key() as usize],
                SlLookup::Sparse(h) => h[&m.key()],
            }
        };

        let mats: Vec<SlMatrix> = sl.iter().collect();
        let sl_inv: Vec<u32> = mats.iter().map(|m| find(&m.inverse())).collect();
        let sl_transpose: Vec<u32> = mats.iter().map(|m| find(&m.transpose())).collect();
        let sl_identity = find(&SlMatrix::identity(p, d));
        let sl_mul = (nsl * nsl <= 1 << 22).then(|| {
            let mut t = Vec::with_capacity(nsl * nsl);
            for a in &mats {
                for b in &mats {
                    t.push(find(&a.mul(b).expect("same shape")));
                }
            }
            t
        });

        let vectors: Vec<FpVector> = (0..nvec).map(|i| FpVector::from_index(p, d, i)).collect();
        let mut mat_vec = Vec::with_capacity(nsl * nvec);
        for m in &mats {
            for x in &vectors {
                mat_vec.push(m.apply(x).expect("same shape").index() as u32);
            }
        }
        let vec_add = (nvec * nvec <= 1 << 22).then(|| {
            let mut t = Vec::with_capacity(nvec * nvec);
            for a in &vectors {
                for b in &vectors {
                    t.push(a.add(b).expect("same shape").index() as u32);
                }
            }
            t
        });
        let vec_neg = vectors.iter().map(|v| v.neg().index() as u32).collect();

        AffineGroup {
            p,
            d,
            nvec,
            nsl,
            sl,
            lookup,
            sl_mul,
            sl_inv,
            sl_transpose,
            sl_identity,
            mat_vec,
            vec_add,
            vec_neg,
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// |G| = p^d · |SL_d(F_p)|.
    pub fn order(&self) -> usize {
        self.nvec * self.nsl
    }

    pub fn sl_order(&self) -> usize {
        self.nsl
    }

    /// p^d.
    pub fn vec_count(&self) -> usize {
        self.nvec
    }

    pub fn sl_enumeration(&self) -> &SlEnumeration {
        &self.sl
    }

    pub fn same_shape(&self, other: &AffineGroup) -> Result<()> {
        if self.p == other.p && self.d == other.d {
            Ok(())
        } else {
            Err(Error::ModulusMismatch { p1: self.p, d1: self.d, p2: other.p, d2: other.d })
        }
    }

    pub fn identity(&self) -> GroupIndex {
        self.join(0, self.sl_identity as usize)
    }

    pub fn sl_identity(&self) -> usize {
        self.sl_identity as usize
    }

    #[inline]
    pub fn split(&self, g: GroupIndex) -> (usize, usize) {
        (g.get() / self.nsl, g.get() % self.nsl)
    }

    #[inline]
    pub fn join(&self, vec_idx: usize, sl_idx: usize) -> GroupIndex {
        GroupIndex((vec_idx * self.nsl + sl_idx) as u32)
    }

    pub fn sl_index_of(&self, m: &SlMatrix) -> Result<usize> {
        if m.modulus() != self.p || m.dim() != self.d {
            return Err(Error::ModulusMismatch { p1: self.p, d1: self.d, p2: m.modulus(), d2: m.dim() });
        }
        let i = match &self.lookup {
            SlLookup::Dense(t) => t[m.key() as usize],
            SlLookup::Sparse(h) => *h.get(&m.key()).unwrap_or(&NOT_SL),
        };
        debug_assert_ne!(i, NOT_SL);
        Ok(i as usize)
    }

    pub fn vec_index_of(&self, v: &FpVector) -> Result<usize> {
        if v.modulus() != self.p || v.dim() != self.d {
            return Err(Error::ModulusMismatch { p1: self.p, d1: self.d, p2: v.modulus(), d2: v.dim() });
        }
        Ok(v.index())
    }

    pub fn index_of(&self, g: &AffineElement) -> Result<GroupIndex> {
        Ok(self.join(self.vec_index_of(g.translation_part())?, self.sl_index_of(g.linear_part())?))
    }

    pub fn element(&self, g: GroupIndex) -> AffineElement {
        let (v, m) = self.split(g);
        AffineElement::new(self.vector(v), self.sl.matrix(m)).expect("same shape")
    }

    pub fn vector(&self, idx: usize) -> FpVector {
        FpVector::from_index(self.p, self.d, idx)
    }

    pub fn sl_matrix(&self, idx: usize) -> SlMatrix {
        self.sl.matrix(idx)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupIndex> {
        (0..self.order() as u32).map(GroupIndex)
    }

    #[inline]
    pub fn sl_mul(&self, a: usize, b: usize) -> usize {
        match &self.sl_mul {
            Some(t) => t[a * self.nsl + b] as usize,
            None => {
                let prod = self.sl.matrix(a).mul(&self.sl.matrix(b)).expect("same shape");
                self.sl_index_of(&prod).expect("same shape")
            }
        }
    }

    #[inline]
    pub fn sl_inv(&self, a: usize) -> usize {
        self.sl_inv[a] as usize
    }

    #[inline]
    pub fn sl_transpose(&self, a: usize) -> usize {
        self.sl_transpose[a] as usize
    }

    /// Index of `M_m · x`.
    #[inline]
    pub fn sl_apply(&self, m: usize, x: usize) -> usize {
        self.mat_vec[m * self.nvec + x] as usize
    }

    #[inline]
    pub fn vec_add(&self, a: usize, b: usize) -> usize {
        match &self.vec_add {
            Some(t) => t[a * self.nvec + b] as usize,
            None => self.vector(a).add(&self.vector(b)).expect("same shape").index(),
        }
    }

    #[inline]
    pub fn vec_neg(&self, a: usize) -> usize {
        self.vec_neg[a] as usize
    }

    #[inline]
    pub fn mul(&self, a: GroupIndex, b: GroupIndex) -> GroupIndex {
        let (va, ma) = self.split(a);
        let (vb, mb) = self.split(b);
        self.join(self.vec_add(va, self.sl_apply(ma, vb)), self.sl_mul(ma, mb))
    }

    #[inline]
    pub fn inv(&self, a: GroupIndex) -> GroupIndex {
        let (v, m) = self.split(a);
        let mi = self.sl_inv(m);
        self.join(self.vec_neg(self.sl_apply(mi, v)), mi)
    }

    /// Index of `g.x`.
    #[inline]
    pub fn act(&self, g: GroupIndex, x: usize) -> usize {
        let (v, m) = self.split(g);
        self.vec_add(v, self.sl_apply(m, x))
    }

    /// Linear-part index `θ(g)`.
    #[inline]
    pub fn linear_index(&self, g: GroupIndex) -> usize {
        g.get() % self.nsl
    }

    /// Translation-part index `v(g)`.
    #[inline]
    pub fn translation_index(&self, g: GroupIndex) -> usize {
        g.get() / self.nsl
    }

    pub fn is_pure_translation(&self, g: GroupIndex) -> bool {
        let (v, m) = self.split(g);
        m == self.sl_identity() && v != 0
    }

    /// Breadth-first closure of `generators` under right multiplication, starting from the
    /// identity. Returns the membership mask of the generated subgroup.
    pub fn closure(&self, generators: &[GroupIndex]) -> Vec<bool> {
        let mut seen = vec![false; self.order()];
        let e = self.identity();
        seen[e.get()] = true;
        let mut queue = std::collections::VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for &s in generators {
                let y = self.mul(x, s);
                if !seen[y.get()] {
                    seen[y.get()] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Order of the subgroup of SL_d(F_p) generated by the given matrix indices.
    pub fn sl_closure_size(&self, generators: &[usize]) -> usize {
        let mut seen = vec![false; self.nsl];
        seen[self.sl_identity()] = true;
        let mut queue = std::collections::VecDeque::from([self.sl_identity()]);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &s in generators {
                let y = self.sl_mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn index_roundtrip() {
        let g = AffineGroup::new(3, 2).unwrap();
        assert_eq!(g.order(), 216);
        for i in g.elements() {
            assert_eq!(g.index_of(&g.element(i)).unwrap(), i);
        }
        assert!(g.element(g.identity()).is_identity());
    }

    #[test]
    fn tables_agree_with_reference_arithmetic() {
        for (p, d) in [(5, 2), (3, 3), (2, 2)] {
            let g = AffineGroup::new(p, d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..300 {
                let a = GroupIndex(rng.gen_range(0..g.order() as u32));
                let b = GroupIndex(rng.gen_range(0..g.order() as u32));
                let x = rng.gen_range(0..g.vec_count());
                let (ea, eb) = (g.element(a), g.element(b));
                assert_eq!(g.element(g.mul(a, b)), ea.compose(&eb).unwrap());
                assert_eq!(g.element(g.inv(a)), ea.inverse());
                assert_eq!(g.vector(g.act(a, x)), ea.act(&g.vector(x)).unwrap());
            }
        }
    }

    #[test]
    fn group_axioms_on_random_triples() {
        let g = AffineGroup::new(7, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let [a, b, c] = [(); 3].map(|_| GroupIndex(rng.gen_range(0..g.order() as u32)));
            assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
            assert_eq!(g.mul(g.inv(a), a), g.identity());
            assert_eq!(g.inv(g.inv(a)), a);
            let x = rng.gen_range(0..g.vec_count());
            assert_eq!(g.act(g.mul(a, b), x), g.act(a, g.act(b, x)));
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let cfg = GroupConfig { order_cap: 1000, ..GroupConfig::default() };
        assert!(matches!(AffineGroup::with_config(5, 2, &cfg), Err(Error::GroupOrderCap { .. })));
    }

    #[test]
    fn closure_of_standard_generators() {
        let g = AffineGroup::new(3, 2).unwrap();
        let t = g.index_of(&AffineElement::translation(FpVector::new(3, &[1, 0]))).unwrap();
        let a = g.index_of(&AffineElement::linear(SlMatrix::new(3, 2, &[1, 1, 0, 1]).unwrap())).unwrap();
        let b = g.index_of(&AffineElement::linear(SlMatrix::new(3, 2, &[1, 0, 1, 1]).unwrap())).unwrap();
        assert_eq!(g.closure(&[t, a, b]).iter().filter(|&&x| x).count(), 216);
        assert_eq!(g.closure(&[a, b]).iter().filter(|&&x| x).count(), 24);
        assert_eq!(g.closure(&[t]).iter().filter(|&&x| x).count(), 3);
    }
}
