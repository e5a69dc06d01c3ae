//! Probability measures on the affine group and on F_p^d.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AffineGroup, ElementDoc, ElementSet, FpVector, GroupIndex};

/// Tolerance on the total mass of a probability measure.
pub const MASS_TOL: f64 = 1e-12;

/// Drift beyond which a convolution result is renormalized.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-13;

/// Counting-measure L^q norm of a real function; `q = f64::INFINITY` gives the max norm.
pub fn lq_norm(values: &[f64], q: f64) -> f64 {
    assert!(q >= 1.0, "L^q norms need q >= 1, got {q}");
    if q.is_infinite() {
        return values.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    }
    if q == 2.0 {
        return values.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    values.iter().map(|x| x.abs().powf(q)).sum::<f64>().powf(1.0 / q)
}

#[derive(Clone, Debug)]
enum Storage {
    /// Strictly positive masses in ascending index order.
    Sparse(Vec<(GroupIndex, f64)>),
    Dense(Vec<f64>),
}

/// A probability measure on F_p^d ⋊ SL_d(F_p).
#[derive(Clone)]
pub struct GroupMeasure {
    group: Arc<AffineGroup>,
    storage: Storage,
    drift: f64,
}

impl std::fmt::Debug for GroupMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupMeasure")
            .field("p", &self.group.p())
            .field("d", &self.group.d())
            .field("support", &self.support_len())
            .field("drift", &self.drift)
            .finish()
    }
}

fn check_mass(total: f64) -> Result<()> {
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidMeasure(format!("total mass {total} differs from 1")));
    }
    Ok(())
}

impl GroupMeasure {
    /// Builds a measure from explicit masses. Repeated indices are summed.
    pub fn from_masses(group: Arc<AffineGroup>, masses: impl IntoIterator<Item = (GroupIndex, f64)>) -> Result<Self> {
        let mut dense = vec![0.0; group.order()];
        for (g, m) in masses {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(Error::InvalidMeasure(format!("mass {m} at index {}", g.0)));
            }
            if g.get() >= dense.len() {
                return Err(Error::InvalidMeasure(format!("index {} out of range", g.0)));
            }
            dense[g.get()] += m;
        }
        check_mass(dense.iter().sum())?;
        Ok(Self::from_dense_unchecked(group, dense, 0.0))
    }

    /// Normalizes nonnegative weights to a probability measure.
    pub fn from_weights(group: Arc<AffineGroup>, weights: impl IntoIterator<Item = (GroupIndex, f64)>) -> Result<Self> {
        let w: Vec<(GroupIndex, f64)> = weights.into_iter().collect();
        let total: f64 = w.iter().map(|x| x.1).sum();
        if !(total > 0.0) || w.iter().any(|x| !(x.1 >= 0.0)) {
            return Err(Error::InvalidMeasure("weights must be nonnegative with positive sum".into()));
        }
        let mut dense = vec![0.0; group.order()];
        for (g, m) in w {
            dense[g.get()] += m / total;
        }
        let s: f64 = dense.iter().sum();
        dense.iter_mut().for_each(|x| *x /= s);
        Ok(Self::from_dense_unchecked(group, dense, 0.0))
    }

    pub fn dirac(group: Arc<AffineGroup>, g: GroupIndex) -> Self {
        GroupMeasure { group, storage: Storage::Sparse(vec![(g, 1.0)]), drift: 0.0 }
    }

    pub fn identity(group: Arc<AffineGroup>) -> Self {
        let e = group.identity();
        Self::dirac(group, e)
    }

    pub fn uniform(group: Arc<AffineGroup>) -> Self {
        let n = group.order();
        GroupMeasure { group, storage: Storage::Dense(vec![1.0 / n as f64; n]), drift: 0.0 }
    }

    /// Uniform measure on a nonempty set.
    pub fn uniform_on(set: &ElementSet) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        let w = 1.0 / set.len() as f64;
        Self::from_weights(Arc::clone(set.group()), set.iter().map(|g| (g, w)))
    }

    fn from_dense_unchecked(group: Arc<AffineGroup>, dense: Vec<f64>, drift: f64) -> Self {
        let support = dense.iter().filter(|&&x| x > 0.0).count();
        let storage = if support > group.order() / 4 {
            Storage::Dense(dense)
        } else {
            Storage::Sparse(
                dense.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, &x)| (GroupIndex(i as u32), x)).collect(),
            )
        };
        GroupMeasure { group, storage, drift }
    }

    pub fn group(&self) -> &Arc<AffineGroup> {
        &self.group
    }

    /// Cumulative |mass − 1| recorded across the convolutions that produced this measure.
    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.storage, Storage::Dense(_))
    }

    pub fn mass(&self, g: GroupIndex) -> f64 {
        match &self.storage {
            Storage::Dense(v) => v[g.get()],
            Storage::Sparse(s) => s.binary_search_by_key(&g, |x| x.0).map(|i| s[i].1).unwrap_or(0.0),
        }
    }

    /// Atoms with positive mass, in ascending index order.
    pub fn support(&self) -> Vec<(GroupIndex, f64)> {
        match &self.storage {
            Storage::Sparse(s) => s.clone(),
            Storage::Dense(v) => {
                v.iter().enumerate().filter(|(_, &x)| x > 0.0).map(|(i, &x)| (GroupIndex(i as u32), x)).collect()
            }
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Sparse(s) => s.len(),
            Storage::Dense(v) => v.iter().filter(|&&x| x > 0.0).count(),
        }
    }

    pub fn support_set(&self) -> ElementSet {
        ElementSet::new(Arc::clone(&self.group), self.support().into_iter().map(|x| x.0))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(s) => {
                let mut v = vec![0.0; self.group.order()];
                for &(g, m) in s {
                    v[g.get()] = m;
                }
                v
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        match &self.storage {
            Storage::Dense(v) => v.iter().sum(),
            Storage::Sparse(s) => s.iter().map(|x| x.1).sum(),
        }
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        match &self.storage {
            Storage::Dense(v) => lq_norm(v, q),
            Storage::Sparse(s) => lq_norm(&s.iter().map(|x| x.1).collect::<Vec<_>>(), q),
        }
    }

    /// (μ*ν)(x) = Σ_h μ(h) ν(h⁻¹x), accumulated in ascending (h, k) order.
    pub fn convolve(&self, other: &GroupMeasure) -> Result<GroupMeasure> {
        self.group.same_shape(&other.group)?;
        let g = &self.group;
        let mut out = vec![0.0; g.order()];
        let rhs = other.support();
        for (h, a) in self.support() {
            for &(k, b) in &rhs {
                out[g.mul(h, k).get()] += a * b;
            }
        }
        let total: f64 = out.iter().sum();
        let step = (total - 1.0).abs();
        if step > RENORMALIZE_THRESHOLD {
            out.iter_mut().for_each(|x| *x /= total);
        }
        Ok(Self::from_dense_unchecked(Arc::clone(g), out, self.drift + other.drift + step))
    }

    /// μ̌(g) = μ(g⁻¹).
    pub fn reverse(&self) -> GroupMeasure {
        let g = &self.group;
        let mut out = vec![0.0; g.order()];
        for (x, m) in self.support() {
            out[g.inv(x).get()] = m;
        }
        Self::from_dense_unchecked(Arc::clone(g), out, self.drift)
    }

    /// max_g |μ(g) − μ(g⁻¹)|.
    pub fn symmetry_defect(&self) -> f64 {
        let g = &self.group;
        self.support().into_iter().map(|(x, m)| (m - self.mass(g.inv(x))).abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }

    /// μ^{*(l)} by left folding μ*(μ*(⋯)); `l = 0` gives δ₁.
    pub fn power(&self, l: usize) -> Result<GroupMeasure> {
        let mut acc = Self::identity(Arc::clone(&self.group));
        for _ in 0..l {
            acc = self.convolve(&acc)?;
        }
        Ok(acc)
    }

    /// μ^{*(l)} by repeated squaring.
    pub fn power_by_squaring(&self, mut l: usize) -> Result<GroupMeasure> {
        let mut acc = Self::identity(Arc::clone(&self.group));
        let mut base = self.clone();
        while l > 0 {
            if l & 1 == 1 {
                acc = acc.convolve(&base)?;
            }
            l >>= 1;
            if l > 0 {
                base = base.convolve(&base)?;
            }
        }
        Ok(acc)
    }

    /// Pushforward to SL_d(F_p) under θ, indexed by the SL enumeration.
    pub fn linear_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.group.sl_order()];
        for (x, m) in self.support() {
            out[self.group.linear_index(x)] += m;
        }
        out
    }

    /// [μ.η](x) = Σ_g μ(g) η(g⁻¹.x).
    pub fn act_convolve(&self, eta: &VectorMeasure) -> Result<VectorMeasure> {
        let g = &self.group;
        if eta.p != g.p() || eta.d != g.d() {
            return Err(Error::ModulusMismatch { p1: g.p(), d1: g.d(), p2: eta.p, d2: eta.d });
        }
        let mut out = vec![0.0; g.vec_count()];
        let src: Vec<(usize, f64)> = eta.density.iter().copied().enumerate().filter(|x| x.1 > 0.0).collect();
        for (h, m) in self.support() {
            for &(y, e) in &src {
                out[g.act(h, y)] += m * e;
            }
        }
        Ok(VectorMeasure { p: eta.p, d: eta.d, density: out })
    }

    /// The point-to-point transition matrix of one step.
    pub fn kernel(&self) -> TransitionKernel {
        let g = &self.group;
        let n = g.vec_count();
        let mut k = vec![0.0; n * n];
        for (h, m) in self.support() {
            for x in 0..n {
                k[g.act(h, x) * n + x] += m;
            }
        }
        TransitionKernel { n, entries: k }
    }

    /// α = max_{x,y} μ.δ_x(y).
    pub fn alpha(&self) -> f64 {
        self.kernel().max_entry()
    }

    /// max_x ‖μ.δ_x‖_{L²}.
    pub fn max_point_l2(&self) -> f64 {
        let k = self.kernel();
        (0..k.n).map(|x| lq_norm(&k.column(x), 2.0)).fold(0.0, f64::max)
    }

    pub fn to_doc(&self) -> GroupMeasureDoc {
        let entries = self
            .support()
            .into_iter()
            .map(|(x, mass)| {
                let ElementDoc { v, m } = ElementDoc::from_element(&self.group.element(x));
                MassEntry { v, m, mass }
            })
            .collect();
        GroupMeasureDoc { p: self.group.p(), d: self.group.d(), entries }
    }

    pub fn from_doc(group: Arc<AffineGroup>, doc: &GroupMeasureDoc) -> Result<Self> {
        if doc.p != group.p() || doc.d != group.d() {
            return Err(Error::ModulusMismatch { p1: group.p(), d1: group.d(), p2: doc.p, d2: doc.d });
        }
        let masses = doc
            .entries
            .iter()
            .map(|e| {
                let el = ElementDoc { v: e.v.clone(), m: e.m.clone() }.to_element(doc.p, doc.d)?;
                Ok((group.index_of(&el)?, e.mass))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_masses(group, masses)
    }
}

/// K[y][x] = μ.δ_x(y). Columns and rows each sum to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionKernel {
    n: usize,
    entries: Vec<f64>,
}

impl TransitionKernel {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, y: usize, x: usize) -> f64 {
        self.entries[y * self.n + x]
    }

    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.n).map(|y| self.get(y, x)).collect()
    }

    /// K·v.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        self.entries.chunks_exact(self.n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// Kernel of μ*ν from the kernels of μ and ν.
    pub fn compose(&self, other: &TransitionKernel) -> TransitionKernel {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for y in 0..n {
            for z in 0..n {
                let a = self.entries[y * n + z];
                if a == 0.0 {
                    continue;
                }
                let row = &other.entries[z * n..(z + 1) * n];
                let dst = &mut out[y * n..(y + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        TransitionKernel { n, entries: out }
    }
}

/// A probability density on F_p^d.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorMeasure {
    p: u32,
    d: usize,
    density: Vec<f64>,
}

impl VectorMeasure {
    pub fn new(p: u32, d: usize, density: Vec<f64>) -> Result<Self> {
        let n = (p as usize).pow(d as u32);
        if density.len() != n {
            return Err(Error::Shape { expected: n, found: density.len() });
        }
        if density.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidMeasure("negative or non-finite density".into()));
        }
        check_mass(density.iter().sum())?;
        Ok(VectorMeasure { p, d, density })
    }

    pub fn from_weights(p: u32, d: usize, weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("weights must have positive sum".into()));
        }
        Self::new(p, d, weights.into_iter().map(|w| w / total).collect())
    }

    pub fn dirac(p: u32, d: usize, x: usize) -> Self {
        let mut density = vec![0.0; (p as usize).pow(d as u32)];
        density[x] = 1.0;
        VectorMeasure { p, d, density }
    }

    pub fn dirac_at(x: &FpVector) -> Self {
        Self::dirac(x.modulus(), x.dim(), x.index())
    }

    pub fn uniform(p: u32, d: usize) -> Self {
        let n = (p as usize).pow(d as u32);
        VectorMeasure { p, d, density: vec![1.0 / n as f64; n] }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.density.is_empty()
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn get(&self, x: usize) -> f64 {
        self.density[x]
    }

    pub fn total_mass(&self) -> f64 {
        self.density.iter().sum()
    }

    pub fn lq_norm(&self, q: f64) -> f64 {
        lq_norm(&self.density, q)
    }

    /// η̌(x) = η(−x).
    pub fn reverse(&self) -> VectorMeasure {
        let mut out = vec![0.0; self.len()];
        for (x, &m) in self.density.iter().enumerate() {
            out[FpVector::from_index(self.p, self.d, x).neg().index()] = m;
        }
        VectorMeasure { p: self.p, d: self.d, density: out }
    }

    /// Additive convolution on F_p^d: (η*ζ)(x) = Σ_y η(y) ζ(x − y).
    pub fn convolve(&self, other: &VectorMeasure) -> Result<VectorMeasure> {
        if self.p != other.p || self.d != other.d {
            return Err(Error::ModulusMismatch { p1: self.p, d1: self.d, p2: other.p, d2: other.d });
        }
        let vecs: Vec<FpVector> = (0..self.len()).map(|i| FpVector::from_index(self.p, self.d, i)).collect();
        let mut out = vec![0.0; self.len()];
        for (y, &a) in self.density.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (z, &b) in other.density.iter().enumerate() {
                if b != 0.0 {
                    out[vecs[y].add(&vecs[z]).expect("same shape").index()] += a * b;
                }
            }
        }
        Ok(VectorMeasure { p: self.p, d: self.d, density: out })
    }

    pub fn to_doc(&self) -> VectorMeasureDoc {
        VectorMeasureDoc { p: self.p, d: self.d, density: self.density.clone() }
    }

    pub fn from_doc(doc: &VectorMeasureDoc) -> Result<Self> {
        Self::new(doc.p, doc.d, doc.density.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassEntry {
    pub v: Vec<i64>,
    pub m: Vec<Vec<i64>>,
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupMeasureDoc {
    pub p: u32,
    pub d: usize,
    pub entries: Vec<MassEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorMeasureDoc {
    pub p: u32,
    pub d: usize,
    pub density: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn group(p: u32) -> Arc<AffineGroup> {
        AffineGroup::shared(p, 2).unwrap()
    }

    fn random_measure(g: &Arc<AffineGroup>, atoms: usize, rng: &mut ChaCha8Rng) -> GroupMeasure {
        let w: Vec<(GroupIndex, f64)> =
            (0..atoms).map(|_| (GroupIndex(rng.gen_range(0..g.order() as u32)), rng.gen::<f64>() + 0.01)).collect();
        GroupMeasure::from_weights(Arc::clone(g), w).unwrap()
    }

    fn max_diff(a: &GroupMeasure, b: &GroupMeasure) -> f64 {
        a.to_dense().iter().zip(b.to_dense()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn convolution_identities() {
        let g = group(3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let nu = random_measure(&g, 5, &mut rng);
        assert!(max_diff(&GroupMeasure::identity(Arc::clone(&g)).convolve(&nu).unwrap(), &nu) < 1e-15);
        let (a, b) = (GroupIndex(17), GroupIndex(101));
        let dd = GroupMeasure::dirac(Arc::clone(&g), a).convolve(&GroupMeasure::dirac(Arc::clone(&g), b)).unwrap();
        assert_eq!(dd.support(), vec![(g.mul(a, b), 1.0)]);
        let u = GroupMeasure::uniform(Arc::clone(&g));
        assert!(max_diff(&u.convolve(&u).unwrap(), &u) < 1e-15);
        assert!(u.is_dense());
    }

    #[test]
    fn convolution_is_associative_and_reverses() {
        let g = group(3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let [a, b, c] = [(); 3].map(|_| random_measure(&g, 6, &mut rng));
            let lhs = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let rhs = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            assert!(max_diff(&lhs, &rhs) < 1e-12);
            let r1 = a.convolve(&b).unwrap().reverse();
            let r2 = b.reverse().convolve(&a.reverse()).unwrap();
            assert!(max_diff(&r1, &r2) < 1e-15);
            assert!(max_diff(&a.reverse().reverse(), &a) == 0.0);
        }
    }

    #[test]
    fn powers_by_folding_and_squaring_agree() {
        let g = group(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mu = random_measure(&g, 4, &mut rng);
        for l in [0, 1, 2, 5, 8, 13] {
            assert!(max_diff(&mu.power(l).unwrap(), &mu.power_by_squaring(l).unwrap()) < 1e-11);
        }
    }

    #[test]
    fn action_convolution() {
        let g = group(5);
        let h = GroupIndex(1234);
        let x = 7;
        let out = GroupMeasure::dirac(Arc::clone(&g), h).act_convolve(&VectorMeasure::dirac(5, 2, x)).unwrap();
        assert_eq!(out, VectorMeasure::dirac(5, 2, g.act(h, x)));
        let u = GroupMeasure::uniform(Arc::clone(&g)).act_convolve(&VectorMeasure::dirac(5, 2, 3)).unwrap();
        assert!(u.density().iter().all(|&y| (y - 1.0 / 25.0).abs() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (a, b) = (random_measure(&g, 5, &mut rng), random_measure(&g, 7, &mut rng));
        let eta = VectorMeasure::from_weights(5, 2, (0..25).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let lhs = a.convolve(&b).unwrap().act_convolve(&eta).unwrap();
        let rhs = a.act_convolve(&b.act_convolve(&eta).unwrap()).unwrap();
        assert!(lhs.density().iter().zip(rhs.density()).all(|(x, y)| (x - y).abs() < 1e-14));
    }

    #[test]
    fn alpha_extremes_and_brute_force() {
        let g = group(3);
        assert_eq!(GroupMeasure::dirac(Arc::clone(&g), GroupIndex(5)).alpha(), 1.0);
        assert!((GroupMeasure::uniform(Arc::clone(&g)).alpha() - 1.0 / 9.0).abs() < 1e-15);
        // Three elements sending 0 to three distinct points.
        let set: Vec<GroupIndex> = (0..3).map(|v| g.join(v, v + 1)).collect();
        let mu = GroupMeasure::uniform_on(&ElementSet::new(Arc::clone(&g), set.clone())).unwrap();
        let mut brute = 0.0f64;
        for x in 0..9 {
            for y in 0..9 {
                let hit = set.iter().filter(|&&s| g.act(s, x) == y).count() as f64 / 3.0;
                brute = brute.max(hit);
            }
        }
        assert_eq!(mu.alpha(), brute);
        assert!(mu.alpha() >= 1.0 / 9.0 && mu.alpha() <= 1.0);
    }

    #[test]
    fn norms() {
        let u = VectorMeasure::uniform(5, 2);
        assert!((u.lq_norm(2.0) - 0.2).abs() < 1e-15);
        let dx = VectorMeasure::dirac(5, 2, 3);
        for q in [1.0, 2.0, 3.5, f64::INFINITY] {
            assert_eq!(dx.lq_norm(q), 1.0);
        }
    }

    #[test]
    fn validation_and_json() {
        let g = group(3);
        assert!(GroupMeasure::from_masses(Arc::clone(&g), [(GroupIndex(0), 0.5)]).is_err());
        assert!(GroupMeasure::from_masses(Arc::clone(&g), [(GroupIndex(0), -0.5), (GroupIndex(1), 1.5)]).is_err());
        assert!(VectorMeasure::new(3, 2, vec![0.5; 9]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mu = random_measure(&g, 4, &mut rng);
        let json = serde_json::to_string(&mu.to_doc()).unwrap();
        let back = GroupMeasure::from_doc(Arc::clone(&g), &serde_json::from_str(&json).unwrap()).unwrap();
        assert!(max_diff(&mu, &back) == 0.0);
        let eta = VectorMeasure::uniform(3, 2);
        let s = serde_json::to_string(&eta.to_doc()).unwrap();
        assert!(s.contains("\"density\""));
        assert_eq!(VectorMeasure::from_doc(&serde_json::from_str(&s).unwrap()).unwrap(), eta);
    }

    #[test]
    fn kernel_composition_matches_convolution() {
        let g = group(3);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (a, b) = (random_measure(&g, 4, &mut rng), random_measure(&g, 3, &mut rng));
        let k1 = a.kernel().compose(&b.kernel());
        let k2 = a.convolve(&b).unwrap().kernel();
        for y in 0..9 {
            for x in 0..9 {
                assert!((k1.get(y, x) - k2.get(y, x)).abs() < 1e-15);
            }
        }
    }
}
