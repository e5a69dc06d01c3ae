use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{AffineElement, AffineGroup, GroupIndex};
use crate::error::{Error, Result};

/// Default cap on the size of a materialized product set.
pub const DEFAULT_PRODUCT_CAP: usize = 10_000_000;

/// A finite subset of the affine group.
#[derive(Clone)]
pub struct ElementSet {
    group: Arc<AffineGroup>,
    members: BTreeSet<GroupIndex>,
    symmetric: bool,
}

impl std::fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ElementSet")
            .field("p", &self.group.p())
            .field("d", &self.group.d())
            .field("len", &self.members.len())
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

impl PartialEq for ElementSet {
    fn eq(&self, other: &Self) -> bool {
        self.group.p() == other.group.p() && self.group.d() == other.group.d() && self.members == other.members
    }
}

impl ElementSet {
    pub fn new(group: Arc<AffineGroup>, members: impl IntoIterator<Item = GroupIndex>) -> Self {
        let members: BTreeSet<GroupIndex> = members.into_iter().collect();
        let symmetric = members.iter().all(|&g| members.contains(&group.inv(g)));
        ElementSet { group, members, symmetric }
    }

    pub fn from_elements(group: Arc<AffineGroup>, elements: &[AffineElement]) -> Result<Self> {
        let idx = elements.iter().map(|g| group.index_of(g)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(group, idx))
    }

    pub fn whole_group(group: Arc<AffineGroup>) -> Self {
        let all: Vec<GroupIndex> = group.elements().collect();
        Self::new(group, all)
    }

    /// The translation subgroup {(v, I)}.
    pub fn translations(group: Arc<AffineGroup>) -> Self {
        let e = group.sl_identity();
        let t: Vec<GroupIndex> = (0..group.vec_count()).map(|v| group.join(v, e)).collect();
        Self::new(group, t)
    }

    pub fn from_mask(group: Arc<AffineGroup>, mask: &[bool]) -> Self {
        let idx: Vec<GroupIndex> =
            mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| GroupIndex(i as u32)).collect();
        Self::new(group, idx)
    }

    pub fn group(&self) -> &Arc<AffineGroup> {
        &self.group
    }

    pub fn members(&self) -> &BTreeSet<GroupIndex> {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = GroupIndex> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<GroupIndex> {
        self.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: GroupIndex) -> bool {
        self.members.contains(&g)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// S ∪ S⁻¹.
    pub fn symmetrize(&self) -> ElementSet {
        let inv: Vec<GroupIndex> = self.iter().map(|g| self.group.inv(g)).collect();
        Self::new(Arc::clone(&self.group), self.iter().chain(inv))
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Set of linear-part indices θ(A).
    pub fn linear_parts(&self) -> BTreeSet<usize> {
        self.iter().map(|g| self.group.linear_index(g)).collect()
    }

    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.group.order()];
        for g in self.iter() {
            m[g.get()] = true;
        }
        m
    }

    /// The set product `self · other`.
    pub fn mul_set(&self, other: &ElementSet, cap: usize) -> Result<ElementSet> {
        self.group.same_shape(&other.group)?;
        let g = &self.group;
        let mut out = vec![false; g.order()];
        let mut size = 0usize;
        let rhs = other.to_vec();
        for a in self.iter() {
            for &b in &rhs {
                let c = g.mul(a, b);
                if !out[c.get()] {
                    out[c.get()] = true;
                    size += 1;
                    if size > cap {
                        return Err(Error::ProductSetCap { size, cap });
                    }
                }
            }
        }
        Ok(Self::from_mask(Arc::clone(g), &out))
    }

    /// Π_k A, built incrementally as Π_{j+1} = Π_j · A.
    pub fn product_set(&self, k: usize) -> Result<ElementSet> {
        self.product_set_with_cap(k, DEFAULT_PRODUCT_CAP)
    }

    pub fn product_set_with_cap(&self, k: usize, cap: usize) -> Result<ElementSet> {
        Ok(self.product_sizes_with_cap(k, cap)?.1)
    }

    /// Sizes |Π_1 A|, ..., |Π_k A| and the final set Π_k A.
    pub fn product_sizes_with_cap(&self, k: usize, cap: usize) -> Result<(Vec<usize>, ElementSet)> {
        if k == 0 {
            return Err(Error::Precondition("product set needs k >= 1".into()));
        }
        if self.len() > cap {
            return Err(Error::ProductSetCap { size: self.len(), cap });
        }
        let mut sizes = vec![self.len()];
        let mut current = self.clone();
        for _ in 1..k {
            current = current.mul_set(self, cap)?;
            sizes.push(current.len());
        }
        Ok((sizes, current))
    }

    /// Tests whether the set is not contained in a coset of a proper subgroup
    /// (`allow_coset = false`, via ⟨s₀⁻¹S⟩ = G with s₀ the smallest member), or merely
    /// whether ⟨S⟩ = G (`allow_coset = true`).
    pub fn generates_whole_group(&self, allow_coset: bool) -> Result<bool> {
        let Some(&s0) = self.members.first() else {
            return Err(Error::Precondition("generating set must be nonempty".into()));
        };
        let g = &self.group;
        let gens: Vec<GroupIndex> = if allow_coset {
            self.to_vec()
        } else {
            let s0i = g.inv(s0);
            self.iter().map(|s| g.mul(s0i, s)).collect()
        };
        // Cheap necessary condition first: the linear parts must generate SL_d.
        let lin: Vec<usize> = gens.iter().map(|&s| g.linear_index(s)).collect();
        if g.sl_closure_size(&lin) != g.sl_order() {
            return Ok(false);
        }
        Ok(g.closure(&gens).iter().all(|&b| b))
    }
}

/// Layered product sets that remember one factorization for every element.
///
/// `layer(j)` maps each element of Π_{j+1} A to its parent in Π_j A and the last factor,
/// chosen as the first hit when scanning parents and factors in ascending index order.
pub struct ProductTower {
    base: Vec<GroupIndex>,
    layers: Vec<BTreeMap<GroupIndex, (GroupIndex, GroupIndex)>>,
}

impl ProductTower {
    pub fn build(a: &ElementSet, k: usize, cap: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("product tower needs k >= 1".into()));
        }
        let g = a.group();
        let base = a.to_vec();
        let mut layers: Vec<BTreeMap<GroupIndex, (GroupIndex, GroupIndex)>> = Vec::with_capacity(k);
        layers.push(base.iter().map(|&x| (x, (x, x))).collect());
        for j in 1..k {
            let mut next = BTreeMap::new();
            for &x in layers[j - 1].keys() {
                for &s in &base {
                    next.entry(g.mul(x, s)).or_insert((x, s));
                }
                if next.len() > cap {
                    return Err(Error::ProductSetCap { size: next.len(), cap });
                }
            }
            layers.push(next);
        }
        Ok(ProductTower { base, layers })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Elements of Π_k A in ascending order, `k` in `1..=depth`.
    pub fn level(&self, k: usize) -> impl Iterator<Item = GroupIndex> + '_ {
        self.layers[k - 1].keys().copied()
    }

    pub fn contains(&self, k: usize, x: GroupIndex) -> bool {
        self.layers[k - 1].contains_key(&x)
    }

    /// Factors `[a₁, ..., a_k]` with `a₁⋯a_k = x`, if `x ∈ Π_k A`.
    pub fn factorize(&self, k: usize, x: GroupIndex) -> Option<Vec<GroupIndex>> {
        if !self.contains(k, x) {
            return None;
        }
        let mut factors = Vec::with_capacity(k);
        let mut cur = x;
        for j in (1..k).rev() {
            let (parent, s) = self.layers[j][&cur];
            factors.push(s);
            cur = parent;
        }
        debug_assert!(self.base.contains(&cur));
        factors.push(cur);
        factors.reverse();
        Some(factors)
    }
}

/// Multiplies out a word in the group.
pub fn evaluate_word(group: &AffineGroup, word: &[GroupIndex]) -> GroupIndex {
    word.iter().fold(group.identity(), |acc, &w| group.mul(acc, w))
}
