//! Product-set growth: linear-part coverage of Π₃A, the section map, extraction of a pure
//! translation in Π₇A, the certificate Π₂₉A = G, Tao's triple-product inequality and the
//! coverage check for large subsets of SL_d(F_p).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bg::min_irrep_dim;
use crate::decay::Inequality;
use crate::error::{Error, Result};
use crate::group::{evaluate_word, AffineGroup, ElementDoc, ElementSet, GroupIndex, ProductTower, DEFAULT_PRODUCT_CAP};

/// Largest group for which `--materialize` will build Π₁..Π₂₉ explicitly.
pub const MATERIALIZE_CAP: usize = 200_000;

fn require_nonempty(a: &ElementSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Precondition("A must be nonempty".into()));
    }
    Ok(())
}

/// θ(Π₃A) = SL_d(F_p).
pub fn linear_part_coverage(a: &ElementSet) -> Result<bool> {
    require_nonempty(a)?;
    let pi3 = a.product_set(3)?;
    Ok(pi3.linear_parts().len() == a.group().sl_order())
}

/// The smallest j ≤ `j_max` with θ(Π₃Π_jS) = SL_d(F_p), and Π_jS itself. For symmetric S
/// the result is symmetric.
pub fn covering_power(s: &ElementSet, j_max: usize) -> Result<(usize, ElementSet)> {
    require_nonempty(s)?;
    for j in 1..=j_max {
        let a = s.product_set(j)?;
        if linear_part_coverage(&a)? {
            return Ok((j, a));
        }
    }
    Err(Error::Exhausted(format!("θ(Π₃Π_jS) ≠ SL for all j ≤ {j_max}")))
}

/// F: SL_d(F_p) → Π₃A with θ(F(σ)) = σ, choosing the smallest index for each σ.
#[derive(Clone, Debug)]
pub struct SectionMap {
    group: Arc<AffineGroup>,
    table: Vec<GroupIndex>,
    factors: Vec<[GroupIndex; 3]>,
}

impl SectionMap {
    pub fn get(&self, sigma: usize) -> GroupIndex {
        self.table[sigma]
    }

    /// Three members of A whose product is F(σ).
    pub fn factors(&self, sigma: usize) -> [GroupIndex; 3] {
        self.factors[sigma]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn group(&self) -> &Arc<AffineGroup> {
        &self.group
    }
}

pub fn build_section(a: &ElementSet) -> Result<SectionMap> {
    require_nonempty(a)?;
    let g = Arc::clone(a.group());
    let tower = ProductTower::build(a, 3, DEFAULT_PRODUCT_CAP)?;
    let mut table: Vec<Option<GroupIndex>> = vec![None; g.sl_order()];
    for x in tower.level(3) {
        let slot = &mut table[g.linear_index(x)];
        if slot.is_none() {
            *slot = Some(x);
        }
    }
    let missing = table.iter().filter(|t| t.is_none()).count();
    if missing > 0 {
        return Err(Error::Hypothesis(format!("θ(Π₃A) misses {missing} elements of SL")));
    }
    let table: Vec<GroupIndex> = table.into_iter().map(Option::unwrap).collect();
    let factors = table
        .iter()
        .map(|&x| {
            let f = tower.factorize(3, x).expect("element of level 3");
            [f[0], f[1], f[2]]
        })
        .collect();
    Ok(SectionMap { group: g, table, factors })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationSource {
    /// A itself contains the translation; the witness is padded with a⁻¹a pairs.
    DirectScan,
    /// g₀ = F(θ(g₁)σ)⁻¹·g₁·F(σ).
    Section,
}

/// Exhaustive product-set checks behind the certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterializedProducts {
    pub sizes: Vec<usize>,
    pub pi13_has_nonzero_translations: bool,
    pub pi26_has_all_translations: bool,
    pub pi29_is_group: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthCertificate {
    pub p: u32,
    pub d: usize,
    pub g0: ElementDoc,
    pub g0_index: u32,
    /// Absent when g₀ came from the direct scan.
    pub g1: Option<ElementDoc>,
    pub sigma: Option<Vec<Vec<u32>>>,
    pub source: TranslationSource,
    /// Seven members of A with product g₀.
    pub witness: Vec<ElementDoc>,
    pub witness_indices: Vec<u32>,
    pub coverage_ok: bool,
    /// Set by [`full_group_certificate`].
    pub translations_complete: bool,
    pub materialized: Option<MaterializedProducts>,
}

impl GrowthCertificate {
    /// The certificate's claim Π₂₉A = G holds.
    pub fn complete(&self) -> bool {
        self.coverage_ok && self.translations_complete && self.materialized.as_ref().map_or(true, |m| m.pi29_is_group)
    }
}

fn certificate(
    g: &AffineGroup,
    g0: GroupIndex,
    g1: Option<GroupIndex>,
    sigma: Option<usize>,
    source: TranslationSource,
    witness: Vec<GroupIndex>,
) -> Result<GrowthCertificate> {
    if witness.len() != 7 || evaluate_word(g, &witness) != g0 {
        return Err(Error::Consistency("pure-translation witness does not multiply out".into()));
    }
    Ok(GrowthCertificate {
        p: g.p(),
        d: g.d(),
        g0: ElementDoc::from_element(&g.element(g0)),
        g0_index: g0.0,
        g1: g1.map(|x| ElementDoc::from_element(&g.element(x))),
        sigma: sigma.map(|s| g.sl_matrix(s).rows()),
        source,
        witness: witness.iter().map(|&x| ElementDoc::from_element(&g.element(x))).collect(),
        witness_indices: witness.iter().map(|x| x.0).collect(),
        coverage_ok: true,
        translations_complete: false,
        materialized: None,
    })
}

/// A nonzero pure translation in Π₇A with its seven factors.
pub fn find_pure_translation(a: &ElementSet) -> Result<GrowthCertificate> {
    require_nonempty(a)?;
    if !a.is_symmetric() {
        return Err(Error::Precondition("A must be symmetric".into()));
    }
    let g = Arc::clone(a.group());
    if let Some(t) = a.iter().find(|&x| g.is_pure_translation(x)) {
        let s = a.members().first().copied().expect("nonempty");
        let si = g.inv(s);
        let witness = vec![t, si, s, si, s, si, s];
        return certificate(&g, t, None, None, TranslationSource::DirectScan, witness);
    }
    let section = build_section(a)?;
    for g1 in a.iter() {
        let t1 = g.linear_index(g1);
        for sigma in 0..g.sl_order() {
            let left = section.get(g.sl_mul(t1, sigma));
            let g0 = g.mul(g.mul(g.inv(left), g1), section.get(sigma));
            debug_assert_eq!(g.linear_index(g0), g.sl_identity());
            if g0 != g.identity() {
                let lf = section.factors(g.sl_mul(t1, sigma));
                let rf = section.factors(sigma);
                let witness = vec![g.inv(lf[2]), g.inv(lf[1]), g.inv(lf[0]), g1, rf[0], rf[1], rf[2]];
                return certificate(&g, g0, Some(g1), Some(sigma), TranslationSource::Section, witness);
            }
        }
    }
    Err(Error::Exhausted("every F(θ(g₁)σ)⁻¹g₁F(σ) is the identity".into()))
}

fn materialize(a: &ElementSet) -> Result<MaterializedProducts> {
    let g = a.group();
    if g.order() > MATERIALIZE_CAP {
        return Err(Error::GroupOrderCap { order: g.order() as u128, cap: MATERIALIZE_CAP as u64 });
    }
    let translations: Vec<GroupIndex> = (0..g.vec_count()).map(|v| g.join(v, g.sl_identity())).collect();
    let mut sizes = vec![a.len()];
    let mut cur = a.clone();
    let (mut pi13, mut pi26) = (false, false);
    for k in 2..=29 {
        cur = cur.mul_set(a, usize::MAX)?;
        sizes.push(cur.len());
        if k == 13 {
            pi13 = translations.iter().filter(|&&t| t != g.identity()).all(|&t| cur.contains(t));
        }
        if k == 26 {
            pi26 = translations.iter().all(|&t| cur.contains(t));
        }
    }
    Ok(MaterializedProducts {
        sizes,
        pi13_has_nonzero_translations: pi13,
        pi26_has_all_translations: pi26,
        pi29_is_group: cur.len() == g.order(),
    })
}

/// Certificate that Π₂₉A = G: g₀ ∈ Π₇A and its conjugates by Π₃A reach every nonzero
/// translation. With `materialize`, or automatically for d = 2, p ≤ 3, the product sets
/// up to Π₂₉A are also built explicitly.
pub fn full_group_certificate(a: &ElementSet, materialize_products: bool) -> Result<GrowthCertificate> {
    if !linear_part_coverage(a)? {
        return Err(Error::Hypothesis("θ(Π₃A) ≠ SL_d(F_p)".into()));
    }
    let mut cert = find_pure_translation(a)?;
    let g = a.group();
    let v0 = g.translation_index(GroupIndex(cert.g0_index));
    let mut reached = vec![false; g.vec_count()];
    for x in a.product_set(3)?.iter() {
        reached[g.sl_apply(g.linear_index(x), v0)] = true;
    }
    cert.translations_complete = reached[1..].iter().all(|&b| b) && !reached[0];
    if !cert.translations_complete {
        return Err(Error::Verification("conjugates of g₀ miss some nonzero translation".into()));
    }
    if materialize_products || (g.d() == 2 && g.p() <= 3) {
        cert.materialized = Some(materialize(a)?);
    }
    Ok(cert)
}

/// |Π_kA|/|A| ≤ (|Π₃A|/|A|)^{k−2}.
pub fn tao_triple_inequality(a: &ElementSet, k: usize) -> Result<Inequality> {
    require_nonempty(a)?;
    if !a.is_symmetric() {
        return Err(Error::Precondition("A must be symmetric".into()));
    }
    if k < 3 {
        return Err(Error::Precondition(format!("k must be at least 3, got {k}")));
    }
    let (sizes, _) = a.product_sizes_with_cap(k, DEFAULT_PRODUCT_CAP)?;
    let n = a.len() as f64;
    let lhs = sizes[k - 1] as f64 / n;
    let rhs = (sizes[2] as f64 / n).powi(k as i32 - 2);
    Ok(Inequality::at_most(lhs, rhs, 1e-12 * rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GowersCoverage {
    /// |B| is below |SL|/D^{1/3}; nothing is claimed.
    NotApplicable {
        size: usize,
        threshold: f64,
    },
    Verified {
        size: usize,
        threshold: f64,
        covered: bool,
    },
}

/// For |B| ≥ |SL_2(F_p)|/D^{1/3}, checks Π₃B = SL_2(F_p) directly.
pub fn gowers_coverage_check(group: &AffineGroup, b: &[usize]) -> Result<GowersCoverage> {
    if group.d() != 2 {
        return Err(Error::Precondition("coverage check is implemented for d = 2".into()));
    }
    let n = group.sl_order();
    let mut members = vec![false; n];
    for &x in b {
        if x >= n {
            return Err(Error::Precondition(format!("SL index {x} out of range")));
        }
        members[x] = true;
    }
    let list: Vec<usize> = (0..n).filter(|&i| members[i]).collect();
    let dim = min_irrep_dim(2, group.p())?.bound as f64;
    let threshold = n as f64 / dim.cbrt();
    if (list.len() as f64) < threshold {
        return Ok(GowersCoverage::NotApplicable { size: list.len(), threshold });
    }
    let mut cur = members.clone();
    for _ in 0..2 {
        let mut next = vec![false; n];
        for x in (0..n).filter(|&i| cur[i]) {
            for &y in &list {
                next[group.sl_mul(x, y)] = true;
            }
        }
        cur = next;
    }
    Ok(GowersCoverage::Verified { size: list.len(), threshold, covered: cur.iter().all(|&c| c) })
}
