//! Reproducible sampling of generating sets and lifts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{AffineGroup, ElementSet, GroupIndex};
use crate::measures::GroupMeasure;

/// Attempt limit for every rejection loop.
pub const MAX_ATTEMPTS: usize = 10_000;

/// Generator for one sample: seeded with `seed ^ sample_index`, with the prime as stream id.
pub fn sample_rng(seed: u64, sample_index: u64, p: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ sample_index);
    rng.set_stream(p as u64);
    rng
}

/// Draws `count` uniform elements of SL_d(F_p) until they generate it.
pub fn sample_sl_generators<R: Rng>(group: &AffineGroup, count: usize, rng: &mut R) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::Precondition("need at least one generator".into()));
    }
    for _ in 0..MAX_ATTEMPTS {
        let s: Vec<usize> = (0..count).map(|_| rng.gen_range(0..group.sl_order())).collect();
        if group.sl_closure_size(&s) == group.sl_order() {
            return Ok(s);
        }
    }
    Err(Error::Exhausted(format!("no generating {count}-tuple of SL after {MAX_ATTEMPTS} draws")))
}

/// Lifts each σ to (v, σ) with an independent uniform translation v.
pub fn lift<R: Rng>(group: &AffineGroup, sl: &[usize], rng: &mut R) -> Vec<GroupIndex> {
    sl.iter().map(|&m| group.join(rng.gen_range(0..group.vec_count()), m)).collect()
}

/// A sampled symmetric set S ∪ S⁻¹ together with the SL generators it lifts.
#[derive(Clone, Debug)]
pub struct SampledSet {
    pub sl_generators: Vec<usize>,
    pub lifts: Vec<GroupIndex>,
    pub set: ElementSet,
    /// Lifts redrawn because the set sat inside a coset of a proper subgroup.
    pub rejected_lifts: usize,
}

/// Samples a generating S′ ⊂ SL_d(F_p), lifts it with uniform translations, and symmetrizes.
/// Lifts whose symmetrization lies in a coset of a proper subgroup are redrawn.
pub fn sample_symmetric_set<R: Rng>(group: &Arc<AffineGroup>, count: usize, rng: &mut R) -> Result<SampledSet> {
    let sl_generators = sample_sl_generators(group, count, rng)?;
    for rejected_lifts in 0..MAX_ATTEMPTS {
        let lifts = lift(group, &sl_generators, rng);
        let set = ElementSet::new(Arc::clone(group), lifts.iter().copied()).symmetrize();
        if set.generates_whole_group(false)? {
            return Ok(SampledSet { sl_generators, lifts, set, rejected_lifts });
        }
    }
    Err(Error::Exhausted(format!("no lift avoided proper-subgroup cosets after {MAX_ATTEMPTS} draws")))
}

/// Uniform measure on a sampled symmetric set.
pub fn sample_symmetric_measure<R: Rng>(group: &Arc<AffineGroup>, count: usize, rng: &mut R) -> Result<GroupMeasure> {
    GroupMeasure::uniform_on(&sample_symmetric_set(group, count, rng)?.set)
}

/// Uniform symmetric measure on `count` random elements and their inverses, with no
/// generation requirement.
pub fn random_symmetric_measure<R: Rng>(group: &Arc<AffineGroup>, count: usize, rng: &mut R) -> Result<GroupMeasure> {
    let s: Vec<GroupIndex> = (0..count).map(|_| GroupIndex(rng.gen_range(0..group.order() as u32))).collect();
    GroupMeasure::uniform_on(&ElementSet::new(Arc::clone(group), s).symmetrize())
}
