//! Experiment configuration files.

use std::path::Path;
use std::sync::Arc;

use affgap::group::ElementDoc;
use affgap::sampling::{sample_rng, sample_symmetric_set};
use affgap::{AffineGroup, ElementSet, GroupMeasure};
use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

/// Which measure the experiment runs on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Uniform on the listed generators (and their inverses when `symmetrize`).
    #[default]
    Generators,
    Uniform,
    Identity,
    /// A symmetric lift of `generator_count` random generators of SL_d(F_p), drawn from the seed.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub p: u32,
    pub d: usize,
    #[serde(default)]
    pub measure: MeasureKind,
    #[serde(default)]
    pub generators: Vec<ElementDoc>,
    #[serde(default = "yes")]
    pub symmetrize: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_generator_count")]
    pub generator_count: usize,
    /// Primes swept by `scan`; defaults to `[p]`.
    #[serde(default)]
    pub primes: Vec<u32>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_l_cap")]
    pub l_cap: usize,
    /// L² target for `decay`; defaults to 5p^{−d/4}.
    #[serde(default)]
    pub target: Option<f64>,
    /// Starting point of `decay`; defaults to the origin.
    #[serde(default)]
    pub v0: Option<Vec<i64>>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(rename = "K", default = "default_big_k")]
    pub big_k: f64,
    #[serde(default = "one")]
    pub l1: usize,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Product power j with A = Π_j S for `growth`; by default the smallest covering one.
    #[serde(default)]
    pub growth_power: Option<usize>,
}

fn yes() -> bool {
    true
}
fn one() -> usize {
    1
}
fn default_generator_count() -> usize {
    2
}
fn default_samples() -> usize {
    10
}
fn default_l_cap() -> usize {
    200
}
fn default_k_max() -> usize {
    6
}
fn default_big_k() -> f64 {
    2.5
}
fn default_l_max() -> usize {
    30
}
fn default_tol() -> f64 {
    1e-6
}

impl ExperimentConfig {
    /// A config with every optional field at its default.
    pub fn new(p: u32, d: usize, measure: MeasureKind) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            p,
            d,
            measure,
            generators: Vec::new(),
            symmetrize: true,
            seed: 0,
            generator_count: default_generator_count(),
            primes: Vec::new(),
            samples: default_samples(),
            l_cap: default_l_cap(),
            target: None,
            v0: None,
            k_max: default_k_max(),
            big_k: default_big_k(),
            l1: 1,
            l_max: default_l_max(),
            tol: default_tol(),
            growth_power: None,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version);
        }
        affgap::group::field::check_prime(self.p)?;
        for &q in &self.primes {
            affgap::group::field::check_prime(q)?;
        }
        if self.d < 2 {
            bail!("d must be at least 2, got {}", self.d);
        }
        if self.measure == MeasureKind::Generators && self.generators.is_empty() {
            bail!("measure \"generators\" needs a nonempty generators list");
        }
        for (i, g) in self.generators.iter().enumerate() {
            g.to_element(self.p, self.d).with_context(|| format!("generator {i}"))?;
        }
        if self.samples == 0 {
            bail!("samples must be at least 1");
        }
        Ok(())
    }

    pub fn group(&self) -> anyhow::Result<Arc<AffineGroup>> {
        Ok(AffineGroup::shared(self.p, self.d)?)
    }

    /// The generating set of a `generators` or `sampled` config.
    pub fn generator_set(&self, group: &Arc<AffineGroup>) -> anyhow::Result<ElementSet> {
        let set = match self.measure {
            MeasureKind::Generators => {
                let elems =
                    self.generators.iter().map(|g| g.to_element(self.p, self.d)).collect::<affgap::Result<Vec<_>>>()?;
                ElementSet::from_elements(Arc::clone(group), &elems)?
            }
            MeasureKind::Sampled => {
                let mut rng = sample_rng(self.seed, 0, self.p);
                sample_symmetric_set(group, self.generator_count, &mut rng)?.set
            }
            MeasureKind::Uniform => ElementSet::whole_group(Arc::clone(group)),
            MeasureKind::Identity => ElementSet::new(Arc::clone(group), [group.identity()]),
        };
        Ok(if self.symmetrize { set.symmetrize() } else { set })
    }

    pub fn measure(&self, group: &Arc<AffineGroup>) -> anyhow::Result<GroupMeasure> {
        Ok(match self.measure {
            MeasureKind::Uniform => GroupMeasure::uniform(Arc::clone(group)),
            MeasureKind::Identity => GroupMeasure::identity(Arc::clone(group)),
            _ => GroupMeasure::uniform_on(&self.generator_set(group)?)?,
        })
    }

    pub fn scan_primes(&self) -> Vec<u32> {
        if self.primes.is_empty() {
            vec![self.p]
        } else {
            self.primes.clone()
        }
    }
}
