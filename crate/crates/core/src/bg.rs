//! Diagnostics for the flattening-plus-multiplicity argument: L² flattening ratios, the
//! trace identity, minimal representation dimensions and the resulting norm bounds.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::field::check_prime;
use crate::measures::GroupMeasure;

/// Lower bound on the dimension of a nontrivial representation of F_p^d ⋊ SL_d(F_p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrrepDimBound {
    pub d: usize,
    pub p: u32,
    pub bound: usize,
}

/// ⌊(p−1)/2⌋ (at least 1) for d = 2, p^d − 1 otherwise.
pub fn min_irrep_dim(d: usize, p: u32) -> Result<IrrepDimBound> {
    check_prime(p)?;
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let bound = if d == 2 { ((p as usize - 1) / 2).max(1) } else { (p as usize).pow(d as u32) - 1 };
    Ok(IrrepDimBound { d, p, bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatteningStep {
    pub k: usize,
    /// Convolution power 2^k·l₁.
    pub steps: usize,
    /// a_k = ‖μ^{*(2^k l₁)}‖₂².
    pub a_k: f64,
    /// a_k / a_{k−1}; absent for k = 0.
    pub ratio: Option<f64>,
    /// ratio ≤ 1/K², i.e. the L² norm dropped by at least K; absent for k = 0.
    pub flattened: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatteningTrace {
    pub l1: usize,
    #[serde(rename = "K")]
    pub k_param: f64,
    pub group_order: usize,
    pub steps: Vec<FlatteningStep>,
}

impl FlatteningTrace {
    pub const CSV_HEADER: [&'static str; 5] = ["k", "steps", "a_k", "ratio", "flattened_flag"];

    pub fn a(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.a_k).collect()
    }
}

/// The sequence a_k for k = 0..=k_max, obtained by repeated self-convolution of μ^{*(l₁)}.
pub fn flattening_trace(mu: &GroupMeasure, l1: usize, k_max: usize, big_k: f64) -> Result<FlatteningTrace> {
    if !(big_k > 2.0) {
        return Err(Error::Precondition(format!("flattening threshold K must exceed 2, got {big_k}")));
    }
    if l1 == 0 {
        return Err(Error::Precondition("l1 must be positive".into()));
    }
    let mut nu = mu.power(l1)?;
    let mut steps = Vec::with_capacity(k_max + 1);
    let mut prev: Option<f64> = None;
    for k in 0..=k_max {
        if k > 0 {
            nu = nu.convolve(&nu)?;
        }
        let a_k = nu.lq_norm(2.0).powi(2);
        let ratio = prev.map(|a| a_k / a);
        steps.push(FlatteningStep {
            k,
            steps: l1 << k,
            a_k,
            ratio,
            flattened: ratio.map(|r| r <= 1.0 / (big_k * big_k)),
        });
        prev = Some(a_k);
    }
    Ok(FlatteningTrace { l1, k_param: big_k, group_order: mu.group().order(), steps })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceIdentity {
    /// |G|·(μ̌₁*μ₁)(1).
    pub via_convolution: f64,
    /// |G|·‖μ₁‖₂².
    pub via_norm: f64,
    pub relative_error: f64,
}

/// Evaluates the trace of f ↦ μ₁*μ₁*f in two independent ways.
pub fn trace_identity_check(mu1: &GroupMeasure) -> Result<TraceIdentity> {
    let defect = mu1.symmetry_defect();
    if defect > 1e-12 {
        return Err(Error::NotSymmetric { defect });
    }
    let g = Arc::clone(mu1.group());
    let n = g.order() as f64;
    let via_convolution = n * mu1.reverse().convolve(mu1)?.mass(g.identity());
    let via_norm = n * mu1.lq_norm(2.0).powi(2);
    let relative_error = (via_convolution - via_norm).abs() / via_norm.abs().max(f64::MIN_POSITIVE);
    Ok(TraceIdentity { via_convolution, via_norm, relative_error })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    /// (2·dim^{2/3}/dim)^{1/(2^{L+1} l₁)}.
    pub bound: f64,
    /// The bound is ≥ 1 and says nothing.
    pub vacuous: bool,
    /// Whether a_L ≤ 2·dim^{2/3}/|G|, the regime in which the bound applies.
    pub a_l_consistent: bool,
    pub exponent: f64,
}

/// The norm bound for an irreducible representation of dimension `dim_pi` once a_L has
/// reached 2·dim^{2/3}/|G|.
pub fn bg_gap_bound(dim_pi: usize, l1: usize, big_l: u32, a_l: f64, group_order: usize) -> Result<GapBound> {
    if dim_pi == 0 || l1 == 0 {
        return Err(Error::Precondition("dim_pi and l1 must be positive".into()));
    }
    let dim = dim_pi as f64;
    let exponent = 2f64.powi(big_l as i32 + 1) * l1 as f64;
    let base = 2.0 * dim.powf(2.0 / 3.0) / dim;
    let bound = base.powf(1.0 / exponent);
    Ok(GapBound {
        bound,
        vacuous: bound >= 1.0,
        a_l_consistent: a_l <= 2.0 * dim.powf(2.0 / 3.0) / group_order as f64,
        exponent,
    })
}

/// Trace form of the same bound with no regime assumption:
/// ‖π(μ)‖^{2^{L+1} l₁} ≤ |G|·a_L / dim π for symmetric μ.
pub fn trace_norm_bound(dim_pi: usize, a_l: f64, group_order: usize) -> f64 {
    group_order as f64 * a_l / dim_pi as f64
}
