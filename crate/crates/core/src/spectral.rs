//! Averaging operators of a measure in several representations and their norms on the
//! orthogonal complement of the constants.

use std::ops::{AddAssign, Mul};
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bg::min_irrep_dim;
use crate::error::{Error, Result};
use crate::fourier::dual_convention;
use crate::group::AffineGroup;
use crate::measures::GroupMeasure;

/// Largest representation space accepted by [`WalkOperator`].
pub const DEFAULT_SPACE_CAP: usize = 5_000_000;

/// Largest space for which dense matrices are built.
/// Entry budget for precomputed point maps.
const TABLE_CAP: usize = 1 << 26;

pub const DENSE_CAP: usize = 5_000;

/// Where the walk acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// L²(G), [L(g)f](h) = f(g⁻¹h).
    Regular,
    /// L²(SL_d(F_p)), [L^θ(g)f](σ) = f(θ(g)⁻¹σ).
    Quotient,
    /// L²(F_p^d), [π(g)f](x) = f(g⁻¹.x).
    AffineAction,
    /// L²(X) with X = F̂_p^d ∖ {0}, [π(g)f](ξ) = f(M(g)ξ) for the validated dual matrix M.
    DualPunctured,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Regular => "regular",
            Representation::Quotient => "quotient",
            Representation::AffineAction => "affine",
            Representation::DualPunctured => "dual-punctured",
        }
    }
}

/// Stopping rule for [`WalkOperator::l0_norm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerIterationConfig {
    /// Stop once successive Rayleigh quotients differ by less than this.
    pub tol: f64,
    /// Bound on the geometric tail of the remaining Rayleigh-quotient increments.
    pub tail_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        PowerIterationConfig { tol: 1e-10, tail_tol: 1e-11, max_iterations: 100_000, seed: 0 }
    }
}

/// Result of a power iteration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    /// ‖L₀‖.
    pub norm: f64,
    pub iterations: usize,
    /// ‖A x − ρ x‖ for the final unit iterate x of A = L₀*L₀ and its Rayleigh quotient ρ.
    pub residual: f64,
}

/// The averaging operator of a measure in a chosen representation.
#[derive(Clone)]
pub struct WalkOperator {
    group: Arc<AffineGroup>,
    rep: Representation,
    dim: usize,
    /// (point-map id, weight); the id is a group index for the regular and affine
    /// representations and an SL index otherwise.
    atoms: Vec<(u32, f64)>,
}

impl std::fmt::Debug for WalkOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WalkOperator")
            .field("rep", &self.rep)
            .field("dim", &self.dim)
            .field("atoms", &self.atoms.len())
            .finish()
    }
}

impl WalkOperator {
    pub fn new(mu: &GroupMeasure, rep: Representation) -> Result<Self> {
        Self::with_cap(mu, rep, DEFAULT_SPACE_CAP)
    }

    pub fn with_cap(mu: &GroupMeasure, rep: Representation, cap: usize) -> Result<Self> {
        let group = Arc::clone(mu.group());
        let dim = match rep {
            Representation::Regular => group.order(),
            Representation::Quotient => group.sl_order(),
            Representation::AffineAction => group.vec_count(),
            Representation::DualPunctured => group.vec_count() - 1,
        };
        if dim > cap {
            return Err(Error::SpaceTooLarge { size: dim, cap });
        }
        if dim == 0 {
            return Err(Error::Precondition("representation space is empty".into()));
        }
        let atoms = match rep {
            Representation::Regular | Representation::AffineAction => {
                mu.support().into_iter().map(|(g, w)| (g.0, w)).collect()
            }
            Representation::Quotient => aggregate(mu.linear_marginal()),
            Representation::DualPunctured => {
                // π(g) scatters ξ to M(g)⁻¹ξ.
                let convention = dual_convention()?;
                let mut by_map = vec![0.0; group.sl_order()];
                for (m, w) in mu.linear_marginal().into_iter().enumerate() {
                    if w > 0.0 {
                        by_map[group.sl_inv(convention.matrix(&group, m))] += w;
                    }
                }
                aggregate(by_map)
            }
        };
        Ok(WalkOperator { group, rep, dim, atoms })
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    #[inline]
    fn point_map(&self, id: u32, x: usize) -> usize {
        let g = &self.group;
        match self.rep {
            Representation::Regular => g.mul(crate::group::GroupIndex(id), crate::group::GroupIndex(x as u32)).get(),
            Representation::Quotient => g.sl_mul(id as usize, x),
            Representation::AffineAction => g.act(crate::group::GroupIndex(id), x),
            Representation::DualPunctured => g.sl_apply(id as usize, x + 1) - 1,
        }
    }

    /// π(μ)f.
    pub fn apply<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        assert_eq!(f.len(), self.dim);
        let mut out = vec![T::default(); self.dim];
        for &(id, w) in &self.atoms {
            for (x, &fx) in f.iter().enumerate() {
                out[self.point_map(id, x)] += fx * w;
            }
        }
        out
    }

    /// π(μ)*f = π(μ̌)f.
    pub fn apply_adjoint<T>(&self, f: &[T]) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
    {
        assert_eq!(f.len(), self.dim);
        let mut out = vec![T::default(); self.dim];
        for &(id, w) in &self.atoms {
            for (x, slot) in out.iter_mut().enumerate() {
                *slot += f[self.point_map(id, x)] * w;
            }
        }
        out
    }

    /// π(g)f for a single atom id, as used by the L⁴ inequalities.
    pub fn apply_atom<T>(&self, atom: usize, f: &[T]) -> Vec<T>
    where
        T: Copy + Default,
    {
        let id = self.atoms[atom].0;
        let mut out = vec![T::default(); self.dim];
        for (x, &fx) in f.iter().enumerate() {
            out[self.point_map(id, x)] = fx;
        }
        out
    }

    pub fn atom_weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.1).collect()
    }

    /// ‖L₀‖ with the default stopping rule.
    pub fn l0_norm(&self, seed: u64) -> Result<NormEstimate> {
        self.l0_norm_with(&PowerIterationConfig { seed, ..PowerIterationConfig::default() })
    }

    /// ‖L₀‖ as the square root of the top eigenvalue of L₀(μ̌*μ) = L₀*L₀, by power
    /// iteration with the constant component projected out at every step.
    pub fn l0_norm_with(&self, cfg: &PowerIterationConfig) -> Result<NormEstimate> {
        if self.dim == 1 {
            return Ok(NormEstimate { norm: 0.0, iterations: 0, residual: 0.0 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out_constants(&mut x);
        normalize(&mut x);

        let tables = self.point_tables();
        let mut rho_prev = f64::NAN;
        let mut delta_prev = f64::NAN;
        let mut last_delta = f64::INFINITY;
        for it in 1..=cfg.max_iterations {
            // ρ = ‖P L x‖² rather than ⟨x, P L* P L x⟩: no cancellation near 0.
            let mut lx = self.apply_tabled(tables.as_deref(), &x);
            project_out_constants(&mut lx);
            let rho = dot(&lx, &lx);
            let mut y = self.apply_adjoint_tabled(tables.as_deref(), &lx);
            project_out_constants(&mut y);
            let ny = norm2(&y);
            if ny == 0.0 || rho == 0.0 {
                return Ok(NormEstimate { norm: 0.0, iterations: it, residual: 0.0 });
            }
            let delta = (rho - rho_prev).abs();
            let converged = if delta < cfg.tol {
                // Increments shrink geometrically; bound the remaining tail.
                let q = delta / delta_prev;
                delta <= 64.0 * f64::EPSILON * rho.max(f64::MIN_POSITIVE)
                    || (q.is_finite() && q < 1.0 && delta * q / (1.0 - q) < cfg.tail_tol)
            } else {
                false
            };
            if converged {
                let residual = y.iter().zip(&x).map(|(a, b)| (a - rho * b).powi(2)).sum::<f64>().sqrt();
                return Ok(NormEstimate { norm: rho.max(0.0).sqrt(), iterations: it, residual });
            }
            last_delta = delta;
            delta_prev = delta;
            rho_prev = rho;
            y.iter_mut().for_each(|v| *v /= ny);
            x = y;
        }
        Err(Error::NonConvergence { iterations: cfg.max_iterations, delta: last_delta })
    }

    /// Point maps of all atoms, one row per atom, when they fit in memory.
    fn point_tables(&self) -> Option<Vec<u32>> {
        if self.atoms.len().saturating_mul(self.dim) > TABLE_CAP {
            return None;
        }
        let mut t = Vec::with_capacity(self.atoms.len() * self.dim);
        for &(id, _) in &self.atoms {
            t.extend((0..self.dim).map(|x| self.point_map(id, x) as u32));
        }
        Some(t)
    }

    fn apply_tabled(&self, tables: Option<&[u32]>, f: &[f64]) -> Vec<f64> {
        let Some(t) = tables else { return self.apply(f) };
        let mut out = vec![0.0; self.dim];
        for (row, &(_, w)) in t.chunks_exact(self.dim).zip(&self.atoms) {
            for (&y, &fx) in row.iter().zip(f) {
                out[y as usize] += fx * w;
            }
        }
        out
    }

    fn apply_adjoint_tabled(&self, tables: Option<&[u32]>, f: &[f64]) -> Vec<f64> {
        let Some(t) = tables else { return self.apply_adjoint(f) };
        let mut out = vec![0.0; self.dim];
        for (row, &(_, w)) in t.chunks_exact(self.dim).zip(&self.atoms) {
            for (slot, &y) in out.iter_mut().zip(row) {
                *slot += f[y as usize] * w;
            }
        }
        out
    }

    /// Dense matrix of π(μ) in the standard basis.
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        if self.dim > DENSE_CAP {
            return Err(Error::SpaceTooLarge { size: self.dim, cap: DENSE_CAP });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(id, w) in &self.atoms {
            for x in 0..self.dim {
                m[(self.point_map(id, x), x)] += w;
            }
        }
        Ok(m)
    }
}

fn aggregate(weights: Vec<f64>) -> Vec<(u32, f64)> {
    weights.into_iter().enumerate().filter(|x| x.1 > 0.0).map(|(i, w)| (i as u32, w)).collect()
}

fn project_out_constants(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(x: &mut [f64]) {
    let n = norm2(x);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Walk gap, quotient gap and α for one measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub p: u32,
    pub d: usize,
    pub support_size: usize,
    pub walk_norm: f64,
    pub quotient_norm: f64,
    pub walk_gap: f64,
    pub quotient_gap: f64,
    pub alpha: f64,
    /// walk_gap / min(quotient_gap, 1 − α); absent when the denominator vanishes.
    pub ratio: Option<f64>,
    /// Iterations of the regular-representation power iteration.
    pub iterations: usize,
    pub residual: f64,
    pub seed: u64,
    /// Whether the support avoids every coset of a proper subgroup.
    pub coset_hypothesis: bool,
}

impl SpectralReport {
    pub const CSV_HEADER: [&'static str; 10] =
        ["p", "d", "|S|", "walk_gap", "quotient_gap", "alpha", "ratio", "iterations", "residual", "seed"];
}

/// Computes the ratio walk_gap / min(quotient_gap, 1 − α).
pub fn empirical_ratio(walk_gap: f64, quotient_gap: f64, alpha: f64) -> Option<f64> {
    let den = quotient_gap.min(1.0 - alpha);
    (den > 0.0).then(|| walk_gap / den)
}

pub fn spectral_report(mu: &GroupMeasure, seed: u64) -> Result<SpectralReport> {
    let coset_hypothesis = mu.support_set().generates_whole_group(false)?;
    if !coset_hypothesis {
        log::warn!("support lies in a coset of a proper subgroup; the walk gap is 0");
    }
    let walk = WalkOperator::new(mu, Representation::Regular)?.l0_norm(seed)?;
    let quotient = WalkOperator::new(mu, Representation::Quotient)?.l0_norm(seed)?;
    let alpha = mu.alpha();
    let walk_gap = (1.0 - walk.norm).clamp(0.0, 1.0);
    let quotient_gap = (1.0 - quotient.norm).clamp(0.0, 1.0);
    Ok(SpectralReport {
        p: mu.group().p(),
        d: mu.group().d(),
        support_size: mu.support_len(),
        walk_norm: walk.norm,
        quotient_norm: quotient.norm,
        walk_gap,
        quotient_gap,
        alpha,
        ratio: empirical_ratio(walk_gap, quotient_gap, alpha),
        iterations: walk.iterations,
        residual: walk.residual,
        seed,
        coset_hypothesis,
    })
}

/// One row of a mixing profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingPoint {
    pub l: usize,
    /// ‖μ^{*(l)} − 1/|G|‖_{L²}.
    pub distance: f64,
    /// e^{−l·walk_gap}.
    pub bound: f64,
    /// Whether the bound is large enough for double precision to certify the comparison.
    pub certifiable: bool,
    pub holds: bool,
}

/// Smallest bound value at which the mixing inequality is checked.
pub const MIXING_CERTIFY_FLOOR: f64 = 1e-8;

/// Distances of μ^{*(l)} from uniform for l = 0..=l_max against e^{−l·walk_gap}.
pub fn mixing_profile(mu: &GroupMeasure, l_max: usize, walk_gap: f64) -> Result<Vec<MixingPoint>> {
    if l_max < 1 {
        return Err(Error::Precondition("mixing profile needs l_max >= 1".into()));
    }
    let g = Arc::clone(mu.group());
    let u = 1.0 / g.order() as f64;
    let mut current = GroupMeasure::identity(Arc::clone(&g));
    let mut out = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        if l > 0 {
            current = mu.convolve(&current)?;
        }
        let distance = current.to_dense().iter().map(|&m| (m - u).powi(2)).sum::<f64>().sqrt();
        let bound = (-(l as f64) * walk_gap).exp();
        let certifiable = bound >= MIXING_CERTIFY_FLOOR;
        out.push(MixingPoint { l, distance, bound, certifiable, holds: !certifiable || distance <= bound + 1e-9 });
    }
    Ok(out)
}

/// A cluster of numerically equal eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityReport {
    pub clusters: Vec<EigenCluster>,
    pub required: usize,
    pub tol: f64,
    pub trivial_multiplicity: usize,
    /// Clusters away from 1 with multiplicity below `required`.
    pub violations: Vec<EigenCluster>,
    pub passed: bool,
}

/// Groups sorted values whose consecutive gaps are at most `tol`.
pub fn cluster_eigenvalues(values: &[f64], tol: f64) -> Vec<EigenCluster> {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut last = f64::NEG_INFINITY;
    for x in v {
        match out.last_mut() {
            Some((sum, count)) if x - last <= tol => {
                *sum += x;
                *count += 1;
            }
            _ => out.push((x, 1)),
        }
        last = x;
    }
    out.into_iter().map(|(s, c)| EigenCluster { value: s / c as f64, multiplicity: c }).collect()
}

/// Eigenvalue multiplicities of L(μ) on L²(G) against the minimal nontrivial irrep dimension.
pub fn multiplicity_check(mu: &GroupMeasure, tol: f64) -> Result<MultiplicityReport> {
    let defect = mu.symmetry_defect();
    if defect > 1e-12 {
        return Err(Error::NotSymmetric { defect });
    }
    let g = mu.group();
    let required = min_irrep_dim(g.d(), g.p())?.bound;
    let op = WalkOperator::with_cap(mu, Representation::Regular, DENSE_CAP)?;
    let m = op.dense_matrix()?;
    let eig = m.symmetric_eigenvalues();
    let clusters = cluster_eigenvalues(eig.as_slice(), tol);
    let trivial_multiplicity =
        clusters.iter().filter(|c| (c.value - 1.0).abs() <= tol).map(|c| c.multiplicity).sum::<usize>();
    let violations: Vec<EigenCluster> =
        clusters.iter().filter(|c| (c.value - 1.0).abs() > tol && c.multiplicity < required).copied().collect();
    let generates = mu.support_set().generates_whole_group(true)?;
    let passed = violations.is_empty() && (!generates || trivial_multiplicity == 1);
    Ok(MultiplicityReport { clusters, required, tol, trivial_multiplicity, violations, passed })
}
