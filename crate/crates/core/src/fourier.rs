//! Discrete Fourier analysis on F_p^d.
//!
//! Conventions: `f̂(ξ) = Σ_x e(⟨x,ξ⟩) f(x)` with `e(y) = exp(−2πi y/p)`. Spatial norms use
//! counting measure, dual norms (`L̂^q`) carry the weight `1/p^d` per point.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{AffineGroup, FpVector, GroupIndex, SlMatrix};
use crate::measures::{GroupMeasure, VectorMeasure};

/// Roots of unity and coordinate tables for one (p, d).
#[derive(Clone, Debug)]
pub struct Characters {
    p: u32,
    d: usize,
    n: usize,
    roots: Vec<Complex64>,
    coords: Vec<u32>,
}

impl Characters {
    pub fn new(p: u32, d: usize) -> Self {
        let n = (p as usize).pow(d as u32);
        let roots =
            (0..p).map(|k| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / p as f64)).collect();
        let mut coords = Vec::with_capacity(n * d);
        for i in 0..n {
            coords.extend_from_slice(FpVector::from_index(p, d, i).coords());
        }
        Characters { p, d, n, roots, coords }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// ⟨x, ξ⟩ mod p on radix-p indices.
    #[inline]
    pub fn dot(&self, x: usize, xi: usize) -> usize {
        let a = &self.coords[x * self.d..(x + 1) * self.d];
        let b = &self.coords[xi * self.d..(xi + 1) * self.d];
        let s: u64 = a.iter().zip(b).map(|(&u, &v)| u as u64 * v as u64).sum();
        (s % self.p as u64) as usize
    }

    /// e(⟨x, ξ⟩).
    #[inline]
    pub fn character(&self, x: usize, xi: usize) -> Complex64 {
        self.roots[self.dot(x, xi)]
    }

    pub fn root(&self, k: usize) -> Complex64 {
        self.roots[k % self.p as usize]
    }
}

/// A complex function on the dual group F̂_p^d, optionally punctured at the origin.
#[derive(Clone, Debug, PartialEq)]
pub struct DualFunction {
    p: u32,
    d: usize,
    values: Vec<Complex64>,
    origin_included: bool,
}

impl DualFunction {
    pub fn new(p: u32, d: usize, values: Vec<Complex64>) -> Result<Self> {
        let n = (p as usize).pow(d as u32);
        if values.len() != n {
            return Err(Error::Shape { expected: n, found: values.len() });
        }
        Ok(DualFunction { p, d, values, origin_included: true })
    }

    /// A function on X; the origin entry is forced to 0.
    pub fn on_punctured(p: u32, d: usize, mut values: Vec<Complex64>) -> Result<Self> {
        let n = (p as usize).pow(d as u32);
        if values.len() != n {
            return Err(Error::Shape { expected: n, found: values.len() });
        }
        values[0] = Complex64::new(0.0, 0.0);
        Ok(DualFunction { p, d, values, origin_included: false })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, xi: usize) -> Complex64 {
        self.values[xi]
    }

    pub fn origin_included(&self) -> bool {
        self.origin_included
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Restriction to X = F̂_p^d ∖ {0}, extended by 0.
    pub fn puncture(&self) -> DualFunction {
        let mut values = self.values.clone();
        values[0] = Complex64::new(0.0, 0.0);
        DualFunction { p: self.p, d: self.d, values, origin_included: false }
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// ‖φ‖_{L̂^q} = ((1/p^d) Σ_ξ |φ(ξ)|^q)^{1/q}.
    pub fn lhat_norm(&self, q: f64) -> f64 {
        lhat_norm(&self.moduli(), q)
    }

    pub fn to_doc(&self) -> DualFunctionDoc {
        DualFunctionDoc {
            p: self.p,
            d: self.d,
            origin_included: self.origin_included,
            values: self.values.iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_doc(doc: &DualFunctionDoc) -> Result<Self> {
        if doc.values.len() % 2 != 0 {
            return Err(Error::Shape { expected: doc.values.len() + 1, found: doc.values.len() });
        }
        let values: Vec<Complex64> = doc.values.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        if doc.origin_included {
            Self::new(doc.p, doc.d, values)
        } else {
            Self::on_punctured(doc.p, doc.d, values)
        }
    }
}

/// JSON shape of a [`DualFunction`]; `values` interleaves real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualFunctionDoc {
    pub p: u32,
    pub d: usize,
    pub origin_included: bool,
    pub values: Vec<f64>,
}

/// Normalized dual-side norm of a nonnegative function given by its values on all of F̂_p^d.
pub fn lhat_norm(moduli: &[f64], q: f64) -> f64 {
    assert!(q >= 1.0, "L^q norms need q >= 1, got {q}");
    if q.is_infinite() {
        return moduli.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    }
    let n = moduli.len() as f64;
    (moduli.iter().map(|x| x.abs().powf(q)).sum::<f64>() / n).powf(1.0 / q)
}

/// Reference transform by direct evaluation of the defining sum.
pub fn dft_complex(p: u32, d: usize, f: &[Complex64]) -> Result<DualFunction> {
    let ch = Characters::new(p, d);
    if f.len() != ch.len() {
        return Err(Error::Shape { expected: ch.len(), found: f.len() });
    }
    let values = (0..ch.len()).map(|xi| f.iter().enumerate().map(|(x, &fx)| ch.character(x, xi) * fx).sum()).collect();
    DualFunction::new(p, d, values)
}

pub fn dft_real(p: u32, d: usize, f: &[f64]) -> Result<DualFunction> {
    let c: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    dft_complex(p, d, &c)
}

pub fn dft(eta: &VectorMeasure) -> DualFunction {
    dft_real(eta.p(), eta.d(), eta.density()).expect("measure has p^d entries")
}

/// The same transform as [`dft_complex`], one coordinate axis at a time.
pub fn dft_separable(p: u32, d: usize, f: &[Complex64]) -> Result<DualFunction> {
    let ch = Characters::new(p, d);
    if f.len() != ch.len() {
        return Err(Error::Shape { expected: ch.len(), found: f.len() });
    }
    let p_us = p as usize;
    let mut cur = f.to_vec();
    let mut line = vec![Complex64::new(0.0, 0.0); p_us];
    for axis in 0..d {
        let stride = p_us.pow((d - 1 - axis) as u32);
        let block = stride * p_us;
        for start in (0..ch.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = (0..p_us).map(|x| ch.root(x * k) * cur[base + x * stride]).sum();
                }
                for (k, &v) in line.iter().enumerate() {
                    cur[base + k * stride] = v;
                }
            }
        }
    }
    DualFunction::new(p, d, cur)
}

/// f(x) = p^{−d} Σ_ξ e(−⟨x,ξ⟩) f̂(ξ).
pub fn inverse_dft(phi: &DualFunction) -> Vec<Complex64> {
    let ch = Characters::new(phi.p, phi.d);
    let n = ch.len() as f64;
    (0..ch.len())
        .map(|x| phi.values.iter().enumerate().map(|(xi, &v)| ch.character(x, xi).conj() * v).sum::<Complex64>() / n)
        .collect()
}

/// φ(f) = |f|² sign(f) = |f|·f pointwise.
pub fn mazur(f: &[Complex64]) -> Vec<Complex64> {
    f.iter().map(|z| z * z.norm()).collect()
}

pub fn mazur_real(f: &[f64]) -> Vec<f64> {
    f.iter().map(|x| x * x.abs()).collect()
}

/// L̂⁴ distance on X between |ψ|/‖ψ‖_{L̂⁴} and the unit constant (p^d/(p^d−1))^{1/4}.
pub fn nonconstancy_deviation(psi: &DualFunction) -> Result<f64> {
    let mut m = psi.moduli();
    m[0] = 0.0;
    let norm = lhat_norm(&m, 4.0);
    if norm == 0.0 {
        return Err(Error::ZeroInput);
    }
    let n = m.len() as f64;
    let c = (n / (n - 1.0)).powf(0.25);
    let s: f64 = m[1..].iter().map(|&x| (x / norm - c).powi(4)).sum();
    Ok((s / n).powf(0.25))
}

/// Which matrix acts on the dual variable in the one-step Fourier identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualConvention {
    /// ξ ↦ θᵀξ.
    Transpose,
    /// ξ ↦ θ⁻¹ξ.
    Inverse,
}

impl DualConvention {
    /// Index of M(θ) in the SL enumeration.
    pub fn matrix(self, group: &AffineGroup, sl_idx: usize) -> usize {
        match self {
            DualConvention::Transpose => group.sl_transpose(sl_idx),
            DualConvention::Inverse => group.sl_inv(sl_idx),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DualConvention::Transpose => "transpose",
            DualConvention::Inverse => "inverse",
        }
    }
}

fn pushforward_with(
    convention: DualConvention,
    mu: &GroupMeasure,
    psi: &DualFunction,
    ch: &Characters,
) -> DualFunction {
    let g = mu.group();
    let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
    for (h, mass) in mu.support() {
        let (v, m) = g.split(h);
        let mm = convention.matrix(g, m);
        for (xi, slot) in out.iter_mut().enumerate() {
            *slot += ch.character(v, xi) * psi.values[g.sl_apply(mm, xi)] * mass;
        }
    }
    if !psi.origin_included {
        out[0] = Complex64::new(0.0, 0.0);
    }
    DualFunction { p: psi.p, d: psi.d, values: out, origin_included: psi.origin_included }
}

fn max_abs_diff(a: &DualFunction, b: &DualFunction) -> f64 {
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Tests a convention against the direct-transform oracle on one (μ, η).
pub fn convention_consistent(convention: DualConvention, mu: &GroupMeasure, eta: &VectorMeasure) -> Result<bool> {
    let ch = Characters::new(eta.p(), eta.d());
    let lhs = dft(&mu.act_convolve(eta)?);
    let rhs = pushforward_with(convention, mu, &dft(eta), &ch);
    Ok(max_abs_diff(&lhs, &rhs) <= 1e-10)
}

/// The convention fixed once by the consistency oracle on an instance where the two
/// candidates differ (a unipotent element at p = 5, d = 2, and a point mass off the axes).
pub fn dual_convention() -> Result<DualConvention> {
    static CHOICE: OnceLock<std::result::Result<DualConvention, String>> = OnceLock::new();
    CHOICE
        .get_or_init(|| {
            let select = || -> Result<DualConvention> {
                let group = std::sync::Arc::new(AffineGroup::new(5, 2)?);
                let u = SlMatrix::new(5, 2, &[1, 1, 0, 1])?;
                let g = group.join(FpVector::new(5, &[2, 1]).index(), group.sl_index_of(&u)?);
                let mu = GroupMeasure::dirac(std::sync::Arc::clone(&group), g);
                let eta = VectorMeasure::from_weights(5, 2, (0..25).map(|i| 1.0 + (i * i % 7) as f64).collect())?;
                let ok: Vec<DualConvention> = [DualConvention::Transpose, DualConvention::Inverse]
                    .into_iter()
                    .filter(|&c| convention_consistent(c, &mu, &eta).unwrap_or(false))
                    .collect();
                match ok.as_slice() {
                    [c] => {
                        log::debug!("dual action convention: {}", c.name());
                        Ok(*c)
                    }
                    [] => Err(Error::Consistency("neither transpose nor inverse matches the direct transform".into())),
                    _ => Err(Error::Consistency("validation instance does not separate the conventions".into())),
                }
            };
            select().map_err(|e| e.to_string())
        })
        .clone()
        .map_err(Error::Consistency)
}

/// One walk step on the Fourier side: ψ'(ξ) = Σ_g μ(g) e(⟨v(g),ξ⟩) ψ(M(g)ξ), so that
/// `dft(μ.η) = dual_pushforward(μ, dft(η))`.
pub fn dual_pushforward(mu: &GroupMeasure, psi: &DualFunction) -> Result<DualFunction> {
    let g = mu.group();
    if psi.p != g.p() || psi.d != g.d() {
        return Err(Error::ModulusMismatch { p1: g.p(), d1: g.d(), p2: psi.p, d2: psi.d });
    }
    let convention = dual_convention()?;
    Ok(pushforward_with(convention, mu, psi, &Characters::new(psi.p, psi.d)))
}

/// Σ_g μ(g) |ψ(M(g)ξ)|: the modulus-level upper bound for one step.
pub fn dual_modulus_average(mu: &GroupMeasure, psi: &DualFunction) -> Result<Vec<f64>> {
    let g = mu.group();
    let convention = dual_convention()?;
    let m = psi.moduli();
    let mut out = vec![0.0; psi.len()];
    for (h, mass) in mu.support() {
        let mm = convention.matrix(g, g.linear_index(h));
        for (xi, slot) in out.iter_mut().enumerate() {
            *slot += mass * m[g.sl_apply(mm, xi)];
        }
    }
    Ok(out)
}

/// Index-level helper used by tests and diagnostics: ξ ↦ M(θ(g))ξ.
pub fn dual_action(group: &AffineGroup, g: GroupIndex, xi: usize) -> Result<usize> {
    let convention = dual_convention()?;
    Ok(group.sl_apply(convention.matrix(group, group.linear_index(g)), xi))
}
