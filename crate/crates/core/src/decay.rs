//! Decay of η_l = μ^{*(l)}.δ_{v₀} on F_p^d and the inequalities that drive it: the atom
//! case, Clarkson and Mazur bounds on the punctured dual X, the L⁴ contraction and the
//! construction of μ₀ = (μ̌*μ)^{l₀}.
//!
//! Functions on X are complex vectors of length p^d − 1 indexed by ξ − 1, as for
//! [`Representation::DualPunctured`]. Norms on X use the normalized counting measure
//! ν = (1/p^d)·#, so ν(X) = (p^d − 1)/p^d.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, lhat_norm, mazur, nonconstancy_deviation};
use crate::group::FpVector;
use crate::measures::{GroupMeasure, TransitionKernel, VectorMeasure};
use crate::spectral::{Representation, WalkOperator};

/// Atom threshold: η is atom-like when some η(x) exceeds this multiple of ‖η‖_{L²}.
pub const ATOM_RATIO: f64 = 40.0 / 41.0;
/// Slack for inequality checks.
pub const SLACK: f64 = 1e-10;
/// Seed used for internal norm estimates.
const NORM_SEED: u64 = 0;

/// e^{−2⁻⁵}.
pub fn atom_contraction_factor() -> f64 {
    (-1.0f64 / 32.0).exp()
}

/// 5p^{−d/4}.
pub fn decay_target(p: u32, d: usize) -> f64 {
    5.0 * (p as f64).powf(-(d as f64) / 4.0)
}

/// 4p^{−d/4}.
pub fn fourier_threshold(p: u32, d: usize) -> f64 {
    4.0 * (p as f64).powf(-(d as f64) / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One evaluated inequality `lhs ≤ rhs` or `lhs ≥ rhs`, up to `slack`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub slack: f64,
}

impl Inequality {
    pub fn at_most(lhs: f64, rhs: f64, slack: f64) -> Self {
        Inequality { lhs, rhs, relation: Relation::AtMost, slack }
    }

    pub fn at_least(lhs: f64, rhs: f64, slack: f64) -> Self {
        Inequality { lhs, rhs, relation: Relation::AtLeast, slack }
    }

    pub fn holds(&self) -> bool {
        match self.relation {
            Relation::AtMost => self.lhs <= self.rhs + self.slack,
            Relation::AtLeast => self.lhs >= self.rhs - self.slack,
        }
    }

    /// How far the inequality is from failing; negative when violated.
    pub fn margin(&self) -> f64 {
        match self.relation {
            Relation::AtMost => self.rhs - self.lhs,
            Relation::AtLeast => self.lhs - self.rhs,
        }
    }
}

// ---------------------------------------------------------------------------
// Functions on X

/// ((1/p^d) Σ_X |f|^q)^{1/q}; `total` is p^d.
pub fn x_norm(f: &[Complex64], q: f64, total: usize) -> f64 {
    assert!(q >= 1.0 && q.is_finite());
    (f.iter().map(|z| z.norm().powf(q)).sum::<f64>() / total as f64).powf(1.0 / q)
}

fn x_diff_norm(a: &[Complex64], b: &[Complex64], q: f64, total: usize) -> f64 {
    let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    x_norm(&d, q, total)
}

/// Rescales f to unit L⁴(X).
pub fn unit_l4(f: &[Complex64], total: usize) -> Result<Vec<Complex64>> {
    let n = x_norm(f, 4.0, total);
    if n == 0.0 {
        return Err(Error::ZeroInput);
    }
    Ok(f.iter().map(|z| z / n).collect())
}

fn x_action(op: &WalkOperator) -> Result<usize> {
    if op.representation() != Representation::DualPunctured {
        return Err(Error::Precondition(format!(
            "expected the action on X, got the {} representation",
            op.representation().name()
        )));
    }
    Ok(op.dim() + 1)
}

fn check_unit(f: &[Complex64], total: usize) -> Result<()> {
    let n = x_norm(f, 4.0, total);
    if (n - 1.0).abs() > SLACK {
        return Err(Error::Precondition(format!("expected a unit L4 function, norm is {n}")));
    }
    Ok(())
}

/// The two-sided Mazur bound for unit f₁, f₂: returns
/// (½‖f₁−f₂‖²₄ ≤ ‖φ(f₁)−φ(f₂)‖₂, ‖φ(f₁)−φ(f₂)‖₂ ≤ 2‖f₁−f₂‖₄).
pub fn mazur_bounds(f1: &[Complex64], f2: &[Complex64], total: usize) -> Result<(Inequality, Inequality)> {
    if f1.len() != f2.len() {
        return Err(Error::Shape { expected: f1.len(), found: f2.len() });
    }
    check_unit(f1, total)?;
    check_unit(f2, total)?;
    let d4 = x_diff_norm(f1, f2, 4.0, total);
    let d2 = x_diff_norm(&mazur(f1), &mazur(f2), 2.0, total);
    Ok((Inequality::at_least(d2, 0.5 * d4 * d4, SLACK), Inequality::at_most(d2, 2.0 * d4, SLACK)))
}

/// ‖π(μ)f‖₄ ≤ 1 − 2⁻⁵ Σ_g μ(g)‖π(g)f − f₀‖⁴₄ with f₀ = π(μ)f/‖π(μ)f‖₄.
pub fn clarkson_bound(op: &WalkOperator, f: &[Complex64]) -> Result<Inequality> {
    let total = x_action(op)?;
    check_unit(f, total)?;
    let pf = op.apply(f);
    let lhs = x_norm(&pf, 4.0, total);
    if lhs == 0.0 {
        return Err(Error::ZeroInput);
    }
    let f0: Vec<Complex64> = pf.iter().map(|z| z / lhs).collect();
    let spread: f64 = op
        .atom_weights()
        .iter()
        .enumerate()
        .map(|(a, &w)| w * x_diff_norm(&op.apply_atom(a, f), &f0, 4.0, total).powi(4))
        .sum();
    Ok(Inequality::at_most(lhs, 1.0 - spread / 32.0, SLACK))
}

/// min over |z| = ν(X)^{−1/4} of ‖f − z‖⁸₄.
pub fn circle_distance8(f: &[Complex64], total: usize) -> f64 {
    let r = (total as f64 / (total as f64 - 1.0)).powf(0.25);
    let at = |t: f64| {
        let z = Complex64::from_polar(r, t);
        let d: Vec<Complex64> = f.iter().map(|x| x - z).collect();
        x_norm(&d, 4.0, total).powi(8)
    };
    if f.iter().all(|z| z.im == 0.0 && z.re >= 0.0) {
        return at(0.0);
    }
    const GRID: usize = 512;
    let step = std::f64::consts::TAU / GRID as f64;
    let best = (0..GRID).map(|k| (k, at(k as f64 * step))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    // Golden-section search on the bracket around the best grid point.
    let (mut a, mut b) = ((best.0 as f64 - 1.0) * step, (best.0 as f64 + 1.0) * step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (at(c), at(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = at(d);
        }
    }
    best.1.min(at(0.5 * (a + b)))
}

/// ‖π(μ)f‖₄ ≤ 1 − 2⁻¹⁶ min_{|z|=ν(X)^{−1/4}} ‖f − z‖⁸₄, for an action on X whose
/// mean-zero L² norm is at most 1/2.
pub fn l4_contraction_bound(op: &WalkOperator, f: &[Complex64]) -> Result<Inequality> {
    let total = x_action(op)?;
    check_unit(f, total)?;
    let l0 = op.l0_norm(NORM_SEED)?.norm;
    if l0 > 0.5 {
        return Err(Error::Hypothesis(format!("mean-zero L2 norm of the action on X is {l0} > 1/2")));
    }
    let lhs = x_norm(&op.apply(f), 4.0, total);
    Ok(Inequality::at_most(lhs, 1.0 - circle_distance8(f, total) / 65536.0, SLACK))
}

/// 2⁷(1 − ‖π(μ)f‖₄) ≥ (1 − ‖π(μ)φ(f)‖₂)².
pub fn l4_l2_transfer(op: &WalkOperator, f: &[Complex64]) -> Result<Inequality> {
    let total = x_action(op)?;
    check_unit(f, total)?;
    let lhs = 128.0 * (1.0 - x_norm(&op.apply(f), 4.0, total));
    let rhs = (1.0 - x_norm(&op.apply(&mazur(f)), 2.0, total)).powi(2);
    Ok(Inequality::at_least(lhs, rhs, SLACK))
}

// ---------------------------------------------------------------------------
// Measures on F_p^d

/// Smallest x with η(x) > (40/41)‖η‖_{L²}.
pub fn atom_of(eta: &VectorMeasure) -> Option<usize> {
    let bound = ATOM_RATIO * eta.lq_norm(2.0);
    eta.density().iter().position(|&v| v > bound)
}

/// Σ_{x≠0}(η*η̌)(x)² ≥ (1/50)‖η*η̌‖²_{L²} when no atom exceeds (40/41)‖η‖_{L²}.
pub fn no_mass_origin_check(eta: &VectorMeasure) -> Result<Inequality> {
    let bound = ATOM_RATIO * eta.lq_norm(2.0);
    if let Some(x) = eta.density().iter().position(|&v| v > bound) {
        return Err(Error::Precondition(format!("η({x}) = {} exceeds (40/41)‖η‖ = {bound}", eta.get(x))));
    }
    let c = eta.convolve(&eta.reverse())?;
    let off: f64 = c.density()[1..].iter().map(|v| v * v).sum();
    let all = off + c.get(0).powi(2);
    Ok(Inequality::at_least(off, all / 50.0, 1e-12))
}

/// The two branches of the non-constancy statement for one η.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonconstancyCheck {
    pub l4_norm: f64,
    pub threshold: f64,
    /// None when ψ vanishes on X.
    pub deviation: Option<f64>,
    /// ‖ψ‖_{L̂⁴} ≥ 4p^{−d/4}, i.e. the deviation branch is the one being tested.
    pub nontrivial: bool,
    pub holds: bool,
}

/// For η with no heavy atom: deviation ≥ 1/16 or ‖ψ‖_{L̂⁴} < 4p^{−d/4}.
pub fn nonconstancy_check(eta: &VectorMeasure) -> Result<NonconstancyCheck> {
    if let Some(x) = atom_of(eta) {
        return Err(Error::Precondition(format!("η has an atom at index {x}")));
    }
    let psi = dft(eta).puncture();
    let l4_norm = psi.lhat_norm(4.0);
    let threshold = fourier_threshold(eta.p(), eta.d());
    let deviation = match nonconstancy_deviation(&psi) {
        Ok(v) => Some(v),
        Err(Error::ZeroInput) => None,
        Err(e) => return Err(e),
    };
    let nontrivial = l4_norm >= threshold;
    let holds = !nontrivial || deviation.is_some_and(|v| v >= 1.0 / 16.0 - SLACK);
    Ok(NonconstancyCheck { l4_norm, threshold, deviation, nontrivial, holds })
}

/// ‖μ.η‖_{L²} < e^{−2⁻⁵}‖η‖_{L²} in the atom case, with the intermediate bound
/// ‖μ.η‖ ≤ ¾η(x₀) + √(‖η‖² − η(x₀)²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomContraction {
    pub atom: usize,
    pub contraction: Inequality,
    pub intermediate: Inequality,
}

pub fn atom_case_contraction(mu: &GroupMeasure, eta: &VectorMeasure) -> Result<AtomContraction> {
    let hyp = check_decay_hypotheses(mu)?;
    if !hyp.ok() {
        return Err(Error::Hypothesis(hyp.describe()));
    }
    let norm = eta.lq_norm(2.0);
    let atom = eta
        .density()
        .iter()
        .position(|&v| v >= ATOM_RATIO * norm)
        .ok_or_else(|| Error::Precondition("η has no atom of weight ≥ (40/41)‖η‖".into()))?;
    let lhs = mu.act_convolve(eta)?.lq_norm(2.0);
    let a = eta.get(atom);
    let bound = 0.75 * a + (norm * norm - a * a).max(0.0).sqrt();
    Ok(AtomContraction {
        atom,
        contraction: Inequality::at_most(lhs, atom_contraction_factor() * norm, 0.0),
        intermediate: Inequality::at_most(lhs, bound, 1e-12),
    })
}

// ---------------------------------------------------------------------------
// Hypotheses and the decay run

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayHypotheses {
    /// max_x ‖μ.δ_x‖_{L²}.
    pub max_point_l2: f64,
    pub point_ok: bool,
    /// ‖L₀‖ of the walk on SL_d(F_p).
    pub quotient_norm: f64,
    pub quotient_ok: bool,
    pub symmetry_defect: f64,
    pub symmetric_ok: bool,
}

impl DecayHypotheses {
    pub fn ok(&self) -> bool {
        self.point_ok && self.quotient_ok && self.symmetric_ok
    }

    fn describe(&self) -> String {
        format!(
            "max ‖μ.δ_x‖ = {} (≤ 3/4: {}), quotient norm = {} (≤ 1/2: {}), symmetry defect = {} ({})",
            self.max_point_l2,
            self.point_ok,
            self.quotient_norm,
            self.quotient_ok,
            self.symmetry_defect,
            self.symmetric_ok
        )
    }
}

pub fn check_decay_hypotheses(mu: &GroupMeasure) -> Result<DecayHypotheses> {
    let max_point_l2 = mu.max_point_l2();
    let quotient_norm = WalkOperator::new(mu, Representation::Quotient)?.l0_norm(NORM_SEED)?.norm;
    let symmetry_defect = mu.symmetry_defect();
    Ok(DecayHypotheses {
        max_point_l2,
        point_ok: max_point_l2 <= 0.75,
        quotient_norm,
        quotient_ok: quotient_norm <= 0.5,
        symmetry_defect,
        symmetric_ok: symmetry_defect <= 1e-12,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    Atom,
    Fourier,
}

impl CaseTag {
    pub fn name(self) -> &'static str {
        match self {
            CaseTag::Atom => "atom",
            CaseTag::Fourier => "fourier",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayStepRecord {
    pub l: usize,
    pub l2_norm: f64,
    /// ‖ψ_l‖_{L̂⁴} with ψ_l the restriction of η̂_l to X.
    pub l4_fourier_norm: f64,
    pub l2_fourier_norm: f64,
    pub case_tag: CaseTag,
    pub atom_location: Option<Vec<u32>>,
    /// None when ψ_l vanishes.
    pub deviation: Option<f64>,
    pub total_mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub p: u32,
    pub d: usize,
    pub v0: Vec<u32>,
    pub target: f64,
    pub hypotheses: DecayHypotheses,
    pub hypotheses_ok: bool,
    pub stop_l: Option<usize>,
    pub steps: Vec<DecayStepRecord>,
}

impl DecayReport {
    pub const CSV_HEADER: [&'static str; 6] = ["l", "l2_norm", "l4_fourier_norm", "case_tag", "deviation", "atom_x"];

    /// Every per-step invariant that fails, as readable messages.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = (self.p as f64).powi(self.d as i32);
        let floor = n.powf(-0.5);
        let threshold = fourier_threshold(self.p, self.d);
        let factor = atom_contraction_factor();
        for (i, s) in self.steps.iter().enumerate() {
            if (s.total_mass - 1.0).abs() > 1e-10 {
                out.push(format!("l={}: mass {}", s.l, s.total_mass));
            }
            if s.l2_norm < floor - 1e-12 {
                out.push(format!("l={}: ‖η‖ = {} below p^(-d/2)", s.l, s.l2_norm));
            }
            let plancherel = (1.0 / n + s.l2_fourier_norm.powi(2)).sqrt();
            if (plancherel - s.l2_norm).abs() > 1e-10 * s.l2_norm.max(1.0) {
                out.push(format!("l={}: Plancherel {} vs {}", s.l, plancherel, s.l2_norm));
            }
            if s.l2_norm > floor + s.l2_fourier_norm + 1e-12 {
                out.push(format!("l={}: ‖η‖ exceeds p^(-d/2) + ‖ψ‖₂", s.l));
            }
            if s.l2_fourier_norm > s.l4_fourier_norm * ((n - 1.0) / n).powf(0.25) + 1e-12 {
                out.push(format!("l={}: ‖ψ‖₂ exceeds the Hölder bound", s.l));
            }
            if let Some(next) = self.steps.get(i + 1) {
                if next.l4_fourier_norm > s.l4_fourier_norm + SLACK {
                    out.push(format!("l={}: ‖ψ‖₄ increased to {}", s.l, next.l4_fourier_norm));
                }
                if self.hypotheses_ok && s.case_tag == CaseTag::Atom && next.l2_norm >= factor * s.l2_norm + SLACK {
                    out.push(format!("l={}: atom step contracted only to {}", s.l, next.l2_norm / s.l2_norm));
                }
            }
            if self.hypotheses_ok
                && s.case_tag == CaseTag::Fourier
                && s.l4_fourier_norm >= threshold
                && !s.deviation.is_some_and(|v| v >= 1.0 / 16.0 - SLACK)
            {
                out.push(format!("l={}: deviation {:?} below 1/16", s.l, s.deviation));
            }
        }
        out
    }
}

fn step_record(l: usize, eta: &VectorMeasure) -> DecayStepRecord {
    let psi = dft(eta).puncture();
    let atom = atom_of(eta);
    DecayStepRecord {
        l,
        l2_norm: eta.lq_norm(2.0),
        l4_fourier_norm: psi.lhat_norm(4.0),
        l2_fourier_norm: lhat_norm(&psi.moduli(), 2.0),
        case_tag: if atom.is_some() { CaseTag::Atom } else { CaseTag::Fourier },
        atom_location: atom.map(|x| FpVector::from_index(eta.p(), eta.d(), x).coords().to_vec()),
        deviation: nonconstancy_deviation(&psi).ok(),
        total_mass: eta.total_mass(),
    }
}

/// Runs the walk from δ_{v₀} until ‖η_l‖_{L²} ≤ 5p^{−d/4} for some l ≥ 1, or `l_cap` steps.
pub fn decay_run(mu: &GroupMeasure, v0: &FpVector, l_cap: usize) -> Result<DecayReport> {
    let g = mu.group();
    decay_run_with_target(mu, v0, l_cap, decay_target(g.p(), g.d()))
}

/// As [`decay_run`] with an explicit L² target.
pub fn decay_run_with_target(mu: &GroupMeasure, v0: &FpVector, l_cap: usize, target: f64) -> Result<DecayReport> {
    let g = mu.group();
    let start = g.vec_index_of(v0)?;
    let hypotheses = check_decay_hypotheses(mu)?;
    let kernel: TransitionKernel = mu.kernel();
    let mut eta = VectorMeasure::dirac(g.p(), g.d(), start);
    let mut steps = vec![step_record(0, &eta)];
    let mut stop_l = None;
    for l in 1..=l_cap {
        eta = VectorMeasure::new(g.p(), g.d(), kernel.apply(eta.density()))?;
        let rec = step_record(l, &eta);
        let done = rec.l2_norm <= target;
        steps.push(rec);
        if done {
            stop_l = Some(l);
            break;
        }
    }
    if stop_l.is_none() {
        log::warn!("decay run reached l_cap = {l_cap} above target {target}");
    }
    Ok(DecayReport {
        p: g.p(),
        d: g.d(),
        v0: v0.coords().to_vec(),
        target,
        hypotheses_ok: hypotheses.ok(),
        hypotheses,
        stop_l,
        steps,
    })
}

// ---------------------------------------------------------------------------
// μ₀ and the α recursion

/// l₀ = ⌈max{3/(1−α), log 2/(2 − 2‖L₀^θ(μ)‖)}⌉.
pub fn mu0_order(alpha: f64, quotient_norm: f64) -> Result<usize> {
    if alpha >= 1.0 {
        return Err(Error::Hypothesis("α = 1: some step is deterministic on a point".into()));
    }
    if quotient_norm >= 1.0 {
        return Err(Error::Hypothesis("the quotient walk has no spectral gap".into()));
    }
    let a = 3.0 / (1.0 - alpha);
    let b = std::f64::consts::LN_2 / (2.0 - 2.0 * quotient_norm);
    Ok(a.max(b).ceil() as usize)
}

#[derive(Clone, Debug)]
pub struct Mu0 {
    pub mu0: GroupMeasure,
    pub l0: usize,
    pub alpha: f64,
    pub quotient_norm: f64,
    /// Conclusions verified on μ₀.
    pub hypotheses: DecayHypotheses,
}

/// μ₀ = (μ̌*μ)^{*l₀}, verified to have quotient norm ≤ 1/2 and ‖μ₀.δ_x‖_{L²} ≤ 3/4.
pub fn mu0_construct(mu: &GroupMeasure) -> Result<Mu0> {
    let alpha = mu.alpha();
    let quotient_norm = WalkOperator::new(mu, Representation::Quotient)?.l0_norm(NORM_SEED)?.norm;
    let l0 = mu0_order(alpha, quotient_norm)?;
    let mu0 = mu.reverse().convolve(mu)?.power(l0)?;
    let hypotheses = check_decay_hypotheses(&mu0)?;
    if !hypotheses.point_ok || !hypotheses.quotient_ok {
        return Err(Error::Verification(format!("μ₀ with l₀ = {l0}: {}", hypotheses.describe())));
    }
    Ok(Mu0 { mu0, l0, alpha, quotient_norm, hypotheses })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaTrace {
    /// α of μ itself.
    pub alpha: f64,
    /// alphas[l−1] = α_l = max entry of the l-th power of the kernel of μ̌*μ.
    pub alphas: Vec<f64>,
    /// Steps l where α_{l+1} > α₁α_l + 1/4.
    pub recursion_violations: Vec<usize>,
    pub non_increasing: bool,
}

impl AlphaTrace {
    pub fn at(&self, l: usize) -> Option<f64> {
        l.checked_sub(1).and_then(|i| self.alphas.get(i).copied())
    }

    /// c₀ = 1/(4(1 − α₁)).
    pub fn c0(&self) -> f64 {
        0.25 / (1.0 - self.alphas[0])
    }
}

pub fn alpha_recursion_trace(mu: &GroupMeasure, l_max: usize) -> Result<AlphaTrace> {
    if l_max == 0 {
        return Err(Error::Precondition("l_max must be positive".into()));
    }
    let alpha = mu.alpha();
    if alpha >= 1.0 {
        return Err(Error::Hypothesis("α = 1".into()));
    }
    let k1 = mu.reverse().convolve(mu)?.kernel();
    let mut kl = k1.clone();
    let mut alphas = vec![k1.max_entry()];
    for _ in 1..l_max {
        kl = k1.compose(&kl);
        alphas.push(kl.max_entry());
    }
    let a1 = alphas[0];
    let recursion_violations =
        (0..alphas.len() - 1).filter(|&i| alphas[i + 1] > a1 * alphas[i] + 0.25 + 1e-12).map(|i| i + 1).collect();
    let non_increasing = alphas.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    Ok(AlphaTrace { alpha, alphas, recursion_violations, non_increasing })
}
