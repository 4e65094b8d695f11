//! Distance measures and the coherence and entanglement quantifiers built
//! on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex::{
    minimize_trace_norm, solve_certified, AffineHermitian, ConvexError, ConvexProblem,
    HermitianParams, LinearEquality, LmiProblem,
};
use crate::linalg::{
    c, herm_eig, partial_transpose, re, sqrt_psd, trace_norm, ComplexMatrix, LinalgError,
    Subsystem, C64,
};
use crate::objects::{DensityMatrix, ObjectError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{measure} is not supported on {set}")]
    UnsupportedCombination { measure: String, set: String },
    #[error("free set {0} has no enumerable extreme points")]
    UnsupportedFreeSet(String),
    #[error(transparent)]
    Solver(#[from] ConvexError),
    #[error(transparent)]
    Object(#[from] ObjectError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMeasure {
    /// `½‖ρ − σ‖₁`
    TraceDistance,
    /// `√(1 − F²)` with `F = ‖√ρ √σ‖₁`
    FidelityDistance,
    /// `log₂ min{t : ρ ⪯ tσ}`
    MaxRelativeEntropy,
}

impl DistanceMeasure {
    pub const ALL: [DistanceMeasure; 3] = [
        DistanceMeasure::TraceDistance,
        DistanceMeasure::FidelityDistance,
        DistanceMeasure::MaxRelativeEntropy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMeasure::TraceDistance => "trace",
            DistanceMeasure::FidelityDistance => "fidelity",
            DistanceMeasure::MaxRelativeEntropy => "dmax",
        }
    }
}

impl fmt::Display for DistanceMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceMeasure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "trace" => Ok(DistanceMeasure::TraceDistance),
            "fidelity" => Ok(DistanceMeasure::FidelityDistance),
            "dmax" => Ok(DistanceMeasure::MaxRelativeEntropy),
            other => Err(format!("unknown measure `{other}` (expected trace, fidelity or dmax)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FreeStateSet {
    /// States diagonal in the reference basis of `C^d`.
    Incoherent(usize),
    /// PPT states on `C^{d_A} ⊗ C^{d_B}`, an outer approximation of the
    /// separable states. Values over this set are lower bounds.
    SeparablePpt(usize, usize),
}

impl FreeStateSet {
    pub fn dim(&self) -> usize {
        match *self {
            FreeStateSet::Incoherent(d) => d,
            FreeStateSet::SeparablePpt(a, b) => a * b,
        }
    }

    /// Values over a relaxation only bound the true quantity.
    pub fn is_relaxation(&self) -> bool {
        matches!(self, FreeStateSet::SeparablePpt(..))
    }

    /// Pure extreme points (the basis projectors for the incoherent set).
    pub fn extreme_points(&self) -> Result<Vec<DensityMatrix>, MeasureError> {
        match *self {
            FreeStateSet::Incoherent(d) => Ok((0..d).map(|i| DensityMatrix::basis(d, i)).collect()),
            FreeStateSet::SeparablePpt(..) => Err(MeasureError::UnsupportedFreeSet(self.to_string())),
        }
    }

    pub fn contains(&self, rho: &DensityMatrix, tol: f64) -> Result<bool, MeasureError> {
        check_dim(self.dim(), rho.dim())?;
        match *self {
            FreeStateSet::Incoherent(_) => Ok(rho.is_incoherent(tol)),
            FreeStateSet::SeparablePpt(a, b) => {
                let pt = partial_transpose(rho.matrix(), (a, b), Subsystem::B)?;
                Ok(herm_eig(&pt.hermitian_part())?.min() >= -tol)
            }
        }
    }
}

impl fmt::Display for FreeStateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeStateSet::Incoherent(d) => write!(f, "incoherent({d})"),
            FreeStateSet::SeparablePpt(a, b) => write!(f, "ppt({a}x{b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Solver,
}

/// A measure value with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureValue {
    pub value: f64,
    /// Certified bound on `|value − exact|` (0 for closed forms).
    pub gap: f64,
    /// Closest free state, when the measure has one.
    pub closest: Option<DensityMatrix>,
    /// Dual operator certifying the value from below.
    pub witness: Option<ComplexMatrix>,
    pub method: Method,
    /// The value bounds the intended quantity from below (relaxed free set).
    pub lower_bound_only: bool,
}

impl MeasureValue {
    fn closed_form(value: f64) -> Self {
        Self {
            value,
            gap: 0.0,
            closest: None,
            witness: None,
            method: Method::ClosedForm,
            lower_bound_only: false,
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<(), MeasureError> {
    if expected == found {
        Ok(())
    } else {
        Err(MeasureError::DimensionMismatch { expected, found })
    }
}

/// Root fidelity `‖√ρ √σ‖₁`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, MeasureError> {
    check_dim(rho.dim(), sigma.dim())?;
    let a = sqrt_psd(rho.matrix())?;
    let b = sqrt_psd(sigma.matrix())?;
    Ok(trace_norm(&a.matmul(&b))?.min(1.0))
}

/// `log₂ λ_max(σ^{-1/2} ρ σ^{-1/2})` on the support of `σ`; `+∞` when the
/// support of `ρ` leaves it.
pub fn max_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, MeasureError> {
    check_dim(rho.dim(), sigma.dim())?;
    let d = rho.dim();
    let eig = herm_eig(sigma.matrix())?;
    let cutoff = 1e-12 * eig.max().max(1e-300);
    let support: Vec<usize> = (0..d).filter(|&k| eig.values[k] > cutoff).collect();
    let kernel: Vec<usize> = (0..d).filter(|&k| eig.values[k] <= cutoff).collect();
    for &k in &kernel {
        let v = eig.vectors.col_vec(k);
        let leak: f64 = (0..d)
            .flat_map(|r| (0..d).map(move |s| (r, s)))
            .map(|(r, s)| v[r].conj() * rho.matrix()[(r, s)] * v[s])
            .sum::<C64>()
            .re;
        if leak > 1e-10 {
            return Ok(f64::INFINITY);
        }
    }
    let k = support.len();
    let m = ComplexMatrix::from_fn(k, k, |a, b| {
        let va = eig.vectors.col_vec(support[a]);
        let vb = eig.vectors.col_vec(support[b]);
        let mut acc = C64::new(0.0, 0.0);
        for r in 0..d {
            for s in 0..d {
                acc += va[r].conj() * rho.matrix()[(r, s)] * vb[s];
            }
        }
        acc / (eig.values[support[a]] * eig.values[support[b]]).sqrt()
    });
    let lmax = herm_eig(&m.hermitian_part())?.max();
    Ok(lmax.log2().max(0.0))
}

/// Distance between two states of equal dimension.
pub fn distance(
    measure: DistanceMeasure,
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<f64, MeasureError> {
    check_dim(rho.dim(), sigma.dim())?;
    match measure {
        DistanceMeasure::TraceDistance => Ok(0.5 * trace_norm(&(rho.matrix() - sigma.matrix()))?),
        DistanceMeasure::FidelityDistance => {
            let f = fidelity(rho, sigma)?;
            Ok((1.0 - f * f).max(0.0).sqrt())
        }
        DistanceMeasure::MaxRelativeEntropy => max_relative_entropy(rho, sigma),
    }
}

/// `Σ_{i≠j} |ρ_ij|`.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let d = m.rows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += m[(i, j)].norm();
            }
        }
    }
    s
}

fn dephased(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::diagonal(&rho.populations()).expect("populations of a state")
}

/// `½ max_{‖W‖∞≤1} [Tr(Wρ) − max_i W_ii]`, the dual value of the trace
/// distance from `ρ` to the incoherent set, evaluated at `w`.
pub fn diagonal_dual_bound(rho: &DensityMatrix, w: &ComplexMatrix) -> f64 {
    let tr = w.trace_product(rho.matrix()).re;
    let max_diag = w.real_diagonal().into_iter().fold(f64::NEG_INFINITY, f64::max);
    0.5 * (tr - max_diag)
}

/// Trace-norm coherence `C₁(ρ) = ½ min_{σ∈I} ‖ρ − σ‖₁`.
///
/// Qubits use the closed form `|ρ₀₁|` with the dephased state as minimizer;
/// larger dimensions go through the solver.
pub fn c_trace(rho: &DensityMatrix, tol: f64) -> Result<MeasureValue, MeasureError> {
    if rho.dim() == 2 {
        let z = rho.matrix()[(0, 1)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { re(1.0) };
        let w = ComplexMatrix::from_rows(&[vec![re(0.0), phase], vec![phase.conj(), re(0.0)]])
            .expect("2x2 witness");
        let value = z.norm();
        let bound = diagonal_dual_bound(rho, &w);
        let out = MeasureValue {
            value,
            gap: (value - bound).max(0.0),
            closest: Some(dephased(rho)),
            witness: Some(w),
            method: Method::ClosedForm,
            lower_bound_only: false,
        };
        #[cfg(feature = "cross-validate")]
        {
            let sdp = c_trace_sdp(rho, tol)?;
            assert!(
                (sdp.value - out.value).abs() <= tol + sdp.gap,
                "qubit closed form {} disagrees with solver {}",
                out.value,
                sdp.value
            );
        }
        #[cfg(not(feature = "cross-validate"))]
        let _ = tol;
        return Ok(out);
    }
    c_trace_sdp(rho, tol)
}

/// `C₁` through the solver in any dimension.
pub fn c_trace_sdp(rho: &DensityMatrix, tol: f64) -> Result<MeasureValue, MeasureError> {
    let d = rho.dim();
    if rho.is_incoherent(0.0) {
        let mut v = MeasureValue::closed_form(0.0);
        v.closest = Some(rho.clone());
        v.witness = Some(ComplexMatrix::zeros(d, d));
        return Ok(v);
    }
    let mut map = AffineHermitian::zero(d);
    let mut cone = AffineHermitian::zero(d);
    for i in 0..d {
        map.push(i, i, i, re(1.0));
        cone.push(i, i, i, re(1.0));
    }
    let mut problem = ConvexProblem::new(d, rho.matrix().clone(), map);
    problem.cone_constraints.push(cone);
    problem
        .equalities
        .push(LinearEquality::new((0..d).map(|i| (i, 1.0)).collect(), 1.0));
    problem.warm_start = Some(rho.populations());
    let sol = minimize_trace_norm(&problem, 2.0 * tol)?;

    let p: Vec<f64> = sol.minimizer.iter().map(|v| v.max(0.0)).collect();
    let s: f64 = p.iter().sum();
    let closest = DensityMatrix::diagonal(&p.iter().map(|v| v / s).collect::<Vec<_>>())?;
    let value = 0.5 * trace_norm(&(rho.matrix() - closest.matrix()))?;
    let independent = diagonal_dual_bound(rho, &sol.witness);
    let lower = independent.max(0.5 * sol.dual_bound);
    Ok(MeasureValue {
        value,
        gap: (value - lower).max(0.0),
        closest: Some(closest),
        witness: Some(sol.witness),
        method: Method::Solver,
        lower_bound_only: false,
    })
}

/// Robustness of coherence `min{Tr D − 1 : D diagonal, D ⪰ ρ}`.
pub fn c_robustness(rho: &DensityMatrix, tol: f64) -> Result<MeasureValue, MeasureError> {
    let d = rho.dim();
    if rho.is_incoherent(0.0) {
        return Ok(MeasureValue::closed_form(0.0));
    }
    let mut blk = AffineHermitian::constant(rho.matrix().scale(-1.0));
    for i in 0..d {
        blk.push(i, i, i, re(1.0));
    }
    let problem = LmiProblem {
        num_vars: d,
        objective: vec![1.0; d],
        objective_constant: -1.0,
        blocks: vec![blk],
        equalities: vec![],
    };
    let sol = solve_certified(&problem, tol)?;
    Ok(MeasureValue {
        value: sol.value,
        gap: sol.gap().max(0.0),
        closest: None,
        witness: Some(sol.multipliers[0].clone()),
        method: Method::Solver,
        lower_bound_only: false,
    })
}

/// `max Re Tr X` subject to `[[ρ, X], [X†, σ]] ⪰ 0` over free `σ`: the
/// largest fidelity between `ρ` and the free set.
fn max_fidelity_to_set(rho: &DensityMatrix, set: FreeStateSet, tol: f64) -> Result<(f64, f64), MeasureError> {
    let d = rho.dim();
    // Feasibility forces X = V Y with V the support of ρ, which keeps the
    // problem strictly feasible for rank-deficient ρ.
    let eig = herm_eig(rho.matrix())?;
    let cut = 1e-12 * eig.max();
    let support: Vec<usize> = (0..d).filter(|&k| eig.values[k] > cut).collect();
    let r = support.len();
    let v = ComplexMatrix::from_fn(d, r, |a, k| eig.vectors[(a, support[k])]);
    // variables: Y entries (re, im) for r·d entries, then σ parameters
    let nx = 2 * r * d;
    let mut blocks = Vec::new();
    let mut equalities = Vec::new();
    let mut big = AffineHermitian::constant(ComplexMatrix::from_fn(r + d, r + d, |a, b| {
        if a == b && a < r {
            re(eig.values[support[a]])
        } else {
            re(0.0)
        }
    }));
    let mut objective = vec![0.0; nx];
    for k in 0..r {
        for col in 0..d {
            let var = 2 * (k * d + col);
            big.push_hermitian_pair(var, k, r + col, re(1.0));
            big.push_hermitian_pair(var + 1, k, r + col, c(0.0, 1.0));
            // −Re Tr(V Y) picks up V[col][k]·Y[k][col]
            objective[var] = -v[(col, k)].re;
            objective[var + 1] = v[(col, k)].im;
        }
    }
    let num_vars = match set {
        FreeStateSet::Incoherent(_) => {
            for i in 0..d {
                big.push(nx + i, r + i, r + i, re(1.0));
            }
            equalities.push(LinearEquality::new((0..d).map(|i| (nx + i, 1.0)).collect(), 1.0));
            nx + d
        }
        FreeStateSet::SeparablePpt(a, b) => {
            let sp = HermitianParams::new(nx, d);
            sp.push_identity(&mut big, 1.0, r);
            equalities.push(sp.trace_equality(&ComplexMatrix::identity(d), 1.0));
            let mut pt = AffineHermitian::zero(d);
            // (|i a><j b|)^{T_B} = |i b><j a|
            sp.push_image(&mut pt, 1.0, |row, col| {
                let (i, ia) = (row / b, row % b);
                let (j, jb) = (col / b, col % b);
                vec![(i * b + jb, j * b + ia, re(1.0))]
            });
            debug_assert_eq!(a * b, d);
            blocks.push(pt);
            sp.end()
        }
    };
    objective.resize(num_vars, 0.0);
    blocks.insert(0, big);
    let problem = LmiProblem {
        num_vars,
        objective,
        objective_constant: 0.0,
        blocks,
        equalities,
    };
    let sol = solve_certified(&problem, tol)?;
    Ok(((-sol.value).clamp(0.0, 1.0), sol.gap().max(0.0)))
}

/// Trace-norm distance to the PPT states, `min_{σ∈PPT} ‖ρ − σ‖₁`.
///
/// PPT contains the separable states, so this is a lower bound on the
/// trace-norm entanglement `E₁` and is always flagged as such.
pub fn e1_ppt_bound(rho: &DensityMatrix, dims: (usize, usize), tol: f64) -> Result<MeasureValue, MeasureError> {
    let (a, b) = dims;
    let n = a * b;
    check_dim(n, rho.dim())?;
    let sp = HermitianParams::new(0, n);
    let mut map = AffineHermitian::zero(n);
    sp.push_identity(&mut map, 1.0, 0);
    let mut problem = ConvexProblem::new(sp.end(), rho.matrix().clone(), map.clone());
    problem.cone_constraints.push(map);
    let mut pt = AffineHermitian::zero(n);
    sp.push_image(&mut pt, 1.0, |r, col| {
        let (i, ia) = (r / b, r % b);
        let (j, jb) = (col / b, col % b);
        vec![(i * b + jb, j * b + ia, re(1.0))]
    });
    problem.cone_constraints.push(pt);
    problem
        .equalities
        .push(sp.trace_equality(&ComplexMatrix::identity(n), 1.0));
    let mut x0 = vec![0.0; sp.end()];
    sp.write_values(rho.matrix(), &mut x0);
    problem.warm_start = Some(x0);
    let sol = minimize_trace_norm(&problem, tol)?;
    let sigma = sp.matrix(&sol.minimizer);
    let closest = DensityMatrix::with_tolerance(sigma.hermitian_part(), 1e-7).ok();
    Ok(MeasureValue {
        value: sol.primal_value,
        gap: sol.gap.max(0.0),
        closest,
        witness: Some(sol.witness),
        method: Method::Solver,
        lower_bound_only: true,
    })
}

/// `ω_D(ρ) = min_{σ∈F} D(ρ, σ)`.
pub fn omega(
    measure: DistanceMeasure,
    set: FreeStateSet,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<MeasureValue, MeasureError> {
    check_dim(set.dim(), rho.dim())?;
    match (measure, set) {
        (DistanceMeasure::TraceDistance, FreeStateSet::Incoherent(_)) => c_trace(rho, tol),
        (DistanceMeasure::TraceDistance, FreeStateSet::SeparablePpt(a, b)) => {
            let mut v = e1_ppt_bound(rho, (a, b), 2.0 * tol)?;
            v.value *= 0.5;
            v.gap *= 0.5;
            Ok(v)
        }
        (DistanceMeasure::FidelityDistance, _) => {
            if set.contains(rho, 0.0)? && matches!(set, FreeStateSet::Incoherent(_)) {
                return Ok(MeasureValue::closed_form(0.0));
            }
            if matches!(set, FreeStateSet::Incoherent(_)) && rho.matrix().real_inner(rho.matrix()) >= 1.0 - 1e-12 {
                // pure: F² = max_σ <ψ|σ|ψ> = max_i ρ_ii
                let pops = rho.populations();
                let (i, top) = pops
                    .iter()
                    .copied()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
                let mut v = MeasureValue::closed_form((1.0 - top).max(0.0).sqrt());
                v.closest = Some(DensityMatrix::basis(rho.dim(), i));
                return Ok(v);
            }
            let (f, gap_f) = max_fidelity_to_set(rho, set, tol)?;
            let value = (1.0 - f * f).max(0.0).sqrt();
            // first-order propagation of the fidelity gap
            let gap = if value > 1e-6 { gap_f * f / value } else { gap_f.sqrt() };
            Ok(MeasureValue {
                value,
                gap,
                closest: None,
                witness: None,
                method: Method::Solver,
                lower_bound_only: set.is_relaxation(),
            })
        }
        (DistanceMeasure::MaxRelativeEntropy, FreeStateSet::Incoherent(_)) => {
            // min_σ min{t : ρ ⪯ tσ} = min{Tr D : D diagonal, D ⪰ ρ} = 1 + C_R
            let r = c_robustness(rho, tol)?;
            Ok(MeasureValue {
                value: (1.0 + r.value).log2(),
                gap: r.gap / std::f64::consts::LN_2,
                closest: None,
                witness: r.witness,
                method: r.method,
                lower_bound_only: false,
            })
        }
        (DistanceMeasure::MaxRelativeEntropy, FreeStateSet::SeparablePpt(..)) => {
            Err(MeasureError::UnsupportedCombination {
                measure: measure.to_string(),
                set: set.to_string(),
            })
        }
    }
}
