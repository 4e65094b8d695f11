//! Resource generating and increasing power of channels.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{c, unitarity_defect, ComplexMatrix, C64};
use crate::measures::{omega, DistanceMeasure, FreeStateSet, MeasureError};
use crate::objects::{is_mio, DensityMatrix, ObjectError, QuantumChannel};
use crate::random::{random_state_vector, Rng};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Object(#[from] ObjectError),
    #[error("matrix is not a 2x2 unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// `Ω_D(N) = max_{ρ free} ω_D(N(ρ))` with the evidence behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    pub generating: f64,
    /// Best value of `ω(N(ρ)) − ω(ρ)` known; at least the value at the
    /// maximizing free state.
    pub increasing_lower_bound: f64,
    pub maximizing_free_state: DensityMatrix,
    pub argmax: usize,
    /// `ω_D(N(|i><i|))` for every basis state.
    pub per_basis: Vec<f64>,
    pub measure: DistanceMeasure,
    /// Largest certificate gap among the inner solves.
    pub certificate_gap: f64,
}

/// Maximizes `ω_D(N(|i><i|))` over the pure free states.
///
/// For the incoherent set this is exact: `ω_D ∘ N` is convex (trace and
/// fidelity distance) or quasi-convex (max-relative entropy) on the simplex
/// of diagonal states, so its maximum sits at a vertex.
pub fn generating_power(
    channel: &QuantumChannel,
    measure: DistanceMeasure,
    set: FreeStateSet,
    tol: f64,
) -> Result<PowerReport, PowerError> {
    if set.dim() != channel.dim_in() {
        return Err(MeasureError::DimensionMismatch {
            expected: channel.dim_in(),
            found: set.dim(),
        }
        .into());
    }
    let out_set = match set {
        FreeStateSet::Incoherent(_) => FreeStateSet::Incoherent(channel.dim_out()),
        FreeStateSet::SeparablePpt(..) => return Err(MeasureError::UnsupportedFreeSet(set.to_string()).into()),
    };
    let extremes = set.extreme_points()?;
    let mut per_basis = Vec::with_capacity(extremes.len());
    let mut gap = 0.0f64;
    for rho in &extremes {
        let v = omega(measure, out_set, &channel.apply(rho)?, tol)?;
        gap = gap.max(v.gap);
        per_basis.push(v.value);
    }
    let (argmax, generating) = per_basis
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(PowerReport {
        generating,
        increasing_lower_bound: generating,
        maximizing_free_state: extremes[argmax].clone(),
        argmax,
        per_basis,
        measure,
        certificate_gap: gap,
    })
}

/// Trace-distance generating power `Ω₁` over the incoherent states.
pub fn omega_1(channel: &QuantumChannel, tol: f64) -> Result<PowerReport, PowerError> {
    generating_power(
        channel,
        DistanceMeasure::TraceDistance,
        FreeStateSet::Incoherent(channel.dim_in()),
        tol,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    /// Haar-random pure starting points.
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Also start from every basis state.
    pub basis_starts: bool,
}

impl Default for SearchSettings {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 500,
            seed: 0,
            basis_starts: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Best `ω(N(ρ)) − ω(ρ)` found; a lower bound on `Ω̃_D(N)`.
    pub value: f64,
    pub state: DensityMatrix,
    pub evaluations: usize,
}

fn unpack(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| c(p[0], p[1])).collect()
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// Multistart projected-gradient ascent of `ω(N(ψ)) − ω(ψ)` over pure
/// states, with finite-difference gradients and step halving.
pub fn increasing_power_search(
    channel: &QuantumChannel,
    measure: DistanceMeasure,
    settings: &SearchSettings,
    tol: f64,
) -> Result<SearchResult, PowerError> {
    let d = channel.dim_in();
    let in_set = FreeStateSet::Incoherent(d);
    let out_set = FreeStateSet::Incoherent(channel.dim_out());
    let mut evaluations = 0usize;
    let mut objective = |x: &[f64]| -> Result<f64, PowerError> {
        evaluations += 1;
        let rho = DensityMatrix::pure(&unpack(x));
        let out = omega(measure, out_set, &channel.apply(&rho)?, tol)?.value;
        let inp = omega(measure, in_set, &rho, tol)?.value;
        Ok(out - inp)
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    if settings.basis_starts {
        for i in 0..d {
            let mut x = vec![0.0; 2 * d];
            x[2 * i] = 1.0;
            starts.push(x);
        }
    }
    let mut rng = Rng::new(settings.seed);
    for _ in 0..settings.restarts {
        starts.push(random_state_vector(&mut rng, d).iter().flat_map(|z| [z.re, z.im]).collect());
    }

    if starts.is_empty() {
        return Err(PowerError::Precondition("search needs at least one starting point".into()));
    }
    let mut best = (f64::NEG_INFINITY, starts[0].clone());
    let h = 1e-6;
    for start in starts {
        let mut x = start;
        let mut fx = objective(&x)?;
        let mut step = 0.25;
        for _ in 0..settings.iterations {
            let mut g = vec![0.0; 2 * d];
            for k in 0..2 * d {
                let mut xp = x.clone();
                xp[k] += h;
                normalize(&mut xp);
                let mut xm = x.clone();
                xm[k] -= h;
                normalize(&mut xm);
                g[k] = (objective(&xp)? - objective(&xm)?) / (2.0 * h);
            }
            let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            g.iter_mut().zip(&x).for_each(|(gi, xi)| *gi -= radial * xi);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn < 1e-12 {
                break;
            }
            loop {
                let mut cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + step * b / gn).collect();
                normalize(&mut cand);
                let fc = objective(&cand)?;
                if fc > fx {
                    x = cand;
                    fx = fc;
                    step = (step * 1.5).min(0.5);
                    break;
                }
                step *= 0.5;
                if step < 1e-10 {
                    break;
                }
            }
            if step < 1e-10 {
                break;
            }
        }
        if fx > best.0 {
            best = (fx, x);
        }
    }
    Ok(SearchResult {
        value: best.0,
        state: DensityMatrix::pure(&unpack(&best.1)),
        evaluations,
    })
}

/// `max_i |U_i1 U_i2|` for a qubit unitary.
pub fn qubit_unitary_power(u: &ComplexMatrix) -> Result<f64, PowerError> {
    if u.shape() != (2, 2) {
        return Err(PowerError::NotUnitary { defect: f64::INFINITY });
    }
    let defect = unitarity_defect(u);
    if defect > 1e-10 {
        return Err(PowerError::NotUnitary { defect });
    }
    Ok((0..2)
        .map(|i| (u[(i, 0)] * u[(i, 1)]).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    /// `Ω ≥ 0`, and `Ω = 0` on free channels.
    I,
    /// Monotone under composition with free channels.
    II,
    /// Convex under mixing.
    III,
    /// `Ω(N₁⊗N₂) ≥ max(Ω(N₁), Ω(N₂))`.
    IV,
    /// `Ω(N₁⊗N₂) ≤ Ω(N₁) + Ω(N₂)`.
    V,
}

impl Clause {
    pub const ALL: [Clause; 5] = [Clause::I, Clause::II, Clause::III, Clause::IV, Clause::V];

    pub fn label(self) -> &'static str {
        match self {
            Clause::I => "i",
            Clause::II => "ii",
            Clause::III => "iii",
            Clause::IV => "iv",
            Clause::V => "v",
        }
    }
}

/// One inequality `lhs ≤ rhs` (within slack) of the property suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClauseCheck {
    pub clause: Clause,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; positive values beyond the slack are violations.
    pub violation: f64,
    pub passed: bool,
    /// Which inputs produced the worst case.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<ClauseCheck>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.violation).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn clause(&self, clause: Clause) -> impl Iterator<Item = &ClauseCheck> {
        self.checks.iter().filter(move |c| c.clause == clause)
    }
}

/// Checks every clause of the structural properties of `Ω₁` on the given
/// channels. `m1`, `m2` must be maximally incoherent; the tensor clauses use
/// the incoherent basis of the product space.
pub fn property_suite(
    n1: &QuantumChannel,
    n2: &QuantumChannel,
    m1: &QuantumChannel,
    m2: &QuantumChannel,
    p: f64,
    slack: f64,
    tol: f64,
) -> Result<PropertyReport, PowerError> {
    let d = n1.dim_in();
    if [n1, n2, m1, m2]
        .iter()
        .any(|ch| ch.dim_in() != d || ch.dim_out() != d)
    {
        return Err(PowerError::Precondition("all channels must act on the same dimension".into()));
    }
    for (name, m) in [("M1", m1), ("M2", m2)] {
        if !is_mio(m, 1e-8) {
            return Err(PowerError::Precondition(format!("{name} is not maximally incoherent")));
        }
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(PowerError::Precondition("mixing weight outside [0, 1]".into()));
    }
    let w = |r: &PowerReport| r.generating;
    let o_n1 = omega_1(n1, tol)?;
    let o_n2 = omega_1(n2, tol)?;
    let o_m1 = omega_1(m1, tol)?;
    let o_m2 = omega_1(m2, tol)?;
    let mut checks = Vec::new();
    let mut push = |clause, lhs: f64, rhs: f64, witness: String| {
        let violation = lhs - rhs;
        checks.push(ClauseCheck {
            clause,
            lhs,
            rhs,
            violation,
            passed: violation <= slack,
            witness,
        });
    };

    // (i) as 0 ≤ Ω(N) and Ω(M) ≤ 0
    for (name, r) in [("N1", &o_n1), ("N2", &o_n2)] {
        push(Clause::I, 0.0, w(r), format!("{name}: Ω = {}", w(r)));
    }
    for (name, r) in [("M1", &o_m1), ("M2", &o_m2)] {
        push(Clause::I, w(r), 0.0, format!("{name} at basis state {}", r.argmax));
    }
    // (ii)
    for (name, n, r) in [("N1", n1, &o_n1), ("N2", n2, &o_n2)] {
        let sandwich = m1.compose(&n.compose(m2)?)?;
        let s = omega_1(&sandwich, tol)?;
        push(Clause::II, w(&s), w(r), format!("M1∘{name}∘M2 at basis state {}", s.argmax));
    }
    // (iii)
    let mix = QuantumChannel::mixture(&[(p, n1), (1.0 - p, n2)])?;
    let o_mix = omega_1(&mix, tol)?;
    push(
        Clause::III,
        w(&o_mix),
        p * w(&o_n1) + (1.0 - p) * w(&o_n2),
        format!("p = {p}, mixture maximized at basis state {}", o_mix.argmax),
    );
    // (iv), (v)
    let tensor = n1.tensor(n2);
    let o_t = omega_1(&tensor, tol)?;
    push(
        Clause::IV,
        w(&o_n1).max(w(&o_n2)),
        w(&o_t),
        format!("N1⊗N2 maximized at product basis state {}", o_t.argmax),
    );
    push(
        Clause::V,
        w(&o_t),
        w(&o_n1) + w(&o_n2),
        format!("N1⊗N2 maximized at product basis state {}", o_t.argmax),
    );
    Ok(PropertyReport { checks })
}
