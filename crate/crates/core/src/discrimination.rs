//! Channel discrimination games against classes of free channels.

use serde::Serialize;
use thiserror::Error;

use crate::convex::{minimize_trace_norm, AffineHermitian, ConvexError, ConvexProblem, HermitianParams, LinearEquality};
use crate::linalg::{herm_eig, re, trace_norm, ComplexMatrix, LinalgError, C64};
use crate::measures::{c_trace, MeasureError};
use crate::objects::{
    is_io_kraus, is_sio_kraus, ClassTag, DensityMatrix, FreeChannelClass, ObjectError, QuantumChannel,
    MEMBERSHIP_TOL,
};
use crate::power::{omega_1, PowerError, SearchSettings};
use crate::random::{random_state_vector, Rng};

/// Agreement required between the two routes to the free-probe value.
pub const ROUTE_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscriminationError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("routes disagree: generating power gives {generating}, probe maximization gives {probes}")]
    AssertionMismatch { generating: f64, probes: f64 },
    #[error(transparent)]
    Solver(#[from] ConvexError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Power(#[from] PowerError),
    #[error(transparent)]
    Object(#[from] ObjectError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Channel classes that appear in the games. Only MIO and DIO have an
/// exact semidefinite description; SIO and IO are handled through
/// Kraus-certified members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GameClass {
    Sio,
    Io,
    Dio,
    Mio,
}

impl GameClass {
    pub const ALL: [GameClass; 4] = [GameClass::Sio, GameClass::Io, GameClass::Dio, GameClass::Mio];

    pub fn convex(self) -> Option<ClassTag> {
        match self {
            GameClass::Mio => Some(ClassTag::Mio),
            GameClass::Dio => Some(ClassTag::Dio),
            _ => None,
        }
    }
}

impl From<ClassTag> for GameClass {
    fn from(t: ClassTag) -> Self {
        match t {
            ClassTag::Mio => GameClass::Mio,
            ClassTag::Dio => GameClass::Dio,
        }
    }
}

impl std::fmt::Display for GameClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GameClass::Sio => "sio",
            GameClass::Io => "io",
            GameClass::Dio => "dio",
            GameClass::Mio => "mio",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationResult {
    pub p_succ: f64,
    /// POVM element guessing the first channel; the other is `I − Π`.
    pub optimal_povm: ComplexMatrix,
    pub worst_free_channel: Option<QuantumChannel>,
    pub probe: DensityMatrix,
    pub certificate_gap: f64,
}

/// `½ (Tr Π A + Tr (I − Π) B)`: the average success of guessing `A` on
/// outcome `Π`.
pub fn average_success(pi: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let comp = &ComplexMatrix::identity(pi.rows()) - pi;
    0.5 * (pi.trace_product(a).re + comp.trace_product(b).re)
}

/// Projector onto the strictly positive eigenspace of a Hermitian matrix.
fn positive_projector(x: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let cut = 1e-12 * x.max_abs().max(1.0);
    Ok(herm_eig(x)?.reconstruct_with(|l| if l > cut { 1.0 } else { 0.0 }))
}

fn check_dims(n: &QuantumChannel, m: &QuantumChannel, rho: &DensityMatrix) -> Result<(), DiscriminationError> {
    for (expected, found) in [
        (n.dim_in(), m.dim_in()),
        (n.dim_out(), m.dim_out()),
        (n.dim_in(), rho.dim()),
    ] {
        if expected != found {
            return Err(DiscriminationError::DimensionMismatch { expected, found });
        }
    }
    Ok(())
}

/// Optimal single-shot discrimination of `N` and `M` with probe `ρ`.
pub fn helstrom(n: &QuantumChannel, m: &QuantumChannel, rho: &DensityMatrix) -> Result<DiscriminationResult, DiscriminationError> {
    check_dims(n, m, rho)?;
    let a = n.apply(rho)?;
    let b = m.apply(rho)?;
    let diff = a.matrix() - b.matrix();
    Ok(DiscriminationResult {
        p_succ: 0.5 + 0.25 * trace_norm(&diff)?,
        optimal_povm: positive_projector(&diff)?,
        worst_free_channel: Some(m.clone()),
        probe: rho.clone(),
        certificate_gap: 0.0,
    })
}

/// Choi parameterization of channels in a class: `J ⪰ 0` plus the class
/// equalities, with `M(ρ) = Σ ρ_ij J_ij` as the affine map.
struct ClassGame {
    d: usize,
    params: HermitianParams,
    class: FreeChannelClass,
}

impl ClassGame {
    fn new(tag: ClassTag, d: usize) -> Self {
        Self {
            d,
            params: HermitianParams::new(0, d * d),
            class: FreeChannelClass::new(tag, d),
        }
    }

    fn problem(&self, target: ComplexMatrix, rho: &DensityMatrix, diagonal_only: bool) -> ConvexProblem {
        let d = self.d;
        let r = rho.matrix();
        let mut map = AffineHermitian::zero(d);
        self.params.push_image(&mut map, 1.0, |row, col| {
            let (i, a) = (row / d, row % d);
            let (j, b) = (col / d, col % d);
            if diagonal_only && a != b {
                return vec![];
            }
            let w = r[(i, j)];
            if w.norm() == 0.0 {
                vec![]
            } else {
                vec![(a, b, w)]
            }
        });
        let mut cone = AffineHermitian::zero(d * d);
        self.params.push_identity(&mut cone, 1.0, 0);
        let mut p = ConvexProblem::new(self.params.end(), target, map);
        p.cone_constraints.push(cone);
        p.equalities = self
            .class
            .constraints
            .iter()
            .map(|c| self.params.trace_equality(&c.g, c.target))
            .collect::<Vec<LinearEquality>>();
        p
    }

    fn warm_start(&self, choi: &ComplexMatrix) -> Vec<f64> {
        let mut x = vec![0.0; self.params.end()];
        self.params.write_values(choi, &mut x);
        x
    }

    /// Turns a solver iterate into a member of the class: symmetrize, then
    /// mix in the completely depolarizing channel to clear small negative
    /// eigenvalues.
    fn channel(&self, x: &[f64]) -> Result<QuantumChannel, DiscriminationError> {
        let d = self.d;
        let j = self.params.matrix(x).hermitian_part();
        let lmin = herm_eig(&j)?.min();
        let j = if lmin < 0.0 {
            let eps = -lmin / (1.0 / d as f64 - lmin);
            &j.scale(1.0 - eps) + &ComplexMatrix::identity(d * d).scale(eps / d as f64)
        } else {
            j
        };
        Ok(QuantumChannel::from_choi_with_tolerance(d, d, j, MEMBERSHIP_TOL)?)
    }
}

fn require_square(n: &QuantumChannel, rho: &DensityMatrix) -> Result<usize, DiscriminationError> {
    let d = n.dim_in();
    if n.dim_out() != d {
        return Err(DiscriminationError::DimensionMismatch {
            expected: d,
            found: n.dim_out(),
        });
    }
    if rho.dim() != d {
        return Err(DiscriminationError::DimensionMismatch { expected: d, found: rho.dim() });
    }
    Ok(d)
}

/// `min_{M ∈ class} p_succ(N, M, ρ)`, with the minimizing channel.
pub fn p_succ_vs_class(
    n: &QuantumChannel,
    class: ClassTag,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<DiscriminationResult, DiscriminationError> {
    let d = require_square(n, rho)?;
    let game = ClassGame::new(class, d);
    let target = n.apply(rho)?;
    let mut problem = game.problem(target.matrix().clone(), rho, false);
    if game.class.contains(n, MEMBERSHIP_TOL) {
        problem.warm_start = Some(game.warm_start(n.choi()));
    }
    let sol = minimize_trace_norm(&problem, tol)?;
    let worst = game.channel(&sol.minimizer)?;
    let mut result = helstrom(n, &worst, rho)?;
    // ‖N(ρ) − M(ρ)‖₁ = 4 (p − ½)
    result.certificate_gap = (result.p_succ - 0.5 - 0.25 * sol.dual_bound).max(0.0);
    Ok(result)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeProbeResult {
    pub value: f64,
    /// `½ + ½ Ω₁(N)`.
    pub route_generating: f64,
    /// Largest class game value over basis-state probes.
    pub route_probes: f64,
    pub best_probe: DensityMatrix,
    pub per_probe: Vec<f64>,
    pub certificate_gap: f64,
}

/// Best success probability against the class using incoherent probes,
/// computed through the generating power and through explicit basis-probe
/// games; the two must agree within [`ROUTE_TOL`].
pub fn p_succ_free_probes(n: &QuantumChannel, class: ClassTag, tol: f64) -> Result<FreeProbeResult, DiscriminationError> {
    let d = n.dim_in();
    let power = omega_1(n, tol)?;
    let route_generating = 0.5 + 0.5 * power.generating;
    let mut per_probe = Vec::with_capacity(d);
    let mut gap = power.certificate_gap;
    for i in 0..d {
        let r = p_succ_vs_class(n, class, &DensityMatrix::basis(d, i), tol)?;
        gap = gap.max(r.certificate_gap);
        per_probe.push(r.p_succ);
    }
    let (best, route_probes) = per_probe
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    if (route_generating - route_probes).abs() > ROUTE_TOL {
        return Err(DiscriminationError::AssertionMismatch {
            generating: route_generating,
            probes: route_probes,
        });
    }
    Ok(FreeProbeResult {
        value: route_probes,
        route_generating,
        route_probes,
        best_probe: DensityMatrix::basis(d, best),
        per_probe,
        certificate_gap: gap,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageReport {
    pub p_succ_probe: f64,
    pub p_succ_free: f64,
    /// `p_succ_probe − p_succ_free`.
    pub advantage: f64,
    /// `½ C₁(ρ)`.
    pub bound: f64,
    pub advantage_ok: bool,
    /// `p_succ_probe` against `½ + ½ Ω₁(N) + ½ C₁(ρ)`.
    pub total_bound: f64,
    pub total_ok: bool,
    pub certificate_gap: f64,
}

impl AdvantageReport {
    pub fn passed(&self) -> bool {
        self.advantage_ok && self.total_ok
    }

    /// Largest excess over either bound.
    pub fn max_violation(&self) -> f64 {
        (self.advantage - self.bound).max(self.p_succ_probe - self.total_bound)
    }
}

/// Slack used by the advantage bound checks.
pub const BOUND_SLACK: f64 = 1e-6;

/// Advantage of probe `ρ` over the best incoherent probe, checked against
/// `½ C₁(ρ)` and the absolute ceiling `½ + ½ Ω₁(N) + ½ C₁(ρ)`.
pub fn advantage(n: &QuantumChannel, class: ClassTag, rho: &DensityMatrix, tol: f64) -> Result<AdvantageReport, DiscriminationError> {
    let probe = p_succ_vs_class(n, class, rho, tol)?;
    let free = p_succ_free_probes(n, class, tol)?;
    let c1 = c_trace(rho, tol)?;
    let advantage = probe.p_succ - free.value;
    let bound = 0.5 * c1.value;
    let total_bound = free.route_generating + 0.5 * c1.value;
    Ok(AdvantageReport {
        p_succ_probe: probe.p_succ,
        p_succ_free: free.value,
        advantage,
        bound,
        advantage_ok: advantage <= bound + BOUND_SLACK,
        total_bound,
        total_ok: probe.p_succ <= total_bound + BOUND_SLACK,
        certificate_gap: probe.certificate_gap.max(free.certificate_gap).max(c1.gap),
    })
}

/// Success probability when only diagonal measurements are allowed.
pub fn p_succ_incoherent_povm(
    n: &QuantumChannel,
    m: &QuantumChannel,
    rho: &DensityMatrix,
) -> Result<DiscriminationResult, DiscriminationError> {
    check_dims(n, m, rho)?;
    let diff: Vec<f64> = n
        .apply(rho)?
        .populations()
        .iter()
        .zip(m.apply(rho)?.populations())
        .map(|(a, b)| a - b)
        .collect();
    let pi = ComplexMatrix::from_real_diagonal(&diff.iter().map(|&v| if v > 1e-15 { 1.0 } else { 0.0 }).collect::<Vec<_>>());
    Ok(DiscriminationResult {
        p_succ: 0.5 + 0.25 * diff.iter().map(|v| v.abs()).sum::<f64>(),
        optimal_povm: pi,
        worst_free_channel: Some(m.clone()),
        probe: rho.clone(),
        certificate_gap: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    /// Replacement channel onto `Δ(N(ρ))`.
    pub witness: QuantumChannel,
    pub witness_in_class: bool,
    pub witness_sio_kraus: bool,
    pub witness_value: f64,
    /// Class minimum of the diagonal-only game (MIO and DIO only).
    pub solver_value: Option<f64>,
    pub solver_gap: f64,
    pub passed: bool,
}

/// Shows that diagonal measurements cannot tell `N` from the class: the
/// replacement channel onto `Δ(N(ρ))` is strictly incoherent and matches
/// every diagonal statistic.
pub fn verify_incoherent_povm_collapse(
    n: &QuantumChannel,
    class: GameClass,
    rho: &DensityMatrix,
    tol: f64,
) -> Result<CollapseReport, DiscriminationError> {
    let d = require_square(n, rho)?;
    let target = DensityMatrix::diagonal(&n.apply(rho)?.populations())?;
    let witness = QuantumChannel::replacement(&target, d);
    let kraus = witness.kraus_operators();
    let witness_sio_kraus = is_sio_kraus(&kraus, MEMBERSHIP_TOL);
    let witness_in_class = match class.convex() {
        Some(tag) => FreeChannelClass::new(tag, d).contains(&witness, MEMBERSHIP_TOL),
        None => witness_sio_kraus && is_io_kraus(&kraus, MEMBERSHIP_TOL),
    };
    let witness_value = p_succ_incoherent_povm(n, &witness, rho)?.p_succ;

    let (solver_value, solver_gap) = match class.convex() {
        Some(tag) => {
            let game = ClassGame::new(tag, d);
            let dn = n.apply(rho)?.populations();
            let problem = game.problem(ComplexMatrix::from_real_diagonal(&dn), rho, true);
            let sol = minimize_trace_norm(&problem, tol)?;
            (Some(0.5 + 0.25 * sol.primal_value), 0.25 * sol.gap.max(0.0))
        }
        None => (None, 0.0),
    };
    let passed = witness_in_class
        && witness_sio_kraus
        && (witness_value - 0.5).abs() <= 1e-8
        && solver_value.map_or(true, |v| (v - 0.5).abs() <= tol.max(1e-8));
    Ok(CollapseReport {
        witness,
        witness_in_class,
        witness_sio_kraus,
        witness_value,
        solver_value,
        solver_gap,
        passed,
    })
}

/// Permutation unitaries, which are strictly incoherent. For a fixed probe,
/// dephased members only produce diagonal outputs, which the replacement
/// channels onto diagonal states already cover.
fn sio_family(d: usize) -> Vec<QuantumChannel> {
    permutations(d)
        .into_iter()
        .map(|p| {
            let u = ComplexMatrix::from_fn(d, d, |r, c| re(if p[c] == r { 1.0 } else { 0.0 }));
            QuantumChannel::unitary(&u).expect("permutation is unitary")
        })
        .collect()
}

/// All permutations of `0..d`, by repeated insertion.
fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for k in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for pos in 0..=p.len() {
                let mut q: Vec<usize> = p.clone();
                q.insert(pos, k);
                next.push(q);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Upper bound on `min_{M ∈ SIO} p_succ(N, M, ρ)`: the minimum over the
/// convex hull of [`sio_family`], the replacement channels onto diagonal
/// states, and any `extra` channels (which must carry SIO Kraus operators).
pub fn sio_upper_bound(
    n: &QuantumChannel,
    rho: &DensityMatrix,
    extra: &[QuantumChannel],
    tol: f64,
) -> Result<f64, DiscriminationError> {
    let d = require_square(n, rho)?;
    let mut members = sio_family(d);
    for e in extra {
        if e.dim_in() != d || e.dim_out() != d || !is_sio_kraus(&e.kraus_operators(), MEMBERSHIP_TOL) {
            return Err(ObjectError::Invalid {
                invariant: "sio_kraus",
                detail: "supplied member is not a certified strictly incoherent channel".into(),
            }
            .into());
        }
        members.push(e.clone());
    }
    let outputs: Vec<ComplexMatrix> = members
        .iter()
        .map(|m| m.apply_operator(rho.matrix()))
        .collect();
    let k = outputs.len();
    // variables: weights w_0..w_{k-1}, then the unnormalized diagonal τ
    let num = k + d;
    let mut map = AffineHermitian::zero(d);
    for (v, out) in outputs.iter().enumerate() {
        for r in 0..d {
            for c in 0..d {
                if out[(r, c)].norm() > 0.0 {
                    map.push(v, r, c, out[(r, c)]);
                }
            }
        }
    }
    for a in 0..d {
        map.push(k + a, a, a, re(1.0));
    }
    let mut cone = AffineHermitian::zero(num);
    for v in 0..num {
        cone.push(v, v, v, re(1.0));
    }
    let mut problem = ConvexProblem::new(num, n.apply(rho)?.matrix().clone(), map);
    problem.cone_constraints.push(cone);
    problem.equalities.push(LinearEquality::new((0..num).map(|v| (v, 1.0)).collect(), 1.0));
    let sol = minimize_trace_norm(&problem, tol)?;
    // feasible point, so the primal value is a valid upper bound
    Ok(0.5 + 0.25 * sol.primal_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationResult {
    pub probe: DensityMatrix,
    pub p_succ: f64,
    /// True when the inner game was replaced by the Kraus-family bound.
    pub inner_upper_bound: bool,
    pub evaluations: usize,
    pub caveat: &'static str,
}

pub const EXPLORATION_CAVEAT: &str = "lower bound on p_succ(N, class, Q)";
pub const HEURISTIC_CAVEAT: &str =
    "heuristic: inner minimum replaced by an upper bound over Kraus-certified members";

/// Multistart hill climbing over pure probes of the class game value.
///
/// For SIO and IO the inner minimum is replaced by [`sio_upper_bound`]
/// (SIO ⊆ IO, so the bound holds for both); the outcome is then only a
/// heuristic witness.
pub fn explore_coherent_probe_advantage(
    n: &QuantumChannel,
    class: GameClass,
    settings: &SearchSettings,
    extra: &[QuantumChannel],
    tol: f64,
) -> Result<ExplorationResult, DiscriminationError> {
    let d = n.dim_in();
    let mut evaluations = 0usize;
    let mut value = |rho: &DensityMatrix| -> Result<f64, DiscriminationError> {
        evaluations += 1;
        match class.convex() {
            Some(tag) => Ok(p_succ_vs_class(n, tag, rho, tol)?.p_succ),
            None => sio_upper_bound(n, rho, extra, tol),
        }
    };
    let mut rng = Rng::new(settings.seed);
    let mut starts: Vec<Vec<C64>> = Vec::new();
    if settings.basis_starts {
        for i in 0..d {
            starts.push((0..d).map(|k| re(if k == i { 1.0 } else { 0.0 })).collect());
        }
    }
    for _ in 0..settings.restarts {
        starts.push(random_state_vector(&mut rng, d));
    }
    let mut best: Option<(f64, Vec<C64>)> = None;
    for start in starts {
        let mut psi = start;
        let mut fx = value(&DensityMatrix::pure(&psi))?;
        let mut step = 0.3;
        for _ in 0..settings.iterations {
            if step < 1e-4 {
                break;
            }
            let dir = random_state_vector(&mut rng, d);
            let mut cand: Vec<_> = psi.iter().zip(&dir).map(|(a, b)| a + b * step).collect();
            let norm = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cand.iter_mut().for_each(|z| *z /= norm);
            let fc = value(&DensityMatrix::pure(&cand))?;
            if fc > fx {
                psi = cand;
                fx = fc;
            } else {
                step *= 0.7;
            }
        }
        if best.as_ref().map_or(true, |b| fx > b.0) {
            best = Some((fx, psi));
        }
    }
    let (p_succ, psi) = best.expect("at least one start");
    Ok(ExplorationResult {
        probe: DensityMatrix::pure(&psi),
        p_succ,
        inner_upper_bound: class.convex().is_none(),
        evaluations,
        caveat: if class.convex().is_some() { EXPLORATION_CAVEAT } else { HEURISTIC_CAVEAT },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncoherentProbeSandwich {
    /// `½ + ½ Ω₁(N)`.
    pub expected: f64,
    pub mio: f64,
    pub dio: f64,
    /// Upper bound for SIO (and hence IO) from Kraus-certified members.
    pub sio_upper: f64,
    /// Largest distance of any class value from `expected`.
    pub max_deviation: f64,
}

/// Incoherent-probe game values for all four classes. MIO and DIO are exact;
/// SIO ⊆ IO ⊆ MIO gives `mio ≤ io ≤ sio ≤ sio_upper`, so the SIO/IO values
/// are pinned whenever `sio_upper` meets `mio`.
pub fn incoherent_probe_sandwich(n: &QuantumChannel, tol: f64) -> Result<IncoherentProbeSandwich, DiscriminationError> {
    let d = n.dim_in();
    let expected = 0.5 + 0.5 * omega_1(n, tol)?.generating;
    let mio = p_succ_free_probes(n, ClassTag::Mio, tol)?.value;
    let dio = p_succ_free_probes(n, ClassTag::Dio, tol)?.value;
    let mut sio_upper = f64::NEG_INFINITY;
    for i in 0..d {
        sio_upper = sio_upper.max(sio_upper_bound(n, &DensityMatrix::basis(d, i), &[], tol)?);
    }
    let max_deviation = [mio, dio, sio_upper]
        .iter()
        .map(|v| (v - expected).abs())
        .fold(0.0, f64::max);
    Ok(IncoherentProbeSandwich {
        expected,
        mio,
        dio,
        sio_upper,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_channel, random_density_matrix, random_incoherent_state};

    const TOL: f64 = 1e-8;

    #[test]
    fn helstrom_examples() {
        let h = QuantumChannel::hadamard();
        let delta = QuantumChannel::dephasing(2);
        let zero = DensityMatrix::basis(2, 0);
        let same = helstrom(&h, &h, &zero).unwrap();
        assert!((same.p_succ - 0.5).abs() < 1e-12);
        let r = helstrom(&h, &delta, &zero).unwrap();
        // eigenvalues of |+><+| − |0><0| are ±1/√2
        assert!((r.p_succ - (0.5 + 2f64.sqrt() / 4.0)).abs() < 1e-12);
        let a = h.apply(&zero).unwrap();
        let b = delta.apply(&zero).unwrap();
        assert!((average_success(&r.optimal_povm, a.matrix(), b.matrix()) - r.p_succ).abs() < 1e-9);
        let x = QuantumChannel::unitary(&ComplexMatrix::from_rows(&[vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]).unwrap()).unwrap();
        let id = QuantumChannel::identity(2);
        assert!((helstrom(&id, &x, &zero).unwrap().p_succ - 1.0).abs() < 1e-12);
        assert!(helstrom(&id, &QuantumChannel::identity(3), &zero).is_err());
    }

    #[test]
    fn class_game_examples() {
        let h = QuantumChannel::hadamard();
        let zero = DensityMatrix::basis(2, 0);
        let r = p_succ_vs_class(&h, ClassTag::Mio, &zero, TOL).unwrap();
        assert!((r.p_succ - 0.75).abs() < 1e-6, "{}", r.p_succ);
        assert!(r.certificate_gap <= 1e-6);
        let worst = r.worst_free_channel.unwrap();
        assert!(FreeChannelClass::mio(2).contains(&worst, MEMBERSHIP_TOL));

        let delta = QuantumChannel::dephasing(2);
        let mut rng = Rng::new(20);
        let rho = random_incoherent_state(&mut rng, 2);
        assert!((p_succ_vs_class(&delta, ClassTag::Mio, &rho, TOL).unwrap().p_succ - 0.5).abs() < 1e-8);
    }

    #[test]
    fn basis_probe_game_matches_output_coherence() {
        let mut rng = Rng::new(21);
        for _ in 0..4 {
            let n = random_channel(&mut rng, 2, 2);
            for i in 0..2 {
                let probe = DensityMatrix::basis(2, i);
                let game = p_succ_vs_class(&n, ClassTag::Mio, &probe, TOL).unwrap().p_succ;
                let oracle = 0.5 + 0.5 * c_trace(&n.apply(&probe).unwrap(), TOL).unwrap().value;
                assert!((game - oracle).abs() < 1e-4, "{game} vs {oracle}");
            }
        }
    }

    #[test]
    fn dio_is_never_easier_to_confuse() {
        let mut rng = Rng::new(22);
        for _ in 0..3 {
            let n = random_channel(&mut rng, 2, 2);
            let rho = random_density_matrix(&mut rng, 2);
            let mio = p_succ_vs_class(&n, ClassTag::Mio, &rho, TOL).unwrap().p_succ;
            let dio = p_succ_vs_class(&n, ClassTag::Dio, &rho, TOL).unwrap().p_succ;
            assert!(dio >= mio - 1e-9, "dio {dio} < mio {mio}");
        }
    }

    #[test]
    fn free_probe_routes_agree() {
        let h = QuantumChannel::hadamard();
        let r = p_succ_free_probes(&h, ClassTag::Mio, TOL).unwrap();
        assert!((r.value - 0.75).abs() < 1e-6);
        let delta = QuantumChannel::dephasing(2);
        assert!((p_succ_free_probes(&delta, ClassTag::Dio, TOL).unwrap().value - 0.5).abs() < 1e-6);
        let mut rng = Rng::new(23);
        let n = random_channel(&mut rng, 3, 2);
        for tag in ClassTag::ALL {
            let r = p_succ_free_probes(&n, tag, TOL).unwrap();
            assert!((r.route_generating - r.route_probes).abs() <= ROUTE_TOL);
        }
    }

    #[test]
    fn advantage_examples() {
        let h = QuantumChannel::hadamard();
        let plus = advantage(&h, ClassTag::Mio, &DensityMatrix::plus(), TOL).unwrap();
        assert!(plus.passed(), "{plus:?}");
        assert!((plus.bound - 0.25).abs() < 1e-9);
        let mut rng = Rng::new(24);
        let rho = random_incoherent_state(&mut rng, 2);
        let inc = advantage(&random_channel(&mut rng, 2, 2), ClassTag::Mio, &rho, TOL).unwrap();
        assert!(inc.advantage <= 1e-6);
    }

    #[test]
    fn incoherent_povm_examples() {
        let h = QuantumChannel::hadamard();
        let delta = QuantumChannel::dephasing(2);
        let id = QuantumChannel::identity(2);
        assert!((p_succ_incoherent_povm(&h, &h, &DensityMatrix::plus()).unwrap().p_succ - 0.5).abs() < 1e-15);
        assert!((p_succ_incoherent_povm(&id, &delta, &DensityMatrix::plus()).unwrap().p_succ - 0.5).abs() < 1e-15);
        let r = p_succ_incoherent_povm(&h, &delta, &DensityMatrix::basis(2, 0)).unwrap();
        assert!((r.p_succ - 0.75).abs() < 1e-15);
        assert!(r.optimal_povm.approx_eq(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0]), 0.0));
    }

    #[test]
    fn incoherent_povm_collapse() {
        let mut rng = Rng::new(25);
        for class in GameClass::ALL {
            let rho = random_density_matrix(&mut rng, 2);
            for n in [QuantumChannel::hadamard(), QuantumChannel::dephasing(2), random_channel(&mut rng, 2, 2)] {
                let rep = verify_incoherent_povm_collapse(&n, class, &rho, TOL).unwrap();
                assert!(rep.passed, "{class}: {rep:?}");
            }
        }
    }

    #[test]
    fn sio_family_is_certified() {
        for d in 2..=3 {
            let fam = sio_family(d);
            assert_eq!(fam.len(), (1..=d).product::<usize>());
            for m in fam {
                assert!(is_sio_kraus(&m.kraus_operators(), 1e-10));
            }
        }
    }

    #[test]
    fn sandwich_pins_all_classes() {
        let mut rng = Rng::new(26);
        for n in [QuantumChannel::hadamard(), random_channel(&mut rng, 2, 2)] {
            let s = incoherent_probe_sandwich(&n, TOL).unwrap();
            assert!(s.max_deviation < 1e-5, "{s:?}");
        }
    }

    #[test]
    fn exploration_bounds() {
        let settings = SearchSettings {
            restarts: 2,
            iterations: 8,
            seed: 3,
            basis_starts: true,
        };
        let delta = QuantumChannel::dephasing(2);
        let r = explore_coherent_probe_advantage(&delta, GameClass::Mio, &settings, &[], TOL).unwrap();
        assert!(r.p_succ <= 0.5 + 1e-6);
        let h = QuantumChannel::hadamard();
        let r = explore_coherent_probe_advantage(&h, GameClass::Mio, &settings, &[], TOL).unwrap();
        assert!(r.p_succ >= 0.75 - 1e-6);
        let ceiling = 0.75 + 0.5 * c_trace(&r.probe, TOL).unwrap().value;
        assert!(r.p_succ <= ceiling + 1e-6);
        let s = explore_coherent_probe_advantage(&h, GameClass::Sio, &settings, &[], TOL).unwrap();
        assert!(s.inner_upper_bound && s.p_succ >= 0.75 - 1e-6);
    }
}
