use std::io::Write;

use super::affine::{AffineHermitian, HermitianParams, LinearEquality};
use super::sdp::{solve_lmi, IterationRecord, LmiProblem, SdpSettings, SdpSolution};
use super::ConvexError;
use crate::linalg::{herm_eig, trace_norm, ComplexMatrix};

/// `minimize ‖A − L(x)‖₁` over real parameters `x`, subject to
/// `G_k(x) ⪰ 0` and linear equalities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexProblem {
    pub num_params: usize,
    /// Hermitian target `A`.
    pub target: ComplexMatrix,
    /// Affine Hermitian map `L(x)`, same size as `A`.
    pub map: AffineHermitian,
    pub cone_constraints: Vec<AffineHermitian>,
    pub equalities: Vec<LinearEquality>,
    pub warm_start: Option<Vec<f64>>,
}

/// Minimizer with a dual certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedSolution {
    /// `‖A − L(x*)‖₁`, evaluated directly at the minimizer.
    pub primal_value: f64,
    pub minimizer: Vec<f64>,
    /// Operator `W` with `‖W‖∞ ≤ 1` aligned with `A − L(x*)`.
    pub witness: ComplexMatrix,
    /// Multipliers of the cone constraints, in order.
    pub multipliers: Vec<ComplexMatrix>,
    /// Certified lower bound on the optimum.
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterationRecord>,
}

impl CertifiedSolution {
    /// Writes the iteration log as `iteration,primal,dual_bound,gap`.
    pub fn write_log_csv(&self, out: impl Write) -> Result<(), csv::Error> {
        write_log_csv(&self.log, out)
    }
}

pub fn write_log_csv(log: &[IterationRecord], out: impl Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for rec in log {
        w.serialize(rec)?;
    }
    w.flush()?;
    Ok(())
}

impl ConvexProblem {
    pub fn new(num_params: usize, target: ComplexMatrix, map: AffineHermitian) -> Self {
        Self {
            num_params,
            target,
            map,
            cone_constraints: Vec::new(),
            equalities: Vec::new(),
            warm_start: None,
        }
    }

    pub fn residual_at(&self, x: &[f64]) -> ComplexMatrix {
        &self.target - &self.map.evaluate(x)
    }

    pub fn objective_at(&self, x: &[f64]) -> Result<f64, ConvexError> {
        Ok(trace_norm(&self.residual_at(x))?)
    }

    /// Largest violation of the constraints at `x` (negative eigenvalues and
    /// equality residuals).
    pub fn infeasibility_at(&self, x: &[f64]) -> Result<f64, ConvexError> {
        let mut worst = 0.0f64;
        for g in &self.cone_constraints {
            let m = g.evaluate(x).hermitian_part();
            worst = worst.max(-herm_eig(&m)?.min());
        }
        for eq in &self.equalities {
            worst = worst.max(eq.residual(x).abs());
        }
        Ok(worst)
    }

    fn validate(&self) -> Result<(), ConvexError> {
        let n = self.target.rows();
        if !self.target.is_square() || self.map.dim() != n {
            return Err(ConvexError::Dimension(format!(
                "target is {:?}, map is {}x{}",
                self.target.shape(),
                self.map.dim(),
                self.map.dim()
            )));
        }
        if !self.target.is_hermitian(1e-10 * self.target.max_abs().max(1.0)) {
            return Err(ConvexError::Dimension("target must be Hermitian".into()));
        }
        let too_big = |a: &AffineHermitian| a.max_var().is_some_and(|v| v >= self.num_params);
        if too_big(&self.map)
            || self.cone_constraints.iter().any(too_big)
            || self
                .equalities
                .iter()
                .any(|e| e.coeffs.iter().any(|&(v, _)| v >= self.num_params))
        {
            return Err(ConvexError::Dimension(
                "constraint references a variable outside the parameter range".into(),
            ));
        }
        Ok(())
    }

    /// Trace-norm epigraph: `min 2 Tr P − Tr(A − L(x))` with `P ⪰ 0` and
    /// `P − (A − L(x)) ⪰ 0`.
    fn compile(&self) -> LmiProblem {
        let n = self.target.rows();
        let p = HermitianParams::new(self.num_params, n);
        let num_vars = p.end();
        let mut objective = vec![0.0; num_vars];
        let (l0, lcoef) = self.map.trace_coefficients(self.num_params);
        objective[..self.num_params].copy_from_slice(&lcoef);
        for (var, b) in p.basis() {
            if let super::affine::HermitianBasis::Diagonal(_) = b {
                objective[var] = 2.0;
            }
        }
        let objective_constant = l0 - self.target.trace().re;

        let mut blocks = self.cone_constraints.clone();
        let mut p_block = AffineHermitian::zero(n);
        p.push_identity(&mut p_block, 1.0, 0);
        blocks.push(p_block);
        let mut n_block = AffineHermitian::constant(self.target.scale(-1.0));
        n_block.add_scaled(&self.map, 1.0);
        p.push_identity(&mut n_block, 1.0, 0);
        blocks.push(n_block);
        LmiProblem {
            num_vars,
            objective,
            objective_constant,
            blocks,
            equalities: self.equalities.clone(),
        }
    }
}

fn clip_unit_ball(w: &ComplexMatrix) -> Result<ComplexMatrix, ConvexError> {
    let eig = herm_eig(&w.hermitian_part())?;
    Ok(eig.reconstruct_with(|l| l.clamp(-1.0, 1.0)))
}

fn certified_from(problem: &ConvexProblem, sol: SdpSolution) -> Result<CertifiedSolution, ConvexError> {
    let k = problem.cone_constraints.len();
    let x = sol.x[..problem.num_params].to_vec();
    let n = problem.target.rows();
    let witness = clip_unit_ball(&(&sol.multipliers[k + 1] - &ComplexMatrix::identity(n)))?;
    let primal_value = problem.objective_at(&x)?;
    // a norm is nonnegative, so 0 is always a valid lower bound
    let dual_bound = sol.dual_bound.max(0.0);
    Ok(CertifiedSolution {
        primal_value,
        minimizer: x,
        witness,
        multipliers: sol.multipliers[..k].to_vec(),
        dual_bound,
        gap: primal_value - dual_bound,
        iterations: sol.iterations,
        converged: sol.converged,
        log: sol.log,
    })
}

/// Solves a [`ConvexProblem`] and accepts the result only when the
/// certified gap is at most `tol`.
pub fn minimize_trace_norm(problem: &ConvexProblem, tol: f64) -> Result<CertifiedSolution, ConvexError> {
    if !(tol >= 1e-8) {
        return Err(ConvexError::InvalidTolerance(tol));
    }
    problem.validate()?;
    if let Some(x0) = &problem.warm_start {
        if x0.len() == problem.num_params && problem.infeasibility_at(x0)? <= 1e-10 {
            let v = problem.objective_at(x0)?;
            if v < tol {
                let n = problem.target.rows();
                return Ok(CertifiedSolution {
                    primal_value: v,
                    minimizer: x0.clone(),
                    witness: ComplexMatrix::zeros(n, n),
                    multipliers: problem
                        .cone_constraints
                        .iter()
                        .map(|g| ComplexMatrix::zeros(g.dim(), g.dim()))
                        .collect(),
                    dual_bound: 0.0,
                    gap: v,
                    iterations: 0,
                    converged: true,
                    log: vec![IterationRecord {
                        iteration: 0,
                        primal: v,
                        dual_bound: 0.0,
                        gap: v,
                    }],
                });
            }
        }
    }
    let lmi = problem.compile();
    let sol = solve_lmi(&lmi, &SdpSettings::default())?;
    let feasible = sol.min_block_eigenvalue >= -1e-8 && sol.max_equality_residual <= 1e-8;
    let converged = sol.converged;
    let certified = certified_from(problem, sol)?;
    check_certificate(feasible, converged, certified.primal_value, certified.dual_bound, tol)?;
    Ok(certified)
}

/// Acceptance rule shared by every optimization: a feasible end point whose
/// certified gap is within `tol` passes, an infeasible unconverged end point
/// is reported as infeasible, anything else is [`ConvexError::MaxIterations`].
pub(crate) fn check_certificate(
    feasible: bool,
    converged: bool,
    value: f64,
    dual_bound: f64,
    tol: f64,
) -> Result<(), ConvexError> {
    let gap = value - dual_bound;
    if feasible && gap <= tol && gap >= -tol {
        return Ok(());
    }
    if !feasible && !converged {
        return Err(ConvexError::Infeasible(
            "no point satisfying the constraints was found".into(),
        ));
    }
    Err(ConvexError::MaxIterations { value, dual_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, re};

    fn diagonal_state_problem(target: ComplexMatrix) -> ConvexProblem {
        // L(p) = diag(p), Σp = 1, p ⪰ 0
        let d = target.rows();
        let mut map = AffineHermitian::zero(d);
        let mut cone = AffineHermitian::zero(d);
        for i in 0..d {
            map.push(i, i, i, re(1.0));
            cone.push(i, i, i, re(1.0));
        }
        let mut p = ConvexProblem::new(d, target, map);
        p.cone_constraints.push(cone);
        p.equalities
            .push(LinearEquality::new((0..d).map(|i| (i, 1.0)).collect(), 1.0));
        p
    }

    #[test]
    fn plus_state_to_incoherent_set() {
        let plus = ComplexMatrix::from_rows(&[vec![re(0.5), re(0.5)], vec![re(0.5), re(0.5)]]).unwrap();
        let sol = minimize_trace_norm(&diagonal_state_problem(plus.clone()), 1e-8).unwrap();
        assert!((sol.primal_value - 1.0).abs() < 1e-8, "{}", sol.primal_value);
        assert!(sol.gap.abs() <= 1e-8);
        assert!((sol.minimizer[0] - 0.5).abs() < 1e-4);
        // W aligned with ρ − σ* = X/2
        let resid = sol_residual(&diagonal_state_problem(plus), &sol.minimizer);
        assert!((sol.witness.trace_product(&resid).re - sol.primal_value).abs() < 1e-7);
    }

    fn sol_residual(p: &ConvexProblem, x: &[f64]) -> ComplexMatrix {
        p.residual_at(x)
    }

    #[test]
    fn feasible_target_gives_zero_via_warm_start() {
        let t = ComplexMatrix::from_real_diagonal(&[0.3, 0.7]);
        let mut p = diagonal_state_problem(t);
        p.warm_start = Some(vec![0.3, 0.7]);
        let sol = minimize_trace_norm(&p, 1e-8).unwrap();
        assert_eq!(sol.primal_value, 0.0);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn feasible_target_gives_zero_cold() {
        let t = ComplexMatrix::from_real_diagonal(&[0.2, 0.5, 0.3]);
        let sol = minimize_trace_norm(&diagonal_state_problem(t), 1e-8).unwrap();
        assert!(sol.primal_value < 1e-7, "{}", sol.primal_value);
    }

    #[test]
    fn complex_off_diagonal() {
        let t = ComplexMatrix::from_rows(&[vec![re(0.6), c(0.1, 0.3)], vec![c(0.1, -0.3), re(0.4)]]).unwrap();
        let sol = minimize_trace_norm(&diagonal_state_problem(t), 1e-8).unwrap();
        let expected = 2.0 * (0.1f64.powi(2) + 0.3f64.powi(2)).sqrt();
        assert!((sol.primal_value - expected).abs() < 1e-8);
    }

    #[test]
    fn rejects_tiny_tolerance() {
        let p = diagonal_state_problem(ComplexMatrix::identity(2));
        assert!(matches!(minimize_trace_norm(&p, 1e-9), Err(ConvexError::InvalidTolerance(_))));
    }

    #[test]
    fn log_is_monotone_and_exports() {
        let t = ComplexMatrix::from_rows(&[vec![re(0.6), c(0.1, 0.3)], vec![c(0.1, -0.3), re(0.4)]]).unwrap();
        let sol = minimize_trace_norm(&diagonal_state_problem(t), 1e-8).unwrap();
        for w in sol.log.windows(2) {
            assert!(w[1].primal <= w[0].primal || w[0].primal.is_infinite());
            assert!(w[1].dual_bound >= w[0].dual_bound);
        }
        let mut buf = Vec::new();
        sol.write_log_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,primal,dual_bound,gap"));
    }
}
