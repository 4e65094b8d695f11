//! Primal-dual interior-point solver for
//!
//! ```text
//! minimize  cᵀx + c₀
//! s.t.      F_k(x) = F_k0 + Σ_v x_v F_kv ⪰ 0   (Hermitian blocks)
//!           E x = e
//! ```
//!
//! Equalities are eliminated first. The reduced problem is the dual form
//! `max bᵀy s.t. C − Σ y_i A_i = S ⪰ 0` with `C = F₀`, `A_i = −F_i`,
//! `b = −c`, which is solved with the HKM search direction and a Mehrotra
//! predictor-corrector. The block multipliers `X_k ⪰ 0` are returned with
//! the solution.

use nalgebra::{DMatrix, DVector};

use super::affine::{AffineHermitian, LinearEquality};
use super::ConvexError;
use crate::linalg::{cholesky, eigvalsh, hpd_inverse, lower_triangular_inverse, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpSettings {
    pub max_iterations: usize,
    /// Relative duality-gap target `⟨X,S⟩ / (1 + |p| + |d|)`.
    pub gap_tol: f64,
    /// Relative residual target for both residuals.
    pub feas_tol: f64,
    pub step_fraction: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gap_tol: 1e-10,
            feas_tol: 1e-10,
            step_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmiProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub blocks: Vec<AffineHermitian>,
    pub equalities: Vec<LinearEquality>,
}

/// One solver iteration: best feasible objective so far, best lower bound
/// so far, and their difference.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub primal: f64,
    pub dual_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    /// `cᵀx + c₀` at the returned point.
    pub value: f64,
    /// Lower bound from the block multipliers.
    pub dual_bound: f64,
    /// Multiplier `X_k` of every LMI block.
    pub multipliers: Vec<ComplexMatrix>,
    /// Smallest eigenvalue over all blocks `F_k(x)`.
    pub min_block_eigenvalue: f64,
    pub max_equality_residual: f64,
    /// Relative residual of the multiplier equations.
    pub multiplier_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub log: Vec<IterationRecord>,
}

impl SdpSolution {
    pub fn gap(&self) -> f64 {
        self.value - self.dual_bound
    }
}

// Entry of a reduced coefficient matrix.
#[derive(Debug, Clone, Copy)]
struct Entry {
    block: usize,
    row: usize,
    col: usize,
    value: C64,
}

struct Reduced {
    free: Vec<usize>,
    // x_full = base + Σ_f y_f dir_f, dir_f sparse
    base: Vec<f64>,
    pivot_rows: Vec<(usize, Vec<(usize, f64)>)>,
    constant: f64,
    c: Vec<f64>,
    blocks0: Vec<ComplexMatrix>,
    // coefficient matrix of F(y) for every free variable
    coeffs: Vec<Vec<Entry>>,
}

const PIVOT_TOL: f64 = 1e-10;

/// Gauss-Jordan elimination with partial pivoting on `E x = e`.
/// Returns `(pivot column, row over free columns, rhs)` triples.
fn eliminate(
    num_vars: usize,
    eqs: &[LinearEquality],
) -> Result<(Vec<usize>, Vec<Vec<f64>>, Vec<f64>), ConvexError> {
    let mut rows: Vec<Vec<f64>> = eqs
        .iter()
        .map(|eq| {
            let mut r = vec![0.0; num_vars];
            for &(v, a) in &eq.coeffs {
                r[v] += a;
            }
            r
        })
        .collect();
    let mut rhs: Vec<f64> = eqs.iter().map(|eq| eq.rhs).collect();
    let scale: Vec<f64> = rows
        .iter()
        .zip(&rhs)
        .map(|(r, b)| r.iter().fold(b.abs(), |m, v| m.max(v.abs())).max(1e-300))
        .collect();
    for (r, (row, b)) in rows.iter_mut().zip(rhs.iter_mut()).enumerate() {
        row.iter_mut().for_each(|v| *v /= scale[r]);
        *b /= scale[r];
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..num_vars {
        if rank == rows.len() {
            break;
        }
        let (best, mag) = (rank..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag <= PIVOT_TOL {
            continue;
        }
        rows.swap(rank, best);
        rhs.swap(rank, best);
        let p = rows[rank][col];
        rows[rank].iter_mut().for_each(|v| *v /= p);
        rhs[rank] /= p;
        let pivot_row = rows[rank].clone();
        let pivot_rhs = rhs[rank];
        for r in 0..rows.len() {
            if r != rank {
                let f = rows[r][col];
                if f != 0.0 {
                    for (v, pv) in rows[r].iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                    rows[r][col] = 0.0;
                    rhs[r] -= f * pivot_rhs;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    for r in rank..rows.len() {
        if rhs[r].abs() > 1e-9 {
            return Err(ConvexError::Infeasible(format!(
                "inconsistent linear equalities (residual {:.3e})",
                rhs[r].abs()
            )));
        }
    }
    rows.truncate(rank);
    rhs.truncate(rank);
    Ok((pivots, rows, rhs))
}

fn reduce(p: &LmiProblem) -> Result<Reduced, ConvexError> {
    let n = p.num_vars;
    let (pivots, rows, rhs) = eliminate(n, &p.equalities)?;
    let mut is_pivot = vec![false; n];
    for &pc in &pivots {
        is_pivot[pc] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&v| !is_pivot[v]).collect();

    // x_v = base_v + Σ_f dir[v][f] y_f
    let mut base = vec![0.0; n];
    let mut expansion: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut pivot_rows = Vec::new();
    for (k, &pc) in pivots.iter().enumerate() {
        base[pc] = rhs[k];
        let dir: Vec<(usize, f64)> = free
            .iter()
            .enumerate()
            .filter_map(|(fi, &fv)| {
                let a = rows[k][fv];
                (a.abs() > 1e-15).then_some((fi, -a))
            })
            .collect();
        expansion[pc] = dir.clone();
        pivot_rows.push((pc, dir));
    }
    for (fi, &fv) in free.iter().enumerate() {
        expansion[fv] = vec![(fi, 1.0)];
    }

    let m = free.len();
    let mut c = vec![0.0; m];
    let mut constant = p.objective_constant;
    for v in 0..n {
        let cv = p.objective[v];
        if cv != 0.0 {
            constant += cv * base[v];
            for &(fi, a) in &expansion[v] {
                c[fi] += cv * a;
            }
        }
    }

    let mut blocks0 = Vec::with_capacity(p.blocks.len());
    let mut coeffs: Vec<Vec<Entry>> = vec![Vec::new(); m];
    for (b, blk) in p.blocks.iter().enumerate() {
        let mut f0 = blk.constant.clone();
        for t in &blk.terms {
            if base[t.var] != 0.0 {
                f0[(t.row, t.col)] += t.value * base[t.var];
            }
            for &(fi, a) in &expansion[t.var] {
                coeffs[fi].push(Entry {
                    block: b,
                    row: t.row,
                    col: t.col,
                    value: t.value * a,
                });
            }
        }
        blocks0.push(f0.hermitian_part());
    }
    for list in coeffs.iter_mut() {
        list.sort_by_key(|e| (e.block, e.row, e.col));
        let mut merged: Vec<Entry> = Vec::with_capacity(list.len());
        for e in list.drain(..) {
            match merged.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value
                }
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.value.norm() > 1e-15);
        *list = merged;
    }
    Ok(Reduced {
        free,
        base,
        pivot_rows,
        constant,
        c,
        blocks0,
        coeffs,
    })
}

impl Reduced {
    fn expand(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.base.clone();
        for (fi, &fv) in self.free.iter().enumerate() {
            x[fv] = y[fi];
        }
        for (pc, dir) in &self.pivot_rows {
            x[*pc] += dir.iter().map(|&(fi, a)| a * y[fi]).sum::<f64>();
        }
        x
    }

    /// `C − Σ y_i A_i = F₀ + Σ y_i F_i`, one matrix per block.
    fn f_of(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out = self.blocks0.clone();
        for (i, list) in self.coeffs.iter().enumerate() {
            for e in list {
                out[e.block][(e.row, e.col)] += e.value * y[i];
            }
        }
        out
    }

    /// `Σ d_i F_i` (linear part only).
    fn f_linear(&self, d: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self
            .blocks0
            .iter()
            .map(|b| ComplexMatrix::zeros(b.rows(), b.rows()))
            .collect();
        for (i, list) in self.coeffs.iter().enumerate() {
            for e in list {
                out[e.block][(e.row, e.col)] += e.value * d[i];
            }
        }
        out
    }

    /// `⟨F_i, Y⟩ = Re Tr(F_i Y)` for every reduced variable.
    fn adjoint_of(&self, ys: &[ComplexMatrix]) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|list| {
                list.iter()
                    .map(|e| (e.value * ys[e.block][(e.col, e.row)]).re)
                    .sum()
            })
            .collect()
    }
}

fn inner(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.real_inner(y)).sum()
}

fn norm(a: &[ComplexMatrix]) -> f64 {
    a.iter().map(|x| x.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `α` keeping `M + αΔ ⪰ 0`, from the spectrum of
/// `L⁻¹ Δ L⁻ᴴ` where `M = LLᴴ`.
fn max_step(m: &[ComplexMatrix], d: &[ComplexMatrix]) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (mb, db) in m.iter().zip(d) {
        let l = cholesky(mb).ok()?;
        let li = lower_triangular_inverse(&l);
        let t = li.matmul(db).matmul(&li.adjoint()).hermitian_part();
        let lmin = *eigvalsh(&t).ok()?.last()?;
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Some(alpha)
}

fn min_eigenvalue(blocks: &[ComplexMatrix]) -> f64 {
    blocks
        .iter()
        .map(|b| {
            eigvalsh(&b.hermitian_part())
                .ok()
                .and_then(|v| v.last().copied())
                .unwrap_or(f64::NEG_INFINITY)
        })
        .fold(f64::INFINITY, f64::min)
}

fn solve_spd(m: DMatrix<f64>, rhs: DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(&rhs));
    }
    m.lu().solve(&rhs)
}

/// Solves the LMI problem. Returns the final iterate even when the
/// tolerances were not reached (`converged == false`).
pub fn solve_lmi(p: &LmiProblem, settings: &SdpSettings) -> Result<SdpSolution, ConvexError> {
    assert_eq!(p.objective.len(), p.num_vars);
    let red = reduce(p)?;
    let m = red.free.len();
    let nb = red.blocks0.len();
    let total_dim: usize = red.blocks0.iter().map(|b| b.rows()).sum();
    let b: Vec<f64> = red.c.iter().map(|v| -v).collect();

    let c_norm = norm(&red.blocks0);
    let b_norm = vnorm(&b);
    let a_norm = red
        .coeffs
        .iter()
        .map(|l| l.iter().map(|e| e.value.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let xi = 10f64.max((total_dim as f64).sqrt()).max(b_norm / a_norm.max(1e-12));
    let eta = 10f64.max(c_norm).max(a_norm).max((total_dim as f64).sqrt());

    let mut xs: Vec<ComplexMatrix> = red
        .blocks0
        .iter()
        .map(|bk| ComplexMatrix::identity(bk.rows()).scale(xi))
        .collect();
    let mut ss: Vec<ComplexMatrix> = red
        .blocks0
        .iter()
        .map(|bk| ComplexMatrix::identity(bk.rows()).scale(eta))
        .collect();
    let mut y = vec![0.0; m];

    let mut log = Vec::new();
    let mut best_primal = f64::INFINITY;
    let mut best_dual = f64::NEG_INFINITY;
    // (merit, y, X) of the most accurate iterate
    let mut best: Option<(f64, Vec<f64>, Vec<ComplexMatrix>)> = None;
    let mut since_improvement = 0;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..settings.max_iterations {
        iterations = it + 1;
        let fy = red.f_of(&y);
        let rd: Vec<ComplexMatrix> = fy.iter().zip(&ss).map(|(f, s)| f - s).collect();
        let ax = red.adjoint_of(&xs);
        // primal residual: b - A(X), with A(X)_i = <A_i, X> = -<F_i, X>
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, a)| bi + a).collect();
        let mu = inner(&xs, &ss) / total_dim as f64;

        let pobj = red.constant + red.c.iter().zip(&y).map(|(c, v)| c * v).sum::<f64>();
        let dobj = red.constant - inner(&red.blocks0, &xs);
        let rp_rel = vnorm(&rp) / (1.0 + b_norm);
        let rd_rel = norm(&rd) / (1.0 + c_norm);

        if rd_rel <= 1e-9 && min_eigenvalue(&fy) >= -1e-10 && pobj < best_primal {
            best_primal = pobj;
        }
        if rp_rel <= 1e-9 && dobj > best_dual {
            best_dual = dobj;
        }
        log.push(IterationRecord {
            iteration: it,
            primal: best_primal,
            dual_bound: best_dual,
            gap: best_primal - best_dual,
        });

        let rel_gap = (total_dim as f64 * mu) / (1.0 + pobj.abs() + dobj.abs());
        let merit = rel_gap.max(rp_rel).max(rd_rel);
        match &best {
            Some((m0, _, _)) if merit >= 0.9 * m0 => since_improvement += 1,
            _ => since_improvement = 0,
        }
        if best.as_ref().map_or(true, |(m0, _, _)| merit < *m0) {
            best = Some((merit, y.clone(), xs.clone()));
        }
        if rel_gap <= settings.gap_tol && rp_rel <= settings.feas_tol && rd_rel <= settings.feas_tol {
            converged = true;
            break;
        }
        if since_improvement >= 8 {
            break;
        }
        if !pobj.is_finite() || pobj.abs() > 1e12 || dobj.abs() > 1e12 {
            break;
        }

        let Some(sinv) = ss.iter().map(hpd_inverse).collect::<Result<Vec<_>, _>>().ok() else {
            break;
        };

        // Schur complement M_ij = Re Tr(F_i X F_j S⁻¹)
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let mut acc = 0.0;
                for ei in &red.coeffs[i] {
                    let xb = &xs[ei.block];
                    let sb = &sinv[ei.block];
                    for ej in &red.coeffs[j] {
                        if ej.block != ei.block {
                            continue;
                        }
                        // Tr(F_i X F_j S⁻¹) with F_i = v|r><c|, F_j = w|r'><c'|
                        acc += (ei.value * xb[(ei.col, ej.row)] * ej.value * sb[(ej.col, ei.row)]).re;
                    }
                }
                schur[(i, j)] = acc;
                schur[(j, i)] = acc;
            }
        }

        let x_rd_sinv: Vec<ComplexMatrix> = (0..nb)
            .map(|k| xs[k].matmul(&rd[k]).matmul(&sinv[k]))
            .collect();
        // With A_i = -F_i: rhs = Rp - <A, Rc S⁻¹> + <A, X Rd S⁻¹>
        let direction = |rc_sinv: &[ComplexMatrix]| -> Option<(Vec<f64>, Vec<ComplexMatrix>, Vec<ComplexMatrix>)> {
            let t1 = red.adjoint_of(rc_sinv);
            let t2 = red.adjoint_of(&x_rd_sinv);
            let rhs: Vec<f64> = (0..m).map(|i| rp[i] + t1[i] - t2[i]).collect();
            let dy: Vec<f64> = solve_spd(schur.clone(), DVector::from_vec(rhs))?
                .iter()
                .copied()
                .collect();
            let lin = red.f_linear(&dy);
            // ΔS = Rd - Σ Δy_i A_i = Rd + Σ Δy_i F_i
            let ds: Vec<ComplexMatrix> = rd.iter().zip(&lin).map(|(r, l)| r + l).collect();
            let dx: Vec<ComplexMatrix> = (0..nb)
                .map(|k| (&rc_sinv[k] - &xs[k].matmul(&ds[k]).matmul(&sinv[k])).hermitian_part())
                .collect();
            Some((dy, dx, ds))
        };

        let rc_aff: Vec<ComplexMatrix> = xs.iter().map(|x| x.scale(-1.0)).collect();
        let Some((_, dx_a, ds_a)) = direction(&rc_aff) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&xs, &dx_a), max_step(&ss, &ds_a)) else {
            break;
        };
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mu_aff = (0..nb)
            .map(|k| (&xs[k] + &dx_a[k].scale(ap)).real_inner(&(&ss[k] + &ds_a[k].scale(ad))))
            .sum::<f64>()
            / total_dim as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc_corr: Vec<ComplexMatrix> = (0..nb)
            .map(|k| {
                let n = xs[k].rows();
                let rc = &(&ComplexMatrix::identity(n).scale(sigma * mu) - &xs[k].matmul(&ss[k]))
                    - &dx_a[k].matmul(&ds_a[k]);
                rc.matmul(&sinv[k])
            })
            .collect();
        let Some((dy, dx, ds)) = direction(&rc_corr) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&xs, &dx), max_step(&ss, &ds)) else {
            break;
        };
        let ap = (settings.step_fraction * ap).min(1.0);
        let ad = (settings.step_fraction * ad).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        for k in 0..nb {
            xs[k] = (&xs[k] + &dx[k].scale(ap)).hermitian_part();
            ss[k] = (&ss[k] + &ds[k].scale(ad)).hermitian_part();
        }
        for (yi, d) in y.iter_mut().zip(&dy) {
            *yi += ad * d;
        }
    }

    let (y_out, xs) = match best {
        Some((_, by, bx)) => (by, bx),
        None => (y, xs),
    };
    let x = red.expand(&y_out);
    let value = p.objective_constant + p.objective.iter().zip(&x).map(|(c, v)| c * v).sum::<f64>();
    let blocks_at: Vec<ComplexMatrix> = p.blocks.iter().map(|bk| bk.evaluate(&x)).collect();
    let ax = red.adjoint_of(&xs);
    let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, a)| bi + a).collect();
    let dual_bound = red.constant - inner(&red.blocks0, &xs);
    let max_equality_residual = p
        .equalities
        .iter()
        .map(|e| e.residual(&x).abs())
        .fold(0.0, f64::max);
    if let Some(last) = log.last_mut() {
        if min_eigenvalue(&blocks_at) >= -1e-10 && value < last.primal {
            last.primal = value;
        }
        if vnorm(&rp) / (1.0 + b_norm) <= 1e-9 && dual_bound > last.dual_bound {
            last.dual_bound = dual_bound;
        }
        last.gap = last.primal - last.dual_bound;
    }
    Ok(SdpSolution {
        x,
        value,
        dual_bound,
        multipliers: xs,
        min_block_eigenvalue: min_eigenvalue(&blocks_at),
        max_equality_residual,
        multiplier_residual: vnorm(&rp) / (1.0 + b_norm),
        iterations,
        converged,
        log,
    })
}
