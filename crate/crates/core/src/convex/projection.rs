use nalgebra::DMatrix;

use super::ConvexError;
use crate::linalg::{herm_eig, ComplexMatrix, LinalgError};
use crate::objects::{FreeChannelClass, QuantumChannel};

/// Maximum number of alternating-projection rounds.
pub const MAX_PROJECTION_ITERATIONS: usize = 100_000;

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).
pub fn project_psd(a: &ComplexMatrix) -> Result<ComplexMatrix, ConvexError> {
    let scale = a.max_abs().max(1.0);
    let defect = a.hermitian_defect();
    if defect > 1e-10 * scale {
        return Err(LinalgError::NotHermitian { defect }.into());
    }
    Ok(herm_eig(a)?.reconstruct_with(|l| l.max(0.0)))
}

/// Orthogonal projector onto `{J : Tr[G_k J] = g_k}` in the real
/// Hilbert-Schmidt geometry.
struct AffineProjector<'a> {
    class: &'a FreeChannelClass,
    gram_pinv: DMatrix<f64>,
}

impl<'a> AffineProjector<'a> {
    fn new(class: &'a FreeChannelClass) -> Self {
        let k = class.constraints.len();
        let gram = DMatrix::from_fn(k, k, |a, b| {
            class.constraints[a].g.real_inner(&class.constraints[b].g)
        });
        let gram_pinv = gram
            .pseudo_inverse(1e-10)
            .expect("Gram matrix pseudo-inverse with positive epsilon");
        Self { class, gram_pinv }
    }

    fn project(&self, j: &ComplexMatrix) -> ComplexMatrix {
        let r = nalgebra::DVector::from_iterator(
            self.class.constraints.len(),
            self.class
                .constraints
                .iter()
                .map(|c| c.g.real_inner(j) - c.target),
        );
        let lambda = &self.gram_pinv * r;
        let mut out = j.clone();
        for (c, l) in self.class.constraints.iter().zip(lambda.iter()) {
            out -= &c.g.scale(*l);
        }
        out
    }
}

/// Projects a Hermitian Choi matrix onto the class by Dykstra's alternating
/// projections between the affine constraint set and the PSD cone.
///
/// The last iterate is made affine-exact and then mixed with the completely
/// depolarizing channel (which lies in every class) just enough to restore
/// positivity, so the returned channel satisfies the constraints exactly up
/// to round-off.
pub fn project_channel_class(
    choi: &ComplexMatrix,
    class: &FreeChannelClass,
    tol: f64,
) -> Result<QuantumChannel, ConvexError> {
    let d = class.dim;
    let n = d * d;
    if choi.shape() != (n, n) {
        return Err(ConvexError::Dimension(format!(
            "Choi matrix is {:?}, class acts on dimension {d}",
            choi.shape()
        )));
    }
    let affine = AffineProjector::new(class);
    let mut x = project_psd(&choi.hermitian_part())?;
    let mut q = ComplexMatrix::zeros(n, n);
    let mut y = affine.project(&x);
    let mut converged = false;
    for _ in 0..MAX_PROJECTION_ITERATIONS {
        // the affine step needs no correction term
        y = affine.project(&x);
        let shifted = &y + &q;
        let x_new = project_psd(&shifted)?;
        q = &shifted - &x_new;
        let moved = (&x_new - &x).frobenius_norm();
        let split = (&x_new - &y).frobenius_norm();
        x = x_new;
        if split <= tol && moved <= tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ConvexError::NoConvergence {
            iterations: MAX_PROJECTION_ITERATIONS,
            residual: (&x - &y).frobenius_norm(),
        });
    }
    let j = affine.project(&x).hermitian_part();
    let lmin = herm_eig(&j)?.min();
    let j = if lmin < 0.0 {
        // (1-ε) λ + ε/d ≥ 0
        let eps = -lmin / (1.0 / d as f64 - lmin);
        &j.scale(1.0 - eps) + &ComplexMatrix::identity(n).scale(eps / d as f64)
    } else {
        j
    };
    Ok(QuantumChannel::from_choi(d, d, j)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::{is_dio, is_mio, MEMBERSHIP_TOL};
    use crate::random::{random_channel, Rng};

    #[test]
    fn psd_projection_clips_spectrum() {
        let a = ComplexMatrix::from_real_diagonal(&[2.0, -1.0, 0.5]);
        let p = project_psd(&a).unwrap();
        assert!(p.approx_eq(&ComplexMatrix::from_real_diagonal(&[2.0, 0.0, 0.5]), 1e-14));
        let not_herm = ComplexMatrix::unit(2, 0, 1);
        assert!(project_psd(&not_herm).is_err());
    }

    #[test]
    fn projection_lands_in_class_and_fixes_members() {
        let mut rng = Rng::new(5);
        for class in [FreeChannelClass::mio(2), FreeChannelClass::dio(3)] {
            let ch = random_channel(&mut rng, class.dim, 2);
            let p = project_channel_class(ch.choi(), &class, 1e-10).unwrap();
            assert!(class.contains(&p, MEMBERSHIP_TOL));
            assert!(is_mio(&p, MEMBERSHIP_TOL));
            if class.tag == crate::objects::ClassTag::Dio {
                assert!(is_dio(&p, MEMBERSHIP_TOL));
            }
            // idempotent
            let again = project_channel_class(p.choi(), &class, 1e-10).unwrap();
            assert!(again.choi().approx_eq(p.choi(), 1e-7));
        }
    }
}
