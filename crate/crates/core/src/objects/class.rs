use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LinearMap, QuantumChannel};
use crate::linalg::{re, ComplexMatrix, C64};

/// Default tolerance for class-membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Coherence-free channel classes with a convex Choi characterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTag {
    /// Maximally incoherent operations: incoherent inputs give incoherent outputs.
    Mio,
    /// Dephasing-covariant operations: `Δ∘M = M∘Δ`.
    Dio,
}

impl ClassTag {
    pub const ALL: [ClassTag; 2] = [ClassTag::Mio, ClassTag::Dio];

    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::Mio => "mio",
            ClassTag::Dio => "dio",
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mio" => Ok(ClassTag::Mio),
            "dio" => Ok(ClassTag::Dio),
            other => Err(format!("unknown channel class `{other}` (expected mio or dio)")),
        }
    }
}

/// `Tr[G·J] = target` on the Choi matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineConstraint {
    pub g: ComplexMatrix,
    pub target: f64,
}

impl AffineConstraint {
    pub fn residual(&self, choi: &ComplexMatrix) -> f64 {
        (self.g.trace_product(choi).re - self.target).abs()
    }
}

/// A channel class on `C^d → C^d` described by affine constraints on the
/// Choi matrix, on top of the implicit cone condition `J ⪰ 0`.
///
/// The constraint list includes trace preservation; DIO's list is MIO's
/// plus the vanishing diagonals of the off-diagonal blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeChannelClass {
    pub tag: ClassTag,
    pub dim: usize,
    pub constraints: Vec<AffineConstraint>,
}

impl FreeChannelClass {
    pub fn new(tag: ClassTag, dim: usize) -> Self {
        let n = dim * dim;
        let idx = |i: usize, a: usize| i * dim + a;
        let mut constraints = Vec::new();

        // Tr_out J = I
        for i in 0..dim {
            for j in i..dim {
                let mut g = ComplexMatrix::zeros(n, n);
                for a in 0..dim {
                    g[(idx(j, a), idx(i, a))] = re(1.0);
                }
                let target = if i == j { re(1.0) } else { re(0.0) };
                push_entry_constraints(&mut constraints, &g, i != j, target);
            }
        }
        // diagonal blocks J_ii are diagonal
        for i in 0..dim {
            for a in 0..dim {
                for b in a + 1..dim {
                    let g = ComplexMatrix::unit(n, idx(i, b), idx(i, a));
                    push_entry_constraints(&mut constraints, &g, true, re(0.0));
                }
            }
        }
        if tag == ClassTag::Dio {
            // off-diagonal blocks J_ij have zero diagonal
            for i in 0..dim {
                for j in i + 1..dim {
                    for a in 0..dim {
                        let g = ComplexMatrix::unit(n, idx(j, a), idx(i, a));
                        push_entry_constraints(&mut constraints, &g, true, re(0.0));
                    }
                }
            }
        }
        Self {
            tag,
            dim,
            constraints,
        }
    }

    pub fn mio(dim: usize) -> Self {
        Self::new(ClassTag::Mio, dim)
    }

    pub fn dio(dim: usize) -> Self {
        Self::new(ClassTag::Dio, dim)
    }

    /// Largest affine-constraint violation of a Choi matrix.
    pub fn max_residual(&self, choi: &ComplexMatrix) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.residual(choi))
            .fold(0.0, f64::max)
    }

    /// CPTP plus every affine constraint, at `tol`.
    pub fn contains(&self, channel: &QuantumChannel, tol: f64) -> bool {
        channel.dim_in() == self.dim
            && channel.dim_out() == self.dim
            && channel.validate(tol).is_ok()
            && self.max_residual(channel.choi()) <= tol
    }
}

// Constraint on entry `J[r][c]` where `g` has a single unit at (c, r) (or a
// sum of such units): real part, and imaginary part when `complex`.
fn push_entry_constraints(
    out: &mut Vec<AffineConstraint>,
    g: &ComplexMatrix,
    complex: bool,
    target: C64,
) {
    let gh = g.adjoint();
    out.push(AffineConstraint {
        g: (g + &gh).scale(0.5),
        target: target.re,
    });
    if complex {
        out.push(AffineConstraint {
            g: (g - &gh).scale_complex(C64::new(0.0, -0.5)),
            target: target.im,
        });
    }
}

fn block_checks(map: &LinearMap, tol: f64, check_off_diagonal: bool) -> bool {
    let d = map.dim_in();
    for i in 0..d {
        if map.block(i, i).max_off_diagonal() > tol {
            return false;
        }
    }
    if check_off_diagonal {
        for i in 0..d {
            for j in 0..d {
                if i != j && map.block(i, j).diagonal().iter().any(|z| z.norm() > tol) {
                    return false;
                }
            }
        }
    }
    true
}

/// Every diagonal Choi block `J_ii = N(|i><i|)` is diagonal within `tol`.
pub fn is_mio(channel: &QuantumChannel, tol: f64) -> bool {
    block_checks(channel.as_map(), tol, false)
}

/// MIO, and every off-diagonal block `J_ij` has vanishing diagonal.
pub fn is_dio(channel: &QuantumChannel, tol: f64) -> bool {
    block_checks(channel.as_map(), tol, true)
}

/// Incoherent-operation certificate: each `K |a><a| K†` is diagonal.
///
/// Checking the basis projectors suffices by linearity, since they span the
/// incoherent operators.
pub fn is_io_kraus(kraus: &[ComplexMatrix], tol: f64) -> bool {
    kraus.iter().all(|k| {
        (0..k.cols()).all(|a| {
            let col = k.col_vec(a);
            ComplexMatrix::outer(&col, &col).max_off_diagonal() <= tol
        })
    })
}

/// Strictly-incoherent certificate: `Δ(K X K†) = K Δ(X) K†` for every
/// matrix unit `X = |a><b|` (sufficient for all states by linearity).
pub fn is_sio_kraus(kraus: &[ComplexMatrix], tol: f64) -> bool {
    kraus.iter().all(|k| {
        let d = k.cols();
        let kd = k.adjoint();
        for a in 0..d {
            for b in 0..d {
                let x = ComplexMatrix::unit(d, a, b);
                let lhs = dephase(&k.matmul(&x).matmul(&kd));
                let rhs = if a == b {
                    k.matmul(&x).matmul(&kd)
                } else {
                    ComplexMatrix::zeros(k.rows(), k.rows())
                };
                if (&lhs - &rhs).max_abs() > tol {
                    return false;
                }
            }
        }
        true
    })
}

pub(crate) fn dephase(x: &ComplexMatrix) -> ComplexMatrix {
    let n = x.rows();
    ComplexMatrix::from_fn(n, n, |r, col| if r == col { x[(r, col)] } else { re(0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objects::{DensityMatrix, CHANNEL_TOL};
    use crate::random::{random_channel, Rng};

    #[test]
    fn dephasing_is_in_both_classes() {
        let delta = QuantumChannel::dephasing(3);
        assert!(is_mio(&delta, MEMBERSHIP_TOL));
        assert!(is_dio(&delta, MEMBERSHIP_TOL));
        assert!(FreeChannelClass::mio(3).contains(&delta, MEMBERSHIP_TOL));
        assert!(FreeChannelClass::dio(3).contains(&delta, MEMBERSHIP_TOL));
        assert!(is_sio_kraus(delta.kraus().unwrap(), 1e-12));
        assert!(is_io_kraus(delta.kraus().unwrap(), 1e-12));
    }

    #[test]
    fn hadamard_is_in_neither() {
        let h = QuantumChannel::hadamard();
        assert!(!is_mio(&h, MEMBERSHIP_TOL));
        assert!(!is_dio(&h, MEMBERSHIP_TOL));
        assert!(!FreeChannelClass::mio(2).contains(&h, MEMBERSHIP_TOL));
        assert!(!is_io_kraus(h.kraus().unwrap(), 1e-12));
    }

    #[test]
    fn replacement_channels() {
        let mixed = QuantumChannel::replacement(&DensityMatrix::maximally_mixed(2), 2);
        assert!(is_mio(&mixed, MEMBERSHIP_TOL) && is_dio(&mixed, MEMBERSHIP_TOL));
        assert!(is_sio_kraus(mixed.kraus().unwrap(), 1e-12));
        let plus = QuantumChannel::replacement(&DensityMatrix::plus(), 2);
        assert!(!is_mio(&plus, MEMBERSHIP_TOL));
        let diag = DensityMatrix::diagonal(&[0.1, 0.6, 0.3]).unwrap();
        let rep = QuantumChannel::replacement(&diag, 3);
        assert!(FreeChannelClass::dio(3).contains(&rep, MEMBERSHIP_TOL));
        assert!(is_sio_kraus(rep.kraus().unwrap(), 1e-12));
    }

    #[test]
    fn constraint_lists_match_block_checks() {
        let mio = FreeChannelClass::mio(3);
        let dio = FreeChannelClass::dio(3);
        // TP: 9 real; MIO: 3 blocks * 3 pairs * 2; DIO adds 3 pairs * 3 * 2
        assert_eq!(mio.constraints.len(), 9 + 18);
        assert_eq!(dio.constraints.len(), 9 + 18 + 18);
        assert_eq!(&dio.constraints[..mio.constraints.len()], &mio.constraints[..]);
        let mut rng = Rng::new(1);
        for _ in 0..10 {
            let ch = random_channel(&mut rng, 3, 2);
            assert!(ch.validate(CHANNEL_TOL).is_ok());
            assert!(mio.max_residual(ch.choi()) > 1e-6);
            assert_eq!(mio.contains(&ch, MEMBERSHIP_TOL), is_mio(&ch, MEMBERSHIP_TOL));
        }
    }

    #[test]
    fn class_tag_parsing() {
        assert_eq!("MIO".parse::<ClassTag>().unwrap(), ClassTag::Mio);
        assert_eq!("dio".parse::<ClassTag>().unwrap(), ClassTag::Dio);
        assert!("sio".parse::<ClassTag>().is_err());
    }
}
