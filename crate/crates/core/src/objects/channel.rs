use serde::{Deserialize, Serialize};

use super::{DensityMatrix, ObjectError};
use crate::linalg::{herm_eig, kron, partial_trace, re, ComplexMatrix, Subsystem, C64};

/// Tolerance for complete positivity and trace preservation.
pub const CHANNEL_TOL: f64 = 1e-9;

/// Linear map on operators carried by its Choi matrix
/// `J = Σ_ij |i><j| ⊗ N(|i><j|)`, input factor first.
///
/// No positivity or trace condition is imposed; this is the type of adjoint
/// maps and of intermediate constructions. [`QuantumChannel`] wraps a
/// validated one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    dim_in: usize,
    dim_out: usize,
    choi: ComplexMatrix,
}

impl LinearMap {
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Result<Self, ObjectError> {
        let n = dim_in * dim_out;
        if choi.shape() != (n, n) {
            return Err(ObjectError::DimensionMismatch {
                expected: n,
                found: choi.rows(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            choi,
        })
    }

    /// Tabulate a linear map by its action on the matrix units `|i><j|`.
    pub fn from_fn(
        dim_in: usize,
        dim_out: usize,
        f: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    ) -> Self {
        let n = dim_in * dim_out;
        let mut choi = ComplexMatrix::zeros(n, n);
        for i in 0..dim_in {
            for j in 0..dim_in {
                let out = f(&ComplexMatrix::unit(dim_in, i, j));
                assert_eq!(out.shape(), (dim_out, dim_out), "map output has wrong shape");
                choi.set_block(i * dim_out, j * dim_out, &out);
            }
        }
        Self {
            dim_in,
            dim_out,
            choi,
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// `J_ij = N(|i><j|)`
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.choi
            .block(i * self.dim_out, j * self.dim_out, self.dim_out, self.dim_out)
    }

    /// `N(X) = Tr_in[(Xᵀ ⊗ I) J] = Σ_ij X_ij J_ij`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.shape(), (self.dim_in, self.dim_in), "input dimension mismatch");
        let d = self.dim_out;
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let w = x[(i, j)];
                if w.re == 0.0 && w.im == 0.0 {
                    continue;
                }
                for a in 0..d {
                    for b in 0..d {
                        out[(a, b)] += w * self.choi[(i * d + a, j * d + b)];
                    }
                }
            }
        }
        out
    }

    /// The map `M` with `Tr[M(A)·B] = Tr[A·N(B)]`.
    pub fn adjoint(&self) -> LinearMap {
        LinearMap::from_fn(self.dim_out, self.dim_in, |a| {
            // M(A)_{ij} = Tr[A · J_ji]
            ComplexMatrix::from_fn(self.dim_in, self.dim_in, |i, j| {
                a.trace_product(&self.block(j, i))
            })
        })
    }

    /// Max deviation of `Tr_out J` from the identity.
    pub fn trace_preservation_defect(&self) -> f64 {
        let tr = partial_trace(&self.choi, (self.dim_in, self.dim_out), Subsystem::B)
            .expect("choi shape checked at construction");
        (&tr - &ComplexMatrix::identity(self.dim_in)).max_abs()
    }

    /// Max deviation of `N(I)` from the identity.
    pub fn unitality_defect(&self) -> f64 {
        let out = self.apply(&ComplexMatrix::identity(self.dim_in));
        if self.dim_in != self.dim_out {
            return f64::INFINITY;
        }
        (&out - &ComplexMatrix::identity(self.dim_out)).max_abs()
    }

    pub fn compose(&self, first: &LinearMap) -> LinearMap {
        assert_eq!(first.dim_out, self.dim_in, "composition dimension mismatch");
        LinearMap::from_fn(first.dim_in, self.dim_out, |x| self.apply(&first.apply(x)))
    }
}

/// Completely positive, trace-preserving map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumChannel {
    map: LinearMap,
    kraus: Option<Vec<ComplexMatrix>>,
}

impl QuantumChannel {
    /// Validates CP and TP of a Choi matrix at [`CHANNEL_TOL`].
    pub fn from_choi(dim_in: usize, dim_out: usize, choi: ComplexMatrix) -> Result<Self, ObjectError> {
        Self::from_choi_with_tolerance(dim_in, dim_out, choi, CHANNEL_TOL)
    }

    pub fn from_choi_with_tolerance(
        dim_in: usize,
        dim_out: usize,
        choi: ComplexMatrix,
        tol: f64,
    ) -> Result<Self, ObjectError> {
        let defect = choi.hermitian_defect();
        if defect > tol {
            return Err(ObjectError::invalid("choi_hermitian", format!("defect {defect:e}")));
        }
        let map = LinearMap::from_choi(dim_in, dim_out, choi.hermitian_part())?;
        let channel = Self { map, kraus: None };
        channel.validate(tol)?;
        Ok(channel)
    }

    /// Builds a channel from Kraus operators, checking `Σ K†K = I`.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self, ObjectError> {
        let first = kraus
            .first()
            .ok_or_else(|| ObjectError::invalid("kraus_nonempty", "no Kraus operators"))?;
        let (dim_out, dim_in) = first.shape();
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(ObjectError::invalid(
                "kraus_shape",
                format!("{}x{} vs {}x{}", k.rows(), k.cols(), dim_out, dim_in),
            ));
        }
        let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            sum += &k.adjoint().matmul(k);
        }
        let defect = (&sum - &ComplexMatrix::identity(dim_in)).max_abs();
        if defect > CHANNEL_TOL {
            return Err(ObjectError::invalid(
                "kraus_completeness",
                format!("|Σ K†K - I| = {defect:e}"),
            ));
        }
        let choi = kraus_to_choi(&kraus, dim_in, dim_out);
        Ok(Self {
            map: LinearMap {
                dim_in,
                dim_out,
                choi,
            },
            kraus: Some(kraus),
        })
    }

    /// Conjugation `ρ ↦ UρU†`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self, ObjectError> {
        let defect = crate::linalg::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(ObjectError::invalid("unitary", format!("|U†U - I| = {defect:e}")));
        }
        Self::from_kraus(vec![u.clone()])
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::identity(d)]).expect("identity is a channel")
    }

    /// Hadamard gate channel on a qubit.
    pub fn hadamard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = ComplexMatrix::from_rows(&[vec![re(s), re(s)], vec![re(s), re(-s)]]).unwrap();
        Self::unitary(&h).expect("Hadamard is unitary")
    }

    /// Fully dephasing map `Δ(ρ) = Σ_i <i|ρ|i> |i><i|`.
    pub fn dephasing(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        let kraus = (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect();
        Self::from_kraus(kraus).expect("dephasing is a channel")
    }

    /// Constant channel `τ ↦ Tr(τ)·σ` on inputs of dimension `dim_in`.
    ///
    /// Kraus operators are `√q_j |v_j><i|` over the eigenbasis of `σ`; for
    /// diagonal `σ` this is the canonical incoherent set `{√q_j |j><i|}`.
    pub fn replacement(sigma: &DensityMatrix, dim_in: usize) -> Self {
        let d = sigma.dim();
        let m = sigma.matrix();
        let (vals, vecs): (Vec<f64>, Vec<Vec<C64>>) = if sigma.is_incoherent(0.0) {
            (
                m.real_diagonal(),
                (0..d)
                    .map(|j| (0..d).map(|k| re(if k == j { 1.0 } else { 0.0 })).collect())
                    .collect(),
            )
        } else {
            let e = herm_eig(m).expect("state is Hermitian");
            (e.values.clone(), (0..d).map(|k| e.vectors.col_vec(k)).collect())
        };
        let mut kraus = Vec::new();
        for (q, v) in vals.iter().zip(&vecs) {
            if *q <= 0.0 {
                continue;
            }
            let amp: Vec<C64> = v.iter().map(|z| z * q.sqrt()).collect();
            for i in 0..dim_in {
                let mut k = ComplexMatrix::zeros(d, dim_in);
                for (a, z) in amp.iter().enumerate() {
                    k[(a, i)] = *z;
                }
                kraus.push(k);
            }
        }
        let choi = kron(&ComplexMatrix::identity(dim_in), m);
        Self {
            map: LinearMap {
                dim_in,
                dim_out: d,
                choi,
            },
            kraus: Some(kraus),
        }
    }

    /// Checks complete positivity, trace preservation and, when present,
    /// consistency of the Kraus representation.
    pub fn validate(&self, tol: f64) -> Result<(), ObjectError> {
        let min = herm_eig(&self.map.choi)?.min();
        if min < -tol {
            return Err(ObjectError::invalid("choi_psd", format!("min eigenvalue {min:e}")));
        }
        let tp = self.map.trace_preservation_defect();
        if tp > tol {
            return Err(ObjectError::invalid(
                "trace_preserving",
                format!("|Tr_out J - I| = {tp:e}"),
            ));
        }
        if let Some(kraus) = &self.kraus {
            let rebuilt = kraus_to_choi(kraus, self.dim_in(), self.dim_out());
            let diff = (&rebuilt - &self.map.choi).max_abs();
            if diff > tol {
                return Err(ObjectError::invalid("kraus_choi_consistent", format!("{diff:e}")));
            }
        }
        Ok(())
    }

    pub fn dim_in(&self) -> usize {
        self.map.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.map.dim_out
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.map.choi
    }

    pub fn as_map(&self) -> &LinearMap {
        &self.map
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }

    /// Stored Kraus operators, or a minimal set derived from the Choi matrix.
    pub fn kraus_operators(&self) -> Vec<ComplexMatrix> {
        match &self.kraus {
            Some(k) => k.clone(),
            None => choi_to_kraus(&self.map.choi, self.dim_in(), self.dim_out())
                .expect("validated Choi matrix is PSD"),
        }
    }

    /// `N(ρ)` on a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix, ObjectError> {
        if rho.dim() != self.dim_in() {
            return Err(ObjectError::DimensionMismatch {
                expected: self.dim_in(),
                found: rho.dim(),
            });
        }
        Ok(DensityMatrix::from_matrix_unchecked(
            self.map.apply(rho.matrix()).hermitian_part(),
        ))
    }

    /// Linear action on an arbitrary operator, through the Choi matrix.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.map.apply(x)
    }

    /// `Σ_k K_k X K_k†`, if Kraus operators are stored.
    pub fn apply_kraus(&self, x: &ComplexMatrix) -> Option<ComplexMatrix> {
        let kraus = self.kraus.as_ref()?;
        let mut out = ComplexMatrix::zeros(self.dim_out(), self.dim_out());
        for k in kraus {
            out += &k.matmul(x).matmul(&k.adjoint());
        }
        Some(out)
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &QuantumChannel) -> Result<QuantumChannel, ObjectError> {
        if first.dim_out() != self.dim_in() {
            return Err(ObjectError::DimensionMismatch {
                expected: self.dim_in(),
                found: first.dim_out(),
            });
        }
        let map = self.map.compose(&first.map);
        let kraus = match (&self.kraus, &first.kraus) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .flat_map(|ka| b.iter().map(move |kb| ka.matmul(kb)))
                    .collect(),
            ),
            _ => None,
        };
        Ok(Self { map, kraus })
    }

    /// `self ⊗ other`, with inputs ordered (self, other) on both sides.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let (i1, o1) = (self.dim_in(), self.dim_out());
        let (i2, o2) = (other.dim_in(), other.dim_out());
        let j1 = self.choi();
        let j2 = other.choi();
        let n = i1 * i2 * o1 * o2;
        let split = |idx: usize| {
            let inp = idx / (o1 * o2);
            let out = idx % (o1 * o2);
            (inp / i2, inp % i2, out / o2, out % o2)
        };
        let choi = ComplexMatrix::from_fn(n, n, |r, col| {
            let (ra, rb, oa, ob) = split(r);
            let (ca, cb, pa, pb) = split(col);
            j1[(ra * o1 + oa, ca * o1 + pa)] * j2[(rb * o2 + ob, cb * o2 + pb)]
        });
        let kraus = match (&self.kraus, &other.kraus) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .flat_map(|ka| b.iter().map(move |kb| kron(ka, kb)))
                    .collect(),
            ),
            _ => None,
        };
        Self {
            map: LinearMap {
                dim_in: i1 * i2,
                dim_out: o1 * o2,
                choi,
            },
            kraus,
        }
    }

    /// Convex combination `Σ p_i N_i`.
    pub fn mixture(parts: &[(f64, &QuantumChannel)]) -> Result<QuantumChannel, ObjectError> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| ObjectError::invalid("mixture_nonempty", "no channels"))?;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 || parts.iter().any(|(p, _)| *p < 0.0) {
            return Err(ObjectError::invalid("mixture_weights", format!("sum {total}")));
        }
        let mut choi = ComplexMatrix::zeros(first.choi().rows(), first.choi().cols());
        for (p, ch) in parts {
            if ch.dim_in() != first.dim_in() || ch.dim_out() != first.dim_out() {
                return Err(ObjectError::DimensionMismatch {
                    expected: first.dim_in(),
                    found: ch.dim_in(),
                });
            }
            choi += &ch.choi().scale(*p);
        }
        Ok(Self {
            map: LinearMap {
                dim_in: first.dim_in(),
                dim_out: first.dim_out(),
                choi,
            },
            kraus: None,
        })
    }

    pub fn adjoint(&self) -> LinearMap {
        self.map.adjoint()
    }
}

/// `J_{(i,a),(j,b)} = Σ_k K_k[a,i] conj(K_k[b,j])`
pub fn kraus_to_choi(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> ComplexMatrix {
    let n = dim_in * dim_out;
    let mut choi = ComplexMatrix::zeros(n, n);
    for k in kraus {
        // column-stacked vec(K) in (input, output) order
        let v: Vec<C64> = (0..n).map(|idx| k[(idx % dim_out, idx / dim_out)]).collect();
        for r in 0..n {
            if v[r].re == 0.0 && v[r].im == 0.0 {
                continue;
            }
            for col in 0..n {
                choi[(r, col)] += v[r] * v[col].conj();
            }
        }
    }
    choi
}

/// Minimal Kraus set from the spectral decomposition of a PSD Choi matrix.
/// The number of operators equals the number of eigenvalues above `1e-10`.
pub fn choi_to_kraus(
    choi: &ComplexMatrix,
    dim_in: usize,
    dim_out: usize,
) -> Result<Vec<ComplexMatrix>, ObjectError> {
    let e = herm_eig(choi)?;
    let min = e.min();
    if min < -CHANNEL_TOL {
        return Err(ObjectError::NotPsd { min_eigenvalue: min });
    }
    let mut kraus = Vec::new();
    for (k, &lam) in e.values.iter().enumerate() {
        if lam <= 1e-10 {
            continue;
        }
        let s = lam.sqrt();
        let mut op = ComplexMatrix::zeros(dim_out, dim_in);
        for i in 0..dim_in {
            for a in 0..dim_out {
                op[(a, i)] = e.vectors[(i * dim_out + a, k)] * s;
            }
        }
        kraus.push(op);
    }
    Ok(kraus)
}
