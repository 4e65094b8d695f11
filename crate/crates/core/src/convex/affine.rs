use crate::linalg::{re, ComplexMatrix, C64};

/// One coefficient of an affine Hermitian expression: `value` at
/// `(row, col)` multiplies variable `var`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub var: usize,
    pub row: usize,
    pub col: usize,
    pub value: C64,
}

/// `F(x) = F₀ + Σ_v x_v F_v` with Hermitian `F₀` and Hermitian
/// coefficient matrices stored entry-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineHermitian {
    pub constant: ComplexMatrix,
    pub terms: Vec<Term>,
}

impl AffineHermitian {
    pub fn zero(n: usize) -> Self {
        Self::constant(ComplexMatrix::zeros(n, n))
    }

    pub fn constant(constant: ComplexMatrix) -> Self {
        assert!(constant.is_square());
        Self {
            constant,
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.constant.rows()
    }

    pub fn push(&mut self, var: usize, row: usize, col: usize, value: C64) {
        self.terms.push(Term {
            var,
            row,
            col,
            value,
        });
    }

    /// Adds `value` at `(row, col)` and its conjugate at `(col, row)`.
    pub fn push_hermitian_pair(&mut self, var: usize, row: usize, col: usize, value: C64) {
        if row == col {
            self.push(var, row, row, re(value.re));
        } else {
            self.push(var, row, col, value);
            self.push(var, col, row, value.conj());
        }
    }

    /// `self += s·other` (same dimension).
    pub fn add_scaled(&mut self, other: &AffineHermitian, s: f64) {
        assert_eq!(self.dim(), other.dim());
        self.constant += &other.constant.scale(s);
        self.terms.extend(other.terms.iter().map(|t| Term {
            value: t.value * s,
            ..*t
        }));
    }

    pub fn add_constant(&mut self, m: &ComplexMatrix, s: f64) {
        self.constant += &m.scale(s);
    }

    pub fn evaluate(&self, x: &[f64]) -> ComplexMatrix {
        let mut out = self.constant.clone();
        for t in &self.terms {
            out[(t.row, t.col)] += t.value * x[t.var];
        }
        out
    }

    /// Linear part only, `Σ_v x_v F_v`.
    pub fn evaluate_linear(&self, x: &[f64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for t in &self.terms {
            out[(t.row, t.col)] += t.value * x[t.var];
        }
        out
    }

    /// `Tr F(x)` coefficients: (constant, per-variable contributions).
    pub fn trace_coefficients(&self, num_vars: usize) -> (f64, Vec<f64>) {
        let mut coeffs = vec![0.0; num_vars];
        for t in &self.terms {
            if t.row == t.col {
                coeffs[t.var] += t.value.re;
            }
        }
        (self.constant.trace().re, coeffs)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.var).max()
    }
}

/// Linear equality `Σ coeff·x_var = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEquality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearEquality {
    pub fn new(coeffs: Vec<(usize, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn residual(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * x[v]).sum::<f64>() - self.rhs
    }
}

/// Real parameterization of an `n×n` Hermitian matrix occupying variables
/// `offset .. offset + n²`: for each row `r`, the diagonal entry followed by
/// `(Re, Im)` of every `(r, c > r)` entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HermitianParams {
    pub offset: usize,
    pub n: usize,
}

/// Basis element of a [`HermitianParams`] block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HermitianBasis {
    Diagonal(usize),
    Real(usize, usize),
    Imag(usize, usize),
}

impl HermitianBasis {
    /// Entries `(row, col, value)` of the basis matrix.
    pub fn entries(self) -> Vec<(usize, usize, C64)> {
        match self {
            HermitianBasis::Diagonal(r) => vec![(r, r, re(1.0))],
            HermitianBasis::Real(r, col) => vec![(r, col, re(1.0)), (col, r, re(1.0))],
            HermitianBasis::Imag(r, col) => {
                vec![(r, col, C64::new(0.0, 1.0)), (col, r, C64::new(0.0, -1.0))]
            }
        }
    }
}

impl HermitianParams {
    pub fn new(offset: usize, n: usize) -> Self {
        Self { offset, n }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn end(&self) -> usize {
        self.offset + self.len()
    }

    /// `(variable index, basis element)` pairs in parameter order.
    pub fn basis(&self) -> Vec<(usize, HermitianBasis)> {
        let mut out = Vec::with_capacity(self.len());
        let mut v = self.offset;
        for r in 0..self.n {
            out.push((v, HermitianBasis::Diagonal(r)));
            v += 1;
            for col in r + 1..self.n {
                out.push((v, HermitianBasis::Real(r, col)));
                out.push((v + 1, HermitianBasis::Imag(r, col)));
                v += 2;
            }
        }
        out
    }

    /// Adds `s·H(x)` to `target` through an entry-wise linear image: `image`
    /// maps a matrix unit `|r><c|` to a list of `(row, col, coeff)` entries.
    pub fn push_image(
        &self,
        target: &mut AffineHermitian,
        s: f64,
        image: impl Fn(usize, usize) -> Vec<(usize, usize, C64)>,
    ) {
        for (var, b) in self.basis() {
            for (r, col, val) in b.entries() {
                for (ir, ic, coeff) in image(r, col) {
                    target.push(var, ir, ic, val * coeff * s);
                }
            }
        }
    }

    /// Adds `s·H(x)` itself to `target` (placed at `offset_in_target`).
    pub fn push_identity(&self, target: &mut AffineHermitian, s: f64, at: usize) {
        self.push_image(target, s, |r, col| vec![(r + at, col + at, re(1.0))]);
    }

    pub fn matrix(&self, x: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (var, b) in self.basis() {
            for (r, col, val) in b.entries() {
                m[(r, col)] += val * x[var];
            }
        }
        m
    }

    /// Writes the parameters of a Hermitian matrix into `x`.
    pub fn write_values(&self, m: &ComplexMatrix, x: &mut [f64]) {
        for (var, b) in self.basis() {
            x[var] = match b {
                HermitianBasis::Diagonal(r) => m[(r, r)].re,
                HermitianBasis::Real(r, col) => m[(r, col)].re,
                HermitianBasis::Imag(r, col) => m[(r, col)].im,
            };
        }
    }

    /// Equality rows for `Tr[G·H(x)] = target`.
    pub fn trace_equality(&self, g: &ComplexMatrix, target: f64) -> LinearEquality {
        let mut coeffs = Vec::new();
        for (var, b) in self.basis() {
            let v: f64 = b
                .entries()
                .into_iter()
                .map(|(r, col, val)| (g[(col, r)] * val).re)
                .sum();
            if v.abs() > 1e-15 {
                coeffs.push((var, v));
            }
        }
        LinearEquality::new(coeffs, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn hermitian_params_roundtrip() {
        let p = HermitianParams::new(3, 3);
        let m = ComplexMatrix::from_rows(&[
            vec![re(1.0), c(0.2, 0.3), c(-0.1, 0.0)],
            vec![c(0.2, -0.3), re(2.0), c(0.0, 0.5)],
            vec![c(-0.1, 0.0), c(0.0, -0.5), re(-1.0)],
        ])
        .unwrap();
        let mut x = vec![0.0; p.end()];
        p.write_values(&m, &mut x);
        assert!(p.matrix(&x).approx_eq(&m, 0.0));
        let mut aff = AffineHermitian::zero(3);
        p.push_identity(&mut aff, 1.0, 0);
        assert!(aff.evaluate(&x).approx_eq(&m, 1e-15));
        let g = ComplexMatrix::from_fn(3, 3, |r, col| c(r as f64 + 0.5, col as f64 - 1.0)).hermitian_part();
        let eq = p.trace_equality(&g, 0.0);
        assert!((eq.residual(&x) - g.trace_product(&m).re).abs() < 1e-14);
    }
}
