use num_complex::Complex64;

use crate::linalg::Matrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Operator with at most one nonzero entry per row and per column.
///
/// Jordan–Wigner images of CAR monomials (products of `a_i`, `a_i†`, `v_i`
/// and diagonal sign strings) all have this shape, so inner products and
/// projections against them cost `O(dim)` instead of `O(dim²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialOp {
    cols: Vec<u32>,
    vals: Vec<Complex64>,
}

impl MonomialOp {
    pub fn identity(dim: usize) -> Self {
        Self {
            cols: (0..dim as u32).collect(),
            vals: vec![Complex64::new(1.0, 0.0); dim],
        }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self {
            cols: (0..diag.len() as u32).collect(),
            vals: diag.iter().map(|&d| Complex64::new(d, 0.0)).collect(),
        }
    }

    /// Row `r` holds `vals[r]` in column `cols[r]`; zero rows keep `cols[r] = r`.
    pub(crate) fn from_parts(cols: Vec<u32>, vals: Vec<Complex64>) -> Self {
        debug_assert_eq!(cols.len(), vals.len());
        Self { cols, vals }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.vals.len()
    }

    pub fn entry(&self, row: usize) -> (usize, Complex64) {
        (self.cols[row] as usize, self.vals[row])
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            cols: self.cols.clone(),
            vals: self.vals.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul(&self, rhs: &MonomialOp) -> MonomialOp {
        debug_assert_eq!(self.dim(), rhs.dim());
        let mut cols = Vec::with_capacity(self.dim());
        let mut vals = Vec::with_capacity(self.dim());
        for r in 0..self.dim() {
            let (mid, v1) = self.entry(r);
            if v1 == ZERO {
                cols.push(r as u32);
                vals.push(ZERO);
                continue;
            }
            let (c, v2) = rhs.entry(mid);
            cols.push(c as u32);
            vals.push(v1 * v2);
        }
        MonomialOp { cols, vals }
    }

    /// Left multiplication by a diagonal matrix.
    pub fn left_diag(&self, diag: &[f64]) -> MonomialOp {
        MonomialOp {
            cols: self.cols.clone(),
            vals: self.vals.iter().zip(diag).map(|(v, d)| v * d).collect(),
        }
    }

    pub fn adjoint(&self) -> MonomialOp {
        let n = self.dim();
        let mut cols: Vec<u32> = (0..n as u32).collect();
        let mut vals = vec![ZERO; n];
        for r in 0..n {
            let (c, v) = self.entry(r);
            if v != ZERO {
                debug_assert_eq!(vals[c], ZERO, "two nonzeros in one column");
                cols[c] = r as u32;
                vals[c] = v.conj();
            }
        }
        MonomialOp { cols, vals }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim());
        for r in 0..self.dim() {
            let (c, v) = self.entry(r);
            if v != ZERO {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// `τ(self† X) = Tr(self† X) / dim`.
    pub fn tau_inner(&self, x: &Matrix) -> Complex64 {
        debug_assert_eq!(self.dim(), x.dim());
        let mut acc = ZERO;
        for r in 0..self.dim() {
            let (c, v) = self.entry(r);
            if v != ZERO {
                acc += v.conj() * x[(r, c)];
            }
        }
        acc / self.dim() as f64
    }

    /// `τ(self† other)` between two monomials.
    pub fn tau_inner_monomial(&self, other: &MonomialOp) -> Complex64 {
        let mut acc = ZERO;
        for r in 0..self.dim() {
            let (c, v) = self.entry(r);
            let (c2, w) = other.entry(r);
            if v != ZERO && c == c2 {
                acc += v.conj() * w;
            }
        }
        acc / self.dim() as f64
    }

    /// `out += s * self`
    pub fn add_scaled_into(&self, s: Complex64, out: &mut Matrix) {
        if s == ZERO {
            return;
        }
        for r in 0..self.dim() {
            let (c, v) = self.entry(r);
            if v != ZERO {
                out[(r, c)] += s * v;
            }
        }
    }

    /// `τ(self · X)` for a dense `X`.
    pub fn tau_product(&self, x: &Matrix) -> Complex64 {
        // Tr(M X) = Σ_r M[r, c_r] X[c_r, r]
        let mut acc = ZERO;
        for r in 0..self.dim() {
            let (c, v) = self.entry(r);
            if v != ZERO {
                acc += v * x[(c, r)];
            }
        }
        acc / self.dim() as f64
    }
}
