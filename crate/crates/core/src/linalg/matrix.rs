use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major data; fails unless `data.len()` is a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Real matrix from nested rows, for tests and small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |r, c| Complex64::new(rows[r][c], 0.0))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn check_same_dim(&self, other: &Matrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        Matrix::from_fn(n, |r, c| self.data[c * n + r].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// Normalized trace `Tr(X)/dim`, the tracial state on the full matrix algebra.
    pub fn tau(&self) -> Complex64 {
        self.trace() / self.dim as f64
    }

    pub fn diag_real(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim + i].re)
            .collect()
    }

    pub fn scale(&self, s: Complex64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: Complex64, other: &Matrix) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let out_row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Matrix { dim: n, data: out }
    }

    /// `X Y X†`-style sandwich `a * self * b`.
    pub fn sandwich(&self, left: &Matrix, right: &Matrix) -> Matrix {
        left.matmul(self).matmul(right)
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn anticommutator(&self, other: &Matrix) -> Matrix {
        &self.matmul(other) + &other.matmul(self)
    }

    /// `(X + X†)/2`
    pub fn hermitian_part(&self) -> Matrix {
        let n = self.dim;
        Matrix::from_fn(n, |r, c| {
            (self.data[r * n + c] + self.data[c * n + r].conj()) * 0.5
        })
    }

    /// `‖X − X†‖_F / max(‖X‖_F, 1)`
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim;
        let mut acc = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                acc += 2.0 * (self.data[r * n + c] - self.data[c * n + r].conj()).norm_sqr();
            }
            acc += (2.0 * self.data[r * n + r].im).powi(2);
        }
        acc.sqrt() / self.frobenius_norm().max(1.0)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Normalized Hilbert–Schmidt norm `sqrt(τ(X†X))`; equals 1 on unitaries of any size.
    pub fn tau_norm(&self) -> f64 {
        self.frobenius_norm() / (self.dim as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Conjugation by a diagonal matrix: `D X D†`.
    pub fn conjugate_by_diag(&self, diag: &[Complex64]) -> Matrix {
        let n = self.dim;
        assert_eq!(diag.len(), n);
        Matrix::from_fn(n, |r, c| diag[r] * self.data[r * n + c] * diag[c].conj())
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (n, m) = (self.dim, other.dim);
        Matrix::from_fn(n * m, |r, c| {
            self.data[(r / m) * n + c / m] * other.data[(r % m) * m + c % m]
        })
    }

    /// Partial transpose on the right factor of a `left ⊗ right` split.
    pub fn partial_transpose_right(&self, left: usize, right: usize) -> Result<Matrix> {
        if left * right != self.dim || left == 0 {
            return Err(Error::BadSplit {
                left,
                right,
                dim: self.dim,
            });
        }
        let n = self.dim;
        Ok(Matrix::from_fn(n, |r, c| {
            let (i, j) = (r / right, r % right);
            let (k, l) = (c / right, c % right);
            self.data[(i * right + l) * n + (k * right + j)]
        }))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale_real(-1.0)
    }
}

impl AddAssign<&Matrix> for Matrix {
    fn add_assign(&mut self, rhs: &Matrix) {
        self.axpy(ONE, rhs);
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:>9.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Wire form: `{"dim": n, "data": [[re, im], ...]}` in row-major order.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            dim: self.dim,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::deserialize(deserializer)?;
        if repr.data.len() != repr.dim * repr.dim {
            return Err(D::Error::custom(format!(
                "declared dimension {} needs {} entries, found {}",
                repr.dim,
                repr.dim * repr.dim,
                repr.data.len()
            )));
        }
        Ok(Matrix {
            dim: repr.dim,
            data: repr
                .data
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_transpose_of_product_is_product_of_transposes() {
        let a = Matrix::from_fn(2, |r, c| Complex64::new((r + 2 * c) as f64, r as f64));
        let b = Matrix::from_fn(3, |r, c| Complex64::new((r * c) as f64, c as f64 - 1.0));
        let bt = Matrix::from_fn(3, |r, c| b[(c, r)]);
        let pt = a.kron(&b).partial_transpose_right(2, 3).unwrap();
        assert_eq!(pt, a.kron(&bt));
        assert!(matches!(
            a.kron(&b).partial_transpose_right(4, 2),
            Err(Error::BadSplit { .. })
        ));
    }

    #[test]
    fn hermiticity_residual_detects_asymmetry() {
        let h = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        assert_eq!(h.hermiticity_residual(), 0.0);
        let nh = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(nh.hermiticity_residual() > 0.5);
    }

    #[test]
    fn json_wire_form() {
        let m = Matrix::from_fn(2, |r, c| Complex64::new(r as f64, c as f64));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"dim":2,"data":[[0.0,0.0],[0.0,1.0],[1.0,0.0],[1.0,1.0]]}"#
        );
        let bad = r#"{"dim":3,"data":[[0.0,0.0]]}"#;
        assert!(serde_json::from_str::<Matrix>(bad).is_err());
    }
}
