//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies the classical real Jacobi rotation to the
//! resulting real symmetric 2x2 block. Sweeps continue until the off-diagonal
//! Frobenius mass falls below `1e-15 * ‖M‖_F`.

use num_complex::Complex64;

use super::Matrix;
use crate::error::{Error, Result};
use crate::tol;

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TARGET: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl HermitianEig {
    /// `U diag(f(λ)) U†`
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Matrix {
        let n = self.eigenvalues.len();
        let fvals: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let u = &self.eigenvectors;
        let mut out = Matrix::zeros(n);
        for (k, &fk) in fvals.iter().enumerate() {
            if fk == 0.0 {
                continue;
            }
            for r in 0..n {
                let urk = u[(r, k)] * fk;
                if urk == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += urk * u[(c, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.map(|l| l)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &Matrix) -> Result<HermitianEig> {
    let residual = m.hermiticity_residual();
    if residual > tol::HERMITIAN {
        return Err(Error::NonHermitianInput { residual });
    }
    Ok(jacobi(&m.hermitian_part()))
}

fn jacobi(m: &Matrix) -> HermitianEig {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal(&a) <= OFF_DIAGONAL_TARGET * scale {
                break;
            }
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotated |= rotate(&mut a, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = a.diag_real();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = Matrix::from_fn(n, |r, c| v[(r, order[c])]);
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

fn off_diagonal(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for r in 0..n {
        for c in (r + 1)..n {
            acc += a[(r, c)].norm_sqr();
        }
    }
    (2.0 * acc).sqrt()
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) -> bool {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return false;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Already negligible relative to both diagonal entries.
    if mag < f64::EPSILON * 1e-3 * app.abs().min(aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return false;
    }

    let phase_conj = (apq / mag).conj();
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase_conj * -s;
    let u_qq = phase_conj * c;

    let n = a.dim();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }

    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(app - t * mag, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * mag, 0.0);
    true
}
