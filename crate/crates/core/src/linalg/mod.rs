//! Dense complex linear algebra: Hermitian eigendecomposition, spectral
//! matrix functions with a support convention, and matrix distances.

mod eig;
mod matrix;

pub use eig::{hermitian_eig, HermitianEig};
pub use matrix::Matrix;

use crate::error::{Error, Result};

/// Spectral function applied on the support of a positive semidefinite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    Log,
    Sqrt,
    InvSqrt,
    Power(f64),
}

impl MatrixFunction {
    fn on_support(self, x: f64) -> f64 {
        match self {
            MatrixFunction::Log => x.ln(),
            MatrixFunction::Sqrt => x.sqrt(),
            MatrixFunction::InvSqrt => 1.0 / x.sqrt(),
            MatrixFunction::Power(p) => x.powf(p),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Frobenius,
    Operator,
    Trace,
}

/// `dim · ε · max|λ|`, the usual pseudo-inverse cutoff.
pub fn default_support_tol(eig: &HermitianEig) -> f64 {
    eig.eigenvalues.len() as f64 * f64::EPSILON * eig.max_abs_eigenvalue()
}

/// Applies `f` to the eigenvalues above `support_tol`; eigenvalues at or below
/// it (down to `-support_tol`) are mapped to zero.
pub fn matrix_function(m: &Matrix, f: MatrixFunction, support_tol: Option<f64>) -> Result<Matrix> {
    let eig = hermitian_eig(m)?;
    spectral_function(&eig, f, support_tol)
}

/// Same as [`matrix_function`] for an already computed decomposition.
pub fn spectral_function(
    eig: &HermitianEig,
    f: MatrixFunction,
    support_tol: Option<f64>,
) -> Result<Matrix> {
    let cutoff = support_tol.unwrap_or_else(|| default_support_tol(eig));
    if let Some(&lowest) = eig.eigenvalues.first() {
        if lowest < -cutoff {
            return Err(Error::NegativeEigenvalue { value: lowest });
        }
    }
    Ok(eig.map(|l| if l > cutoff { f.on_support(l) } else { 0.0 }))
}

/// Orthogonal projection onto the eigenvectors with eigenvalue above `cutoff`.
pub fn support_projection(eig: &HermitianEig, cutoff: f64) -> Matrix {
    eig.map(|l| if l > cutoff { 1.0 } else { 0.0 })
}

pub fn distance(a: &Matrix, b: &Matrix, norm: Norm) -> Result<f64> {
    a.check_same_dim(b)?;
    let d = a - b;
    Ok(match norm {
        Norm::Frobenius => d.frobenius_norm(),
        Norm::Operator => singular_values(&d)?.into_iter().fold(0.0, f64::max),
        Norm::Trace => singular_values(&d)?.into_iter().sum(),
    })
}

/// Singular values; uses the spectrum directly when the input is Hermitian.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if m.hermiticity_residual() <= crate::tol::HERMITIAN {
        return Ok(hermitian_eig(m)?
            .eigenvalues
            .into_iter()
            .map(f64::abs)
            .collect());
    }
    let gram = m.adjoint().matmul(m);
    Ok(hermitian_eig(&gram.hermitian_part())?
        .eigenvalues
        .into_iter()
        .map(|x| x.max(0.0).sqrt())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn random_matrix(dim: usize, entries: &[(f64, f64)]) -> Matrix {
        Matrix::from_fn(dim, |r, c| {
            let (re, im) = entries[(r * dim + c) % entries.len()];
            Complex64::new(re, im)
        })
    }

    #[test]
    fn pauli_spectra() {
        let z = Matrix::from_diag(&[1.0, -1.0]);
        assert!(close(
            &hermitian_eig(&z).unwrap().eigenvalues,
            &[-1.0, 1.0],
            1e-15
        ));
        let x = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(close(
            &hermitian_eig(&x).unwrap().eigenvalues,
            &[-1.0, 1.0],
            1e-15
        ));
        let y = Matrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => Complex64::new(0.0, -1.0),
            (1, 0) => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.0, 0.0),
        });
        assert!(close(
            &hermitian_eig(&y).unwrap().eigenvalues,
            &[-1.0, 1.0],
            1e-15
        ));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            hermitian_eig(&m),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn spectral_functions_on_diagonals() {
        let log_i = matrix_function(&Matrix::identity(3), MatrixFunction::Log, None).unwrap();
        assert!(log_i.max_abs() < 1e-15);

        let s =
            matrix_function(&Matrix::from_diag(&[4.0, 9.0]), MatrixFunction::Sqrt, None).unwrap();
        assert!((&s - &Matrix::from_diag(&[2.0, 3.0])).max_abs() < 1e-14);

        let inv = matrix_function(
            &Matrix::from_diag(&[0.0, 4.0]),
            MatrixFunction::InvSqrt,
            None,
        )
        .unwrap();
        assert!((&inv - &Matrix::from_diag(&[0.0, 0.5])).max_abs() < 1e-15);

        let p = matrix_function(
            &Matrix::from_diag(&[0.0, 8.0]),
            MatrixFunction::Power(1.0 / 3.0),
            None,
        )
        .unwrap();
        assert!((&p - &Matrix::from_diag(&[0.0, 2.0])).max_abs() < 1e-14);
    }

    #[test]
    fn negative_eigenvalue_is_reported() {
        let m = Matrix::from_diag(&[-0.1, 1.0]);
        assert!(matches!(
            matrix_function(&m, MatrixFunction::Sqrt, None),
            Err(Error::NegativeEigenvalue { .. })
        ));
        // inside an explicit tolerance the eigenvalue is treated as kernel
        let ok = matrix_function(&m, MatrixFunction::Sqrt, Some(0.2)).unwrap();
        assert!((&ok - &Matrix::from_diag(&[0.0, 1.0])).max_abs() < 1e-15);
    }

    #[test]
    fn support_projection_is_idempotent() {
        let m = Matrix::from_diag(&[0.0, 2.0, 5.0]);
        let eig = hermitian_eig(&m).unwrap();
        let p = support_projection(&eig, default_support_tol(&eig));
        assert!((&p.matmul(&p) - &p).max_abs() < 1e-15);
        let p2 = support_projection(&hermitian_eig(&p).unwrap(), 1e-12);
        assert!((&p2 - &p).max_abs() < 1e-14);
    }

    #[test]
    fn distances() {
        let x = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        for norm in [Norm::Frobenius, Norm::Operator, Norm::Trace] {
            assert_eq!(distance(&x, &x, norm).unwrap(), 0.0);
        }
        let d = distance(
            &Matrix::from_diag(&[1.0, 0.0]),
            &Matrix::zeros(2),
            Norm::Trace,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        let d = distance(
            &Matrix::from_diag(&[1.0, -1.0]),
            &Matrix::zeros(2),
            Norm::Operator,
        )
        .unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        // non-Hermitian difference goes through singular values
        let n = Matrix::from_real_rows(&[&[0.0, 3.0], &[0.0, 0.0]]);
        assert!((distance(&n, &Matrix::zeros(2), Norm::Trace).unwrap() - 3.0).abs() < 1e-14);
        assert!(matches!(
            distance(&Matrix::zeros(2), &Matrix::zeros(3), Norm::Frobenius),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    fn hermitian_strategy(max_dim: usize) -> impl Strategy<Value = Matrix> {
        (1..=max_dim).prop_flat_map(|dim| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim * dim)
                .prop_map(move |entries| random_matrix(dim, &entries).hermitian_part())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn eig_reconstructs_and_is_unitary(m in hermitian_strategy(24)) {
            let eig = hermitian_eig(&m).unwrap();
            let dim = m.dim() as f64;
            let rec = (&eig.reconstruct() - &m).frobenius_norm();
            prop_assert!(rec <= dim * 1e-12 * m.frobenius_norm().max(1e-300));
            let u = &eig.eigenvectors;
            let gram = u.adjoint().matmul(u);
            prop_assert!((&gram - &Matrix::identity(m.dim())).max_abs() <= 1e-12);
            prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            let sum: f64 = eig.eigenvalues.iter().sum();
            prop_assert!((sum - m.trace().re).abs() <= 1e-10);
        }

        #[test]
        fn exp_of_log_round_trips(m in hermitian_strategy(16)) {
            let shifted = &m.matmul(&m) + &Matrix::identity(m.dim());
            let eig = hermitian_eig(&shifted).unwrap();
            let log = spectral_function(&eig, MatrixFunction::Log, None).unwrap();
            let back = hermitian_eig(&log).unwrap().map(f64::exp);
            prop_assert!((&back - &shifted).max_abs() <= 1e-9 * shifted.max_abs());
        }

        #[test]
        fn sqrt_squares_back(m in hermitian_strategy(16)) {
            let psd = m.matmul(&m);
            let s = matrix_function(&psd, MatrixFunction::Sqrt, None).unwrap();
            prop_assert!((&s.matmul(&s) - &psd).max_abs() <= 1e-10 * psd.max_abs().max(1.0));
        }
    }
}
