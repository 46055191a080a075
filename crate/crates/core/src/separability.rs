//! Separability of bipartite graded pairs: hopping witness, partial-transpose
//! certificate on the Jordan–Wigner image, product decompositions and the
//! additivity/product analysis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::car::{
    even_odd_split, jw_paulis, odd_part_norm, regional_subalgebra, twisted_subalgebra, FockRep,
    Region, Subalgebra,
};
use crate::entropy::additivity_residual;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, matrix_function, Matrix, MatrixFunction};
use crate::markov::Counterexample;
use crate::states::{restrict, StateDensity};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairLabel {
    /// `(A_A, A_C)`
    Car { a: Region, c: Region },
    /// `(A_A, Â_C)` with `Â_C = {A_C,e, v_A A_C,o}`
    Twisted { a: Region, c: Region },
}

impl PairLabel {
    pub fn regions(&self) -> (&Region, &Region) {
        match self {
            PairLabel::Car { a, c } | PairLabel::Twisted { a, c } => (a, c),
        }
    }

    fn algebras(&self, rep: &FockRep) -> Result<(Subalgebra, Subalgebra)> {
        let (a, c) = self.regions();
        if !a.is_disjoint(c) {
            return Err(Error::OverlappingRegions);
        }
        let left = regional_subalgebra(rep, a)?;
        let right = match self {
            PairLabel::Car { .. } => regional_subalgebra(rep, c)?,
            PairLabel::Twisted { .. } => twisted_subalgebra(rep, c, a)?,
        };
        Ok((left, right))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Separable,
    Nonseparable,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    pub weight: f64,
    pub density: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityCertificate {
    pub pair: PairLabel,
    pub witness_value: f64,
    pub ppt_min_eigenvalue: Option<f64>,
    pub decomposition: Option<Vec<DecompositionTerm>>,
    pub verdict: Verdict,
}

/// `ω(K) = τ(ρ K)`
pub fn hopping_witness(omega: &StateDensity, k: &Matrix) -> f64 {
    omega.expectation(k).re
}

/// Two-qubit density `D = ¼ Σ_{μν} ω(P_μ Q_ν) σ_μ ⊗ σ_ν` with `P` the Pauli
/// images of `A_A` and `Q` those of `Â_C`; `Tr D = 1`.
pub fn jw_twist_image(
    rep: &FockRep,
    omega: &StateDensity,
    a: &Region,
    c: &Region,
) -> Result<Matrix> {
    if a.len() != 1 || c.len() != 1 {
        return Err(Error::UnsupportedSize(format!(
            "twisted image needs single-mode regions, got {} and {}",
            a.len(),
            c.len()
        )));
    }
    if !a.is_disjoint(c) {
        return Err(Error::OverlappingRegions);
    }
    let p = jw_paulis(rep, a.modes()[0], &Region::empty())?;
    let q = jw_paulis(rep, c.modes()[0], a)?;
    let sigma = pauli_matrices();
    let mut d = Matrix::zeros(4);
    for (pm, sm) in p.iter().zip(&sigma) {
        for (qn, sn) in q.iter().zip(&sigma) {
            let value = omega.expectation(&pm.matmul(qn));
            d.axpy(value * 0.25, &sm.kron(sn));
        }
    }
    Ok(d.hermitian_part())
}

fn pauli_matrices() -> [Matrix; 4] {
    let i = Complex64::new(0.0, 1.0);
    [
        Matrix::identity(2),
        Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]),
        Matrix::from_fn(2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => Complex64::new(0.0, 0.0),
        }),
        Matrix::from_diag(&[1.0, -1.0]),
    ]
}

/// Smallest eigenvalue of the partial transpose on the right factor.
pub fn ppt_min_eigenvalue(rho: &Matrix, left: usize, right: usize) -> Result<f64> {
    let pt = rho.partial_transpose_right(left, right)?;
    Ok(hermitian_eig(&pt)?.eigenvalues[0])
}

/// `max |ω(xy) − ω(x)ω(y)|` over basis pairs of the two algebras.
fn product_residual(rho: &Matrix, left: &Subalgebra, right: &Subalgebra) -> f64 {
    let omega = |x: &Matrix| x.matmul(rho).tau();
    let lefts: Vec<(Matrix, Complex64)> = left
        .basis()
        .iter()
        .map(|e| {
            let x = e.to_matrix();
            let w = omega(&x);
            (x, w)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for f in right.basis() {
        let wy = f.tau_product(rho);
        for (x, wx) in &lefts {
            let joint = f.tau_product(&rho.matmul(x));
            worst = worst.max((joint - wx * wy).norm());
        }
    }
    worst
}

/// Checks that the weighted components reconstruct `ω` on `A ∪ C` and that
/// each one is a product state for the labeled pair.
pub fn verify_decomposition(
    rep: &FockRep,
    cert: &SeparabilityCertificate,
    omega: &StateDensity,
) -> Result<bool> {
    let terms = cert
        .decomposition
        .as_ref()
        .ok_or_else(|| Error::InvalidDensity("certificate carries no decomposition".into()))?;
    let (left, right) = cert.pair.algebras(rep)?;
    let (a, c) = cert.pair.regions();
    let ac = regional_subalgebra(rep, &a.union(c))?;
    let target = restrict(omega, &ac);
    let mut sum = Matrix::zeros(rep.dim());
    for t in terms {
        rep.check_operator(&t.density)?;
        sum.axpy(Complex64::new(t.weight, 0.0), &t.density);
    }
    let residual = (&sum - target.rho()).tau_norm();
    if residual > tol::ALGEBRA {
        return Err(Error::ReconstructionFailed { residual });
    }
    for (index, t) in terms.iter().enumerate() {
        let residual = product_residual(&t.density, &left, &right);
        if residual > tol::PRODUCT {
            return Err(Error::ComponentNotProduct { index, residual });
        }
    }
    Ok(true)
}

/// Certificate for the counterexample marginal `ρ_λ` on the given pair.
pub fn certify(ce: &Counterexample, pair: PairLabel) -> Result<SeparabilityCertificate> {
    let marginal = restrict(&ce.omega, &ce.ac_algebra()?);
    let witness_value = hopping_witness(&marginal, &ce.hopping);
    let image = jw_twist_image(&ce.rep, &marginal, &ce.a, &ce.c)?;
    let ppt = ppt_min_eigenvalue(&image, 2, 2)?;
    let decomposition: Vec<DecompositionTerm> = ce
        .spec
        .components
        .iter()
        .map(|comp| DecompositionTerm {
            weight: comp.weight,
            density: comp.rho_ac.clone(),
        })
        .collect();
    let verdict = match pair {
        PairLabel::Car { .. } if witness_value.abs() > tol::WITNESS => Verdict::Nonseparable,
        PairLabel::Twisted { .. } if ppt >= -tol::PSD => Verdict::Separable,
        PairLabel::Twisted { .. } => Verdict::Nonseparable,
        PairLabel::Car { .. } => Verdict::Undecided,
    };
    Ok(SeparabilityCertificate {
        decomposition: matches!(pair, PairLabel::Twisted { .. }).then_some(decomposition),
        pair,
        witness_value,
        ppt_min_eigenvalue: Some(ppt),
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvenVerdict {
    AEven,
    CEven,
    BothEven,
    Neither,
}

/// Even/odd parts of `ρ_A^{1/2}`, `ρ_C^{1/2}` and the residuals of the
/// identities they satisfy for additive states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvenOddAnalysis {
    pub a_plus: Matrix,
    pub a_minus: Matrix,
    pub c_plus: Matrix,
    pub c_minus: Matrix,
    /// `ρ_AC − ρ_C^{1/2} ρ_A ρ_C^{1/2}`
    pub recovery_ac: f64,
    /// `ρ_AC − ρ_A^{1/2} ρ_C ρ_A^{1/2}`
    pub recovery_ca: f64,
    /// `a₊a₋c₊c₋ − a₋a₊c₋c₊`
    pub even_equation: f64,
    /// `a₋²(c₊c₋ + c₋c₊)`
    pub odd_equation_a: f64,
    /// `(a₊a₋ + a₋a₊)c₋²`
    pub odd_equation_c: f64,
    pub odd_norm_a: f64,
    pub odd_norm_c: f64,
    pub even_verdict: EvenVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub is_product: bool,
    pub product_residual: f64,
    pub additivity_residual: f64,
    pub analysis: EvenOddAnalysis,
}

pub fn even_odd_analysis(
    rep: &FockRep,
    omega: &StateDensity,
    a: &Subalgebra,
    c: &Subalgebra,
) -> Result<EvenOddAnalysis> {
    let ac = regional_subalgebra(rep, &a.region().union(c.region()))?;
    let rho_a = restrict(omega, a).into_matrix();
    let rho_c = restrict(omega, c).into_matrix();
    let rho_ac = restrict(omega, &ac).into_matrix();
    let sqrt_a = matrix_function(&rho_a, MatrixFunction::Sqrt, None)?;
    let sqrt_c = matrix_function(&rho_c, MatrixFunction::Sqrt, None)?;
    let (a_plus, a_minus) = even_odd_split(rep, &sqrt_a)?;
    let (c_plus, c_minus) = even_odd_split(rep, &sqrt_c)?;

    let recovery_ac = (&rho_ac - &rho_a.sandwich(&sqrt_c, &sqrt_c)).tau_norm();
    let recovery_ca = (&rho_ac - &rho_c.sandwich(&sqrt_a, &sqrt_a)).tau_norm();
    let even_equation = (&a_plus.matmul(&a_minus).matmul(&c_plus).matmul(&c_minus)
        - &a_minus.matmul(&a_plus).matmul(&c_minus).matmul(&c_plus))
        .tau_norm();
    let odd_equation_a = a_minus
        .matmul(&a_minus)
        .matmul(&c_plus.anticommutator(&c_minus))
        .tau_norm();
    let odd_equation_c = a_plus
        .anticommutator(&a_minus)
        .matmul(&c_minus.matmul(&c_minus))
        .tau_norm();

    let odd_norm_a = odd_part_norm(rep, &rho_a)?;
    let odd_norm_c = odd_part_norm(rep, &rho_c)?;
    let even_verdict = match (odd_norm_a <= tol::ODD_PART, odd_norm_c <= tol::ODD_PART) {
        (true, true) => EvenVerdict::BothEven,
        (true, false) => EvenVerdict::AEven,
        (false, true) => EvenVerdict::CEven,
        (false, false) => EvenVerdict::Neither,
    };
    Ok(EvenOddAnalysis {
        a_plus,
        a_minus,
        c_plus,
        c_minus,
        recovery_ac,
        recovery_ca,
        even_equation,
        odd_equation_a,
        odd_equation_c,
        odd_norm_a,
        odd_norm_c,
        even_verdict,
    })
}

/// Product test on spanning monomial pairs of `(A_A, A_C)`, with the
/// additivity residual and the even/odd analysis.
pub fn product_check(
    rep: &FockRep,
    omega: &StateDensity,
    a: &Region,
    c: &Region,
) -> Result<ProductCheck> {
    if !a.is_disjoint(c) {
        return Err(Error::OverlappingRegions);
    }
    let a_alg = regional_subalgebra(rep, a)?;
    let c_alg = regional_subalgebra(rep, c)?;
    let product_residual = product_residual(omega.rho(), &a_alg, &c_alg);
    Ok(ProductCheck {
        is_product: product_residual <= tol::PRODUCT,
        product_residual,
        additivity_residual: additivity_residual(rep, omega, &a_alg, &c_alg)?,
        analysis: even_odd_analysis(rep, omega, &a_alg, &c_alg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::build_fock;
    use crate::markov::{counterexample, hopping_operator};
    use crate::states::{product_extension, random_state, StateKind};

    fn two_modes() -> (FockRep, Region, Region) {
        (
            build_fock(2).unwrap(),
            Region::span(0, 1),
            Region::span(1, 1),
        )
    }

    fn rho_lambda(rep: &FockRep, a: &Region, c: &Region, lambda: f64) -> (StateDensity, Matrix) {
        let k = hopping_operator(
            rep,
            &rep.annihilator_matrix(0),
            a,
            &rep.annihilator_matrix(1),
            c,
        )
        .unwrap();
        let mut rho = k.scale_real(lambda);
        for i in 0..4 {
            rho[(i, i)] += 1.0;
        }
        (StateDensity::new(rep, rho).unwrap(), k)
    }

    #[test]
    fn witness_values() {
        let (rep, a, c) = two_modes();
        let (rho, k) = rho_lambda(&rep, &a, &c, 1.0);
        assert!((hopping_witness(&rho, &k) - 0.125).abs() < 1e-15);
        assert_eq!(hopping_witness(&StateDensity::tracial(&rep), &k), 0.0);
        let a_alg = regional_subalgebra(&rep, &a).unwrap();
        let c_alg = regional_subalgebra(&rep, &c).unwrap();
        let phi = random_state(&rep, StateKind::Even, 1);
        let psi = random_state(&rep, StateKind::General, 2);
        let product = product_extension(&rep, &psi, &a_alg, &phi, &c_alg).unwrap();
        assert!(hopping_witness(&product, &k).abs() < 1e-10);
    }

    #[test]
    fn twisted_image_of_rho_lambda() {
        let (rep, a, c) = two_modes();
        let (rho, _) = rho_lambda(&rep, &a, &c, 1.0);
        let image = jw_twist_image(&rep, &rho, &a, &c).unwrap();
        let [one, x, y, _] = pauli_matrices();
        let xx = x.kron(&x);
        let yy = y.kron(&y);
        let expected = &one.kron(&one).scale_real(0.25) - &(&xx + &yy).scale_real(1.0 / 16.0);
        assert!((&image - &expected).max_abs() < 1e-15);
        let ppt = ppt_min_eigenvalue(&image, 2, 2).unwrap();
        assert!((ppt - 0.125).abs() < 1e-14);

        let tracial = jw_twist_image(&rep, &StateDensity::tracial(&rep), &a, &c).unwrap();
        assert!((&tracial - &Matrix::identity(4).scale_real(0.25)).max_abs() < 1e-15);
        assert!(matches!(
            jw_twist_image(
                &build_fock(3).unwrap(),
                &StateDensity::tracial(&build_fock(3).unwrap()),
                &Region::span(0, 2),
                &Region::span(2, 1)
            ),
            Err(Error::UnsupportedSize(_))
        ));
    }

    #[test]
    fn twisted_image_preserves_expectations_of_a() {
        let (rep, a, c) = two_modes();
        let phi = random_state(&rep, StateKind::General, 4);
        let image = jw_twist_image(&rep, &phi, &a, &c).unwrap();
        let p = jw_paulis(&rep, 0, &Region::empty()).unwrap();
        let sigma = pauli_matrices();
        for (pm, sm) in p.iter().zip(&sigma) {
            let lhs = phi.expectation(pm);
            let rhs = image.matmul(&sm.kron(&Matrix::identity(2))).trace();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn ppt_reference_states() {
        let bell = Matrix::from_fn(4, |r, c| {
            let on = |i: usize| i == 0 || i == 3;
            Complex64::new(if on(r) && on(c) { 0.5 } else { 0.0 }, 0.0)
        });
        assert!((ppt_min_eigenvalue(&bell, 2, 2).unwrap() + 0.5).abs() < 1e-14);
        let product = Matrix::from_diag(&[1.0, 0.0, 0.0, 0.0]);
        assert!(ppt_min_eigenvalue(&product, 2, 2).unwrap().abs() < 1e-14);
        assert!(matches!(
            ppt_min_eigenvalue(&bell, 3, 2),
            Err(Error::BadSplit { .. })
        ));
    }

    #[test]
    fn counterexample_decomposition() {
        let ce = counterexample(1.0).unwrap();
        let (a, c) = (ce.a.clone(), ce.c.clone());
        let twisted = certify(
            &ce,
            PairLabel::Twisted {
                a: a.clone(),
                c: c.clone(),
            },
        )
        .unwrap();
        assert_eq!(twisted.verdict, Verdict::Separable);
        assert!(verify_decomposition(&ce.rep, &twisted, &ce.omega).unwrap());
        let car = certify(
            &ce,
            PairLabel::Car {
                a: a.clone(),
                c: c.clone(),
            },
        )
        .unwrap();
        assert_eq!(car.verdict, Verdict::Nonseparable);
        let mut as_car = twisted.clone();
        as_car.pair = PairLabel::Car { a, c };
        assert!(matches!(
            verify_decomposition(&ce.rep, &as_car, &ce.omega),
            Err(Error::ComponentNotProduct { .. })
        ));
    }

    #[test]
    fn tracial_decomposition_is_product_for_both_pairs() {
        let (rep, a, c) = two_modes();
        let tracial = StateDensity::tracial(&rep);
        for pair in [
            PairLabel::Car {
                a: a.clone(),
                c: c.clone(),
            },
            PairLabel::Twisted {
                a: a.clone(),
                c: c.clone(),
            },
        ] {
            let cert = SeparabilityCertificate {
                pair,
                witness_value: 0.0,
                ppt_min_eigenvalue: None,
                decomposition: Some(vec![DecompositionTerm {
                    weight: 1.0,
                    density: Matrix::identity(4),
                }]),
                verdict: Verdict::Separable,
            };
            assert!(verify_decomposition(&rep, &cert, &tracial).unwrap());
        }
        let bad = SeparabilityCertificate {
            pair: PairLabel::Car { a, c },
            witness_value: 0.0,
            ppt_min_eigenvalue: None,
            decomposition: Some(vec![DecompositionTerm {
                weight: 0.5,
                density: Matrix::identity(4),
            }]),
            verdict: Verdict::Separable,
        };
        assert!(matches!(
            verify_decomposition(&rep, &bad, &tracial),
            Err(Error::ReconstructionFailed { .. })
        ));
    }

    #[test]
    fn product_check_cases() {
        let (rep, a, c) = two_modes();
        let a_alg = regional_subalgebra(&rep, &a).unwrap();
        let c_alg = regional_subalgebra(&rep, &c).unwrap();
        let phi = random_state(&rep, StateKind::Even, 7);
        let psi = random_state(&rep, StateKind::General, 8);
        let product = product_extension(&rep, &phi, &a_alg, &psi, &c_alg).unwrap();
        let check = product_check(&rep, &product, &a, &c).unwrap();
        assert!(check.is_product);
        assert!(check.additivity_residual.abs() < 1e-10);
        assert!(matches!(
            check.analysis.even_verdict,
            EvenVerdict::AEven | EvenVerdict::BothEven
        ));
        assert!(check.analysis.a_minus.max_abs() < 1e-12);
        assert!(check.analysis.recovery_ac < 1e-9 && check.analysis.recovery_ca < 1e-9);
        let sqrt_a = &check.analysis.a_plus + &check.analysis.a_minus;
        let direct =
            matrix_function(restrict(&product, &a_alg).rho(), MatrixFunction::Sqrt, None).unwrap();
        assert_eq!(sqrt_a, direct);

        let (rho, _) = rho_lambda(&rep, &a, &c, 1.0);
        let check = product_check(&rep, &rho, &a, &c).unwrap();
        assert!(!check.is_product);
        assert!(check.additivity_residual < -1e-3);
        assert!(matches!(
            product_check(&rep, &rho, &a, &a),
            Err(Error::OverlappingRegions)
        ));
    }
}
