//! Petz maps, Markov reports and the hopping counterexample.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::car::{
    jw_paulis, occupation_projection, odd_part_norm, regional_subalgebra, FockRep, Region,
    Subalgebra,
};
use crate::entropy::ssa_residual;
use crate::error::{Error, Result};
use crate::linalg::{
    default_support_tol, distance, hermitian_eig, spectral_function, support_projection, Matrix,
    MatrixFunction, Norm,
};
use crate::states::{
    random_local_state, regularize, restrict, StateDensity, StateKind, Triple, TripleLabel,
};
use crate::tol;

fn operator_norm(x: &Matrix) -> Result<f64> {
    distance(x, &Matrix::zeros(x.dim()), Norm::Operator)
}

/// `K = ½(k_A† k_C − k_A k_C†)` for odd `k_A ∈ A_A`, `k_C ∈ A_C`.
pub fn hopping_operator(
    rep: &FockRep,
    k_a: &Matrix,
    a: &Region,
    k_c: &Matrix,
    c: &Region,
) -> Result<Matrix> {
    if !a.is_disjoint(c) {
        return Err(Error::OverlappingRegions);
    }
    for (k, region) in [(k_a, a), (k_c, c)] {
        rep.check_operator(k)?;
        let alg = regional_subalgebra(rep, region)?;
        let residual = alg.membership_residual(k);
        if residual > tol::ALGEBRA {
            return Err(Error::NotInSubalgebra { residual });
        }
        let (even, _) = crate::car::even_odd_split(rep, k)?;
        let residual = even.frobenius_norm();
        if residual > tol::EVEN {
            return Err(Error::NotOdd { residual });
        }
        let norm = operator_norm(k)?;
        if norm > 1.0 + tol::HERMITIAN {
            return Err(Error::NormTooLarge { norm });
        }
    }
    let k = &k_a.adjoint().matmul(k_c) - &k_a.matmul(&k_c.adjoint());
    Ok(k.scale_real(0.5))
}

/// Petz map `α` and its tracial dual `T#` for a state and a commuting square.
#[derive(Clone, Debug)]
pub struct PetzPair {
    ab: Subalgebra,
    rho_b_inv_sqrt: Matrix,
    rho_bc_sqrt: Matrix,
    /// `ρ_BC^{1/2} ρ_B^{−1/2}`
    left: Matrix,
    support_b: Matrix,
    identity_residual: f64,
}

impl PetzPair {
    /// `α(X) = ρ_B^{−1/2} E_AB(ρ_BC^{1/2} X ρ_BC^{1/2}) ρ_B^{−1/2}`
    pub fn alpha(&self, x: &Matrix) -> Matrix {
        let inner = x.sandwich(&self.rho_bc_sqrt, &self.rho_bc_sqrt);
        self.ab
            .project(&inner)
            .sandwich(&self.rho_b_inv_sqrt, &self.rho_b_inv_sqrt)
    }

    /// `T#(X) = ρ_BC^{1/2} ρ_B^{−1/2} X ρ_B^{−1/2} ρ_BC^{1/2}`
    pub fn t_sharp(&self, x: &Matrix) -> Matrix {
        x.sandwich(&self.left, &self.left.adjoint())
    }

    /// Support projection of `ρ_B`; `α(1)` equals it.
    pub fn support_b(&self) -> &Matrix {
        &self.support_b
    }

    /// `sqrt(τ|T#(ρ_B) − ρ_BC|²)`
    pub fn identity_residual(&self) -> f64 {
        self.identity_residual
    }
}

/// Builds `α` and `T#` with support-restricted inverse square roots.
pub fn petz_maps(psi: &StateDensity, triple: &Triple) -> Result<PetzPair> {
    triple.require_commuting_square()?;
    let rho_b = restrict(psi, triple.b());
    let rho_bc = restrict(psi, triple.bc());
    let eig_b = hermitian_eig(rho_b.rho())?;
    let cutoff = default_support_tol(&eig_b);
    let rho_b_inv_sqrt = spectral_function(&eig_b, MatrixFunction::InvSqrt, Some(cutoff))?;
    let support_b = support_projection(&eig_b, cutoff);
    let eig_bc = hermitian_eig(rho_bc.rho())?;
    let rho_bc_sqrt = spectral_function(
        &eig_bc,
        MatrixFunction::Sqrt,
        Some(default_support_tol(&eig_bc)),
    )?;
    let left = rho_bc_sqrt.matmul(&rho_b_inv_sqrt);
    let recovered = rho_b.rho().sandwich(&left, &left.adjoint());
    let identity_residual = (&recovered - rho_bc.rho()).tau_norm();
    if identity_residual > tol::SSA_SLACK {
        return Err(Error::SingularDensity {
            residual: identity_residual,
        });
    }
    Ok(PetzPair {
        ab: triple.ab().clone(),
        rho_b_inv_sqrt,
        rho_bc_sqrt,
        left,
        support_b,
        identity_residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub ssa_residual: f64,
    /// `τ|T#(ρ_AB) − ρ|`
    pub recovery_error: f64,
    /// `max ‖α(X) − P X P‖` over a basis of `A_A`, `P` the support of `ρ_B`.
    pub fixed_point_error: f64,
    /// Same over the even basis elements of `A_A`.
    pub fixed_point_error_even: f64,
    pub alpha_unit_error: f64,
    pub t_sharp_identity_residual: f64,
    pub odd_part_norm: f64,
    pub is_even: bool,
    pub verdict_by_residual: bool,
    pub verdict_by_recovery: bool,
    pub verdict: bool,
    /// The Petz maps were built from `regularize(ψ, 1e-9)`.
    pub regularized: bool,
    pub triple: TripleLabel,
}

impl MarkovReport {
    /// Strong additivity and Petz recovery agree.
    pub fn consistent(&self) -> bool {
        self.verdict_by_residual == self.verdict_by_recovery
    }
}

pub fn markov_report(rep: &FockRep, psi: &StateDensity, triple: &Triple) -> Result<MarkovReport> {
    let entropy = ssa_residual(psi, triple)?;
    let (petz, regularized) = match petz_maps(psi, triple) {
        Ok(p) => (p, false),
        Err(Error::SingularDensity { .. }) => (
            petz_maps(&regularize(psi, tol::REGULARIZATION)?, triple)?,
            true,
        ),
        Err(e) => return Err(e),
    };

    let rho_ab = restrict(psi, triple.ab());
    let rho = restrict(psi, triple.total());
    let recovery_error =
        distance(&petz.t_sharp(rho_ab.rho()), rho.rho(), Norm::Trace)? / rho.dim() as f64;

    let a_alg = regional_subalgebra(rep, &triple.label().a)?;
    let p = petz.support_b();
    let mut fixed_point_error: f64 = 0.0;
    let mut fixed_point_error_even: f64 = 0.0;
    for (k, e) in a_alg.basis().iter().enumerate() {
        let x = e.to_matrix();
        let err = (&petz.alpha(&x) - &x.sandwich(p, p)).tau_norm();
        fixed_point_error = fixed_point_error.max(err);
        if !a_alg.is_odd_element(k) {
            fixed_point_error_even = fixed_point_error_even.max(err);
        }
    }
    let alpha_unit_error = (&petz.alpha(&Matrix::identity(rep.dim())) - p).tau_norm();

    let odd = odd_part_norm(rep, psi.rho())?;
    let verdict_by_residual = entropy.residual.abs() <= tol::MARKOV;
    let verdict_by_recovery = recovery_error <= tol::MARKOV;
    Ok(MarkovReport {
        ssa_residual: entropy.residual,
        recovery_error,
        fixed_point_error,
        fixed_point_error_even,
        alpha_unit_error,
        t_sharp_identity_residual: petz.identity_residual(),
        odd_part_norm: odd,
        is_even: odd <= tol::EVEN,
        verdict_by_residual,
        verdict_by_recovery,
        verdict: verdict_by_residual && verdict_by_recovery,
        regularized,
        triple: triple.label().clone(),
    })
}

/// Even Markov state `Σ_s λ_s ρ_{A,s} ρ_{C,s} p_s/τ(p_s)` with random even
/// `ρ_{A,s}`, `ρ_{C,s}`, random weights and `p_s` running over all occupation
/// patterns of `B`.
pub fn even_markov_state(
    rep: &FockRep,
    a: &Region,
    b: &Region,
    c: &Region,
    seed: u64,
) -> Result<StateDensity> {
    if b.is_empty() {
        return Err(Error::InvalidRegion("B must be nonempty".into()));
    }
    let a_alg = regional_subalgebra(rep, a)?;
    let c_alg = regional_subalgebra(rep, c)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns = 1usize << b.len();
    let weights: Vec<f64> = (0..patterns).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = Matrix::zeros(rep.dim());
    for (s, w) in weights.iter().enumerate() {
        let rho_a = random_local_state(rep, &a_alg, StateKind::Even, rng.random());
        let rho_c = random_local_state(rep, &c_alg, StateKind::Even, rng.random());
        let p = occupation_projection(rep, b, s)?;
        let block = rho_a.rho().matmul(rho_c.rho()).matmul(&p);
        let scale = w / total / p.tau().re;
        rho.axpy(Complex64::new(scale, 0.0), &block);
    }
    Ok(StateDensity::from_parts(
        rep.n_modes(),
        rep.dim(),
        rho.hermitian_part(),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleComponent {
    pub weight: f64,
    /// Product state of the twisted pair `(A_A, Â_C)`.
    pub rho_ac: Matrix,
    /// Even projection `p_i ∈ A_B`.
    pub projection: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSpec {
    pub lambda: f64,
    pub k_a: Matrix,
    pub k_c: Matrix,
    pub n_b: usize,
    pub components: Vec<CounterexampleComponent>,
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub rep: FockRep,
    pub a: Region,
    pub b: Region,
    pub c: Region,
    /// `ω_ABC = Σ λ_i ρ_{AC,i} p_i / τ(p_i)`
    pub omega: StateDensity,
    /// `K` built from `k_A = a_A`, `k_C = a_C`.
    pub hopping: Matrix,
    /// `1 + λK`
    pub rho_lambda: StateDensity,
    pub spec: CounterexampleSpec,
}

pub const COUNTEREXAMPLE_COMPONENTS: usize = 5;

/// Counterexample on `1 + 3 + 1` modes.
pub fn counterexample(lambda: f64) -> Result<Counterexample> {
    counterexample_with_b(lambda, 3)
}

/// Counterexample on `1 + n_b + 1` modes, `A = {0}`, `C = {n_b + 1}`.
pub fn counterexample_with_b(lambda: f64, n_b: usize) -> Result<Counterexample> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::LambdaOutOfRange(lambda));
    }
    if !(3..=crate::car::MAX_MODES - 2).contains(&n_b) {
        return Err(Error::UnsupportedSize(format!(
            "B needs between 3 and {} modes, got {n_b}",
            crate::car::MAX_MODES - 2
        )));
    }
    let rep = FockRep::new(n_b + 2)?;
    let a = Region::span(0, 1);
    let b = Region::span(1, n_b);
    let c = Region::span(n_b + 1, 1);

    let k_a = rep.annihilator_matrix(0);
    let k_c = rep.annihilator_matrix(n_b + 1);
    let hopping = hopping_operator(&rep, &k_a, &a, &k_c, &c)?;
    let mut rho_lambda = hopping.scale_real(lambda);
    for i in 0..rep.dim() {
        rho_lambda[(i, i)] += 1.0;
    }

    let [one, xa, ya, _] = jw_paulis(&rep, 0, &Region::empty())?;
    let [_, xc, yc, _] = jw_paulis(&rep, n_b + 1, &a)?;
    let mut states = Vec::with_capacity(COUNTEREXAMPLE_COMPONENTS);
    for (pa, pc) in [(&xa, &xc), (&ya, &yc)] {
        for s in [1.0, -1.0] {
            let left = &one + &pa.scale_real(s);
            let right = &one - &pc.scale_real(s);
            states.push((lambda / 8.0, left.matmul(&right)));
        }
    }
    states.push((1.0 - lambda / 2.0, one.clone()));

    let mut omega = Matrix::zeros(rep.dim());
    let mut components = Vec::with_capacity(COUNTEREXAMPLE_COMPONENTS);
    for (i, (weight, rho_ac)) in states.into_iter().enumerate() {
        let projection = occupation_projection(&rep, &b, i)?;
        let block = rho_ac.matmul(&projection);
        omega.axpy(Complex64::new(weight / projection.tau().re, 0.0), &block);
        components.push(CounterexampleComponent {
            weight,
            rho_ac,
            projection,
        });
    }

    let n = rep.n_modes();
    let dim = rep.dim();
    Ok(Counterexample {
        omega: StateDensity::from_parts(n, dim, omega.hermitian_part()),
        rho_lambda: StateDensity::from_parts(n, 4, rho_lambda),
        spec: CounterexampleSpec {
            lambda,
            k_a,
            k_c,
            n_b,
            components,
        },
        hopping,
        rep,
        a,
        b,
        c,
    })
}

impl Counterexample {
    pub fn regional_triple(&self) -> Result<Triple> {
        Triple::regional(&self.rep, &self.a, &self.b, &self.c)
    }

    pub fn twisted_triple(&self) -> Result<Triple> {
        Triple::twisted(&self.rep, &self.a, &self.b, &self.c)
    }

    pub fn ac_algebra(&self) -> Result<Subalgebra> {
        regional_subalgebra(&self.rep, &self.a.union(&self.c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::car::{build_fock, gauge_average, grading};
    use crate::entropy::entropy_vn;
    use crate::states::{product_extension, random_state};

    fn regions() -> (Region, Region, Region) {
        (Region::span(0, 1), Region::span(1, 1), Region::span(2, 1))
    }

    #[test]
    fn hopping_operator_on_two_modes() {
        let rep = build_fock(2).unwrap();
        let (a, c) = (Region::span(0, 1), Region::span(1, 1));
        let k = hopping_operator(
            &rep,
            &rep.annihilator_matrix(0),
            &a,
            &rep.annihilator_matrix(1),
            &c,
        )
        .unwrap();
        assert!(k.hermiticity_residual() < 1e-15);
        let ev = hermitian_eig(&k).unwrap().eigenvalues;
        for (x, y) in ev.iter().zip([-0.5, 0.0, 0.0, 0.5]) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(grading(&rep, &k).unwrap(), k);
        assert_eq!(gauge_average(&rep, &k).unwrap(), k);
        assert!((k.matmul(&k).tau().re - 0.125).abs() < 1e-15);
    }

    #[test]
    fn hopping_operator_rejects_bad_inputs() {
        let rep = build_fock(2).unwrap();
        let (a, c) = (Region::span(0, 1), Region::span(1, 1));
        let a0 = rep.annihilator_matrix(0);
        let a1 = rep.annihilator_matrix(1);
        assert!(matches!(
            hopping_operator(&rep, &Matrix::identity(4), &a, &a1, &c),
            Err(Error::NotOdd { .. })
        ));
        assert!(matches!(
            hopping_operator(&rep, &a0.scale_real(2.0), &a, &a1, &c),
            Err(Error::NormTooLarge { .. })
        ));
        assert!(matches!(
            hopping_operator(&rep, &a1, &a, &a1, &c),
            Err(Error::NotInSubalgebra { .. })
        ));
        assert!(matches!(
            hopping_operator(&rep, &a0, &a, &a0, &a),
            Err(Error::OverlappingRegions)
        ));
    }

    #[test]
    fn petz_identities_for_random_states() {
        let rep = build_fock(3).unwrap();
        let (a, b, c) = regions();
        let triple = Triple::regional(&rep, &a, &b, &c).unwrap();
        for seed in 0..5 {
            let psi = random_state(&rep, StateKind::General, seed);
            let petz = petz_maps(&psi, &triple).unwrap();
            assert!(petz.identity_residual() < 1e-9);
            let one = Matrix::identity(8);
            assert!((&petz.alpha(&one) - &one).max_abs() < 1e-9);
            let y = random_state(&rep, StateKind::General, 100 + seed).into_matrix();
            for e in triple.ab().basis().iter().step_by(3) {
                let x = e.to_matrix();
                let lhs = petz.t_sharp(&x).adjoint().matmul(&y).tau();
                let rhs = x.adjoint().matmul(&petz.alpha(&y)).tau();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn even_product_state_is_markov() {
        let rep = build_fock(3).unwrap();
        let (a, b, c) = regions();
        let algs: Vec<Subalgebra> = [&a, &b, &c]
            .iter()
            .map(|r| regional_subalgebra(&rep, r).unwrap())
            .collect();
        let ab = regional_subalgebra(&rep, &a.union(&b)).unwrap();
        let states: Vec<StateDensity> = (0..3)
            .map(|s| random_state(&rep, StateKind::Even, s))
            .collect();
        let psi_ab = product_extension(&rep, &states[0], &algs[0], &states[1], &algs[1]).unwrap();
        let psi = product_extension(&rep, &psi_ab, &ab, &states[2], &algs[2]).unwrap();
        let report =
            markov_report(&rep, &psi, &Triple::regional(&rep, &a, &b, &c).unwrap()).unwrap();
        assert!(report.verdict, "{report:?}");
        assert!(report.ssa_residual.abs() < 1e-10);
        assert!(report.recovery_error < 1e-10);
        assert!(report.fixed_point_error < 1e-10);
        assert!(report.is_even);
    }

    #[test]
    fn generic_even_state_is_not_markov() {
        let rep = build_fock(3).unwrap();
        let (a, b, c) = regions();
        let triple = Triple::regional(&rep, &a, &b, &c).unwrap();
        for seed in 0..5 {
            let psi = random_state(&rep, StateKind::Even, seed);
            let report = markov_report(&rep, &psi, &triple).unwrap();
            assert!(!report.verdict);
            assert!(report.ssa_residual < -1e-4);
            assert!(report.recovery_error > 1e-4);
            assert!(report.consistent());
            assert!(report.fixed_point_error_even < 1e-9);
        }
    }

    #[test]
    fn constructed_even_markov_family() {
        let rep = build_fock(4).unwrap();
        let (a, b, c) = (Region::span(0, 1), Region::span(1, 2), Region::span(3, 1));
        let triple = Triple::regional(&rep, &a, &b, &c).unwrap();
        for seed in 0..3 {
            let psi = even_markov_state(&rep, &a, &b, &c, seed).unwrap();
            StateDensity::new(&rep, psi.rho().clone()).unwrap();
            let report = markov_report(&rep, &psi, &triple).unwrap();
            assert!(report.verdict, "{report:?}");
            assert!(report.is_even);
            assert!(!report.regularized);
            assert!(report.fixed_point_error < 1e-8);
        }
    }

    #[test]
    fn counterexample_weights_and_marginal() {
        let ce = counterexample(1.0).unwrap();
        let weights: Vec<f64> = ce.spec.components.iter().map(|c| c.weight).collect();
        assert_eq!(weights, vec![0.125, 0.125, 0.125, 0.125, 0.5]);
        StateDensity::new(&ce.rep, ce.omega.rho().clone()).unwrap();
        let marginal = restrict(&ce.omega, &ce.ac_algebra().unwrap());
        assert!((marginal.rho() - ce.rho_lambda.rho()).tau_norm() < 1e-10);
        assert!((marginal.expectation(&ce.hopping).re - 0.125).abs() < 1e-12);
        // spectrum of 1 + K on A ∪ C
        let local = ce.ac_algebra().unwrap().local_image(ce.rho_lambda.rho());
        let ev = hermitian_eig(&local).unwrap().eigenvalues;
        for (x, y) in ev.iter().zip([0.5, 1.0, 1.0, 1.5]) {
            assert!((x - y).abs() < 1e-12);
        }
        let s = entropy_vn(&ce.rho_lambda);
        let oracle = -[3.0f64 / 8.0, 1.0 / 8.0, 0.25, 0.25]
            .iter()
            .map(|p| p * p.ln())
            .sum::<f64>();
        assert!((s - oracle).abs() < 1e-12);
        for (i, comp) in ce.spec.components.iter().enumerate() {
            let p = &comp.projection;
            assert!((&p.matmul(p) - p).max_abs() < 1e-15);
            assert_eq!(&grading(&ce.rep, p).unwrap(), p);
            for other in &ce.spec.components[i + 1..] {
                assert!(p.matmul(&other.projection).max_abs() < 1e-15);
            }
        }
        assert!(matches!(
            counterexample(0.0),
            Err(Error::LambdaOutOfRange(_))
        ));
        assert!(matches!(
            counterexample(2.0),
            Err(Error::LambdaOutOfRange(_))
        ));
        assert!(matches!(
            counterexample_with_b(0.5, 2),
            Err(Error::UnsupportedSize(_))
        ));
    }

    #[test]
    fn counterexample_is_markov_for_the_twisted_triple() {
        for lambda in [0.25, 1.0] {
            let ce = counterexample(lambda).unwrap();
            let twisted = markov_report(&ce.rep, &ce.omega, &ce.twisted_triple().unwrap()).unwrap();
            assert!(twisted.verdict, "{twisted:?}");
            assert!(!twisted.is_even);
            let regional = ssa_residual(&ce.omega, &ce.regional_triple().unwrap()).unwrap();
            let expected = -lambda / 2.0 * std::f64::consts::LN_2;
            assert!((regional.residual - expected).abs() < 1e-9);
        }
    }
}
