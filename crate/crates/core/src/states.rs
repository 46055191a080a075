//! Densities with respect to the tracial state, conditional expectations and
//! the commuting-square check for triples of subalgebras.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::car::{
    gauge_average, grading, odd_part_norm, regional_subalgebra, twisted_subalgebra, FockRep,
    Region, Subalgebra,
};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, Matrix};
use crate::tol;

/// Density `ρ` of a state with respect to `τ`: `φ(x) = τ(ρ x)`.
///
/// `factor_dim` is the dimension `d` of the factor `M_d` the state lives on;
/// it is `2^n` for states on the whole system and smaller for restrictions,
/// which are still stored as operators on the parent space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDensity {
    n_modes: usize,
    factor_dim: usize,
    rho: Matrix,
}

impl StateDensity {
    pub fn new(rep: &FockRep, rho: Matrix) -> Result<Self> {
        rep.check_operator(&rho)?;
        let eig = hermitian_eig(&rho)
            .map_err(|_| Error::InvalidDensity("density is not Hermitian".into()))?;
        let lowest = eig.eigenvalues.first().copied().unwrap_or(0.0);
        if lowest < -tol::PSD {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {lowest:e} is negative"
            )));
        }
        let t = rho.tau();
        if (t.re - 1.0).abs() > tol::NORMALIZATION || t.im.abs() > tol::NORMALIZATION {
            return Err(Error::InvalidDensity(format!("τ(ρ) = {t} instead of 1")));
        }
        Ok(Self::from_parts(
            rep.n_modes(),
            rep.dim(),
            rho.hermitian_part(),
        ))
    }

    pub(crate) fn from_parts(n_modes: usize, factor_dim: usize, rho: Matrix) -> Self {
        Self {
            n_modes,
            factor_dim,
            rho,
        }
    }

    /// The tracial state itself, `ρ = 1`.
    pub fn tracial(rep: &FockRep) -> Self {
        Self::from_parts(rep.n_modes(), rep.dim(), Matrix::identity(rep.dim()))
    }

    pub fn rho(&self) -> &Matrix {
        &self.rho
    }

    pub fn into_matrix(self) -> Matrix {
        self.rho
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn factor_dim(&self) -> usize {
        self.factor_dim
    }

    /// `φ(x) = τ(ρ x)`
    pub fn expectation(&self, x: &Matrix) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..n {
            for c in 0..n {
                acc += self.rho[(r, c)] * x[(c, r)];
            }
        }
        acc / n as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    General,
    Even,
    GaugeInvariant,
    Pure,
}

impl StateKind {
    pub const ALL: [StateKind; 4] = [
        StateKind::General,
        StateKind::Even,
        StateKind::GaugeInvariant,
        StateKind::Pure,
    ];
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn normalize(rho: Matrix) -> Matrix {
    let t = rho.tau().re;
    rho.hermitian_part().scale_real(1.0 / t)
}

fn random_density(rep: &FockRep, kind: StateKind, rng: &mut ChaCha8Rng) -> Matrix {
    let n = rep.dim();
    let rho = match kind {
        StateKind::Pure => {
            let psi: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
            Matrix::from_fn(n, |r, c| psi[r] * psi[c].conj())
        }
        _ => {
            let g = Matrix::from_fn(n, |_, _| gaussian(rng));
            g.matmul(&g.adjoint())
        }
    };
    let rho = match kind {
        StateKind::Even => {
            let theta = grading(rep, &rho).expect("same representation");
            &rho + &theta
        }
        StateKind::GaugeInvariant => gauge_average(rep, &rho).expect("same representation"),
        StateKind::General | StateKind::Pure => rho,
    };
    normalize(rho)
}

/// Ginibre density `GG†/τ(GG†)`, post-processed according to `kind`.
/// Deterministic per seed.
pub fn random_state(rep: &FockRep, kind: StateKind, seed: u64) -> StateDensity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density(rep, kind, &mut rng);
    StateDensity::from_parts(rep.n_modes(), rep.dim(), rho)
}

/// Random state of the subalgebra `alg`, drawn on `log2(d)` modes and embedded.
pub fn random_local_state(
    rep: &FockRep,
    alg: &Subalgebra,
    kind: StateKind,
    seed: u64,
) -> StateDensity {
    let k = alg.region().len();
    if k == 0 {
        return StateDensity::from_parts(rep.n_modes(), 1, Matrix::identity(rep.dim()));
    }
    let local = FockRep::new(k).expect("region within supported size");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = alg.embed(&random_density(&local, kind, &mut rng));
    StateDensity::from_parts(rep.n_modes(), alg.factor_dim(), rho.hermitian_part())
}

pub fn conditional_expectation(alg: &Subalgebra, x: &Matrix) -> Result<Matrix> {
    if x.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: x.dim(),
        });
    }
    Ok(alg.project(x))
}

/// Density of `φ|_B`, i.e. `E_B(ρ_φ)`.
pub fn restrict(phi: &StateDensity, alg: &Subalgebra) -> StateDensity {
    let rho = alg.project(phi.rho()).hermitian_part();
    StateDensity::from_parts(phi.n_modes, alg.factor_dim(), rho)
}

/// Product state on `A_I ∨ A_J` with the marginals of `phi` on `left` and of
/// `psi` on `right`; the density is `ρ_I ρ_J`.
pub fn product_extension(
    rep: &FockRep,
    phi: &StateDensity,
    left: &Subalgebra,
    psi: &StateDensity,
    right: &Subalgebra,
) -> Result<StateDensity> {
    if !left.region().is_disjoint(right.region()) {
        return Err(Error::OverlappingRegions);
    }
    let rho_l = restrict(phi, left).rho;
    let rho_r = restrict(psi, right).rho;
    let odd_left = odd_part_norm(rep, &rho_l)?;
    let odd_right = odd_part_norm(rep, &rho_r)?;
    if odd_left > tol::EVEN && odd_right > tol::EVEN {
        return Err(Error::BothMarginalsNoneven {
            odd_left,
            odd_right,
        });
    }
    let rho = rho_l.matmul(&rho_r).hermitian_part();
    Ok(StateDensity::from_parts(
        rep.n_modes(),
        left.factor_dim() * right.factor_dim(),
        rho,
    ))
}

/// `ε·1 + (1 − ε)·ρ_φ`
pub fn regularize(phi: &StateDensity, eps: f64) -> Result<StateDensity> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let mut rho = phi.rho.scale_real(1.0 - eps);
    for i in 0..rho.dim() {
        rho[(i, i)] += eps;
    }
    Ok(StateDensity::from_parts(phi.n_modes, phi.factor_dim, rho))
}

/// Residuals of the five equivalent commuting-square conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingSquareReport {
    /// `E_AB|_{A_BC} = E^{BC}_B`
    pub restriction_ab: f64,
    /// `E_BC|_{A_AB} = E^{AB}_B`
    pub restriction_bc: f64,
    /// `A_B = A_AB ∩ A_BC` and `[E_AB, E_BC] = 0`
    pub intersection: f64,
    /// `E_AB E_BC = E_B`
    pub product_ab_bc: f64,
    /// `E_BC E_AB = E_B`
    pub product_bc_ab: f64,
    pub pass: bool,
}

impl CommutingSquareReport {
    pub fn residuals(&self) -> [f64; 5] {
        [
            self.restriction_ab,
            self.restriction_bc,
            self.intersection,
            self.product_ab_bc,
            self.product_bc_ab,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleKind {
    /// `(A_AB, A_BC, A_B)`
    Regional,
    /// `(A_AB, Â_BC, Â_B)` with the `B ∪ C` odd parts twisted by `v_A`.
    Twisted,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleLabel {
    pub kind: TripleKind,
    pub a: Region,
    pub b: Region,
    pub c: Region,
}

/// `A_Z ⊇ A_AB, A_BC ⊇ A_B`.
#[derive(Debug)]
pub struct Triple {
    total: Subalgebra,
    ab: Subalgebra,
    bc: Subalgebra,
    b: Subalgebra,
    label: TripleLabel,
    report: OnceLock<Result<CommutingSquareReport>>,
}

impl Triple {
    pub fn new(
        total: Subalgebra,
        ab: Subalgebra,
        bc: Subalgebra,
        b: Subalgebra,
        label: TripleLabel,
    ) -> Self {
        Self {
            total,
            ab,
            bc,
            b,
            label,
            report: OnceLock::new(),
        }
    }

    fn check_regions(a: &Region, b: &Region, c: &Region) -> Result<()> {
        if a.is_empty() || c.is_empty() {
            return Err(Error::InvalidRegion(
                "outer regions must be nonempty".into(),
            ));
        }
        if !a.is_disjoint(b) || !b.is_disjoint(c) || !a.is_disjoint(c) {
            return Err(Error::OverlappingRegions);
        }
        Ok(())
    }

    pub fn regional(rep: &FockRep, a: &Region, b: &Region, c: &Region) -> Result<Self> {
        Self::check_regions(a, b, c)?;
        let ab = a.union(b);
        let bc = b.union(c);
        Ok(Self::new(
            regional_subalgebra(rep, &ab.union(c))?,
            regional_subalgebra(rep, &ab)?,
            regional_subalgebra(rep, &bc)?,
            regional_subalgebra(rep, b)?,
            TripleLabel {
                kind: TripleKind::Regional,
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            },
        ))
    }

    pub fn twisted(rep: &FockRep, a: &Region, b: &Region, c: &Region) -> Result<Self> {
        Self::check_regions(a, b, c)?;
        let ab = a.union(b);
        let bc = b.union(c);
        Ok(Self::new(
            regional_subalgebra(rep, &ab.union(c))?,
            regional_subalgebra(rep, &ab)?,
            twisted_subalgebra(rep, &bc, a)?,
            twisted_subalgebra(rep, b, a)?,
            TripleLabel {
                kind: TripleKind::Twisted,
                a: a.clone(),
                b: b.clone(),
                c: c.clone(),
            },
        ))
    }

    pub fn total(&self) -> &Subalgebra {
        &self.total
    }

    pub fn ab(&self) -> &Subalgebra {
        &self.ab
    }

    pub fn bc(&self) -> &Subalgebra {
        &self.bc
    }

    pub fn b(&self) -> &Subalgebra {
        &self.b
    }

    pub fn label(&self) -> &TripleLabel {
        &self.label
    }

    /// Cached [`commuting_square_check`].
    pub fn report(&self) -> Result<&CommutingSquareReport> {
        self.report
            .get_or_init(|| commuting_square_check(&self.total, &self.ab, &self.bc, &self.b))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Errors with [`Error::TripleNotCommutingSquare`] unless all five
    /// conditions hold.
    pub fn require_commuting_square(&self) -> Result<()> {
        let report = self.report()?;
        if !report.pass {
            return Err(Error::TripleNotCommutingSquare {
                residual: report.max_residual(),
            });
        }
        Ok(())
    }
}

fn max_over<T>(xs: impl Iterator<Item = T>, f: impl Fn(T) -> f64) -> f64 {
    xs.map(f).fold(0.0, f64::max)
}

/// Checks `A_B ⊆ A_AB, A_BC` and evaluates conditions (1)–(5) on spanning
/// sets, each residual in the norm `sqrt(τ(X†X))`.
pub fn commuting_square_check(
    total: &Subalgebra,
    ab: &Subalgebra,
    bc: &Subalgebra,
    b: &Subalgebra,
) -> Result<CommutingSquareReport> {
    let nesting = max_over(b.basis().iter(), |e| {
        let x = e.to_matrix();
        ab.membership_residual(&x).max(bc.membership_residual(&x))
    });
    if nesting > tol::ALGEBRA {
        return Err(Error::NotNested { residual: nesting });
    }

    let restriction_ab = max_over(bc.basis().iter(), |e| {
        let x = e.to_matrix();
        (&ab.project(&x) - &b.project(&x)).tau_norm()
    });
    let restriction_bc = max_over(ab.basis().iter(), |e| {
        let x = e.to_matrix();
        (&bc.project(&x) - &b.project(&x)).tau_norm()
    });

    let mut product_ab_bc: f64 = 0.0;
    let mut product_bc_ab: f64 = 0.0;
    let mut commutator: f64 = 0.0;
    for e in total.basis() {
        let x = e.to_matrix();
        let eb = b.project(&x);
        let ab_bc = ab.project(&bc.project(&x));
        let bc_ab = bc.project(&ab.project(&x));
        product_ab_bc = product_ab_bc.max((&ab_bc - &eb).tau_norm());
        product_bc_ab = product_bc_ab.max((&bc_ab - &eb).tau_norm());
        commutator = commutator.max((&ab_bc - &bc_ab).tau_norm());
    }
    // Σ_k ‖E_BC e_k‖² over a basis of A_AB is the trace of E_BC E_AB, which
    // is dim(A_AB ∩ A_BC) once the two projections commute.
    let overlap: f64 = ab
        .basis()
        .iter()
        .map(|e| bc.project(&e.to_matrix()).tau_norm().powi(2))
        .sum();
    let intersection = commutator.max((overlap - b.len() as f64).abs());

    let mut report = CommutingSquareReport {
        restriction_ab,
        restriction_bc,
        intersection,
        product_ab_bc,
        product_bc_ab,
        pass: false,
    };
    report.pass = report.max_residual() <= tol::ALGEBRA;
    Ok(report)
}
