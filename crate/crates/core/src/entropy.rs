//! Entropies relative to the tracial state and the SSA / additivity residuals.

use serde::{Deserialize, Serialize};

use crate::car::{regional_subalgebra, FockRep, Subalgebra};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, spectral_function, support_projection, MatrixFunction};
use crate::states::{restrict, StateDensity, Triple, TripleLabel};
use crate::tol;

fn spectrum(phi: &StateDensity) -> Vec<f64> {
    hermitian_eig(phi.rho())
        .expect("densities are Hermitian")
        .eigenvalues
}

fn eta(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.ln()
    } else {
        0.0
    }
}

/// `Ŝ(φ) = −τ(ρ log ρ)`, with `0·log 0 = 0`.
pub fn entropy_hat(phi: &StateDensity) -> f64 {
    let ev = spectrum(phi);
    ev.iter().map(|&l| eta(l)).sum::<f64>() / ev.len() as f64
}

/// von Neumann entropy `−Tr(D log D)` of the state on its factor `M_d`.
pub fn entropy_vn(phi: &StateDensity) -> f64 {
    // Each eigenvalue μ of the d×d density matrix D appears dim/d times in ρ,
    // scaled as ρ-eigenvalue d·μ.
    let ev = spectrum(phi);
    let d = phi.factor_dim() as f64;
    let multiplicity = ev.len() as f64 / d;
    ev.iter().map(|&l| eta(l / d)).sum::<f64>() / multiplicity
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativeEntropy {
    Finite(f64),
    Infinite,
}

impl RelativeEntropy {
    pub fn finite(self) -> Option<f64> {
        match self {
            RelativeEntropy::Finite(h) => Some(h),
            RelativeEntropy::Infinite => None,
        }
    }
}

/// `H(ρ1, ρ2) = τ(ρ1 (log ρ1 − log ρ2))`, infinite unless `supp ρ1 ⊆ supp ρ2`.
pub fn relative_entropy(rho1: &StateDensity, rho2: &StateDensity) -> Result<RelativeEntropy> {
    rho1.rho().check_same_dim(rho2.rho())?;
    let e1 = hermitian_eig(rho1.rho())?;
    let e2 = hermitian_eig(rho2.rho())?;
    let cutoff2 = crate::linalg::default_support_tol(&e2).max(tol::PSD);
    let support2 = support_projection(&e2, cutoff2);
    // τ(ρ1 (1 − P)) with P the support projection of ρ2
    let overlap = rho1.rho().tau().re - rho1.rho().matmul(&support2).tau().re;
    if overlap > tol::SUPPORT_OVERLAP {
        return Ok(RelativeEntropy::Infinite);
    }
    let log2 = spectral_function(&e2, MatrixFunction::Log, Some(cutoff2))?;
    let cross = rho1.rho().matmul(&log2).tau().re;
    let self_term =
        -e1.eigenvalues.iter().map(|&l| eta(l)).sum::<f64>() / e1.eigenvalues.len() as f64;
    Ok(RelativeEntropy::Finite(self_term - cross))
}

/// Entropies of the four restrictions entering strong subadditivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub s_total: f64,
    pub s_ab: f64,
    pub s_bc: f64,
    pub s_b: f64,
    /// `S_total − S_AB − S_BC + S_B`
    pub residual: f64,
    pub triple: TripleLabel,
}

/// SSA residual over a commuting-square triple; nonpositive up to rounding.
pub fn ssa_residual(psi: &StateDensity, triple: &Triple) -> Result<EntropyReport> {
    triple.require_commuting_square()?;
    let s = |alg: &Subalgebra| entropy_vn(&restrict(psi, alg));
    let s_total = s(triple.total());
    let s_ab = s(triple.ab());
    let s_bc = s(triple.bc());
    let s_b = s(triple.b());
    Ok(EntropyReport {
        s_total,
        s_ab,
        s_bc,
        s_b,
        residual: s_total - s_ab - s_bc + s_b,
        triple: triple.label().clone(),
    })
}

/// `S(ψ_AC) − S(ψ_A) − S(ψ_C)`; nonpositive up to rounding.
pub fn additivity_residual(
    rep: &FockRep,
    psi: &StateDensity,
    a: &Subalgebra,
    c: &Subalgebra,
) -> Result<f64> {
    if !a.region().is_disjoint(c.region()) {
        return Err(Error::OverlappingRegions);
    }
    let ac = regional_subalgebra(rep, &a.region().union(c.region()))?;
    let s = |alg: &Subalgebra| entropy_vn(&restrict(psi, alg));
    Ok(s(&ac) - s(a) - s(c))
}
