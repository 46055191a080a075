use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FockRep, MonomialOp, Region};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Single-mode factor of a basis monomial.
///
/// `{1, a†, a, a†a}` orthonormalized under `τ` in this order is
/// `{1, √2·a†, √2·a, a†a − aa†}`; the last one is the parity unitary `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorKind {
    Identity,
    Creation,
    Annihilation,
    Parity,
}

impl FactorKind {
    pub const ALL: [FactorKind; 4] = [
        FactorKind::Identity,
        FactorKind::Creation,
        FactorKind::Annihilation,
        FactorKind::Parity,
    ];

    pub fn is_odd(self) -> bool {
        matches!(self, FactorKind::Creation | FactorKind::Annihilation)
    }

    fn build(self, rep: &FockRep, mode: usize) -> MonomialOp {
        let s2 = Complex64::new(std::f64::consts::SQRT_2, 0.0);
        match self {
            FactorKind::Identity => MonomialOp::identity(rep.dim()),
            FactorKind::Creation => rep.creator(mode).scale(s2),
            FactorKind::Annihilation => rep.annihilator(mode).scale(s2),
            FactorKind::Parity => {
                MonomialOp::diagonal(&rep.region_unitary_diag(&Region(vec![mode])))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SubalgebraLabel {
    Regional(Region),
    /// `{A_I,e, v_twist · A_I,o}`
    Twisted {
        region: Region,
        twist: Region,
    },
}

/// A *-subalgebra of the full matrix algebra, given by a `τ`-orthonormal
/// monomial basis.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    dim: usize,
    basis: Vec<MonomialOp>,
    patterns: Vec<Vec<FactorKind>>,
    factor_dim: usize,
    label: SubalgebraLabel,
}

/// `A_I` with the orthonormal monomial basis of size `4^|I|`.
pub fn regional_subalgebra(rep: &FockRep, region: &Region) -> Result<Subalgebra> {
    rep.check_region(region)?;
    let (basis, patterns) = monomial_basis(rep, region);
    Ok(Subalgebra {
        dim: rep.dim(),
        basis,
        patterns,
        factor_dim: 1 << region.len(),
        label: SubalgebraLabel::Regional(region.clone()),
    })
}

/// `{A_I,e, v_twist · A_I,o}`: odd monomials of `A_I` are multiplied by `v_twist`.
pub fn twisted_subalgebra(rep: &FockRep, region: &Region, twist: &Region) -> Result<Subalgebra> {
    rep.check_region(region)?;
    rep.check_region(twist)?;
    if !region.is_disjoint(twist) {
        return Err(Error::OverlappingRegions);
    }
    let v = rep.region_unitary_diag(twist);
    let (basis, patterns) = monomial_basis(rep, region);
    let basis = basis
        .into_iter()
        .zip(&patterns)
        .map(|(m, p)| if is_odd(p) { m.left_diag(&v) } else { m })
        .collect();
    Ok(Subalgebra {
        dim: rep.dim(),
        basis,
        patterns,
        factor_dim: 1 << region.len(),
        label: SubalgebraLabel::Twisted {
            region: region.clone(),
            twist: twist.clone(),
        },
    })
}

fn is_odd(pattern: &[FactorKind]) -> bool {
    pattern.iter().filter(|k| k.is_odd()).count() % 2 == 1
}

fn monomial_basis(rep: &FockRep, region: &Region) -> (Vec<MonomialOp>, Vec<Vec<FactorKind>>) {
    let mut basis = vec![MonomialOp::identity(rep.dim())];
    let mut patterns = vec![Vec::new()];
    for &mode in region.modes() {
        let factors: Vec<MonomialOp> = FactorKind::ALL.iter().map(|k| k.build(rep, mode)).collect();
        let mut next_basis = Vec::with_capacity(basis.len() * 4);
        let mut next_patterns = Vec::with_capacity(basis.len() * 4);
        for (m, p) in basis.iter().zip(&patterns) {
            for (kind, f) in FactorKind::ALL.iter().zip(&factors) {
                next_basis.push(m.mul(f));
                let mut q = p.clone();
                q.push(*kind);
                next_patterns.push(q);
            }
        }
        basis = next_basis;
        patterns = next_patterns;
    }
    (basis, patterns)
}

impl Subalgebra {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[MonomialOp] {
        &self.basis
    }

    pub fn patterns(&self) -> &[Vec<FactorKind>] {
        &self.patterns
    }

    /// `d` with `A ≅ M_d`.
    pub fn factor_dim(&self) -> usize {
        self.factor_dim
    }

    pub fn label(&self) -> &SubalgebraLabel {
        &self.label
    }

    pub fn region(&self) -> &Region {
        match &self.label {
            SubalgebraLabel::Regional(r) => r,
            SubalgebraLabel::Twisted { region, .. } => region,
        }
    }

    /// Whether basis element `k` is odd under the grading.
    pub fn is_odd_element(&self, k: usize) -> bool {
        is_odd(&self.patterns[k])
    }

    /// Basis elements that are even under the grading.
    pub fn even_basis(&self) -> impl Iterator<Item = &MonomialOp> {
        self.basis
            .iter()
            .zip(&self.patterns)
            .filter(|(_, p)| !is_odd(p))
            .map(|(m, _)| m)
    }

    /// `c_k = τ(e_k† X)`.
    pub fn coefficients(&self, x: &Matrix) -> Vec<Complex64> {
        self.basis.iter().map(|e| e.tau_inner(x)).collect()
    }

    pub fn from_coefficients(&self, coefficients: &[Complex64]) -> Matrix {
        let mut out = Matrix::zeros(self.dim);
        for (e, &c) in self.basis.iter().zip(coefficients) {
            e.add_scaled_into(c, &mut out);
        }
        out
    }

    /// `τ`-preserving conditional expectation `Σ_k τ(e_k† X) e_k`.
    pub fn project(&self, x: &Matrix) -> Matrix {
        self.from_coefficients(&self.coefficients(x))
    }

    /// `τ`-norm of `X − E(X)`; zero iff `X` lies in the subalgebra.
    pub fn membership_residual(&self, x: &Matrix) -> f64 {
        (x - &self.project(x)).tau_norm()
    }

    /// Image of `X ∈ A` under the isomorphism `A ≅ M_d` that sends each basis
    /// monomial to the same monomial in a `log2(d)`-mode Fock representation.
    pub fn local_image(&self, x: &Matrix) -> Matrix {
        let k = self.region().len();
        if k == 0 {
            return Matrix::identity(1).scale(x.tau());
        }
        let local = FockRep::new(k).expect("region within supported size");
        let (local_basis, local_patterns) = monomial_basis(&local, &Region::span(0, k));
        debug_assert_eq!(local_patterns, self.patterns);
        let mut out = Matrix::zeros(local.dim());
        for (e, c) in local_basis.iter().zip(self.coefficients(x)) {
            e.add_scaled_into(c, &mut out);
        }
        out
    }

    /// Inverse of [`Subalgebra::local_image`]: embeds an operator on `log2(d)`
    /// modes into the parent space.
    pub fn embed(&self, local_op: &Matrix) -> Matrix {
        let k = self.region().len();
        if k == 0 {
            return Matrix::identity(self.dim).scale(local_op[(0, 0)]);
        }
        let local = FockRep::new(k).expect("region within supported size");
        let (local_basis, _) = monomial_basis(&local, &Region::span(0, k));
        let coefficients: Vec<Complex64> =
            local_basis.iter().map(|f| f.tau_inner(local_op)).collect();
        self.from_coefficients(&coefficients)
    }

    /// `max |τ(e_j† e_k) − δ_jk|` over all pairs.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, ej) in self.basis.iter().enumerate() {
            for (k, ek) in self.basis.iter().enumerate().skip(j) {
                let g = ej.tau_inner_monomial(ek);
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Largest membership residual of products `e_j e_k` over the given index pairs.
    pub fn closure_residual(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs
            .iter()
            .map(|&(j, k)| {
                let p = self.basis[j].mul(&self.basis[k]).to_matrix();
                self.membership_residual(&p)
            })
            .fold(0.0, f64::max)
    }
}
