//! Matrix representation of the CAR algebra of `n` fermionic modes.
//!
//! Conventions: the Fock basis is `|n_0 … n_{n-1}⟩` with mode 0 the most
//! significant bit. On one mode the lowering matrix sends `|1⟩ → |0⟩`, i.e.
//! `a = [[0, 1], [0, 0]]` in the basis `(|0⟩, |1⟩)`, and
//! `v = a†a − aa† = diag(−1, +1)`. The Jordan–Wigner image of `a_i` is
//! `v_0 ⋯ v_{i−1} ⊗ a ⊗ 1 ⋯ 1`. Mode indices are zero-based.

mod monomial;
mod subalgebra;

pub use monomial::MonomialOp;
pub use subalgebra::{
    regional_subalgebra, twisted_subalgebra, FactorKind, Subalgebra, SubalgebraLabel,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const MAX_MODES: usize = 10;

/// Set of mode indices, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region(Vec<usize>);

impl Region {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRegion(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        Ok(Region(indices))
    }

    /// `start, start + 1, …, start + len − 1`
    pub fn span(start: usize, len: usize) -> Self {
        Region((start..start + len).collect())
    }

    pub fn empty() -> Self {
        Region(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.0.iter().all(|m| !other.0.contains(m))
    }

    pub fn union(&self, other: &Region) -> Region {
        let mut v: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        v.sort_unstable();
        v.dedup();
        Region(v)
    }
}

/// Jordan–Wigner representation of `n` modes on `C^{2^n}`.
#[derive(Clone, Debug)]
pub struct FockRep {
    n_modes: usize,
    dim: usize,
    annihilators: Vec<MonomialOp>,
}

pub fn build_fock(n_modes: usize) -> Result<FockRep> {
    FockRep::new(n_modes)
}

impl FockRep {
    pub fn new(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::TooManyModes {
                n: n_modes,
                max: MAX_MODES,
            });
        }
        let dim = 1usize << n_modes;
        let annihilators = (0..n_modes)
            .map(|i| {
                let bit = 1usize << (n_modes - 1 - i);
                let mut cols = Vec::with_capacity(dim);
                let mut vals = Vec::with_capacity(dim);
                for row in 0..dim {
                    if row & bit != 0 {
                        cols.push(row as u32);
                        vals.push(Complex64::new(0.0, 0.0));
                        continue;
                    }
                    // string of v_j for j < i: −1 for every empty mode
                    let empty_before = (0..i)
                        .filter(|&j| row & (1 << (n_modes - 1 - j)) == 0)
                        .count();
                    let sign = if empty_before % 2 == 0 { 1.0 } else { -1.0 };
                    cols.push((row | bit) as u32);
                    vals.push(Complex64::new(sign, 0.0));
                }
                MonomialOp::from_parts(cols, vals)
            })
            .collect();
        Ok(Self {
            n_modes,
            dim,
            annihilators,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn all_modes(&self) -> Region {
        Region::span(0, self.n_modes)
    }

    pub fn occupied(&self, state: usize, mode: usize) -> bool {
        state & (1 << (self.n_modes - 1 - mode)) != 0
    }

    pub fn annihilator(&self, mode: usize) -> &MonomialOp {
        &self.annihilators[mode]
    }

    pub fn creator(&self, mode: usize) -> MonomialOp {
        self.annihilators[mode].adjoint()
    }

    pub fn annihilator_matrix(&self, mode: usize) -> Matrix {
        self.annihilators[mode].to_matrix()
    }

    pub fn creator_matrix(&self, mode: usize) -> Matrix {
        self.creator(mode).to_matrix()
    }

    /// Diagonal of `v_I = ∏_{i∈I} (a_i†a_i − a_i a_i†)`.
    pub fn region_unitary_diag(&self, region: &Region) -> Vec<f64> {
        (0..self.dim)
            .map(|s| {
                let empty = region
                    .modes()
                    .iter()
                    .filter(|&&m| !self.occupied(s, m))
                    .count();
                if empty % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    }

    /// Diagonal of the grading unitary `V = v_0 ⋯ v_{n−1}`.
    pub fn grading_diag(&self) -> Vec<f64> {
        self.region_unitary_diag(&self.all_modes())
    }

    /// Total particle number per basis state.
    pub fn number_diag(&self) -> Vec<u32> {
        (0..self.dim).map(|s| s.count_ones()).collect()
    }

    pub fn number_operator(&self) -> Matrix {
        Matrix::from_diag(
            &self
                .number_diag()
                .iter()
                .map(|&n| n as f64)
                .collect::<Vec<_>>(),
        )
    }

    pub fn check_operator(&self, x: &Matrix) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    pub fn check_region(&self, region: &Region) -> Result<()> {
        match region.modes().last() {
            Some(&m) if m >= self.n_modes => Err(Error::InvalidRegion(format!(
                "mode {m} out of range for {} modes",
                self.n_modes
            ))),
            _ => Ok(()),
        }
    }
}

fn signs_to_complex(diag: &[f64]) -> Vec<Complex64> {
    diag.iter().map(|&d| Complex64::new(d, 0.0)).collect()
}

/// `Θ(X) = V X V`.
pub fn grading(rep: &FockRep, x: &Matrix) -> Result<Matrix> {
    rep.check_operator(x)?;
    Ok(x.conjugate_by_diag(&signs_to_complex(&rep.grading_diag())))
}

/// `(X₊, X₋) = ((X + Θ(X))/2, (X − Θ(X))/2)`.
pub fn even_odd_split(rep: &FockRep, x: &Matrix) -> Result<(Matrix, Matrix)> {
    rep.check_operator(x)?;
    let v = rep.grading_diag();
    let n = x.dim();
    let mut even = Matrix::zeros(n);
    let mut odd = Matrix::zeros(n);
    for r in 0..n {
        for c in 0..n {
            // Θ flips the sign of entries between states of different parity
            if v[r] * v[c] > 0.0 {
                even[(r, c)] = x[(r, c)];
            } else {
                odd[(r, c)] = x[(r, c)];
            }
        }
    }
    Ok((even, odd))
}

/// Frobenius norm of the odd part.
pub fn odd_part_norm(rep: &FockRep, x: &Matrix) -> Result<f64> {
    Ok(even_odd_split(rep, x)?.1.frobenius_norm())
}

/// `γ_θ(X) = e^{iθN} X e^{−iθN}`, so that `γ_θ(a_i†) = e^{iθ} a_i†`.
pub fn gauge_transform(rep: &FockRep, x: &Matrix, theta: f64) -> Result<Matrix> {
    rep.check_operator(x)?;
    let phases: Vec<Complex64> = rep
        .number_diag()
        .iter()
        .map(|&n| Complex64::from_polar(1.0, theta * n as f64))
        .collect();
    Ok(x.conjugate_by_diag(&phases))
}

/// Average of `γ_θ(X)` over the circle: keeps the blocks between equal
/// particle-number sectors.
pub fn gauge_average(rep: &FockRep, x: &Matrix) -> Result<Matrix> {
    rep.check_operator(x)?;
    let number = rep.number_diag();
    Ok(Matrix::from_fn(x.dim(), |r, c| {
        if number[r] == number[c] {
            x[(r, c)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }))
}

/// `v_I`, the even self-adjoint unitary implementing `Θ` on `A_I`.
pub fn region_unitary(rep: &FockRep, region: &Region) -> Result<Matrix> {
    rep.check_region(region)?;
    Ok(Matrix::from_diag(&rep.region_unitary_diag(region)))
}

/// Pauli images `(1, X, Y, Z)` for a single mode with its odd part twisted
/// by `v_twist`: `X = v(a + a†)`, `Y = v·i(a† − a)`, `Z = −(a†a − aa†)`.
/// With an empty twist these generate `A_{mode}` as `M_2`.
pub fn jw_paulis(rep: &FockRep, mode: usize, twist: &Region) -> Result<[Matrix; 4]> {
    let single = Region::new(vec![mode])?;
    rep.check_region(&single)?;
    rep.check_region(twist)?;
    if !single.is_disjoint(twist) {
        return Err(Error::OverlappingRegions);
    }
    let v = rep.region_unitary_diag(twist);
    let a = rep.annihilator(mode);
    let ad = rep.creator(mode);
    let i = Complex64::new(0.0, 1.0);
    let x = &a.to_matrix() + &ad.to_matrix();
    let y = (&ad.to_matrix() - &a.to_matrix()).scale(i);
    let v_diag = Matrix::from_diag(&v);
    Ok([
        Matrix::identity(rep.dim()),
        v_diag.matmul(&x),
        v_diag.matmul(&y),
        Matrix::from_diag(&rep.region_unitary_diag(&single)).scale_real(-1.0),
    ])
}

/// Projection onto the Fock states whose occupations on `region` spell
/// `pattern`, the first mode of the region being the most significant bit.
pub fn occupation_projection(rep: &FockRep, region: &Region, pattern: usize) -> Result<Matrix> {
    rep.check_region(region)?;
    let k = region.len();
    if pattern >> k != 0 {
        return Err(Error::InvalidRegion(format!(
            "pattern {pattern} does not fit {k} modes"
        )));
    }
    let diag: Vec<f64> = (0..rep.dim())
        .map(|s| {
            let hit = region
                .modes()
                .iter()
                .enumerate()
                .all(|(j, &m)| rep.occupied(s, m) == (pattern >> (k - 1 - j) & 1 == 1));
            if hit {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(Matrix::from_diag(&diag))
}
