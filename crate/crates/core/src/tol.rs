//! Numerical thresholds shared across modules.

/// Relative asymmetry accepted by the eigensolver.
pub const HERMITIAN: f64 = 1e-12;
/// Most negative eigenvalue a density may carry.
pub const PSD: f64 = 1e-10;
/// Allowed deviation of `τ(ρ)` from 1.
pub const NORMALIZATION: f64 = 1e-10;
/// Exact algebraic identities: orthonormality, nesting, commuting squares, products of densities.
pub const ALGEBRA: f64 = 1e-10;
/// Positive slack on entropic inequalities.
pub const SSA_SLACK: f64 = 1e-9;
/// Threshold for strong additivity and Petz recovery.
pub const MARKOV: f64 = 1e-8;
/// Odd part (Frobenius) below which a marginal counts as even for product extension.
pub const EVEN: f64 = 1e-10;
/// Odd part below which a marginal counts as even downstream of an entropy equality.
pub const ODD_PART: f64 = 1e-6;
/// Kernel overlap beyond which relative entropy is infinite.
pub const SUPPORT_OVERLAP: f64 = 1e-8;
/// Factorization residual for product-state checks on monomial pairs.
pub const PRODUCT: f64 = 1e-9;
/// Hopping expectation above which a CAR pair is certified nonseparable.
pub const WITNESS: f64 = 1e-8;
/// Regularization weight used when a Petz map needs a faithful state.
pub const REGULARIZATION: f64 = 1e-9;
