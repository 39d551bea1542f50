//! Exact harmonic analysis over finite fields at desk scale.
//!
//! The crate builds concrete models of `F_q = F_p[x]/(m(x))` for odd primes
//! `p`, evaluates additive characters and quadratic Gauss sums, enumerates the
//! quadratic surfaces (parabola, paraboloid, hyperbolic paraboloid, two cones)
//! living in `F_q^d`, and computes k-fold convolutions of their normalized
//! surface measures by two independent routes: exact tuple counting in
//! arbitrary-precision rationals, and Fourier inversion in floating point.
//! On top of that sit the closed-form convolution tables, the sharp constants
//! of the `L^2 -> L^{2k}` extension inequalities together with their explicit
//! maximizer families, and a small optimization layer (random sampling,
//! perturbations, projected gradient ascent) that stress-tests sharpness.
//!
//! Everything is deterministic: field models are chosen canonically, random
//! draws are seeded, and parallel reductions only combine per-index results.

pub mod characters;
pub mod field;
pub mod formulas;
pub mod geometry;
pub mod numeric;
pub mod sharpness;
pub mod transform;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("field size {0} exceeds the 10^4 verification bound")]
    FieldTooLarge(u64),
    #[error("-1 has no square root in F_q when q = 3 (mod 4)")]
    NoSquareRoot,
    #[error("j^2 + j + 1 has no root in F_q when q = 2 (mod 3)")]
    NoRoot,
    #[error("the given vectors are not an F_p-basis of F_q")]
    NotABasis,
    #[error("the Jacobi symbol requires an odd positive modulus")]
    EvenModulus,
    #[error("quadratic Gauss sum requires a nonzero leading coefficient")]
    ZeroLeadingCoefficient,
    #[error("enumeration cost {0} exceeds the 10^8 guard")]
    CostGuard(u128),
    #[error("operation is not defined for this surface")]
    UnsupportedSurface,
    #[error("operation requires q = {residue} (mod {modulus})")]
    WrongResidueClass { residue: u32, modulus: u32 },
    #[error("no closed form is available for this combination")]
    UnsupportedCombination,
    #[error("prime {p} must exceed the convolution order {k}")]
    PrimeTooSmall { p: u32, k: u32 },
    #[error("the zero function has no extension ratio")]
    ZeroFunction,
}

pub type Result<T> = std::result::Result<T, Error>;

pub use characters::{gauss_sum, general_gauss_sum, jacobi, legendre, weighted_gauss_sum, Character};
pub use field::{make_field, FieldSpec, FqElem};
pub use formulas::{
    combinatorial_constant, maximizer_family, phi_psi, phi_psi_derivative_at_zero,
    predicted_conv, predicted_parabola_conv, sharp_constant, sharp_constant_pow, Functional,
    MaximizerParams, PhiPolynomials,
};
pub use geometry::{
    cone_slicing, count_conic, critical_set, enumerate_surface, saddle, sigma_set, sphere,
    sphere_line_decomposition, PointSet, SurfaceKind, SurfacePoint, SurfaceSpec, TupleSet,
};
pub use sharpness::{
    local_search, perturbation_strictness, random_ratio_suite, ratio, theorem6_check, ConeKind,
    SearchConfig, SearchMode,
};
pub use transform::{
    combinatorial_lhs, convolve_counting, convolve_fourier, extend, fourier_forward,
    fourier_inverse, l2_surface_norm, lp_norm, paraboloid_convolution_counts,
    paraboloid_convolve_fourier, ConvolutionTable, GridFunction, RatioReport, SurfaceFunction,
};
