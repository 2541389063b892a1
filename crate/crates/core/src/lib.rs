//! Exact computation of K1-valued twisted Alexander invariants.
//!
//! The pipeline starts from a meridian presentation of a knot group
//! `<x1..x2g, m | m y_i m^-1 = z_i>` and a metabelian representation into
//! `H x| Z` (H finite abelian). From those it builds the Fox matrix over the
//! skew Novikov ring `Q[H]_kappa((tau))`, eliminates it, and reads off a Witt
//! vector representative, its logarithm classes, and the commutative
//! polynomial `det Upsilon(A)`.

pub mod cover;
pub mod error;
pub mod grouprings;
pub mod k1core;
pub mod novikov;
pub mod presentation;
pub mod upsilon;
pub mod words;

pub use cover::{alexander_presentation, metabelian_rep, smith_normal_form, IntMatrix, MetaRep, SnfResult};
pub use error::{Error, Result};
pub use grouprings::{
    orbit_project, FiniteAbelianGroup, GroupAlgebraElem, GroupAut, OrbitClass,
};
pub use k1core::{
    build_fox_matrix, eliminate, fibered_obstruction, k1_invariant, FiberVerdict, Invertibility,
    K1Report, NovikovMatrix, PivotStep,
};
pub use novikov::{ns_log, witt_normalize, LogClass, NovikovRing, NovikovSeries, WittVector, DEFAULT_PRECISION};
pub use presentation::{
    apply_nielsen, builtin, conjugate_presentation, parse_presentation, validate_rep,
    MeridianPresentation, NielsenMove, BUILTIN_NAMES,
};
pub use upsilon::{
    det_commutative, is_unit_laurent, metafinite_polynomial, normalize_poly, poly_equiv, upsilon_elem,
    upsilon_matrix, LaurentPolyGA, UpsilonMatrix,
};
pub use words::{fox_derivative, FreeRingElem, Generator, Word};

/// Exact rationals used for every coefficient.
pub type Rational = num_rational::BigRational;
