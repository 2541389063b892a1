//! Finite abelian groups, their automorphisms, and rational group algebras.

mod algebra;
mod group;
pub mod linalg;

pub use algebra::{
    gr_add, gr_apply_aut, gr_is_unit, gr_mul, orbit_project, GroupAlgebraElem, OrbitClass,
};
pub use group::{aut_order, FiniteAbelianGroup, GroupAut, MAX_ORDER};
