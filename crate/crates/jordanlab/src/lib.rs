//! Finite-dimensional Jordan algebras, elementary-operator kits and
//! standard-form decompositions of associating maps, traces and
//! operator-commutativity preservers.

pub mod algebra;
pub mod capelli;
pub mod decompose;
pub mod genverify;
pub mod json;
pub mod kit;
pub mod numerics;
pub mod octonion;
pub mod report;
pub mod zoo;

pub use algebra::{Element, Family, JordanAlgebra, LinOp};
pub use numerics::{CMatrix, CVector, Tolerance, C64};
pub use report::{Record, Report};
