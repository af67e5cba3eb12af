pub mod affine;
pub mod catalog;
pub mod compare;
pub mod components;
pub mod galois;
pub mod hecke;
pub mod intlin;
pub mod laurent;
pub mod levi;
pub mod rootdata;

pub use intlin::{FinGenAb, IntMat};
pub use rootdata::BasedRootDatum;
