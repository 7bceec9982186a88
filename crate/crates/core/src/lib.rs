//! Exact invariants of Seifert-fibered integral homology spheres.

pub mod algebra;
pub mod moduli;
pub mod picard;
pub mod seifert;
pub mod singularity;
