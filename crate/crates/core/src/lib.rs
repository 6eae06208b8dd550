//! Relative Lie algebra and Lie group cohomology at desk scale: exterior
//! algebra, Chevalley–Eilenberg and basic complexes, the perturbation lemma
//! on finite double complexes, group cochains on `GL_n(C)`, van Est maps and
//! characteristic classes of representations.

pub mod char_classes;
pub mod error;
pub mod exterior;
pub mod group_cochains;
pub mod homology_engine;
pub mod lie_algebra;
pub mod linalg;
pub mod matrix_group;
pub mod par;
pub mod quadrature;
pub mod sampling;
pub mod vanest;

pub use error::{Error, Result};
pub use par::Exec;
