//! Planar algebra side of the toolkit: the graded algebras Gr_k over
//! Temperley-Lieb with their traces, the box algebra used as the target of
//! the free difference quotient, the diagrammatic free calculus, and free
//! Gibbs states.

pub mod boxes;
pub mod calc;
pub mod gibbs;
pub mod pa;

pub use boxes::BoxElement;
pub use pa::{PAElement, TSeries};
