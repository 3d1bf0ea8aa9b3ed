//! Exact combinatorial core: scalars in the loop parameter δ, the lattice of
//! non-crossing partitions, Temperley-Lieb diagrams and scalar laws.
//!
//! Coefficient types are generic over the traits in [`scalar`]. The aliases
//! below name the instantiations used by the rest of the workspace.

pub mod combo;
pub mod error;
pub mod law;
pub mod linalg;
pub mod nc;
pub mod scalar;
pub mod tl;

pub use error::{Error, Result};
pub use scalar::{DeltaRing, Field, LaurentScalar, OrderedField, Rational, RationalFunctionScalar, Ring};

/// Temperley-Lieb element with exact Laurent coefficients.
pub type TLElementL = tl::TLElement<LaurentScalar>;
/// Temperley-Lieb element over the field ℚ(δ).
pub type TLElementQ = tl::TLElement<RationalFunctionScalar>;
/// Temperley-Lieb element specialized at a rational δ.
pub type TLElementR = tl::TLElement<Rational>;
/// Exact rational moment sequence.
pub type Moments = law::MomentSeq<Rational>;
/// Exact rational cumulant sequence.
pub type Cumulants = law::CumulantSeq<Rational>;
