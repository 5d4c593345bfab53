//! Periodic integral orbits of `x^m - k` and `ax² + bx + c`.
//!
//! * [`numeric`]: exact roots and sign predicates against `β` and `γ`.
//! * [`maps`]: the map families, the conjugacy to `x² - q`, and the
//!   integral-lattice test for rational polynomials.
//! * [`classifier`]: complete answers for every integer map, decided exactly.
//! * [`oracle`]: brute-force enumeration inside a certified escape bound,
//!   used to cross-check the classifier.
//! * [`modular`]: functional-graph structure of the maps over `Z/MZ`.

pub mod classifier;
pub mod error;
pub mod maps;
pub mod modular;
pub mod numeric;
pub mod oracle;

pub use classifier::{
    classify, classify_power, classify_quad, Behavior, BoundsProfile, Cycle, Family,
    OrbitClassification, Witness,
};
pub use error::{Error, Result};
pub use maps::{IntegerMap, PowerMap, QuadMap, RationalPoly};
pub use numeric::{DecimalApprox, Int, Rat};
