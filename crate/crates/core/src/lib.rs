//! Complex quaternion algebra H(C), G-monogenic mappings on E3 and their
//! curvilinear integrals, with a scenario-driven verification harness for
//! the curvilinear Cauchy integral theorems.

pub mod algebra;
pub mod curve;
pub mod error;
pub mod harness;
pub mod homotopy;
pub mod integrals;
pub mod maps;
pub mod space;

pub use algebra::{BasisChange, ComplexScalar, IjkQuaternion, Quaternion};
pub use curve::{ArcSubdivision, Curve, WobblyLoop};
pub use error::{Error, EvalError, Result};
pub use homotopy::Homotopy;
pub use integrals::{IntegralResult, QuadratureSpec, Refinement, RefinementRow, Rule};
pub use maps::{ComponentFunctions, Factor, GenericMap, HolomorphicFn, MonogenicMap, Side, Term};
pub use space::{GeneratorTriple, Independence, PointE3};
