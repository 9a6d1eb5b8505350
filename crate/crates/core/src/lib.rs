//! Exact-arithmetic engine for divided-power envelopes, Hodge-filtered
//! De Rham complexes, and crystalline cohomology of polynomial rings and
//! regular quotients, at desk scale.
//!
//! Everything is computed over one of four coefficient rings (integers,
//! rationals, a prime field, or truncated p-adics) with exact arithmetic
//! throughout. Completed filtered objects are represented by weight
//! truncations, and cohomology is reported as invariant factors plus free
//! rank via Smith normal form.

pub mod cech;
pub mod complex;
pub mod crystalline;
pub mod derham;
pub mod envelope;
pub mod error;
pub mod job;
pub mod linalg;
pub mod pd;
pub mod poly;
pub mod report;
pub mod scalar;
pub mod selftest;

pub use complex::{BoundedCochainComplex, ModuleInvariants};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use pd::{PdElement, PdMonomial};
pub use poly::{IdealPresentation, MonomialExp, Polynomial};
pub use scalar::{Scalar, ScalarRing};
