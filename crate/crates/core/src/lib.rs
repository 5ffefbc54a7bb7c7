//! Exact symbolic calculus for complex-orientable cohomology operations:
//! formal group laws and their p-series over characteristic-p graded rings,
//! the co-operation relation recursion, the idempotent splitting, and the
//! explicit unstable-to-stable delooping component formulas.

pub mod coeff;
pub mod coop;
pub mod deloop;
pub mod error;
pub mod fgl;
pub mod relations;
pub mod series;
pub mod split;
pub mod verify;

pub use coeff::{CoeffElement, Degree, GeneratorSpec, Ring, RingSpec};
pub use coop::{Bidegree, CoopElement, CoopKey, CoopSeries};
pub use error::{Error, Result};
pub use fgl::{AxiomReport, FormalGroupLaw, Height, PSeriesData};
pub use relations::{Derivation, RelationSet, RewriteRule};
pub use series::{Monomial, Series, SeriesData};
pub use split::{IdempotentS, StableClass};
