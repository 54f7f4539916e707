//! T-adic L-functions of Z_p-towers over the affine line and the torus.

pub mod dwork;
pub mod error;
pub mod fredholm;
pub mod matrix;
pub mod oracle;
pub mod padic;
pub mod pipeline;
pub mod series;
pub mod slopes;
pub mod splitting;
pub mod unramified;

pub use error::{Error, Result};
pub use padic::{PrecisionProfile, Valuation, ZpApprox, ZpRing, ZpTSeries};
pub use series::{FormKind, Geometry, TSeriesPoly, XSeries};
pub use splitting::{SplittingContext, SplittingFunction, TowerInput};
