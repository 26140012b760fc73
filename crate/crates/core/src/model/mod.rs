//! Domain types shared by every other module.

mod exponent;
mod grid;
mod region;

pub use exponent::{Exponent, ExponentPair};
pub use grid::{GridSpec, NodeBudget, SampledField, MAX_DIM};
pub use region::{unit_ball_volume, Region, RegionKind};

pub(crate) use region::norm_sq;
