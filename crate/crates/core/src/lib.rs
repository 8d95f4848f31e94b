//! Numerical laboratory for surface dynamics: density combinatorics along
//! Folner sets, empirical measures and entropy estimates, bounded-curve
//! calculus, reparametrization trees with geometric times, and an
//! entropy-equals-exponent detector for SRB-measure candidates of concrete
//! surface diffeomorphisms.

pub mod cocycle;
pub mod curves;
pub mod density;
pub mod dynamics;
pub mod error;
pub mod geom;
pub mod poly;
pub mod reptree;
pub mod srb;

pub use error::{Error, Result};
