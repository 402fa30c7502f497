//! Exact arithmetic and geometry for a complex hyperbolic triangle group and
//! its index-six subgroup acting on the Heisenberg group.

pub mod cxhyp;
pub mod error;
pub mod group;
pub mod hlinalg;
pub mod limitset;
pub mod linkcalc;
pub mod qfield;

pub use cxhyp::{HeisenbergCoord, ProjPoint, SpinalSphere};
pub use error::{Error, Result};
pub use group::{Constants, GroupElem, GroupWord};
pub use hlinalg::{Mat3F, Vec3F};
pub use qfield::{FieldElem, QRat};
