//! Numerical laboratory for the Moser-Trudinger-Onofri inequality.
//!
//! One Gauss-Legendre grid on [-1, 1] carries the three equivalent settings
//! of the inequality (sphere, plane, cylinder) through the stereographic and
//! Emden-Fowler changes of variables. On top of it sit the itemized
//! deficits and remainder functionals, three entropy-dissipating flows, the
//! six limit families that degenerate to the inequality, and the radial
//! mass-transport proof with its full chain of intermediate inequalities.

pub mod error;
pub mod expr;
pub mod families;
pub mod field;
pub mod flows;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod limits;
pub mod operators;
pub mod quad;
pub mod report;
pub mod selftest;
pub mod transport;

pub use error::{Error, Result};
pub use field::Field;
pub use geometry::Geometry;
pub use grid::LegendreGrid;
