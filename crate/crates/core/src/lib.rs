//! Line congruences in Euclidean 3-space, represented as surfaces in the
//! space of oriented lines `T = TP¹`.
//!
//! The crate is organised bottom-up:
//!
//! * [`jet`] and [`expr`]: forward-mode Wirtinger jets and a small
//!   expression language for sections `F(ξ, ξ̄)`.
//! * [`model`]: charts on the sphere of directions, local and global
//!   sections, the Euclidean realisation of a line, origin translations,
//!   builtin congruence families and the JSON spec format.
//! * [`spin`]: invariant derivatives, spin coefficients `ρ`, `σ`, the
//!   curvature `K`, the Jacobian `Δ` and the congruence null frame.
//! * [`sachs`]: evolution of `(ρ, σ)` along a line.
//! * [`integrals`]: the area density and the Gauss–Bonnet integral.
//! * [`complex_points`]: shear-free lines, their indices and lines
//!   through a given point.
//! * [`surface`]: orthogonal surfaces of twist-free congruences.
//! * [`cli`]: the `clab` command-line front end.

pub mod cli;
pub mod complex_points;
pub mod expr;
pub mod integrals;
pub mod jet;
pub mod model;
pub mod quadrature;
pub mod sachs;
pub mod spin;
pub mod surface;

pub use num_complex::Complex64 as Complex;

pub use expr::{Expr, ExprError};
pub use jet::Jet1;
pub use model::{Chart, ChartPoint, GlobalSection, LineR3, LocalSection, Translation, Vec3};
pub use spin::{NullFrame, ParamJet, SpinData, SpinError};
pub use complex_points::{index_sum, lines_through_point, ComplexPointError, ComplexPointReport};
pub use integrals::{gauss_bonnet, IntegralError};
pub use sachs::{SachsError, SachsInitialData};
pub use surface::{Mesh, Rect, ScalarField, SurfaceError};
