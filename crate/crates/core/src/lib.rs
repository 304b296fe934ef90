//! Sampled convolution algebras of continuous kernels over compact metric
//! measure spaces.
//!
//! The crate models the Banach *-algebra of continuous kernels on `X × X`
//! with the measure-weighted product
//! `(f ⋆ g)(x, y) = ∫ f(x, z) g(z, y) dm(z)`, discretized by quadrature:
//!
//! - [`space`]: discrete metric measure spaces, ball measures, bumps and the
//!   hypotheses that produce norm-approximate units;
//! - [`algebra`]: kernels, convolution, involution, seminorms, the unit of a
//!   finite space and its matrix-algebra isomorphism;
//! - [`units`]: approximate units and their convergence reports;
//! - [`structure`]: center, one-sided ideals, functorial maps, gauge
//!   automorphisms, measure recovery and split extensions;
//! - [`oprep`]: integral-operator representations and module actions;
//! - [`deriv`]: finite-rank tensors, the multiplication and derivation maps,
//!   and approximate-innerness runs.
//!
//! Everything is generic over the real field `T` (`f32` or `f64`); the
//! `*64` aliases below fix `T = f64`.

pub mod algebra;
pub mod battery;
pub mod deriv;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oprep;
pub mod report;
pub mod scalar;
pub mod space;
pub mod structure;
pub mod units;

pub use algebra::{finite_matrix_iso, finite_matrix_iso_inv, unit, Kernel};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use report::{Check, Report};
pub use scalar::{Real, C};
pub use space::{Ball, DiscreteSpace, SpaceKind, SpaceRef};

pub type Space64 = DiscreteSpace<f64>;
pub type Space32 = DiscreteSpace<f32>;
pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type Matrix64 = Matrix<f64>;
pub type UnitNet64 = units::UnitNet<f64>;
pub type Subspace64 = structure::Subspace<f64>;
pub type SpaceMap64 = structure::SpaceMap<f64>;
pub type SampledFunction64 = oprep::SampledFunction<f64>;
pub type TensorKernel64 = deriv::TensorKernel<f64>;
pub type DerivationSpec64 = deriv::DerivationSpec<f64>;
