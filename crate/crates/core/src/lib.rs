#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

//! Liouvillian spectra, exceptional points and resultant winding numbers of
//! a dissipatively stabilized cat qubit.
//!
//! Everything numerical is generic over [`Real`]; the aliases below fix the
//! scalar to `f64` or to [`DoubleDouble`] (about 32 significant digits),
//! which is needed to resolve third-order coalescences to better than
//! `√ε_f64`.
pub mod contour;
pub mod ep;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod logical;
pub mod params;
pub mod scalar;
pub mod topology;

pub use error::{Error, Result};
pub use scalar::{DoubleDouble, Real};

pub type Dd = DoubleDouble;

pub type Params = params::SystemParams<f64>;
pub type Manifold = params::CatManifold<f64>;
pub type Liouvillian = logical::LogicalLiouvillian<f64>;
pub type Spectrum = logical::Spectrum<f64>;
pub type LogicalState = logical::LogicalVector<f64>;
pub type Locus = ep::Lep3Locus<f64>;
pub type Field = topology::ResultantField<f64>;
pub type Loop = topology::LoopSpec<f64>;
pub type Grid = contour::GridSpec<f64>;
pub type Density = fock::DensityMatrix<f64>;

pub type ParamsDd = params::SystemParams<Dd>;
pub type ManifoldDd = params::CatManifold<Dd>;
pub type SpectrumDd = logical::Spectrum<Dd>;
pub type FieldDd = topology::ResultantField<Dd>;
