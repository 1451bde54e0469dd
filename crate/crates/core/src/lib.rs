//! Numerical toolkit for Sobolev-type seminorms of logarithmic order.
//!
//! The crate computes, on functions sampled over a uniform grid in one or two
//! dimensions:
//!
//! * the logarithmic seminorm `⟦f⟧_{X^{γ,p}}` with kernel
//!   `|h|^-d log(1/|h|)^(pγ-1)` on `B_{1/3}`, the fractional seminorm
//!   `⟦f⟧_{W^{s,p}}` and a truncated variant ([`seminorms`]);
//! * the Fourier-side norm of the `p = 2` scale and the kernel moments behind
//!   it ([`spectral`]);
//! * pointwise functionals (`L_{γ,p}f`, `D_{s,p}f`, `Φ*_{s,q}f`, `Mf`) and
//!   pair-sampled Lusin and Hajłasz checks ([`maximal`]);
//! * experiments that measure empirical constants and scaling exponents of
//!   the inequalities linking these quantities ([`experiments`]), plus the
//!   acceptance checks built on them ([`verify`]).

pub mod error;
pub mod experiments;
pub mod fit;
pub mod grid;
pub mod maximal;
pub mod quadrature;
pub mod reduce;
pub mod seminorms;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{sample, AnalyticFunction, Domain, SampledFunction};
pub use quadrature::{build_radial_scheme, KernelSpec, RadialScheme, SchemeOptions};
pub use seminorms::SeminormParams;
