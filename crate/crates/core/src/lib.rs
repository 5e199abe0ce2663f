//! Exact solutions of the unsteady Stokes equations
//!
//!   rho dV/dt = -grad p + mu lap V (+ f),    div V = 0
//!
//! built from scalar generating functions, together with the machinery to
//! take such solutions apart again and to verify everything numerically:
//!
//! * [`fields`] -- separable scalar modes (radial kind x real spherical
//!   harmonic x time factor) with exact gradient/Laplacian/heat-operator
//!   calculus, and symbolic vector fields built from them.
//! * [`operators`] -- the transverse operator L, vector evaluation, the
//!   finite-difference oracle stencils, and the two body-force forms.
//! * [`constructors`] -- complete general solutions from the generating
//!   scalars (A, B, chi, P, T), particular solutions of the generating
//!   equations, the Naghdi-Hsu velocity representation, and flows realizing
//!   a prescribed harmonic pressure.
//! * [`heatkernel`] -- the heat-kernel pressure potential by quadrature and
//!   its exact harmonic/caloric split.
//! * [`decompose`] -- recovery of the generating scalars from a sampled
//!   divergence-free field on a spherical shell.
//! * [`verify`] -- residual reports for momentum, continuity, the
//!   fourth-order velocity equation, the vorticity condition, and pressure
//!   recovery by line integration.

// `!(x > 0.0)` is used instead of `x <= 0.0` where NaN must be rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod constructors;
pub mod decompose;
pub mod error;
pub mod fields;
pub mod geom;
pub mod heatkernel;
pub mod interp;
pub mod operators;
pub mod quad;
pub mod verify;
pub mod ylm;

pub use error::{Result, StokesError};
pub use fields::{
    FluidParams, RadialKind, SampledField, ScalarField, ScalarMode, SphIndex, TimeKind,
    VectorField, VectorSample,
};
pub use geom::{SpherePoint, Vec3};
