//! Differential operators on analytic and sampled fields: the transverse
//! operator L, vector evaluation, Cartesian finite-difference oracles, and
//! the body-force representation in both of its algebraic forms.
//!
//! All finite-difference stencils act on Cartesian components of points
//! displaced along Cartesian axes, which keeps them regular on the polar
//! axis where spherical-component stencils degenerate.

use crate::error::{Result, StokesError};
use crate::fields::{ScalarField, VectorField};
use crate::geom::{SpherePoint, Vec3};

/// Finite-difference step and order (2 or 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilSpec {
    pub h: f64,
    pub order: u8,
}

impl StencilSpec {
    pub fn new(h: f64, order: u8) -> Result<Self> {
        if !(h > 0.0) {
            return Err(StokesError::Spec(format!("stencil step must be positive, got {h}")));
        }
        if order != 2 && order != 4 {
            return Err(StokesError::Spec(format!("stencil order must be 2 or 4, got {order}")));
        }
        Ok(StencilSpec { h, order })
    }

    /// Default verification stencil: fourth order, h = 1e-3.
    pub fn default_space() -> Self {
        StencilSpec { h: 1e-3, order: 4 }
    }

    /// Default time stencil: fourth order, h = 1e-4 * max(1, |t|).
    pub fn default_time(t: f64) -> Self {
        StencilSpec { h: 1e-4 * t.abs().max(1.0), order: 4 }
    }

    /// First derivative of f along one coordinate.
    pub(crate) fn d1<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let h = self.h;
        match self.order {
            2 => Ok((f(h)? - f(-h)?) / (2.0 * h)),
            _ => Ok((f(-2.0 * h)? - 8.0 * f(-h)? + 8.0 * f(h)? - f(2.0 * h)?) / (12.0 * h)),
        }
    }

    /// Second derivative of f along one coordinate.
    pub(crate) fn d2<F: Fn(f64) -> Result<f64>>(&self, f: F) -> Result<f64> {
        let h = self.h;
        match self.order {
            2 => Ok((f(h)? - 2.0 * f(0.0)? + f(-h)?) / (h * h)),
            _ => Ok((-f(-2.0 * h)? + 16.0 * f(-h)? - 30.0 * f(0.0)? + 16.0 * f(h)?
                - f(2.0 * h)?)
                / (12.0 * h * h)),
        }
    }
}

/// The transverse part of the Laplace operator (without the 1/r^2 factor):
/// every (n, m) mode is an eigenfunction with eigenvalue -n(n+1).
pub fn transverse_l(field: &ScalarField) -> ScalarField {
    let modes = field
        .modes
        .iter()
        .filter(|m| m.index.n > 0)
        .map(|m| {
            let n = m.index.n;
            let mut s = m.clone();
            s.coeff *= -((n * (n + 1)) as f64);
            s
        })
        .collect();
    ScalarField { modes, domain_hint: field.domain_hint }
}

/// Evaluate a vector field, returning spherical and Cartesian components.
pub fn eval_vector(v: &VectorField, point: &SpherePoint, t: f64) -> Result<(Vec3, Vec3)> {
    let s = v.eval(point, t)?;
    Ok((s.spherical, s.cartesian))
}

fn eval_cart(v: &VectorField, x: Vec3, t: f64) -> Result<Vec3> {
    Ok(v.eval(&SpherePoint::from_cartesian(&x), t)?.cartesian)
}

fn shifted(x: Vec3, axis: usize, d: f64) -> Vec3 {
    let mut y = x;
    match axis {
        0 => y.x += d,
        1 => y.y += d,
        _ => y.z += d,
    }
    y
}

/// Finite-difference divergence at a point.
pub fn fd_divergence(v: &VectorField, point: &SpherePoint, t: f64, st: &StencilSpec) -> Result<f64> {
    let x0 = point.to_cartesian();
    let mut div = 0.0;
    for axis in 0..3 {
        div += st.d1(|d| {
            let val = eval_cart(v, shifted(x0, axis, d), t)?;
            Ok([val.x, val.y, val.z][axis])
        })?;
    }
    Ok(div)
}

/// Finite-difference curl at a point (Cartesian components).
pub fn fd_curl(v: &VectorField, point: &SpherePoint, t: f64, st: &StencilSpec) -> Result<Vec3> {
    let x0 = point.to_cartesian();
    // d_j of component k for the needed (j,k) pairs.
    let deriv = |axis: usize, comp: usize| -> Result<f64> {
        st.d1(|d| {
            let val = eval_cart(v, shifted(x0, axis, d), t)?;
            Ok([val.x, val.y, val.z][comp])
        })
    };
    Ok(Vec3::new(
        deriv(1, 2)? - deriv(2, 1)?,
        deriv(2, 0)? - deriv(0, 2)?,
        deriv(0, 1)? - deriv(1, 0)?,
    ))
}

/// Finite-difference vector Laplacian (componentwise in Cartesian).
pub fn fd_vector_laplacian(
    v: &VectorField,
    point: &SpherePoint,
    t: f64,
    st: &StencilSpec,
) -> Result<Vec3> {
    let x0 = point.to_cartesian();
    let mut out = Vec3::ZERO;
    for axis in 0..3 {
        let contrib_x = st.d2(|d| Ok(eval_cart(v, shifted(x0, axis, d), t)?.x))?;
        let contrib_y = st.d2(|d| Ok(eval_cart(v, shifted(x0, axis, d), t)?.y))?;
        let contrib_z = st.d2(|d| Ok(eval_cart(v, shifted(x0, axis, d), t)?.z))?;
        out = out + Vec3::new(contrib_x, contrib_y, contrib_z);
    }
    Ok(out)
}

/// Finite-difference time derivative.
pub fn fd_dt(v: &VectorField, point: &SpherePoint, t: f64, st: &StencilSpec) -> Result<Vec3> {
    let x0 = point.to_cartesian();
    let fx = st.d1(|d| Ok(eval_cart(v, x0, t + d)?.x))?;
    let fy = st.d1(|d| Ok(eval_cart(v, x0, t + d)?.y))?;
    let fz = st.d1(|d| Ok(eval_cart(v, x0, t + d)?.z))?;
    Ok(Vec3::new(fx, fy, fz))
}

/// Finite-difference gradient of a scalar field (Cartesian components).
pub fn fd_scalar_gradient(
    f: &ScalarField,
    point: &SpherePoint,
    t: f64,
    st: &StencilSpec,
) -> Result<Vec3> {
    let x0 = point.to_cartesian();
    let g = |axis: usize| {
        st.d1(|d| f.eval(&SpherePoint::from_cartesian(&shifted(x0, axis, d)), t))
    };
    Ok(Vec3::new(g(0)?, g(1)?, g(2)?))
}

/// Finite-difference Laplacian of a scalar field.
pub fn fd_scalar_laplacian(
    f: &ScalarField,
    point: &SpherePoint,
    t: f64,
    st: &StencilSpec,
) -> Result<f64> {
    let x0 = point.to_cartesian();
    let mut lap = 0.0;
    for axis in 0..3 {
        lap += st.d2(|d| f.eval(&SpherePoint::from_cartesian(&shifted(x0, axis, d)), t))?;
    }
    Ok(lap)
}

/// Finite-difference time derivative of a scalar field.
pub fn fd_scalar_dt(f: &ScalarField, point: &SpherePoint, t: f64, st: &StencilSpec) -> Result<f64> {
    st.d1(|d| f.eval(point, t + d))
}

/// Body force f = grad chi + curl curl (r P) + curl (r T).
pub fn body_force(chi: &ScalarField, p: &ScalarField, t: &ScalarField) -> VectorField {
    VectorField::Gradient(chi.clone())
        .plus(VectorField::CurlCurlR(p.clone()))
        .plus(VectorField::CurlR(t.clone()))
}

/// The rewritten body-force form
///   f = grad chi + grad(P + r dP/dr) - r lap P + curl (r T),
/// available when P has a power-type radial profile.
pub fn body_force_rewritten(
    chi: &ScalarField,
    p: &ScalarField,
    t: &ScalarField,
) -> Result<VectorField> {
    let p_plus_rdp = p.plus(&p.r_dr(0.0)?);
    Ok(VectorField::Gradient(chi.clone())
        .plus(VectorField::Gradient(p_plus_rdp))
        .plus(VectorField::RadialTimes(p.laplacian()).scaled(-1.0))
        .plus(VectorField::CurlR(t.clone())))
}
