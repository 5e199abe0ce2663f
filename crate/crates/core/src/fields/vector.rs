//! Symbolic vector fields built from scalar potentials:
//! gradients, toroidal curl(r B), poloidal curl curl(r A), r-weighted
//! scalars, linear combinations, and black-box sampled fields.
//!
//! The poloidal/toroidal algebra is closed under the exact operators used by
//! the residual engine:
//!   curl grad S        = 0
//!   curl curl(r S)     = the poloidal node itself
//!   curl of a poloidal node = curl(r (-lap S))
//!   lap commutes with each analytic node (lap(r S) = r lap S + 2 grad S).

use super::scalar::ScalarField;
use super::FluidParams;
use crate::error::{Result, StokesError};
use crate::geom::{SpherePoint, Vec3};
use std::fmt;
use std::sync::Arc;

/// Black-box evaluator: Cartesian point and time in, Cartesian vector out.
#[derive(Clone)]
pub struct SampledField {
    f: Arc<dyn Fn(Vec3, f64) -> Vec3 + Send + Sync>,
    label: String,
}

impl SampledField {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Vec3, f64) -> Vec3 + Send + Sync + 'static,
    {
        SampledField { f: Arc::new(f), label: label.into() }
    }

    pub fn eval(&self, x: Vec3, t: f64) -> Vec3 {
        (self.f)(x, t)
    }
}

impl fmt::Debug for SampledField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SampledField({})", self.label)
    }
}

/// Vector field expression tree.
#[derive(Debug, Clone)]
pub enum VectorField {
    /// grad S
    Gradient(ScalarField),
    /// curl (r S) -- toroidal
    CurlR(ScalarField),
    /// curl curl (r S) -- poloidal
    CurlCurlR(ScalarField),
    /// r S (position vector times scalar)
    RadialTimes(ScalarField),
    Sum(Vec<VectorField>),
    Scaled(f64, Box<VectorField>),
    Sampled(SampledField),
}

/// Evaluation result carrying both component systems.
#[derive(Debug, Clone, Copy)]
pub struct VectorSample {
    /// (v_r, v_theta, v_phi) on the local spherical basis.
    pub spherical: Vec3,
    /// (v_x, v_y, v_z).
    pub cartesian: Vec3,
}

impl VectorField {
    pub fn zero() -> Self {
        VectorField::Sum(vec![])
    }

    pub fn plus(self, other: VectorField) -> VectorField {
        match (self, other) {
            (VectorField::Sum(mut a), VectorField::Sum(b)) => {
                a.extend(b);
                VectorField::Sum(a)
            }
            (VectorField::Sum(mut a), o) => {
                a.push(o);
                VectorField::Sum(a)
            }
            (s, VectorField::Sum(mut b)) => {
                b.insert(0, s);
                VectorField::Sum(b)
            }
            (s, o) => VectorField::Sum(vec![s, o]),
        }
    }

    pub fn scaled(self, factor: f64) -> VectorField {
        VectorField::Scaled(factor, Box::new(self))
    }

    pub fn is_mode_based(&self) -> bool {
        match self {
            VectorField::Sampled(_) => false,
            VectorField::Sum(v) => v.iter().all(|f| f.is_mode_based()),
            VectorField::Scaled(_, f) => f.is_mode_based(),
            _ => true,
        }
    }

    /// Evaluate at a point; spherical components from the exact per-mode
    /// formulas, Cartesian by rotation (or directly for sampled fields).
    pub fn eval(&self, p: &SpherePoint, t: f64) -> Result<VectorSample> {
        match self {
            VectorField::Sampled(s) => {
                let cart = s.eval(p.to_cartesian(), t);
                Ok(VectorSample { spherical: p.cartesian_to_spherical(&cart), cartesian: cart })
            }
            _ => {
                let sph = self.eval_sph(p, t)?;
                Ok(VectorSample { spherical: sph, cartesian: p.spherical_to_cartesian(&sph) })
            }
        }
    }

    fn eval_sph(&self, p: &SpherePoint, t: f64) -> Result<Vec3> {
        match self {
            VectorField::Gradient(s) => s.eval_gradient_sph(p, t),
            VectorField::CurlR(s) => s.eval_curl_r_sph(p, t),
            VectorField::CurlCurlR(s) => s.eval_curl_curl_r_sph(p, t),
            VectorField::RadialTimes(s) => Ok(Vec3::new(p.r * s.eval(p, t)?, 0.0, 0.0)),
            VectorField::Sum(v) => {
                let mut acc = Vec3::ZERO;
                for f in v {
                    acc = acc + f.eval_sph_or_project(p, t)?;
                }
                Ok(acc)
            }
            VectorField::Scaled(c, f) => Ok(f.eval_sph_or_project(p, t)? * *c),
            VectorField::Sampled(s) => {
                Ok(p.cartesian_to_spherical(&s.eval(p.to_cartesian(), t)))
            }
        }
    }

    fn eval_sph_or_project(&self, p: &SpherePoint, t: f64) -> Result<Vec3> {
        self.eval_sph(p, t)
    }

    /// Exact time derivative (mode-based trees only).
    pub fn dt(&self) -> Result<VectorField> {
        self.map_scalars(&|s| Ok(s.dt()), "time derivative")
    }

    /// Exact vector Laplacian. lap(r S) = r lap S + 2 grad S; the other
    /// analytic nodes commute with the scalar Laplacian.
    pub fn laplacian(&self) -> Result<VectorField> {
        match self {
            VectorField::Gradient(s) => Ok(VectorField::Gradient(s.laplacian())),
            VectorField::CurlR(s) => Ok(VectorField::CurlR(s.laplacian())),
            VectorField::CurlCurlR(s) => Ok(VectorField::CurlCurlR(s.laplacian())),
            VectorField::RadialTimes(s) => Ok(VectorField::Sum(vec![
                VectorField::RadialTimes(s.laplacian()),
                VectorField::Scaled(2.0, Box::new(VectorField::Gradient(s.clone()))),
            ])),
            VectorField::Sum(v) => Ok(VectorField::Sum(
                v.iter().map(|f| f.laplacian()).collect::<Result<_>>()?,
            )),
            VectorField::Scaled(c, f) => Ok(VectorField::Scaled(*c, Box::new(f.laplacian()?))),
            VectorField::Sampled(_) => Err(not_exact("Laplacian")),
        }
    }

    /// Exact curl.
    pub fn curl(&self) -> Result<VectorField> {
        match self {
            VectorField::Gradient(_) => Ok(VectorField::zero()),
            VectorField::CurlR(s) => Ok(VectorField::CurlCurlR(s.clone())),
            VectorField::CurlCurlR(s) => Ok(VectorField::CurlR(s.laplacian().scaled(-1.0))),
            VectorField::RadialTimes(s) => Ok(VectorField::CurlR(s.clone())),
            VectorField::Sum(v) => {
                Ok(VectorField::Sum(v.iter().map(|f| f.curl()).collect::<Result<_>>()?))
            }
            VectorField::Scaled(c, f) => Ok(VectorField::Scaled(*c, Box::new(f.curl()?))),
            VectorField::Sampled(_) => Err(not_exact("curl")),
        }
    }

    /// Exact divergence as a scalar field. div grad = lap; the curl nodes are
    /// divergence-free; div(r S) = 3 S + r dS/dr (power-type radial only).
    pub fn divergence(&self) -> Result<ScalarField> {
        match self {
            VectorField::Gradient(s) => Ok(s.laplacian()),
            VectorField::CurlR(_) | VectorField::CurlCurlR(_) => Ok(ScalarField::zero()),
            VectorField::RadialTimes(s) => Ok(s.scaled(3.0).plus(&s.r_dr(0.0)?)),
            VectorField::Sum(v) => {
                let mut acc = ScalarField::zero();
                for f in v {
                    acc = acc.plus(&f.divergence()?);
                }
                Ok(acc)
            }
            VectorField::Scaled(c, f) => Ok(f.divergence()?.scaled(*c)),
            VectorField::Sampled(_) => Err(not_exact("divergence")),
        }
    }

    /// (lap - (1/nu) d/dt) applied exactly to every component.
    pub fn heat_op(&self, params: &FluidParams) -> Result<VectorField> {
        Ok(self.laplacian()?.plus(self.dt()?.scaled(-1.0 / params.nu)))
    }

    /// d/dr of (r * v_r) at a point, exact for analytic nodes, fourth-order
    /// finite differences along the ray for sampled ones.
    pub fn eval_dr_r_vr(&self, p: &SpherePoint, t: f64) -> Result<f64> {
        match self {
            VectorField::Gradient(s) => s.eval_dr_r_dr_sph(p, t),
            VectorField::CurlR(_) => Ok(0.0),
            VectorField::CurlCurlR(s) => {
                // r v_r = -L S = sum n(n+1) coeff R Y T, so d/dr uses R'.
                let mut acc = 0.0;
                for m in &s.modes {
                    let n = m.index.n;
                    if n == 0 {
                        continue;
                    }
                    let tv = m.coeff * m.time.value(t);
                    if tv == 0.0 {
                        continue;
                    }
                    acc += tv
                        * (n * (n + 1)) as f64
                        * m.radial_d1(p.r)?
                        * crate::ylm::eval_ylm(n, m.index.m, p.theta, p.phi);
                }
                Ok(acc)
            }
            VectorField::RadialTimes(s) => {
                // r v_r = r^2 S, d/dr = 2 r R Y T + r^2 R' Y T.
                let mut acc = 0.0;
                for m in &s.modes {
                    let tv = m.coeff * m.time.value(t);
                    if tv == 0.0 {
                        continue;
                    }
                    let y = crate::ylm::eval_ylm(m.index.n, m.index.m, p.theta, p.phi);
                    acc += tv * (2.0 * p.r * m.radial_value(p.r)? + p.r * p.r * m.radial_d1(p.r)?) * y;
                }
                Ok(acc)
            }
            VectorField::Sum(v) => {
                let mut acc = 0.0;
                for f in v {
                    acc += f.eval_dr_r_vr(p, t)?;
                }
                Ok(acc)
            }
            VectorField::Scaled(c, f) => Ok(c * f.eval_dr_r_vr(p, t)?),
            VectorField::Sampled(_) => {
                let h = 1e-3 * p.r.max(1.0);
                let u = |rr: f64| -> Result<f64> {
                    let q = SpherePoint::new(rr, p.theta, p.phi);
                    Ok(rr * self.eval(&q, t)?.spherical.x)
                };
                Ok((u(p.r - 2.0 * h)? - 8.0 * u(p.r - h)? + 8.0 * u(p.r + h)?
                    - u(p.r + 2.0 * h)?)
                    / (12.0 * h))
            }
        }
    }

    fn map_scalars(
        &self,
        op: &dyn Fn(&ScalarField) -> Result<ScalarField>,
        what: &str,
    ) -> Result<VectorField> {
        match self {
            VectorField::Gradient(s) => Ok(VectorField::Gradient(op(s)?)),
            VectorField::CurlR(s) => Ok(VectorField::CurlR(op(s)?)),
            VectorField::CurlCurlR(s) => Ok(VectorField::CurlCurlR(op(s)?)),
            VectorField::RadialTimes(s) => Ok(VectorField::RadialTimes(op(s)?)),
            VectorField::Sum(v) => Ok(VectorField::Sum(
                v.iter().map(|f| f.map_scalars(op, what)).collect::<Result<_>>()?,
            )),
            VectorField::Scaled(c, f) => {
                Ok(VectorField::Scaled(*c, Box::new(f.map_scalars(op, what)?)))
            }
            VectorField::Sampled(_) => Err(not_exact(what)),
        }
    }
}

fn not_exact(what: &str) -> StokesError {
    StokesError::Unrepresentable(format!("exact {what} of a sampled field is not available"))
}
