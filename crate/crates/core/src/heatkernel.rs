//! Heat-kernel pressure potential by quadrature, and the exact split of a
//! potential into a harmonic part and a caloric (heat-type) part.
//!
//! The potential is the Duhamel form with the unit-mass Gaussian kernel,
//!
//!   psi(x,t) = -nu int_0^t [K(., nu(t-tau)) * p(., tau)](x) dtau,
//!   K(d, s)  = (4 pi s)^(-3/2) exp(-|d|^2 / 4s),
//!
//! for which (lap - (1/nu) d/dt) psi = p holds on all of space. The source
//! is extended by zero outside the quadrature domain; evaluation close to
//! the boundary therefore carries a truncation error of order of the kernel
//! tail exp(-dist^2 / 4 nu t).
//!
//! Quadrature: the substitution u = sqrt(t - tau) removes the endpoint
//! singularity, and the radial variable is scaled per time node as
//! rho = 2 sqrt(nu) u w so a fixed Gauss-Legendre rule in w resolves the
//! kernel at every kernel width. Angles use Gauss-Legendre in cos(theta)
//! times uniform phi around the evaluation point.

use crate::error::{Result, StokesError};
use crate::fields::{FluidParams, ScalarField};
use crate::geom::{SpherePoint, Vec3};
use crate::quad::gauss_legendre;
use rayon::prelude::*;

/// Half-width of the scaled radial window: exp(-8^2) ~ 1.6e-28 bounds the
/// discarded Gaussian tail.
const W_MAX: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainShape {
    Ball { radius: f64 },
    Shell { r1: f64, r2: f64 },
}

/// Integration region and node budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureDomain {
    pub shape: DomainShape,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    pub n_time: usize,
}

impl QuadratureDomain {
    /// Ball of the given radius with the default budget
    /// (n_r=48, n_theta=24, n_phi=48, n_time=32).
    pub fn ball(radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(StokesError::Spec(format!("ball radius must be positive, got {radius}")));
        }
        Ok(QuadratureDomain {
            shape: DomainShape::Ball { radius },
            n_r: 48,
            n_theta: 24,
            n_phi: 48,
            n_time: 32,
        })
    }

    pub fn shell(r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1) {
            return Err(StokesError::Spec(format!("invalid shell [{r1}, {r2}]")));
        }
        Ok(QuadratureDomain {
            shape: DomainShape::Shell { r1, r2 },
            n_r: 48,
            n_theta: 24,
            n_phi: 48,
            n_time: 32,
        })
    }

    pub fn with_budget(mut self, n_r: usize, n_theta: usize, n_phi: usize, n_time: usize) -> Result<Self> {
        if n_r < 2 || n_theta < 2 || n_phi < 2 || n_time < 2 {
            return Err(StokesError::QuadratureBudget(
                "every node count must be at least 2".into(),
            ));
        }
        self.n_r = n_r;
        self.n_theta = n_theta;
        self.n_phi = n_phi;
        self.n_time = n_time;
        Ok(self)
    }

    /// Distance from an interior point to the domain boundary (negative
    /// outside).
    pub fn boundary_distance(&self, x: &Vec3) -> f64 {
        let r = x.norm();
        match self.shape {
            DomainShape::Ball { radius } => radius - r,
            DomainShape::Shell { r1, r2 } => (r - r1).min(r2 - r),
        }
    }
}

/// psi(x, t) for the given source field by quadrature.
pub fn psi_integral(
    p: &ScalarField,
    point: &SpherePoint,
    t: f64,
    dom: &QuadratureDomain,
    params: &FluidParams,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(StokesError::Domain(format!("the potential needs t > 0, got {t}")));
    }
    let x0 = point.to_cartesian();
    let dist = dom.boundary_distance(&x0);
    if dist <= 0.0 {
        return Err(StokesError::Domain(
            "evaluation point must lie strictly inside the quadrature domain".into(),
        ));
    }
    if p.is_zero() {
        return Ok(0.0);
    }
    let beta = 2.0 * params.nu.sqrt();
    let (u_nodes, u_weights) = gauss_legendre_on_unit(dom.n_time, t.sqrt());
    let (w_nodes, w_weights) = gauss_legendre(dom.n_r);
    let (ct_nodes, ct_weights) = gauss_legendre(dom.n_theta);
    let dphi = 2.0 * std::f64::consts::PI / dom.n_phi as f64;
    let dirs: Vec<(Vec3, f64)> = ct_nodes
        .iter()
        .zip(&ct_weights)
        .flat_map(|(&ct, &wt)| {
            let stq = (1.0 - ct * ct).max(0.0).sqrt();
            (0..dom.n_phi).map(move |k| {
                let phi = dphi * k as f64;
                (Vec3::new(stq * phi.cos(), stq * phi.sin(), ct), wt * dphi)
            })
        })
        .collect();

    // Parallel over time nodes, but summed in node order afterwards so the
    // result is bit-reproducible regardless of scheduling.
    let per_node: Result<Vec<f64>> = u_nodes
        .par_iter()
        .zip(&u_weights)
        .map(|(&u, &wu)| {
            let tau = t - u * u;
            let w_cut = (dist / (beta * u)).min(W_MAX);
            let half = 0.5 * w_cut;
            let mut inner = 0.0;
            for (&wn, &ww) in w_nodes.iter().zip(&w_weights) {
                let w = half * (wn + 1.0);
                let gauss = (-w * w).exp() * w * w;
                if gauss == 0.0 {
                    continue;
                }
                let rho = beta * u * w;
                let mut shell_sum = 0.0;
                for (dir, wd) in &dirs {
                    let xi = x0 + *dir * rho;
                    shell_sum += wd * p.eval(&SpherePoint::from_cartesian(&xi), tau)?;
                }
                inner += ww * half * gauss * shell_sum;
            }
            Ok(wu * u * inner)
        })
        .collect();
    let total: f64 = per_node?.iter().sum();

    Ok(-2.0 * params.nu / std::f64::consts::PI.powf(1.5) * total)
}

fn gauss_legendre_on_unit(n: usize, upper: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|&xi| 0.5 * upper * (xi + 1.0)).collect(),
        w.iter().map(|&wi| 0.5 * upper * wi).collect(),
    )
}

/// Like [`psi_integral`], but verifies the budget by comparing against a
/// reduced-node evaluation; errs with QuadratureBudget when the estimated
/// error exceeds `tol`.
pub fn psi_integral_with_tolerance(
    p: &ScalarField,
    point: &SpherePoint,
    t: f64,
    dom: &QuadratureDomain,
    params: &FluidParams,
    tol: f64,
) -> Result<f64> {
    let full = psi_integral(p, point, t, dom, params)?;
    let reduced = QuadratureDomain {
        shape: dom.shape,
        n_r: (2 * dom.n_r / 3).max(2),
        n_theta: (2 * dom.n_theta / 3).max(2),
        n_phi: (2 * dom.n_phi / 3).max(2),
        n_time: (2 * dom.n_time / 3).max(2),
    };
    let coarse = psi_integral(p, point, t, &reduced, params)?;
    let estimate = (full - coarse).abs();
    if estimate > tol {
        return Err(StokesError::QuadratureBudget(format!(
            "estimated quadrature error {estimate:.3e} exceeds the requested tolerance {tol:.1e}"
        )));
    }
    Ok(full)
}

/// The kernel normalization written in the source literature integrates to
/// pi^(3/2) nu instead of one and omits the -nu prefactor; this variant is
/// exposed for comparison only and satisfies no heat identity.
pub fn psi_integral_literature_kernel(
    p: &ScalarField,
    point: &SpherePoint,
    t: f64,
    dom: &QuadratureDomain,
    params: &FluidParams,
) -> Result<f64> {
    Ok(-std::f64::consts::PI.powf(1.5) * psi_integral(p, point, t, dom, params)?)
}

/// Split psi into a harmonic part and a heat-type part:
///   psi' = (lap - (1/nu) d/dt) psi        (must be harmonic: the check)
///   psi2 = psi + nu int_0^t psi' ds,      psi1 = -nu int_0^t psi' ds,
/// so psi = psi1 + psi2 with lap psi1 = 0 and (lap - dt/nu) psi2 = 0.
pub fn split_psi(psi: &ScalarField, params: &FluidParams) -> Result<(ScalarField, ScalarField)> {
    let psi_prime = psi.heat_op(params);
    // lap(lap - dt/nu) psi = 0 precondition, by mode arithmetic on probes.
    let residual = psi_prime.laplacian();
    let domain = psi.domain_hint.unwrap_or((0.5, 1.5));
    let pts = crate::constructors::probe_points(domain, 30, 0x2b1a);
    let mut scale = 1.0_f64;
    let mut worst = 0.0_f64;
    for p in &pts {
        for &t in &crate::constructors::PROBE_TIMES {
            scale = scale.max(psi.eval(p, t)?.abs());
            worst = worst.max(residual.eval(p, t)?.abs());
        }
    }
    if worst > 1e-10 * scale {
        return Err(StokesError::Spec(format!(
            "psi does not satisfy lap (lap - dt/nu) psi = 0: residual {worst:.3e}"
        )));
    }
    let integral = psi_prime.time_integral().scaled(params.nu);
    let psi1 = integral.scaled(-1.0);
    let psi2 = psi.plus(&integral);
    Ok((psi1, psi2))
}

/// Pressure carried by the harmonic part: p = -(1/nu) d psi1 / dt.
pub fn pressure_from_psi1(psi1: &ScalarField, params: &FluidParams) -> ScalarField {
    psi1.dt().scaled(-1.0 / params.nu)
}
