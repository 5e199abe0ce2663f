//! Finite sums of separable modes with exact calculus.

use super::{FluidParams, RadialKind, ScalarMode, SphIndex, TimeKind};
use crate::error::Result;
use crate::geom::{SpherePoint, Vec3};
use crate::ylm;
use serde::{Deserialize, Serialize};

/// Scalar field as a finite mode sum. Immutable after construction;
/// evaluation is pure and thread-safe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub modes: Vec<ScalarMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_hint: Option<(f64, f64)>,
}

impl ScalarField {
    pub fn new(modes: Vec<ScalarMode>) -> Result<Self> {
        let mut checked = Vec::with_capacity(modes.len());
        for m in modes {
            checked.push(ScalarMode::new(m.index, m.radial, m.time, m.coeff)?);
        }
        let mut f = ScalarField { modes: checked, domain_hint: None };
        f.merge();
        Ok(f)
    }

    pub fn zero() -> Self {
        ScalarField { modes: vec![], domain_hint: None }
    }

    pub fn from_mode(mode: ScalarMode) -> Self {
        ScalarField::new(vec![mode]).expect("mode already validated")
    }

    pub fn with_domain_hint(mut self, r1: f64, r2: f64) -> Self {
        self.domain_hint = Some((r1, r2));
        self
    }

    /// The constant field with the given value (an n = 0 growing solid mode).
    pub fn constant(value: f64) -> Self {
        if value == 0.0 {
            return ScalarField::zero();
        }
        let coeff = value * 2.0 * std::f64::consts::PI.sqrt();
        ScalarField::from_mode(
            ScalarMode::new(
                SphIndex { n: 0, m: 0 },
                RadialKind::SolidGrowing,
                TimeKind::Constant,
                coeff,
            )
            .unwrap(),
        )
    }

    /// amplitude * {x, y, z} * T(t) as a degree-1 growing solid mode.
    pub fn coordinate(axis: usize, time: TimeKind, amplitude: f64) -> Self {
        let norm = (4.0 * std::f64::consts::PI / 3.0).sqrt();
        let m = match axis {
            0 => 1,  // x = sqrt(4 pi/3) r Y_{1,1}
            1 => -1, // y = sqrt(4 pi/3) r Y_{1,-1}
            2 => 0,  // z = sqrt(4 pi/3) r Y_{1,0}
            _ => panic!("axis must be 0, 1 or 2"),
        };
        ScalarField::from_mode(
            ScalarMode::new(
                SphIndex { n: 1, m },
                RadialKind::SolidGrowing,
                time,
                amplitude * norm,
            )
            .unwrap(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.coeff == 0.0)
    }

    /// Largest mode coefficient magnitude; crude scale for relative drops.
    pub fn coeff_scale(&self) -> f64 {
        self.modes.iter().map(|m| m.coeff.abs()).fold(0.0, f64::max)
    }

    /// Merge same-shape modes and aligned power series; drop exact zeros.
    fn merge(&mut self) {
        let mut out: Vec<ScalarMode> = Vec::with_capacity(self.modes.len());
        for mode in self.modes.drain(..) {
            if mode.coeff == 0.0 {
                continue;
            }
            if let Some(hit) = out.iter_mut().find(|o| o.same_shape(&mode)) {
                hit.coeff += mode.coeff;
                continue;
            }
            if let RadialKind::PowerSeries { base, coeffs } = &mode.radial {
                // Align with an existing series of the same index/time and
                // power parity.
                let mut absorbed = false;
                for o in out.iter_mut() {
                    if o.index != mode.index || o.time != mode.time {
                        continue;
                    }
                    if let RadialKind::PowerSeries { base: ob, coeffs: oc } = &mut o.radial {
                        if (ob.rem_euclid(2)) != (base.rem_euclid(2)) {
                            continue;
                        }
                        let new_base = (*ob).min(*base);
                        let len = (((*ob).max(*base) - new_base) / 2) as usize
                            + oc.len().max(coeffs.len());
                        let mut merged = vec![0.0; len];
                        for (k, c) in oc.iter().enumerate() {
                            merged[((*ob - new_base) / 2) as usize + k] += o.coeff * c;
                        }
                        for (k, c) in coeffs.iter().enumerate() {
                            merged[((*base - new_base) / 2) as usize + k] += mode.coeff * c;
                        }
                        *ob = new_base;
                        *oc = merged;
                        o.coeff = 1.0;
                        absorbed = true;
                        break;
                    }
                }
                if absorbed {
                    continue;
                }
            }
            out.push(mode);
        }
        // Re-normalize merged power series (trim + drop empties).
        self.modes = out
            .into_iter()
            .filter_map(|m| {
                let m = ScalarMode::new(m.index, m.radial, m.time, m.coeff).ok()?;
                (m.coeff != 0.0).then_some(m)
            })
            .collect();
    }

    /// Drop modes whose coefficient magnitude is below `tol` in absolute
    /// value (for cleaning round-off residue after exact cancellations).
    pub fn dropped_below(&self, tol: f64) -> ScalarField {
        let modes = self
            .modes
            .iter()
            .filter(|m| {
                let series_scale = match &m.radial {
                    RadialKind::PowerSeries { coeffs, .. } => {
                        coeffs.iter().map(|c| c.abs()).fold(0.0, f64::max)
                    }
                    _ => 1.0,
                };
                m.coeff.abs() * series_scale > tol
            })
            .cloned()
            .collect();
        ScalarField { modes, domain_hint: self.domain_hint }
    }

    /// Value at (point, t): sum of coeff * R(r) * Y(theta,phi) * T(t).
    pub fn eval(&self, p: &SpherePoint, t: f64) -> Result<f64> {
        let mut s = 0.0;
        for m in &self.modes {
            let y = ylm::eval_ylm(m.index.n, m.index.m, p.theta, p.phi);
            s += m.coeff * m.radial_value(p.r)? * y * m.time.value(t);
        }
        Ok(s)
    }

    /// Exact gradient in spherical components (d_r, (1/r) d_theta,
    /// (1/(r sin)) d_phi).
    pub fn eval_gradient_sph(&self, p: &SpherePoint, t: f64) -> Result<Vec3> {
        let mut g = Vec3::ZERO;
        for m in &self.modes {
            let (n, mm) = (m.index.n, m.index.m);
            let tv = m.coeff * m.time.value(t);
            if tv == 0.0 {
                continue;
            }
            let rv = m.radial_value(p.r)?;
            let rd = m.radial_d1(p.r)?;
            let y = ylm::eval_ylm(n, mm, p.theta, p.phi);
            g.x += tv * rd * y;
            if n > 0 {
                // R/r is finite for every nonsingular kind once n >= 1; the
                // singular kinds already errored at r = 0 above.
                let r_over = if p.r == 0.0 {
                    // Only degree-1 growing solids reach here with a finite
                    // limit R/r -> 1; higher degrees vanish.
                    match (&m.radial, n) {
                        (RadialKind::SolidGrowing, 1) => 1.0,
                        (RadialKind::PowerSeries { base: 1, coeffs }, _) => coeffs[0],
                        _ => 0.0,
                    }
                } else {
                    rv / p.r
                };
                g.y += tv * r_over * ylm::eval_ylm_dtheta(n, mm, p.theta, p.phi);
                g.z += tv * r_over * ylm::eval_ylm_dphi_over_sin(n, mm, p.theta, p.phi);
            }
        }
        Ok(g)
    }

    /// Spherical components of curl(r * field): (0, (1/sin) d_phi, -d_theta).
    pub fn eval_curl_r_sph(&self, p: &SpherePoint, t: f64) -> Result<Vec3> {
        let mut v = Vec3::ZERO;
        for m in &self.modes {
            let (n, mm) = (m.index.n, m.index.m);
            if n == 0 {
                continue;
            }
            let tv = m.coeff * m.time.value(t);
            if tv == 0.0 {
                continue;
            }
            let rv = m.radial_value(p.r)?;
            v.y += tv * rv * ylm::eval_ylm_dphi_over_sin(n, mm, p.theta, p.phi);
            v.z -= tv * rv * ylm::eval_ylm_dtheta(n, mm, p.theta, p.phi);
        }
        Ok(v)
    }

    /// Spherical components of curl curl (r * field):
    ///   ( n(n+1) R/r Y,  (R/r + R') d_theta Y,  (R/r + R') (1/sin) d_phi Y ).
    pub fn eval_curl_curl_r_sph(&self, p: &SpherePoint, t: f64) -> Result<Vec3> {
        let mut v = Vec3::ZERO;
        for m in &self.modes {
            let (n, mm) = (m.index.n, m.index.m);
            if n == 0 {
                continue;
            }
            let tv = m.coeff * m.time.value(t);
            if tv == 0.0 {
                continue;
            }
            let rv = m.radial_value(p.r)?;
            let rd = m.radial_d1(p.r)?;
            let r_over = if p.r == 0.0 {
                match (&m.radial, n) {
                    (RadialKind::SolidGrowing, 1) => 1.0,
                    (RadialKind::PowerSeries { base: 1, coeffs }, _) => coeffs[0],
                    _ => 0.0,
                }
            } else {
                rv / p.r
            };
            let y = ylm::eval_ylm(n, mm, p.theta, p.phi);
            v.x += tv * (n * (n + 1)) as f64 * r_over * y;
            let tang = r_over + rd;
            v.y += tv * tang * ylm::eval_ylm_dtheta(n, mm, p.theta, p.phi);
            v.z += tv * tang * ylm::eval_ylm_dphi_over_sin(n, mm, p.theta, p.phi);
        }
        Ok(v)
    }

    /// d/dr of (r * radial component) for the poloidal evaluation paths:
    /// used to tabulate exact radial derivatives during decomposition.
    pub(crate) fn eval_dr_r_dr_sph(&self, p: &SpherePoint, t: f64) -> Result<f64> {
        // d/dr ( r * dS/dr ) = R' + r R'' summed over modes, times Y T.
        let mut s = 0.0;
        for m in &self.modes {
            let tv = m.coeff * m.time.value(t);
            if tv == 0.0 {
                continue;
            }
            let y = ylm::eval_ylm(m.index.n, m.index.m, p.theta, p.phi);
            s += tv * (m.radial_d1(p.r)? + p.r * m.radial_d2(p.r)?) * y;
        }
        Ok(s)
    }

    /// Exact gradient as a symbolic vector field.
    pub fn gradient(&self) -> super::VectorField {
        super::VectorField::Gradient(self.clone())
    }

    /// Exact spatial Laplacian as a new mode sum.
    pub fn laplacian(&self) -> ScalarField {
        let modes = self.modes.iter().flat_map(|m| m.laplacian_modes()).collect();
        let mut f = ScalarField { modes, domain_hint: self.domain_hint };
        f.merge();
        f
    }

    /// Exact time derivative.
    pub fn dt(&self) -> ScalarField {
        let modes = self.modes.iter().flat_map(|m| m.dt_modes()).collect();
        let mut f = ScalarField { modes, domain_hint: self.domain_hint };
        f.merge();
        f
    }

    /// (lap - (1/nu) d/dt) applied exactly.
    pub fn heat_op(&self, params: &FluidParams) -> ScalarField {
        self.laplacian().plus(&self.dt().scaled(-1.0 / params.nu))
    }

    /// int_0^t field ds, computed per mode in closed form.
    pub fn time_integral(&self) -> ScalarField {
        let modes = self.modes.iter().flat_map(|m| m.time_integral_modes()).collect();
        let mut f = ScalarField { modes, domain_hint: self.domain_hint };
        f.merge();
        f
    }

    /// d/dr { r * field } in closed mode form. Only power-type radial kinds
    /// are representable; modes of other kinds with |coeff| <= drop_tol are
    /// discarded (they arise as round-off residue of exact cancellations),
    /// larger ones are an error.
    pub fn dr_r_times(&self, drop_tol: f64) -> Result<ScalarField> {
        let mut modes = Vec::new();
        for m in &self.modes {
            match m.dr_r_times_modes() {
                Ok(mut v) => modes.append(&mut v),
                Err(e) => {
                    if m.coeff.abs() <= drop_tol {
                        continue;
                    }
                    return Err(e);
                }
            }
        }
        let mut f = ScalarField { modes, domain_hint: self.domain_hint };
        f.merge();
        Ok(f)
    }

    /// r d/dr { field }, with the same representability rule.
    pub fn r_dr(&self, drop_tol: f64) -> Result<ScalarField> {
        let mut modes = Vec::new();
        for m in &self.modes {
            match m.r_dr_modes() {
                Ok(mut v) => modes.append(&mut v),
                Err(e) => {
                    if m.coeff.abs() <= drop_tol {
                        continue;
                    }
                    return Err(e);
                }
            }
        }
        let mut f = ScalarField { modes, domain_hint: self.domain_hint };
        f.merge();
        Ok(f)
    }

    pub fn plus(&self, other: &ScalarField) -> ScalarField {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().cloned());
        let mut f = ScalarField { modes, domain_hint: self.domain_hint.or(other.domain_hint) };
        f.merge();
        f
    }

    pub fn scaled(&self, factor: f64) -> ScalarField {
        let mut f = ScalarField {
            modes: self.modes.iter().map(|m| m.scaled(factor)).collect(),
            domain_hint: self.domain_hint,
        };
        f.merge();
        f
    }

    /// All modes spatially harmonic (by kind classification)?
    pub fn is_harmonic_by_kind(&self) -> bool {
        self.modes.iter().all(|m| m.is_harmonic())
    }

    /// Any mode annihilated by mu (lap - (1/nu) d/dt)?
    pub fn has_heat_type_mode(&self, params: &FluidParams) -> bool {
        self.modes.iter().any(|m| m.is_heat_type(params))
    }
}
