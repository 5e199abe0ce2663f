//! Separable scalar modes: radial profile x real spherical harmonic x time
//! factor, with exact closed-form calculus (gradient, Laplacian, time
//! derivative, heat operator) on finite sums of such modes.

mod scalar;
mod vector;

pub use scalar::ScalarField;
pub use vector::{SampledField, VectorField, VectorSample};

use crate::bessel::{self, BesselKind};
use crate::error::{Result, StokesError};
use serde::{Deserialize, Serialize};

/// Fluid constants. `nu` is kinematic viscosity, `mu` dynamic viscosity,
/// `rho` density; they must satisfy nu = mu/rho.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub nu: f64,
    pub mu: f64,
    pub rho: f64,
}

impl FluidParams {
    pub fn new(nu: f64, mu: f64, rho: f64) -> Result<Self> {
        if !(nu > 0.0 && mu > 0.0 && rho > 0.0) {
            return Err(StokesError::InvalidParams(format!(
                "nu, mu, rho must be positive (got {nu}, {mu}, {rho})"
            )));
        }
        if (rho * nu - mu).abs() > 1e-12 * mu.abs() {
            return Err(StokesError::InvalidParams(format!(
                "rho*nu = {} differs from mu = {} beyond relative 1e-12",
                rho * nu,
                mu
            )));
        }
        Ok(FluidParams { nu, mu, rho })
    }

    /// mu derived from nu and rho.
    pub fn from_nu_rho(nu: f64, rho: f64) -> Result<Self> {
        Self::new(nu, nu * rho, rho)
    }

    /// nu = mu = rho = 1.
    pub fn unit() -> Self {
        FluidParams { nu: 1.0, mu: 1.0, rho: 1.0 }
    }
}

/// Spherical-harmonic degree/order pair, n >= 0 and -n <= m <= n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphIndex {
    pub n: u32,
    pub m: i32,
}

impl SphIndex {
    pub fn new(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(StokesError::InvalidIndex { n: n as i64, m: m as i64 });
        }
        Ok(SphIndex { n, m })
    }
}

/// Radial profile of a mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialKind {
    /// r^n
    SolidGrowing,
    /// r^(-n-1)
    SolidDecaying,
    /// j_n(lambda r)
    BesselJ { lambda: f64 },
    /// y_n(lambda r)
    BesselY { lambda: f64 },
    /// i_n(lambda r)
    ModifiedI { lambda: f64 },
    /// k_n(lambda r)
    ModifiedK { lambda: f64 },
    /// sum_k coeffs[k] r^(base + 2k)
    PowerSeries { base: i32, coeffs: Vec<f64> },
}

impl RadialKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialKind::BesselJ { lambda }
            | RadialKind::BesselY { lambda }
            | RadialKind::ModifiedI { lambda }
            | RadialKind::ModifiedK { lambda } => {
                if !(*lambda > 0.0) {
                    return Err(StokesError::Spec(format!(
                        "radial wavenumber lambda must be positive, got {lambda}"
                    )));
                }
            }
            RadialKind::PowerSeries { coeffs, .. } if coeffs.is_empty() => {
                return Err(StokesError::Spec("empty power-series radial profile".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Singular as r -> 0?
    pub fn singular_at_origin(&self, n: u32) -> bool {
        match self {
            RadialKind::SolidGrowing | RadialKind::BesselJ { .. } | RadialKind::ModifiedI { .. } => false,
            RadialKind::SolidDecaying | RadialKind::BesselY { .. } | RadialKind::ModifiedK { .. } => true,
            RadialKind::PowerSeries { base, coeffs } => {
                let _ = n;
                coeffs.iter().enumerate().any(|(k, c)| *c != 0.0 && base + 2 * (k as i32) < 0)
            }
        }
    }
}

/// Time factor of a mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeKind {
    Constant,
    Exp { sigma: f64 },
    Poly { degree: u32 },
}

impl TimeKind {
    /// Exp(0) and Poly(0) both mean "constant in time".
    pub fn normalized(self) -> TimeKind {
        match self {
            TimeKind::Exp { sigma: 0.0 } => TimeKind::Constant,
            TimeKind::Poly { degree: 0 } => TimeKind::Constant,
            other => other,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeKind::Constant => 1.0,
            TimeKind::Exp { sigma } => (sigma * t).exp(),
            TimeKind::Poly { degree } => t.powi(*degree as i32),
        }
    }
}

/// One separable mode: coeff * R(r) * Y_{n,m}(theta,phi) * T(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarMode {
    #[serde(flatten)]
    pub index: SphIndex,
    pub radial: RadialKind,
    pub time: TimeKind,
    pub coeff: f64,
}

impl ScalarMode {
    pub fn new(index: SphIndex, radial: RadialKind, time: TimeKind, coeff: f64) -> Result<Self> {
        radial.validate()?;
        let mut mode = ScalarMode { index, radial, time: time.normalized(), coeff };
        mode.trim_power_series();
        Ok(mode)
    }

    /// Drop zero leading/trailing power-series coefficients, shifting the base.
    fn trim_power_series(&mut self) {
        if let RadialKind::PowerSeries { base, coeffs } = &mut self.radial {
            while coeffs.last() == Some(&0.0) {
                coeffs.pop();
            }
            while coeffs.first() == Some(&0.0) {
                coeffs.remove(0);
                *base += 2;
            }
            if coeffs.is_empty() {
                self.coeff = 0.0;
                coeffs.push(0.0);
            }
        }
    }

    /// Spatially harmonic for every time factor: solid harmonics only, by
    /// classification (a power series that happens to be harmonic is not
    /// flagged here).
    pub fn is_harmonic(&self) -> bool {
        matches!(self.radial, RadialKind::SolidGrowing | RadialKind::SolidDecaying)
    }

    /// Annihilated by (lap - (1/nu) d/dt): oscillatory kinds paired with the
    /// decaying exponential exp(-nu lambda^2 t), modified kinds with the
    /// growing one, or steady harmonics.
    pub fn is_heat_type(&self, params: &FluidParams) -> bool {
        let matches_sigma = |target: f64| match self.time {
            TimeKind::Exp { sigma } => (sigma - target).abs() <= 1e-12 * target.abs().max(1.0),
            TimeKind::Constant => target == 0.0,
            _ => false,
        };
        match &self.radial {
            RadialKind::BesselJ { lambda } | RadialKind::BesselY { lambda } => {
                matches_sigma(-params.nu * lambda * lambda)
            }
            RadialKind::ModifiedI { lambda } | RadialKind::ModifiedK { lambda } => {
                matches_sigma(params.nu * lambda * lambda)
            }
            RadialKind::SolidGrowing | RadialKind::SolidDecaying => {
                self.time == TimeKind::Constant
            }
            RadialKind::PowerSeries { .. } => false,
        }
    }

    pub(crate) fn radial_value(&self, r: f64) -> Result<f64> {
        let n = self.index.n;
        match &self.radial {
            RadialKind::SolidGrowing => Ok(r.powi(n as i32)),
            RadialKind::SolidDecaying => {
                if r == 0.0 {
                    return Err(origin_err());
                }
                Ok(r.powi(-(n as i32) - 1))
            }
            RadialKind::BesselJ { lambda } => bessel::spherical_bessel(BesselKind::J, n, lambda * r),
            RadialKind::BesselY { lambda } => bessel::spherical_bessel(BesselKind::Y, n, lambda * r),
            RadialKind::ModifiedI { lambda } => bessel::spherical_bessel(BesselKind::I, n, lambda * r),
            RadialKind::ModifiedK { lambda } => bessel::spherical_bessel(BesselKind::K, n, lambda * r),
            RadialKind::PowerSeries { base, coeffs } => {
                let mut s = 0.0;
                for (k, a) in coeffs.iter().enumerate() {
                    if *a == 0.0 {
                        continue;
                    }
                    let p = base + 2 * k as i32;
                    if r == 0.0 && p < 0 {
                        return Err(origin_err());
                    }
                    s += a * r.powi(p);
                }
                Ok(s)
            }
        }
    }

    pub(crate) fn radial_d1(&self, r: f64) -> Result<f64> {
        let n = self.index.n;
        match &self.radial {
            RadialKind::SolidGrowing => {
                Ok(if n == 0 { 0.0 } else { n as f64 * r.powi(n as i32 - 1) })
            }
            RadialKind::SolidDecaying => {
                if r == 0.0 {
                    return Err(origin_err());
                }
                let p = -(n as i32) - 1;
                Ok(p as f64 * r.powi(p - 1))
            }
            RadialKind::BesselJ { lambda } => {
                Ok(lambda * bessel::spherical_bessel_d1(BesselKind::J, n, lambda * r)?)
            }
            RadialKind::BesselY { lambda } => {
                Ok(lambda * bessel::spherical_bessel_d1(BesselKind::Y, n, lambda * r)?)
            }
            RadialKind::ModifiedI { lambda } => {
                Ok(lambda * bessel::spherical_bessel_d1(BesselKind::I, n, lambda * r)?)
            }
            RadialKind::ModifiedK { lambda } => {
                Ok(lambda * bessel::spherical_bessel_d1(BesselKind::K, n, lambda * r)?)
            }
            RadialKind::PowerSeries { base, coeffs } => {
                let mut s = 0.0;
                for (k, a) in coeffs.iter().enumerate() {
                    let p = base + 2 * k as i32;
                    if *a == 0.0 || p == 0 {
                        continue;
                    }
                    if r == 0.0 && p < 1 {
                        return Err(origin_err());
                    }
                    s += a * p as f64 * r.powi(p - 1);
                }
                Ok(s)
            }
        }
    }

    pub(crate) fn radial_d2(&self, r: f64) -> Result<f64> {
        let n = self.index.n;
        match &self.radial {
            RadialKind::SolidGrowing => {
                Ok(if n < 2 { 0.0 } else { (n * (n - 1)) as f64 * r.powi(n as i32 - 2) })
            }
            RadialKind::SolidDecaying => {
                if r == 0.0 {
                    return Err(origin_err());
                }
                let p = -(n as i32) - 1;
                Ok((p * (p - 1)) as f64 * r.powi(p - 2))
            }
            RadialKind::BesselJ { lambda } => {
                Ok(lambda * lambda * bessel::spherical_bessel_d2(BesselKind::J, n, lambda * r)?)
            }
            RadialKind::BesselY { lambda } => {
                Ok(lambda * lambda * bessel::spherical_bessel_d2(BesselKind::Y, n, lambda * r)?)
            }
            RadialKind::ModifiedI { lambda } => {
                Ok(lambda * lambda * bessel::spherical_bessel_d2(BesselKind::I, n, lambda * r)?)
            }
            RadialKind::ModifiedK { lambda } => {
                Ok(lambda * lambda * bessel::spherical_bessel_d2(BesselKind::K, n, lambda * r)?)
            }
            RadialKind::PowerSeries { base, coeffs } => {
                let mut s = 0.0;
                for (k, a) in coeffs.iter().enumerate() {
                    let p = base + 2 * k as i32;
                    if *a == 0.0 || p == 0 || p == 1 {
                        continue;
                    }
                    if r == 0.0 && p < 2 {
                        return Err(origin_err());
                    }
                    s += a * (p * (p - 1)) as f64 * r.powi(p - 2);
                }
                Ok(s)
            }
        }
    }

    /// Modes of the spatial Laplacian of this mode. Empty for harmonics;
    /// Helmholtz kinds map onto themselves scaled by -+lambda^2; power series
    /// map termwise through lap(r^p Y_n) = (p-n)(p+n+1) r^(p-2) Y_n.
    pub(crate) fn laplacian_modes(&self) -> Vec<ScalarMode> {
        match &self.radial {
            RadialKind::SolidGrowing | RadialKind::SolidDecaying => vec![],
            RadialKind::BesselJ { lambda } | RadialKind::BesselY { lambda } => {
                vec![self.scaled(-lambda * lambda)]
            }
            RadialKind::ModifiedI { lambda } | RadialKind::ModifiedK { lambda } => {
                vec![self.scaled(lambda * lambda)]
            }
            RadialKind::PowerSeries { base, coeffs } => {
                let n = self.index.n as i32;
                let new: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let p = base + 2 * k as i32;
                        a * ((p - n) * (p + n + 1)) as f64
                    })
                    .collect();
                match ScalarMode::new(
                    self.index,
                    RadialKind::PowerSeries { base: base - 2, coeffs: new },
                    self.time,
                    self.coeff,
                ) {
                    Ok(m) if m.coeff != 0.0 => vec![m],
                    _ => vec![],
                }
            }
        }
    }

    /// Modes of the time derivative.
    pub(crate) fn dt_modes(&self) -> Vec<ScalarMode> {
        match self.time {
            TimeKind::Constant => vec![],
            TimeKind::Exp { sigma } => vec![self.scaled(sigma)],
            TimeKind::Poly { degree } => {
                let mut m = self.scaled(degree as f64);
                m.time = TimeKind::Poly { degree: degree - 1 }.normalized();
                vec![m]
            }
        }
    }

    /// Modes of int_0^t (this mode) ds.
    pub(crate) fn time_integral_modes(&self) -> Vec<ScalarMode> {
        match self.time {
            TimeKind::Constant => {
                let mut m = self.clone();
                m.time = TimeKind::Poly { degree: 1 };
                vec![m]
            }
            TimeKind::Poly { degree } => {
                let mut m = self.scaled(1.0 / (degree as f64 + 1.0));
                m.time = TimeKind::Poly { degree: degree + 1 };
                vec![m]
            }
            TimeKind::Exp { sigma } => {
                // (exp(sigma t) - 1)/sigma
                let mut c = self.scaled(-1.0 / sigma);
                c.time = TimeKind::Constant;
                vec![self.scaled(1.0 / sigma), c]
            }
        }
    }

    /// d/dr of (r * mode): representable only for the power-type radial kinds.
    pub(crate) fn dr_r_times_modes(&self) -> Result<Vec<ScalarMode>> {
        let n = self.index.n;
        match &self.radial {
            RadialKind::SolidGrowing => Ok(vec![self.scaled(n as f64 + 1.0)]),
            RadialKind::SolidDecaying => {
                if n == 0 {
                    Ok(vec![])
                } else {
                    Ok(vec![self.scaled(-(n as f64))])
                }
            }
            RadialKind::PowerSeries { base, coeffs } => {
                let new: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (base + 2 * k as i32 + 1) as f64)
                    .collect();
                let m = ScalarMode::new(
                    self.index,
                    RadialKind::PowerSeries { base: *base, coeffs: new },
                    self.time,
                    self.coeff,
                )?;
                Ok(if m.coeff != 0.0 { vec![m] } else { vec![] })
            }
            other => Err(StokesError::Unrepresentable(format!(
                "d/dr(r .) of a {other:?} radial profile leaves the mode family"
            ))),
        }
    }

    /// r d/dr of this mode, again power-type only.
    pub(crate) fn r_dr_modes(&self) -> Result<Vec<ScalarMode>> {
        let n = self.index.n;
        match &self.radial {
            RadialKind::SolidGrowing => {
                Ok(if n == 0 { vec![] } else { vec![self.scaled(n as f64)] })
            }
            RadialKind::SolidDecaying => Ok(vec![self.scaled(-(n as f64) - 1.0)]),
            RadialKind::PowerSeries { base, coeffs } => {
                let new: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (base + 2 * k as i32) as f64)
                    .collect();
                let m = ScalarMode::new(
                    self.index,
                    RadialKind::PowerSeries { base: *base, coeffs: new },
                    self.time,
                    self.coeff,
                )?;
                Ok(if m.coeff != 0.0 { vec![m] } else { vec![] })
            }
            other => Err(StokesError::Unrepresentable(format!(
                "r d/dr of a {other:?} radial profile leaves the mode family"
            ))),
        }
    }

    pub(crate) fn scaled(&self, factor: f64) -> ScalarMode {
        let mut m = self.clone();
        m.coeff *= factor;
        m
    }

    /// Key used when merging modes: everything except the coefficient.
    pub(crate) fn same_shape(&self, other: &ScalarMode) -> bool {
        self.index == other.index && self.time == other.time && self.radial == other.radial
    }
}

fn origin_err() -> StokesError {
    StokesError::Domain("singular radial profile evaluated at r = 0".into())
}
