//! Constructors for exact unsteady Stokes solutions.
//!
//! A flow spec carries the generating scalars (A, B, chi, P, T): the velocity
//! is V = curl curl(r A) + curl(r B) and the pressure
//! p = p0 + chi + d/dr{ r [P + mu (lap - (1/nu) d/dt) A] }, valid whenever
//!   mu lap (lap - (1/nu) d/dt) A + lap P = 0   (poloidal balance)
//!   mu (lap - (1/nu) d/dt) B + T = 0           (toroidal balance).
//!
//! Particular solutions of those balances are built per mode by an ascending
//! power-series ansatz with an analytic recurrence, so every construction
//! stays exact to round-off. The radius-only gauge freedom in A and B is
//! fixed to zero.

use crate::error::{Result, StokesError};
use crate::fields::{
    FluidParams, RadialKind, ScalarField, ScalarMode, SphIndex, TimeKind, VectorField,
};
use crate::geom::SpherePoint;
use serde::{Deserialize, Serialize};

/// Which constructor produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// General solution from a full FlowSpec.
    GeneralSolution,
    /// Heat-type vector plus potential gradients.
    NaghdiHsu,
    /// Poloidal flow realizing a prescribed harmonic pressure.
    HarmonicPressure,
    /// Assembled by hand.
    Custom,
}

/// A full flow description: fluid parameters, the five generating scalars
/// and the pressure constant.
#[derive(Debug, Clone)]
pub struct FlowSpec {
    pub params: FluidParams,
    pub a: ScalarField,
    pub b: ScalarField,
    pub chi: ScalarField,
    /// Poloidal body-force potential P.
    pub p_force: ScalarField,
    /// Toroidal body-force potential T.
    pub t_force: ScalarField,
    pub p0: f64,
}

/// Velocity/pressure pair produced by a constructor.
#[derive(Debug, Clone)]
pub struct FlowSolution {
    pub velocity: VectorField,
    pub pressure: ScalarField,
    pub provenance: Provenance,
}

impl FlowSolution {
    pub fn is_mode_based(&self) -> bool {
        self.velocity.is_mode_based()
    }
}

/// Deterministic quasi-random probe points inside a shell, used for the
/// mode-arithmetic residual checks. splitmix64 keeps this reproducible
/// without an RNG dependency.
pub(crate) fn probe_points(domain: (f64, f64), count: usize, seed: u64) -> Vec<SpherePoint> {
    let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let (r1, r2) = domain;
    (0..count)
        .map(|_| {
            let r = r1 + (r2 - r1) * (0.05 + 0.9 * next());
            // Keep theta off the poles so spherical components stay printable.
            let theta = 0.15 + (std::f64::consts::PI - 0.3) * next();
            let phi = 2.0 * std::f64::consts::PI * next();
            SpherePoint::new(r, theta, phi)
        })
        .collect()
}

pub(crate) const PROBE_TIMES: [f64; 3] = [0.0, 0.13, 0.5];

fn max_abs_on(field: &ScalarField, pts: &[SpherePoint], times: &[f64]) -> Result<f64> {
    let mut m = 0.0_f64;
    for p in pts {
        for &t in times {
            m = m.max(field.eval(p, t)?.abs());
        }
    }
    Ok(m)
}

impl FlowSpec {
    pub fn homogeneous(params: FluidParams, a: ScalarField, b: ScalarField, p0: f64) -> Self {
        FlowSpec {
            params,
            a,
            b,
            chi: ScalarField::zero(),
            p_force: ScalarField::zero(),
            t_force: ScalarField::zero(),
            p0,
        }
    }

    fn domain(&self) -> (f64, f64) {
        self.a
            .domain_hint
            .or(self.b.domain_hint)
            .or(self.p_force.domain_hint)
            .unwrap_or((0.5, 1.5))
    }

    /// Check both generating balances by exact mode arithmetic on probe
    /// points. Residual tolerance 1e-10 relative to the operand scale.
    pub fn validate(&self) -> Result<()> {
        let pts = probe_points(self.domain(), 40, 0x5701);
        let heat_a = self.a.heat_op(&self.params).scaled(self.params.mu);
        let res_a = heat_a.laplacian().plus(&self.p_force.laplacian());
        let scale_a = max_abs_on(&heat_a, &pts, &PROBE_TIMES)?
            .max(max_abs_on(&self.p_force, &pts, &PROBE_TIMES)?)
            .max(1.0);
        let worst_a = max_abs_on(&res_a, &pts, &PROBE_TIMES)?;
        if worst_a > 1e-10 * scale_a {
            return Err(StokesError::Spec(format!(
                "poloidal balance violated: max |mu lap(lap - dt/nu) A + lap P| = {worst_a:.3e} \
                 exceeds {:.1e}",
                1e-10 * scale_a
            )));
        }
        let res_b = self.b.heat_op(&self.params).scaled(self.params.mu).plus(&self.t_force);
        let scale_b = max_abs_on(&self.b, &pts, &PROBE_TIMES)?
            .max(max_abs_on(&self.t_force, &pts, &PROBE_TIMES)?)
            .max(1.0);
        let worst_b = max_abs_on(&res_b, &pts, &PROBE_TIMES)?;
        if worst_b > 1e-10 * scale_b {
            return Err(StokesError::Spec(format!(
                "toroidal balance violated: max |mu (lap - dt/nu) B + T| = {worst_b:.3e} \
                 exceeds {:.1e}",
                1e-10 * scale_b
            )));
        }
        Ok(())
    }

    /// The body force grad chi + curl curl(r P) + curl(r T).
    pub fn body_force(&self) -> VectorField {
        crate::operators::body_force(&self.chi, &self.p_force, &self.t_force)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.chi.is_zero() && self.p_force.is_zero() && self.t_force.is_zero()
    }
}

/// Assemble the general solution from a validated spec.
pub fn build_flow(spec: &FlowSpec) -> Result<FlowSolution> {
    spec.validate()?;
    let velocity = VectorField::CurlCurlR(spec.a.clone()).plus(VectorField::CurlR(spec.b.clone()));
    // Q = P + mu (lap - dt/nu) A is spatially harmonic by the poloidal
    // balance, so only power-type content can carry weight; anything else is
    // cancellation residue.
    let q = spec.p_force.plus(&spec.a.heat_op(&spec.params).scaled(spec.params.mu));
    let drop = 1e-9 * q.coeff_scale().max(1e-30);
    let radial_term = q.dr_r_times(drop)?;
    let pressure = ScalarField::constant(spec.p0).plus(&spec.chi).plus(&radial_term);
    Ok(FlowSolution { velocity, pressure, provenance: Provenance::GeneralSolution })
}

/// Particular solution F of mu (lap - (1/nu) d/dt) F = g, built mode by
/// mode. Helmholtz-kind modes invert by a scalar division; power-type modes
/// use the ascending ansatz F = sum_k a_k r^(p+2k) Y with
///   a_1 = coeff / (mu f(p+2)),   a_{k+1} = (sigma/nu) a_k / f(p+2k+2),
/// where f(q) = (q-n)(q+n+1); polynomial time factors chain one Poisson
/// solve per power of t. A zero denominator anywhere is a resonance: the
/// forcing would need log-r or secular terms outside the mode family.
pub fn solve_heat_poisson(g: &ScalarField, params: &FluidParams) -> Result<ScalarField> {
    let r_max = g.domain_hint.map(|d| d.1.abs().max(1.0)).unwrap_or(2.0);
    let mut out = ScalarField::zero();
    for mode in &g.modes {
        let solved = solve_mode(mode, params, r_max)?;
        out = out.plus(&solved);
    }
    out.domain_hint = g.domain_hint;
    Ok(out)
}

/// (q - n)(q + n + 1): the factor picked up by r^q Y_n under the Laplacian.
fn lap_factor(q: i32, n: u32) -> f64 {
    ((q - n as i32) * (q + n as i32 + 1)) as f64
}

fn resonance(mode: &ScalarMode, detail: &str) -> StokesError {
    StokesError::Resonance(format!(
        "forcing mode (n={}, m={}, {:?}, {:?}) {detail}",
        mode.index.n, mode.index.m, mode.radial, mode.time
    ))
}

fn solve_mode(mode: &ScalarMode, params: &FluidParams, r_max: f64) -> Result<ScalarField> {
    let n = mode.index.n;
    match &mode.radial {
        RadialKind::BesselJ { lambda } | RadialKind::BesselY { lambda } => {
            solve_helmholtz_mode(mode, -lambda * lambda, params)
        }
        RadialKind::ModifiedI { lambda } | RadialKind::ModifiedK { lambda } => {
            solve_helmholtz_mode(mode, lambda * lambda, params)
        }
        RadialKind::SolidGrowing => solve_power_mode(mode, n as i32, mode.coeff, params, r_max),
        RadialKind::SolidDecaying => {
            solve_power_mode(mode, -(n as i32) - 1, mode.coeff, params, r_max)
        }
        RadialKind::PowerSeries { base, coeffs } => {
            let mut acc = ScalarField::zero();
            let coeffs = coeffs.clone();
            for (k, c) in coeffs.iter().enumerate() {
                if *c == 0.0 {
                    continue;
                }
                let p = base + 2 * k as i32;
                acc = acc.plus(&solve_power_mode(mode, p, mode.coeff * c, params, r_max)?);
            }
            Ok(acc)
        }
    }
}

/// Forcing whose radial profile is a Laplacian eigenfunction with
/// eigenvalue `eig` (never zero for the Helmholtz kinds).
fn solve_helmholtz_mode(mode: &ScalarMode, eig: f64, params: &FluidParams) -> Result<ScalarField> {
    match mode.time {
        TimeKind::Constant => {
            Ok(ScalarField::from_mode(mode.scaled(1.0 / (params.mu * eig))))
        }
        TimeKind::Exp { sigma } => {
            let denom = eig - sigma / params.nu;
            if denom.abs() <= 1e-12 * eig.abs().max(sigma.abs() / params.nu) {
                return Err(resonance(mode, "is heat-type: zero denominator in the inversion"));
            }
            Ok(ScalarField::from_mode(mode.scaled(1.0 / (params.mu * denom))))
        }
        TimeKind::Poly { degree } => {
            // F = sum_j c_j t^(degree-j) R Y with
            // mu (eig c_j - (degree-j+1) c_{j-1}/nu) = coeff delta_{j0}.
            let mut modes = Vec::new();
            let mut c = mode.coeff / (params.mu * eig);
            for j in 0..=degree {
                let mut m = mode.clone();
                m.coeff = c;
                m.time = TimeKind::Poly { degree: degree - j }.normalized();
                modes.push(m);
                if j < degree {
                    c *= (degree - j) as f64 / (params.nu * eig);
                }
            }
            ScalarField::new(modes)
        }
    }
}

/// Forcing amp * r^p Y_n carrying the mode's time factor.
fn solve_power_mode(
    mode: &ScalarMode,
    p: i32,
    amp: f64,
    params: &FluidParams,
    r_max: f64,
) -> Result<ScalarField> {
    let n = mode.index.n;
    let poisson = |pow: i32, a: f64| -> Result<(i32, f64)> {
        let f = lap_factor(pow + 2, n);
        if f == 0.0 {
            return Err(resonance(
                mode,
                &format!("needs the harmonic power r^{} with a log-r correction", pow + 2),
            ));
        }
        Ok((pow + 2, a / f))
    };
    match mode.time {
        TimeKind::Constant => {
            let (q, a) = poisson(p, amp / params.mu)?;
            single_power(mode.index, q, a, TimeKind::Constant)
        }
        TimeKind::Exp { sigma } => {
            // Ascending series a_k r^(p+2k), truncated at 1e-16 relative on
            // the shell scale r_max.
            let (mut q, mut a) = poisson(p, amp / params.mu)?;
            let base = q;
            let mut coeffs = vec![a];
            let mut max_term = a.abs() * r_max.powi(q);
            for _ in 0..300 {
                a *= sigma / params.nu;
                let next = poisson(q, a)?;
                q = next.0;
                a = next.1;
                let term = a.abs() * r_max.powi(q);
                if term < 1e-16 * max_term {
                    break;
                }
                coeffs.push(a);
                max_term = max_term.max(term);
            }
            let m = ScalarMode::new(
                mode.index,
                RadialKind::PowerSeries { base, coeffs },
                TimeKind::Exp { sigma },
                1.0,
            )?;
            Ok(ScalarField::from_mode(m))
        }
        TimeKind::Poly { degree } => {
            // Chain of Poisson solves: P_0 from the forcing, then
            // lap P_j = (degree-j+1)/nu * P_{j-1}.
            let mut modes = Vec::new();
            let (mut q, mut a) = poisson(p, amp / params.mu)?;
            for j in 0..=degree {
                modes.push(power_mode(mode.index, q, a, TimeKind::Poly { degree: degree - j })?);
                if j < degree {
                    let next = poisson(q, a * (degree - j) as f64 / params.nu)?;
                    q = next.0;
                    a = next.1;
                }
            }
            ScalarField::new(modes)
        }
    }
}

fn power_mode(index: SphIndex, power: i32, amp: f64, time: TimeKind) -> Result<ScalarMode> {
    ScalarMode::new(
        index,
        RadialKind::PowerSeries { base: power, coeffs: vec![1.0] },
        time.normalized(),
        amp,
    )
}

fn single_power(index: SphIndex, power: i32, amp: f64, time: TimeKind) -> Result<ScalarField> {
    Ok(ScalarField::from_mode(power_mode(index, power, amp, time)?))
}

/// Particular A for a given P: the spatially-harmonic content of P does not
/// enter the balance, the remainder solves mu (lap - dt/nu) A = -P_rest.
pub fn solve_a_for_p(p_force: &ScalarField, params: &FluidParams) -> Result<ScalarField> {
    let rest: Vec<ScalarMode> =
        p_force.modes.iter().filter(|m| !m.is_harmonic()).cloned().collect();
    if rest.is_empty() {
        return Ok(ScalarField::zero());
    }
    let mut rest = ScalarField::new(rest)?;
    rest.domain_hint = p_force.domain_hint;
    solve_heat_poisson(&rest.scaled(-1.0), params)
}

/// Particular B for a given T: mu (lap - dt/nu) B = -T.
pub fn solve_b_for_t(t_force: &ScalarField, params: &FluidParams) -> Result<ScalarField> {
    if t_force.is_zero() {
        return Ok(ScalarField::zero());
    }
    solve_heat_poisson(&t_force.scaled(-1.0), params)
}

/// Velocity from a heat-type vector and a harmonic potential:
///   V = Phi + (1/mu) grad psi1 - nu grad int_0^t div Phi ds,
///   p = -(1/nu) d psi1/dt.
///
/// Preconditions: every component of Phi is annihilated by (lap - dt/nu),
/// psi1 is harmonic, and div Phi vanishes at t = 0 (without which V is not
/// divergence-free).
pub fn naghdi_hsu(
    phi: &VectorField,
    psi1: &ScalarField,
    params: &FluidParams,
) -> Result<FlowSolution> {
    if !psi1.is_harmonic_by_kind() {
        return Err(StokesError::Precondition(
            "psi1 must be harmonic (solid-harmonic modes only)".into(),
        ));
    }
    if !phi.is_mode_based() {
        return Err(StokesError::Precondition(
            "Phi must be mode-based; sampled fields cannot be checked or integrated exactly"
                .into(),
        ));
    }
    let domain = psi1.domain_hint.unwrap_or((0.5, 1.5));
    let pts = probe_points(domain, 50, 0xa11ce);
    let heat = phi.heat_op(params)?;
    let mut scale = 0.0_f64;
    let mut worst = 0.0_f64;
    for p in &pts {
        for &t in &PROBE_TIMES {
            scale = scale.max(phi.eval(p, t)?.cartesian.norm());
            worst = worst.max(heat.eval(p, t)?.cartesian.norm());
        }
    }
    if worst > 1e-8 * scale.max(1.0) {
        return Err(StokesError::Precondition(format!(
            "Phi is not heat-type: max |(lap - dt/nu) Phi| = {worst:.3e}"
        )));
    }
    let div = phi.divergence()?;
    let mut worst0 = 0.0_f64;
    for p in &pts {
        worst0 = worst0.max(div.eval(p, 0.0)?.abs());
    }
    if worst0 > 1e-8 * scale.max(1.0) {
        return Err(StokesError::Precondition(format!(
            "div Phi(., 0) = {worst0:.3e} is not zero; the construction would not be solenoidal"
        )));
    }
    let velocity = phi
        .clone()
        .plus(VectorField::Gradient(psi1.scaled(1.0 / params.mu)))
        .plus(VectorField::Gradient(div.time_integral()).scaled(-params.nu));
    let pressure = psi1.dt().scaled(-1.0 / params.nu);
    Ok(FlowSolution { velocity, pressure, provenance: Provenance::NaghdiHsu })
}

/// A flow whose pressure is exactly the prescribed harmonic field:
/// phi solves phi + r dphi/dr = p mode-wise (growing modes divide by n+1,
/// decaying ones by -n), A_p solves mu (lap - dt/nu) A_p = phi, and
/// V1 = curl curl(r A_p).
pub fn harmonic_pressure_flow(p: &ScalarField, params: &FluidParams) -> Result<FlowSolution> {
    if !p.is_harmonic_by_kind() {
        return Err(StokesError::Precondition(
            "prescribed pressure must be harmonic (solid-harmonic modes only)".into(),
        ));
    }
    let mut phi_modes = Vec::with_capacity(p.modes.len());
    for m in &p.modes {
        let n = m.index.n;
        let divisor = match m.radial {
            RadialKind::SolidGrowing => (n + 1) as f64,
            RadialKind::SolidDecaying => {
                if n == 0 {
                    return Err(StokesError::Monopole);
                }
                -(n as f64)
            }
            _ => unreachable!("harmonic by kind"),
        };
        phi_modes.push(m.scaled(1.0 / divisor));
    }
    let mut phi = ScalarField::new(phi_modes)?;
    phi.domain_hint = p.domain_hint;
    let a_p = solve_heat_poisson(&phi, params)?;
    // Pressure reconstructed from the construction itself:
    // d/dr{ r mu (lap - dt/nu) A_p } = d/dr{ r phi } = p up to round-off.
    let q = a_p.heat_op(params).scaled(params.mu);
    let drop = 1e-9 * q.coeff_scale().max(1e-30);
    let pressure = q.dr_r_times(drop)?;
    Ok(FlowSolution {
        velocity: VectorField::CurlCurlR(a_p),
        pressure,
        provenance: Provenance::HarmonicPressure,
    })
}

/// A valid pseudo-random flow spec for smoke suites: random heat-type and
/// harmonic content for A and B plus a particular solution for a random
/// forcing, all derived deterministically from the seed.
pub fn sample_spec(seed: u64) -> FlowSpec {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x1234_5678);
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let params = FluidParams::from_nu_rho([0.5, 1.0, 2.0][(next() * 3.0) as usize % 3], 1.0)
        .expect("table values are consistent");
    let pick_nm = |u: f64, v: f64| {
        let n = 1 + (u * 3.0) as u32 % 3;
        let m = ((v * (2 * n + 1) as f64) as i32 % (2 * n as i32 + 1)) - n as i32;
        SphIndex::new(n, m).expect("bounds by construction")
    };
    let amp = |u: f64| 0.3 + 0.7 * u;
    let lambda = 0.8 + 1.2 * next();
    let a_homog = ScalarField::new(vec![
        ScalarMode::new(pick_nm(next(), next()), RadialKind::SolidGrowing,
            TimeKind::Exp { sigma: 0.3 + next() }, amp(next())).expect("valid"),
        ScalarMode::new(
            pick_nm(next(), next()),
            RadialKind::BesselJ { lambda },
            TimeKind::Exp { sigma: -params.nu * lambda * lambda },
            amp(next()),
        )
        .expect("valid"),
    ])
    .expect("valid modes");
    let lambda_b = 0.6 + next();
    let b_homog = ScalarField::new(vec![ScalarMode::new(
        pick_nm(next(), next()),
        RadialKind::ModifiedI { lambda: lambda_b },
        TimeKind::Exp { sigma: params.nu * lambda_b * lambda_b },
        amp(next()),
    )
    .expect("valid")])
    .expect("valid modes");
    let idx = pick_nm(next(), next());
    let p_force = ScalarField::new(vec![ScalarMode::new(
        idx,
        RadialKind::PowerSeries { base: idx.n as i32 + 2, coeffs: vec![1.0] },
        TimeKind::Constant,
        amp(next()),
    )
    .expect("valid")])
    .expect("valid modes")
    .with_domain_hint(0.5, 1.5);
    let t_force = ScalarField::new(vec![ScalarMode::new(
        pick_nm(next(), next()),
        RadialKind::SolidGrowing,
        TimeKind::Constant,
        amp(next()),
    )
    .expect("valid")])
    .expect("valid modes")
    .with_domain_hint(0.5, 1.5);
    let a = solve_a_for_p(&p_force, &params).expect("non-resonant by construction").plus(&a_homog);
    let b = solve_b_for_t(&t_force, &params).expect("non-resonant by construction").plus(&b_homog);
    FlowSpec {
        params,
        a: a.with_domain_hint(0.5, 1.5),
        b: b.with_domain_hint(0.5, 1.5),
        chi: ScalarField::coordinate(2, TimeKind::Constant, amp(next())),
        p_force,
        t_force,
        p0: next() - 0.5,
    }
}

/// JSON document for a FlowSpec:
/// {"nu":..,"mu":..,"rho":..,"p0":..,"A":[modes],"B":[..],"chi":[..],"P":[..],"T":[..]}
#[derive(Serialize, Deserialize)]
struct FlowSpecFile {
    nu: f64,
    mu: f64,
    rho: f64,
    #[serde(default)]
    p0: f64,
    #[serde(rename = "A", default)]
    a: Vec<ScalarMode>,
    #[serde(rename = "B", default)]
    b: Vec<ScalarMode>,
    #[serde(default)]
    chi: Vec<ScalarMode>,
    #[serde(rename = "P", default)]
    p: Vec<ScalarMode>,
    #[serde(rename = "T", default)]
    t: Vec<ScalarMode>,
}

impl FlowSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: FlowSpecFile =
            serde_json::from_str(text).map_err(|e| StokesError::Format(e.to_string()))?;
        Ok(FlowSpec {
            params: FluidParams::new(file.nu, file.mu, file.rho)?,
            a: ScalarField::new(file.a)?,
            b: ScalarField::new(file.b)?,
            chi: ScalarField::new(file.chi)?,
            p_force: ScalarField::new(file.p)?,
            t_force: ScalarField::new(file.t)?,
            p0: file.p0,
        })
    }

    pub fn to_json(&self) -> String {
        let file = FlowSpecFile {
            nu: self.params.nu,
            mu: self.params.mu,
            rho: self.params.rho,
            p0: self.p0,
            a: self.a.modes.clone(),
            b: self.b.modes.clone(),
            chi: self.chi.modes.clone(),
            p: self.p_force.modes.clone(),
            t: self.t_force.modes.clone(),
        };
        serde_json::to_string_pretty(&file).expect("spec serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use approx::assert_relative_eq;

    fn mode(n: u32, m: i32, radial: RadialKind, time: TimeKind, coeff: f64) -> ScalarMode {
        ScalarMode::new(SphIndex::new(n, m).unwrap(), radial, time, coeff).unwrap()
    }

    #[test]
    fn zero_spec_gives_rest_state() {
        let spec = FlowSpec::homogeneous(
            FluidParams::unit(),
            ScalarField::zero(),
            ScalarField::zero(),
            7.0,
        );
        let sol = build_flow(&spec).unwrap();
        let p = SpherePoint::new(1.0, 1.0, 1.0);
        assert!(sol.velocity.eval(&p, 0.3).unwrap().cartesian.norm() == 0.0);
        assert_relative_eq!(sol.pressure.eval(&p, 0.3).unwrap(), 7.0, max_relative = 1e-14);
    }

    #[test]
    fn uniform_poloidal_flow() {
        // A = z, B = 0: V = (0,0,2), p = p0.
        let spec = FlowSpec::homogeneous(
            FluidParams::unit(),
            ScalarField::coordinate(2, TimeKind::Constant, 1.0),
            ScalarField::zero(),
            3.0,
        );
        let sol = build_flow(&spec).unwrap();
        let p = SpherePoint::new(0.8, 0.7, 2.0);
        let v = sol.velocity.eval(&p, 0.0).unwrap().cartesian;
        assert!((v - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-13);
        assert_relative_eq!(sol.pressure.eval(&p, 1.0).unwrap(), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn invalid_spec_rejected() {
        // B = z exp(t) with T = 0 violates the toroidal balance.
        let spec = FlowSpec::homogeneous(
            FluidParams::unit(),
            ScalarField::zero(),
            ScalarField::coordinate(2, TimeKind::Exp { sigma: 1.0 }, 1.0),
            0.0,
        );
        let err = build_flow(&spec).unwrap_err();
        assert!(matches!(err, StokesError::Spec(_)));
        assert!(err.to_string().contains("toroidal balance"));
    }

    #[test]
    fn heat_poisson_zero() {
        assert!(solve_heat_poisson(&ScalarField::zero(), &FluidParams::unit())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn heat_poisson_steady_x() {
        // g = x steady: F = x r^2/(10 mu); check mu lap F = x exactly.
        let params = FluidParams::from_nu_rho(1.0, 2.0).unwrap();
        let g = ScalarField::coordinate(0, TimeKind::Constant, 1.0);
        let f = solve_heat_poisson(&g, &params).unwrap();
        let p = SpherePoint::new(1.2, 0.9, 0.4);
        let want = p.to_cartesian().x * 1.2 * 1.2 / (10.0 * params.mu);
        assert_relative_eq!(f.eval(&p, 0.0).unwrap(), want, max_relative = 1e-13);
        let back = f.laplacian().scaled(params.mu);
        assert_relative_eq!(
            back.eval(&p, 0.0).unwrap(),
            g.eval(&p, 0.0).unwrap(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn heat_poisson_exponential_series() {
        // g = r^2 Y00 e^(sigma t) with sigma = nu: residual of the truncated
        // series stays below 1e-12 at probe points.
        let params = FluidParams::unit();
        let g = ScalarField::from_mode(mode(
            0,
            0,
            RadialKind::PowerSeries { base: 2, coeffs: vec![1.0] },
            TimeKind::Exp { sigma: params.nu },
            1.0,
        ));
        let f = solve_heat_poisson(&g, &params).unwrap();
        let residual = f.heat_op(&params).scaled(params.mu).plus(&g.scaled(-1.0));
        for p in probe_points((0.5, 1.5), 20, 7) {
            for t in [0.0, 0.2, 0.9] {
                assert!(
                    residual.eval(&p, t).unwrap().abs() < 1e-12,
                    "residual at {p:?} t={t}"
                );
            }
        }
    }

    #[test]
    fn heat_poisson_helmholtz_and_resonance() {
        let params = FluidParams::unit();
        // Non-resonant Bessel forcing inverts by a scalar.
        let g = ScalarField::from_mode(mode(
            2,
            1,
            RadialKind::BesselJ { lambda: 2.0 },
            TimeKind::Constant,
            3.0,
        ));
        let f = solve_heat_poisson(&g, &params).unwrap();
        let residual = f.heat_op(&params).scaled(params.mu).plus(&g.scaled(-1.0));
        assert!(residual.is_zero());
        // Heat-type forcing resonates.
        let bad = ScalarField::from_mode(mode(
            1,
            0,
            RadialKind::BesselJ { lambda: 2.0 },
            TimeKind::Exp { sigma: -4.0 },
            1.0,
        ));
        assert!(matches!(
            solve_heat_poisson(&bad, &params),
            Err(StokesError::Resonance(_))
        ));
    }

    #[test]
    fn heat_poisson_poly_time() {
        // Forcing with t^2: chained Poisson solves terminate and satisfy the
        // equation exactly.
        let params = FluidParams::from_nu_rho(0.5, 2.0).unwrap();
        let g = ScalarField::from_mode(mode(
            1,
            1,
            RadialKind::SolidGrowing,
            TimeKind::Poly { degree: 2 },
            1.7,
        ));
        let f = solve_heat_poisson(&g, &params).unwrap();
        let residual = f.heat_op(&params).scaled(params.mu).plus(&g.scaled(-1.0));
        for p in probe_points((0.5, 1.5), 10, 3) {
            for t in [0.0, 0.5, 2.0] {
                assert!(residual.eval(&p, t).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn a_for_solid_harmonic_p_is_zero() {
        let params = FluidParams::unit();
        let p_force = ScalarField::new(vec![
            mode(2, -1, RadialKind::SolidGrowing, TimeKind::Exp { sigma: 0.7 }, 1.0),
            mode(1, 0, RadialKind::SolidDecaying, TimeKind::Constant, -2.0),
        ])
        .unwrap();
        assert!(solve_a_for_p(&p_force, &params).unwrap().is_zero());
    }

    #[test]
    fn a_for_r_squared_p() {
        // P = r^2 steady: A = -r^4/(20 mu).
        let params = FluidParams::from_nu_rho(1.0, 3.0).unwrap();
        let c = 2.0 * std::f64::consts::PI.sqrt();
        let p_force = ScalarField::from_mode(mode(
            0,
            0,
            RadialKind::PowerSeries { base: 2, coeffs: vec![1.0] },
            TimeKind::Constant,
            c,
        ));
        let a = solve_a_for_p(&p_force, &params).unwrap();
        let pt = SpherePoint::new(1.3, 1.0, 0.1);
        let want = -(1.3_f64).powi(4) / (20.0 * params.mu);
        assert_relative_eq!(a.eval(&pt, 0.0).unwrap(), want, max_relative = 1e-13);
        // Balance: mu lap lap A = -lap P = -6.
        let check = a.laplacian().laplacian().scaled(params.mu);
        assert_relative_eq!(check.eval(&pt, 0.0).unwrap(), -6.0, max_relative = 1e-13);
    }

    #[test]
    fn b_for_t_balances() {
        // T = z steady: mu lap B = -T.
        let params = FluidParams::unit();
        let t_force = ScalarField::coordinate(2, TimeKind::Constant, 1.0);
        let b = solve_b_for_t(&t_force, &params).unwrap();
        let residual = b.heat_op(&params).scaled(params.mu).plus(&t_force);
        for p in probe_points((0.5, 1.5), 10, 11) {
            assert!(residual.eval(&p, 0.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn naghdi_hsu_uniform_stream() {
        // Phi = 0, psi1 = mu z: V = (0,0,1), p = 0.
        let params = FluidParams::from_nu_rho(2.0, 0.5).unwrap();
        let psi1 = ScalarField::coordinate(2, TimeKind::Constant, params.mu);
        let sol = naghdi_hsu(&VectorField::zero(), &psi1, &params).unwrap();
        let p = SpherePoint::new(1.1, 0.4, 0.9);
        let v = sol.velocity.eval(&p, 0.5).unwrap().cartesian;
        assert!((v - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-14);
        assert!(sol.pressure.is_zero());
    }

    #[test]
    fn naghdi_hsu_accelerating_stream() {
        // Phi = 0, psi1 = -mu nu t x: V = (-nu t, 0, 0), p = mu x.
        let params = FluidParams::unit();
        let psi1 = ScalarField::coordinate(0, TimeKind::Poly { degree: 1 }, -params.mu * params.nu);
        let sol = naghdi_hsu(&VectorField::zero(), &psi1, &params).unwrap();
        let p = SpherePoint::new(0.9, 1.3, 0.2);
        let t = 0.7;
        let v = sol.velocity.eval(&p, t).unwrap().cartesian;
        assert!((v - Vec3::new(-params.nu * t, 0.0, 0.0)).norm() < 1e-13);
        let x = p.to_cartesian().x;
        assert_relative_eq!(sol.pressure.eval(&p, t).unwrap(), params.mu * x, max_relative = 1e-13);
    }

    #[test]
    fn naghdi_hsu_rejects_non_heat_type() {
        let params = FluidParams::unit();
        // Phi = curl(r B) with a wrong time factor is not heat-type.
        let b = ScalarField::from_mode(mode(
            1,
            0,
            RadialKind::BesselJ { lambda: 2.0 },
            TimeKind::Exp { sigma: 1.0 },
            1.0,
        ));
        let phi = VectorField::CurlR(b);
        let err = naghdi_hsu(&phi, &ScalarField::zero(), &params).unwrap_err();
        assert!(matches!(err, StokesError::Precondition(_)));
    }

    #[test]
    fn naghdi_hsu_rejects_initial_divergence() {
        let params = FluidParams::unit();
        // Phi = grad(heat mode): heat-type componentwise but div Phi(t=0) != 0.
        let s = ScalarField::from_mode(mode(
            1,
            0,
            RadialKind::BesselJ { lambda: 1.5 },
            TimeKind::Exp { sigma: -1.5 * 1.5 },
            1.0,
        ));
        let phi = VectorField::Gradient(s);
        let err = naghdi_hsu(&phi, &ScalarField::zero(), &params).unwrap_err();
        assert!(err.to_string().contains("div Phi"));
    }

    #[test]
    fn harmonic_pressure_constant() {
        // p = c: A_p = c r^2/(6 mu), V1 = 0, pressure = c.
        let params = FluidParams::unit();
        let p = ScalarField::constant(4.0);
        let sol = harmonic_pressure_flow(&p, &params).unwrap();
        let pt = SpherePoint::new(1.2, 0.8, 0.5);
        assert!(sol.velocity.eval(&pt, 0.0).unwrap().cartesian.norm() < 1e-15);
        assert_relative_eq!(sol.pressure.eval(&pt, 0.0).unwrap(), 4.0, max_relative = 1e-13);
    }

    #[test]
    fn harmonic_pressure_linear() {
        // p = x steady: phi = x/2, A_p = x r^2 / (20 mu),
        // r.V1 = -L A_p = 2 A_p = x r^2/(10 mu).
        let params = FluidParams::from_nu_rho(1.0, 4.0).unwrap();
        let p = ScalarField::coordinate(0, TimeKind::Constant, 1.0);
        let sol = harmonic_pressure_flow(&p, &params).unwrap();
        let pt = SpherePoint::new(1.1, 1.2, 2.5);
        let x = pt.to_cartesian().x;
        let rv = pt.r * sol.velocity.eval(&pt, 0.0).unwrap().spherical.x;
        assert_relative_eq!(rv, x * pt.r * pt.r / (10.0 * params.mu), max_relative = 1e-12);
        assert_relative_eq!(sol.pressure.eval(&pt, 0.0).unwrap(), x, max_relative = 1e-12);
    }

    #[test]
    fn harmonic_pressure_monopole_rejected() {
        let params = FluidParams::unit();
        let p = ScalarField::from_mode(mode(0, 0, RadialKind::SolidDecaying, TimeKind::Constant, 1.0));
        assert!(matches!(harmonic_pressure_flow(&p, &params), Err(StokesError::Monopole)));
    }

    #[test]
    fn sample_specs_validate_and_vary() {
        for seed in [0u64, 1, 7, 42, 1234] {
            let spec = sample_spec(seed);
            spec.validate().unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            let again = sample_spec(seed);
            assert_eq!(spec.a.modes, again.a.modes, "sampler must be deterministic");
        }
        assert_ne!(sample_spec(1).a.modes, sample_spec(2).a.modes);
    }

    #[test]
    fn flow_spec_json_round_trip() {
        let spec = FlowSpec {
            params: FluidParams::unit(),
            a: ScalarField::coordinate(2, TimeKind::Constant, 1.0),
            b: ScalarField::from_mode(mode(
                1,
                0,
                RadialKind::BesselJ { lambda: 2.0 },
                TimeKind::Exp { sigma: -4.0 },
                0.5,
            )),
            chi: ScalarField::zero(),
            p_force: ScalarField::zero(),
            t_force: ScalarField::zero(),
            p0: 1.5,
        };
        let text = spec.to_json();
        let back = FlowSpec::from_json(&text).unwrap();
        assert_eq!(back.p0, 1.5);
        assert_eq!(back.a.modes, spec.a.modes);
        assert_eq!(back.b.modes, spec.b.modes);
        let pt = SpherePoint::new(1.0, 1.0, 1.0);
        let v1 = build_flow(&spec).unwrap().velocity.eval(&pt, 0.1).unwrap().cartesian;
        let v2 = build_flow(&back).unwrap().velocity.eval(&pt, 0.1).unwrap().cartesian;
        assert!((v1 - v2).norm() < 1e-15);
    }
}
