//! Recovery of the generating scalars A and B from a divergence-free vector
//! field sampled on spherical shells:
//!
//!   L A = -r.V,      L B = -r.(curl V),
//!
//! inverted per spherical-harmonic slot by the eigenvalues -n(n+1) of the
//! transverse operator. The n = 0 slots are annihilated by L and must carry
//! no content: nonzero spherically-symmetric radial flux (a source flow such
//! as r-hat / r^2) has no representation of this form and is rejected rather
//! than silently projected away.

use crate::error::{Result, StokesError};
use crate::fields::{VectorField, VectorSample};
use crate::geom::{SpherePoint, Vec3};
use crate::interp::CubicSpline;
use crate::operators::{fd_curl, StencilSpec};
use crate::quad::gauss_legendre;
use crate::ylm;

/// Sampling lattice on a shell: radii x Gauss-Legendre colatitudes x uniform
/// azimuths x sample times.
#[derive(Debug, Clone)]
pub struct ShellGrid {
    pub r_nodes: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    /// Gauss-Legendre weights of cos(theta), aligned with `theta_nodes`.
    pub theta_weights: Vec<f64>,
    pub phi_nodes: Vec<f64>,
    pub times: Vec<f64>,
}

impl ShellGrid {
    pub fn new(r_nodes: Vec<f64>, n_theta: usize, n_phi: usize, times: Vec<f64>) -> Result<Self> {
        if r_nodes.len() < 2 || n_theta < 2 || n_phi < 2 {
            return Err(StokesError::GridTooCoarse(
                "need at least two nodes along each axis".into(),
            ));
        }
        if r_nodes[0] <= 0.0 {
            return Err(StokesError::Spec("inner radius must be positive".into()));
        }
        if r_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StokesError::Spec("radii must be strictly increasing".into()));
        }
        if times.is_empty() {
            return Err(StokesError::Spec("need at least one sample time".into()));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        // Ascending theta (descending cos theta).
        let theta_nodes: Vec<f64> = xs.iter().rev().map(|x| x.acos()).collect();
        let theta_weights: Vec<f64> = ws.iter().rev().copied().collect();
        let phi_nodes: Vec<f64> = (0..n_phi)
            .map(|k| 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64)
            .collect();
        Ok(ShellGrid { r_nodes, theta_nodes, theta_weights, phi_nodes, times })
    }

    /// Evenly spaced radii on [r1, r2].
    pub fn uniform(
        r1: f64,
        r2: f64,
        nr: usize,
        n_theta: usize,
        n_phi: usize,
        times: Vec<f64>,
    ) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1) {
            return Err(StokesError::Spec(format!("invalid shell [{r1}, {r2}]")));
        }
        if nr < 2 {
            return Err(StokesError::GridTooCoarse("need at least two radii".into()));
        }
        let r_nodes = (0..nr)
            .map(|i| r1 + (r2 - r1) * i as f64 / (nr - 1) as f64)
            .collect();
        ShellGrid::new(r_nodes, n_theta, n_phi, times)
    }

    pub fn r1(&self) -> f64 {
        self.r_nodes[0]
    }

    pub fn r2(&self) -> f64 {
        *self.r_nodes.last().unwrap()
    }

    /// All lattice points in (r, theta, phi) lexicographic order.
    pub fn points(&self) -> Vec<SpherePoint> {
        let mut pts =
            Vec::with_capacity(self.r_nodes.len() * self.theta_nodes.len() * self.phi_nodes.len());
        for &r in &self.r_nodes {
            for &theta in &self.theta_nodes {
                for &phi in &self.phi_nodes {
                    pts.push(SpherePoint::new(r, theta, phi));
                }
            }
        }
        pts
    }

    pub fn n_angular(&self) -> usize {
        self.theta_nodes.len() * self.phi_nodes.len()
    }
}

/// Spherical-harmonic coefficients of one sphere: flat layout n^2 + n + m.
#[derive(Debug, Clone, PartialEq)]
pub struct ShtCoefficients {
    pub lmax: u32,
    pub values: Vec<f64>,
}

impl ShtCoefficients {
    pub fn zero(lmax: u32) -> Self {
        ShtCoefficients { lmax, values: vec![0.0; ((lmax + 1) * (lmax + 1)) as usize] }
    }

    pub fn flat_index(n: u32, m: i32) -> usize {
        (n * n) as usize + (n as i32 + m) as usize
    }

    pub fn get(&self, n: u32, m: i32) -> f64 {
        self.values[Self::flat_index(n, m)]
    }
}

/// Forward spherical-harmonic analysis of scalar samples on one sphere,
/// samples in theta-major order. Exact for band-limited input with
/// n <= lmax when n_theta >= lmax+1 and n_phi >= 2 lmax + 1.
pub fn sht_analyze(samples: &[f64], grid: &ShellGrid, lmax: u32) -> Result<ShtCoefficients> {
    let nt = grid.theta_nodes.len();
    let np = grid.phi_nodes.len();
    if samples.len() != nt * np {
        return Err(StokesError::Format(format!(
            "expected {} samples on the sphere, got {}",
            nt * np,
            samples.len()
        )));
    }
    if nt < (lmax + 1) as usize || np < (2 * lmax + 1) as usize {
        return Err(StokesError::GridTooCoarse(format!(
            "band limit {lmax} needs n_theta >= {} and n_phi >= {} (have {nt}, {np})",
            lmax + 1,
            2 * lmax + 1
        )));
    }
    let dphi = 2.0 * std::f64::consts::PI / np as f64;
    let mut out = ShtCoefficients::zero(lmax);
    for n in 0..=lmax {
        for m in -(n as i32)..=(n as i32) {
            let mut acc = 0.0;
            for (j, (&theta, &w)) in grid.theta_nodes.iter().zip(&grid.theta_weights).enumerate() {
                let mut ring = 0.0;
                for (k, &phi) in grid.phi_nodes.iter().enumerate() {
                    ring += samples[j * np + k] * ylm::eval_ylm(n, m, theta, phi);
                }
                acc += w * ring;
            }
            out.values[ShtCoefficients::flat_index(n, m)] = acc * dphi;
        }
    }
    Ok(out)
}

/// The recovered scalars, tabulated per (time, radius). `a_dr` carries
/// dA/dr alongside the values so synthesis can use exact derivatives at the
/// nodes; between nodes both are interpolated by not-a-knot cubic splines.
#[derive(Debug, Clone)]
pub struct AbDecomposition {
    pub lmax: u32,
    pub r_nodes: Vec<f64>,
    pub times: Vec<f64>,
    /// a[time][radius]
    pub a: Vec<Vec<ShtCoefficients>>,
    pub a_dr: Vec<Vec<ShtCoefficients>>,
    pub b: Vec<Vec<ShtCoefficients>>,
    /// Worst pointwise deviation between the analyzed sphere samples and
    /// their band-limited reconstruction: nonzero values signal content
    /// above the requested band limit (aliasing) rather than noise.
    pub analysis_residual: f64,
}

/// Max |samples - sum c Y| over a sphere: the truncation defect of one
/// analysis slice.
fn analysis_defect(samples: &[f64], grid: &ShellGrid, coeffs: &ShtCoefficients) -> f64 {
    let np = grid.phi_nodes.len();
    let mut worst = 0.0_f64;
    for (j, &theta) in grid.theta_nodes.iter().enumerate() {
        for (k, &phi) in grid.phi_nodes.iter().enumerate() {
            let mut synth = 0.0;
            for n in 0..=coeffs.lmax {
                for m in -(n as i32)..=(n as i32) {
                    let c = coeffs.get(n, m);
                    if c != 0.0 {
                        synth += c * ylm::eval_ylm(n, m, theta, phi);
                    }
                }
            }
            worst = worst.max((samples[j * np + k] - synth).abs());
        }
    }
    worst
}

/// Recover A and B of V = curl curl(r A) + curl(r B) on the grid.
///
/// The input must be divergence-free (checked with the finite-difference
/// oracle); vorticity comes from the exact mode curl when available and
/// fourth-order finite differences for sampled fields.
pub fn recover_ab(
    v: &VectorField,
    grid: &ShellGrid,
    lmax: u32,
    _params: &crate::fields::FluidParams,
) -> Result<AbDecomposition> {
    let st = StencilSpec::default_space();
    let pts = grid.points();

    // Scale and divergence pre-check.
    let mut vscale = 0.0_f64;
    let mut samples: Vec<Vec<VectorSample>> = Vec::with_capacity(grid.times.len());
    for &t in &grid.times {
        let mut slice = Vec::with_capacity(pts.len());
        for p in &pts {
            let s = v.eval(p, t)?;
            vscale = vscale.max(s.cartesian.norm());
            slice.push(s);
        }
        samples.push(slice);
    }
    let div_tol = 1e-6 * vscale.max(1.0);
    for &t in &grid.times {
        for p in &pts {
            let d = crate::operators::fd_divergence(v, p, t, &st)?;
            if d.abs() > div_tol {
                return Err(StokesError::NotDivergenceFree { max_div: d.abs(), tol: div_tol });
            }
        }
    }

    let curl_tree = if v.is_mode_based() { Some(v.curl()?) } else { None };
    let nt = grid.theta_nodes.len();
    let np = grid.phi_nodes.len();
    let mono_tol = 1e-6 * vscale.max(1.0);

    let mut a = Vec::with_capacity(grid.times.len());
    let mut a_dr = Vec::with_capacity(grid.times.len());
    let mut b = Vec::with_capacity(grid.times.len());
    let mut analysis_residual = 0.0_f64;
    for (ti, &t) in grid.times.iter().enumerate() {
        let mut a_slices = Vec::with_capacity(grid.r_nodes.len());
        let mut adr_slices = Vec::with_capacity(grid.r_nodes.len());
        let mut b_slices = Vec::with_capacity(grid.r_nodes.len());
        for (ri, &r) in grid.r_nodes.iter().enumerate() {
            let mut rv = vec![0.0; nt * np];
            let mut drv = vec![0.0; nt * np];
            let mut rw = vec![0.0; nt * np];
            for j in 0..nt {
                for k in 0..np {
                    let p = SpherePoint::new(r, grid.theta_nodes[j], grid.phi_nodes[k]);
                    let idx_flat = (ri * nt + j) * np + k;
                    let s = &samples[ti][idx_flat];
                    rv[j * np + k] = r * s.spherical.x;
                    drv[j * np + k] = v.eval_dr_r_vr(&p, t)?;
                    let curl_cart = match &curl_tree {
                        Some(c) => c.eval(&p, t)?.cartesian,
                        None => fd_curl(v, &p, t, &st)?,
                    };
                    rw[j * np + k] = p.to_cartesian().dot(&curl_cart);
                }
            }
            let rv_c = sht_analyze(&rv, grid, lmax)?;
            let drv_c = sht_analyze(&drv, grid, lmax)?;
            let rw_c = sht_analyze(&rw, grid, lmax)?;
            analysis_residual = analysis_residual
                .max(analysis_defect(&rv, grid, &rv_c))
                .max(analysis_defect(&rw, grid, &rw_c));
            if rv_c.get(0, 0).abs() > mono_tol {
                return Err(StokesError::MonopoleFlux(format!(
                    "r.V has spherically symmetric content {:.3e} at r = {r} (tolerance {:.1e}); \
                     nonzero radial flux cannot be decomposed",
                    rv_c.get(0, 0),
                    mono_tol
                )));
            }
            if rw_c.get(0, 0).abs() > mono_tol {
                return Err(StokesError::MonopoleFlux(format!(
                    "r.(curl V) has spherically symmetric content {:.3e} at r = {r}",
                    rw_c.get(0, 0)
                )));
            }
            let mut a_s = ShtCoefficients::zero(lmax);
            let mut adr_s = ShtCoefficients::zero(lmax);
            let mut b_s = ShtCoefficients::zero(lmax);
            for n in 1..=lmax {
                let eig = (n * (n + 1)) as f64;
                for m in -(n as i32)..=(n as i32) {
                    let idx = ShtCoefficients::flat_index(n, m);
                    a_s.values[idx] = rv_c.values[idx] / eig;
                    adr_s.values[idx] = drv_c.values[idx] / eig;
                    b_s.values[idx] = rw_c.values[idx] / eig;
                }
            }
            a_slices.push(a_s);
            adr_slices.push(adr_s);
            b_slices.push(b_s);
        }
        a.push(a_slices);
        a_dr.push(adr_slices);
        b.push(b_slices);
    }
    Ok(AbDecomposition {
        lmax,
        r_nodes: grid.r_nodes.clone(),
        times: grid.times.clone(),
        a,
        a_dr,
        b,
        analysis_residual,
    })
}

impl AbDecomposition {
    fn time_index(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&tt| (tt - t).abs() <= 1e-9 * t.abs().max(1.0))
            .ok_or_else(|| {
                StokesError::Extrapolation(format!("time {t} is not among the tabulated times"))
            })
    }

    fn radius_index(&self, r: f64) -> Option<usize> {
        self.r_nodes.iter().position(|&rr| (rr - r).abs() <= 1e-12 * rr.max(1.0))
    }
}

/// Evaluate V = curl curl(r A) + curl(r B) from recovered coefficients.
/// At tabulated radii the stored values and derivatives are used directly;
/// in between, cubic-spline interpolation supplies both.
pub fn synthesize(dec: &AbDecomposition, point: &SpherePoint, t: f64) -> Result<VectorSample> {
    let ti = dec.time_index(t)?;
    let r = point.r;
    let (r_lo, r_hi) = (dec.r_nodes[0], *dec.r_nodes.last().unwrap());
    if r < r_lo - 1e-12 || r > r_hi + 1e-12 {
        return Err(StokesError::Extrapolation(format!(
            "radius {r} outside tabulated [{r_lo}, {r_hi}]"
        )));
    }
    let node = dec.radius_index(r);
    let mut sph = Vec3::ZERO;
    for n in 1..=dec.lmax {
        let eig = (n * (n + 1)) as f64;
        for m in -(n as i32)..=(n as i32) {
            let idx = ShtCoefficients::flat_index(n, m);
            let (a_val, a_der, b_val) = match node {
                Some(ri) => (
                    dec.a[ti][ri].values[idx],
                    dec.a_dr[ti][ri].values[idx],
                    dec.b[ti][ri].values[idx],
                ),
                None => {
                    let ya: Vec<f64> = dec.a[ti].iter().map(|c| c.values[idx]).collect();
                    let yd: Vec<f64> = dec.a_dr[ti].iter().map(|c| c.values[idx]).collect();
                    let yb: Vec<f64> = dec.b[ti].iter().map(|c| c.values[idx]).collect();
                    (
                        CubicSpline::new(&dec.r_nodes, &ya)?.eval(r)?,
                        CubicSpline::new(&dec.r_nodes, &yd)?.eval(r)?,
                        CubicSpline::new(&dec.r_nodes, &yb)?.eval(r)?,
                    )
                }
            };
            let y = ylm::eval_ylm(n, m, point.theta, point.phi);
            let dy_dt = ylm::eval_ylm_dtheta(n, m, point.theta, point.phi);
            let dy_dp = ylm::eval_ylm_dphi_over_sin(n, m, point.theta, point.phi);
            let tang = a_val / r + a_der;
            sph.x += eig * a_val / r * y;
            sph.y += tang * dy_dt + b_val * dy_dp;
            sph.z += tang * dy_dp - b_val * dy_dt;
        }
    }
    Ok(VectorSample { spherical: sph, cartesian: point.spherical_to_cartesian(&sph) })
}

/// Parse shell samples from CSV text with header `r,theta,phi,t,vx,vy,vz`
/// (row order free). The lattice is inferred and validated: colatitudes must
/// match the Gauss-Legendre nodes for their count, azimuths must be uniform
/// starting at zero. Returns the grid and a smooth sampled field built from
/// per-sphere spherical-harmonic analysis plus radial splines.
pub fn read_samples_csv(text: &str) -> Result<(ShellGrid, VectorField)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| StokesError::Format("empty sample file".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["r", "theta", "phi", "t", "vx", "vy", "vz"] {
        return Err(StokesError::Format(format!(
            "expected header r,theta,phi,t,vx,vy,vz, got '{header}'"
        )));
    }
    let mut rows: Vec<[f64; 7]> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(StokesError::Format(format!(
                "line {}: expected 7 comma-separated values",
                lineno + 2
            )));
        }
        let mut row = [0.0; 7];
        for (i, f) in fields.iter().enumerate() {
            row[i] = f.parse::<f64>().map_err(|e| {
                StokesError::Format(format!("line {}: bad number '{f}': {e}", lineno + 2))
            })?;
        }
        rows.push(row);
    }
    let rs = distinct_sorted(rows.iter().map(|r| r[0]));
    let thetas = distinct_sorted(rows.iter().map(|r| r[1]));
    let phis = distinct_sorted(rows.iter().map(|r| r[2]));
    let ts = distinct_sorted(rows.iter().map(|r| r[3]));
    let (nr, nt, np, ntime) = (rs.len(), thetas.len(), phis.len(), ts.len());
    if rows.len() != nr * nt * np * ntime {
        return Err(StokesError::Format(format!(
            "sample lattice incomplete: {} rows cannot fill {}x{}x{}x{} = {}",
            rows.len(),
            nr,
            nt,
            np,
            ntime,
            nr * nt * np * ntime
        )));
    }
    let grid = ShellGrid::new(rs.clone(), nt, np, ts.clone())?;
    // Validate the angular lattice against the grid conventions.
    for (have, want) in thetas.iter().zip(&grid.theta_nodes) {
        if (have - want).abs() > 1e-9 {
            return Err(StokesError::Format(format!(
                "colatitude {have} does not match the Gauss-Legendre node {want} for {nt} nodes"
            )));
        }
    }
    for (have, want) in phis.iter().zip(&grid.phi_nodes) {
        if (have - want).abs() > 1e-9 {
            return Err(StokesError::Format(format!(
                "azimuth {have} does not match the uniform node {want} for {np} nodes"
            )));
        }
    }

    // Fill the lattice, checking for duplicates/holes.
    let lookup = |vals: &[f64], x: f64| vals.iter().position(|&v| (v - x).abs() <= 1e-9).unwrap();
    let mut data = vec![f64::NAN; nr * nt * np * ntime * 3];
    for row in &rows {
        let (ri, tj, pk, tl) = (
            lookup(&rs, row[0]),
            lookup(&thetas, row[1]),
            lookup(&phis, row[2]),
            lookup(&ts, row[3]),
        );
        let base = (((tl * nr + ri) * nt + tj) * np + pk) * 3;
        if !data[base].is_nan() {
            return Err(StokesError::Format(format!(
                "duplicate sample at r={}, theta={}, phi={}, t={}",
                row[0], row[1], row[2], row[3]
            )));
        }
        data[base] = row[4];
        data[base + 1] = row[5];
        data[base + 2] = row[6];
    }
    if data.iter().any(|x| x.is_nan()) {
        return Err(StokesError::Format("sample lattice has holes".into()));
    }

    // Analyze each sphere per Cartesian component, then spline radially.
    // Band limit: everything the colatitude count can resolve.
    let lmax_grid = (nt as u32 - 1).min((np as u32 - 1) / 2);
    let ncoef = ((lmax_grid + 1) * (lmax_grid + 1)) as usize;
    // splines[time][comp][coef]
    let mut splines: Vec<Vec<Vec<CubicSpline>>> = Vec::with_capacity(ntime);
    for tl in 0..ntime {
        let mut per_comp = Vec::with_capacity(3);
        for comp in 0..3 {
            let mut coef_by_radius = vec![vec![0.0; nr]; ncoef];
            for ri in 0..nr {
                let mut sphere = vec![0.0; nt * np];
                for tj in 0..nt {
                    for pk in 0..np {
                        sphere[tj * np + pk] =
                            data[(((tl * nr + ri) * nt + tj) * np + pk) * 3 + comp];
                    }
                }
                let c = sht_analyze(&sphere, &grid, lmax_grid)?;
                for (ci, v) in c.values.iter().enumerate() {
                    coef_by_radius[ci][ri] = *v;
                }
            }
            let mut per_coef = Vec::with_capacity(ncoef);
            for coef in &coef_by_radius {
                per_coef.push(CubicSpline::new(&rs, coef)?);
            }
            per_comp.push(per_coef);
        }
        splines.push(per_comp);
    }

    let times = ts.clone();
    let label = format!("csv lattice {nr}x{nt}x{np}x{ntime}");
    let field = VectorField::Sampled(crate::fields::SampledField::new(label, move |x: Vec3, t: f64| {
        let Some(tl) = times.iter().position(|&tt| (tt - t).abs() <= 1e-9 * t.abs().max(1.0))
        else {
            return Vec3::new(f64::NAN, f64::NAN, f64::NAN);
        };
        let p = SpherePoint::from_cartesian(&x);
        let mut out = [0.0; 3];
        for comp in 0..3 {
            let mut acc = 0.0;
            let mut ci = 0;
            for n in 0..=lmax_grid {
                for m in -(n as i32)..=(n as i32) {
                    let coef = splines[tl][comp][ci].eval_extended(p.r);
                    if coef != 0.0 {
                        acc += coef * ylm::eval_ylm(n, m, p.theta, p.phi);
                    }
                    ci += 1;
                }
            }
            out[comp] = acc;
        }
        Vec3::new(out[0], out[1], out[2])
    }));
    Ok((grid, field))
}

fn distinct_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * a.abs().max(1.0));
    v
}
