//! Not-a-knot cubic spline interpolation on an irregular 1-D grid.

use crate::error::{Result, StokesError};

/// Cubic spline through (x_i, y_i) with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() || x.len() < 2 {
            return Err(StokesError::Format(
                "spline needs at least two nodes with matching ordinates".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(StokesError::Format("spline abscissae must be strictly increasing".into()));
        }
        let n = x.len();
        if n == 2 {
            // Degenerates to the straight line.
            return Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m: vec![0.0; 2] });
        }
        if n == 3 {
            // Not-a-knot with three nodes is the single parabola through them.
            let m1 = 2.0 * divided_difference_2(x, y, 0);
            return Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m: vec![m1; 3] });
        }

        // Tridiagonal system for the interior second derivatives, with
        // not-a-knot rows at both ends folded in. Solved by elimination on a
        // full (but banded) representation for clarity; n stays small here.
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut a = vec![0.0; n]; // sub-diagonal
        let mut b = vec![0.0; n]; // diagonal
        let mut c = vec![0.0; n]; // super-diagonal
        let mut d = vec![0.0; n]; // rhs

        for i in 1..n - 1 {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
        }
        // Not-a-knot: third derivative continuous across x[1] and x[n-2]:
        //   h1*m0 - (h0+h1)*m1 + h0*m2 = 0
        // Fold m0 = ((h0+h1)*m1 - h0*m2)/h1 into row 1 (and mirrored at the end).
        // Row 1 becomes: (b1 + a1*(h0+h1)/h1) m1 + (c1 - a1*h0/h1) m2 = d1.
        let r0 = (h[0] + h[1]) / h[1];
        let s0 = h[0] / h[1];
        b[1] += a[1] * r0;
        c[1] -= a[1] * s0;
        a[1] = 0.0;
        let rn = (h[n - 2] + h[n - 3]) / h[n - 3];
        let sn = h[n - 2] / h[n - 3];
        b[n - 2] += c[n - 2] * rn;
        a[n - 2] -= c[n - 2] * sn;
        c[n - 2] = 0.0;

        // Thomas algorithm on rows 1..n-1.
        for i in 2..n - 1 {
            let f = a[i] / b[i - 1];
            b[i] -= f * c[i - 1];
            d[i] -= f * d[i - 1];
        }
        let mut m = vec![0.0; n];
        m[n - 2] = d[n - 2] / b[n - 2];
        for i in (1..n - 2).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
        m[0] = r0 * m[1] - s0 * m[2];
        m[n - 1] = rn * m[n - 2] - sn * m[n - 3];

        Ok(CubicSpline { x: x.to_vec(), y: y.to_vec(), m })
    }

    fn segment(&self, xq: f64) -> Result<usize> {
        let n = self.x.len();
        let tol = 1e-12 * (self.x[n - 1] - self.x[0]).abs().max(1.0);
        if xq < self.x[0] - tol || xq > self.x[n - 1] + tol {
            return Err(StokesError::Extrapolation(format!(
                "x = {xq} outside [{}, {}]",
                self.x[0],
                self.x[n - 1]
            )));
        }
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        Ok(i)
    }

    /// Like `eval`, but continues the boundary cubic outside the data range
    /// instead of erroring (used for finite-difference stencils that poke a
    /// step or two past the sampled lattice).
    pub fn eval_extended(&self, xq: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let u = (self.x[i + 1] - xq) / h;
        let v = (xq - self.x[i]) / h;
        u * self.y[i]
            + v * self.y[i + 1]
            + ((u * u * u - u) * self.m[i] + (v * v * v - v) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn eval(&self, xq: f64) -> Result<f64> {
        let i = self.segment(xq)?;
        let h = self.x[i + 1] - self.x[i];
        let u = (self.x[i + 1] - xq) / h;
        let v = (xq - self.x[i]) / h;
        Ok(u * self.y[i]
            + v * self.y[i + 1]
            + ((u * u * u - u) * self.m[i] + (v * v * v - v) * self.m[i + 1]) * h * h / 6.0)
    }

    pub fn eval_deriv(&self, xq: f64) -> Result<f64> {
        let i = self.segment(xq)?;
        let h = self.x[i + 1] - self.x[i];
        let u = (self.x[i + 1] - xq) / h;
        let v = (xq - self.x[i]) / h;
        Ok((self.y[i + 1] - self.y[i]) / h
            + ((3.0 * v * v - 1.0) * self.m[i + 1] - (3.0 * u * u - 1.0) * self.m[i]) * h / 6.0)
    }
}

fn divided_difference_2(x: &[f64], y: &[f64], i: usize) -> f64 {
    let d01 = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    let d12 = (y[i + 2] - y[i + 1]) / (x[i + 2] - x[i + 1]);
    (d12 - d01) / (x[i + 2] - x[i])
}
