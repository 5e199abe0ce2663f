//! Spherical Bessel functions j_n, y_n and their modified relatives i_n, k_n,
//! with first and second derivatives.
//!
//! Orders stay small here (n <= ~12), so the implementation favours the
//! numerically safe branch per kind: ascending series where upward recurrence
//! cancels (j below the turning point, i always), upward recurrence where it
//! is stable (j above the turning point, y and k always).

use crate::error::{Result, StokesError};

/// The four radial profile families: first/second kind and their modified
/// (exponential) counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselKind {
    J,
    Y,
    I,
    K,
}

/// Value of the spherical Bessel function of the given kind and order.
pub fn spherical_bessel(kind: BesselKind, n: u32, x: f64) -> Result<f64> {
    Ok(eval(kind, n, x)?.0)
}

/// First derivative with respect to x.
pub fn spherical_bessel_d1(kind: BesselKind, n: u32, x: f64) -> Result<f64> {
    Ok(eval(kind, n, x)?.1)
}

/// Second derivative, from the defining ODE
///   w'' = -(2/x) w' + (n(n+1)/x^2 -+ 1) w
/// (minus for j/y, plus for i/k).
pub fn spherical_bessel_d2(kind: BesselKind, n: u32, x: f64) -> Result<f64> {
    if x == 0.0 {
        // Regular kinds have finite limits; only n=0 and n=2 contribute.
        return match kind {
            BesselKind::J => Ok(match n {
                0 => -1.0 / 3.0,
                2 => 2.0 / 15.0,
                _ => 0.0,
            }),
            BesselKind::I => Ok(match n {
                0 => 1.0 / 3.0,
                2 => 2.0 / 15.0,
                _ => 0.0,
            }),
            _ => Err(domain_err(kind, x)),
        };
    }
    let (w, dw) = eval(kind, n, x)?;
    let nn = (n * (n + 1)) as f64;
    let sign = match kind {
        BesselKind::J | BesselKind::Y => -1.0,
        BesselKind::I | BesselKind::K => 1.0,
    };
    Ok(-2.0 / x * dw + (nn / (x * x) + sign) * w)
}

fn domain_err(kind: BesselKind, x: f64) -> StokesError {
    StokesError::Domain(format!("spherical Bessel {kind:?} undefined at x = {x}"))
}

/// (value, derivative) pair; single dispatch point so the two stay consistent.
fn eval(kind: BesselKind, n: u32, x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(domain_err(kind, x));
    }
    match kind {
        BesselKind::J => {
            if x < 0.0 {
                return Err(domain_err(kind, x));
            }
            Ok(j_pair(n, x))
        }
        BesselKind::I => {
            if x < 0.0 {
                return Err(domain_err(kind, x));
            }
            Ok(i_pair(n, x))
        }
        BesselKind::Y => {
            if x <= 0.0 {
                return Err(domain_err(kind, x));
            }
            Ok(y_pair(n, x))
        }
        BesselKind::K => {
            if x <= 0.0 {
                return Err(domain_err(kind, x));
            }
            Ok(k_pair(n, x))
        }
    }
}

/// j_n via ascending series: j_n(x) = sum_k (-1)^k x^(n+2k) / (2^k k! (2n+2k+1)!!).
/// Terms decrease essentially from the start for x <~ n, which is exactly
/// where this branch is used; also returns the termwise derivative.
fn j_series(n: u32, x: f64) -> (f64, f64) {
    // Leading factor x^n / (2n+1)!!
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= x / (2 * k + 1) as f64;
    }
    let mut term = lead;
    let mut val = term;
    let mut dval = if n == 0 { 0.0 } else { n as f64 * term / x.max(f64::MIN_POSITIVE) };
    if x == 0.0 {
        // x^n -> only the k=0 term of order n survives; derivative only n=1.
        let v = if n == 0 { 1.0 } else { 0.0 };
        let d = if n == 1 { 1.0 / 3.0 } else { 0.0 };
        return (v, d);
    }
    let z = x * x / 2.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -z / (kf * (2.0 * (n as f64 + kf) + 1.0));
        val += term;
        dval += (n as f64 + 2.0 * kf) * term / x;
        if term.abs() < 1e-17 * val.abs().max(1e-300) {
            break;
        }
    }
    (val, dval)
}

fn j_pair(n: u32, x: f64) -> (f64, f64) {
    if x < n as f64 || x < 0.5 {
        return j_series(n, x);
    }
    // Upward recurrence, stable for n <= x.
    let j0 = x.sin() / x;
    if n == 0 {
        return (j0, (x.cos() - j0) / x);
    }
    let j1 = x.sin() / (x * x) - x.cos() / x;
    let (mut prev, mut cur) = (j0, j1);
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    // j_n' = j_{n-1} - (n+1)/x j_n
    (cur, prev - (n + 1) as f64 / x * cur)
}

fn y_pair(n: u32, x: f64) -> (f64, f64) {
    let y0 = -x.cos() / x;
    if n == 0 {
        return (y0, (x.sin() + x.cos() / x) / x);
    }
    let y1 = -x.cos() / (x * x) - x.sin() / x;
    let (mut prev, mut cur) = (y0, y1);
    for k in 1..n {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    (cur, prev - (n + 1) as f64 / x * cur)
}

/// i_n via its all-positive ascending series (no cancellation at any x).
fn i_pair(n: u32, x: f64) -> (f64, f64) {
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= x / (2 * k + 1) as f64;
    }
    if x == 0.0 {
        let v = if n == 0 { 1.0 } else { 0.0 };
        let d = if n == 1 { 1.0 / 3.0 } else { 0.0 };
        return (v, d);
    }
    let z = x * x / 2.0;
    let mut term = lead;
    let mut val = term;
    let mut dval = n as f64 * term / x;
    for k in 1..400 {
        let kf = k as f64;
        term *= z / (kf * (2.0 * (n as f64 + kf) + 1.0));
        val += term;
        dval += (n as f64 + 2.0 * kf) * term / x;
        if term < 1e-17 * val {
            break;
        }
    }
    (val, dval)
}

fn k_pair(n: u32, x: f64) -> (f64, f64) {
    let pref = std::f64::consts::FRAC_PI_2 * (-x).exp();
    let k0 = pref / x;
    if n == 0 {
        return (k0, -pref * (x + 1.0) / (x * x));
    }
    let k1 = pref * (x + 1.0) / (x * x);
    let (mut prev, mut cur) = (k0, k1);
    for k in 1..n {
        let next = prev + (2 * k + 1) as f64 / x * cur;
        prev = cur;
        cur = next;
    }
    // k_n' = -k_{n-1} - (n+1)/x k_n
    (cur, -prev - (n + 1) as f64 / x * cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: plain ascending series evaluated with no shared
    /// code path (used to pin the recurrence branches).
    fn series_oracle(kind: BesselKind, n: u32, x: f64) -> f64 {
        let sign = match kind {
            BesselKind::J => -1.0,
            BesselKind::I => 1.0,
            _ => panic!("series oracle only for regular kinds"),
        };
        let mut sum = 0.0;
        for k in 0..80 {
            let mut term = x.powi(n as i32 + 2 * k);
            for j in 1..=k {
                term *= sign * 0.5 / j as f64;
            }
            // (2n+2k+1)!!
            let mut dfact = 1.0;
            let mut m = 2 * (n as i64 + k as i64) + 1;
            while m > 1 {
                dfact *= m as f64;
                m -= 2;
            }
            sum += term / dfact;
        }
        sum
    }

    #[test]
    fn j0_at_pi_is_zero() {
        let v = spherical_bessel(BesselKind::J, 0, std::f64::consts::PI).unwrap();
        assert!(v.abs() < 1e-14, "j0(pi) = {v:e}");
    }

    #[test]
    fn j1_small_argument_series_limit() {
        let x = 1e-4;
        let v = spherical_bessel(BesselKind::J, 1, x).unwrap();
        assert_relative_eq!(v, x / 3.0, max_relative = 1e-8);
    }

    #[test]
    fn i0_is_sinh_over_x() {
        let v = spherical_bessel(BesselKind::I, 0, 1.0).unwrap();
        assert_relative_eq!(v, 1.0_f64.sinh(), max_relative = 1e-12);
        assert_relative_eq!(v, 1.1752011936438014, max_relative = 1e-12);
    }

    #[test]
    fn closed_forms_low_order() {
        for &x in &[0.3_f64, 1.1, 4.7, 11.3] {
            let j1 = x.sin() / (x * x) - x.cos() / x;
            let y1 = -x.cos() / (x * x) - x.sin() / x;
            let i1 = x.cosh() / x - x.sinh() / (x * x);
            let k1 = std::f64::consts::FRAC_PI_2 * (-x).exp() * (x + 1.0) / (x * x);
            assert_relative_eq!(spherical_bessel(BesselKind::J, 1, x).unwrap(), j1, max_relative = 1e-12);
            assert_relative_eq!(spherical_bessel(BesselKind::Y, 1, x).unwrap(), y1, max_relative = 1e-12);
            assert_relative_eq!(spherical_bessel(BesselKind::I, 1, x).unwrap(), i1, max_relative = 1e-12);
            assert_relative_eq!(spherical_bessel(BesselKind::K, 1, x).unwrap(), k1, max_relative = 1e-12);
        }
    }

    #[test]
    fn matches_series_oracle_across_branches() {
        for n in 0..=8 {
            for &x in &[0.05, 0.4, 1.0, 2.3, 5.0, 9.0] {
                let j = spherical_bessel(BesselKind::J, n, x).unwrap();
                let jo = series_oracle(BesselKind::J, n, x);
                assert_relative_eq!(j, jo, max_relative = 1e-10, epsilon = 1e-14);
                let i = spherical_bessel(BesselKind::I, n, x).unwrap();
                let io = series_oracle(BesselKind::I, n, x);
                assert_relative_eq!(i, io, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn wronskian_j_y() {
        // j_{n+1} y_n - j_n y_{n+1} = 1/x^2
        for n in 0..=7 {
            for &x in &[0.5, 2.0, 8.0] {
                let jn1 = spherical_bessel(BesselKind::J, n + 1, x).unwrap();
                let jn = spherical_bessel(BesselKind::J, n, x).unwrap();
                let yn1 = spherical_bessel(BesselKind::Y, n + 1, x).unwrap();
                let yn = spherical_bessel(BesselKind::Y, n, x).unwrap();
                assert_relative_eq!(jn1 * yn - jn * yn1, 1.0 / (x * x), max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for kind in [BesselKind::J, BesselKind::Y, BesselKind::I, BesselKind::K] {
            for n in 0..=6 {
                for &x in &[0.7, 1.9, 6.1] {
                    let d = spherical_bessel_d1(kind, n, x).unwrap();
                    let fd = (spherical_bessel(kind, n, x + h).unwrap()
                        - spherical_bessel(kind, n, x - h).unwrap())
                        / (2.0 * h);
                    assert_relative_eq!(d, fd, max_relative = 1e-8, epsilon = 1e-10);
                    // Wider step for the second difference: h^2 truncation
                    // balances the eps/h^2 round-off near h ~ 1e-4.
                    let h2 = 1e-4;
                    let d2 = spherical_bessel_d2(kind, n, x).unwrap();
                    let fd2 = (spherical_bessel(kind, n, x + h2).unwrap()
                        - 2.0 * spherical_bessel(kind, n, x).unwrap()
                        + spherical_bessel(kind, n, x - h2).unwrap())
                        / (h2 * h2);
                    assert_relative_eq!(d2, fd2, max_relative = 1e-5, epsilon = 1e-7);
                }
            }
        }
    }

    #[test]
    fn singular_kinds_reject_zero() {
        assert!(matches!(spherical_bessel(BesselKind::Y, 2, 0.0), Err(StokesError::Domain(_))));
        assert!(matches!(spherical_bessel(BesselKind::K, 0, 0.0), Err(StokesError::Domain(_))));
        assert!(spherical_bessel(BesselKind::J, 3, 0.0).unwrap() == 0.0);
        assert!(spherical_bessel(BesselKind::I, 0, 0.0).unwrap() == 1.0);
    }
}
