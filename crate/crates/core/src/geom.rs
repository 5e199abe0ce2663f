//! Small 3-vector and spherical/Cartesian point conversions.

use std::ops::{Add, Mul, Neg, Sub};

/// Cartesian 3-vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// A point in spherical coordinates (r, theta, phi), physics convention:
/// theta is the polar angle measured from +z, phi the azimuth from +x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        SpherePoint { r, theta, phi }
    }

    pub fn to_cartesian(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(self.r * st * cp, self.r * st * sp, self.r * ct)
    }

    pub fn from_cartesian(v: &Vec3) -> Self {
        let r = v.norm();
        let rho = v.x.hypot(v.y);
        let theta = rho.atan2(v.z);
        let phi = if rho == 0.0 { 0.0 } else { v.y.atan2(v.x) };
        SpherePoint { r, theta, phi }
    }

    /// Local orthonormal basis (r-hat, theta-hat, phi-hat) at this point.
    pub fn unit_vectors(&self) -> (Vec3, Vec3, Vec3) {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let er = Vec3::new(st * cp, st * sp, ct);
        let et = Vec3::new(ct * cp, ct * sp, -st);
        let ep = Vec3::new(-sp, cp, 0.0);
        (er, et, ep)
    }

    /// Convert spherical components (v_r, v_theta, v_phi) at this point to
    /// Cartesian components.
    pub fn spherical_to_cartesian(&self, comps: &Vec3) -> Vec3 {
        let (er, et, ep) = self.unit_vectors();
        er * comps.x + et * comps.y + ep * comps.z
    }

    /// Project Cartesian components onto the local spherical basis.
    pub fn cartesian_to_spherical(&self, v: &Vec3) -> Vec3 {
        let (er, et, ep) = self.unit_vectors();
        Vec3::new(v.dot(&er), v.dot(&et), v.dot(&ep))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn round_trip_spherical_cartesian() {
        let p = SpherePoint::new(1.3, 0.7, 2.1);
        let q = SpherePoint::from_cartesian(&p.to_cartesian());
        assert_relative_eq!(p.r, q.r, max_relative = 1e-14);
        assert_relative_eq!(p.theta, q.theta, max_relative = 1e-14);
        assert_relative_eq!(p.phi, q.phi, max_relative = 1e-14);
    }

    #[test]
    fn basis_is_orthonormal_and_right_handed() {
        let p = SpherePoint::new(2.0, 1.1, -0.4);
        let (er, et, ep) = p.unit_vectors();
        assert_relative_eq!(er.norm(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(et.norm(), 1.0, max_relative = 1e-15);
        assert!(er.dot(&et).abs() < 1e-15);
        assert!(er.dot(&ep).abs() < 1e-15);
        let cross = er.cross(&et);
        assert_relative_eq!(cross.x, ep.x, epsilon = 1e-15);
        assert_relative_eq!(cross.y, ep.y, epsilon = 1e-15);
        assert_relative_eq!(cross.z, ep.z, epsilon = 1e-15);
    }

    #[test]
    fn component_round_trip() {
        let p = SpherePoint::new(0.9, 0.5, 1.7);
        let v = Vec3::new(0.3, -1.2, 0.8);
        let back = p.spherical_to_cartesian(&p.cartesian_to_spherical(&v));
        assert_relative_eq!(v.x, back.x, epsilon = 1e-14);
        assert_relative_eq!(v.y, back.y, epsilon = 1e-14);
        assert_relative_eq!(v.z, back.z, epsilon = 1e-14);
    }
}
