//! Plane vectors, 2x2 matrices and the flat metric used throughout the lab.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn scale(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n == 0.0 {
            Vec2::new(1.0, 0.0)
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Direction angle folded into [0, pi): a tangent line, not a vector.
    pub fn line_angle(self) -> f64 {
        let mut a = self.y.atan2(self.x);
        if a < 0.0 {
            a += std::f64::consts::PI;
        }
        if a >= std::f64::consts::PI {
            a -= std::f64::consts::PI;
        }
        a
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        self.scale(s)
    }
}

/// Row-major 2x2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Mat2 {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2::new(1.0, 0.0, 0.0, 1.0)
    }

    pub fn apply(self, v: Vec2) -> Vec2 {
        Vec2::new(self.a * v.x + self.b * v.y, self.c * v.x + self.d * v.y)
    }

    pub fn det(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Spectral (operator) norm: the largest singular value, in closed form.
    pub fn op_norm(self) -> f64 {
        let f = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (f * f - 4.0 * det * det).max(0.0);
        (0.5 * (f + disc.sqrt())).sqrt()
    }

    /// Smallest singular value.
    pub fn co_norm(self) -> f64 {
        let f = self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d;
        let det = self.det();
        let disc = (f * f - 4.0 * det * det).max(0.0);
        (0.5 * (f - disc.sqrt())).max(0.0).sqrt()
    }

    pub fn frobenius(self) -> f64 {
        (self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn scale(self, s: f64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Product of a matrix sequence with periodic rescaling so that norms stay
/// representable for very long products. Returns the rescaled product and the
/// accumulated log of the scaling factors.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProduct {
    pub mat: Mat2,
    pub log_scale: f64,
    steps_since_rescale: u32,
}

impl ScaledProduct {
    pub const RESCALE_PERIOD: u32 = 32;

    pub fn identity() -> Self {
        ScaledProduct {
            mat: Mat2::identity(),
            log_scale: 0.0,
            steps_since_rescale: 0,
        }
    }

    /// Left-multiplies by `m` (new step applied after the accumulated ones).
    pub fn push(&mut self, m: Mat2) {
        self.mat = m * self.mat;
        self.steps_since_rescale += 1;
        if self.steps_since_rescale >= Self::RESCALE_PERIOD {
            self.rescale();
        }
    }

    fn rescale(&mut self) {
        let f = self.mat.frobenius();
        if f > 0.0 && f.is_finite() {
            self.mat = self.mat.scale(1.0 / f);
            self.log_scale += f.ln();
        }
        self.steps_since_rescale = 0;
    }

    pub fn log_op_norm(&self) -> f64 {
        self.log_scale + self.mat.op_norm().ln()
    }

    pub fn log_norm_of(&self, v: Vec2) -> f64 {
        self.log_scale + self.mat.apply(v).norm().ln()
    }

    pub fn log_det_abs(&self) -> f64 {
        2.0 * self.log_scale + self.mat.det().abs().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_symmetric_matrix_is_top_eigenvalue() {
        let cat = Mat2::new(2.0, 1.0, 1.0, 1.0);
        let lam = (3.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((cat.op_norm() - lam).abs() < 1e-12);
        assert!((cat.co_norm() - 1.0 / lam).abs() < 1e-12);
    }

    #[test]
    fn scaled_product_matches_direct_product() {
        let m = Mat2::new(0.9, 0.3, -0.2, 1.1);
        let mut p = ScaledProduct::identity();
        let mut direct = Mat2::identity();
        for _ in 0..100 {
            p.push(m);
            direct = m * direct;
        }
        assert!((p.log_op_norm() - direct.op_norm().ln()).abs() < 1e-9);
    }

    #[test]
    fn scaled_product_survives_long_hyperbolic_products() {
        let cat = Mat2::new(2.0, 1.0, 1.0, 1.0);
        let mut p = ScaledProduct::identity();
        let n = 100_000;
        for _ in 0..n {
            p.push(cat);
        }
        let lam = ((3.0 + 5.0_f64.sqrt()) / 2.0_f64).ln();
        assert!((p.log_op_norm() / n as f64 - lam).abs() < 1e-9);
    }

    #[test]
    fn line_angle_is_projective() {
        let v = Vec2::new(1.0, 2.0);
        assert!((v.line_angle() - (-v).line_angle()).abs() < 1e-12);
    }
}
