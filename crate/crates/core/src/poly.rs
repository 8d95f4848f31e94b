//! Univariate polynomials, plane polynomial curves and truncated power series.
//!
//! Everything the lab certifies about curves reduces to questions about low
//! degree univariate polynomials: extrema of squared speeds, band membership
//! of squared norms, coefficient recentering. Roots are isolated by scanning
//! for sign changes and bisecting to an absolute tolerance of 1e-12.

use crate::geom::Vec2;

pub const ROOT_TOL: f64 = 1e-12;

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub c: Vec<f64>,
}

impl Poly {
    pub fn new(c: Vec<f64>) -> Self {
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![0.0] }
    }

    pub fn degree(&self) -> usize {
        let mut d = self.c.len().saturating_sub(1);
        while d > 0 && self.c[d] == 0.0 {
            d -= 1;
        }
        d
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &ck in self.c.iter().rev() {
            acc = acc * t + ck;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &ck)| k as f64 * ck)
                .collect(),
        )
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = vec![0.0; n];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = self.c.get(k).copied().unwrap_or(0.0) + o.c.get(k).copied().unwrap_or(0.0);
        }
        Poly::new(c)
    }

    pub fn sub_scalar(&self, s: f64) -> Poly {
        let mut c = self.c.clone();
        if c.is_empty() {
            c.push(-s);
        } else {
            c[0] -= s;
        }
        Poly::new(c)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// Coefficients of `p(center + rate * t)`.
    pub fn compose_affine(&self, center: f64, rate: f64) -> Poly {
        // Horner on the affine argument: result = ((c_n)*(u) + c_{n-1})*(u) + ...
        // with u = center + rate * t kept as a degree-1 polynomial.
        let mut acc = Poly::new(vec![*self.c.last().unwrap_or(&0.0)]);
        let u = Poly::new(vec![center, rate]);
        for &ck in self.c.iter().rev().skip(1) {
            acc = acc.mul(&u);
            acc.c[0] += ck;
        }
        acc
    }

    /// Roots in [a, b] at which the polynomial changes sign, ascending.
    pub fn sign_change_roots(&self, a: f64, b: f64) -> Vec<f64> {
        let deg = self.degree();
        if deg == 0 {
            return Vec::new();
        }
        let cells = (32 * deg).max(64);
        let mut roots = Vec::new();
        let width = (b - a) / cells as f64;
        let mut t0 = a;
        let mut f0 = self.eval(t0);
        for k in 1..=cells {
            let t1 = if k == cells { b } else { a + k as f64 * width };
            let f1 = self.eval(t1);
            if f0 == 0.0 {
                push_root(&mut roots, t0);
            } else if f0 * f1 < 0.0 {
                push_root(&mut roots, bisect(self, t0, t1, f0));
            }
            t0 = t1;
            f0 = f1;
        }
        if f0 == 0.0 {
            push_root(&mut roots, t0);
        }
        roots
    }

    /// Largest value on [a, b]; extrema occur at endpoints or sign-change
    /// roots of the derivative, which is exhaustive for polynomials.
    pub fn max_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).max(self.eval(b));
        for t in self.derivative().sign_change_roots(a, b) {
            m = m.max(self.eval(t));
        }
        m
    }

    pub fn min_on(&self, a: f64, b: f64) -> f64 {
        let mut m = self.eval(a).min(self.eval(b));
        for t in self.derivative().sign_change_roots(a, b) {
            m = m.min(self.eval(t));
        }
        m
    }

    /// Parameter of the maximum on [a, b].
    pub fn argmax_on(&self, a: f64, b: f64) -> f64 {
        let mut best = (self.eval(a), a);
        let fb = self.eval(b);
        if fb > best.0 {
            best = (fb, b);
        }
        for t in self.derivative().sign_change_roots(a, b) {
            let f = self.eval(t);
            if f > best.0 {
                best = (f, t);
            }
        }
        best.1
    }

    /// Closed subintervals of [a, b] on which `lo <= p(t) <= hi`.
    pub fn band_intervals(&self, lo: f64, hi: f64, a: f64, b: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![a, b];
        cuts.extend(self.sub_scalar(lo).sign_change_roots(a, b));
        cuts.extend(self.sub_scalar(hi).sign_change_roots(a, b));
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        cuts.dedup_by(|x, y| (*x - *y).abs() < ROOT_TOL);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v = self.eval(mid);
            if v >= lo - ROOT_TOL && v <= hi + ROOT_TOL {
                match out.last_mut() {
                    Some(last) if (last.1 - w[0]).abs() < ROOT_TOL => last.1 = w[1],
                    _ => out.push((w[0], w[1])),
                }
            }
        }
        out
    }
}

fn push_root(roots: &mut Vec<f64>, r: f64) {
    if roots.last().map_or(true, |&last| (r - last).abs() > ROOT_TOL) {
        roots.push(r);
    }
}

fn bisect(p: &Poly, mut a: f64, mut b: f64, fa: f64) -> f64 {
    let mut sa = fa.signum();
    while b - a > ROOT_TOL {
        let m = 0.5 * (a + b);
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
            let _ = &mut sa;
        }
    }
    0.5 * (a + b)
}

/// Plane curve with polynomial coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCurve {
    pub x: Poly,
    pub y: Poly,
}

impl PolyCurve {
    pub fn new(x: Poly, y: Poly) -> Self {
        PolyCurve { x, y }
    }

    /// Straight segment `center + t * dir`.
    pub fn segment(center: Vec2, dir: Vec2) -> Self {
        PolyCurve {
            x: Poly::new(vec![center.x, dir.x]),
            y: Poly::new(vec![center.y, dir.y]),
        }
    }

    pub fn from_coeffs(coeffs: &[Vec2]) -> Self {
        PolyCurve {
            x: Poly::new(coeffs.iter().map(|c| c.x).collect()),
            y: Poly::new(coeffs.iter().map(|c| c.y).collect()),
        }
    }

    pub fn coeff(&self, k: usize) -> Vec2 {
        Vec2::new(
            self.x.c.get(k).copied().unwrap_or(0.0),
            self.y.c.get(k).copied().unwrap_or(0.0),
        )
    }

    pub fn max_degree(&self) -> usize {
        self.x.degree().max(self.y.degree())
    }

    pub fn eval(&self, t: f64) -> Vec2 {
        Vec2::new(self.x.eval(t), self.y.eval(t))
    }

    pub fn derivative(&self) -> PolyCurve {
        PolyCurve {
            x: self.x.derivative(),
            y: self.y.derivative(),
        }
    }

    pub fn nth_derivative(&self, s: usize) -> PolyCurve {
        let mut d = self.clone();
        for _ in 0..s {
            d = d.derivative();
        }
        d
    }

    pub fn compose_affine(&self, center: f64, rate: f64) -> PolyCurve {
        PolyCurve {
            x: self.x.compose_affine(center, rate),
            y: self.y.compose_affine(center, rate),
        }
    }

    /// Squared euclidean norm of the curve as a univariate polynomial.
    pub fn norm_sq_poly(&self) -> Poly {
        self.x.mul(&self.x).add(&self.y.mul(&self.y))
    }

    /// Exact sup of |curve(t)| over [a, b].
    pub fn norm_max_on(&self, a: f64, b: f64) -> f64 {
        self.norm_sq_poly().max_on(a, b).max(0.0).sqrt()
    }

    /// Exact inf of |curve(t)| over [a, b].
    pub fn norm_min_on(&self, a: f64, b: f64) -> f64 {
        self.norm_sq_poly().min_on(a, b).max(0.0).sqrt()
    }

    pub fn translate(&self, v: Vec2) -> PolyCurve {
        let mut out = self.clone();
        if out.x.c.is_empty() {
            out.x.c.push(0.0);
        }
        if out.y.c.is_empty() {
            out.y.c.push(0.0);
        }
        out.x.c[0] += v.x;
        out.y.c[0] += v.y;
        out
    }
}

/// Truncated power series in one variable, used for jet propagation through
/// the closed-form maps. Length is `order + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries {
    pub c: Vec<f64>,
}

impl TruncSeries {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        TruncSeries { c }
    }

    pub fn from_poly(p: &Poly, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = p.c.get(k).copied().unwrap_or(0.0);
        }
        TruncSeries { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn add(&self, o: &TruncSeries) -> TruncSeries {
        TruncSeries {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &TruncSeries) -> TruncSeries {
        TruncSeries {
            c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> TruncSeries {
        TruncSeries {
            c: self.c.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, o: &TruncSeries) -> TruncSeries {
        let n = self.c.len();
        let mut c = vec![0.0; n];
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..n - i {
                c[i + j] += self.c[i] * o.c[j];
            }
        }
        TruncSeries { c }
    }

    pub fn sin(&self) -> TruncSeries {
        self.apply_trig(true)
    }

    pub fn cos(&self) -> TruncSeries {
        self.apply_trig(false)
    }

    fn apply_trig(&self, sine: bool) -> TruncSeries {
        let order = self.order();
        let u0 = self.c[0];
        let (s0, c0) = u0.sin_cos();
        // Taylor coefficients of sin/cos around u0, divided by k!.
        let mut taylor = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            let d = match k % 4 {
                0 => {
                    if sine {
                        s0
                    } else {
                        c0
                    }
                }
                1 => {
                    if sine {
                        c0
                    } else {
                        -s0
                    }
                }
                2 => {
                    if sine {
                        -s0
                    } else {
                        -c0
                    }
                }
                _ => {
                    if sine {
                        -c0
                    } else {
                        s0
                    }
                }
            };
            taylor.push(d / fact);
        }
        let mut tilde = self.clone();
        tilde.c[0] = 0.0;
        let mut acc = TruncSeries::constant(taylor[order], order);
        for k in (0..order).rev() {
            acc = acc.mul(&tilde);
            acc.c[0] += taylor[k];
        }
        acc
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(self.c.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_affine_matches_direct_evaluation() {
        let p = Poly::new(vec![1.0, -2.0, 0.5, 3.0]);
        let q = p.compose_affine(0.3, -0.7);
        for k in 0..20 {
            let t = -1.0 + 0.1 * k as f64;
            assert!((q.eval(t) - p.eval(0.3 - 0.7 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_change_roots_find_simple_roots() {
        // (t - 0.5)(t + 0.25)(t - 0.9) = t^3 - 1.15 t^2 + 0.1 t + 0.1125
        let p = Poly::new(vec![0.1125, 0.1, -1.15, 1.0]);
        let roots = p.sign_change_roots(-1.0, 1.0);
        assert_eq!(roots.len(), 3);
        assert!((roots[0] + 0.25).abs() < 1e-9);
        assert!((roots[1] - 0.5).abs() < 1e-9);
        assert!((roots[2] - 0.9).abs() < 1e-9);
    }

    #[test]
    fn max_on_finds_interior_extremum() {
        // 1 - t^2 has max 1 at t = 0.
        let p = Poly::new(vec![1.0, 0.0, -1.0]);
        assert!((p.max_on(-1.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((p.min_on(-1.0, 1.0) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn band_intervals_cover_the_right_set() {
        // p(t) = t^2 on [-1,1]; band [0.25, 1.0] -> [-1,-0.5] and [0.5,1].
        let p = Poly::new(vec![0.0, 0.0, 1.0]);
        let bands = p.band_intervals(0.25, 1.0, -1.0, 1.0);
        assert_eq!(bands.len(), 2);
        assert!((bands[0].0 + 1.0).abs() < 1e-9 && (bands[0].1 + 0.5).abs() < 1e-9);
        assert!((bands[1].0 - 0.5).abs() < 1e-9 && (bands[1].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn series_sin_matches_taylor_of_composition() {
        // u(t) = 0.4 + 0.3 t - 0.2 t^2; compare sin(u(t)) against numerics.
        let u = TruncSeries::from_poly(&Poly::new(vec![0.4, 0.3, -0.2]), 5);
        let s = u.sin();
        let p = s.to_poly();
        for k in 0..10 {
            let t = -0.1 + 0.02 * k as f64;
            let exact = (0.4 + 0.3 * t - 0.2 * t * t).sin();
            // Degree-5 truncation near 0 is accurate to ~|t|^6.
            assert!((p.eval(t) - exact).abs() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn curve_norm_extrema_are_exact_for_quadratics() {
        // gamma'(t) for gamma = (t, t^2/2) is (1, t): |gamma'| in [1, sqrt 2].
        let d = PolyCurve::new(Poly::new(vec![1.0]), Poly::new(vec![0.0, 1.0]));
        assert!((d.norm_max_on(-1.0, 1.0) - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((d.norm_min_on(-1.0, 1.0) - 1.0).abs() < 1e-12);
    }
}
