//! Built-in surface diffeomorphisms with exact jet evaluation, the projective
//! cocycle, Lyapunov-exponent and growth-rate estimators, matrix-cocycle
//! checks and almost-contracting profiles.

use crate::density::{DensityReport, IntegerSet, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::geom::{Mat2, ScaledProduct, Vec2};
use crate::poly::{PolyCurve, TruncSeries};

use std::f64::consts::PI;

const TAU: f64 = 2.0 * PI;

/// Domain of a built-in map: the unit torus with the flat metric, or a planar
/// trapping box outside of which orbits are declared escaped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Torus,
    Box { x: (f64, f64), y: (f64, f64) },
}

/// The built-in family of surface diffeomorphisms.
///
/// All maps have closed-form forward, inverse and differential evaluation,
/// and exact degree-r jet propagation (polynomial / trigonometric formulas).
#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceMap {
    /// Identity on the torus.
    Identity,
    /// Hyperbolic toral automorphism (x, y) -> (2x + y, x + y) mod 1.
    Cat,
    /// Cat map precomposed with the shear (x, y) -> (x, y + eps sin(2 pi x)).
    CatPerturbed { eps: f64 },
    /// Chirikov standard map: p' = p + (K/2pi) sin(2 pi x), x' = x + p'.
    Standard { k: f64 },
    /// Henon map (x, y) -> (1 - a x^2 + y, b x) on a declared trapping box.
    Henon { a: f64, b: f64 },
    /// Fixed linear map of the plane on a large box.
    Linear { m: [f64; 4] },
    /// Uniform contraction (x, y) -> rate * (x, y) on a box.
    Contraction { rate: f64 },
}

impl SurfaceMap {
    pub fn parse(spec: &str) -> Result<SurfaceMap> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n, a),
            None => (spec, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for part in args.split(',').filter(|s| !s.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("bad map argument `{part}`")))?;
            let val: f64 = v
                .parse()
                .map_err(|_| Error::Domain(format!("bad numeric value `{v}`")))?;
            kv.insert(k.to_string(), val);
        }
        let get = |k: &str, default: f64| kv.get(k).copied().unwrap_or(default);
        match name {
            "identity" => Ok(SurfaceMap::Identity),
            "cat" => Ok(SurfaceMap::Cat),
            "cat-perturbed" => Ok(SurfaceMap::CatPerturbed {
                eps: get("eps", 0.1),
            }),
            "standard" => Ok(SurfaceMap::Standard { k: get("K", 1.5) }),
            "henon" => Ok(SurfaceMap::Henon {
                a: get("a", 1.4),
                b: get("b", 0.3),
            }),
            "contraction" => Ok(SurfaceMap::Contraction {
                rate: get("rate", 0.5),
            }),
            _ => Err(Error::Domain(format!("unknown map `{name}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            SurfaceMap::Identity => "identity".into(),
            SurfaceMap::Cat => "cat".into(),
            SurfaceMap::CatPerturbed { eps } => format!("cat-perturbed:eps={eps}"),
            SurfaceMap::Standard { k } => format!("standard:K={k}"),
            SurfaceMap::Henon { a, b } => format!("henon:a={a},b={b}"),
            SurfaceMap::Linear { m } => format!("linear:{},{},{},{}", m[0], m[1], m[2], m[3]),
            SurfaceMap::Contraction { rate } => format!("contraction:rate={rate}"),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            SurfaceMap::Identity
            | SurfaceMap::Cat
            | SurfaceMap::CatPerturbed { .. }
            | SurfaceMap::Standard { .. } => Domain::Torus,
            SurfaceMap::Henon { .. } => Domain::Box {
                x: (-3.0, 3.0),
                y: (-1.0, 1.0),
            },
            SurfaceMap::Linear { .. } => Domain::Box {
                x: (-1e6, 1e6),
                y: (-1e6, 1e6),
            },
            SurfaceMap::Contraction { .. } => Domain::Box {
                x: (-10.0, 10.0),
                y: (-10.0, 10.0),
            },
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self.domain(), Domain::Torus)
    }

    fn check_domain(&self, p: Vec2, iterate: usize) -> Result<()> {
        if let Domain::Box { x, y } = self.domain() {
            if p.x < x.0 || p.x > x.1 || p.y < y.0 || p.y > y.1 {
                return Err(Error::Escape {
                    iterate,
                    x: p.x,
                    y: p.y,
                });
            }
        }
        Ok(())
    }

    /// Forward image. Torus maps fold into [0, 1)^2.
    pub fn forward(&self, p: Vec2) -> Vec2 {
        let q = self.forward_plane(p);
        if self.is_torus() {
            wrap_unit(q)
        } else {
            q
        }
    }

    /// Forward image in covering-plane coordinates (no folding); for torus
    /// maps this is the lift, exact for jet work.
    pub fn forward_plane(&self, p: Vec2) -> Vec2 {
        match self {
            SurfaceMap::Identity => p,
            SurfaceMap::Cat => Vec2::new(2.0 * p.x + p.y, p.x + p.y),
            SurfaceMap::CatPerturbed { eps } => {
                let sy = p.y + eps * (TAU * p.x).sin();
                Vec2::new(2.0 * p.x + sy, p.x + sy)
            }
            SurfaceMap::Standard { k } => {
                let p1 = p.y + k / TAU * (TAU * p.x).sin();
                Vec2::new(p.x + p1, p1)
            }
            SurfaceMap::Henon { a, b } => Vec2::new(1.0 - a * p.x * p.x + p.y, b * p.x),
            SurfaceMap::Linear { m } => Mat2::new(m[0], m[1], m[2], m[3]).apply(p),
            SurfaceMap::Contraction { rate } => p.scale(*rate),
        }
    }

    pub fn inverse(&self, p: Vec2) -> Vec2 {
        let q = match self {
            SurfaceMap::Identity => p,
            SurfaceMap::Cat => Vec2::new(p.x - p.y, -p.x + 2.0 * p.y),
            SurfaceMap::CatPerturbed { eps } => {
                let u = Vec2::new(p.x - p.y, -p.x + 2.0 * p.y);
                Vec2::new(u.x, u.y - eps * (TAU * u.x).sin())
            }
            SurfaceMap::Standard { k } => {
                let x = p.x - p.y;
                Vec2::new(x, p.y - k / TAU * (TAU * x).sin())
            }
            SurfaceMap::Henon { a, b } => {
                let x = p.y / b;
                Vec2::new(x, p.x - 1.0 + a * x * x)
            }
            SurfaceMap::Linear { m } => {
                let det = m[0] * m[3] - m[1] * m[2];
                Mat2::new(m[3] / det, -m[1] / det, -m[2] / det, m[0] / det).apply(p)
            }
            SurfaceMap::Contraction { rate } => p.scale(1.0 / rate),
        };
        if self.is_torus() {
            wrap_unit(q)
        } else {
            q
        }
    }

    /// Differential at a point (independent of the torus folding).
    pub fn differential(&self, p: Vec2) -> Mat2 {
        match self {
            SurfaceMap::Identity => Mat2::identity(),
            SurfaceMap::Cat => Mat2::new(2.0, 1.0, 1.0, 1.0),
            SurfaceMap::CatPerturbed { eps } => {
                let c = eps * TAU * (TAU * p.x).cos();
                // d(cat o shear): shear has rows (1, 0), (c, 1).
                Mat2::new(2.0 + c, 1.0, 1.0 + c, 1.0)
            }
            SurfaceMap::Standard { k } => {
                let c = k * (TAU * p.x).cos();
                Mat2::new(1.0 + c, 1.0, c, 1.0)
            }
            SurfaceMap::Henon { a, b } => Mat2::new(-2.0 * a * p.x, 1.0, *b, 0.0),
            SurfaceMap::Linear { m } => Mat2::new(m[0], m[1], m[2], m[3]),
            SurfaceMap::Contraction { rate } => Mat2::new(*rate, 0.0, 0.0, *rate),
        }
    }

    /// Pushes the degree-r jet of a curve through the map: given the Taylor
    /// coefficients of t -> gamma(t) around 0, returns those of f o gamma.
    /// Exact for the built-in closed forms, truncated at the jet order.
    pub fn push_jet(&self, x: &TruncSeries, y: &TruncSeries) -> (TruncSeries, TruncSeries) {
        let order = x.order();
        match self {
            SurfaceMap::Identity => (x.clone(), y.clone()),
            SurfaceMap::Cat => (x.scale(2.0).add(y), x.add(y)),
            SurfaceMap::CatPerturbed { eps } => {
                let sy = y.add(&x.scale(TAU).sin().scale(*eps));
                (x.scale(2.0).add(&sy), x.add(&sy))
            }
            SurfaceMap::Standard { k } => {
                let p1 = y.add(&x.scale(TAU).sin().scale(k / TAU));
                (x.add(&p1), p1)
            }
            SurfaceMap::Henon { a, b } => {
                let mut one = TruncSeries::constant(1.0, order);
                one = one.sub(&x.mul(x).scale(*a)).add(y);
                (one, x.scale(*b))
            }
            SurfaceMap::Linear { m } => (
                x.scale(m[0]).add(&y.scale(m[1])),
                x.scale(m[2]).add(&y.scale(m[3])),
            ),
            SurfaceMap::Contraction { rate } => (x.scale(*rate), y.scale(*rate)),
        }
    }

    /// Euclidean distance in the domain metric (shortest representative on
    /// the torus).
    pub fn distance(&self, p: Vec2, q: Vec2) -> f64 {
        if self.is_torus() {
            let dx = circ_dist(p.x, q.x);
            let dy = circ_dist(p.y, q.y);
            dx.hypot(dy)
        } else {
            (p - q).norm()
        }
    }

    /// Orbit of length `n + 1` starting at `p`, checking the domain.
    pub fn orbit(&self, p: Vec2, n: usize) -> Result<Vec<Vec2>> {
        let mut out = Vec::with_capacity(n + 1);
        self.check_domain(p, 0)?;
        out.push(p);
        let mut cur = p;
        for k in 1..=n {
            cur = self.forward(cur);
            self.check_domain(cur, k)?;
            out.push(cur);
        }
        Ok(out)
    }

    pub fn area_preserving(&self) -> bool {
        matches!(
            self,
            SurfaceMap::Identity
                | SurfaceMap::Cat
                | SurfaceMap::CatPerturbed { .. }
                | SurfaceMap::Standard { .. }
        )
    }
}

fn wrap_unit(p: Vec2) -> Vec2 {
    Vec2::new(p.x.rem_euclid(1.0), p.y.rem_euclid(1.0))
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// A base point together with a tangent line, the carrier of the projective
/// dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectivePoint {
    pub base: Vec2,
    /// Direction of the tangent line, folded into [0, pi).
    pub angle: f64,
}

impl ProjectivePoint {
    pub fn new(base: Vec2, angle: f64) -> Self {
        let mut a = angle.rem_euclid(PI);
        if a >= PI {
            a -= PI;
        }
        ProjectivePoint { base, angle: a }
    }

    pub fn from_direction(base: Vec2, dir: Vec2) -> Self {
        ProjectivePoint {
            base,
            angle: dir.line_angle(),
        }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.angle.cos(), self.angle.sin())
    }

    /// Distance on the projective bundle dominating the base distance.
    pub fn dist(&self, other: &ProjectivePoint, map: &SurfaceMap) -> f64 {
        let da = {
            let d = (self.angle - other.angle).abs();
            d.min(PI - d)
        };
        map.distance(self.base, other.base).max(da)
    }
}

/// One-step log stretch data along a tangent line.
#[derive(Debug, Clone, Copy)]
pub struct CocycleValue {
    /// log |df(v)| for a unit vector spanning the line.
    pub phi: f64,
    /// log |df| - log |df(v)|, nonnegative by operator-norm dominance.
    pub w: f64,
    /// The averaged q-step defect; equals `w` for q = 1.
    pub omega_q: f64,
    pub q: u32,
}

/// One step of the projective action: the base moves by the map, the line by
/// the differential; phi records the stretch along the line.
pub fn project_step(map: &SurfaceMap, p: &ProjectivePoint) -> Result<(ProjectivePoint, CocycleValue)> {
    map.check_domain(p.base, 0)?;
    let d = map.differential(p.base);
    let image = d.apply(p.direction());
    let phi = image.norm().ln();
    let w = d.op_norm().ln() - phi;
    let next = ProjectivePoint::from_direction(map.forward(p.base), image);
    Ok((
        next,
        CocycleValue {
            phi,
            w,
            omega_q: w,
            q: 1,
        },
    ))
}

/// Accumulated log stretch of the differential along the tangent line after
/// `n` steps: phi_n(x, v) = log |d f^n (v)|.
pub fn directional_log_stretch(
    map: &SurfaceMap,
    p: &ProjectivePoint,
    n: usize,
) -> Result<f64> {
    let mut cur = *p;
    let mut total = 0.0;
    for _ in 0..n {
        let (next, val) = project_step(map, &cur)?;
        total += val.phi;
        cur = next;
    }
    Ok(total)
}

/// Finite-horizon maximal Lyapunov exponent at `x`: the log rate of the
/// operator norm of the accumulated differential, rescaled periodically.
pub fn lyapunov_max(map: &SurfaceMap, x: Vec2, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("iterate count must be positive".into()));
    }
    let mut prod = ScaledProduct::identity();
    let mut cur = x;
    for k in 0..n {
        map.check_domain(cur, k).map_err(|e| match e {
            Error::Escape { iterate, x, y } => Error::Escape { iterate, x, y },
            other => other,
        })?;
        prod.push(map.differential(cur));
        cur = map.forward(cur);
    }
    Ok(prod.log_op_norm() / n as f64)
}

/// Average log Jacobian along the orbit; chi_1 + chi_2 at finite horizon.
pub fn jacobian_log_rate(map: &SurfaceMap, x: Vec2, n: usize) -> Result<f64> {
    let mut cur = x;
    let mut total = 0.0;
    for k in 0..n {
        map.check_domain(cur, k)?;
        total += map.differential(cur).det().abs().ln();
        cur = map.forward(cur);
    }
    Ok(total / n as f64)
}

/// Sup-norm growth estimate over a sample grid, reported at two nested grid
/// levels (the finer contains the coarser, so refinement is monotone).
#[derive(Debug, Clone, Copy)]
pub struct GrowthEstimate {
    pub coarse: f64,
    pub fine: f64,
}

impl GrowthEstimate {
    pub fn value(&self) -> f64 {
        self.fine
    }
}

/// (1/n) log^+ sup over grid samples of |d_x f^n|.
pub fn r_estimate(map: &SurfaceMap, n: usize, grid: usize) -> Result<GrowthEstimate> {
    let grid = grid.max(2);
    let coarse = r_estimate_level(map, n, grid)?;
    let fine = r_estimate_level(map, n, grid * 2)?;
    Ok(GrowthEstimate {
        coarse,
        fine: fine.max(coarse),
    })
}

fn r_estimate_level(map: &SurfaceMap, n: usize, grid: usize) -> Result<f64> {
    let pts = sample_grid(map, grid);
    let mut best = f64::NEG_INFINITY;
    for p in pts {
        let mut prod = ScaledProduct::identity();
        let mut cur = p;
        let mut escaped = false;
        for k in 0..n {
            if map.check_domain(cur, k).is_err() {
                escaped = true;
                break;
            }
            prod.push(map.differential(cur));
            cur = map.forward(cur);
        }
        if !escaped {
            best = best.max(prod.log_op_norm());
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::Domain("every grid orbit escaped".into()));
    }
    Ok((best / n as f64).max(0.0))
}

/// Uniform sample grid over the map's domain (torus cell centers, or the box).
pub fn sample_grid(map: &SurfaceMap, grid: usize) -> Vec<Vec2> {
    let (xr, yr) = match map.domain() {
        Domain::Torus => ((0.0, 1.0), (0.0, 1.0)),
        Domain::Box { x, y } => (x, y),
    };
    let mut out = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let fx = (i as f64 + 0.5) / grid as f64;
            let fy = (j as f64 + 0.5) / grid as f64;
            out.push(Vec2::new(
                xr.0 + fx * (xr.1 - xr.0),
                yr.0 + fy * (yr.1 - yr.0),
            ));
        }
    }
    out
}

/// Averaged q-step norm/stretch defect at a projective point:
/// mean over k < q of (1/q) log |d_{f^k x} f^q|, minus log |d_x f(v)|.
pub fn omega_q(map: &SurfaceMap, p: &ProjectivePoint, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let q = q as usize;
    let orbit = map.orbit(p.base, 2 * q)?;
    // Differentials along the orbit.
    let diffs: Vec<Mat2> = orbit.iter().map(|&z| map.differential(z)).collect();
    let mut mean_rate = 0.0;
    for k in 0..q {
        let mut prod = ScaledProduct::identity();
        for j in 0..q {
            prod.push(diffs[k + j]);
        }
        mean_rate += prod.log_op_norm() / q as f64;
    }
    mean_rate /= q as f64;
    let phi = diffs[0].apply(p.direction()).norm().ln();
    Ok(mean_rate - phi)
}

/// Result of the matrix-cocycle norm/direction comparison.
#[derive(Debug, Clone, Copy)]
pub struct SupCheck {
    pub max_directional: f64,
    pub norm_rate: f64,
    pub gap: f64,
}

/// Compares the log rate of |A^n| with the best directional rate over a
/// projective grid of directions; the gap is nonnegative and shrinks with the
/// grid spacing.
pub fn matrix_cocycle_sup_check(sequence: &[Mat2], directions: usize) -> Result<SupCheck> {
    if sequence.is_empty() {
        return Err(Error::Domain("empty matrix sequence".into()));
    }
    let n = sequence.len() as f64;
    let mut prod = ScaledProduct::identity();
    for &m in sequence {
        prod.push(m);
    }
    let norm_rate = prod.log_op_norm() / n;
    let mut best = f64::NEG_INFINITY;
    for i in 0..directions.max(1) {
        let a = PI * i as f64 / directions.max(1) as f64;
        let v = Vec2::new(a.cos(), a.sin());
        best = best.max(prod.log_norm_of(v) / n);
    }
    Ok(SupCheck {
        max_directional: best,
        norm_rate,
        gap: norm_rate - best,
    })
}

/// (1/n) log of the length of f^n(B(x, eps, n) n sigma_*): the piece of the
/// curve that shadows the orbit of `x` to within eps for n steps is isolated
/// by parameter refinement, then its image length is accumulated by
/// quadrature on the pushed derivative.
pub fn local_volume_growth(
    map: &SurfaceMap,
    sigma: &PolyCurve,
    t_x: f64,
    eps: f64,
    n: usize,
) -> Result<f64> {
    let x_orbit = map.orbit(sigma.eval(t_x), n)?;
    let deriv = sigma.derivative();

    // Check whether the whole orbit of sigma(t) stays eps-close to x's orbit.
    let in_ball = |t: f64| -> bool {
        let mut cur = sigma.eval(t);
        for bx in x_orbit.iter().take(n) {
            if map.distance(cur, *bx) >= eps {
                return false;
            }
            cur = map.forward(cur);
        }
        true
    };

    // Refine [-1, 1] into kept pieces.
    let mut stack = vec![(-1.0f64, 1.0f64, 12u32)];
    let mut kept: Vec<(f64, f64)> = Vec::new();
    while let Some((a, b, depth)) = stack.pop() {
        let probes = [a, 0.75 * a + 0.25 * b, 0.5 * (a + b), 0.25 * a + 0.75 * b, b];
        let ins: Vec<bool> = probes.iter().map(|&t| in_ball(t)).collect();
        if ins.iter().all(|&v| v) {
            kept.push((a, b));
        } else if ins.iter().any(|&v| v) && depth > 0 {
            let m = 0.5 * (a + b);
            stack.push((a, m, depth - 1));
            stack.push((m, b, depth - 1));
        } else if ins.iter().any(|&v| v) {
            kept.push((a, b));
        }
    }
    if kept.is_empty() {
        return Ok(f64::NEG_INFINITY);
    }

    // Length of f^n o sigma over the kept parameters: |d(f^n o sigma)(t)| =
    // |df^n(sigma'(t))| at sigma(t), integrated by midpoint quadrature.
    let mut total = 0.0;
    for (a, b) in kept {
        let cells = 16;
        let h = (b - a) / cells as f64;
        for c in 0..cells {
            let t = a + (c as f64 + 0.5) * h;
            let mut prod = ScaledProduct::identity();
            let mut cur = sigma.eval(t);
            for _ in 0..n {
                prod.push(map.differential(cur));
                cur = map.forward(cur);
            }
            let speed = (prod.log_norm_of(deriv.eval(t).normalized())).exp() * deriv.eval(t).norm();
            total += speed * h;
        }
    }
    Ok(total.ln() / n as f64)
}

/// Almost-contracting profile of a finite sample hull.
#[derive(Debug, Clone)]
pub struct ContractingProfile {
    /// Times at which the sampled hull diameter exceeds eps.
    pub expanded_times: IntegerSet,
    pub density: DensityReport,
    /// Finite-horizon exponent at each sample point.
    pub exponents: Vec<f64>,
}

/// Tracks diam(f^k U) for the sampled hull and flags the times where it
/// exceeds eps; pairs the resulting integer set with its density report and
/// the sampled exponents.
pub fn contracting_profile(
    map: &SurfaceMap,
    points: &[Vec2],
    eps: f64,
    horizon: u32,
) -> Result<ContractingProfile> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two sample points".into()));
    }
    let mut cur: Vec<Vec2> = points.to_vec();
    let mut expanded = Vec::new();
    for k in 0..=horizon {
        let mut diam = 0.0f64;
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                diam = diam.max(map.distance(cur[i], cur[j]));
            }
        }
        if diam > eps && k >= 1 {
            expanded.push(k);
        }
        if k < horizon {
            for p in cur.iter_mut() {
                map.check_domain(*p, k as usize)?;
                *p = map.forward(*p);
            }
        }
    }
    let set = IntegerSet::new(expanded, horizon)?;
    let mut samples = Vec::new();
    let mut n = 8u32;
    while n < horizon {
        samples.push((n, set.count_upto(n) as f64 / n as f64));
        n *= 2;
    }
    samples.push((horizon, set.count_upto(horizon) as f64 / horizon as f64));
    let density = DensityReport::from_samples(samples, DEFAULT_WINDOW);
    let exponents = points
        .iter()
        .map(|&p| lyapunov_max(map, p, horizon as usize))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ContractingProfile {
        expanded_times: set,
        density,
        exponents,
    })
}

/// Pushes a polynomial curve piece through the map by jet composition around
/// the given parameter center; returns global-parameter coefficients.
pub fn push_curve_jet(map: &SurfaceMap, curve: &PolyCurve, center: f64, order: usize) -> PolyCurve {
    // Recenter the polynomial at `center` (exact), push the jet, recenter back.
    let local = curve.compose_affine(center, 1.0);
    let xs = TruncSeries::from_poly(&local.x, order);
    let ys = TruncSeries::from_poly(&local.y, order);
    let (px, py) = map.push_jet(&xs, &ys);
    let pushed_local = PolyCurve::new(px.to_poly(), py.to_poly());
    pushed_local.compose_affine(-center, 1.0)
}
