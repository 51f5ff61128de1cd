//! Geometry of the unit disc: Möbius maps, the Green function, boundary arcs,
//! Carleson boxes and quadrature rules for the normalized area measure.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::GaussLegendre;

/// Gauss–Legendre order used in each radial panel unless stated otherwise.
pub const RADIAL_ORDER: usize = 16;

/// A boundary arc with centre angle `theta0` and normalized length `len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub theta0: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(theta0: f64, len: f64) -> Result<Self> {
        if !(len > 0.0 && len <= 1.0) {
            return Err(Error::Domain(format!("arc length {len} must lie in (0, 1]")));
        }
        if !theta0.is_finite() {
            return Err(Error::Domain("arc centre must be finite".into()));
        }
        Ok(Arc { theta0: theta0.rem_euclid(TAU), len })
    }

    /// Angular interval `[start, end]` with `end - start = 2π·len`.
    pub fn angles(&self) -> (f64, f64) {
        (self.theta0 - PI * self.len, self.theta0 + PI * self.len)
    }

    /// The concentric arc of `factor` times the length, capped at the full circle.
    pub fn scaled(&self, factor: f64) -> Arc {
        Arc { theta0: self.theta0, len: (self.len * factor).min(1.0) }
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.len >= 1.0 {
            return true;
        }
        let d = (theta - self.theta0 + PI).rem_euclid(TAU) - PI;
        d.abs() <= PI * self.len
    }
}

/// The Carleson box `S(I) = {r e^{iθ} : e^{iθ} ∈ I, 1 − |I| ≤ r < 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlesonBox {
    pub arc: Arc,
}

impl CarlesonBox {
    pub fn new(arc: Arc) -> Self {
        CarlesonBox { arc }
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 - self.arc.len
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r < 1.0 && r >= self.inner_radius() && self.arc.contains_angle(z.arg())
    }

    /// Normalized area `|I|²(2 − |I|)`.
    pub fn area(&self) -> f64 {
        self.arc.len * self.arc.len * (2.0 - self.arc.len)
    }
}

/// `φ_a(z) = (a − z)/(1 − āz)`.
pub fn mobius(a: Complex64, z: Complex64) -> Result<Complex64> {
    if a.norm() >= 1.0 {
        return Err(Error::Domain(format!("|a| = {} must be below 1", a.norm())));
    }
    if z.norm() > 1.0 {
        return Err(Error::Domain(format!("|z| = {} exceeds 1", z.norm())));
    }
    let den = Complex64::new(1.0, 0.0) - a.conj() * z;
    if den.norm() == 0.0 {
        return Err(Error::Singular("1 - conj(a) z vanishes".into()));
    }
    Ok((a - z) / den)
}

/// Derivative modulus `|φ_a'(z)| = (1 − |a|²)/|1 − āz|²`.
pub fn mobius_derivative_abs(a: Complex64, z: Complex64) -> f64 {
    (1.0 - a.norm_sqr()) / (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr()
}

/// `1 − |φ_a(z)|²`, computed from the identity
/// `(1 − |φ_a(z)|²)|1 − āz|² = (1 − |a|²)(1 − |z|²)` without cancellation.
pub fn mobius_defect(a: Complex64, z: Complex64) -> f64 {
    (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr()) / (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr()
}

/// Green function `g(a, z) = log |(1 − āz)/(a − z)|`.
pub fn green(a: Complex64, z: Complex64) -> Result<f64> {
    if (a - z).norm() == 0.0 {
        return Err(Error::Singular("Green function is singular at z = a".into()));
    }
    Ok(-mobius(a, z)?.norm().ln())
}

/// One circle of nodes `radius · e^{i(phase + 2πk/count)}` inside a quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ring {
    pub radius: f64,
    /// Radial weight of the ring; each node carries `weight / count`.
    pub weight: f64,
    pub count: usize,
    /// Index of the first node of this ring in the node list.
    pub start: usize,
    pub phase: f64,
}

impl Ring {
    pub fn angle(&self, k: usize) -> f64 {
        self.phase + TAU * k as f64 / self.count as f64
    }
}

/// A quadrature rule for `dA` on the disc (or a subset of it).
#[derive(Debug, Clone)]
pub struct DiscQuadrature {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    /// Number of dyadic boundary panels.
    pub depth: usize,
    /// Angular count (maximum over rings for graded rules).
    pub angles: usize,
    /// Ring layout when the nodes form equispaced circles, empty otherwise.
    pub rings: Vec<Ring>,
}

impl DiscQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(Complex64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| w * f(*z)).sum()
    }

    pub fn integrate_complex<F: FnMut(Complex64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(z, w)| f(*z) * *w).sum()
    }

    /// `Σ wᵢ vᵢ` for values given per node.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn has_rings(&self) -> bool {
        !self.rings.is_empty()
    }
}

/// Dyadic radial panels `[1 − 2^{−i}, 1 − 2^{−i−1}]`, `i < depth`, and the closing panel.
fn radial_panels(depth: usize) -> Vec<(f64, f64)> {
    let mut panels: Vec<(f64, f64)> = (0..depth)
        .map(|i| (1.0 - 2f64.powi(-(i as i32)), 1.0 - 2f64.powi(-(i as i32) - 1)))
        .collect();
    panels.push((1.0 - 2f64.powi(-(depth as i32)), 1.0));
    panels
}

/// Radial nodes and weights on `[a, b]`. The panel touching the boundary is
/// mapped by `r = 1 − (1 − a) v⁴`, which turns `(1 − r)^γ` with `γ > −1` into
/// a mildly singular or smooth function of `v`.
fn panel_nodes(rule: &GaussLegendre, a: f64, b: f64, closing: bool) -> Vec<(f64, f64)> {
    if !closing {
        return rule.mapped(a, b).collect();
    }
    let delta = 1.0 - a;
    rule.mapped(0.0, 1.0)
        .map(|(v, wv)| {
            let v3 = v * v * v;
            (1.0 - delta * v3 * v, 4.0 * delta * v3 * wv)
        })
        .collect()
}

fn ring_rule<F: Fn(usize) -> usize>(depth: usize, order: usize, angles_for_panel: F, max_angles: usize) -> DiscQuadrature {
    let rule = GaussLegendre::new(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut rings = Vec::new();
    let panels = radial_panels(depth);
    let last = panels.len() - 1;
    for (i, (a, b)) in panels.into_iter().enumerate() {
        let count = angles_for_panel(i);
        let phase = PI / count as f64;
        for (r, wr) in panel_nodes(&rule, a, b, i == last) {
            // dA = (1/π) r dr dθ = 2r dr · dθ/2π
            let weight = 2.0 * r * wr;
            let start = nodes.len();
            let wn = weight / count as f64;
            for k in 0..count {
                let th = phase + TAU * k as f64 / count as f64;
                nodes.push(Complex64::from_polar(r, th));
                weights.push(wn);
            }
            rings.push(Ring { radius: r, weight, count, start, phase });
        }
    }
    DiscQuadrature { nodes, weights, depth, angles: max_angles, rings }
}

/// Polar rule with `depth + 1` radial panels of 16-point Gauss–Legendre in
/// `2r dr` and `angles` equispaced angles on every ring. The closing panel
/// `[1 − 2^{−depth}, 1)` is graded toward the boundary (see [`panel_nodes`]).
pub fn disc_quadrature(depth: usize, angles: usize) -> Result<DiscQuadrature> {
    disc_quadrature_with_order(depth, angles, RADIAL_ORDER)
}

pub fn disc_quadrature_with_order(depth: usize, angles: usize, order: usize) -> Result<DiscQuadrature> {
    check_grid(depth, angles, order)?;
    Ok(ring_rule(depth, order, |_| angles, angles))
}

/// Like [`disc_quadrature`] but with fewer angles on the inner panels:
/// panel `i` carries `min(angles, max(64, 2^{i+4}))` angles, rounded to a
/// multiple of 8 so that dyadic arcs centred at `2πk/8` stay cell aligned.
pub fn graded_quadrature(depth: usize, angles: usize, order: usize) -> Result<DiscQuadrature> {
    check_grid(depth, angles, order)?;
    let per_panel = |i: usize| {
        let want = if i + 4 >= 30 { usize::MAX } else { 1usize << (i + 4) };
        want.max(64).min(angles)
    };
    Ok(ring_rule(depth, order, per_panel, angles))
}

fn check_grid(depth: usize, angles: usize, order: usize) -> Result<()> {
    if depth < 1 {
        return Err(Error::InvalidParams("quadrature depth must be at least 1".into()));
    }
    if angles < 8 {
        return Err(Error::InvalidParams(format!("angular count {angles} must be at least 8")));
    }
    if order < 1 {
        return Err(Error::InvalidParams("radial order must be positive".into()));
    }
    Ok(())
}

/// A rule supported on `S(I)`, graded dyadically toward the boundary with
/// `depth` panels plus a closing panel; each radial panel uses a composite
/// Gauss–Legendre rule in angle whose panel count doubles with depth up to 64.
pub fn box_quadrature(bx: &CarlesonBox, depth: usize) -> DiscQuadrature {
    let rule = GaussLegendre::cached(RADIAL_ORDER);
    let ell = bx.arc.len;
    let (th0, th1) = bx.arc.angles();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut edges: Vec<f64> = (0..=depth).map(|i| 1.0 - ell * 2f64.powi(-(i as i32))).collect();
    edges.push(1.0);
    let last = edges.len() - 2;
    for (i, w) in edges.windows(2).enumerate() {
        let panels = 1usize << i.min(6);
        let dth = (th1 - th0) / panels as f64;
        for (r, wr) in panel_nodes(rule, w[0], w[1], i == last) {
            for pnl in 0..panels {
                let a = th0 + dth * pnl as f64;
                for (th, wt) in rule.mapped(a, a + dth) {
                    nodes.push(Complex64::from_polar(r, th));
                    weights.push(2.0 * r * wr * wt / TAU);
                }
            }
        }
    }
    DiscQuadrature { nodes, weights, depth, angles: 0, rings: Vec::new() }
}

/// Points `a` at which suprema over the disc are sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct SupSampleSet {
    pub points: Vec<Complex64>,
    pub depth: usize,
    pub rotations: usize,
}

/// `a = 0` and the rings `(1 − 2^{−j}) e^{2πik/rotations}`, `j = 1..=depth`.
pub fn sup_samples(depth: usize, rotations: usize) -> Result<SupSampleSet> {
    if depth < 1 || rotations < 1 {
        return Err(Error::InvalidParams("sup sampling needs depth >= 1 and rotations >= 1".into()));
    }
    let mut points = vec![Complex64::new(0.0, 0.0)];
    for j in 1..=depth {
        let r = 1.0 - 2f64.powi(-(j as i32));
        for k in 0..rotations {
            points.push(Complex64::from_polar(r, TAU * k as f64 / rotations as f64));
        }
    }
    Ok(SupSampleSet { points, depth, rotations })
}

/// Dyadic arcs of length `2^{−j}`, `j = 0..=depth`, centred at `2πk/rotations`.
pub fn dyadic_arcs(depth: usize, rotations: usize) -> Vec<Arc> {
    let mut arcs = Vec::with_capacity((depth + 1) * rotations);
    for j in 0..=depth {
        for k in 0..rotations {
            arcs.push(Arc { theta0: TAU * k as f64 / rotations as f64, len: 2f64.powi(-(j as i32)) });
        }
    }
    arcs
}

/// Per-ring prefix sums of a nodal field, answering box masses in `O(rings)`.
pub struct BoxMasses<'a> {
    quad: &'a DiscQuadrature,
    // prefix[ring][k] = Σ_{i<k} wᵢ vᵢ over the ring's cells
    prefix: Vec<Vec<f64>>,
}

impl<'a> BoxMasses<'a> {
    /// `values` are per-node density values; the quadrature must carry rings.
    pub fn new(quad: &'a DiscQuadrature, values: &[f64]) -> Result<Self> {
        if !quad.has_rings() {
            return Err(Error::InvalidParams("box masses need a ring-structured quadrature".into()));
        }
        let prefix = quad
            .rings
            .iter()
            .map(|ring| {
                let mut acc = 0.0;
                let mut p = Vec::with_capacity(ring.count + 1);
                p.push(0.0);
                for k in 0..ring.count {
                    let i = ring.start + k;
                    acc += quad.weights[i] * values[i];
                    p.push(acc);
                }
                p
            })
            .collect();
        Ok(BoxMasses { quad, prefix })
    }

    /// `μ(S(I))`, treating each node as the centre of its angular cell.
    pub fn mass(&self, arc: &Arc) -> f64 {
        let inner = 1.0 - arc.len;
        let (a, b) = arc.angles();
        let mut total = 0.0;
        for (ring, p) in self.quad.rings.iter().zip(&self.prefix) {
            if ring.radius < inner {
                continue;
            }
            if arc.len >= 1.0 {
                total += p[ring.count];
                continue;
            }
            total += cumulative(ring, p, b) - cumulative(ring, p, a);
        }
        total
    }
}

// Mass of the ring's cells over angles in [phase - π/count, θ), extended periodically.
fn cumulative(ring: &Ring, p: &[f64], theta: f64) -> f64 {
    let n = ring.count as f64;
    let origin = ring.phase - PI / n;
    let x = (theta - origin) / TAU;
    let turns = x.floor();
    let frac = (x - turns) * n;
    let k = (frac.floor() as usize).min(ring.count - 1);
    let within = frac - k as f64;
    turns * p[ring.count] + p[k] + within * (p[k + 1] - p[k])
}
