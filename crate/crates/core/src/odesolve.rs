//! Linear ODEs `f^{(n)} + A_{n−1} f^{(n−1)} + … + A_0 f = A_n` with analytic
//! coefficients: a Taylor-series solver, dilation, the coefficient constants
//! that guarantee Besov–Morrey membership of every solution, and the
//! supporting lemmas.

use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::discgeom::{DiscQuadrature, SupSampleSet};
use crate::error::{Error, Result};
use crate::measures::{besov_density_values, grid_carleson, hinf_alpha_norm, kernel_sweep, KernelTerm, SpaceParams};
use crate::series::{falling, parse_complex, SeriesSource, TestFunction, TruncSeries};
use crate::special::GaussLegendre;
use crate::theoremlab::{ComparabilityReport, RefinedValue, Refinement, Workspace};

/// Default smallness threshold for `M₀, M₁` and `N₀, N₁`.
pub const DEFAULT_SMALLNESS: f64 = 1e-2;

/// `f^{(n)} + Σ_{j<n} A_j f^{(j)} = A_n` with initial data `f^{(k)}(0)`, `k < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ODESystem {
    pub n: usize,
    /// `A_0 … A_{n−1}`.
    pub a: Vec<TruncSeries>,
    /// `A_n`.
    pub rhs: TruncSeries,
    pub init: Vec<Complex64>,
}

fn pad(s: &TruncSeries, degree: usize) -> TruncSeries {
    let mut c = s.coeffs().to_vec();
    c.resize(degree + 1, Complex64::new(0.0, 0.0));
    TruncSeries::new(c).expect("finite coefficients")
}

impl ODESystem {
    /// Pads every coefficient series to a common degree.
    pub fn new(a: Vec<TruncSeries>, rhs: TruncSeries, init: Vec<Complex64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidParams("order must be at least 1".into()));
        }
        if init.len() != n {
            return Err(Error::InvalidParams(format!("order {n} needs {n} initial values, got {}", init.len())));
        }
        if init.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParams("initial values must be finite".into()));
        }
        let deg = a.iter().map(|s| s.degree()).max().unwrap_or(0).max(rhs.degree());
        Ok(ODESystem { n, a: a.iter().map(|s| pad(s, deg)).collect(), rhs: pad(&rhs, deg), init })
    }

    /// Order `n`, constant `A_0 = c`, all other coefficients and the right side zero.
    pub fn constant_a0(n: usize, c: f64, init: Vec<Complex64>) -> Result<Self> {
        let mut a = vec![TruncSeries::zero(0); n.max(1)];
        a[0] = TruncSeries::constant(Complex64::new(c, 0.0));
        Self::new(a, TruncSeries::zero(0), init)
    }

    pub fn degree(&self) -> usize {
        self.rhs.degree()
    }

    pub fn with_init(&self, init: Vec<Complex64>) -> Result<Self> {
        Self::new(self.a.clone(), self.rhs.clone(), init)
    }

    /// Coefficients truncated to `degree`.
    pub fn truncated(&self, degree: usize) -> Self {
        ODESystem {
            n: self.n,
            a: self.a.iter().map(|s| s.truncate(degree)).collect(),
            rhs: self.rhs.truncate(degree),
            init: self.init.clone(),
        }
    }

    /// The `n` unit initial vectors plus one random combination with
    /// entries uniform in `[−1, 1]`.
    pub fn basis_inits<R: Rng>(&self, rng: &mut R) -> Vec<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        let mut out: Vec<Vec<Complex64>> = (0..self.n)
            .map(|k| (0..self.n).map(|i| if i == k { Complex64::new(1.0, 0.0) } else { zero }).collect())
            .collect();
        out.push((0..self.n).map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)).collect());
        out
    }
}

/// Taylor coefficients `c_0 … c_N` of the solution, by matching powers.
pub fn solve_ode_series(sys: &ODESystem, degree: usize) -> Result<TruncSeries> {
    let n = sys.n;
    if degree < n {
        return Err(Error::InvalidParams(format!("degree {degree} is below the order {n}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut c = vec![zero; degree + 1];
    let mut fact = 1.0;
    for (k, v) in sys.init.iter().enumerate() {
        if k > 0 {
            fact *= k as f64;
        }
        c[k] = v / fact;
    }
    for k in 0..=degree - n {
        let mut acc = sys.rhs.coeff(k);
        for (j, aj) in sys.a.iter().enumerate() {
            let top = aj.degree().min(k);
            for i in 0..=top {
                let ai = aj.coeff(i);
                if ai == zero {
                    continue;
                }
                let m = k - i;
                acc -= ai * c[m + j] * falling(m + j, j);
            }
        }
        c[k + n] = acc / falling(k + n, n);
    }
    TruncSeries::new(c)
}

/// `max_k |[f^{(n)} + Σ A_j f^{(j)} − A_n]_k|` for `k <= deg f − n`.
pub fn ode_residual(sys: &ODESystem, f: &TruncSeries) -> f64 {
    residual_with(&sys.a, &sys.rhs, f)
}

fn residual_with(a: &[TruncSeries], rhs: &TruncSeries, f: &TruncSeries) -> f64 {
    let n = a.len();
    if f.degree() < n {
        return 0.0;
    }
    let top = f.degree() - n;
    let mut lhs = f.nth_derivative(n).truncate(top);
    for (j, aj) in a.iter().enumerate() {
        lhs = &lhs + &aj.mul_trunc(&f.nth_derivative(j), top);
    }
    let r = &lhs - &pad(&rhs.truncate(top), top);
    r.coeffs().iter().take(top + 1).map(|z| z.norm()).fold(0.0, f64::max)
}

/// `B_j(z) = r^{n−j} A_j(rz)` and `B_n(z) = r^n A_n(rz)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedSystem {
    pub r: f64,
    pub b: Vec<TruncSeries>,
    pub rhs: TruncSeries,
}

impl DilatedSystem {
    /// The system solved by `f_r`, with `f_r^{(k)}(0) = r^k f^{(k)}(0)`.
    pub fn as_system(&self, original_init: &[Complex64]) -> Result<ODESystem> {
        let init = original_init.iter().enumerate().map(|(k, v)| v * self.r.powi(k as i32)).collect();
        ODESystem::new(self.b.clone(), self.rhs.clone(), init)
    }

    /// Residual of `f_r` in the dilated equation.
    pub fn residual(&self, f_r: &TruncSeries) -> f64 {
        residual_with(&self.b, &self.rhs, f_r)
    }
}

pub fn dilate_system(sys: &ODESystem, r: f64) -> Result<DilatedSystem> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("dilation radius {r} must lie in (0, 1)")));
    }
    let n = sys.n;
    let b = sys
        .a
        .iter()
        .enumerate()
        .map(|(j, aj)| Ok(aj.dilate(r)?.scale(Complex64::new(r.powi((n - j) as i32), 0.0))))
        .collect::<Result<Vec<_>>>()?;
    let rhs = sys.rhs.dilate(r)?.scale(Complex64::new(r.powi(n as i32), 0.0));
    Ok(DilatedSystem { r, b, rhs })
}

/// `d`-fold iterated integral of `g` along `[0, z]`, collapsed to
/// `z^d ∫₀¹ (1−t)^{d−1}/(d−1)! g(tz) dt` with 64-point Gauss–Legendre.
/// `d = 0` returns `g(z)`.
pub fn iterated_radial_integral(g: &dyn Fn(Complex64) -> Complex64, z: Complex64, d: usize) -> Complex64 {
    if d == 0 {
        return g(z);
    }
    let gl = GaussLegendre::cached(64);
    let fact: f64 = (1..d).map(|k| k as f64).product();
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        let t = 0.5 * (x + 1.0);
        acc += g(z * t) * (0.5 * w * (1.0 - t).powi(d as i32 - 1));
    }
    acc * z.powu(d as u32) / fact
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MVariant {
    Statement,
    #[default]
    Proof,
}

impl std::str::FromStr for MVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "statement" => Ok(MVariant::Statement),
            "proof" => Ok(MVariant::Proof),
            other => Err(Error::InvalidParams(format!("unknown variant '{other}' (statement|proof)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Pointwise coefficient conditions `M₀, M₁, M₂`.
    Pointwise,
    /// Integrated coefficient conditions `N₀, N₁, N₂`.
    Integrated,
}

/// The three constants of a membership criterion, each at two resolutions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub theorem: Theorem,
    pub names: [&'static str; 3],
    pub values: [RefinedValue; 3],
    pub threshold: f64,
    pub smallness_ok: bool,
    pub finiteness_ok: bool,
    pub variant: MVariant,
}

impl ConstantsReport {
    fn new(theorem: Theorem, coarse: [f64; 3], fine: [f64; 3], threshold: f64, variant: MVariant) -> Self {
        let values = [0, 1, 2].map(|i| RefinedValue::new(coarse[i], fine[i]));
        ConstantsReport {
            theorem,
            names: match theorem {
                Theorem::Pointwise => ["M0", "M1", "M2"],
                Theorem::Integrated => ["N0", "N1", "N2"],
            },
            values,
            threshold,
            smallness_ok: values[0].fine < threshold && values[1].fine < threshold,
            finiteness_ok: values.iter().all(|v| v.finite),
            variant,
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i].fine
    }
}

fn sweep(q: &DiscQuadrature, samples: &SupSampleSet, sp: &SpaceParams, terms: &[KernelTerm]) -> Vec<f64> {
    kernel_sweep(q, &samples.points, &sp.weight, terms).iter().map(|v| v.sup).collect()
}

/// `[M₀, M₁, M₂]` on one grid.
pub fn theorem31_constants_at(sys: &ODESystem, sp: &SpaceParams, samples: &SupSampleSet, q: &DiscQuadrature, variant: MVariant) -> Result<[f64; 3]> {
    let n = sys.n as f64;
    let (p, s) = (sp.p, sp.s);
    let a0 = sys.a[0].eval_on_quadrature(q);
    let an = sys.rhs.eval_on_quadrature(q);
    let mut m0 = Vec::with_capacity(q.len());
    let mut m2 = Vec::with_capacity(q.len());
    for ((z, v0), vn) in q.nodes.iter().zip(&a0).zip(&an) {
        let t = 1.0 - z.norm_sqr();
        let base0 = v0.norm().powf(p) * t.powf(n * p - 2.0);
        m0.push(match variant {
            MVariant::Proof => base0 * sp.weight.eval(t),
            MVariant::Statement => base0,
        });
        m2.push(match variant {
            MVariant::Proof => vn.norm().powf(p) * t.powf(n * p - 2.0 + s),
            MVariant::Statement => vn.norm().powf(p) * sp.weight.eval(t) * t.powf(n * p - 3.0 + s),
        });
    }
    let (m2a, m2d) = match variant {
        MVariant::Proof => (4.0, 4.0),
        MVariant::Statement => (3.0, 2.0),
    };
    let sups = sweep(
        q,
        samples,
        sp,
        &[
            KernelTerm { values: &m0, a_power: 4.0, denom_power: 4.0 },
            KernelTerm { values: &m2, a_power: m2a, denom_power: m2d },
        ],
    );
    let mut m1 = 0.0;
    for j in 1..sys.n {
        if !sys.a[j].is_zero() {
            m1 += hinf_alpha_norm(&sys.a[j], (sys.n - j) as f64, q)?;
        }
    }
    Ok([sups[0], m1, sups[1]])
}

/// `[N₀, N₁, N₂]` on one grid. Iterated integrals run along `[0, z]`; the
/// one of `A_n` is exact, as the `(n−1)`-fold antiderivative series.
pub fn theorem32_constants_at(sys: &ODESystem, sp: &SpaceParams, samples: &SupSampleSet, q: &DiscQuadrature) -> [f64; 3] {
    let n = sys.n;
    let (p, s) = (sp.p, sp.s);
    let w = &sp.weight;
    let e = p - 2.0 + s;
    let zero = Complex64::new(0.0, 0.0);

    let a0 = &sys.a[0];
    let g0 = |xi: Complex64| {
        let t = 1.0 - xi.norm_sqr();
        Complex64::new(a0.eval_unchecked(xi).norm().powf(p) * w.eval(t) / t.powf(s), 0.0)
    };
    // Σ_{k=1}^m A_{n−k}^{(m−k)} for m = 1..n−1
    let inner1: Vec<TruncSeries> = (1..n)
        .map(|m| {
            (1..=m).fold(TruncSeries::zero(0), |acc, k| &acc + &sys.a[n - k].nth_derivative(m - k))
        })
        .collect();
    let mut antider = sys.rhs.clone();
    for _ in 1..n {
        antider = antider.integral();
    }
    let i2 = antider.eval_on_quadrature(q);

    let mut f0 = Vec::with_capacity(q.len());
    let mut f1 = Vec::with_capacity(q.len());
    let mut f2 = Vec::with_capacity(q.len());
    for (z, v2) in q.nodes.iter().zip(&i2) {
        let rad = (1.0 - z.norm_sqr()).powf(e);
        let v0 = if a0.is_zero() { 0.0 } else { iterated_radial_integral(&g0, *z, n - 1).norm() };
        let mut v1 = 0.0;
        for (idx, h) in inner1.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let g1 = |xi: Complex64| {
                let t = 1.0 - xi.norm_sqr();
                Complex64::new(h.eval_unchecked(xi).norm().powf(p) * w.eval(t) / t.powf(p + s), 0.0)
            };
            v1 += iterated_radial_integral(&g1, *z, idx + 1).norm();
        }
        f0.push(v0 * rad);
        f1.push(v1 * rad);
        f2.push(if *v2 == zero { 0.0 } else { v2.norm().powf(p) * rad });
    }
    let sups = sweep(
        q,
        samples,
        sp,
        &[
            KernelTerm { values: &f0, a_power: 4.0, denom_power: 4.0 },
            KernelTerm { values: &f1, a_power: 4.0, denom_power: 4.0 },
            KernelTerm { values: &f2, a_power: 4.0, denom_power: 4.0 },
        ],
    );
    [sups[0], sups[1], sups[2]]
}

fn at_degree(sys: &ODESystem, ws: &Workspace) -> ODESystem {
    sys.truncated(ws.res.degree)
}

pub fn theorem31_constants(sys: &ODESystem, sp: &SpaceParams, refinement: &Refinement, variant: MVariant, threshold: f64) -> Result<ConstantsReport> {
    let [c, f] = refinement.workspaces().map(|ws| theorem31_constants_at(&at_degree(sys, ws), sp, &ws.samples, &ws.quad, variant));
    Ok(ConstantsReport::new(Theorem::Pointwise, c?, f?, threshold, variant))
}

pub fn theorem32_constants(sys: &ODESystem, sp: &SpaceParams, refinement: &Refinement, threshold: f64) -> ConstantsReport {
    let [c, f] = refinement.workspaces().map(|ws| theorem32_constants_at(&at_degree(sys, ws), sp, &ws.samples, &ws.quad));
    ConstantsReport::new(Theorem::Integrated, c, f, threshold, MVariant::Proof)
}

/// Box functional and Besov–Morrey norm of a candidate member.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub label: String,
    pub box_sup: RefinedValue,
    pub norm: RefinedValue,
    pub member: bool,
}

/// Norm `(|f(0)|^p + sup_a …)^{1/p}` with the Möbius term evaluated through
/// the kernel `(1−|a|²)^{2s} |1 − āz|^{−2s}`.
fn norm_and_box(f: &TruncSeries, sp: &SpaceParams, ws: &Workspace) -> Result<(f64, f64)> {
    let mu = besov_density_values(f, sp, &ws.quad);
    let boxes = grid_carleson(&ws.quad, &mu, &sp.weight, &ws.arcs)?.sup_value;
    let morrey = sweep(&ws.quad, &ws.samples, sp, &[KernelTerm { values: &mu, a_power: 2.0 * sp.s, denom_power: 2.0 * sp.s }])[0];
    Ok(((f.coeff(0).norm().powf(sp.p) + morrey).powf(1.0 / sp.p), boxes))
}

/// `f` solved or supplied at each resolution's degree.
pub fn membership_check(label: &str, f: &dyn Fn(usize) -> Result<TruncSeries>, sp: &SpaceParams, refinement: &Refinement) -> Result<MembershipReport> {
    let mut vals = [(0.0, 0.0); 2];
    for (k, ws) in refinement.workspaces().into_iter().enumerate() {
        vals[k] = norm_and_box(&f(ws.res.degree)?, sp, ws)?;
    }
    let norm = RefinedValue::new(vals[0].0, vals[1].0);
    let box_sup = RefinedValue::new(vals[0].1, vals[1].1);
    Ok(MembershipReport { label: label.to_string(), box_sup, norm, member: norm.finite && box_sup.finite })
}

/// Constants plus membership of every basis solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OdeReport {
    pub constants: ConstantsReport,
    pub members: Vec<MembershipReport>,
    /// Largest equation residual over the basis solutions.
    pub residual: f64,
}

impl OdeReport {
    /// Hypotheses met implies every basis solution is a member; unmet
    /// hypotheses are not a failure.
    pub fn pass(&self) -> bool {
        let hyp = self.constants.smallness_ok && self.constants.finiteness_ok;
        !hyp || self.members.iter().all(|m| m.member)
    }
}

pub fn run_ode_check<R: Rng>(
    sys: &ODESystem,
    sp: &SpaceParams,
    refinement: &Refinement,
    theorem: Theorem,
    variant: MVariant,
    threshold: f64,
    rng: &mut R,
) -> Result<OdeReport> {
    let constants = match theorem {
        Theorem::Pointwise => theorem31_constants(sys, sp, refinement, variant, threshold)?,
        Theorem::Integrated => theorem32_constants(sys, sp, refinement, threshold),
    };
    let mut members = Vec::new();
    let mut residual = 0.0f64;
    for init in sys.basis_inits(rng) {
        let s = sys.with_init(init.clone())?;
        let fine = solve_ode_series(&s.truncated(refinement.fine.res.degree), refinement.fine.res.degree)?;
        residual = residual.max(ode_residual(&s, &fine));
        let solve = |deg: usize| solve_ode_series(&s.truncated(deg), deg);
        let label = format!(
            "init=({})",
            init.iter().map(|c| format!("{}", c.re)).collect::<Vec<_>>().join(";")
        );
        members.push(membership_check(&label, &solve, sp, refinement)?);
    }
    Ok(OdeReport { constants, members, residual })
}

/// `(Σ a_i)^m <= Σ a_i^m` for `m <= 1`, `(Σ a_i)^m <= N^{m−1} Σ a_i^m` for `m >= 1`.
pub fn verify_lemma33(values: &[f64], m: f64) -> Result<bool> {
    if values.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Domain("values must be nonnegative".into()));
    }
    if !(m > 0.0) {
        return Err(Error::Domain(format!("exponent m = {m} must be positive")));
    }
    let lhs = values.iter().sum::<f64>().powf(m);
    let sum_m: f64 = values.iter().map(|v| v.powf(m)).sum();
    let rhs = if m <= 1.0 { sum_m } else { (values.len() as f64).powf(m - 1.0) * sum_m };
    Ok(lhs <= rhs * (1.0 + 1e-12))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Max coefficient difference between `f^{(n)} h` and
/// `Σ_{i=0}^n (−1)^i C(n,i) (f h^{(i)})^{(n−i)}`, relative to the largest
/// coefficient on either side.
pub fn lemma34_residual(f: &TruncSeries, h: &TruncSeries, n: usize) -> f64 {
    let full = f.degree() + h.degree();
    let lhs = f.nth_derivative(n).mul_trunc(h, full);
    let sup = |g: &TruncSeries| g.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut scale = sup(&lhs);
    let mut rhs = TruncSeries::zero(0);
    for i in 0..=n {
        let term = f.mul_trunc(&h.nth_derivative(i), full).nth_derivative(n - i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = term.scale(Complex64::new(sign * binomial(n, i), 0.0));
        scale = scale.max(sup(&term));
        rhs = &rhs + &term;
    }
    sup(&(&lhs - &rhs)) / scale.max(1.0)
}

pub fn verify_lemma34(f: &TruncSeries, h: &TruncSeries, n: usize) -> bool {
    lemma34_residual(f, h, n) <= 1e-10
}

/// At each `a`: `|f^{(n)}(a)|^p (1−|a|²)^{pn−2+s}` against `slack` times
/// `∫ |f^{(n)}|^p (1−|z|²)^{pn−4+s} (1−|φ_a(z)|²)² dA`.
pub fn verify_lemma35(f: &TruncSeries, n: usize, sp: &SpaceParams, a_set: &SupSampleSet, q: &DiscQuadrature, slack: f64) -> Vec<ComparabilityReport> {
    let dn = f.nth_derivative(n);
    let e = sp.p * n as f64 - 2.0 + sp.s;
    let field: Vec<f64> = dn
        .eval_on_quadrature(q)
        .iter()
        .zip(&q.nodes)
        .map(|(v, z)| v.norm().powf(sp.p) * (1.0 - z.norm_sqr()).powf(e))
        .collect();
    let one = Complex64::new(1.0, 0.0);
    a_set
        .points
        .iter()
        .map(|a| {
            let t = 1.0 - a.norm_sqr();
            let left = dn.eval_unchecked(*a).norm().powf(sp.p) * t.powf(e);
            let mut acc = 0.0;
            for ((z, w), v) in q.nodes.iter().zip(&q.weights).zip(&field) {
                acc += w * v / (one - a.conj() * z).norm_sqr().powi(2);
            }
            ComparabilityReport::exact_bound(format!("lemma35 n={n} a={:.6}{:+.6}i", a.re, a.im), left, t * t * acc, slack)
        })
        .collect()
}

/// `sup_z |f^{(n)}(z)| / (‖f‖ (K(1−|z|²)/(1−|z|²)^{pn+s})^{1/p})` over the
/// nodes, bounded by `slack` whenever the norm is finite-flagged.
pub fn verify_lemma36(f: &dyn Fn(usize) -> Result<TruncSeries>, n: usize, sp: &SpaceParams, refinement: &Refinement, slack: f64) -> Result<ComparabilityReport> {
    let mut ratios = [0.0; 2];
    let mut norms = [0.0; 2];
    for (k, ws) in refinement.workspaces().into_iter().enumerate() {
        let g = f(ws.res.degree)?;
        let (norm, _) = norm_and_box(&g, sp, ws)?;
        norms[k] = norm;
        let mut best = 0.0f64;
        for (v, z) in g.nth_derivative(n).eval_on_quadrature(&ws.quad).iter().zip(&ws.quad.nodes) {
            let t = 1.0 - z.norm_sqr();
            let bound = (sp.weight.eval(t) / t.powf(sp.p * n as f64 + sp.s)).powf(1.0 / sp.p);
            let r = if v.norm() == 0.0 { 0.0 } else { v.norm() / (norm * bound) };
            best = best.max(r);
        }
        ratios[k] = best;
    }
    let norm = RefinedValue::new(norms[0], norms[1]);
    let ratio = RefinedValue::new(ratios[0], ratios[1]);
    let one = RefinedValue::new(1.0, 1.0);
    let mut rep = ComparabilityReport::bound(format!("lemma36 n={n}"), &ratio, &one, slack);
    if !norm.finite {
        // the bound is vacuous for an infinite norm
        rep.pass = true;
    }
    Ok(rep)
}

/// Text form of a system: `order=n`, `A<j>=<function>`, `rhs=<function>`,
/// `init=v0,v1,…`; `#` starts a comment; absent coefficients are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub order: usize,
    pub coeffs: Vec<Option<TestFunction>>,
    pub rhs: Option<TestFunction>,
    pub init: Vec<Complex64>,
}

fn relocate(e: Error, line: usize, col0: usize) -> Error {
    match e {
        Error::Parse { column, message, .. } => Error::parse(line, col0 + column - 1, message),
        other => Error::parse(line, col0, other.to_string()),
    }
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut order: Option<usize> = None;
        let mut coeffs: Vec<(usize, usize, TestFunction)> = Vec::new();
        let mut rhs = None;
        let mut init: Option<(usize, Vec<Complex64>)> = None;
        let mut last = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last = line;
            let body = raw.split('#').next().unwrap_or("");
            if body.trim().is_empty() {
                continue;
            }
            let lead = body.len() - body.trim_start().len();
            let (key, val) = body
                .split_once('=')
                .ok_or_else(|| Error::parse(line, lead + 1, "expected key=value"))?;
            let key = key.trim();
            let vcol = key.len() + lead + 2;
            let val = val.trim();
            match key {
                "order" => {
                    let n: usize = val.parse().map_err(|_| Error::parse(line, vcol, format!("bad order '{val}'")))?;
                    if n == 0 {
                        return Err(Error::parse(line, vcol, "order must be at least 1"));
                    }
                    order = Some(n);
                }
                "rhs" => rhs = Some(TestFunction::parse(val).map_err(|e| relocate(e, line, vcol))?),
                "init" => {
                    let vals = val
                        .split(',')
                        .map(|t| parse_complex(t).ok_or_else(|| Error::parse(line, vcol, format!("bad initial value '{}'", t.trim()))))
                        .collect::<Result<Vec<_>>>()?;
                    init = Some((line, vals));
                }
                k if k.starts_with('A') => {
                    let j: usize = k[1..].parse().map_err(|_| Error::parse(line, lead + 1, format!("bad coefficient key '{k}'")))?;
                    coeffs.push((line, j, TestFunction::parse(val).map_err(|e| relocate(e, line, vcol))?));
                }
                other => return Err(Error::parse(line, lead + 1, format!("unknown key '{other}'"))),
            }
        }
        let n = order.ok_or_else(|| Error::parse(last + 1, 1, "missing 'order'"))?;
        let mut slots: Vec<Option<TestFunction>> = vec![None; n];
        let mut rhs = rhs;
        for (line, j, f) in coeffs {
            if j < n {
                slots[j] = Some(f);
            } else if j == n && rhs.is_none() {
                rhs = Some(f);
            } else {
                return Err(Error::parse(line, 1, format!("coefficient A{j} exceeds order {n}")));
            }
        }
        let (iline, init) = init.ok_or_else(|| Error::parse(last + 1, 1, "missing 'init'"))?;
        if init.len() != n {
            return Err(Error::parse(iline, 1, format!("order {n} needs {n} initial values, got {}", init.len())));
        }
        Ok(SystemSpec { order: n, coeffs: slots, rhs, init })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Coefficients materialized at `degree`.
    pub fn system(&self, degree: usize) -> Result<ODESystem> {
        let mk = |f: &Option<TestFunction>| match f {
            Some(t) => t.series(degree.max(1)),
            None => Ok(TruncSeries::zero(0)),
        };
        let a = self.coeffs.iter().map(mk).collect::<Result<Vec<_>>>()?;
        ODESystem::new(a, mk(&self.rhs)?, self.init.clone())
    }
}
