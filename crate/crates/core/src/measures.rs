//! Norms of analytic functions and constants of measures `dμ = d(z) dA`:
//! Besov and Besov–Morrey type norms, `K`-Carleson constants by boxes and by
//! the kernel test, the integral `I_{c,t}`, the operator `T`, and the
//! `H^∞_α` and `Q_K` norms.

use std::fmt;
use std::sync::Arc as Shared;

use num_complex::Complex64;
use serde::Serialize;

use crate::discgeom::{
    box_quadrature, dyadic_arcs, graded_quadrature, mobius, mobius_derivative_abs, sup_samples, Arc, BoxMasses,
    CarlesonBox, DiscQuadrature, SupSampleSet,
};
use crate::error::{Error, Result};
use crate::series::{frac_deriv_coeff, FracParams, TruncSeries};
use crate::weights::WeightFun;

/// Depth of the per-box rules used by [`carleson_constant`].
pub const DEFAULT_BOX_DEPTH: usize = 10;

/// Exponents `p`, `s`, `σ` and the weight `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    pub p: f64,
    pub s: f64,
    pub sigma: f64,
    pub weight: WeightFun,
}

impl SpaceParams {
    pub fn new(p: f64, s: f64, sigma: f64, weight: WeightFun) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidParams(format!("p = {p} must exceed 1")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParams(format!("s = {s} must lie in (0, 1)")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParams(format!("sigma = {sigma} must be positive")));
        }
        Ok(SpaceParams { p, s, sigma, weight })
    }

    /// Power weight `K(t) = t^q`.
    pub fn with_power(p: f64, s: f64, sigma: f64, q: f64) -> Result<Self> {
        Self::new(p, s, sigma, WeightFun::power(q)?)
    }

    /// Hypotheses violated by these parameters; empty when all hold.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.sigma >= 2.0 * self.s {
            w.push(format!("sigma = {} is not below 2s = {}", self.sigma, 2.0 * self.s));
        }
        let lower = 1f64.max(1.0 + self.sigma - self.s);
        if self.p <= lower {
            w.push(format!("p = {} is not above max(1, 1 + sigma - s) = {lower}", self.p));
        }
        w
    }

    /// `p − 2 + s`.
    pub fn besov_exponent(&self) -> f64 {
        self.p - 2.0 + self.s
    }

    /// Parses `p=2,s=0.5,sigma=0.4,K=power:q=0.3`. Keys that follow `K=` and
    /// are not `p`, `s` or `sigma` belong to the weight spec, so
    /// `K=powerlog:q=0.3,beta=1` parses as expected.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut p = None;
        let mut s = None;
        let mut sigma = None;
        let mut k_spec: Option<String> = None;
        let mut col = 1;
        for tok in spec.split(',') {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::parse(1, col, format!("expected key=value, found '{tok}'")))?;
            let key = key.trim();
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(1, col + key.len() + 1, format!("bad number '{v}' for {key}")))
            };
            match key {
                "p" => p = Some(num(val)?),
                "s" => s = Some(num(val)?),
                "sigma" => sigma = Some(num(val)?),
                "K" => k_spec = Some(val.trim().to_string()),
                _ => match k_spec.as_mut() {
                    Some(k) => {
                        k.push(',');
                        k.push_str(tok.trim());
                    }
                    None => return Err(Error::parse(1, col, format!("unknown space key '{key}'"))),
                },
            }
            col += tok.len() + 1;
        }
        let missing = |name: &str| Error::parse(1, 1, format!("space spec lacks '{name}'"));
        let weight = WeightFun::parse(&k_spec.ok_or_else(|| missing("K"))?)?;
        Self::new(
            p.ok_or_else(|| missing("p"))?,
            s.ok_or_else(|| missing("s"))?,
            sigma.ok_or_else(|| missing("sigma"))?,
            weight,
        )
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={},s={},sigma={},K={}", self.p, self.s, self.sigma, self.weight)
    }
}

/// A nonnegative density `d(z)` with a human-readable descriptor.
#[derive(Clone)]
pub struct Density {
    pub descriptor: String,
    eval: Shared<dyn Fn(Complex64) -> f64 + Send + Sync>,
}

impl Density {
    pub fn new(descriptor: impl Into<String>, f: impl Fn(Complex64) -> f64 + Send + Sync + 'static) -> Self {
        Density { descriptor: descriptor.into(), eval: Shared::new(f) }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c)
    }

    /// `(1 − |z|²)^γ`.
    pub fn radial_power(gamma: f64) -> Self {
        Self::new(format!("(1-|z|^2)^{gamma}"), move |z| (1.0 - z.norm_sqr()).powf(gamma))
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        (self.eval)(z)
    }
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density({})", self.descriptor)
    }
}

/// Ratios `μ(S(I))/K(|I|)` over a family of arcs and their maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlesonReport {
    pub per_arc: Vec<(Arc, f64)>,
    pub sup_value: f64,
    pub argmax: Arc,
}

impl CarlesonReport {
    fn from_ratios(per_arc: Vec<(Arc, f64)>) -> Result<Self> {
        let (argmax, sup_value) = per_arc
            .iter()
            .copied()
            .fold(None, |best: Option<(Arc, f64)>, (a, r)| match best {
                Some((_, br)) if br >= r => best,
                _ => Some((a, r)),
            })
            .ok_or_else(|| Error::InvalidParams("arc family is empty".into()))?;
        Ok(CarlesonReport { per_arc, sup_value, argmax })
    }

    /// Rows `(theta0, len, ratio)`.
    pub fn rows(&self) -> Vec<(f64, f64, f64)> {
        self.per_arc.iter().map(|(a, r)| (a.theta0, a.len, *r)).collect()
    }

    pub fn summary(&self, refinement_delta: Option<f64>) -> CarlesonSummary {
        CarlesonSummary {
            sup: self.sup_value,
            argmax: ArcSummary { theta0: self.argmax.theta0, len: self.argmax.len },
            refinement_delta,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ArcSummary {
    pub theta0: f64,
    pub len: f64,
}

/// JSON summary of a [`CarlesonReport`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CarlesonSummary {
    pub sup: f64,
    pub argmax: ArcSummary,
    pub refinement_delta: Option<f64>,
}

/// `|f'(z)|^p (1 − |z|²)^{p−2+s}` at the nodes of `q`.
pub fn besov_density_values(f: &TruncSeries, sp: &SpaceParams, q: &DiscQuadrature) -> Vec<f64> {
    let e = sp.besov_exponent();
    f.derivative()
        .eval_on_quadrature(q)
        .iter()
        .zip(&q.nodes)
        .map(|(d, z)| d.norm().powf(sp.p) * (1.0 - z.norm_sqr()).powf(e))
        .collect()
}

/// `∫ |f'|^p (1 − |z|²)^{p−2+s} dA`.
pub fn besov_seminorm_p(f: &TruncSeries, sp: &SpaceParams, q: &DiscQuadrature) -> f64 {
    q.integrate_values(&besov_density_values(f, sp, q))
}

/// `(|f(0)|^p + ∫ |f'|^p (1 − |z|²)^{p−2+s} dA)^{1/p}`.
pub fn besov_norm(f: &TruncSeries, sp: &SpaceParams, q: &DiscQuadrature) -> f64 {
    (f.coeff(0).norm().powf(sp.p) + besov_seminorm_p(f, sp, q)).powf(1.0 / sp.p)
}

/// `sup_a (1−|a|²)^s / K(1−|a|²) · ‖f∘φ_a − f(a)‖^p_{B_p(s)}` over `S`, with the
/// inner seminorm computed through `(f∘φ_a)' = f'(φ_a) φ_a'`.
pub fn morrey_sup_term(f: &TruncSeries, sp: &SpaceParams, samples: &SupSampleSet, q: &DiscQuadrature) -> f64 {
    let df = f.derivative();
    let e = sp.besov_exponent();
    let radial: Vec<f64> = q.nodes.iter().map(|z| (1.0 - z.norm_sqr()).powf(e)).collect();
    let mut best = 0.0f64;
    for &a in &samples.points {
        let mut acc = 0.0;
        for ((z, w), rad) in q.nodes.iter().zip(&q.weights).zip(&radial) {
            let pa = mobius(a, *z).unwrap_or(*z);
            let d = df.eval_unchecked(pa).norm() * mobius_derivative_abs(a, *z);
            acc += w * d.powf(sp.p) * rad;
        }
        let t = 1.0 - a.norm_sqr();
        best = best.max(t.powf(sp.s) / sp.weight.eval(t) * acc);
    }
    best
}

/// `‖f‖_{B_p^K(s)} = (|f(0)|^p + sup-term)^{1/p}`.
pub fn besov_morrey_norm(f: &TruncSeries, sp: &SpaceParams, samples: &SupSampleSet, q: &DiscQuadrature) -> f64 {
    (f.coeff(0).norm().powf(sp.p) + morrey_sup_term(f, sp, samples, q)).powf(1.0 / sp.p)
}

/// Box masses of a nodal field over `arcs`, divided by `K(|I|)`.
pub fn grid_carleson(q: &DiscQuadrature, values: &[f64], w: &WeightFun, arcs: &[Arc]) -> Result<CarlesonReport> {
    let bm = BoxMasses::new(q, values)?;
    CarlesonReport::from_ratios(arcs.iter().map(|a| (*a, bm.mass(a) / w.eval(a.len))).collect())
}

/// `sup_I (1/K(|I|)) ∫_{S(I)} |f'|^p (1 − |z|²)^{p−2+s} dA` over `arcs`,
/// computed on a ring grid with [`BoxMasses`].
pub fn box_seminorm_with(f: &TruncSeries, sp: &SpaceParams, arcs: &[Arc], q: &DiscQuadrature) -> Result<CarlesonReport> {
    grid_carleson(q, &besov_density_values(f, sp, q), &sp.weight, arcs)
}

/// [`box_seminorm_with`] on a graded grid fine enough for the arc family.
pub fn box_seminorm(f: &TruncSeries, sp: &SpaceParams, arcs: &[Arc]) -> Result<CarlesonReport> {
    let shortest = arcs.iter().map(|a| a.len).fold(1.0, f64::min);
    let depth = ((-shortest.log2()).ceil() as usize + 4).clamp(6, 12);
    let angles = (f.degree() + 1).next_power_of_two().max(1 << (depth + 1)).clamp(256, 4096);
    let q = graded_quadrature(depth, angles, 16)?;
    box_seminorm_with(f, sp, arcs, &q)
}

/// `sup_I μ(S(I))/K(|I|)` with `μ(S(I))` from [`box_quadrature`].
pub fn carleson_constant(d: &Density, w: &WeightFun, arcs: &[Arc]) -> Result<CarlesonReport> {
    carleson_constant_with_depth(d, w, arcs, DEFAULT_BOX_DEPTH)
}

pub fn carleson_constant_with_depth(d: &Density, w: &WeightFun, arcs: &[Arc], depth: usize) -> Result<CarlesonReport> {
    let ratios = arcs
        .iter()
        .map(|a| {
            let bq = box_quadrature(&CarlesonBox::new(*a), depth);
            (*a, bq.integrate(|z| d.eval(z)) / w.eval(a.len))
        })
        .collect();
    CarlesonReport::from_ratios(ratios)
}

/// One functional of the form
/// `(1 − |a|²)^{a_power} / K(1 − |a|²) · Σ wᵢ vᵢ |1 − āzᵢ|^{−denom_power}`.
#[derive(Debug, Clone, Copy)]
pub struct KernelTerm<'a> {
    pub values: &'a [f64],
    pub a_power: f64,
    pub denom_power: f64,
}

/// Supremum of a [`KernelTerm`] over sample points, with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupValue {
    pub sup: f64,
    pub argmax: Complex64,
}

/// Evaluates several kernel functionals over the same sample points, computing
/// `log |1 − āz|²` once per `(a, z)` pair.
pub fn kernel_sweep(q: &DiscQuadrature, points: &[Complex64], w: &WeightFun, terms: &[KernelTerm]) -> Vec<SupValue> {
    let mut best = vec![SupValue { sup: 0.0, argmax: Complex64::new(0.0, 0.0) }; terms.len()];
    let mut acc = vec![0.0; terms.len()];
    let one = Complex64::new(1.0, 0.0);
    for &a in points {
        acc.iter_mut().for_each(|x| *x = 0.0);
        let ac = a.conj();
        for (i, (z, wt)) in q.nodes.iter().zip(&q.weights).enumerate() {
            let l = (one - ac * z).norm_sqr().ln();
            for (k, term) in terms.iter().enumerate() {
                let v = term.values[i];
                if v != 0.0 {
                    acc[k] += wt * v * (-0.5 * term.denom_power * l).exp();
                }
            }
        }
        let t = 1.0 - a.norm_sqr();
        let kt = w.eval(t);
        for (k, term) in terms.iter().enumerate() {
            let val = t.powf(term.a_power) / kt * acc[k];
            if val > best[k].sup {
                best[k] = SupValue { sup: val, argmax: a };
            }
        }
    }
    best
}

/// `sup_a (1/K(1−|a|²)) ∫ ((1−|a|²)/|1−āz|)^q d(z) dA(z)` over the sample set.
pub fn kernel_carleson(d: &Density, w: &WeightFun, q_exp: f64, samples: &SupSampleSet, q: &DiscQuadrature) -> f64 {
    let values: Vec<f64> = q.nodes.iter().map(|z| d.eval(*z)).collect();
    let term = KernelTerm { values: &values, a_power: q_exp, denom_power: q_exp };
    kernel_sweep(q, &samples.points, w, &[term])[0].sup
}

/// `z ↦ |f^{(t)}(z)|^p (1 − |z|²)^{pt−2+s}` with `f^{(t)}` from the coefficient transform.
pub fn frac_measure_density(f: &TruncSeries, fp: &FracParams, sp: &SpaceParams) -> Density {
    let ft = frac_deriv_coeff(f, fp);
    let (p, e) = (sp.p, sp.p * fp.t - 2.0 + sp.s);
    Density::new(format!("|f^({})|^{p} (1-|z|^2)^{e}", fp.t), move |z| {
        ft.eval_unchecked(z).norm().powf(p) * (1.0 - z.norm_sqr()).powf(e)
    })
}

/// Nodal values of [`frac_measure_density`], evaluated ring by ring.
pub fn frac_measure_values(f: &TruncSeries, fp: &FracParams, sp: &SpaceParams, q: &DiscQuadrature) -> Vec<f64> {
    let e = sp.p * fp.t - 2.0 + sp.s;
    frac_deriv_coeff(f, fp)
        .eval_on_quadrature(q)
        .iter()
        .zip(&q.nodes)
        .map(|(v, z)| v.norm().powf(sp.p) * (1.0 - z.norm_sqr()).powf(e))
        .collect()
}

/// `I_{c,t}(z) = ∫ (1 − |w|²)^t / |1 − z w̄|^{2+t+c} dA(w)`.
pub fn i_ct(c: f64, t_exp: f64, z: Complex64, q: &DiscQuadrature) -> Result<f64> {
    if !(t_exp > -1.0) {
        return Err(Error::Domain(format!("exponent t = {t_exp} must exceed -1")));
    }
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not inside the disc", z.norm())));
    }
    let half = 0.5 * (2.0 + t_exp + c);
    let one = Complex64::new(1.0, 0.0);
    Ok(q.integrate(|w| (1.0 - w.norm_sqr()).powf(t_exp) * (one - z * w.conj()).norm_sqr().powf(-half)))
}

/// `Tf(z) = ∫ (1 − |w|²)^{b−1} / |1 − w̄z|^{α+b} f(w) dA(w)`.
pub fn t_operator_at(f: &dyn Fn(Complex64) -> Complex64, alpha: f64, b: f64, z: Complex64, q: &DiscQuadrature) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let half = 0.5 * (alpha + b);
    q.integrate_complex(|w| f(w) * ((1.0 - w.norm_sqr()).powf(b - 1.0) * (one - w.conj() * z).norm_sqr().powf(-half)))
}

/// Ranges under which `T` maps `K`-Carleson measures to `K`-Carleson measures;
/// returns the violated conditions.
pub fn t_operator_warnings(sp: &SpaceParams, alpha: f64, b: f64) -> Vec<String> {
    let mut w = Vec::new();
    let lo_alpha = (2.0 - sp.s) / sp.p + sp.p / (sp.p - 1.0);
    if alpha <= lo_alpha {
        w.push(format!("alpha = {alpha} is not above {lo_alpha}"));
    }
    let lo_b = 2.0 + sp.p + (sp.s - 2.0) / sp.p;
    if b <= lo_b {
        w.push(format!("b = {b} is not above {lo_b}"));
    }
    w
}

/// `sup_z |f(z)| (1 − |z|²)^α` over the nodes of `q` and a boundary ladder
/// of depth `q.depth` with 64 rotations.
pub fn hinf_alpha_norm(f: &TruncSeries, alpha: f64, q: &DiscQuadrature) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let ladder = sup_samples(q.depth.max(1), 64)?;
    let node_vals = f.eval_on_quadrature(q);
    let mut best = 0.0f64;
    for (v, z) in node_vals.iter().zip(&q.nodes) {
        best = best.max(v.norm() * (1.0 - z.norm_sqr()).powf(alpha));
    }
    for a in &ladder.points {
        best = best.max(f.eval_unchecked(*a).norm() * (1.0 - a.norm_sqr()).powf(alpha));
    }
    Ok(best)
}

/// `(sup_a ∫ |f'(z)|² K(g(z, a)) dA(z))^{1/2}` over the sample set.
pub fn qk_norm(f: &TruncSeries, w: &WeightFun, samples: &SupSampleSet, q: &DiscQuadrature) -> f64 {
    let d2: Vec<f64> = f.derivative().eval_on_quadrature(q).iter().map(|v| v.norm_sqr()).collect();
    let mut best = 0.0f64;
    for &a in &samples.points {
        let mut acc = 0.0;
        for ((z, wt), d) in q.nodes.iter().zip(&q.weights).zip(&d2) {
            if *d == 0.0 {
                continue;
            }
            // g(z, a) = -log |φ_a(z)|, with |φ_a|² = 1 − (1−|a|²)(1−|z|²)/|1−āz|²
            let den = (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr();
            let phi2 = (a - z).norm_sqr() / den;
            if phi2 == 0.0 {
                continue;
            }
            acc += wt * d * w.eval(-0.5 * phi2.ln());
        }
        best = best.max(acc);
    }
    best.sqrt()
}

/// The `a = 0` term of [`qk_norm`] before the square root.
pub fn qk_origin_term(f: &TruncSeries, w: &WeightFun, q: &DiscQuadrature) -> f64 {
    let s = SupSampleSet { points: vec![Complex64::new(0.0, 0.0)], depth: 0, rotations: 1 };
    qk_norm(f, w, &s, q).powi(2)
}

/// Default dyadic family: lengths `2^{−j}`, `j = 0..=10`, eight rotations.
pub fn default_arcs() -> Vec<Arc> {
    dyadic_arcs(10, 8)
}
