//! Weight functions `K` on `[0, ∞)`, their dilation majorant `φ_K`, and the
//! two integrability conditions every admissible weight must satisfy.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::GaussLegendre;

/// Number of log-spaced `t` samples used for `φ_K` of non-power weights.
pub const PHI_SAMPLES: usize = 100_000;
const PHI_T_MIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `K(t) = t^q`.
    Power { q: f64 },
    /// `K(t) = t^q · (log(e + 1/t))^β`, made nondecreasing (see [`WeightFun::power_log`]).
    PowerLog { q: f64, beta: f64 },
    /// Knots `(t, K(t))` on `(0, t_max]`, interpolated linearly in `(log t, log K)`.
    Tabulated { knots: Vec<(f64, f64)> },
}

/// An admissible weight `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFun {
    kind: WeightKind,
    // Interval `[start, end]` on which a PowerLog weight is held constant so
    // that the weight is nondecreasing.
    plateau: Option<(f64, f64, f64)>,
}

impl WeightFun {
    pub fn power(q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidWeight(format!("power exponent q = {q} must be positive")));
        }
        Ok(WeightFun { kind: WeightKind::Power { q }, plateau: None })
    }

    /// The PowerLog family. Where the raw formula `t^q (log(e + 1/t))^β`
    /// decreases (possible for `β > 0` and small `q`), the weight is replaced by
    /// its running supremum, the least nondecreasing majorant of the formula.
    pub fn power_log(q: f64, beta: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidWeight(format!(
                "powerlog needs q > 0 and finite beta, got q = {q}, beta = {beta}"
            )));
        }
        let plateau = power_log_plateau(q, beta);
        Ok(WeightFun { kind: WeightKind::PowerLog { q, beta }, plateau })
    }

    pub fn tabulated(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidWeight("table has no knots".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidWeight(format!("t values must be strictly increasing (t = {})", w[1].0)));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidWeight(format!("K must be nondecreasing (at t = {})", w[1].0)));
            }
        }
        if let Some(&(t, k)) = knots.iter().find(|(t, k)| !(*t > 0.0 && *k > 0.0 && t.is_finite() && k.is_finite())) {
            return Err(Error::InvalidWeight(format!("knot ({t}, {k}) must have t > 0 and K > 0")));
        }
        Ok(WeightFun { kind: WeightKind::Tabulated { knots }, plateau: None })
    }

    /// Reads a CSV file with header `t,K`.
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut knots = Vec::new();
        let mut last_t = f64::NEG_INFINITY;
        for (i, rec) in reader.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::parse(line, 1, e.to_string()))?;
            if rec.len() != 2 {
                return Err(Error::parse(line, 1, format!("expected 2 columns, found {}", rec.len())));
            }
            let t: f64 = rec[0].parse().map_err(|_| Error::parse(line, 1, format!("bad t value '{}'", &rec[0])))?;
            let k: f64 = rec[1].parse().map_err(|_| Error::parse(line, 2, format!("bad K value '{}'", &rec[1])))?;
            if t <= last_t {
                return Err(Error::parse(line, 1, "t must be strictly increasing"));
            }
            last_t = t;
            knots.push((t, k));
        }
        Self::tabulated(knots)
    }

    /// Parses `power:q=0.3`, `powerlog:q=0.3,beta=1` or `table:<path>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse(1, 1, format!("weight spec '{spec}' lacks a ':'")))?;
        match head {
            "power" => {
                let kv = parse_kv(rest, head.len() + 2)?;
                Self::power(require(&kv, "q", head.len() + 2)?)
            }
            "powerlog" => {
                let kv = parse_kv(rest, head.len() + 2)?;
                Self::power_log(require(&kv, "q", head.len() + 2)?, require(&kv, "beta", head.len() + 2)?)
            }
            "table" => Self::from_table_file(Path::new(rest)),
            other => Err(Error::parse(1, 1, format!("unknown weight kind '{other}'"))),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Evaluates `K(t)` for `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return match &self.kind {
                WeightKind::Tabulated { knots } if tab_first_slope(knots) == 0.0 => knots[0].1,
                _ => 0.0,
            };
        }
        match &self.kind {
            WeightKind::Power { q } => t.powf(*q),
            WeightKind::PowerLog { q, beta } => {
                if let Some((a, b, level)) = self.plateau {
                    if t >= a && t <= b {
                        return level;
                    }
                }
                power_log_raw(*q, *beta, t)
            }
            WeightKind::Tabulated { knots } => tab_eval(knots, t),
        }
    }

    /// `φ_K(x) = sup_{0<t≤1} K(tx)/K(t)`. Exact for power weights; for the
    /// other kinds the supremum over [`PHI_SAMPLES`] log-spaced `t` values, a
    /// lower bound of the true supremum.
    pub fn phi(&self, x: f64) -> Result<f64> {
        self.phi_with_samples(x, PHI_SAMPLES)
    }

    pub fn phi_with_samples(&self, x: f64, samples: usize) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("phi_K needs x > 0, got {x}")));
        }
        if let WeightKind::Power { q } = self.kind {
            return Ok(x.powf(q));
        }
        let samples = samples.max(2);
        let lo = PHI_T_MIN.ln();
        let step = -lo / (samples - 1) as f64;
        let mut best: f64 = 0.0;
        for i in 0..samples {
            let t = (lo + step * i as f64).exp().min(1.0);
            let kt = self.eval(t);
            if kt > 0.0 {
                best = best.max(self.eval(t * x) / kt);
            }
        }
        Ok(best)
    }

    /// Checks monotonicity and positivity on a log grid `2^-40 .. 2^10`.
    pub fn validate(&self) -> Result<()> {
        let mut prev = 0.0;
        for i in 0..=2000 {
            let t = 2f64.powf(-40.0 + 50.0 * i as f64 / 2000.0);
            let k = self.eval(t);
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidWeight(format!("K({t}) = {k} is not positive")));
            }
            if k < prev * (1.0 - 1e-14) {
                return Err(Error::InvalidWeight(format!("K decreases near t = {t}")));
            }
            prev = k;
        }
        Ok(())
    }
}

impl fmt::Display for WeightFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Power { q } => write!(f, "power:q={q}"),
            WeightKind::PowerLog { q, beta } => write!(f, "powerlog:q={q},beta={beta}"),
            WeightKind::Tabulated { knots } => write!(f, "table[{} knots]", knots.len()),
        }
    }
}

fn power_log_raw(q: f64, beta: f64, t: f64) -> f64 {
    t.powf(q) * (std::f64::consts::E + 1.0 / t).ln().powf(beta)
}

/// Locates the interval where the raw PowerLog formula would decrease and
/// returns `(start, end, level)` for the constant piece of its running sup.
fn power_log_plateau(q: f64, beta: f64) -> Option<(f64, f64, f64)> {
    if beta <= 0.0 {
        return None;
    }
    // d log K / d log t = q - β / ((e t + 1) L(t)),  L(t) = log(e + 1/t)
    let u = |s: f64| {
        let t = s.exp();
        (std::f64::consts::E * t + 1.0) * (std::f64::consts::E + 1.0 / t).ln()
    };
    let threshold = beta / q;
    // u is unimodal in log t; golden-section search for its minimum
    let (mut a, mut b) = (-60.0f64, 40.0f64);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if u(c) < u(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let s_min = 0.5 * (a + b);
    if u(s_min) >= threshold {
        return None;
    }
    let bisect = |mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64| {
        // f(lo) and f(hi) have opposite signs
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let s_peak = bisect(-60.0, s_min, &|s| u(s) - threshold);
    let s_valley = bisect(s_min, 40.0, &|s| u(s) - threshold);
    let level = power_log_raw(q, beta, s_peak.exp());
    let s_end = bisect(s_valley, 60.0, &|s| power_log_raw(q, beta, s.exp()) - level);
    Some((s_peak.exp(), s_end.exp(), level))
}

fn tab_first_slope(knots: &[(f64, f64)]) -> f64 {
    if knots.len() < 2 {
        return 0.0;
    }
    (knots[1].1.ln() - knots[0].1.ln()) / (knots[1].0.ln() - knots[0].0.ln())
}

fn tab_eval(knots: &[(f64, f64)], t: f64) -> f64 {
    let (t0, k0) = knots[0];
    let (tn, kn) = knots[knots.len() - 1];
    if t >= tn {
        return kn;
    }
    if t <= t0 {
        return k0 * (t / t0).powf(tab_first_slope(knots));
    }
    let idx = knots.partition_point(|(tk, _)| *tk <= t);
    let (ta, ka) = knots[idx - 1];
    let (tb, kb) = knots[idx];
    let w = (t.ln() - ta.ln()) / (tb.ln() - ta.ln());
    (ka.ln() * (1.0 - w) + kb.ln() * w).exp()
}

fn parse_kv(s: &str, col0: usize) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let mut col = col0;
    for tok in s.split(',') {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(1, col, format!("expected key=value, found '{tok}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, col + k.len() + 1, format!("bad number '{v}'")))?;
        out.push((k.trim().to_string(), v));
        col += tok.len() + 1;
    }
    Ok(out)
}

fn require(kv: &[(String, f64)], key: &str, col: usize) -> Result<f64> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::parse(1, col, format!("missing key '{key}'")))
}

/// Outcome of checking the two integrability conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `∫_0^1 φ_K(x)/x dx` converged.
    pub holds_11: bool,
    /// Value of the first integral, `+∞` when it did not converge.
    pub value_11: f64,
    /// `∫_1^∞ φ_K(x)/x^{1+σ} dx` converged.
    pub holds_12: bool,
    pub value_12: f64,
    pub sigma: f64,
}

const CONDITION_PANELS: usize = 41;
const TAIL_PANELS: usize = 5;
const TAIL_REL: f64 = 1e-10;
// A panel sequence decaying slower than this per doubling is treated as divergent.
const MIN_DECAY: f64 = 1e-3;

/// Integrates both conditions over dyadic panels with a 32-point rule per panel.
pub fn check_conditions(w: &WeightFun, sigma: f64) -> Result<ConditionReport> {
    check_conditions_with(w, sigma, PHI_SAMPLES)
}

pub fn check_conditions_with(w: &WeightFun, sigma: f64, phi_samples: usize) -> Result<ConditionReport> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParams(format!("sigma = {sigma} must be positive")));
    }
    let rule = GaussLegendre::cached(32);
    let mut err = None;
    let mut phi = |x: f64| match w.phi_with_samples(x, phi_samples) {
        Ok(v) => v,
        Err(e) => {
            err = Some(e);
            0.0
        }
    };
    let mut near = Vec::with_capacity(CONDITION_PANELS);
    for j in 0..CONDITION_PANELS {
        let a = 2f64.powi(-(j as i32) - 1);
        let b = 2f64.powi(-(j as i32));
        near.push(rule.integrate(a, b, |x| phi(x) / x));
    }
    let mut far = Vec::with_capacity(CONDITION_PANELS);
    for j in 0..CONDITION_PANELS {
        let a = 2f64.powi(j as i32);
        let b = 2f64.powi(j as i32 + 1);
        far.push(rule.integrate(a, b, |x| phi(x) / x.powf(1.0 + sigma)));
    }
    if let Some(e) = err {
        return Err(e);
    }
    let (holds_11, value_11) = panel_sum(&near);
    let (holds_12, value_12) = panel_sum(&far);
    Ok(ConditionReport { holds_11, value_11, holds_12, value_12, sigma })
}

/// Sums dyadic panel contributions and decides convergence.
///
/// Converged when the last five contributions are each below `1e-10` of the
/// running total, or when they decay geometrically with ratio at most
/// `1 - 1e-3`; in the latter case the geometric tail is added.
fn panel_sum(c: &[f64]) -> (bool, f64) {
    let total: f64 = c.iter().sum();
    let tail = &c[c.len() - TAIL_PANELS..];
    if tail.iter().all(|v| *v < TAIL_REL * total) {
        return (true, total);
    }
    let ratios: Vec<f64> = c[c.len() - TAIL_PANELS - 1..]
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
        .collect();
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    if worst <= 1.0 - MIN_DECAY {
        let r = *ratios.last().unwrap();
        let extra = c[c.len() - 1] * r / (1.0 - r);
        (true, total + extra)
    } else {
        (false, f64::INFINITY)
    }
}

/// `(K(r)/K(t), (r/t)^σ)` for `0 < t <= r`.
pub fn doubling_ratio(w: &WeightFun, t: f64, r: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || t > r {
        return Err(Error::Domain(format!("doubling ratio needs 0 < t <= r, got t = {t}, r = {r}")));
    }
    Ok((w.eval(r) / w.eval(t), (r / t).powf(sigma)))
}
