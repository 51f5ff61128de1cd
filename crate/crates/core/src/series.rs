//! Truncated Taylor series on the disc, the Gamma-ratio fractional derivative,
//! its kernel-integral counterpart and the derivative decomposition used to
//! compare the two.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::discgeom::{DiscQuadrature, Ring};
use crate::error::{Error, Result};
use crate::special::{beta_shift_ratio, gamma, gamma_ratio, ln_gamma, ln_gamma_ratio};

/// Truncation degree used when none is given.
pub const DEFAULT_DEGREE: usize = 256;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Coefficients `a_0 … a_N` of `Σ a_j z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries {
    coeffs: Vec<Complex64>,
}

impl TruncSeries {
    /// An empty coefficient list is stored as the zero constant.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Domain(format!("coefficient {i} is not finite")));
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Ok(TruncSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        TruncSeries { coeffs: vec![ZERO; degree + 1] }
    }

    pub fn constant(c: Complex64) -> Self {
        TruncSeries { coeffs: vec![c] }
    }

    pub fn monomial(n: usize, degree: usize) -> Self {
        let mut s = Self::zero(degree.max(n));
        s.coeffs[n] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Keeps `a_0 … a_n`, padding with zeros if the series is shorter.
    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n + 1, ZERO);
        TruncSeries { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Horner evaluation for `|z| < 1`.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain(format!("|z| = {} is not inside the disc", z.norm())));
        }
        Ok(self.eval_unchecked(z))
    }

    /// Horner evaluation without the disc check (a polynomial is entire).
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    /// `f_r(z) = f(rz)`.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!("dilation radius {r} must lie in (0, 1]")));
        }
        let mut rk = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let c = a * rk;
                rk *= r;
                c
            })
            .collect();
        Ok(TruncSeries { coeffs })
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, a)| a * k as f64).collect();
        TruncSeries { coeffs }
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        if n >= self.coeffs.len() {
            return Self::zero(0);
        }
        let coeffs = (0..self.coeffs.len() - n)
            .map(|j| self.coeffs[j + n] * falling(j + n, n))
            .collect();
        TruncSeries { coeffs }
    }

    /// Antiderivative vanishing at the origin.
    pub fn integral(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, a)| a / (k as f64 + 1.0)));
        TruncSeries { coeffs }
    }

    /// Cauchy product truncated at `degree`.
    pub fn mul_trunc(&self, other: &Self, degree: usize) -> Self {
        let mut coeffs = vec![ZERO; degree + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(degree + 1) {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(degree + 1 - i) {
                coeffs[i + j] += a * b;
            }
        }
        TruncSeries { coeffs }
    }

    /// Values at every node of `q`; ring-structured rules use one FFT per ring.
    pub fn eval_on_quadrature(&self, q: &DiscQuadrature) -> Vec<Complex64> {
        if !q.has_rings() {
            return q.nodes.iter().map(|z| self.eval_unchecked(*z)).collect();
        }
        let mut out = vec![ZERO; q.len()];
        let mut planner = FftPlanner::new();
        for ring in &q.rings {
            let vals = self.eval_on_ring_with(ring, &mut planner);
            out[ring.start..ring.start + ring.count].copy_from_slice(&vals);
        }
        out
    }

    /// Values at `radius · e^{i(phase + 2πk/count)}` for `k < count`.
    pub fn eval_on_ring(&self, ring: &Ring) -> Vec<Complex64> {
        self.eval_on_ring_with(ring, &mut FftPlanner::new())
    }

    fn eval_on_ring_with(&self, ring: &Ring, planner: &mut FftPlanner<f64>) -> Vec<Complex64> {
        let n = ring.count;
        // fold a_k r^k e^{ik·phase} by k mod n; the ring values are then an
        // unnormalized inverse DFT of the folded coefficients
        let mut buf = vec![ZERO; n];
        let step = Complex64::from_polar(ring.radius, ring.phase);
        let mut pw = Complex64::new(1.0, 0.0);
        for (k, a) in self.coeffs.iter().enumerate() {
            buf[k % n] += a * pw;
            pw *= step;
            if k % 64 == 63 {
                // refresh to avoid drift in long products
                pw = Complex64::from_polar(ring.radius.powi(k as i32 + 1), ring.phase * (k + 1) as f64);
            }
        }
        planner.plan_fft_inverse(n).process(&mut buf);
        buf
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "series[deg {}]", self.degree())
    }
}

pub(crate) fn falling(top: usize, n: usize) -> f64 {
    ((top + 1 - n)..=top).map(|k| k as f64).product()
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TruncSeries { coeffs: (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect() }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        TruncSeries { coeffs: (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect() }
    }
}

impl Mul<Complex64> for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: Complex64) -> TruncSeries {
        self.scale(rhs)
    }
}

/// Order `t`, kernel parameter `b` and `m = ⌈t − 1⌉` of the fractional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams {
    pub t: f64,
    pub b: f64,
    pub m: usize,
}

impl FracParams {
    pub fn new(t: f64, b: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::UnsupportedOrder(t));
        }
        if !(b > 1.0) || !b.is_finite() {
            return Err(Error::InvalidParams(format!("kernel parameter b = {b} must exceed 1")));
        }
        if b + t <= 0.0 {
            return Err(Error::InvalidParams(format!("b + t = {} must be positive", b + t)));
        }
        Ok(FracParams { t, b, m: ceil_order(t - 1.0) })
    }

    /// Uses [`default_b`] for the given space exponents.
    pub fn with_default_b(t: f64, p: f64, s: f64) -> Result<Self> {
        Self::new(t, default_b(p, s, t))
    }
}

/// Smallest integer `>= x`, clamped at zero, robust to round-off just above an integer.
fn ceil_order(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-12 {
        r.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Smallest half-integer strictly above `max(2 + p + (s − 2)/p, 1, −t)`.
pub fn default_b(p: f64, s: f64, t: f64) -> f64 {
    let floor = (2.0 + p + (s - 2.0) / p).max(1.0).max(-t);
    (2.0 * floor).floor() / 2.0 + 0.5
}

/// `f^{(t)}` on coefficients:
/// `a_{j,t} = a_{j+m+1} Γ(j+b+t) Γ(j+m+2) / (Γ(j+1) Γ(j+m+1+b))`.
///
/// The result has degree `N − m − 1`, or is the zero constant when `N <= m`.
pub fn frac_deriv_coeff(f: &TruncSeries, fp: &FracParams) -> TruncSeries {
    let n = f.degree();
    let shift = fp.m + 1;
    if n < shift {
        return TruncSeries::zero(0);
    }
    let coeffs = (0..=n - shift)
        .map(|j| {
            let a = f.coeffs[j + shift];
            if a == ZERO {
                return ZERO;
            }
            let jf = j as f64;
            let mf = fp.m as f64;
            let lr = ln_gamma_ratio(jf + fp.b + fp.t, jf + mf + 1.0 + fp.b) + ln_gamma_ratio(jf + mf + 2.0, jf + 1.0);
            a * lr.exp()
        })
        .collect();
    TruncSeries { coeffs }
}

/// Coefficient of `z^{n−1−m}` in `(z^n)^{(t)}` as written for monomials:
/// `Γ(b+n+t−1−m) Γ(n+1) / (Γ(b+n) Γ(n−m))`, zero when `n < m + 1`.
pub fn monomial_frac_coeff(n: usize, fp: &FracParams) -> f64 {
    if n < fp.m + 1 {
        return 0.0;
    }
    let (nf, mf) = (n as f64, fp.m as f64);
    (ln_gamma(fp.b + nf + fp.t - 1.0 - mf) + ln_gamma(nf + 1.0) - ln_gamma(fp.b + nf) - ln_gamma(nf - mf)).exp()
}

/// Quadrature value of
/// `Γ(b+t)/Γ(b) ∫ (1−|w|²)^{b−1} (1−w̄z)^{−(b+t)} w̄^m f'(w) dA(w)`.
pub fn frac_deriv_integral_at(f: &TruncSeries, fp: &FracParams, z: Complex64, q: &DiscQuadrature) -> Result<Complex64> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("|z| = {} is not inside the disc", z.norm())));
    }
    let df = f.derivative().eval_on_quadrature(q);
    Ok(frac_integral_with_values(&df, fp, z, q))
}

/// Same as [`frac_deriv_integral_at`] with `f'` already tabulated at the nodes.
pub fn frac_integral_with_values(df: &[Complex64], fp: &FracParams, z: Complex64, q: &DiscQuadrature) -> Complex64 {
    let pre = gamma_ratio(fp.b + fp.t, fp.b);
    let one = Complex64::new(1.0, 0.0);
    let mut acc = ZERO;
    for ((w, wt), d) in q.nodes.iter().zip(&q.weights).zip(df) {
        let radial = (1.0 - w.norm_sqr()).powf(fp.b - 1.0);
        let kernel = (-(fp.b + fp.t) * (one - w.conj() * z).ln()).exp();
        acc += kernel * w.conj().powu(fp.m as u32) * d * (radial * wt);
    }
    acc * pre
}

/// The pieces of `f' = g + s_m + h'`:
/// `g = Σ_j β_j (j+m+1) a_{j+m+1} z^{j+m}` with `β_j = B(j+b+1, m)/B(j+1, m)`,
/// `s_m = Σ_{j=1}^m j a_j z^{j−1}` and `h = Σ_j (1 − β_j) a_{j+m+1} z^{j+m+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub g: TruncSeries,
    pub s_m: TruncSeries,
    pub h: TruncSeries,
}

impl Decomposition {
    /// Coefficientwise `max |f' − g − s_m − h'|`.
    pub fn residual(&self, f: &TruncSeries) -> f64 {
        let rhs = &(&self.g + &self.s_m) + &self.h.derivative();
        let diff = &f.derivative() - &rhs;
        diff.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `B(j+b+1, m) / B(j+1, m)`.
pub fn beta_ratio(j: usize, b: f64, m: usize) -> f64 {
    beta_shift_ratio(j as f64 + 1.0, b, m as f64)
}

pub fn decomposition(f: &TruncSeries, fp: &FracParams) -> Decomposition {
    let n = f.degree();
    let m = fp.m;
    let mut g = vec![ZERO; n.max(1)];
    let mut h = vec![ZERO; n + 1];
    for k in (m + 1)..=n {
        let j = k - m - 1;
        let beta = beta_ratio(j, fp.b, m);
        let a = f.coeffs[k];
        g[k - 1] = a * (beta * k as f64);
        h[k] = a * (1.0 - beta);
    }
    let mut s = vec![ZERO; m.max(1)];
    for j in 1..=m.min(n) {
        s[j - 1] = f.coeffs[j] * j as f64;
    }
    Decomposition { g: TruncSeries { coeffs: g }, s_m: TruncSeries { coeffs: s }, h: TruncSeries { coeffs: h } }
}

/// Lacunary series `Σ_k 2^{−kβ} z^{ratio^k}`, `k = 0..=kmax`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSpec {
    pub beta: f64,
    pub ratio: usize,
    pub kmax: usize,
}

impl GapSpec {
    pub fn new(beta: f64, ratio: usize, kmax: usize) -> Result<Self> {
        if ratio < 2 {
            return Err(Error::InvalidParams(format!("gap ratio {ratio} must be at least 2")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParams("gap amplitude exponent must be finite".into()));
        }
        Ok(GapSpec { beta, ratio, kmax })
    }

    /// `(n_k, a_k)` for every term, regardless of truncation.
    pub fn terms(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::new();
        let mut n: usize = 1;
        for k in 0..=self.kmax {
            out.push((n, 2f64.powf(-(k as f64) * self.beta)));
            match n.checked_mul(self.ratio) {
                Some(next) => n = next,
                None => break,
            }
        }
        out
    }
}

/// Families of test functions.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Gap(GapSpec),
    /// `(1 − z)^{−γ}` with `a_n = Γ(n+γ)/(Γ(γ) n!)`.
    PowerSingular { gamma: f64 },
    Polynomial(Vec<Complex64>),
    Monomial(usize),
}

/// Truncated coefficients `a_0 … a_N` of the requested family.
pub fn make_test_function(spec: &TestFunction, n: usize) -> Result<TruncSeries> {
    if n < 1 {
        return Err(Error::InvalidParams("truncation degree must be at least 1".into()));
    }
    match spec {
        TestFunction::Gap(g) => {
            let mut s = TruncSeries::zero(n);
            for (idx, a) in g.terms() {
                if idx <= n {
                    s.coeffs[idx] += Complex64::new(a, 0.0);
                }
            }
            Ok(s)
        }
        TestFunction::PowerSingular { gamma: g } => {
            if !(*g > 0.0) {
                return Err(Error::InvalidParams(format!("singularity exponent {g} must be positive")));
            }
            let inv = 1.0 / gamma(*g);
            let coeffs = (0..=n)
                .map(|k| Complex64::new(gamma_ratio(k as f64 + g, k as f64 + 1.0) * inv, 0.0))
                .collect();
            Ok(TruncSeries { coeffs })
        }
        TestFunction::Polynomial(c) => Ok(TruncSeries::new(c.clone())?.truncate(n)),
        TestFunction::Monomial(k) => Ok(TruncSeries::monomial(*k, n).truncate(n)),
    }
}

impl TestFunction {
    /// Parses `gap:beta=..,ratio=..,kmax=..`, `powsing:gamma=..`, `mono:n=..`
    /// or `poly:c0,c1,…`; `poly` entries may be complex, written `re+imi`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (head, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::parse(1, 1, format!("function spec '{spec}' lacks a ':'")))?;
        let col = head.len() + 2;
        match head {
            "gap" => {
                let kv = key_values(rest, col)?;
                let beta = lookup(&kv, "beta", col)?;
                let ratio = lookup(&kv, "ratio", col)?;
                let kmax = lookup(&kv, "kmax", col)?;
                if ratio.fract() != 0.0 || kmax.fract() != 0.0 || kmax < 0.0 {
                    return Err(Error::parse(1, col, "ratio and kmax must be nonnegative integers"));
                }
                Ok(TestFunction::Gap(GapSpec::new(beta, ratio as usize, kmax as usize)?))
            }
            "powsing" => {
                let kv = key_values(rest, col)?;
                let g = lookup(&kv, "gamma", col)?;
                if !(g > 0.0) {
                    return Err(Error::parse(1, col, format!("gamma = {g} must be positive")));
                }
                Ok(TestFunction::PowerSingular { gamma: g })
            }
            "mono" => {
                let kv = key_values(rest, col)?;
                let n = lookup(&kv, "n", col)?;
                if n.fract() != 0.0 || n < 0.0 {
                    return Err(Error::parse(1, col, "monomial degree must be a nonnegative integer"));
                }
                Ok(TestFunction::Monomial(n as usize))
            }
            "poly" => {
                let mut coeffs = Vec::new();
                let mut c = col;
                for tok in rest.split(',') {
                    coeffs.push(parse_complex(tok).ok_or_else(|| Error::parse(1, c, format!("bad coefficient '{tok}'")))?);
                    c += tok.len() + 1;
                }
                Ok(TestFunction::Polynomial(coeffs))
            }
            other => Err(Error::parse(1, 1, format!("unknown function family '{other}'"))),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Gap(g) => write!(f, "gap:beta={},ratio={},kmax={}", g.beta, g.ratio, g.kmax),
            TestFunction::PowerSingular { gamma } => write!(f, "powsing:gamma={gamma}"),
            TestFunction::Monomial(n) => write!(f, "mono:n={n}"),
            TestFunction::Polynomial(c) => {
                write!(f, "poly:")?;
                for (i, z) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    if z.im == 0.0 {
                        write!(f, "{}", z.re)?;
                    } else {
                        write!(f, "{}{:+}i", z.re, z.im)?;
                    }
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn parse_complex(tok: &str) -> Option<Complex64> {
    let tok = tok.trim();
    if let Ok(x) = tok.parse::<f64>() {
        return Some(Complex64::new(x, 0.0));
    }
    let body = tok.strip_suffix('i')?;
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    let re = body[..split].parse().ok()?;
    let im_txt = &body[split..];
    let im = match im_txt {
        "+" => 1.0,
        "-" => -1.0,
        t => t.parse().ok()?,
    };
    Some(Complex64::new(re, im))
}

pub(crate) fn key_values(s: &str, col0: usize) -> Result<Vec<(String, f64)>> {
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

pub(crate) fn lookup(kv: &[(String, f64)], key: &str, col: usize) -> Result<f64> {
    kv.iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::parse(1, col, format!("missing key '{key}'")))
}

/// Anything that can produce its Taylor series at a requested truncation.
pub trait SeriesSource {
    fn series(&self, degree: usize) -> Result<TruncSeries>;
    fn label(&self) -> String;
}

impl SeriesSource for TestFunction {
    fn series(&self, degree: usize) -> Result<TruncSeries> {
        make_test_function(self, degree)
    }
    fn label(&self) -> String {
        self.to_string()
    }
}

impl SeriesSource for TruncSeries {
    fn series(&self, degree: usize) -> Result<TruncSeries> {
        Ok(self.truncate(degree.min(self.degree())))
    }
    fn label(&self) -> String {
        self.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discgeom::disc_quadrature;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eval_examples() {
        let f = TruncSeries::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(f.eval(c(0.5)).unwrap(), c(1.5));
        assert!(f.eval(c(1.0)).is_err());
        let geo = make_test_function(&TestFunction::PowerSingular { gamma: 1.0 }, 60).unwrap();
        // tail of the geometric series beyond degree 60 at z = 1/2 is 2^{-60}
        assert!((geo.eval(c(0.5)).unwrap() - c(2.0)).norm() < 1e-17 + 2f64.powi(-59));
    }

    #[test]
    fn dilate_examples() {
        let f = TruncSeries::from_real(&[0.0, 1.0]).unwrap();
        assert_eq!(f.dilate(0.5).unwrap(), TruncSeries::from_real(&[0.0, 0.5]).unwrap());
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn integer_order_is_ordinary_derivative() {
        let f = TruncSeries::from_real(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let fp = FracParams::new(1.0, 2.0).unwrap();
        assert_eq!(fp.m, 0);
        let d = frac_deriv_coeff(&f, &fp);
        for (a, b) in d.coeffs().iter().zip(f.derivative().coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn half_order_on_cube() {
        let f = TruncSeries::monomial(3, 3);
        let fp = FracParams::new(0.5, 2.0).unwrap();
        let d = frac_deriv_coeff(&f, &fp);
        // Γ(4.5)Γ(4)/(Γ(5)Γ(3)) = Γ(4.5)/8
        let want = gamma(4.5) / 8.0;
        assert_eq!(d.degree(), 2);
        assert!((d.coeff(2).re - want).abs() / want < 1e-13);
    }

    #[test]
    fn low_monomials_vanish() {
        let fp = FracParams::new(2.5, 3.0).unwrap();
        assert_eq!(fp.m, 2);
        let d = frac_deriv_coeff(&TruncSeries::monomial(2, 2), &fp);
        assert!(d.is_zero());
        assert_eq!(monomial_frac_coeff(2, &fp), 0.0);
    }

    #[test]
    fn order_must_be_positive() {
        assert!(matches!(FracParams::new(0.0, 2.0), Err(Error::UnsupportedOrder(_))));
        assert!(FracParams::new(1.0, 1.0).is_err());
    }

    #[test]
    fn default_b_is_half_integer_above_bound() {
        // p = 2, s = 0.5: 2 + 2 - 0.75 = 3.25 -> 3.5
        assert_eq!(default_b(2.0, 0.5, 3.0), 3.5);
        // exact half-integer bound moves to the next one
        assert_eq!(default_b(2.0, 1.0, 3.0), 4.0);
    }

    #[test]
    fn bergman_reproducing_case() {
        let f = TruncSeries::from_real(&[0.3, -1.0, 0.5, 2.0, -0.25]).unwrap();
        let fp = FracParams::new(1.0, 3.0).unwrap();
        let q = disc_quadrature(8, 128).unwrap();
        let z = c(0.3);
        let got = frac_deriv_integral_at(&f, &fp, z, &q).unwrap();
        let want = f.derivative().eval(z).unwrap();
        assert!((got - want).norm() < 1e-6, "{got} vs {want}");
        let konst = TruncSeries::constant(c(2.0));
        assert!(frac_deriv_integral_at(&konst, &fp, z, &q).unwrap().norm() < 1e-15);
    }

    #[test]
    fn decomposition_cases() {
        let f = TruncSeries::from_real(&[1.0, -2.0, 0.5, 3.0, 1.0, -1.5, 0.25]).unwrap();
        let d0 = decomposition(&f, &FracParams::new(0.7, 2.0).unwrap());
        assert!(d0.s_m.is_zero() && d0.h.is_zero());
        assert!((&d0.g - &f.derivative()).coeffs().iter().all(|c| c.norm() < 1e-15));
        let d2 = decomposition(&f, &FracParams::new(2.5, 4.0).unwrap());
        assert!(d2.residual(&f) < 1e-12);
        // z^4 with m = 1, b = 3: β_2 = B(6,1)/B(3,1) = 3/6
        let d = decomposition(&TruncSeries::monomial(4, 4), &FracParams::new(1.5, 3.0).unwrap());
        assert!((d.g.coeff(3).re - 0.5 * 4.0).abs() < 1e-13);
        assert!((d.h.coeff(4).re - 0.5).abs() < 1e-13);
    }

    #[test]
    fn test_function_families() {
        let m = make_test_function(&TestFunction::Monomial(3), 8).unwrap();
        assert_eq!(m.degree(), 8);
        assert_eq!(m.coeff(3), c(1.0));
        let g = make_test_function(&TestFunction::Gap(GapSpec::new(0.5, 2, 6).unwrap()), 64).unwrap();
        let nz: Vec<usize> = (0..=64).filter(|&k| g.coeff(k).norm() > 0.0).collect();
        assert_eq!(nz, vec![1, 2, 4, 8, 16, 32, 64]);
        let p = make_test_function(&TestFunction::PowerSingular { gamma: 1.0 }, 10).unwrap();
        assert!(p.coeffs().iter().all(|a| (a - c(1.0)).norm() < 1e-13));
    }

    #[test]
    fn parse_function_specs() {
        assert_eq!(
            TestFunction::parse("gap:beta=0.5,ratio=2,kmax=8").unwrap(),
            TestFunction::Gap(GapSpec { beta: 0.5, ratio: 2, kmax: 8 })
        );
        assert_eq!(TestFunction::parse("powsing:gamma=0.8").unwrap(), TestFunction::PowerSingular { gamma: 0.8 });
        assert_eq!(TestFunction::parse("mono:n=5").unwrap(), TestFunction::Monomial(5));
        assert_eq!(
            TestFunction::parse("poly:1,0,2-0.5i").unwrap(),
            TestFunction::Polynomial(vec![c(1.0), c(0.0), Complex64::new(2.0, -0.5)])
        );
        match TestFunction::parse("gap:beta=x,ratio=2,kmax=8") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ring_fft_matches_horner() {
        let f = make_test_function(&TestFunction::PowerSingular { gamma: 0.7 }, 300).unwrap();
        let q = crate::discgeom::graded_quadrature(4, 64, 4).unwrap();
        let vals = f.eval_on_quadrature(&q);
        for (z, v) in q.nodes.iter().zip(&vals) {
            let h = f.eval_unchecked(*z);
            assert!((h - v).norm() <= 1e-11 * (1.0 + h.norm()), "{z}: {h} vs {v}");
        }
    }
}
