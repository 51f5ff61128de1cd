//! Batch front end. Each subcommand writes one tidy CSV table (and a JSON
//! side file under `--out`). Exit status: 0 when every assertion passes,
//! 2 when one fails, 1 on a configuration error.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discgeom::graded_quadrature;
use crate::error::{Error, Result};
use crate::measures::{
    besov_density_values, besov_norm, grid_carleson, kernel_sweep, qk_norm, Density, KernelTerm, SpaceParams,
};
use crate::odesolve::{run_ode_check, MVariant, SystemSpec, Theorem, DEFAULT_SMALLNESS};
use crate::series::{frac_deriv_coeff, frac_integral_with_values, parse_complex, FracParams, GapSpec, SeriesSource, TestFunction};
use crate::theoremlab::{
    default_order, verify_cor23, verify_cor29, verify_gap_norm, verify_lemma25, verify_lemma28, verify_thm21,
    ComparabilityReport, InForm, LabOptions, OperatorGrids, RefinedValue, Refinement, Resolution, DEFAULT_SLACK,
};
use crate::weights::{check_conditions, WeightFun};
use config::Params;
use output::{fmt_bool, fmt_num, Output, Table};

pub const MAX_QUAD_DEPTH: usize = 12;
pub const MAX_QUAD_ANGLES: usize = 4096;
pub const MAX_SUP_DEPTH: usize = 10;
/// Refinement level used when no grid flag is given.
pub const DEFAULT_CLI_LEVEL: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "holoform", version, about = "Besov-Morrey norms, K-Carleson constants and fractional derivatives on the unit disc")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Space parameters, e.g. `p=2,s=0.5,sigma=0.4,K=power:q=0.3`.
    #[arg(long, global = true, default_value = "p=2,s=0.5,sigma=0.4,K=power:q=0.3")]
    pub space: String,
    /// Refinement level of the fine grid; the coarse grid is one level below.
    #[arg(long, global = true, default_value_t = DEFAULT_CLI_LEVEL)]
    pub level: usize,
    /// Boundary panels J of the fine disc grid.
    #[arg(long, global = true)]
    pub quad_depth: Option<usize>,
    /// Angles per ring M of the fine disc grid.
    #[arg(long, global = true)]
    pub quad_angles: Option<usize>,
    #[arg(long, global = true)]
    pub sup_depth: Option<usize>,
    #[arg(long, global = true)]
    pub sup_rotations: Option<usize>,
    #[arg(long, global = true, default_value_t = DEFAULT_SLACK)]
    pub slack: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for `<command>.csv` and `<command>.json`; CSV goes to stdout otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Proof)]
    pub m_variant: VariantArg,
    /// Accept the smaller order bound `max{0, (1−s)/2, (σ−s)/2}` when p = 2.
    #[arg(long, global = true)]
    pub relaxed_t: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Statement,
    Proof,
}

impl From<VariantArg> for MVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Statement => MVariant::Statement,
            VariantArg::Proof => MVariant::Proof,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Integrability conditions of a weight.
    Weights {
        /// Weight spec; defaults to the weight of `--space`.
        #[arg(long)]
        weight: Option<String>,
        /// Comma list of σ values; defaults to σ of `--space`.
        #[arg(long)]
        sigma: Option<String>,
    },
    /// Fractional derivative coefficients, or coefficient vs integral form at points.
    Fracderiv {
        #[arg(long)]
        f: String,
        /// Comma list of orders.
        #[arg(long, default_value = "0.5,1")]
        t: String,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 32)]
        degree: usize,
        /// Comma list of points `re` or `re+imi`.
        #[arg(long)]
        points: Option<String>,
    },
    /// Besov, box, Besov-Morrey and Q_K norms.
    Norm {
        /// Function spec; repeatable.
        #[arg(long, required = true)]
        f: Vec<String>,
    },
    /// Per-arc Carleson ratios of a density.
    Carleson {
        /// Uses the density `|f'|^p (1−|z|²)^{p−2+s}`.
        #[arg(long)]
        f: Option<String>,
        /// `const:c=<c>` or `radial:gamma=<γ>` for `(1−|z|²)^γ`.
        #[arg(long)]
        density: Option<String>,
    },
    /// Numerical checks of the comparability results.
    Verify {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Parameter file, or inline `key=value;key=value`.
        #[arg(long)]
        params: Option<String>,
    },
    /// Coefficient constants and membership of solutions of a linear ODE.
    Ode {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum)]
        theorem: OdeTheoremArg,
        #[arg(long, default_value_t = DEFAULT_SMALLNESS)]
        threshold: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    #[value(name = "21")]
    T21,
    #[value(name = "23")]
    T23,
    #[value(name = "29")]
    T29,
    #[value(name = "25")]
    T25,
    #[value(name = "28")]
    T28,
    #[value(name = "gap")]
    Gap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OdeTheoremArg {
    #[value(name = "31")]
    T31,
    #[value(name = "32")]
    T32,
}

impl Common {
    pub fn space(&self) -> Result<SpaceParams> {
        SpaceParams::parse(&self.space)
    }

    /// Fine resolution with the grid flags applied, checked against the depth bounds.
    pub fn resolution(&self) -> Result<Resolution> {
        let mut r = Resolution::level(self.level.max(1));
        if let Some(j) = self.quad_depth {
            r.quad_depth = j;
        }
        if let Some(m) = self.quad_angles {
            r.quad_angles = m;
        }
        if let Some(d) = self.sup_depth {
            r.sup_depth = d;
            r.arc_depth = d;
        }
        if let Some(k) = self.sup_rotations {
            r.sup_rotations = k;
        }
        if !(2..=MAX_QUAD_DEPTH).contains(&r.quad_depth) {
            return Err(Error::InvalidParams(format!("quad depth {} outside 2..={MAX_QUAD_DEPTH}", r.quad_depth)));
        }
        if !(16..=MAX_QUAD_ANGLES).contains(&r.quad_angles) {
            return Err(Error::InvalidParams(format!("quad angles {} outside 16..={MAX_QUAD_ANGLES}", r.quad_angles)));
        }
        if !(2..=MAX_SUP_DEPTH).contains(&r.sup_depth) {
            return Err(Error::InvalidParams(format!("sup depth {} outside 2..={MAX_SUP_DEPTH}", r.sup_depth)));
        }
        if r.sup_rotations == 0 {
            return Err(Error::InvalidParams("sup rotations must be positive".into()));
        }
        if !(self.slack >= 1.0) {
            return Err(Error::InvalidParams(format!("slack {} must be at least 1", self.slack)));
        }
        Ok(r)
    }

    pub fn refinement(&self) -> Result<Refinement> {
        Refinement::new(self.resolution()?)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn float_list(s: &str, what: &str) -> Result<Vec<f64>> {
    let mut col = 1;
    s.split(',')
        .map(|t| {
            let v = t.trim().parse::<f64>().map_err(|_| Error::parse(1, col, format!("bad {what} '{}'", t.trim())));
            col += t.len() + 1;
            v
        })
        .collect()
}

/// Parses the arguments and runs the command without writing anything.
pub fn execute<I, T>(args: I) -> Result<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParams(e.to_string()))?;
    run_command(&cli)
}

pub fn run_command(cli: &Cli) -> Result<Output> {
    let c = &cli.common;
    match &cli.command {
        Command::Weights { weight, sigma } => cmd_weights(c, weight.as_deref(), sigma.as_deref()),
        Command::Fracderiv { f, t, b, degree, points } => cmd_fracderiv(c, f, t, *b, *degree, points.as_deref()),
        Command::Norm { f } => cmd_norm(c, f),
        Command::Carleson { f, density } => cmd_carleson(c, f.as_deref(), density.as_deref()),
        Command::Verify { theorem, params } => cmd_verify(c, *theorem, params.as_deref()),
        Command::Ode { system, theorem, threshold } => cmd_ode(c, system, *theorem, *threshold),
    }
}

/// Full run: parse, compute, emit; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = run_command(&cli).and_then(|o| {
        o.emit(cli.common.out.as_deref(), cli.common.seed)?;
        Ok(o)
    });
    match result {
        Ok(o) if o.all_pass => 0,
        Ok(o) => {
            eprintln!("{}: one or more checks failed", o.name);
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn cmd_weights(c: &Common, weight: Option<&str>, sigma: Option<&str>) -> Result<Output> {
    let (w, sigmas) = match (weight, sigma) {
        (Some(ws), Some(ss)) => (WeightFun::parse(ws)?, float_list(ss, "sigma")?),
        (Some(ws), None) => (WeightFun::parse(ws)?, vec![c.space()?.sigma]),
        (None, s) => {
            let sp = c.space()?;
            let sig = match s {
                Some(ss) => float_list(ss, "sigma")?,
                None => vec![sp.sigma],
            };
            (sp.weight, sig)
        }
    };
    let mut t = Table::new(&["weight", "sigma", "holds_11", "value_11", "holds_12", "value_12"]);
    let mut reps = Vec::new();
    for s in sigmas {
        let r = check_conditions(&w, s)?;
        t.push(vec![w.to_string(), fmt_num(s), fmt_bool(r.holds_11), fmt_num(r.value_11), fmt_bool(r.holds_12), fmt_num(r.value_12)]);
        reps.push(r);
    }
    Output::new("weights", t).with_json(&reps)
}

fn cmd_fracderiv(c: &Common, f: &str, t: &str, b: Option<f64>, degree: usize, points: Option<&str>) -> Result<Output> {
    let func = TestFunction::parse(f)?;
    let series = func.series(degree)?;
    let sp = c.space()?;
    let orders = float_list(t, "order")?;
    let params = orders
        .iter()
        .map(|&t| FracParams::new(t, b.unwrap_or_else(|| crate::series::default_b(sp.p, sp.s, t))))
        .collect::<Result<Vec<_>>>()?;
    match points {
        None => {
            let mut tab = Table::new(&["t", "b", "n", "re", "im"]);
            for fp in &params {
                let g = frac_deriv_coeff(&series, fp);
                for (n, z) in g.coeffs().iter().enumerate() {
                    tab.push(vec![fmt_num(fp.t), fmt_num(fp.b), n.to_string(), fmt_num(z.re), fmt_num(z.im)]);
                }
            }
            Ok(Output::new("fracderiv", tab))
        }
        Some(pts) => {
            let zs = pts
                .split(',')
                .map(|p| parse_complex(p).ok_or_else(|| Error::parse(1, 1, format!("bad point '{}'", p.trim()))))
                .collect::<Result<Vec<Complex64>>>()?;
            if let Some(z) = zs.iter().find(|z| z.norm() >= 1.0) {
                return Err(Error::Domain(format!("point {z} is not inside the disc")));
            }
            let res = c.resolution()?;
            let q = graded_quadrature(res.quad_depth, res.quad_angles, res.radial_order)?;
            let df = series.derivative().eval_on_quadrature(&q);
            let mut tab = Table::new(&["t", "b", "z_re", "z_im", "coeff_re", "coeff_im", "integral_re", "integral_im", "abs_diff"]);
            for fp in &params {
                let g = frac_deriv_coeff(&series, fp);
                for z in &zs {
                    let a = g.eval_unchecked(*z);
                    let i = frac_integral_with_values(&df, fp, *z, &q);
                    tab.push(vec![
                        fmt_num(fp.t),
                        fmt_num(fp.b),
                        fmt_num(z.re),
                        fmt_num(z.im),
                        fmt_num(a.re),
                        fmt_num(a.im),
                        fmt_num(i.re),
                        fmt_num(i.im),
                        fmt_num((a - i).norm()),
                    ]);
                }
            }
            Ok(Output::new("fracderiv", tab))
        }
    }
}

#[derive(Debug, Serialize)]
struct NormRow {
    function: String,
    quantity: &'static str,
    value: RefinedValue,
}

fn cmd_norm(c: &Common, specs: &[String]) -> Result<Output> {
    let sp = c.space()?;
    let r = c.refinement()?;
    let funcs = specs.iter().map(|s| TestFunction::parse(s)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for func in &funcs {
        let mut vals = [[0.0; 4]; 2];
        for (k, ws) in r.workspaces().into_iter().enumerate() {
            let f = func.series(ws.res.degree)?;
            let q = &ws.quad;
            let mu = besov_density_values(&f, &sp, q);
            let boxes = grid_carleson(q, &mu, &sp.weight, &ws.arcs)?.sup_value;
            let morrey = kernel_sweep(q, &ws.samples.points, &sp.weight, &[KernelTerm { values: &mu, a_power: 2.0 * sp.s, denom_power: 2.0 * sp.s }])[0].sup;
            vals[k] = [
                besov_norm(&f, &sp, q),
                boxes,
                (f.coeff(0).norm().powf(sp.p) + morrey).powf(1.0 / sp.p),
                qk_norm(&f, &sp.weight, &ws.samples, q),
            ];
        }
        for (i, name) in ["besov_norm", "box_sup", "besov_morrey_norm", "qk_norm"].into_iter().enumerate() {
            rows.push(NormRow { function: func.to_string(), quantity: name, value: RefinedValue::new(vals[0][i], vals[1][i]) });
        }
    }
    let mut t = Table::new(&["function", "quantity", "value", "refinement_delta", "finite"]);
    for row in &rows {
        t.push(vec![row.function.clone(), row.quantity.into(), fmt_num(row.value.fine), fmt_num(row.value.delta), fmt_bool(row.value.finite)]);
    }
    Output::new("norm", t).with_json(&rows)
}

fn parse_density(spec: &str) -> Result<Density> {
    let (head, rest) = spec.split_once(':').ok_or_else(|| Error::parse(1, 1, format!("density spec '{spec}' lacks a ':'")))?;
    let col = head.len() + 2;
    let kv = crate::series::key_values(rest, col)?;
    match head {
        "const" => {
            let c = crate::series::lookup(&kv, "c", col)?;
            if !(c >= 0.0) {
                return Err(Error::parse(1, col, "density must be nonnegative"));
            }
            Ok(Density::constant(c))
        }
        "radial" => Ok(Density::radial_power(crate::series::lookup(&kv, "gamma", col)?)),
        other => Err(Error::parse(1, 1, format!("unknown density family '{other}' (const|radial)"))),
    }
}

fn cmd_carleson(c: &Common, f: Option<&str>, density: Option<&str>) -> Result<Output> {
    let sp = c.space()?;
    let r = c.refinement()?;
    let source: Box<dyn Fn(&crate::theoremlab::Workspace) -> Result<Vec<f64>>> = match (f, density) {
        (Some(spec), None) => {
            let func = TestFunction::parse(spec)?;
            let sp = sp.clone();
            Box::new(move |ws| Ok(besov_density_values(&func.series(ws.res.degree)?, &sp, &ws.quad)))
        }
        (None, Some(spec)) => {
            let d = parse_density(spec)?;
            Box::new(move |ws| Ok(ws.quad.nodes.iter().map(|z| d.eval(*z)).collect()))
        }
        _ => return Err(Error::InvalidParams("give exactly one of --f and --density".into())),
    };
    let coarse = grid_carleson(&r.coarse.quad, &source(&r.coarse)?, &sp.weight, &r.coarse.arcs)?;
    let fine = grid_carleson(&r.fine.quad, &source(&r.fine)?, &sp.weight, &r.fine.arcs)?;
    let delta = RefinedValue::new(coarse.sup_value, fine.sup_value).delta;
    let mut t = Table::new(&["theta0", "len", "ratio"]);
    for (th, len, ratio) in fine.rows() {
        t.push(vec![fmt_num(th), fmt_num(len), fmt_num(ratio)]);
    }
    Output::new("carleson", t).with_json(&fine.summary(Some(delta)))
}

fn report_table(reps: &[ComparabilityReport]) -> Table {
    let mut t = Table::new(&["label", "left", "right", "ratio", "slack", "refinement_delta", "verdict", "pass"]);
    for r in reps {
        t.push(vec![
            r.label.clone(),
            fmt_num(r.left),
            fmt_num(r.right),
            fmt_num(r.ratio),
            fmt_num(r.slack),
            fmt_num(r.refinement_delta),
            serde_json::to_value(r.verdict).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            fmt_bool(r.pass),
        ]);
    }
    t
}

/// An error row that keeps the run going.
fn error_report(label: String, e: &Error, slack: f64) -> ComparabilityReport {
    let mut r = ComparabilityReport::exact_bound(format!("{label} error: {e}"), f64::NAN, f64::NAN, slack);
    r.pass = false;
    r
}

fn functions(p: &Params, default: &str) -> Result<Vec<TestFunction>> {
    let fs = p.map_each("f", TestFunction::parse)?;
    if fs.is_empty() {
        Ok(vec![TestFunction::parse(default)?])
    } else {
        Ok(fs)
    }
}

/// Input profiles for the operator check, by name.
pub fn profile(name: &str) -> Option<fn(Complex64) -> Complex64> {
    Some(match name {
        "one" => |_| Complex64::new(1.0, 0.0),
        "abs" => |w: Complex64| Complex64::new(w.norm(), 0.0),
        "radial" => |w: Complex64| Complex64::new((1.0 - w.norm_sqr()).powf(-0.2), 0.0),
        "re2" => |w: Complex64| Complex64::new(w.re * w.re, 0.0),
        "boundary" => |w: Complex64| Complex64::new((Complex64::new(1.0, 0.0) - w).norm().powf(-0.2), 0.0),
        _ => return None,
    })
}

pub const PROFILES: [&str; 5] = ["one", "abs", "radial", "re2", "boundary"];

/// `n` pairs `t <= r` with `ln t, ln r` uniform in `[ln 10⁻⁶, 0]`.
pub fn random_pairs<R: Rng>(rng: &mut R, n: usize) -> Vec<(f64, f64)> {
    let lo = 1e-6f64.ln();
    (0..n)
        .map(|_| {
            let a = rng.gen_range(lo..=0.0f64).exp();
            let b = rng.gen_range(lo..=0.0f64).exp();
            (a.min(b), a.max(b))
        })
        .collect()
}

/// The nine `(β, p, q)` combinations of the default gap-norm grid.
pub fn default_gap_grid() -> Vec<(f64, f64, f64)> {
    let mut v = Vec::new();
    for beta in [0.6, 0.8, 1.0] {
        for (p, q) in [(2.0, 0.5), (1.5, 0.3), (3.0, 1.0)] {
            v.push((beta, p, q));
        }
    }
    v
}

fn cmd_verify(c: &Common, theorem: TheoremArg, params: Option<&str>) -> Result<Output> {
    let p = match params {
        Some(a) => Params::load(a)?,
        None => Params::default(),
    };
    let sp = c.space()?;
    let slack = c.slack;
    let opts = LabOptions { slack, relaxed_t: c.relaxed_t, in_form: InForm::Proof };
    let mut reps = Vec::new();
    match theorem {
        TheoremArg::T21 => {
            p.check_keys(&["f", "t", "b"])?;
            let ts = p.floats("t")?.unwrap_or_else(|| vec![default_order(&sp)]);
            let b = p.float("b")?;
            let r = c.refinement()?;
            for f in functions(&p, "gap:beta=0.8,ratio=2,kmax=8")? {
                match verify_thm21(&f, &sp, &ts, b, &r, &opts) {
                    Ok(v) => reps.extend(v),
                    Err(e @ (Error::Domain(_) | Error::Singular(_))) => reps.push(error_report(f.to_string(), &e, slack)),
                    Err(e) => return Err(e),
                }
            }
        }
        TheoremArg::T23 => {
            p.check_keys(&["f", "s2", "b"])?;
            let s2 = p.float("s2")?.unwrap_or(0.7);
            let b = p.float("b")?;
            let r = c.refinement()?;
            for f in functions(&p, "gap:beta=0.8,ratio=2,kmax=8")? {
                reps.push(verify_cor23(&f, &sp, s2, b, &r, &opts)?);
            }
        }
        TheoremArg::T29 => {
            p.check_keys(&["f", "n", "form"])?;
            let ns = p.uints("n")?.unwrap_or_else(|| vec![1, 2]);
            let form = match p.get("form") {
                None => InForm::Proof,
                Some((_, _, "proof")) => InForm::Proof,
                Some((_, _, "literal")) => InForm::Literal,
                Some((line, col, v)) => return Err(Error::parse(line, col, format!("form '{v}' is not proof|literal"))),
            };
            let opts = LabOptions { in_form: form, ..opts };
            let r = c.refinement()?;
            for f in functions(&p, "gap:beta=0.8,ratio=2,kmax=8")? {
                for &n in &ns {
                    reps.push(verify_cor29(&f, n, &sp, &r, &opts)?);
                }
            }
        }
        TheoremArg::T25 => {
            p.check_keys(&["pairs", "random"])?;
            let mut pairs = p.pairs("pairs")?.unwrap_or_default();
            let random = p.uints("random")?.map(|v| v[0]).unwrap_or(if pairs.is_empty() { 1000 } else { 0 });
            pairs.extend(random_pairs(&mut c.rng(), random));
            reps = verify_lemma25(&sp.weight, sp.sigma, &pairs)?;
        }
        TheoremArg::T28 => {
            p.check_keys(&["alpha", "b", "profile"])?;
            let alpha = p.float("alpha")?.unwrap_or(3.0);
            let b = p.float("b")?.unwrap_or(4.0);
            let names: Vec<String> = match p.get("profile") {
                Some((line, col, v)) => {
                    let names: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
                    if let Some(bad) = names.iter().find(|n| profile(n).is_none()) {
                        return Err(Error::parse(line, col, format!("unknown profile '{bad}' (one of {})", PROFILES.join(", "))));
                    }
                    names
                }
                None => PROFILES.iter().map(|s| s.to_string()).collect(),
            };
            let grids = OperatorGrids::coarse()?;
            for n in names {
                let prof = profile(&n).expect("checked");
                reps.push(verify_lemma28(&n, &prof, alpha, b, &sp, &grids, slack)?);
            }
        }
        TheoremArg::Gap => {
            p.check_keys(&["beta", "pq", "ratio", "kmax"])?;
            let ratio = p.uints("ratio")?.map(|v| v[0]).unwrap_or(2);
            let kmax = p.uints("kmax")?.map(|v| v[0]).unwrap_or(8);
            let grid = match (p.floats("beta")?, p.pairs("pq")?) {
                (None, None) => default_gap_grid(),
                (betas, pq) => {
                    let betas = betas.unwrap_or_else(|| vec![0.6, 0.8, 1.0]);
                    let pq = pq.unwrap_or_else(|| vec![(2.0, 0.5), (1.5, 0.3), (3.0, 1.0)]);
                    betas.iter().flat_map(|b| pq.iter().map(move |(p, q)| (*b, *p, *q))).collect()
                }
            };
            let q = graded_quadrature(c.quad_depth.unwrap_or(10).min(MAX_QUAD_DEPTH), c.quad_angles.unwrap_or(1024).min(MAX_QUAD_ANGLES), 16)?;
            for (beta, pp, qq) in grid {
                reps.push(verify_gap_norm(&GapSpec::new(beta, ratio, kmax)?, pp, qq, &q, slack)?);
            }
        }
    }
    let mut out = Output::new("verify", report_table(&reps)).with_json(&reps)?;
    out.all_pass = reps.iter().all(|r| r.pass);
    Ok(out)
}

fn cmd_ode(c: &Common, path: &std::path::Path, theorem: OdeTheoremArg, threshold: f64) -> Result<Output> {
    let spec = SystemSpec::from_file(path)?;
    let sp = c.space()?;
    let r = c.refinement()?;
    let sys = spec.system(r.fine.res.degree)?;
    let th = match theorem {
        OdeTheoremArg::T31 => Theorem::Pointwise,
        OdeTheoremArg::T32 => Theorem::Integrated,
    };
    let rep = run_ode_check(&sys, &sp, &r, th, c.m_variant.into(), threshold, &mut c.rng())?;
    let mut t = Table::new(&["kind", "name", "value", "refinement_delta", "flag"]);
    for (name, v) in rep.constants.names.iter().zip(&rep.constants.values) {
        t.push(vec!["constant".into(), name.to_string(), fmt_num(v.fine), fmt_num(v.delta), fmt_bool(v.finite)]);
    }
    t.push(vec!["check".into(), "smallness_ok".into(), fmt_num(threshold), String::new(), fmt_bool(rep.constants.smallness_ok)]);
    t.push(vec!["check".into(), "finiteness_ok".into(), String::new(), String::new(), fmt_bool(rep.constants.finiteness_ok)]);
    t.push(vec!["check".into(), "residual".into(), fmt_num(rep.residual), String::new(), fmt_bool(rep.residual <= 1e-12)]);
    for m in &rep.members {
        t.push(vec!["member".into(), format!("{} box_sup", m.label), fmt_num(m.box_sup.fine), fmt_num(m.box_sup.delta), fmt_bool(m.box_sup.finite)]);
        t.push(vec!["member".into(), format!("{} norm", m.label), fmt_num(m.norm.fine), fmt_num(m.norm.delta), fmt_bool(m.member)]);
    }
    let mut out = Output::new("ode", t).with_json(&rep)?;
    out.all_pass = rep.pass() && rep.residual <= 1e-12;
    Ok(out)
}
