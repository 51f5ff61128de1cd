use holoform::discgeom::{
    box_quadrature, dyadic_arcs, graded_quadrature, mobius, mobius_defect, mobius_derivative_abs, sup_samples, Arc, CarlesonBox,
    DiscQuadrature, SupSampleSet,
};
use holoform::measures::{besov_seminorm_p, carleson_constant, morrey_sup_term, Density, SpaceParams};
use holoform::odesolve::{dilate_system, lemma34_residual, ode_residual, solve_ode_series, verify_lemma33, ODESystem};
use holoform::series::{decomposition, frac_deriv_coeff, frac_deriv_integral_at, FracParams, TruncSeries};
use holoform::weights::{check_conditions, doubling_ratio, WeightFun};
use num_complex::Complex64;
use proptest::prelude::*;
use std::sync::OnceLock;

fn cplx() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn poly(max_deg: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec(cplx(), 2..=max_deg + 1).prop_map(|c| TruncSeries::new(c).unwrap())
}

fn in_disc(rmax: f64) -> impl Strategy<Value = Complex64> {
    (0.0..rmax, 0.0..std::f64::consts::TAU).prop_map(|(r, th)| Complex64::from_polar(r, th))
}

fn sup_coeff(s: &TruncSeries) -> f64 {
    s.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn quad() -> &'static DiscQuadrature {
    static Q: OnceLock<DiscQuadrature> = OnceLock::new();
    Q.get_or_init(|| graded_quadrature(7, 256, 16).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn integer_order_is_repeated_derivative(f in poly(14), t in 1usize..=4, b in 1.1..8.0f64) {
        let g = frac_deriv_coeff(&f, &FracParams::new(t as f64, b).unwrap());
        let d = f.nth_derivative(t);
        for k in 0..=f.degree() {
            prop_assert!((g.coeff(k) - d.coeff(k)).norm() <= 1e-12 * d.coeff(k).norm().max(1.0));
        }
    }

    #[test]
    fn decomposition_reassembles(f in poly(30), t in 0.01..5.0f64, b in 1.05..10.0f64) {
        let fp = FracParams::new(t, b).unwrap();
        prop_assert!(decomposition(&f, &fp).residual(&f) <= 1e-12);
    }

    #[test]
    fn derivative_undoes_integral(f in poly(20)) {
        let back = f.integral().derivative();
        for k in 0..=f.degree() {
            prop_assert!((back.coeff(k) - f.coeff(k)).norm() <= 1e-14);
        }
    }

    #[test]
    fn product_evaluates_pointwise(f in poly(10), h in poly(10), z in in_disc(0.95)) {
        let fh = f.mul_trunc(&h, f.degree() + h.degree());
        let want = f.eval(z).unwrap() * h.eval(z).unwrap();
        prop_assert!((fh.eval(z).unwrap() - want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn solver_satisfies_equation(
        a in prop::collection::vec(poly(6), 1..=4),
        rhs in poly(6),
        init in prop::collection::vec(cplx(), 4),
    ) {
        let n = a.len();
        let sys = ODESystem::new(a, rhs, init[..n].to_vec()).unwrap();
        let f = solve_ode_series(&sys, 40).unwrap();
        prop_assert!(ode_residual(&sys, &f) <= 1e-10 * sup_coeff(&f).max(1.0));
        for (k, v) in sys.init.iter().enumerate() {
            let fk = f.nth_derivative(k).coeff(0);
            prop_assert!((fk - v).norm() <= 1e-12 * v.norm().max(1.0));
        }
    }

    #[test]
    fn dilation_is_equivariant(
        a in prop::collection::vec(poly(5), 1..=3),
        rhs in poly(5),
        init in prop::collection::vec(cplx(), 3),
        r in 0.05..0.95f64,
    ) {
        let n = a.len();
        let sys = ODESystem::new(a, rhs, init[..n].to_vec()).unwrap();
        let f = solve_ode_series(&sys, 30).unwrap();
        let d = dilate_system(&sys, r).unwrap();
        let fr = f.dilate(r).unwrap();
        prop_assert!(d.residual(&fr) <= 1e-10 * sup_coeff(&fr).max(1.0));
        let g = solve_ode_series(&d.as_system(&sys.init).unwrap(), 30).unwrap();
        for k in 0..=30 {
            prop_assert!((g.coeff(k) - fr.coeff(k)).norm() <= 1e-10 * sup_coeff(&fr).max(1.0));
        }
    }

    #[test]
    fn power_sum_inequality(v in prop::collection::vec(0.0..50.0f64, 1..20), m in 0.1..6.0f64) {
        prop_assert!(verify_lemma33(&v, m).unwrap());
    }

    #[test]
    fn leibniz_rearrangement(f in poly(10), h in poly(10), n in 0usize..=6) {
        prop_assert!(lemma34_residual(&f, &h, n) <= 1e-10);
    }

    #[test]
    fn power_weight_doubles(q in 0.05..1.0f64, extra in 0.0..1.0f64, t in 1e-9..1.0f64, u in 0.0..1.0f64) {
        let sigma = (q + extra).min(1.0);
        let r = t + u * (1.0 - t);
        for w in [WeightFun::power(q).unwrap(), WeightFun::power_log(q, 1.0).unwrap()] {
            let (ratio, bound) = doubling_ratio(&w, t, r, sigma).unwrap();
            prop_assert!(ratio <= bound * (1.0 + 1e-12), "{ratio} > {bound}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mobius_is_involutive(a in in_disc(0.99), z in in_disc(0.999)) {
        let back = mobius(a, mobius(a, z).unwrap()).unwrap();
        prop_assert!((back - z).norm() <= 1e-12);
        let w = mobius(a, z).unwrap();
        let lhs = (1.0 - w.norm_sqr()) * (Complex64::new(1.0, 0.0) - a.conj() * z).norm_sqr();
        let rhs = (1.0 - a.norm_sqr()) * (1.0 - z.norm_sqr());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-3));
        prop_assert!((mobius_defect(a, z) - (1.0 - w.norm_sqr())).abs() <= 1e-12);
        // |φ_a'|² is the Jacobian of the change of variables
        let h = 1e-6;
        let num = (mobius(a, z + h).unwrap() - w).norm() / h;
        prop_assert!((num - mobius_derivative_abs(a, z)).abs() <= 1e-4 * num.max(1.0));
    }

    #[test]
    fn separated_boxes(
        (j, n) in (2i32..=12).prop_flat_map(|j| (Just(j), 1..j)),
        th in 0.0..std::f64::consts::TAU,
        (u, v, u2, v2) in (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64),
    ) {
        let ell = 2f64.powi(-j);
        let big = ell * 2f64.powi(n + 1);
        let tau = std::f64::consts::TAU;
        let z = Complex64::from_polar(1.0 - ell * v, th + (u - 0.5) * tau * ell);
        let w = Complex64::from_polar(1.0 - big * v2, th + (u2 - 0.5) * tau * big);
        let inner = CarlesonBox::new(Arc::new(th, 0.5 * big).unwrap());
        prop_assert!(CarlesonBox::new(Arc::new(th, ell).unwrap()).contains(z));
        prop_assume!(!inner.contains(w));
        let d = (Complex64::new(1.0, 0.0) - w.conj() * z).norm();
        prop_assert!(d >= 0.1 * 0.5 * big, "|1 - conj(w) z| = {d}, 2^n|I| = {}", 0.5 * big);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coefficient_and_integral_forms_agree(f in poly(8), t in 0.2..3.0f64, b in 1.5..4.0f64, z in in_disc(0.6)) {
        let fp = FracParams::new(t, b).unwrap();
        let a = frac_deriv_coeff(&f, &fp).eval(z).unwrap();
        let i = frac_deriv_integral_at(&f, &fp, z, quad()).unwrap();
        prop_assert!((a - i).norm() <= 1e-6 * a.norm().max(1.0), "{a} vs {i}");
    }

    #[test]
    fn morrey_term_at_origin_is_the_seminorm(f in poly(10), p in 1.2..4.0f64, s in 0.1..0.9f64) {
        let sp = SpaceParams::with_power(p, s, s, 0.5 * s).unwrap();
        let origin = SupSampleSet { points: vec![Complex64::new(0.0, 0.0)], depth: 0, rotations: 1 };
        let m = morrey_sup_term(&f, &sp, &origin, quad());
        let b = besov_seminorm_p(&f, &sp, quad());
        prop_assert!((m - b).abs() <= 1e-9 * b.max(1e-300), "{m} vs {b}");
    }

    #[test]
    fn morrey_term_is_rotation_invariant(c in cplx(), n in 1usize..6, th in 0.0..std::f64::consts::TAU) {
        let sp = SpaceParams::with_power(2.0, 0.5, 0.4, 0.3).unwrap();
        let samples = sup_samples(3, 8).unwrap();
        let mut co = vec![Complex64::new(0.0, 0.0); n + 1];
        co[n] = c;
        let f = TruncSeries::new(co.clone()).unwrap();
        co[n] = c * Complex64::from_polar(1.0, th * n as f64);
        let g = TruncSeries::new(co).unwrap();
        // |f(e^{iθ}z)| = |g(z)| up to a unimodular factor, so the sup terms are equal
        let (mf, mg) = (morrey_sup_term(&f, &sp, &samples, quad()), morrey_sup_term(&g, &sp, &samples, quad()));
        prop_assert!((mf - mg).abs() <= 1e-12 * mf.max(1e-300));
    }

    #[test]
    fn box_moments_scale(j in 0i32..=10, th in 0.0..std::f64::consts::TAU) {
        let ell = 2f64.powi(-j);
        let bq = box_quadrature(&CarlesonBox::new(Arc::new(th, ell).unwrap()), 10);
        for tau in [1.5, 2.0, 3.0] {
            let m = bq.integrate(|z| (1.0 - z.norm_sqr()).powf(tau - 2.0));
            prop_assert!(m <= 8.0 * ell.powf(tau), "tau={tau} ell={ell}: {m}");
        }
    }

    #[test]
    fn carleson_constant_is_linear(c in 0.01..100.0f64, q in 0.1..1.0f64) {
        let w = WeightFun::power(q).unwrap();
        let arcs = dyadic_arcs(4, 2);
        let one = carleson_constant(&Density::constant(1.0), &w, &arcs).unwrap().sup_value;
        let scaled = carleson_constant(&Density::constant(c), &w, &arcs).unwrap().sup_value;
        prop_assert!((scaled - c * one).abs() <= 1e-10 * c * one);
        // area of S(I) is ℓ²(2−ℓ) and ℓ = 1 dominates for q <= 1
        prop_assert!(one >= 1.0 - 1e-9);
    }

    #[test]
    fn power_weight_conditions(q in 0.05..0.95f64, sigma in 0.05..1.0f64) {
        let r = check_conditions(&WeightFun::power(q).unwrap(), sigma).unwrap();
        prop_assert!(r.holds_11);
        prop_assert!((r.value_11 - 1.0 / q).abs() <= 1e-6 / q);
        if sigma - q > 0.02 {
            prop_assert!(r.holds_12);
            prop_assert!((r.value_12 - 1.0 / (sigma - q)).abs() <= 1e-6 / (sigma - q));
        } else if q > sigma {
            prop_assert!(!r.holds_12);
        }
    }
}
