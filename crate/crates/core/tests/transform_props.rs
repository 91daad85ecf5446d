use std::f64::consts::PI;
use std::sync::Arc;

use dunkl_frft::Error;
use dunkl_frft::eval::{Evaluable, FnEval, HermiteCombo};
use dunkl_frft::polyengine::{HermiteBasis, MultiPoly, harmonic_basis};
use dunkl_frft::quadrature::{QuadGrid, WeightedCircleGrid};
use dunkl_frft::rational::{qc_one, qc_to_f64};
use dunkl_frft::specfun::Multiplicity;
use dunkl_frft::transform::{
    Regime, TransformPlan, bochner_fdt, dunkl_transform_on_grid, fdt_integral, fdt_integral_grid_samples,
    fdt_integral_on_grid, fdt_integral_samples, fdt_smoothed_on_grid, fdt_spectral, funk_hecke_check,
    funk_hecke_radial, gaussian_bilinear_check, gaussian_moment_check, kernel_smoothed, kernel_spectral,
    master_formula_input, master_formula_rhs,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn cx(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn plan(mu: &[f64], alpha: f64) -> TransformPlan {
    TransformPlan::new(&Multiplicity::new(mu.to_vec()).unwrap(), alpha).unwrap()
}

fn combo(basis: &Arc<HermiteBasis>, raw: &[(f64, f64)]) -> HermiteCombo {
    let coeffs: Vec<C> = basis.indices().iter().zip(raw.iter().cycle()).map(|(_, &(a, b))| cx(a, b)).collect();
    HermiteCombo::new(basis.clone(), coeffs).unwrap()
}

fn l2_diff(grid: &QuadGrid, a: &[C], b: &[C]) -> f64 {
    let d: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    grid.norm_samples(&d).unwrap()
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// J_0 by its power series; adequate for |r| ≤ 10.
fn bessel_j0(r: f64) -> f64 {
    let (mut term, mut sum) = (1.0, 1.0);
    for k in 1..80 {
        term *= -(r * r / 4.0) / (k * k) as f64;
        sum += term;
    }
    sum
}

/// Trapezoid sum of g on [−12, 12]; g decays like a Gaussian so the rule is
/// spectrally accurate.
fn line_integral(g: impl Fn(f64) -> C) -> C {
    let n = 12_000;
    let h = 24.0 / n as f64;
    (0..=n).map(|i| g(-12.0 + i as f64 * h) * if i == 0 || i == n { 0.5 * h } else { h }).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn adjoint_relation(
        mu in 0.0f64..2.0,
        alpha in prop_oneof![-2.67f64..-0.47, 0.47f64..2.67],
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 7),
    ) {
        let p = plan(&[mu], alpha);
        let basis = Arc::new(HermiteBasis::new(p.mult(), 6).unwrap());
        let f = combo(&basis, &raw);
        let g = combo(&basis, &raw[1..]);
        let grid = p.grid();
        let df = fdt_integral_on_grid(&f, &p).unwrap();
        let dg = fdt_integral_on_grid(&g, &p.at_alpha(-alpha).unwrap()).unwrap();
        let lhs = grid.inner_product_samples(&df, &g.sample_on(grid).unwrap()).unwrap();
        let rhs = grid.inner_product_samples(&f.sample_on(grid).unwrap(), &dg).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn integral_route_is_unitary(
        mu in prop::collection::vec(0.0f64..1.5, 1..=2),
        alpha in prop_oneof![-2.67f64..-0.47, 0.47f64..2.67],
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 5),
    ) {
        let p = plan(&mu, alpha);
        let basis = Arc::new(HermiteBasis::new(p.mult(), 5).unwrap());
        let f = combo(&basis, &raw);
        let out = fdt_integral_on_grid(&f, &p).unwrap();
        prop_assert!((p.grid().norm_samples(&out).unwrap() - f.norm()).abs() < 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn group_law_on_probe_points(
        alpha in 0.5f64..1.2,
        beta in -1.2f64..-0.5,
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
    ) {
        let p = plan(&[0.3, 0.7], alpha);
        let basis = Arc::new(HermiteBasis::new(p.mult(), 4).unwrap());
        let f = combo(&basis, &raw);
        let xs: Vec<Vec<f64>> = (0..9).map(|k| vec![-1.5 + 1.5 * (k / 3) as f64, -1.0 + 1.1 * (k % 3) as f64]).collect();
        let once = fdt_integral_on_grid(&f, &p).unwrap();
        let twice = fdt_integral_samples(&once, &p.at_alpha(beta).unwrap(), &xs).unwrap();
        let direct = fdt_integral(&f, &p.at_alpha(alpha + beta).unwrap(), &xs);
        let want = match direct {
            Ok(v) => v,
            Err(_) => fdt_spectral(&f, &p.at_alpha(alpha + beta).unwrap()).unwrap().output.eval_many(&xs).unwrap(),
        };
        prop_assert!(max_diff(&twice, &want) < 1e-6, "{:e}", max_diff(&twice, &want));
    }
}

#[test]
fn zero_multiplicity_reduces_to_the_classical_fractional_fourier_transform() {
    let f = |y: f64| cx(y * (-(y - 0.4) * (y - 0.4) / 2.0).exp(), 0.3 * (-y * y / 1.6).exp());
    let xs: Vec<Vec<f64>> = [-1.7, -0.2, 0.9, 2.3].iter().map(|&x| vec![x]).collect();
    for alpha in [PI / 6.0, -2.0 * PI / 5.0, 2.5] {
        let p = plan(&[0.0], alpha);
        let got = fdt_integral(&FnEval::new(1, |y: &[f64]| f(y[0])), &p, &xs).unwrap();
        let (s, co) = alpha.sin_cos();
        let cot = co / s;
        let constant = (cx(1.0, cot) / (2.0 * PI)).sqrt();
        for (x, g) in xs.iter().zip(&got) {
            let x = x[0];
            let inner = line_integral(|y| C::from_polar(1.0, -0.5 * cot * y * y + x * y / s) * f(y));
            let want = constant * C::from_polar(1.0, -0.5 * cot * x * x) * inner;
            assert!((g - want).norm() < 1e-9, "alpha {alpha} x {x}: {g} vs {want}");
        }
    }
}

#[test]
fn dunkl_transform_is_minus_quarter_turn_and_inverts_to_reflection() {
    let p = plan(&[0.0], 1.0);
    let grid = p.grid().clone();
    let f = |y: f64| cx((y - 0.5) * (-(y - 0.5) * (y - 0.5) / 2.0).exp(), 0.0);
    let samples = grid.sample(|y| Ok(f(y[0]))).unwrap();
    let dk = dunkl_transform_on_grid(&samples, &p).unwrap();
    let mut fourier = 0.0f64;
    for (x, v) in grid.nodes().zip(&dk).filter(|(x, _)| x[0].abs() < 4.0) {
        let want = line_integral(|y| C::from_polar(1.0, -x[0] * y) * f(y)) / (2.0 * PI).sqrt();
        fourier = fourier.max((v - want).norm());
    }
    assert!(fourier < 1e-9, "{fourier:e}");
    let plus = fdt_integral_grid_samples(&samples, &p.at_alpha(PI / 2.0).unwrap()).unwrap();
    assert!(l2_diff(&grid, &plus, &dk) > 0.1);
    let twice = dunkl_transform_on_grid(&dk, &p).unwrap();
    let reflected = grid.sample(|y| Ok(f(-y[0]))).unwrap();
    assert!(l2_diff(&grid, &twice, &reflected) < 1e-8);
}

#[test]
fn smoothed_route_converges_monotonically_and_contracts() {
    let p = plan(&[0.5], PI / 3.0);
    let basis = Arc::new(HermiteBasis::new(p.mult(), 6).unwrap());
    let f = combo(&basis, &[(0.3, -0.2), (0.5, 0.1), (-0.4, 0.6)]);
    let exact = fdt_spectral(&f, &p).unwrap().output.sample_on(p.grid()).unwrap();
    let mut last = f64::INFINITY;
    for j in 1..=8 {
        let pr = p.clone().with_r(1.0 - 2f64.powi(-j)).unwrap();
        let out = fdt_smoothed_on_grid(&f, &pr).unwrap();
        assert!(p.grid().norm_samples(&out).unwrap() <= f.norm() + 1e-12);
        let gap = l2_diff(p.grid(), &out, &exact);
        assert!(gap < last, "j = {j}: {gap:e} after {last:e}");
        last = gap;
    }
}

#[test]
fn spectral_kernel_matches_mehler_closed_form() {
    let p = plan(&[0.25, 0.9], 0.8).with_degree(40).unwrap().with_r(0.5).unwrap();
    for (x, y) in [([0.0, 0.0], [0.0, 0.0]), ([0.4, -1.1], [1.3, 0.2]), ([-2.0, 0.5], [0.7, -0.6])] {
        let a = kernel_spectral(&p, &x, &y).unwrap();
        let b = kernel_smoothed(&p, &x, &y).unwrap();
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn spectral_route_examples() {
    let p = plan(&[0.7], 0.0);
    assert_eq!(p.regime(), Regime::Identity);
    let basis = p.basis().clone();
    let f = combo(&basis, &[(0.2, 0.1), (-0.3, 0.0), (0.05, 0.4)]);
    let out = fdt_spectral(&f, &p).unwrap();
    assert!(max_diff(out.output.coeffs(), out.input.coeffs()) == 0.0);
    assert!(max_diff(out.input.coeffs(), f.coeffs()) < 1e-12, "{:e}", max_diff(out.input.coeffs(), f.coeffs()));

    let h3 = HermiteCombo::basis_function(basis.clone(), &[3]).unwrap();
    let alpha = 0.9;
    let out = fdt_spectral(&h3, &p.at_alpha(alpha).unwrap()).unwrap();
    for (nu, c) in out.output.terms() {
        let want = if nu[0] == 3 { C::from_polar(1.0, 3.0 * alpha) } else { cx(0.0, 0.0) };
        assert!((c - want).norm() < 1e-12, "{nu:?}: {c}");
    }

    let parity = p.at_alpha(PI).unwrap();
    assert_eq!(parity.regime(), Regime::Parity);
    let out = fdt_spectral(&f, &parity).unwrap().output;
    for x in [-1.3, 0.4, 2.2] {
        assert!((out.eval(&[x]).unwrap() - f.eval(&[-x]).unwrap()).norm() < 1e-12);
    }

    let shifted = FnEval::new(1, |y: &[f64]| cx((-(y[0] - 3.0) * (y[0] - 3.0) / 2.0).exp(), 0.0));
    let low = p.clone().with_degree(4).unwrap();
    let out = fdt_spectral(&shifted, &low).unwrap();
    let norm2 = low.grid().norm_samples(&shifted.sample_on(low.grid()).unwrap()).unwrap().powi(2);
    let captured: f64 = out.input.coeffs().iter().map(|c| c.norm_sqr()).sum();
    assert!(out.tail > 0.1);
    assert!((out.tail * out.tail + captured - norm2).abs() < 1e-10);
}

#[test]
fn gaussian_bilinear_examples() {
    let a = cx(1.3, 0.4);
    for mu in [vec![0.0], vec![0.6, 1.1]] {
        let mult = Multiplicity::new(mu.clone()).unwrap();
        let grid = QuadGrid::with_defaults(&mult).unwrap();
        let zero = vec![cx(0.0, 0.0); mu.len()];
        let check = gaussian_bilinear_check(&mult, &zero, &zero, a, &grid).unwrap();
        let want = a.powf(-(mult.gamma_index() + mu.len() as f64 / 2.0));
        assert!((check.lhs - want).norm() < 1e-12 && (check.rhs - want).norm() < 1e-12);
        let moment = gaussian_moment_check(&MultiPoly::one(mu.len()), &mult, a, &zero, &grid).unwrap();
        assert!((moment.lhs - want).norm() < 1e-12 && (moment.rhs - want).norm() < 1e-12);
    }
    // Zero multiplicity: K(2z, x) = e^{2zx} and the integral is a complex Gaussian.
    let mult = Multiplicity::zero(1).unwrap();
    let grid = QuadGrid::with_defaults(&mult).unwrap();
    let (z, w) = (cx(0.3, -0.5), cx(-0.2, 0.7));
    let check = gaussian_bilinear_check(&mult, &[z], &[w], a, &grid).unwrap();
    let want = a.powf(-0.5) * ((z + w) * (z + w) / a).exp();
    assert!((check.lhs - want).norm() < 1e-12, "{} vs {want}", check.lhs);
    assert!((check.rhs - want).norm() < 1e-12, "{} vs {want}", check.rhs);
}

#[test]
fn funk_hecke_examples() {
    let plain = Multiplicity::zero(2).unwrap();
    let circle = WeightedCircleGrid::new(&plain, 64).unwrap();
    for x in [[0.0, 0.0], [1.0, 2.0], [-6.0, 3.5]] {
        let got = funk_hecke_radial(&plain, &x, &circle).unwrap();
        let want = bessel_j0((x[0] * x[0] + x[1] * x[1]).sqrt());
        assert!((got - cx(want, 0.0)).norm() < 1e-12, "{got} vs {want}");
    }
    let mult = Multiplicity::new(vec![0.3, 0.7]).unwrap();
    let circle = WeightedCircleGrid::new(&mult, 64).unwrap();
    assert!(funk_hecke_check(&mult, &[4.0, -7.0], &circle).unwrap().residual() < 1e-8);
}

#[test]
fn master_formula_example() {
    let p = plan(&[0.5], 0.7);
    let square = MultiPoly::monomial(vec![2], qc_one());
    let input = master_formula_input(&square, p.mult()).unwrap();
    assert_eq!(qc_to_f64(&input.poly().coeff(&[2])), cx(1.0, 0.0));
    assert_eq!(qc_to_f64(&input.poly().coeff(&[0])), cx(-1.0, 0.0));
    let xs: Vec<Vec<f64>> = [-2.0, 0.3, 1.6].iter().map(|&x| vec![x]).collect();
    let got = fdt_integral(&input, &p, &xs).unwrap();
    for (x, g) in xs.iter().zip(got) {
        let want = C::from_polar(1.0, 1.4) * (x[0] * x[0] - 1.0) * (-x[0] * x[0] / 2.0).exp();
        assert!((g - want).norm() < 1e-9);
        assert!((master_formula_rhs(&square, &p, x).unwrap() - want).norm() < 1e-14);
    }
}

#[test]
fn misuse_is_reported() {
    let p2 = plan(&[0.0, 0.0], 0.7);
    let psi = |y: f64| cx((-y * y / 2.0).exp(), 0.0);
    let square = MultiPoly::monomial(vec![2, 0], qc_one());
    assert!(matches!(bochner_fdt(&square, &psi, &p2, &[0.5, 0.5]), Err(Error::Usage(_))));
    let harmonic = harmonic_basis(p2.mult(), 1).unwrap().remove(0);
    assert!(bochner_fdt(&harmonic, &psi, &p2, &[0.5, 0.5]).is_ok());
    let p1 = plan(&[0.0], 0.7);
    assert!(matches!(bochner_fdt(&MultiPoly::one(1), &psi, &p1, &[0.5]), Err(Error::Usage(_))));

    let gauss = FnEval::new(1, |y: &[f64]| cx((-y[0] * y[0] / 2.0).exp(), 0.0));
    let near = p1.at_alpha(0.01).unwrap();
    assert_eq!(near.regime(), Regime::NearSingular);
    assert!(matches!(fdt_integral(&gauss, &near, &[vec![0.0]]), Err(Error::NearSingular { .. })));
    assert!(fdt_spectral(&gauss, &near).is_ok());
    let identity = p1.at_alpha(0.0).unwrap();
    assert!(matches!(fdt_integral(&gauss, &identity, &[vec![0.0]]), Err(Error::Usage(_))));
    assert!(matches!(p1.clone().with_r(0.0), Err(Error::Usage(_))));
    assert!(matches!(TransformPlan::new(&Multiplicity::zero(1).unwrap(), f64::NAN), Err(Error::Domain(_))));
}
