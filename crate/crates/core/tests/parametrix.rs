use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use bdie::coefficient::make_coefficient;
use bdie::geometry::Point3;
use bdie::harmonics::ShBasis;
use bdie::laplace::{double_layer_delta, sphere_spectral_apply_nodal, Side, SphereOperator};
use bdie::parametrix::{
    direct_v, direct_w, direct_wp, eval_parametrix, eval_remainder, op_l, op_l_hat, pot_p, pot_r, pot_v, pot_w, ParametrixContext,
    RemainderMethod,
};
use bdie::verify::Resolution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx(res: Resolution, name: &str, params: &[f64]) -> ParametrixContext {
    res.context(make_coefficient(name, params).unwrap()).unwrap()
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn kernel_examples() {
    let one = ctx(Resolution::coarse(), "const", &[1.0]);
    let two = ctx(Resolution::coarse(), "const", &[2.0]);
    let exp = ctx(Resolution::coarse(), "exp_linear", &[2.0]);
    let (x, y) = (Point3::new(0.5, 0.0, 0.0), Point3::new(-0.5, 0.0, 0.0));
    assert_abs_diff_eq!(eval_parametrix(&one, x, y).unwrap(), -1.0 / (4.0 * PI), epsilon = 1e-16);
    assert_abs_diff_eq!(eval_parametrix(&two, x, y).unwrap(), -1.0 / (8.0 * PI), epsilon = 1e-16);
    let p_delta = -1.0 / (4.0 * PI);
    assert_abs_diff_eq!(exp.coefficient.a(x) * eval_parametrix(&exp, x, y).unwrap(), p_delta, epsilon = 1e-15);
    assert_eq!(eval_remainder(&one, x, y).unwrap(), 0.0);
    assert_abs_diff_eq!(eval_remainder(&exp, x, y).unwrap(), -1.0 / (2.0 * PI), epsilon = 1e-15);
    assert!(eval_parametrix(&exp, x, x).is_err());
}

#[test]
fn remainder_is_weakly_singular_along_rays() {
    let exp = ctx(Resolution::coarse(), "exp_linear", &[2.0]);
    let y = Point3::new(0.1, -0.2, 0.05);
    let d = Point3::new(0.6, 0.0, 0.8);
    let scaled: Vec<(f64, f64)> = (1..=4)
        .map(|k| {
            let t = 10f64.powi(-k);
            (t, eval_remainder(&exp, y + d * t, y).unwrap().abs() * t * t)
        })
        .collect();
    let bound = scaled.iter().map(|s| s.1).fold(0.0, f64::max);
    assert!(bound < 1.0);
    let (t0, s0) = scaled[2];
    let (t1, s1) = scaled[3];
    let exponent = 2.0 - (s1 / s0).ln() / (t1 / t0).ln();
    assert!(exponent <= 2.1, "{exponent}");
}

#[test]
fn newton_type_examples() {
    let res = Resolution::default_level();
    let y = [Point3::ZERO];
    let one = ctx(res, "const", &[1.0]);
    let two = ctx(res, "const", &[2.0]);
    let exp = ctx(res, "exp_linear", &[2.0]);
    assert_abs_diff_eq!(pot_p(&one, &vec![1.0; one.volume.len()], &y).unwrap()[0], -0.5, epsilon = 1e-3);
    assert_abs_diff_eq!(pot_p(&two, &vec![1.0; two.volume.len()], &y).unwrap()[0], -0.25, epsilon = 1e-3);
    assert_abs_diff_eq!(pot_p(&exp, exp.a_volume(), &y).unwrap()[0], -0.5, epsilon = 1e-3);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho: Vec<f64> = (0..one.volume.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let targets: Vec<Point3> =
        (0..20).map(|_| Point3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
    for c in [&one, &two] {
        for method in [RemainderMethod::Relation, RemainderMethod::Direct] {
            assert!(pot_r(c, &rho, &targets, method).unwrap().iter().all(|v| v.abs() <= 1e-10));
        }
    }
    let ones = vec![1.0; exp.volume.len()];
    let rel = pot_r(&exp, &ones, &targets, RemainderMethod::Relation).unwrap();
    let dir = pot_r(&exp, &ones, &targets, RemainderMethod::Direct).unwrap();
    assert!(max_gap(&rel, &dir) <= 1e-3);
}

#[test]
fn layer_examples() {
    let res = Resolution::default_level();
    let one = ctx(res, "const", &[1.0]);
    let two = ctx(res, "const", &[2.0]);
    let exp = ctx(res, "exp_linear", &[2.0]);
    let n = one.boundary.len();
    let y = [Point3::ZERO];
    assert_abs_diff_eq!(pot_v(&one, &vec![1.0; n], &y).unwrap()[0], 1.0, epsilon = 1e-10);
    assert_abs_diff_eq!(pot_v(&two, &vec![1.0; n], &y).unwrap()[0], 0.5, epsilon = 1e-10);
    assert_abs_diff_eq!(pot_v(&exp, exp.a_boundary(), &y).unwrap()[0], 1.0, epsilon = 1e-10);

    assert!(direct_v(&one, &vec![1.0; n]).unwrap().iter().all(|&v| (v - 1.0).abs() <= 1e-15));
    assert!(direct_v(&two, &vec![2.0; n]).unwrap().iter().all(|&v| (v - 1.0).abs() <= 1e-15));
    let y1 = exp.boundary.sample(|node| node.normal.get(0));
    let rho: Vec<f64> = y1.iter().zip(exp.a_boundary()).map(|(y, a)| y * a).collect();
    let third: Vec<f64> = y1.iter().map(|v| v / 3.0).collect();
    assert!(max_gap(&direct_v(&exp, &rho).unwrap(), &third) <= 1e-2);

    let inside = [Point3::new(0.2, 0.1, -0.3)];
    assert_abs_diff_eq!(pot_w(&one, &vec![1.0; n], &inside).unwrap()[0], -1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(pot_w(&exp, &vec![1.0; n], &y).unwrap()[0], -1.0, epsilon = 1e-8);
    let tau = two.boundary.sample(|node| node.pos.get(1).powi(2) + node.pos.get(2));
    let targets = [Point3::new(0.1, 0.2, 0.3), Point3::new(-0.4, 0.0, 0.1)];
    let w = pot_w(&two, &tau, &targets).unwrap();
    assert!(max_gap(&w, &double_layer_delta(&two.boundary, &tau, &targets).unwrap()) <= 1e-12);
}

#[test]
fn direct_double_layer_examples() {
    let exp = ctx(Resolution::default_level(), "exp_linear", &[2.0]);
    let n = exp.boundary.len();
    let expect: Vec<f64> = exp.boundary.sample(|node| -0.5 - 2.0 * node.pos.get(0) / 3.0);
    assert!(max_gap(&direct_w(&exp, &vec![1.0; n]).unwrap(), &expect) <= 1e-2);
    let half_a: Vec<f64> = exp.a_boundary().iter().map(|a| -0.5 * a).collect();
    assert!(max_gap(&direct_wp(&exp, exp.a_boundary()).unwrap(), &half_a) <= 1e-12);
}

#[test]
fn hypersingular_examples() {
    let one = ctx(Resolution::coarse(), "const", &[1.0]);
    let ones = vec![1.0; one.boundary.len()];
    for side in [Side::Interior, Side::Exterior] {
        assert!(op_l(&one, &ones, side).unwrap().iter().all(|v| v.abs() <= 1e-12));
    }

    let exp = ctx(Resolution::default_level(), "exp_linear", &[2.0]);
    let rho = exp.boundary.sample(|node| node.normal.get(2));
    let g: Vec<f64> = rho.iter().zip(exp.dlog_a_dn()).map(|(r, d)| r * d).collect();
    let hat = op_l_hat(&exp, &rho).unwrap();
    let plus = op_l(&exp, &rho, Side::Interior).unwrap();
    let minus = op_l(&exp, &rho, Side::Exterior).unwrap();
    let jump: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| p - m).collect();
    let expect: Vec<f64> = g.iter().zip(exp.a_boundary()).map(|(g, a)| -a * g).collect();
    assert!(max_gap(&jump, &expect) <= 1e-10);

    let wp = sphere_spectral_apply_nodal(SphereOperator::AdjointDoubleLayer, &ShBasis::for_mesh(&exp.boundary), &g).unwrap();
    for (side, l) in [(Side::Interior, &plus), (Side::Exterior, &minus)] {
        let lhs: Vec<f64> = l.iter().zip(&hat).map(|(l, h)| l - h).collect();
        let rhs: Vec<f64> =
            (0..g.len()).map(|i| -exp.a_boundary()[i] * (side.sign() * 0.5 * g[i] + wp[i])).collect();
        assert!(max_gap(&lhs, &rhs) <= 1e-2);
    }
}
