use hoibc::specfun::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

// Reference values from 40-digit mpmath evaluations.
const ORACLE: &[(u32, (f64, f64), (f64, f64), (f64, f64))] = &[
    (0, (3.0, 2.0), (-1.2492348796074222, -0.9479837920577348), (1.0008031965548903, -1.2314416093034275)),
    (5, (10.0, -3.0), (-1.6525793247337575, 0.7925712273843519), (0.8059874219961782, 1.639994077151921)),
    (1, (15.0, 0.0), (0.20510403861352275, 0.0), (0.02107362803687351, 0.0)),
    (20, (7.0, 1.0), (-1.9091960732910256e-08, 9.815296050548895e-09), (695392.1535909247, 375248.55188479024)),
    (3, (30.0, 5.0), (9.657792308517742, 4.1428082135113105), (-4.143349716619923, 9.656951105865504)),
    (10, (0.5, 0.2), (-4.3434950849681316e-13, -3.3635244150895454e-13), (45896740531.71809, -35467341869.15828)),
    (40, (25.0, -10.0), (5.9091846018507e-05, 4.499422784069063e-05), (-80.36097223342522, 95.01600743128293)),
    (2, (12.0, 0.0), (-0.08493049487860481, 0.0), (0.21572077625754535, 0.0)),
    (7, (11.9, 0.3), (-0.16038802948539843, -0.04736389227305406), (0.20953626765169783, -0.04213881674045888)),
];

#[test]
fn bessel_matches_oracle_table() {
    for &(n, z, j, y) in ORACLE {
        let z = c(z.0, z.1);
        let jv = bessel_j(n, z).unwrap();
        let yv = bessel_y(n, z).unwrap();
        assert!(rel(jv, c(j.0, j.1)) < 1e-12, "J_{n}({z}) = {jv}, want {j:?}");
        assert!(rel(yv, c(y.0, y.1)) < 1e-12, "Y_{n}({z}) = {yv}, want {y:?}");
    }
}

#[test]
fn bessel_small_values() {
    assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    assert_eq!(bessel_j(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    assert!(rel(bessel_j(0, c(1.0, 0.0)).unwrap(), c(0.7651976865579665514, 0.0)) < 1e-15);
    assert!(rel(bessel_y(0, c(1.0, 0.0)).unwrap(), c(0.0882569642156769580, 0.0)) < 1e-13);
    assert!(rel(bessel_y(0, c(2.0, 0.0)).unwrap(), c(0.5103756726497451196, 0.0)) < 1e-13);
}

#[test]
fn range_and_domain_errors() {
    assert!(matches!(bessel_j(201, c(1.0, 0.0)), Err(SpecfunError::Range(_))));
    assert!(matches!(bessel_j(0, c(2e4, 0.0)), Err(SpecfunError::Range(_))));
    assert!(matches!(bessel_y(0, c(-1.0, 0.0)), Err(SpecfunError::Domain(_))));
    assert!(matches!(bessel_y(0, c(0.0, 0.0)), Err(SpecfunError::Domain(_))));
    assert!(bessel_y(0, c(-1.0, 1e-3)).is_ok());
    assert!(matches!(green2d(1.0, 0.0), Err(SpecfunError::Domain(_))));
    assert!(matches!(green2d(1.0, -1.0), Err(SpecfunError::Domain(_))));
}

fn wronskian_residual(n: u32, z: Complex64) -> f64 {
    let (j, y) = bessel_jy_seq(n + 1, z).unwrap();
    let nn = n as usize;
    // Derivatives from C'_n = C_n (n/z) − C_{n+1}.
    let jp = j[nn] * (n as f64) / z - j[nn + 1];
    let yp = y[nn] * (n as f64) / z - y[nn + 1];
    let w = j[nn] * yp - jp * y[nn];
    let exact = 2.0 / (PI * z);
    // Relative to the size of the individual products, which is what double
    // precision can resolve when the Wronskian is a small difference.
    let scale = (j[nn] * yp).norm().max((jp * y[nn]).norm()).max(exact.norm());
    (w - exact).norm() / scale
}

#[test]
fn wronskian_grid() {
    for n in 0..=50u32 {
        for &(re, im) in &[(0.1, 0.0), (1.0, 0.5), (5.0, -3.0), (20.0, 10.0), (35.0, -20.0), (49.0, 0.0), (3.0, 19.0)] {
            let z = c(re, im);
            let r = wronskian_residual(n, z);
            assert!(r < 1e-11, "n={n} z={z} residual {r}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn wronskian_random(n in 0u32..=50, modulus in 0.1f64..50.0, angle in -1.2f64..1.2) {
        let mut z = Complex64::from_polar(modulus, angle);
        if z.im.abs() > 20.0 {
            z.im = 20.0f64.copysign(z.im);
        }
        let r = wronskian_residual(n, z);
        prop_assert!(r < 1e-11, "n={} z={} residual {}", n, z, r);
    }

    #[test]
    fn sequence_matches_single_order(n in 0u32..40, re in 0.1f64..40.0, im in -10.0f64..10.0) {
        let z = c(re, im);
        let seq = bessel_j_seq(40, z).unwrap();
        let single = bessel_j(n, z).unwrap();
        prop_assert!((seq[n as usize] - single).norm() <= 1e-12 * single.norm().max(1e-300));
    }
}

#[test]
fn green_kernel_oracle() {
    let g = green2d(1.0, 1.0).unwrap();
    let want = c(-0.02206424105391923950, -0.19129942163949163786);
    assert!(rel(g, want) < 1e-13, "{g}");
    let dg = green2d_dr(1.0, 1.0).unwrap();
    assert!((dg.norm() - 0.22415647299632235865).abs() < 1e-13);
    let grad = green2d_grad_y(1.0, [0.0, 0.0], [0.6, 0.8]).unwrap();
    let mag = (grad[0].norm_sqr() + grad[1].norm_sqr()).sqrt();
    assert!((mag - 0.22415647299632235865).abs() < 1e-13);
}

#[test]
fn green_kernel_decay() {
    for &(k, r) in &[(1.0, 100.0), (2.0, 80.0), (10.0, 50.0), (3.0, 1000.0)] {
        let g = green2d(k, r).unwrap();
        let asym = (1.0 / (8.0 * PI * k * r)).sqrt();
        assert!((g.norm() / asym - 1.0).abs() < 0.01);
    }
}

#[test]
fn green_kernel_solves_radial_helmholtz() {
    let k = 1.3;
    for i in 0..50 {
        let kr = 0.5 + i as f64 * (49.5 / 49.0);
        let r = kr / k;
        let h = 1e-3 * r.min(1.0 / k);
        let g = |r: f64| green2d(k, r).unwrap();
        let (gm, g0, gp) = (g(r - h), g(r), g(r + h));
        let d2 = (gp - 2.0 * g0 + gm) / (h * h);
        let d1 = (gp - gm) / (2.0 * h);
        let res = d2 + d1 / r + k * k * g0;
        assert!(res.norm() <= 1e-6 * g0.norm(), "kr={kr} residual {}", res.norm());
    }
}

#[test]
fn quadrature_examples() {
    let gl2 = quad_rule(QuadKind::GaussLegendre, 2).unwrap();
    assert!((gl2.integrate(|t| t * t) - 2.0 / 3.0).abs() < 1e-15);
    let glog4 = quad_rule(QuadKind::GaussLog, 4).unwrap();
    assert!((glog4.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
    let gl16 = quad_rule(QuadKind::GaussLegendre, 16).unwrap();
    let e = std::f64::consts::E;
    assert!((gl16.integrate(f64::exp) - (e - 1.0 / e)).abs() < 1e-14);
    assert!(quad_rule(QuadKind::GaussLegendre, 0).is_err());
    assert!(quad_rule(QuadKind::GaussLog, 65).is_err());
}

#[test]
fn legendre_exactness_all_orders() {
    for n in 1..=64usize {
        let r = quad_rule(QuadKind::GaussLegendre, n).unwrap();
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
        assert!(r.weights.iter().all(|&w| w > 0.0));
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        for deg in 0..(2 * n).min(40) {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let got = r.integrate(|t| t.powi(deg as i32));
            assert!((got - exact).abs() < 1e-13, "n={n} deg={deg} {got}");
        }
    }
}

#[test]
fn log_rule_exactness_all_orders() {
    // ∫_0^1 −ln(t) t^m dt = 1/(m+1)^2
    for n in 1..=64usize {
        let r = quad_rule(QuadKind::GaussLog, n).unwrap();
        assert!(r.nodes.iter().all(|&t| t > 0.0 && t < 1.0), "n={n}");
        assert!(r.weights.iter().all(|&w| w > 0.0));
        for m in 0..(2 * n).min(30) {
            let exact = 1.0 / ((m + 1) as f64).powi(2);
            let got = r.integrate(|t| t.powi(m as i32));
            assert!((got - exact).abs() < 1e-14, "n={n} m={m} {got} {exact}");
        }
    }
}

#[test]
fn wave_convention() {
    let w = WaveConvention::from_frequency(C0).unwrap();
    assert!((w.k0 - 2.0 * PI).abs() < 1e-14);
    assert!((w.wavelength() - 1.0).abs() < 1e-14);
    assert!(WaveConvention::new(0.0).is_err());
    assert!(WaveConvention::is_passive(c(4.0, -0.5)));
    assert!(!WaveConvention::is_passive(c(4.0, 0.5)));
}

// [J0, J1, Y0, Y1] from mpmath.
const REAL_ORACLE: &[(f64, [f64; 4])] = &[
    (0.01, [0.9999750001562495, 0.004999937500260416, -3.005455637083646, -63.67859628206065]),
    (0.3, [0.9776262465382961, 0.148318816273104, -0.8072735778045195, -2.2931051383885293]),
    (2.0, [0.22389077914123567, 0.5767248077568734, 0.5103756726497451, -0.10703243154093754]),
    (4.9, [-0.2097383275853262, -0.31469467101519066, -0.2920545942440142, 0.18124669204504856]),
    (5.1, [-0.14433474706050065, -0.3370972020182318, -0.3216024491248594, 0.11373644197749973]),
    (7.9, [0.19436184484127825, 0.2191793999217512, 0.20652094814437577, -0.18172107728057313]),
    (8.1, [0.14751745404437766, 0.24760776698159287, 0.23809132870223482, -0.13314879595249593]),
    (12.0, [0.047689310796833535, -0.2234471044906276, -0.22523731263436145, -0.05709921826089652]),
    (24.9, [0.0832459683530155, -0.13485569953140886, -0.13649918399676522, -0.08600255759555425]),
    (25.1, [0.10827567149994945, -0.11463478413442257, -0.11676770763803694, -0.11062223322783099]),
    (33.3, [0.06333848594752126, 0.12386214790148009, 0.12289749913503732, -0.061500722807785735]),
    (140.0, [0.03735822501204269, 0.05627305279151202, 0.05613927425830664, -0.037157968395916105]),
    (2000.5, [-0.001617829940159909, 0.017765094923485818, 0.017765498724962362, 0.001622270255029515]),
    (60000.0, [0.001540732824401818, 0.0028699382571948256, 0.0028699254176549733, -0.0015407089084101702]),
];

#[test]
fn real_kernel_path_matches_oracle() {
    for &(x, want) in REAL_ORACLE {
        let got = j01y01_real(x);
        // Absolute accuracy relative to the envelope sqrt(2/(πx)).
        let env = (2.0 / (PI * x)).sqrt().min(1.0).max(want.iter().fold(0.0f64, |m, v| m.max(v.abs())) * 1e-2);
        for i in 0..4 {
            let err = (got[i] - want[i]).abs() / want[i].abs().max(env);
            assert!(err < 1e-12, "x={x} i={i} got {} want {} err {err}", got[i], want[i]);
        }
    }
}
