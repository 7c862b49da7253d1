use hoibc::geometry::*;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn circle_perimeter_and_normals() {
    let c = mesh_circle(1.0, 64).unwrap();
    assert!(c.is_closed());
    assert_eq!(c.n_nodes(), 64);
    assert_eq!(c.n_elements(), 64);
    assert!((c.perimeter() - 2.0 * PI).abs() / (2.0 * PI) < 2e-3);
    for e in 0..64 {
        let m = c.midpoint(e);
        let r = m[0].hypot(m[1]);
        let n = c.normal(e);
        assert!((n[0] * m[0] + n[1] * m[1]) / r > 0.99);
    }
}

#[test]
fn closed_loop_sums_to_zero() {
    let c = mesh_circle(2.5, 37).unwrap();
    let (mut sx, mut sy) = (0.0, 0.0);
    for e in 0..c.n_elements() {
        let t = c.tangent(e);
        sx += c.length(e) * t[0];
        sy += c.length(e) * t[1];
    }
    assert!(sx.hypot(sy) <= 1e-12 * c.perimeter());
}

#[test]
fn frames_are_orthonormal_and_right_handed() {
    for c in [mesh_circle(1.3, 19).unwrap(), mesh_plate(2.0, 12).unwrap()] {
        for e in 0..c.n_elements() {
            let (t, n) = (c.tangent(e), c.normal(e));
            assert!((t[0] * n[0] + t[1] * n[1]).abs() < 1e-14);
            assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-14);
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14);
            // ν = n × τ = +ẑ
            assert!((n[0] * t[1] - n[1] * t[0] - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn plate_layout() {
    let p = mesh_plate(1.0, 10).unwrap();
    assert!(!p.is_closed());
    assert_eq!(p.n_nodes(), 11);
    assert_eq!(p.n_elements(), 10);
    for e in 0..10 {
        assert!((p.length(e) - 0.1).abs() < 1e-15);
        assert_eq!(p.normal(e), [0.0, 1.0]);
        assert_eq!(p.tangent(e), [-1.0, 0.0]);
    }
    let s = DofSpace::p1(&p);
    assert_eq!(s.count, 11);
    assert_eq!(s.constrained.iter().copied().collect::<Vec<_>>(), vec![0, 10]);
    assert!(DofSpace::p1(&mesh_circle(1.0, 8).unwrap()).constrained.is_empty());
}

#[test]
fn coarse_meshes_rejected() {
    assert_eq!(mesh_circle(1.0, 7).unwrap_err(), GeometryError::MeshTooCoarse { n: 7 });
    assert_eq!(mesh_plate(1.0, 3).unwrap_err(), GeometryError::MeshTooCoarse { n: 3 });
    assert!(mesh_circle(-1.0, 16).is_err());
}

#[test]
fn nested_refinement() {
    let coarse = mesh_circle(0.7, 16).unwrap();
    let fine = mesh_circle(0.7, 32).unwrap();
    for i in 0..16 {
        let (a, b) = (coarse.nodes()[i], fine.nodes()[2 * i]);
        assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    }
}

#[test]
fn p1_basis_values() {
    let c = mesh_circle(1.0, 8).unwrap();
    let s = DofSpace::p1(&c);
    let v = basis_eval(&s, &c, 3, 0.0);
    assert_eq!((v[0].value, v[1].value), (1.0, 0.0));
    assert_eq!((v[0].dof, v[1].dof), (3, 4));
    let h = c.length(3);
    assert_eq!((v[0].deriv, v[1].deriv), (-1.0 / h, 1.0 / h));
    let last = basis_eval(&s, &c, 7, 0.5);
    assert_eq!((last[0].dof, last[1].dof), (7, 0));
    let p0 = basis_eval(&DofSpace::p0(&c), &c, 5, 0.3);
    assert_eq!(p0, vec![BasisValue { dof: 5, value: 1.0, deriv: 0.0 }]);
}

#[test]
fn derivative_integrates_to_zero_on_closed_contour() {
    let c = mesh_circle(1.0, 24).unwrap();
    let s = DofSpace::p1(&c);
    let mut total = vec![0.0; s.count];
    for e in 0..c.n_elements() {
        for b in basis_eval(&s, &c, e, 0.5) {
            total[b.dof] += b.deriv * c.length(e);
        }
    }
    assert!(total.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn fingerprint_and_csv() {
    let a = mesh_circle(1.0, 16).unwrap();
    assert_eq!(a.fingerprint(), mesh_circle(1.0, 16).unwrap().fingerprint());
    assert_ne!(a.fingerprint(), mesh_circle(1.0, 17).unwrap().fingerprint());
    let mut buf = Vec::new();
    a.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("node,")).count(), 16);
    assert_eq!(text.lines().filter(|l| l.starts_with("element,")).count(), 16);
}

proptest! {
    #[test]
    fn partition_of_unity(n in 8usize..40, e_frac in 0.0f64..1.0, t in 0.0f64..=1.0) {
        let c = mesh_circle(1.0, n).unwrap();
        let s = DofSpace::p1(&c);
        let e = ((e_frac * n as f64) as usize).min(n - 1);
        let sum: f64 = basis_eval(&s, &c, e, t).iter().map(|b| b.value).sum();
        prop_assert!((sum - 1.0).abs() < 1e-15);
        let dsum: f64 = basis_eval(&s, &c, e, t).iter().map(|b| b.deriv).sum();
        prop_assert!(dsum.abs() < 1e-12);
    }
}
