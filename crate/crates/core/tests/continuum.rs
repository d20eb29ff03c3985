//! Continuum-limit behaviour of plaquettes built from smooth U(1) potentials.

use std::f64::consts::PI;

use ddgeom::curvature::continuum::{discretize, TrigPotential, UniformField, ZeroPotential};
use ddgeom::curvature::{self, continuum_scan, TorusPotential};
use ddgeom::{Scalar, Site};

const LS: [usize; 4] = [8, 16, 32, 64];

#[test]
fn analytic_curl_matches_finite_differences() {
    let pot = TrigPotential::default();
    let h = 1e-5;
    for i in 0..7 {
        for j in 0..7 {
            let p = [i as f64 / 7.0 + 0.01, j as f64 / 7.0 + 0.03];
            let d0_a1 = (pot.component(1, [p[0] + h, p[1]]) - pot.component(1, [p[0] - h, p[1]])) / (2.0 * h);
            let d1_a0 = (pot.component(0, [p[0], p[1] + h]) - pot.component(0, [p[0], p[1] - h])) / (2.0 * h);
            assert!((pot.field_strength(p) - (d0_a1 - d1_a0)).abs() < 1e-8);
        }
    }
    let uni = UniformField { flux_quanta: 2 };
    let p = [0.3, 0.7];
    let d0_a1 = (uni.component(1, [p[0] + h, p[1]]) - uni.component(1, [p[0] - h, p[1]])) / (2.0 * h);
    assert!((uni.field_strength(p) - d0_a1).abs() < 1e-8);
}

#[test]
fn trig_potential_converges_at_second_order() {
    let scan = continuum_scan(&TrigPotential::default(), &LS).unwrap();
    let slope = scan.im_slope.unwrap();
    assert!(slope >= 1.8, "slope {slope}");
    for w in scan.rows.windows(2) {
        assert!(w[1].re_error < w[0].re_error, "{:?}", scan.rows);
        assert!(w[1].im_error < w[0].im_error);
    }
    assert!(scan.phase_slope.unwrap() >= 1.8);
}

#[test]
fn scan_rows_match_an_independent_plaquette_phase() {
    // W = exp(i a Σ A(midpoints)) around the plaquette, no seams for a periodic A
    let pot = TrigPotential { scale: 0.7 };
    let l = 16;
    let a = 1.0 / l as f64;
    let u = discretize(&pot, l).unwrap();
    let mut im_err = 0.0f64;
    let mut re_err = 0.0f64;
    for n0 in 0..l {
        for n1 in 0..l {
            let (x, y) = (n0 as f64 * a, n1 as f64 * a);
            let phase = a
                * (pot.component(0, [x + a / 2.0, y]) + pot.component(1, [x + a, y + a / 2.0])
                    - pot.component(0, [x + a / 2.0, y + a])
                    - pot.component(1, [x, y + a / 2.0]));
            let w = curvature::plaquette(&u, &Site::new(vec![n0, n1]), 0, 1).unwrap()[(0, 0)];
            assert!((w - Scalar::from_polar(1.0, phase)).norm() < 1e-13);
            let f = pot.field_strength([x + a / 2.0, y + a / 2.0]);
            im_err = im_err.max((w.im / (a * a) - f).abs());
            re_err = re_err.max(((1.0 - w.re) / a.powi(4) - 0.5 * f * f).abs());
        }
    }
    let row = &continuum_scan(&pot, &[l]).unwrap().rows[0];
    assert!((row.im_error - im_err).abs() < 1e-9);
    assert!((row.re_error - re_err).abs() < 1e-6 * (1.0 + re_err));
}

#[test]
fn zero_potential_has_no_error() {
    let scan = continuum_scan(&ZeroPotential, &LS).unwrap();
    for r in &scan.rows {
        assert_eq!((r.im_error, r.re_error, r.phase_error), (0.0, 0.0, 0.0));
    }
    assert_eq!(scan.im_slope, None);
    assert_eq!(scan.re_slope, None);
}

#[test]
fn uniform_field_is_exact_in_the_phase() {
    for q in [1, -2, 3] {
        let pot = UniformField { flux_quanta: q };
        let scan = continuum_scan(&pot, &LS).unwrap();
        let f = 2.0 * PI * q as f64;
        for r in &scan.rows {
            let a2 = r.a * r.a;
            assert!(r.phase_error <= 1e-10, "phase error {} at L={}", r.phase_error, r.l);
            // Im W / a² = sin(F a²) / a² exactly, so its defect is the sine remainder
            let expected = (f - (f * a2).sin() / a2).abs();
            assert!((r.im_error - expected).abs() <= 1e-10 * (1.0 + expected));
            let u = discretize(&pot, r.l).unwrap();
            for x in u.lattice().sites() {
                let w = curvature::plaquette(&u, &x, 0, 1).unwrap()[(0, 0)];
                assert!((w.im - (f * a2).sin()).abs() <= 1e-13);
            }
        }
        // the sine remainder shrinks as a⁴
        assert!(scan.im_slope.unwrap() > 3.8);
        let lat = discretize(&pot, 8).unwrap();
        let rep = curvature::topological_charge_u1(&lat, 0, 1, &Site::origin(2)).unwrap();
        assert_eq!(rep.charge, q as i64);
    }
}

#[test]
fn scan_rejects_degenerate_inputs() {
    assert!(continuum_scan(&ZeroPotential, &[]).is_err());
    assert!(continuum_scan(&ZeroPotential, &[1]).is_err());
    assert!(discretize(&ZeroPotential, 0).is_err());
}
