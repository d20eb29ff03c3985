//! Abelian Chern densities and the U(1) topological charge.

mod common;

use std::f64::consts::PI;

use common::*;
use ddgeom::connection::{self, ConnectionB, ConnectionU, GaugeTransform};
use ddgeom::curvature::{self, CurvatureField};
use ddgeom::field::{LinkField, ScalarKind};
use ddgeom::forms::DiscreteForm;
use ddgeom::io;
use ddgeom::random;
use ddgeom::{Lattice, Orientation, Scalar, Site};
use rand::Rng;

/// Sum over all `(2k)!` orderings of `dirs` with the sorting sign and the
/// shift accumulated from coordinates after each pair.
fn chern_oracle(f: &CurvatureField, dirs: &[usize], x: &Site) -> Scalar {
    let lat = f.lattice();
    let positions: Vec<usize> = (0..dirs.len()).collect();
    let mut total = Scalar::new(0.0, 0.0);
    for perm in permutations(&positions) {
        let sign = sort_sign(&perm);
        let mut y = x.clone();
        let mut prod = Scalar::new(1.0, 0.0);
        for pair in perm.chunks(2) {
            let (a, b) = (dirs[pair[0]], dirs[pair[1]]);
            prod *= f.component(a, b).unwrap().at(&y).unwrap()[(0, 0)];
            y = shifted(lat, &y, &[a, b]);
        }
        total += prod * sign;
    }
    total
}

fn random_abelian(rng: &mut impl Rng, lat: &Lattice, kind: ScalarKind) -> CurvatureField {
    let b = ConnectionB::new(random::uniform_link_field(rng, lat, 1, kind)).unwrap();
    curvature::curvature_from_b(&b).unwrap()
}

#[test]
fn k2_density_matches_permutation_oracle() {
    let lat = Lattice::periodic(&[2, 2, 2, 2]).unwrap();
    let mut rng = random::rng(21);
    for i in 0..20 {
        let f = random_abelian(&mut rng, &lat, kind_of(i % 2 == 1));
        let scale = (1.0 + f.max_abs()).powi(2);
        for x in lat.sites() {
            let got = curvature::chern_density(&f, 2, &x).unwrap();
            let want = chern_oracle(&f, &[0, 1, 2, 3], &x);
            assert!((got - want).norm() <= 1e-12 * scale, "{got} vs {want}");
        }
        let x = Site::new(vec![1, 0, 1, 1]);
        let dirs = [2, 0, 3, 1];
        let got = curvature::chern_density_in(&f, &dirs, &x).unwrap();
        assert!((got - chern_oracle(&f, &dirs, &x)).norm() <= 1e-12 * scale);
    }
}

#[test]
fn k2_density_on_larger_and_five_dimensional_lattices() {
    let mut rng = random::rng(22);
    let lat = Lattice::periodic(&[3, 2, 3, 2]).unwrap();
    let f = random_abelian(&mut rng, &lat, ScalarKind::Complex);
    let field = curvature::chern_density_field(&f, 2).unwrap();
    for (i, x) in lat.sites().enumerate() {
        assert!((field[i] - chern_oracle(&f, &[0, 1, 2, 3], &x)).norm() <= 1e-11);
    }
    let lat = Lattice::periodic(&[2, 2, 2, 2, 2]).unwrap();
    let f = random_abelian(&mut rng, &lat, ScalarKind::Real);
    let x = Site::new(vec![1, 1, 0, 1, 0]);
    let got = curvature::chern_density(&f, 2, &x).unwrap();
    assert!((got - chern_oracle(&f, &[0, 1, 2, 3], &x)).norm() <= 1e-11);
    let got = curvature::chern_density_in(&f, &[1, 2, 3, 4], &x).unwrap();
    assert!((got - chern_oracle(&f, &[1, 2, 3, 4], &x)).norm() <= 1e-11);
}

#[test]
fn k2_density_is_four_times_the_top_wedge() {
    let lat = Lattice::periodic(&[2, 3, 2, 2]).unwrap();
    let mut rng = random::rng(23);
    let f = random_abelian(&mut rng, &lat, ScalarKind::Complex);
    let ff: DiscreteForm = {
        let form = f.to_form().unwrap();
        form.wedge(&form).unwrap()
    };
    let top = ff.terms().next().unwrap().1.clone();
    for x in lat.sites() {
        let c2 = curvature::chern_density(&f, 2, &x).unwrap();
        assert!((c2 - top.at(&x).unwrap()[(0, 0)] * 4.0).norm() <= 1e-11);
    }
}

#[test]
fn k1_density_and_errors() {
    let lat = Lattice::periodic(&[3, 4]).unwrap();
    let mut rng = random::rng(24);
    let f = random_abelian(&mut rng, &lat, ScalarKind::Complex);
    let f01 = f.component(0, 1).unwrap();
    for x in lat.sites() {
        let got = curvature::chern_density(&f, 1, &x).unwrap();
        assert!((got - f01.at(&x).unwrap()[(0, 0)] * 2.0).norm() <= 1e-15);
    }
    let zero = curvature::curvature_from_b(&ConnectionB::zero(&lat, 1, ScalarKind::Real).unwrap()).unwrap();
    assert_eq!(curvature::chern_density(&zero, 1, &Site::origin(2)).unwrap(), Scalar::new(0.0, 0.0));
    assert!(matches!(
        curvature::chern_density(&f, 2, &Site::origin(2)),
        Err(ddgeom::Error::Dimension { required: 4, found: 2 })
    ));
    assert!(curvature::chern_density(&f, 0, &Site::origin(2)).is_err());
    assert!(curvature::chern_density_in(&f, &[0, 0], &Site::origin(2)).is_err());
    let b2 = ConnectionB::zero(&lat, 2, ScalarKind::Real).unwrap();
    let f2 = curvature::curvature_from_b(&b2).unwrap();
    assert!(curvature::chern_density(&f2, 1, &Site::origin(2)).is_err());
}

fn random_u1_gauge(rng: &mut impl Rng, lat: &Lattice) -> GaugeTransform {
    GaugeTransform::new(random::u1_gauge_field(rng, lat)).unwrap()
}

#[test]
fn constant_flux_charge() {
    let mut rng = random::rng(25);
    for l in [4usize, 8, 16] {
        let lat = Lattice::periodic(&[l, l]).unwrap();
        for q in -3..=3 {
            let u = ConnectionU::new(io::constant_flux(&lat, q).unwrap()).unwrap();
            let rep = curvature::topological_charge_u1(&u, 0, 1, &Site::origin(2)).unwrap();
            assert_eq!(rep.charge, q as i64);
            assert!(rep.residual <= 1e-10);
            assert_eq!(rep.plaquettes, l * l);
            for _ in 0..20 {
                let g = random_u1_gauge(&mut rng, &lat);
                let u2 = connection::gauge_transform_u(&u, &g).unwrap();
                let rep2 = curvature::topological_charge_u1(&u2, 0, 1, &Site::origin(2)).unwrap();
                assert_eq!(rep2.charge, q as i64);
                assert!(rep2.residual <= 1e-10);
            }
            // swapping the plane orientation flips the sign
            let flipped = curvature::topological_charge_u1(&u, 1, 0, &Site::origin(2)).unwrap();
            assert_eq!(flipped.charge, -(q as i64));
        }
    }
}

/// Winding oracle: with link angles θ, each plaquette's raw angle sum
/// telescopes to zero over the torus, so the charge is the number of 2π
/// wraps removed by the principal branch.
fn winding_oracle(angles: &[Vec<f64>], lat: &Lattice) -> i64 {
    let mut wraps = 0.0;
    for x in lat.sites() {
        let at = |s: &Site, d: usize| angles[lat.index(s).unwrap()][d];
        let raw = at(&x, 0) + at(&shifted(lat, &x, &[0]), 1) - at(&shifted(lat, &x, &[1]), 0) - at(&x, 1);
        let mut principal = raw.rem_euclid(2.0 * PI);
        if principal > PI {
            principal -= 2.0 * PI;
        }
        wraps += (principal - raw) / (2.0 * PI);
    }
    wraps.round() as i64
}

#[test]
fn random_u1_charge_matches_winding_oracle() {
    let mut rng = random::rng(26);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..40 {
        let l = rng.random_range(2..=5);
        let lat = Lattice::periodic(&[l, l]).unwrap();
        let angles: Vec<Vec<f64>> = (0..lat.volume())
            .map(|_| (0..2).map(|_| rng.random_range(-PI..PI)).collect())
            .collect();
        let u = ConnectionU::new(LinkField::from_fn(&lat, 1, ScalarKind::Complex, |s, d| {
            ddgeom::linalg::scalar(Scalar::from_polar(1.0, angles[lat.index(s).unwrap()][d]))
        }))
        .unwrap();
        let rep = curvature::topological_charge_u1(&u, 0, 1, &Site::origin(2)).unwrap();
        assert!(rep.residual <= 1e-10);
        assert_eq!(rep.charge, winding_oracle(&angles, &lat));
        seen.insert(rep.charge);

        for dir in 0..2 {
            let moved = ConnectionU::new(u.links().shift(dir, Orientation::Forward).unwrap()).unwrap();
            let rep2 = curvature::topological_charge_u1(&moved, 0, 1, &Site::origin(2)).unwrap();
            assert_eq!(rep2.charge, rep.charge);
        }
    }
    assert!(seen.len() > 1, "sample should contain nonzero charges: {seen:?}");
}

#[test]
fn charge_in_a_plane_slice_and_errors() {
    let lat = Lattice::periodic(&[4, 3, 4]).unwrap();
    let mut rng = random::rng(27);
    let u = ConnectionU::new(LinkField::from_fn(&lat, 1, ScalarKind::Complex, |_, _| random::u1(&mut rng))).unwrap();
    for y in 0..3 {
        let base = Site::new(vec![0, y, 0]);
        let rep = curvature::topological_charge_u1(&u, 0, 2, &base).unwrap();
        assert!(rep.residual <= 1e-10);
        assert_eq!(rep.plaquettes, 16);
        // translations inside the plane leave the slice unchanged
        let moved = ConnectionU::new(u.links().shift(0, Orientation::Backward).unwrap()).unwrap();
        assert_eq!(curvature::topological_charge_u1(&moved, 0, 2, &base).unwrap().charge, rep.charge);
        // translating across planes moves the slice with the config
        let moved = ConnectionU::new(u.links().shift(1, Orientation::Forward).unwrap()).unwrap();
        let prev = Site::new(vec![0, (y + 2) % 3, 0]);
        assert_eq!(curvature::topological_charge_u1(&moved, 0, 2, &prev).unwrap().charge, rep.charge);
    }
    let id = ConnectionU::identity(&lat, 1, ScalarKind::Complex).unwrap();
    assert_eq!(curvature::topological_charge_u1(&id, 0, 1, &Site::origin(3)).unwrap().charge, 0);

    let bad = ConnectionU::new(LinkField::constant(
        &lat,
        ScalarKind::Complex,
        &ddgeom::linalg::scalar(Scalar::new(1.5, 0.0)),
    ))
    .unwrap();
    assert!(matches!(
        curvature::topological_charge_u1(&bad, 0, 1, &Site::origin(3)),
        Err(ddgeom::Error::NotUnimodular { .. })
    ));
    let m2 = ConnectionU::identity(&lat, 2, ScalarKind::Complex).unwrap();
    assert!(curvature::topological_charge_u1(&m2, 0, 1, &Site::origin(3)).is_err());
}
